#include "spinterf/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "spinterf/config.hpp"
#include "spinterf/csv.hpp"
#include "spinterf/dynamics.hpp"
#include "spinterf/errors.hpp"
#include "spinterf/estimation.hpp"
#include "spinterf/interference.hpp"
#include "spinterf/metrology.hpp"
#include "spinterf/parallel.hpp"
#include "spinterf/svg.hpp"

namespace spinterf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParamFlags {
  std::optional<double> gamma, gamma_ghz, k, t_couple, t_free, B, m_p, sigma, x0;
};

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("sweep needs >= 1 point");
  if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("log sweep needs 0 < min <= max");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  v.back() = hi;
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("sweep needs >= 1 point");
  if (!(hi >= lo)) throw ValidationError("sweep needs min <= max");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  v.back() = hi;
  return v;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("bad integer list entry '" + item + "'");
    }
    if (used != item.size()) throw ValidationError("bad integer list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("integer list is empty");
  return out;
}

ParamSet resolve_params(const std::string& config_path, const ParamFlags& f) {
  ConfigEntries entries;
  if (!config_path.empty()) entries = read_config_file(config_path);
  auto set = [&](const char* key, const std::optional<double>& v) {
    if (v) entries[key] = format_double(*v);
  };
  if (f.gamma && f.gamma_ghz) throw ValidationError("--gamma and --gamma-ghz are mutually exclusive");
  if (f.gamma) entries.erase("gamma_ghz_per_t");
  if (f.gamma_ghz) entries.erase("gamma");
  set("gamma", f.gamma);
  set("gamma_ghz_per_t", f.gamma_ghz);
  set("k", f.k);
  set("t_couple", f.t_couple);
  set("t_free", f.t_free);
  set("B", f.B);
  set("m_p", f.m_p);
  set("sigma", f.sigma);
  set("x0", f.x0);
  return apply_config(ParamSet{}, entries);
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::string command, std::ostream& log)
      : cfg_(cfg), command_(std::move(command)), log_(log) {
    std::filesystem::create_directories(cfg_.out_dir);
  }

  void table(const std::string& name, CsvTable t) const {
    t.comments.insert(t.comments.begin(), provenance_comment(cfg_.params));
    t.comments.insert(t.comments.begin() + 1, "command=" + command_ + " seed=" + std::to_string(cfg_.seed) +
                                                  (cfg_.paper_literal ? " paper_literal=1" : ""));
    const auto path = cfg_.out_dir / (name + ".csv");
    t.write(path);
    log_ << "wrote " << path.string() << "\n";
  }

  void plot(const std::string& name, const svg::Plot& p) const {
    if (!cfg_.svg) return;
    const auto path = cfg_.out_dir / (name + ".svg");
    svg::write(p, path);
    log_ << "wrote " << path.string() << "\n";
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::ostream& log_;
};

GaussianWavepacket initial_packet(const ParamSet& p) { return {p.x0, p.sigma, 0.0, 0.0}; }

std::vector<std::string> cells(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(format_double(x));
  return out;
}

void snapshot(const RunConfig& cfg, std::optional<double> time, const std::string& spin, const Emitter& emit) {
  const ParamSet& p = cfg.params;
  const double t = time.value_or(p.t_free);
  if (!(t >= 0.0)) throw ValidationError("--time must be >= 0");
  std::vector<std::pair<std::string, SpinConfig>> configs;
  if (spin == "half" || spin == "both") configs.emplace_back("spin_half", balanced_spin_half());
  if (spin == "one" || spin == "both") configs.emplace_back("spin_one", balanced_spin(HalfInt::integer(1)));
  if (configs.empty()) throw ValidationError("--spin must be half, one or both");

  for (const auto& [name, spin_cfg] : configs) {
    const SpinPositionState state = entangle(spin_cfg, initial_packet(p), p);
    const Grid grid = density_grid(state, t, p);
    const DensityTrace trace = density_trace(state, grid, t, p);
    std::vector<EvolvedPacket> evolved;
    CsvTable table;
    table.header = {"x", "total", "classical_part", "cross_term"};
    for (const auto& b : state.branches()) {
      evolved.push_back(evolve_analytic(b.packet, t, p));
      table.header.push_back("branch_m" + b.m.to_string());
    }
    svg::Plot plot{"density, " + name, "x (m)", "density (1/m)", false, false, {}};
    plot.series.push_back({"total", {}, {}});
    plot.series.push_back({"classical", {}, {}});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      std::vector<double> row{x, trace.total[i], trace.classical_part[i], trace.cross_term[i]};
      for (std::size_t b = 0; b < evolved.size(); ++b) {
        row.push_back(std::norm(state.branches()[b].amplitude) * std::norm(evolved[b].amplitude(x)) /
                      trace.normalization);
      }
      table.add_row(row);
      plot.series[0].xs.push_back(x);
      plot.series[0].ys.push_back(trace.total[i]);
      plot.series[1].xs.push_back(x);
      plot.series[1].ys.push_back(trace.classical_part[i]);
    }
    emit.table("snapshot_" + name, std::move(table));
    emit.plot("snapshot_" + name, plot);
  }
}

void disperse(const RunConfig& cfg, std::optional<double> t_max, int points, const Emitter& emit) {
  const ParamSet& p = cfg.params;
  const double hi = t_max.value_or(10.0 * p.t_free);
  if (!(hi > 0.0)) throw ValidationError("--t-max must be positive");
  CsvTable table;
  table.header = {"t", "tau", "sigma_t", "asymptote"};
  svg::Plot plot{"wavepacket dispersion", "t (s)", "width (m)", false, false, {{"sigma_t", {}, {}}, {"far-field asymptote", {}, {}}}};
  for (double t : linspace(0.0, hi, points)) {
    const double w = sigma_t(p.sigma, t, p.m_p, p.hbar);
    const double asym = p.hbar * t / (2.0 * p.m_p * p.sigma);
    table.add_row({t, spreading_ratio(p.sigma, t, p.m_p, p.hbar), w, asym});
    plot.series[0].xs.push_back(t);
    plot.series[0].ys.push_back(w);
    plot.series[1].xs.push_back(t);
    plot.series[1].ys.push_back(asym);
  }
  emit.table("disperse", std::move(table));
  emit.plot("disperse", plot);
}

struct FringeRow {
  double lambda = kNaN, extracted = kNaN, vis = kNaN, vis_extracted = kNaN;
  bool ok = false;
};

FringeRow observe_fringes(const ParamSet& pb) {
  FringeRow row;
  row.lambda = fringe_spacing(pb);
  row.vis = visibility(pb);
  const SpinPositionState state = entangle(balanced_spin_half(), initial_packet(pb), pb);
  const Grid grid = density_grid(state, pb.t_free, pb);
  const auto dens = density(state, grid, pb.t_free, pb);
  try {
    const FringeObservation obs = extract_fringes(dens, grid);
    row.extracted = obs.spacing;
    row.vis_extracted = obs.visibility;
    row.ok = true;
  } catch (const NoFringesDetected&) {
  }
  return row;
}

void fringes(const RunConfig& cfg, std::optional<double> b_min, std::optional<double> b_max, int points,
             const Emitter& emit) {
  const ParamSet& p = cfg.params;
  const double lo = b_min.value_or(p.B);
  const double hi = b_max.value_or(3.0 * p.B);
  if (lo == 0.0 || hi == 0.0) throw ZeroField("fringe spacing is undefined at B = 0");
  const auto fields = logspace(lo, hi, points);
  std::vector<FringeRow> rows(fields.size());
  parallel_for(fields.size(), cfg.jobs, [&](std::size_t i) { rows[i] = observe_fringes(p.with_field(fields[i])); });

  CsvTable table;
  table.header = {"B", "lambda_analytic", "lambda_extracted", "rel_error", "visibility_analytic",
                  "visibility_extracted", "status"};
  if (cfg.paper_literal) {
    table.header.push_back("lambda_paper_literal");
    table.header.push_back("literal_over_analytic");
  }
  svg::Plot plot{"fringe spacing", "B (T)", "spacing (m)", true, true, {{"analytic", {}, {}}, {"extracted", {}, {}}}};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& r = rows[i];
    auto row = cells({fields[i], r.lambda, r.extracted, (r.extracted - r.lambda) / r.lambda, r.vis, r.vis_extracted});
    row.push_back(r.ok ? "ok" : "no_fringes");
    if (cfg.paper_literal) {
      const double literal = fringe_spacing_paper_literal(p.with_field(fields[i]));
      row.push_back(format_double(literal));
      row.push_back(format_double(literal / r.lambda));
    }
    table.rows.push_back(row);
    plot.series[0].xs.push_back(fields[i]);
    plot.series[0].ys.push_back(r.lambda);
    plot.series[1].xs.push_back(fields[i]);
    plot.series[1].ys.push_back(r.extracted);
  }
  emit.table("fringes", std::move(table));
  emit.plot("fringes", plot);
}

void visibility_sweep(const RunConfig& cfg, double r_max, int points, const Emitter& emit) {
  const ParamSet& p = cfg.params;
  if (!(r_max >= 0.0)) throw ValidationError("--ratio-max must be >= 0");
  const double width = sigma_t(p.sigma, p.t_free, p.m_p, p.hbar);
  const double per_tesla = std::abs(p.k * p.t_couple * p.gamma * p.hbar);
  if (!(per_tesla > 0.0)) throw DegenerateGeometry("branch separation does not depend on B");
  const auto ratios = linspace(0.0, r_max, points);
  std::vector<std::array<double, 5>> rows(ratios.size());
  parallel_for(ratios.size(), cfg.jobs, [&](std::size_t i) {
    const double sep = ratios[i] * width;
    const ParamSet pb = p.with_field(sep / per_tesla);
    const GaussianWavepacket left{p.x0 - 0.5 * sep, width, 0.0, 0.0};
    const GaussianWavepacket right{p.x0 + 0.5 * sep, width, 0.0, 0.0};
    double extracted = kNaN, contrast = kNaN;
    if (ratios[i] > 0.0) {
      const SpinPositionState state = entangle(balanced_spin_half(), initial_packet(pb), pb);
      const Grid grid = density_grid(state, pb.t_free, pb);
      try {
        const auto obs = extract_fringes(density(state, grid, pb.t_free, pb), grid);
        extracted = obs.visibility;
        contrast = obs.center_contrast;
      } catch (const NoFringesDetected&) {
      }
    }
    rows[i] = {pb.B, visibility(pb), std::abs(overlap(left, right)), extracted, contrast};
  });
  CsvTable table;
  table.header = {"ratio", "B", "visibility_analytic", "visibility_overlap", "visibility_extracted", "center_contrast"};
  svg::Plot plot{"fringe visibility", "separation / sigma_t", "visibility", false, false,
                 {{"analytic", {}, {}}, {"extracted", {}, {}}}};
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto& r = rows[i];
    table.add_row({ratios[i], r[0], r[1], r[2], r[3], r[4]});
    plot.series[0].xs.push_back(ratios[i]);
    plot.series[0].ys.push_back(r[1]);
    plot.series[1].xs.push_back(ratios[i]);
    plot.series[1].ys.push_back(r[3]);
  }
  emit.table("visibility", std::move(table));
  emit.plot("visibility", plot);
}

void sensitivity_sweep(const RunConfig& cfg, std::optional<double> k_min, std::optional<double> k_max, int points,
                       double delta_phi, std::optional<double> x, const Emitter& emit) {
  const ParamSet& p = cfg.params;
  const double at = x.value_or(p.x0 + p.sigma);
  CsvTable table;
  table.header = {"k", "slope", "delta_B", "delta_B_de_broglie"};
  svg::Plot plot{"field sensitivity", "k (1/(kg m/s))", "delta B (T)", true, true, {{"delta_B", {}, {}}}};
  for (double k : logspace(k_min.value_or(0.1 * p.k), k_max.value_or(10.0 * p.k), points)) {
    ParamSet pk = p;
    pk.k = k;
    const Sensitivity s = sensitivity(pk, at, delta_phi);
    table.add_row({k, s.slope, s.delta_B, s.delta_B_de_broglie});
    plot.series[0].xs.push_back(k);
    plot.series[0].ys.push_back(s.delta_B);
  }
  emit.table("sensitivity", std::move(table));
  emit.plot("sensitivity", plot);
}

struct QfiOptions {
  std::string sweep = "none";
  std::optional<double> from, to;
  int points = 5;
  int n_particles = 1;
  std::string n_list = "1,2,4,8,16";
  double db_step = 0.0;
  double mean_momentum = 0.0;
};

void qfi_sweep(const RunConfig& cfg, const QfiOptions& o, const Emitter& emit) {
  const ParamSet& p = cfg.params;
  struct Job {
    ParamSet params;
    int n;
    PaperFormula formula;
  };
  std::vector<Job> jobs;
  auto both = [&](const ParamSet& q) {
    jobs.push_back({q, 1, PaperFormula::SingleParticle});
    jobs.push_back({q, o.n_particles, PaperFormula::Ghz});
  };
  if (o.sweep == "none") {
    both(p);
  } else if (o.sweep == "k" || o.sweep == "t" || o.sweep == "sigma") {
    const double base = o.sweep == "k" ? p.k : o.sweep == "t" ? p.t_couple : p.sigma;
    for (double v : logspace(o.from.value_or(0.1 * base), o.to.value_or(10.0 * base), o.points)) {
      ParamSet q = p;
      if (o.sweep == "k") q.k = v;
      else if (o.sweep == "t") q.t_couple = q.t_free = v;
      else q.sigma = v;
      both(q);
    }
  } else if (o.sweep == "N") {
    jobs.push_back({p, 1, PaperFormula::SingleParticle});
    auto ns = parse_int_list(o.n_list);
    std::sort(ns.begin(), ns.end());
    for (int n : ns) jobs.push_back({p, n, PaperFormula::Ghz});
  } else {
    throw ValidationError("--sweep must be none, k, t, sigma or N");
  }

  std::vector<QfiReport> reports(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    reports[i] = qfi_report(jobs[i].params, jobs[i].n, jobs[i].formula, o.mean_momentum, o.db_step);
  });

  CsvTable table;
  table.header = {"k", "t_couple", "sigma"};
  for (const auto& h : qfi_report_header()) table.header.push_back(h);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto row = cells({jobs[i].params.k, jobs[i].params.t_couple, jobs[i].params.sigma});
    for (const auto& c : qfi_report_cells(reports[i])) row.push_back(c);
    table.rows.push_back(row);
  }
  emit.table("qfi", std::move(table));

  if (o.sweep == "N") {
    std::vector<double> ns, numeric, closed;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].formula != PaperFormula::Ghz) continue;
      ns.push_back(jobs[i].n);
      numeric.push_back(reports[i].qfi_numeric);
      closed.push_back(reports[i].qfi_paper);
    }
    if (ns.size() >= 3) {
      CsvTable fit;
      fit.header = {"series", "exponent", "ci95", "prefactor"};
      const PowerLawFit fn = fit_power_law(ns, numeric);
      const PowerLawFit fp = fit_power_law(ns, closed);
      fit.rows.push_back({"qfi_numeric", format_double(fn.exponent), format_double(fn.ci95), format_double(fn.prefactor)});
      fit.rows.push_back({"qfi_paper", format_double(fp.exponent), format_double(fp.ci95), format_double(fp.prefactor)});
      emit.table("qfi_fit", std::move(fit));
    }
    emit.plot("qfi", svg::Plot{"cat-state QFI vs N", "N", "QFI (1/T^2)", true, true,
                               {{"fidelity oracle", ns, numeric}, {"closed form", ns, closed}}});
  }
}

void scaling(const RunConfig& cfg, const std::string& n_list, std::size_t shots, int trials, const std::string& mode,
             const Emitter& emit) {
  ScalingOptions o;
  o.n_list = parse_int_list(n_list);
  o.shots = shots;
  o.trials = trials;
  o.seed = cfg.seed;
  o.mode = scaling_mode_from_string(mode);
  o.jobs = cfg.jobs;
  const ScalingCurve curve = scaling_experiment(cfg.params, o);

  CsvTable table;
  table.header = {"mode", "N", "shots", "trials", "empirical_std", "crb_paper", "crb_numeric"};
  svg::Plot plot{"field uncertainty vs N", "N", "delta B (T)", true, true, {}};
  for (const auto& r : curve.rows) {
    table.rows.push_back({r.mode, std::to_string(r.n_particles), std::to_string(r.shots), std::to_string(r.trials),
                          format_double(r.empirical_std), format_double(r.crb_paper), format_double(r.crb_numeric)});
    auto series = [&](const std::string& label) -> svg::Series& {
      for (auto& s : plot.series)
        if (s.label == label) return s;
      plot.series.push_back({label, {}, {}});
      return plot.series.back();
    };
    if (r.mode == "classical") {
      auto& s = series("classical empirical");
      s.xs.push_back(r.n_particles);
      s.ys.push_back(r.empirical_std);
    }
    auto& b = series(r.mode + " bound");
    b.xs.push_back(r.n_particles);
    b.ys.push_back(r.crb_numeric);
  }
  emit.table("scaling", std::move(table));
  emit.plot("scaling", plot);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-dependent displacement interferometry simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  RunConfig cfg;
  std::string config_path;
  std::string out_dir = ".";
  ParamFlags flags;
  app.add_option("--config", config_path, "key=value parameter file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--svg", cfg.svg, "also write SVG plots");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--paper-literal", cfg.paper_literal, "also report the as-printed fringe-spacing form");
  app.add_option("--gamma", flags.gamma, "gyromagnetic ratio, rad/s/T");
  app.add_option("--gamma-ghz", flags.gamma_ghz, "gyromagnetic ratio, GHz/T");
  app.add_option("--k", flags.k, "coupling constant");
  app.add_option("--t-couple", flags.t_couple, "coupling time, s");
  app.add_option("--t-free", flags.t_free, "free evolution time, s");
  app.add_option("--B", flags.B, "magnetic field, T");
  app.add_option("--m-p", flags.m_p, "particle mass, kg");
  app.add_option("--sigma", flags.sigma, "initial width, m");
  app.add_option("--x0", flags.x0, "initial center, m");

  std::optional<double> snap_time;
  std::string spin = "both";
  auto* snap = app.add_subcommand("snapshot", "branch and total densities for spin-1/2 and spin-1");
  snap->add_option("--time", snap_time, "evolution time, s (default t_free)");
  snap->add_option("--spin", spin, "half, one or both");

  std::optional<double> t_max;
  int disperse_points = 101;
  auto* disp = app.add_subcommand("disperse", "evolved width against time");
  disp->add_option("--t-max", t_max, "largest time, s (default 10 t_free)");
  disp->add_option("--points", disperse_points);

  std::optional<double> b_min, b_max;
  int fringe_points = 10;
  auto* fr = app.add_subcommand("fringes", "fringe spacing against B with extraction checks");
  fr->add_option("--b-min", b_min, "T (default B)");
  fr->add_option("--b-max", b_max, "T (default 3 B)");
  fr->add_option("--points", fringe_points);

  double r_max = 3.0;
  int vis_points = 31;
  auto* vis = app.add_subcommand("visibility", "visibility against branch separation / sigma_t");
  vis->add_option("--ratio-max", r_max);
  vis->add_option("--points", vis_points);

  std::optional<double> k_min, k_max, sens_x;
  int sens_points = 21;
  double delta_phi = 0.01;
  auto* sens = app.add_subcommand("sensitivity", "field uncertainty against coupling strength");
  sens->add_option("--k-min", k_min);
  sens->add_option("--k-max", k_max);
  sens->add_option("--points", sens_points);
  sens->add_option("--delta-phi", delta_phi, "phase uncertainty, rad");
  sens->add_option("--x", sens_x, "detection position, m (default x0 + sigma)");

  QfiOptions qo;
  auto* qfi = app.add_subcommand("qfi", "closed-form QFI against the fidelity oracle");
  qfi->add_option("--sweep", qo.sweep, "none, k, t, sigma or N");
  qfi->add_option("--from", qo.from);
  qfi->add_option("--to", qo.to);
  qfi->add_option("--points", qo.points);
  qfi->add_option("--n-particles", qo.n_particles, "N for the cat-state rows");
  qfi->add_option("--n-list", qo.n_list, "comma-separated N values for --sweep N");
  qfi->add_option("--db-step", qo.db_step, "fixed fidelity step, T (0 = adaptive)");
  qfi->add_option("--mean-momentum", qo.mean_momentum, "experimental: per-particle mean momentum, kg m/s");

  std::string n_list = "1,4,16,64";
  std::size_t shots = 10000;
  int trials = 500;
  std::string mode = "classical";
  auto* sc = app.add_subcommand("scaling", "Monte Carlo field uncertainty against N");
  sc->add_option("--n-list", n_list);
  sc->add_option("--shots", shots);
  sc->add_option("--trials", trials);
  sc->add_option("--mode", mode, "classical, quantum or both");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.params = resolve_params(config_path, flags);
    cfg.out_dir = out_dir;
    const std::string name = app.get_subcommands().front()->get_name();
    const Emitter emit(cfg, name, out);
    if (name == "snapshot") snapshot(cfg, snap_time, spin, emit);
    else if (name == "disperse") disperse(cfg, t_max, disperse_points, emit);
    else if (name == "fringes") fringes(cfg, b_min, b_max, fringe_points, emit);
    else if (name == "visibility") visibility_sweep(cfg, r_max, vis_points, emit);
    else if (name == "sensitivity") sensitivity_sweep(cfg, k_min, k_max, sens_points, delta_phi, sens_x, emit);
    else if (name == "qfi") qfi_sweep(cfg, qo, emit);
    else if (name == "scaling") scaling(cfg, n_list, shots, trials, mode, emit);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace spinterf
