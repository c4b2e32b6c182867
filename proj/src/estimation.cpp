#include "spinterf/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "spinterf/csv.hpp"
#include "spinterf/dynamics.hpp"
#include "spinterf/errors.hpp"
#include "spinterf/interference.hpp"
#include "spinterf/metrology.hpp"
#include "spinterf/parallel.hpp"
#include "spinterf/rng.hpp"

namespace spinterf {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kDensityFloor = 1e-300;

struct WeightedPoint {
  double x;
  double weight;
};

DetectionDensity model_density(const ParamSet& model, double B) {
  const ParamSet p = model.with_field(B);
  const GaussianWavepacket packet{p.x0, p.sigma, 0.0, 0.0};
  return DetectionDensity(entangle(balanced_spin_half(), packet, p), p.t_free, p);
}

std::vector<WeightedPoint> pool_positions(const ShotRecord& record, std::size_t bins) {
  std::vector<WeightedPoint> out;
  if (bins == 0) {
    out.reserve(record.positions.size());
    for (double x : record.positions) out.push_back({x, 1.0});
    return out;
  }
  const double lo = record.grid.x_min();
  const double width = (record.grid.x_max() - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double x : record.positions) {
    auto i = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(i, bins - 1)] += 1.0;
  }
  for (std::size_t i = 0; i < bins; ++i) {
    if (counts[i] > 0.0) out.push_back({lo + (static_cast<double>(i) + 0.5) * width, counts[i]});
  }
  return out;
}

double pooled_log_likelihood(const std::vector<WeightedPoint>& pts, const ParamSet& model, double B) {
  const DetectionDensity rho = model_density(model, B);
  double s = 0.0;
  for (const auto& pt : pts) s += pt.weight * std::log(std::max(rho(pt.x), kDensityFloor));
  return s;
}

double sample_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

ShotRecord sample_positions(std::span<const double> dens, const Grid& grid, std::size_t n_shots, std::uint64_t seed,
                            std::uint64_t stream, const ParamSet& params) {
  if (dens.size() != grid.size()) throw ValidationError("density and grid sizes differ");
  if (n_shots < 1) throw ValidationError("n_shots must be >= 1");
  const double dx = grid.spacing();
  std::vector<double> cdf(dens.size() + 1, 0.0);
  for (std::size_t i = 0; i < dens.size(); ++i) {
    if (!(dens[i] >= 0.0)) throw UnnormalizedDensity("density has a negative or NaN entry");
    cdf[i + 1] = cdf[i] + dens[i] * dx;
  }
  if (std::abs(cdf.back() - 1.0) > 1e-6) throw UnnormalizedDensity("density integrates to " + format_double(cdf.back()));

  ShotRecord rec;
  rec.seed = seed;
  rec.stream = stream;
  rec.rng_algorithm = kRngAlgorithm;
  rec.params = params;
  rec.grid = grid;
  rec.positions.reserve(n_shots);
  CounterRng rng(seed, stream);
  const double total = cdf.back();
  for (std::size_t s = 0; s < n_shots; ++s) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto cell = static_cast<std::size_t>(it - cdf.begin()) - 1;
    const double mass = cdf[cell + 1] - cdf[cell];
    const double frac = mass > 0.0 ? (u - cdf[cell]) / mass : 0.5;
    const double lo = std::max(grid.x_min(), grid.x(cell) - 0.5 * dx);
    const double hi = std::min(grid.x_max(), grid.x(cell) + 0.5 * dx);
    rec.positions.push_back(std::clamp(lo + frac * (hi - lo), lo, hi));
  }
  return rec;
}

double log_likelihood(const ShotRecord& record, const ParamSet& model, double B) {
  return pooled_log_likelihood(pool_positions(record, 0), model, B);
}

FieldFit fit_field(const ShotRecord& record, const ParamSet& model, double B_init, const FitOptions& opts) {
  if (record.positions.empty()) throw ValidationError("empty shot record");
  if (!(B_init != 0.0) || !std::isfinite(B_init)) throw ZeroField("fit_field needs a nonzero finite B_init");
  if (!(opts.bracket_fraction > 0.0 && opts.bracket_fraction < 1.0)) {
    throw ValidationError("bracket fraction must lie in (0, 1)");
  }
  if (opts.scan_points < 5) throw ValidationError("scan needs >= 5 points");

  std::size_t bins = opts.likelihood_bins;
  if (opts.unbinned) {
    bins = 0;
  } else if (bins == 0) {
    const double b_max = std::abs(B_init) * (1.0 + opts.bracket_fraction);
    const double slope = std::abs(model.m_p * model.k * model.gamma * b_max * model.t_couple / model.t_free);
    const double width = std::min(2.0 * std::numbers::pi / slope / 64.0,
                                  sigma_t(model.sigma, model.t_free, model.m_p, model.hbar) / 8.0);
    const double span = record.grid.x_max() - record.grid.x_min();
    bins = static_cast<std::size_t>(std::min(std::ceil(span / width), 1048576.0));
  }
  const auto pts = pool_positions(record, bins);
  FieldFit fit;
  auto loglik = [&](double B) {
    ++fit.evaluations;
    return pooled_log_likelihood(pts, model, B);
  };

  const double lo = B_init * (1.0 - opts.bracket_fraction);
  const double hi = B_init * (1.0 + opts.bracket_fraction);
  const double step = (hi - lo) / (opts.scan_points - 1);
  std::vector<double> scan(opts.scan_points);
  for (int i = 0; i < opts.scan_points; ++i) scan[i] = loglik(lo + step * i);
  const auto best_it = std::max_element(scan.begin(), scan.end());
  const auto best = static_cast<int>(best_it - scan.begin());
  const double spread = *best_it - *std::min_element(scan.begin(), scan.end());
  if (!(spread >= 0.5)) throw NonConvergence("log-likelihood is flat across the bracket; no fringe information");
  if (best == 0 || best == opts.scan_points - 1) throw BracketMiss("likelihood peaks at the edge of the scan bracket");

  double a = lo + step * (best - 1);
  double b = lo + step * (best + 1);
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = loglik(c);
  double fd = loglik(d);
  while (std::abs(b - a) > 1e-4 * std::abs(step)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = loglik(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = loglik(d);
    }
  }
  fit.B_hat = 0.5 * (a + b);
  fit.log_likelihood = loglik(fit.B_hat);

  auto curvature = [&](double h) {
    return (loglik(fit.B_hat + h) - 2.0 * fit.log_likelihood + loglik(fit.B_hat - h)) / (h * h);
  };
  double h = 0.25 * std::abs(step);
  double d2 = curvature(h);
  if (!(d2 < 0.0)) throw NonConvergence("log-likelihood is not concave at the optimum");
  const double first = 1.0 / std::sqrt(-d2);
  if (first < h) {
    d2 = curvature(first);
    if (!(d2 < 0.0)) throw NonConvergence("log-likelihood is not concave at the optimum");
  }
  fit.std_err = 1.0 / std::sqrt(-d2);
  return fit;
}

std::string to_string(ScalingMode m) {
  switch (m) {
    case ScalingMode::Classical:
      return "classical";
    case ScalingMode::Quantum:
      return "quantum";
    case ScalingMode::Both:
      return "both";
  }
  return "both";
}

ScalingMode scaling_mode_from_string(const std::string& s) {
  if (s == "classical") return ScalingMode::Classical;
  if (s == "quantum") return ScalingMode::Quantum;
  if (s == "both") return ScalingMode::Both;
  throw ValidationError("unknown scaling mode '" + s + "'");
}

std::uint64_t shot_stream(int n_particles, int trial, int particle) {
  if (n_particles < 1 || n_particles >= (1 << 23) || trial < 0 || trial >= (1 << 24) || particle < 0 ||
      particle >= (1 << 16)) {
    throw ValidationError("stream index out of range");
  }
  return (static_cast<std::uint64_t>(n_particles) << 40) | (static_cast<std::uint64_t>(trial) << 16) |
         static_cast<std::uint64_t>(particle);
}

ScalingCurve scaling_experiment(const ParamSet& p, const ScalingOptions& opts) {
  p.validate();
  if (opts.n_list.empty()) throw ValidationError("N list is empty");
  if (opts.trials < 30) throw ValidationError("scaling needs >= 30 trials");
  if (opts.shots < 1) throw ValidationError("shots must be >= 1");
  std::vector<int> ns = opts.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() < 1) throw ValidationError("N must be >= 1");

  const auto shots = static_cast<double>(opts.shots);
  ScalingCurve curve;
  const bool classical = opts.mode != ScalingMode::Quantum;
  const bool quantum = opts.mode != ScalingMode::Classical;

  std::vector<std::vector<double>> estimates(ns.size());
  double q_single = 0.0;
  if (classical) {
    q_single = qfi_report(p, 1, PaperFormula::SingleParticle).qfi_numeric;
    const GaussianWavepacket packet{p.x0, p.sigma, 0.0, 0.0};
    const SpinPositionState state = entangle(balanced_spin_half(), packet, p);
    const Grid grid = density_grid(state, p.t_free, p);
    const std::vector<double> dens = density(state, grid, p.t_free, p);

    std::vector<std::pair<std::size_t, int>> tasks;
    for (std::size_t r = 0; r < ns.size(); ++r) {
      estimates[r].assign(opts.trials, 0.0);
      for (int t = 0; t < opts.trials; ++t) tasks.emplace_back(r, t);
    }
    parallel_for(tasks.size(), opts.jobs, [&](std::size_t i) {
      const auto [r, trial] = tasks[i];
      const int n = ns[r];
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const ShotRecord rec = sample_positions(dens, grid, opts.shots, opts.seed, shot_stream(n, trial, j), p);
        sum += fit_field(rec, p, p.B, opts.fit).B_hat;
      }
      estimates[r][trial] = sum / n;
    });
  }

  for (std::size_t r = 0; r < ns.size(); ++r) {
    const int n = ns[r];
    if (classical) {
      ScalingRow row{"classical", n, opts.shots, opts.trials, sample_std(estimates[r]), 0.0, 0.0};
      row.crb_paper = crb_single(p) / std::sqrt(n * shots);
      row.crb_numeric = 1.0 / std::sqrt(n * shots * q_single);
      curve.rows.push_back(row);
    }
    if (quantum) {
      ScalingRow row{"quantum", n, opts.shots, opts.trials, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
      row.crb_paper = crb_ghz_paper(p, n) / std::sqrt(shots);
      row.crb_numeric = 1.0 / std::sqrt(shots * qfi_report(p, n, PaperFormula::Ghz).qfi_numeric);
      curve.rows.push_back(row);
    }
  }
  return curve;
}

void write_scaling_csv(const ScalingCurve& curve, const ParamSet& p, const std::filesystem::path& path) {
  CsvTable table;
  table.comments.push_back(provenance_comment(p));
  table.header = {"mode", "N", "shots", "trials", "empirical_std", "crb_paper", "crb_numeric"};
  for (const auto& r : curve.rows) {
    table.rows.push_back({r.mode, std::to_string(r.n_particles), std::to_string(r.shots), std::to_string(r.trials),
                          format_double(r.empirical_std), format_double(r.crb_paper), format_double(r.crb_numeric)});
  }
  table.write(path);
}

}  // namespace spinterf
