#include "spinterf/metrology.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>

#include "spinterf/csv.hpp"
#include "spinterf/dynamics.hpp"

namespace spinterf {

Complex overlap(const GaussianWavepacket& a, const GaussianWavepacket& b) {
  // Integrate conj(psi_a) psi_b in u = x - a.center as a complex Gaussian.
  const double sa2 = a.width_sigma * a.width_sigma;
  const double sb2 = b.width_sigma * b.width_sigma;
  const double gap = b.center - a.center;
  const double quad = 0.25 / sa2 + 0.25 / sb2;
  const Complex lin(gap / (2.0 * sb2), (b.mean_momentum - a.mean_momentum) / constants::hbar);
  const Complex offset(-gap * gap / (4.0 * sb2), -b.mean_momentum * gap / constants::hbar + b.global_phase - a.global_phase);
  const double norm = std::pow(4.0 * std::numbers::pi * std::numbers::pi * sa2 * sb2, -0.25);
  return norm * std::sqrt(std::numbers::pi / quad) * std::exp(lin * lin / (4.0 * quad) + offset);
}

Complex overlap(const SpinPositionState& a, const SpinPositionState& b) {
  Complex s = 0.0;
  for (const auto& ba : a.branches()) {
    for (const auto& bb : b.branches()) {
      if (ba.m == bb.m) s += std::conj(ba.amplitude) * bb.amplitude * overlap(ba.packet, bb.packet);
    }
  }
  return s;
}

void GhzCatState::validate() const {
  if (n_particles < 1) throw ValidationError("cat state needs N >= 1");
  if (!(width_sigma > 0.0)) throw ValidationError("cat state width must be positive");
  if (!std::isfinite(per_particle_separation)) throw ValidationError("cat state separation must be finite");
  const double norm = std::norm(branch_amplitudes[0]) + std::norm(branch_amplitudes[1]);
  if (std::abs(norm - 1.0) > 1e-12) throw ValidationError("cat state amplitudes must satisfy |a+|^2 + |a-|^2 = 1");
}

GaussianWavepacket GhzCatState::particle_packet(int branch_sign) const {
  return {x0 + 0.5 * branch_sign * per_particle_separation, width_sigma, mean_momentum, 0.0};
}

GhzCatState ghz_cat_state(const ParamSet& p, int n_particles, double mean_momentum) {
  GhzCatState s;
  s.n_particles = n_particles;
  s.per_particle_separation = displacement(kHalf, p) - displacement(-kHalf, p);
  s.width_sigma = p.sigma;
  s.x0 = p.x0;
  s.mean_momentum = mean_momentum;
  s.validate();
  return s;
}

Complex overlap(const GhzCatState& a, const GhzCatState& b) {
  a.validate();
  b.validate();
  if (a.n_particles != b.n_particles) throw ValidationError("cat states differ in particle number");
  const double n = a.n_particles;
  const Complex plus = std::pow(overlap(a.particle_packet(+1), b.particle_packet(+1)), n);
  const Complex minus = std::pow(overlap(a.particle_packet(-1), b.particle_packet(-1)), n);
  return std::conj(a.branch_amplitudes[0]) * b.branch_amplitudes[0] * plus +
         std::conj(a.branch_amplitudes[1]) * b.branch_amplitudes[1] * minus;
}

Complex overlap_cat(const GhzCatState& state, double dB, const ParamSet& p) {
  GhzCatState shifted = state;
  shifted.per_particle_separation -= p.k * p.t_couple * p.gamma * p.hbar * dB;
  return overlap(state, shifted);
}

double qfi_single_analytic(const ParamSet& p) {
  const double v = p.k * p.t_couple * p.gamma * p.hbar / (2.0 * p.sigma);
  return v * v;
}

double crb_single(const ParamSet& p) { return 1.0 / std::sqrt(qfi_single_analytic(p)); }

double qfi_ghz_paper(const ParamSet& p, int n_particles) {
  if (n_particles < 1) throw ValidationError("N must be >= 1");
  const double v = p.k * p.t_couple * p.gamma * p.hbar / (4.0 * p.sigma);
  const double n = n_particles;
  return n * n * v * v;
}

double crb_ghz_paper(const ParamSet& p, int n_particles) { return 1.0 / std::sqrt(qfi_ghz_paper(p, n_particles)); }

std::string to_string(PaperFormula f) { return f == PaperFormula::SingleParticle ? "single" : "ghz"; }

PaperFormula paper_formula_from_string(const std::string& s) {
  if (s == "single") return PaperFormula::SingleParticle;
  if (s == "ghz") return PaperFormula::Ghz;
  throw ValidationError("unknown formula '" + s + "'");
}

QfiReport qfi_report(const ParamSet& p, int n_particles, PaperFormula formula, double mean_momentum,
                     double dB_step) {
  p.validate();
  QfiReport r;
  r.n_particles = n_particles;
  r.formula = formula;
  QfiEstimate est;
  if (formula == PaperFormula::SingleParticle) {
    if (n_particles != 1) throw ValidationError("single-particle formula needs N = 1");
    const SpinConfig cfg = balanced_spin_half();
    const GaussianWavepacket packet{p.x0, p.sigma, mean_momentum, 0.0};
    est = qfi_numeric([&](double B) { return entangle(cfg, packet, p.with_field(B)); }, p.B, dB_step);
    r.qfi_paper = qfi_single_analytic(p);
  } else {
    est = qfi_numeric([&](double B) { return ghz_cat_state(p.with_field(B), n_particles, mean_momentum); }, p.B,
                      dB_step);
    r.qfi_paper = qfi_ghz_paper(p, n_particles);
  }
  r.qfi_numeric = est.value;
  r.crb_paper = 1.0 / std::sqrt(r.qfi_paper);
  r.crb_numeric = 1.0 / std::sqrt(r.qfi_numeric);
  r.delta_B_step = est.step;
  r.discrepancy_ratio = r.qfi_paper / r.qfi_numeric;
  r.halving_ratio = est.halving_ratio;
  return r;
}

PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3) throw ValidationError("power-law fit needs >= 3 paired points");
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ValidationError("power-law fit needs positive data");
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("power-law fit needs distinct x values");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(ys[i]) - (my + fit.exponent * (std::log(xs[i]) - mx));
    ssr += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  fit.ci95 = boost::math::quantile(dist, 0.975) * se;
  return fit;
}

std::vector<std::string> qfi_report_header() {
  return {"n_particles", "formula",      "qfi_paper",         "qfi_numeric",  "crb_paper",
          "crb_numeric", "delta_B_step", "discrepancy_ratio", "halving_ratio"};
}

std::vector<std::string> qfi_report_cells(const QfiReport& r) {
  return {std::to_string(r.n_particles), to_string(r.formula),       format_double(r.qfi_paper),
          format_double(r.qfi_numeric),  format_double(r.crb_paper), format_double(r.crb_numeric),
          format_double(r.delta_B_step), format_double(r.discrepancy_ratio), format_double(r.halving_ratio)};
}

QfiReport qfi_report_from_cells(const std::vector<std::string>& header, const std::vector<std::string>& cells) {
  if (header.size() != cells.size()) throw ValidationError("row length does not match header");
  QfiReport r;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& key = header[i];
    const auto& v = cells[i];
    if (key == "n_particles") r.n_particles = std::stoi(v);
    else if (key == "formula") r.formula = paper_formula_from_string(v);
    else if (key == "qfi_paper") r.qfi_paper = std::stod(v);
    else if (key == "qfi_numeric") r.qfi_numeric = std::stod(v);
    else if (key == "crb_paper") r.crb_paper = std::stod(v);
    else if (key == "crb_numeric") r.crb_numeric = std::stod(v);
    else if (key == "delta_B_step") r.delta_B_step = std::stod(v);
    else if (key == "discrepancy_ratio") r.discrepancy_ratio = std::stod(v);
    else if (key == "halving_ratio") r.halving_ratio = std::stod(v);
  }
  return r;
}

}  // namespace spinterf
