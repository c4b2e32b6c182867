#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spinterf/core.hpp"
#include "spinterf/errors.hpp"

namespace spinterf {

/// <a|b> for two t = 0 Gaussian packets, in closed form.
Complex overlap(const GaussianWavepacket& a, const GaussianWavepacket& b);

/// <a|b>; branches with different spin projections are orthogonal.
Complex overlap(const SpinPositionState& a, const SpinPositionState& b);

/// N-particle cat state after the collective displacement:
///   a+ |+>^N (x) |x0 + sep/2>^N + a- |->^N (x) |x0 - sep/2>^N.
/// Held by its branch parameters only; never expanded on an N-body grid.
struct GhzCatState {
  int n_particles = 1;
  double per_particle_separation = 0.0;  // dx_+ - dx_-, m
  double width_sigma = 1e-6;
  std::array<Complex, 2> branch_amplitudes{Complex(std::numbers::sqrt2 / 2, 0.0), Complex(std::numbers::sqrt2 / 2, 0.0)};
  double x0 = 0.0;
  double mean_momentum = 0.0;  // per particle, kg m / s

  void validate() const;
  GaussianWavepacket particle_packet(int branch_sign) const;
};

GhzCatState ghz_cat_state(const ParamSet& p, int n_particles, double mean_momentum = 0.0);

/// Same-branch terms are N-th powers of the single-particle Gaussian overlap;
/// cross-branch terms vanish because |+>^N and |->^N are orthogonal.
Complex overlap(const GhzCatState& a, const GhzCatState& b);

/// <psi(B)|psi(B + dB)> for the cat state, with the separation moving by -k t gamma hbar dB.
Complex overlap_cat(const GhzCatState& state, double dB, const ParamSet& p);

/// (k t gamma hbar / (2 sigma))^2, T^-2.
double qfi_single_analytic(const ParamSet& p);
/// 2 sigma / (k t gamma hbar), T.
double crb_single(const ParamSet& p);
/// N^2 (k t gamma hbar / (4 sigma))^2, T^-2.
double qfi_ghz_paper(const ParamSet& p, int n_particles);
/// 4 sigma / (N k t gamma hbar), T.
double crb_ghz_paper(const ParamSet& p, int n_particles);

struct QfiEstimate {
  double value = 0.0;          // Richardson combination of the two steps
  double coarse = 0.0;         // 8 (1 - |<psi(B)|psi(B+h)>|) / h^2
  double fine = 0.0;           // same at h/2
  double step = 0.0;           // h
  double halving_ratio = 0.0;  // fine / coarse
  double infidelity = 0.0;     // 1 - |overlap| at h
};

inline constexpr double kTargetInfidelity = 1e-4;

namespace detail {

template <class Builder>
double infidelity(const Builder& build, double B, double step) {
  return 1.0 - std::abs(overlap(build(B), build(B + step)));
}

}  // namespace detail

/// Fidelity-susceptibility QFI, 8 (1 - |<psi(B)|psi(B + dB)>|) / dB^2, for a
/// pure-state family `build: B -> state` with an `overlap` overload.
/// dB_step = 0 picks the step adaptively so that 1 - |overlap| ~ 1e-4.
/// Throws StepTooLarge when 1 - |overlap| > 0.1 and StepTooSmall when it
/// falls below 1e-12 at the halved step.
template <class Builder>
QfiEstimate qfi_numeric(const Builder& build, double B, double dB_step = 0.0) {
  double h = dB_step;
  if (!std::isfinite(h) || h < 0.0) throw ValidationError("dB step must be finite and >= 0");
  if (h == 0.0) {
    h = (B != 0.0 ? std::abs(B) : 1.0) * 1e-3;
    bool settled = false;
    for (int iter = 0; iter < 200 && !settled; ++iter) {
      const double e = detail::infidelity(build, B, h);
      if (!(e > 1e-13)) {
        h *= 1e3;
      } else if (e > 0.5) {
        h *= 0.1;
      } else {
        const double factor = std::sqrt(kTargetInfidelity / e);
        settled = std::abs(factor - 1.0) < 0.05;
        h *= factor;
      }
      if (!std::isfinite(h) || h > 1e300) break;
    }
    if (!settled) throw StepTooSmall("state shows no measurable dependence on B");
  }
  QfiEstimate out;
  out.step = h;
  out.infidelity = detail::infidelity(build, B, h);
  if (out.infidelity > 0.1) throw StepTooLarge("1 - |overlap| exceeds 0.1; reduce dB step");
  const double half = detail::infidelity(build, B, 0.5 * h);
  if (half < 1e-12) throw StepTooSmall("1 - |overlap| below 1e-12; cancellation dominates");
  out.coarse = 8.0 * out.infidelity / (h * h);
  out.fine = 8.0 * half / (0.25 * h * h);
  out.halving_ratio = out.fine / out.coarse;
  out.value = std::max(0.0, (4.0 * out.fine - out.coarse) / 3.0);
  return out;
}

enum class PaperFormula { SingleParticle, Ghz };

std::string to_string(PaperFormula f);
PaperFormula paper_formula_from_string(const std::string& s);

struct QfiReport {
  int n_particles = 1;
  PaperFormula formula = PaperFormula::SingleParticle;
  double qfi_paper = 0.0;    // T^-2
  double qfi_numeric = 0.0;  // T^-2
  double crb_paper = 0.0;    // T
  double crb_numeric = 0.0;  // T
  double delta_B_step = 0.0; // T
  double discrepancy_ratio = 0.0;  // qfi_paper / qfi_numeric
  double halving_ratio = 0.0;
};

/// Closed-form value against the fidelity oracle. SingleParticle needs N = 1
/// and uses the balanced spin-1/2 state; Ghz uses the N-particle cat state.
QfiReport qfi_report(const ParamSet& p, int n_particles, PaperFormula formula, double mean_momentum = 0.0,
                     double dB_step = 0.0);

struct PowerLawFit {
  double exponent = 0.0;
  double ci95 = 0.0;  // half-width of the 95% interval on the exponent
  double prefactor = 0.0;
};

/// Least-squares fit of log y = log c + a log x, with Student-t interval.
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

std::vector<std::string> qfi_report_header();
std::vector<std::string> qfi_report_cells(const QfiReport& r);
QfiReport qfi_report_from_cells(const std::vector<std::string>& header, const std::vector<std::string>& cells);

}  // namespace spinterf
