#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "spinterf/core.hpp"
#include "spinterf/dynamics.hpp"

namespace spinterf {

/// Position density of the spin-recombined detection channel,
///   rho(x) = |sum_m C_m psi_m(x, t)|^2 / Z,
/// with psi_m the freely evolved branches (closed-form phase) and Z the
/// closed-form normalization. Evaluates pointwise without a grid.
class DetectionDensity {
 public:
  DetectionDensity(const SpinPositionState& state, double t, const ParamSet& p);

  double operator()(double x) const { return classical(x) + cross(x); }
  /// sum_m |C_m psi_m|^2 / Z
  double classical(double x) const;
  /// 2 sum_{m<m'} Re[C_m C_m'^* psi_m psi_m'^*] / Z
  double cross(double x) const;
  /// Z = || sum_m C_m psi_m ||^2 before normalization.
  double normalization() const { return norm_; }
  double width() const { return width_; }

 private:
  struct Term {
    double weight;  // |C_m|^2 A^2 / Z
    double center;
  };
  struct Pair {
    double weight;  // 2 |C_m C_m'| A^2 / Z
    double center_a, center_b;
    double slope;   // d(phase difference)/dx
    double offset;  // phase difference at x = 0
  };
  double width_ = 0.0;  // evolved width sigma_t
  double norm_ = 1.0;
  std::vector<Term> terms_;
  std::vector<Pair> pairs_;
};

struct DensityTrace {
  Grid grid;
  std::vector<double> total;
  std::vector<double> classical_part;
  std::vector<double> cross_term;
  double normalization = 1.0;  // Z of DetectionDensity

  double integral() const;
};

/// Samples DetectionDensity on `grid`; total = classical_part + cross_term.
/// Throws GridTooNarrow unless the grid covers every center +- 8 sigma_t.
DensityTrace density_trace(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p);
std::vector<double> density(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p);

/// auto_grid refined so the finest fringe period gets at least 16 samples.
Grid density_grid(const SpinPositionState& state, double t, const ParamSet& p);

/// m_p k gamma B (x - x0). Throws TimeMismatch unless t_couple == t_free.
double phase_difference(double x, const ParamSet& p);

/// phase_difference / (2 pi).
double measured_phase(double x, const ParamSet& p);

/// 2 pi / |m_p k gamma B|. Throws ZeroField at B = 0.
double fringe_spacing(const ParamSet& p);

/// 2 pi hbar / |m_p k gamma B|, the form carrying an extra factor of hbar.
double fringe_spacing_paper_literal(const ParamSet& p);

/// |dx_+ - dx_-| = |k t_couple gamma B hbar|.
double branch_separation(const ParamSet& p);

/// exp(-(dx_+ - dx_-)^2 / (8 sigma_t^2)) with sigma_t at t_free.
double visibility(const ParamSet& p);

/// Signed de Broglie wavelength 2 pi p.hbar t_free / (m_p (x - x0)); negative for x < x0.
/// Throws DegenerateGeometry at x = x0 or t_free = 0.
double de_broglie_wavelength(double x, const ParamSet& p);

/// B = phi lambda_dB / (k gamma hbar t_couple). lambda_dB carries the sign of x - x0.
double field_from_phase(double phi, double lambda_dB, const ParamSet& p);

struct Sensitivity {
  double slope;             // d phi / dB, T^-1
  double delta_B;           // |delta_phi / slope|
  double delta_B_de_broglie;  // |delta_phi lambda_dB / (k gamma hbar t)|
};

Sensitivity sensitivity(const ParamSet& p, double x, double delta_phi);

struct FringeObservation {
  double spacing = 0.0;          // m
  double phase_offset = 0.0;     // rad, fringe phase at the envelope center
  double visibility = 0.0;       // integrated contrast 2|F(q)| / F(0)
  double envelope_center = 0.0;  // m
  double fit_residual = 0.0;     // ||rho - model|| / ||rho||
  double center_contrast = 0.0;  // (Imax - Imin)/(Imax + Imin) over one period at the center
  double peak_to_background = 0.0;
};

/// Fringe spacing, phase and contrast from a sampled density trace:
/// moment-matched Gaussian envelope, dominant spectral peak of the
/// envelope-subtracted residual (refined off-grid), and integrated contrast.
/// Throws NoFringesDetected when the peak is under 3x the spectral background.
FringeObservation extract_fringes(std::span<const double> dens, const Grid& grid);

/// Columns x, total, classical_part, cross_term.
void write_density_csv(const DensityTrace& trace, const ParamSet& p, const std::filesystem::path& path);

}  // namespace spinterf
