#include "spinterf/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinterf/csv.hpp"
#include "spinterf/errors.hpp"
#include "spinterf/fft.hpp"

namespace spinterf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_equal_times(const ParamSet& p) {
  if (p.t_couple != p.t_free) {
    throw TimeMismatch("phase-difference identity needs t_couple == t_free");
  }
}

double normal_pdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return std::exp(-0.5 * u * u) / (std::sqrt(kTwoPi) * sd);
}

}  // namespace

DetectionDensity::DetectionDensity(const SpinPositionState& state, double t, const ParamSet& p) {
  const auto& branches = state.branches();
  const double sigma0 = branches.front().packet.width_sigma;
  std::vector<EvolvedPacket> evolved;
  evolved.reserve(branches.size());
  for (const auto& b : branches) {
    if (b.packet.width_sigma != sigma0) {
      throw ValidationError("detection density needs equal branch widths");
    }
    evolved.push_back(evolve_analytic(b.packet, t, p));
  }
  width_ = evolved.front().packet.width_sigma;
  const double curvature = evolved.front().phase.curvature;
  const double amp2 = 1.0 / (std::sqrt(kTwoPi) * width_);

  double z = 0.0;
  for (std::size_t a = 0; a < branches.size(); ++a) {
    const double w = std::norm(branches[a].amplitude);
    terms_.push_back({w * amp2, branches[a].packet.center});
    z += w;
  }
  for (std::size_t a = 0; a < branches.size(); ++a) {
    for (std::size_t b = a + 1; b < branches.size(); ++b) {
      const Complex coupling = branches[a].amplitude * std::conj(branches[b].amplitude) *
                               std::polar(1.0, branches[a].packet.global_phase - branches[b].packet.global_phase);
      const double ca = branches[a].packet.center;
      const double cb = branches[b].packet.center;
      // phase(psi_a) - phase(psi_b) = 2 curvature (cb - ca) (x - (ca + cb) / 2)
      const double slope = 2.0 * curvature * (cb - ca);
      const double gap = cb - ca;
      pairs_.push_back({2.0 * std::abs(coupling) * amp2, ca, cb, slope, std::arg(coupling)});
      const double overlap = std::exp(-gap * gap / (8.0 * width_ * width_) - 0.5 * slope * slope * width_ * width_);
      z += 2.0 * std::abs(coupling) * std::cos(std::arg(coupling)) * overlap;
    }
  }
  if (!(z > 1e-12)) {
    throw NumericalError("detection channel has vanishing probability (destructive recombination)");
  }
  norm_ = z;
  for (auto& term : terms_) term.weight /= z;
  for (auto& pair : pairs_) pair.weight /= z;
}

double DetectionDensity::classical(double x) const {
  const double inv = 1.0 / (2.0 * width_ * width_);
  double s = 0.0;
  for (const auto& term : terms_) {
    const double u = x - term.center;
    s += term.weight * std::exp(-u * u * inv);
  }
  return s;
}

double DetectionDensity::cross(double x) const {
  const double inv = 1.0 / (4.0 * width_ * width_);
  double s = 0.0;
  for (const auto& pair : pairs_) {
    const double ua = x - pair.center_a;
    const double ub = x - pair.center_b;
    const double mid = 0.5 * (pair.center_a + pair.center_b);
    s += pair.weight * std::exp(-(ua * ua + ub * ub) * inv) * std::cos(pair.slope * (x - mid) + pair.offset);
  }
  return s;
}

double DensityTrace::integral() const {
  double s = 0.0;
  for (double v : total) s += v;
  return s * grid.spacing();
}

DensityTrace density_trace(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p) {
  require_coverage(state, grid, t, p);
  const DetectionDensity rho(state, t, p);
  DensityTrace trace{grid, {}, {}, {}, rho.normalization()};
  const std::size_t n = grid.size();
  trace.total.resize(n);
  trace.classical_part.resize(n);
  trace.cross_term.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    trace.classical_part[i] = rho.classical(x);
    trace.cross_term[i] = rho.cross(x);
    trace.total[i] = trace.classical_part[i] + trace.cross_term[i];
    peak = std::max(peak, trace.total[i]);
  }
  for (auto& v : trace.total) {
    if (v < -1e-12 * peak) throw NumericalError("density went negative beyond the round-off floor");
    v = std::max(v, 0.0);
  }
  return trace;
}

std::vector<double> density(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p) {
  return density_trace(state, grid, t, p).total;
}

Grid density_grid(const SpinPositionState& state, double t, const ParamSet& p) {
  const Grid base = auto_grid(state, t, p);
  const double curvature = evolve_analytic(state.branches().front().packet, t, p).phase.curvature;
  const double max_gap = state.max_center() - state.min_center();
  const double max_slope = 2.0 * curvature * max_gap;
  if (max_slope <= 0.0) return base;
  const double dx_max = std::min(base.spacing(), kTwoPi / max_slope / 16.0);
  const auto intervals = static_cast<std::size_t>(std::ceil((base.x_max() - base.x_min()) / dx_max));
  return Grid(base.x_min(), base.x_max(), next_power_of_two(intervals + 1));
}

double phase_difference(double x, const ParamSet& p) {
  require_equal_times(p);
  return p.m_p * p.k * p.gamma * p.B * (x - p.x0);
}

double measured_phase(double x, const ParamSet& p) { return phase_difference(x, p) / kTwoPi; }

double fringe_spacing(const ParamSet& p) {
  if (p.B == 0.0) throw ZeroField("fringe spacing is undefined at B = 0");
  return kTwoPi / std::abs(p.m_p * p.k * p.gamma * p.B);
}

double fringe_spacing_paper_literal(const ParamSet& p) {
  if (p.B == 0.0) throw ZeroField("fringe spacing is undefined at B = 0");
  return kTwoPi * p.hbar / std::abs(p.m_p * p.k * p.gamma * p.B);
}

double branch_separation(const ParamSet& p) { return std::abs(displacement(kHalf, p) - displacement(-kHalf, p)); }

double visibility(const ParamSet& p) {
  const double d = branch_separation(p);
  const double w = sigma_t(p.sigma, p.t_free, p.m_p, p.hbar);
  return std::exp(-d * d / (8.0 * w * w));
}

double de_broglie_wavelength(double x, const ParamSet& p) {
  if (x == p.x0) throw DegenerateGeometry("de Broglie wavelength undefined at x = x0");
  if (!(p.t_free > 0.0)) throw DegenerateGeometry("de Broglie wavelength needs t_free > 0");
  return kTwoPi * p.hbar * p.t_free / (p.m_p * (x - p.x0));
}

double field_from_phase(double phi, double lambda_dB, const ParamSet& p) {
  if (!std::isfinite(phi)) throw ValidationError("phase must be finite");
  if (!std::isfinite(lambda_dB) || lambda_dB == 0.0) {
    throw DegenerateGeometry("de Broglie wavelength must be finite and nonzero");
  }
  if (!(p.t_couple > 0.0)) throw ValidationError("field inversion needs t_couple > 0");
  return phi * lambda_dB / (p.k * p.gamma * p.hbar * p.t_couple);
}

Sensitivity sensitivity(const ParamSet& p, double x, double delta_phi) {
  require_equal_times(p);
  const double lambda = de_broglie_wavelength(x, p);
  const double slope = p.m_p * p.k * p.gamma * (x - p.x0) / kTwoPi;
  return {slope, std::abs(delta_phi / slope), std::abs(delta_phi * lambda / (p.k * p.gamma * p.hbar * p.t_couple))};
}

FringeObservation extract_fringes(std::span<const double> dens, const Grid& grid) {
  const std::size_t n = grid.size();
  if (dens.size() != n) throw ValidationError("density length must match grid");
  const double dx = grid.spacing();

  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dens[i] < 0.0) throw ValidationError("density must be non-negative");
    mass += dens[i];
    first += dens[i] * grid.x(i);
  }
  if (!(mass > 0.0)) throw NoFringesDetected("density trace is empty");
  const double center = first / mass;
  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = grid.x(i) - center;
    second += dens[i] * u * u;
  }
  const double env_sd = std::sqrt(second / mass);
  mass *= dx;

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = dens[i] - mass * normal_pdf(grid.x(i), center, env_sd);

  std::vector<Complex> spectrum(residual.begin(), residual.end());
  fft::forward(spectrum);
  const double q_min = 5.0 / env_sd;
  std::vector<std::size_t> band;
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (fft::angular_wavenumber(k, n, dx) >= q_min) band.push_back(k);
  }
  if (band.size() < 8) throw NoFringesDetected("grid too coarse to resolve fringes above the envelope band");

  std::vector<double> mags;
  mags.reserve(band.size());
  for (auto k : band) mags.push_back(std::abs(spectrum[k]) * dx);
  const auto peak_it = std::max_element(mags.begin(), mags.end());
  const auto peak_pos = static_cast<std::size_t>(peak_it - mags.begin());
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double background = sorted[sorted.size() / 2];
  const double peak = *peak_it;
  const bool interior = peak_pos > 0 && peak_pos + 1 < mags.size();
  if (!interior || peak < 3.0 * background || 2.0 * peak / mass < 1e-6) {
    throw NoFringesDetected("no spectral peak above 3x background");
  }

  auto fringe_amplitude = [&](double q) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += residual[i] * std::polar(1.0, -q * (grid.x(i) - center));
    return s * dx;
  };
  double lo = fft::angular_wavenumber(band[peak_pos] - 1, n, dx);
  double hi = fft::angular_wavenumber(band[peak_pos] + 1, n, dx);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
  double fa = std::abs(fringe_amplitude(a)), fb = std::abs(fringe_amplitude(b));
  for (int iter = 0; iter < 60 && (hi - lo) > 1e-12 * hi; ++iter) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = std::abs(fringe_amplitude(a));
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = std::abs(fringe_amplitude(b));
    }
  }
  const double q = 0.5 * (lo + hi);
  const Complex f = fringe_amplitude(q);

  FringeObservation obs;
  obs.spacing = kTwoPi / q;
  obs.phase_offset = std::arg(f);
  obs.visibility = std::clamp(2.0 * std::abs(f) / mass, 0.0, 1.0);
  obs.envelope_center = center;
  obs.peak_to_background = background > 0.0 ? peak / background : INFINITY;

  double imax = 0.0, imin = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(grid.x(i) - center) <= 0.5 * obs.spacing) {
      imax = std::max(imax, dens[i]);
      imin = std::min(imin, dens[i]);
    }
  }
  obs.center_contrast = imax + imin > 0.0 ? (imax - imin) / (imax + imin) : 0.0;

  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double model =
        mass * normal_pdf(x, center, env_sd) * (1.0 + obs.visibility * std::cos(q * (x - center) + obs.phase_offset));
    err += (dens[i] - model) * (dens[i] - model);
    ref += dens[i] * dens[i];
  }
  obs.fit_residual = std::sqrt(err / ref);
  return obs;
}

void write_density_csv(const DensityTrace& trace, const ParamSet& p, const std::filesystem::path& path) {
  CsvTable table;
  table.comments.push_back(provenance_comment(p));
  table.header = {"x", "total", "classical_part", "cross_term"};
  for (std::size_t i = 0; i < trace.total.size(); ++i) {
    table.add_row({trace.grid.x(i), trace.total[i], trace.classical_part[i], trace.cross_term[i]});
  }
  table.write(path);
}

}  // namespace spinterf
