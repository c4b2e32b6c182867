#include "spinterf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinterf/csv.hpp"
#include "spinterf/errors.hpp"
#include "spinterf/fft.hpp"

namespace spinterf {

namespace {

constexpr double kCoverageWidths = 8.0;

double min_width(const SpinPositionState& state) {
  double w = state.branches().front().packet.width_sigma;
  for (const auto& b : state.branches()) w = std::min(w, b.packet.width_sigma);
  return w;
}

double max_evolved_width(const SpinPositionState& state, double t, const ParamSet& p) {
  double w = 0.0;
  for (const auto& b : state.branches()) w = std::max(w, sigma_t(b.packet.width_sigma, t, p.m_p, p.hbar));
  return w;
}

void check_edges(const SampledWavefunction& wf, const char* when) {
  const double peak = wf.max_abs();
  const double limit = kEdgeAmplitudeTolerance * peak;
  if (std::abs(wf.values.front()) > limit || std::abs(wf.values.back()) > limit) {
    throw AliasingError(std::string("edge amplitude exceeds 1e-8 of peak ") + when +
                        " spectral step; widen the grid window");
  }
}

}  // namespace

double SampledWavefunction::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * grid.spacing();
}

double SampledWavefunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

SpinPositionState entangle(const SpinConfig& cfg, const GaussianWavepacket& packet, const ParamSet& p) {
  p.validate();
  packet.validate();
  if (std::abs(packet.center - p.x0) > 1e-12 * packet.width_sigma) {
    throw ValidationError("entangle: packet center must equal x0");
  }
  std::vector<Branch> branches;
  branches.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const HalfInt m = cfg.projection(i);
    GaussianWavepacket shifted = packet;
    shifted.center = packet.center + displacement(m, p);
    branches.push_back({m, cfg.amplitudes()[i], shifted});
  }
  return SpinPositionState(std::move(branches));
}

double spreading_ratio(double sigma, double t, double m_p, double hbar) {
  return hbar * t / (2.0 * m_p * sigma * sigma);
}

double sigma_t(double sigma, double t, double m_p, double hbar) {
  return sigma * std::hypot(1.0, spreading_ratio(sigma, t, m_p, hbar));
}

Complex EvolvedPacket::amplitude(double x) const {
  return std::polar(packet.modulus(x), phase(x) + packet.global_phase);
}

EvolvedPacket evolve_analytic(const GaussianWavepacket& packet, double t, const ParamSet& p) {
  packet.validate();
  if (!(t >= 0.0)) throw ValidationError("evolve_analytic: t must be >= 0");
  if (packet.mean_momentum != 0.0) {
    throw ValidationError("evolve_analytic: closed form assumes zero mean momentum");
  }
  EvolvedPacket out{packet, FreeEvolutionPhase{packet.center, 0.0, 0.0}};
  if (t == 0.0) return out;
  out.packet.width_sigma = sigma_t(packet.width_sigma, t, p.m_p, p.hbar);
  out.phase.curvature = p.m_p / (2.0 * p.hbar * t);
  out.phase.gouy = -0.5 * std::atan(spreading_ratio(packet.width_sigma, t, p.m_p, p.hbar));
  return out;
}

Complex exact_free_amplitude(const GaussianWavepacket& packet, double t, double m_p, double x, double hbar) {
  const double s = packet.width_sigma;
  const double tau = spreading_ratio(s, t, m_p, hbar);
  const double wavenumber = packet.mean_momentum / hbar;
  const Complex spread(1.0, tau);
  const double drift = x - packet.center - hbar * wavenumber * t / m_p;
  const Complex exponent = -drift * drift / (4.0 * s * s * spread) +
                           Complex(0.0, wavenumber * (x - packet.center) -
                                            hbar * wavenumber * wavenumber * t / (2.0 * m_p) + packet.global_phase);
  const double norm = std::pow(2.0 * std::numbers::pi * s * s, -0.25);
  return norm / std::sqrt(spread) * std::exp(exponent);
}

SampledWavefunction sample(const GaussianWavepacket& packet, const Grid& grid) {
  SampledWavefunction wf{grid, std::vector<Complex>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) wf.values[i] = packet.amplitude(grid.x(i));
  return wf;
}

SampledWavefunction sample(const EvolvedPacket& packet, const Grid& grid) {
  SampledWavefunction wf{grid, std::vector<Complex>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) wf.values[i] = packet.amplitude(grid.x(i));
  return wf;
}

SampledWavefunction evolve_spectral(const SampledWavefunction& wf, double t, double m_p, double hbar) {
  if (!(t >= 0.0)) throw ValidationError("evolve_spectral: t must be >= 0");
  if (!(m_p > 0.0)) throw ValidationError("evolve_spectral: mass must be positive");
  check_edges(wf, "before");
  SampledWavefunction out = wf;
  if (t == 0.0) return out;
  const std::size_t n = out.values.size();
  const double dx = out.grid.spacing();
  fft::forward(out.values);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = fft::angular_wavenumber(i, n, dx);
    out.values[i] *= std::polar(1.0, -hbar * q * q * t / (2.0 * m_p));
  }
  fft::inverse(out.values);
  check_edges(out, "after");
  return out;
}

void require_coverage(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p) {
  const double w = max_evolved_width(state, t, p);
  if (grid.x_min() > state.min_center() - kCoverageWidths * w ||
      grid.x_max() < state.max_center() + kCoverageWidths * w) {
    throw GridTooNarrow("grid must cover every branch center +- 8 sigma_t");
  }
}

std::vector<BranchSample> sample_state(const SpinPositionState& state, const Grid& grid, double t,
                                       const ParamSet& p) {
  require_coverage(state, grid, t, p);
  std::vector<BranchSample> out;
  out.reserve(state.size());
  for (const auto& b : state.branches()) {
    SampledWavefunction wf = sample(evolve_analytic(b.packet, t, p), grid);
    for (auto& v : wf.values) v *= b.amplitude;
    out.push_back({b.m, std::move(wf)});
  }
  return out;
}

Grid auto_grid(const SpinPositionState& state, double t, const ParamSet& p) {
  const double w = max_evolved_width(state, t, p);
  const double lo = state.min_center() - kCoverageWidths * w;
  const double hi = state.max_center() + kCoverageWidths * w;
  const double dx_max = min_width(state) / 16.0;
  const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / dx_max));
  return Grid(lo, hi, next_power_of_two(intervals + 1));
}

void write_wavefunction_csv(const SampledWavefunction& wf, const ParamSet& p, const std::filesystem::path& path) {
  CsvTable table;
  table.comments.push_back(provenance_comment(p));
  table.header = {"x", "re", "im", "abs2"};
  for (std::size_t i = 0; i < wf.values.size(); ++i) {
    const auto v = wf.values[i];
    table.add_row({wf.grid.x(i), v.real(), v.imag(), std::norm(v)});
  }
  table.write(path);
}

}  // namespace spinterf
