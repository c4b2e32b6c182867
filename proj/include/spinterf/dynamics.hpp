#pragma once

#include <filesystem>
#include <vector>

#include "spinterf/core.hpp"

namespace spinterf {

/// Wavefunction amplitudes (m^-1/2) on a uniform grid.
struct SampledWavefunction {
  Grid grid;
  std::vector<Complex> values;

  /// Discrete norm sum |psi|^2 dx.
  double norm() const;
  double max_abs() const;
};

/// Applies the spin-momentum coupling: one branch per projection m with
/// amplitude C_m and center x0 + dx_m. Requires packet.center == p.x0.
SpinPositionState entangle(const SpinConfig& cfg, const GaussianWavepacket& packet, const ParamSet& p);

/// Dimensionless spreading parameter hbar t / (2 m_p sigma^2).
double spreading_ratio(double sigma, double t, double m_p, double hbar = constants::hbar);

/// Width of a freely evolved Gaussian, sigma sqrt(1 + (hbar t / (2 m_p sigma^2))^2).
double sigma_t(double sigma, double t, double m_p, double hbar = constants::hbar);

/// Position-dependent phase of a freely evolved packet in the closed form used
/// throughout the protocol: kinetic term m_p (x-c)^2 / (2 hbar t) plus the
/// Gouy term -arctan(hbar t / (2 m_p sigma^2)) / 2. Zero at t = 0.
struct FreeEvolutionPhase {
  double center = 0.0;
  double curvature = 0.0;  // m_p / (2 hbar t), rad m^-2
  double gouy = 0.0;       // rad

  double operator()(double x) const {
    const double u = x - center;
    return curvature * u * u + gouy;
  }
};

struct EvolvedPacket {
  GaussianWavepacket packet;  // width sigma_t, same center
  FreeEvolutionPhase phase;

  Complex amplitude(double x) const;
};

/// Closed-form free evolution over time t. Rejects t < 0 and packets with
/// nonzero mean momentum; t = 0 returns the packet unchanged with zero phase.
EvolvedPacket evolve_analytic(const GaussianWavepacket& packet, double t, const ParamSet& p);

/// Exact Schroedinger free-particle solution for a Gaussian initial packet
/// (any mean momentum), used as the complex-amplitude reference.
Complex exact_free_amplitude(const GaussianWavepacket& packet, double t, double m_p, double x,
                             double hbar = constants::hbar);

SampledWavefunction sample(const GaussianWavepacket& packet, const Grid& grid);
SampledWavefunction sample(const EvolvedPacket& packet, const Grid& grid);

/// Exact free evolution on the grid: FFT, multiply by exp(-i hbar q^2 t / (2 m_p)),
/// inverse FFT. Throws AliasingError if |psi| at either edge exceeds 1e-8 of
/// the peak modulus before or after the step.
SampledWavefunction evolve_spectral(const SampledWavefunction& wf, double t, double m_p,
                                    double hbar = constants::hbar);

inline constexpr double kEdgeAmplitudeTolerance = 1e-8;

struct BranchSample {
  HalfInt m;
  SampledWavefunction wf;  // C_m psi_m(x, t)
};

/// Evaluates each freely evolved branch, amplitude-weighted, on `grid`.
/// Throws GridTooNarrow unless the grid covers every center +- 8 sigma_t.
std::vector<BranchSample> sample_state(const SpinPositionState& state, const Grid& grid, double t,
                                       const ParamSet& p);

/// Throws GridTooNarrow unless grid covers [min center - 8 sigma_t, max center + 8 sigma_t].
void require_coverage(const SpinPositionState& state, const Grid& grid, double t, const ParamSet& p);

/// Span [min center - 8 sigma_t, max center + 8 sigma_t] and the smallest
/// power-of-two point count with dx <= sigma / 16.
Grid auto_grid(const SpinPositionState& state, double t, const ParamSet& p);

/// Columns x, re, im, abs2.
void write_wavefunction_csv(const SampledWavefunction& wf, const ParamSet& p, const std::filesystem::path& path);

}  // namespace spinterf
