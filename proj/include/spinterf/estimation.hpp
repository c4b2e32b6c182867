#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spinterf/core.hpp"

namespace spinterf {

/// One simulated detection run.
struct ShotRecord {
  std::vector<double> positions;  // m, all inside `grid`
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string rng_algorithm;
  ParamSet params;
  Grid grid{0.0, 1.0, 2};
};

/// Inverse-CDF draws from a sampled density. Sample i owns the cell
/// [x_i - dx/2, x_i + dx/2] (clipped to the grid) with mass dens_i dx, and
/// positions are uniform inside the chosen cell.
/// Throws UnnormalizedDensity if sum(dens) dx deviates from 1 by more than
/// 1e-6 or any entry is negative.
ShotRecord sample_positions(std::span<const double> dens, const Grid& grid, std::size_t n_shots, std::uint64_t seed,
                            std::uint64_t stream = 0, const ParamSet& params = {});

struct FitOptions {
  double bracket_fraction = 0.5;  // scan B_init (1 -+ fraction)
  int scan_points = 32;
  /// Positions are pooled into equal bins over the record grid and each bin
  /// contributes count * log rho(bin center). 0 picks bins of at most 1/64 of
  /// the shortest fringe period in the bracket and sigma_t / 8.
  std::size_t likelihood_bins = 0;
  bool unbinned = false;
};

struct FieldFit {
  double B_hat = 0.0;
  double std_err = 0.0;
  double log_likelihood = 0.0;
  int evaluations = 0;
};

/// Log-likelihood sum_i log rho(x_i; B) of the balanced spin-1/2 detection density.
double log_likelihood(const ShotRecord& record, const ParamSet& model, double B);

/// Maximum-likelihood field by a coarse scan followed by golden-section
/// refinement. The standard error comes from the observed information.
/// Throws BracketMiss when the scan peaks at the bracket edge and
/// NonConvergence when the likelihood is flat or not concave at the optimum.
FieldFit fit_field(const ShotRecord& record, const ParamSet& model, double B_init, const FitOptions& opts = {});

enum class ScalingMode { Classical, Quantum, Both };

std::string to_string(ScalingMode m);
ScalingMode scaling_mode_from_string(const std::string& s);

struct ScalingRow {
  std::string mode;  // "classical" or "quantum"
  int n_particles = 1;
  std::size_t shots = 0;
  int trials = 0;
  double empirical_std = 0.0;  // T; NaN for quantum rows, which carry bounds only
  double crb_paper = 0.0;      // T, per run of `shots` repetitions
  double crb_numeric = 0.0;    // T, same normalization from the fidelity oracle
};

struct ScalingCurve {
  std::vector<ScalingRow> rows;  // sorted by N, classical before quantum
};

struct ScalingOptions {
  std::vector<int> n_list{1, 4, 16, 64};
  std::size_t shots = 10000;
  int trials = 500;
  std::uint64_t seed = 1;
  ScalingMode mode = ScalingMode::Classical;
  int jobs = 1;
  FitOptions fit;
};

/// Stream id for particle `particle` of trial `trial` in the N-particle row.
std::uint64_t shot_stream(int n_particles, int trial, int particle);

/// Classical rows: each trial averages N independent single-particle field
/// estimates; the row reports the Bessel-corrected spread over trials.
/// Quantum rows report the cat-state bounds only.
ScalingCurve scaling_experiment(const ParamSet& p, const ScalingOptions& opts);

void write_scaling_csv(const ScalingCurve& curve, const ParamSet& p, const std::filesystem::path& path);

}  // namespace spinterf
