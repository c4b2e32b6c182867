#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace spinterf {

using Complex = std::complex<double>;

namespace constants {
/// CODATA 2018 reduced Planck constant, J s.
inline constexpr double hbar = 1.054571817e-34;
/// Mass of a 87Rb atom, kg.
inline constexpr double rb87_mass = 1.4431e-25;
/// Converts a gyromagnetic ratio quoted in GHz/T to rad s^-1 T^-1.
inline constexpr double ghz_per_tesla = 2.0 * std::numbers::pi * 1e9;
}  // namespace constants

/// Spin projection or spin quantum number held exactly as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
  static constexpr HalfInt integer(int value) { return HalfInt(2 * value); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string to_string() const;

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

inline constexpr HalfInt kHalf = HalfInt::from_twice(1);

/// Physical scalars of the protocol, SI units throughout.
struct ParamSet {
  double gamma = 28.0 * constants::ghz_per_tesla;  // rad s^-1 T^-1
  double k = 5e26;                                  // s kg^-1 m^-1 (inverse momentum)
  double t_couple = 1e-4;                           // s
  double t_free = 1e-4;                             // s
  double B = 1e-6;                                  // T
  double m_p = constants::rb87_mass;                // kg
  double sigma = 1e-6;                              // m, amplitude ~ exp(-(x-x0)^2 / (4 sigma^2))
  double x0 = 0.0;                                  // m
  double hbar = constants::hbar;                    // J s

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  ParamSet with_field(double field) const {
    ParamSet p = *this;
    p.B = field;
    return p;
  }
};

/// Normalized spin superposition sum_m C_m |m>, amplitudes ordered m = -s..+s.
class SpinConfig {
 public:
  SpinConfig(HalfInt s, std::vector<Complex> amplitudes);

  HalfInt spin() const { return s_; }
  const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  HalfInt projection(std::size_t index) const;
  Complex amplitude(HalfInt m) const;

 private:
  HalfInt s_;
  std::vector<Complex> amplitudes_;
};

/// (|+> + |->)/sqrt(2).
SpinConfig balanced_spin_half();

/// Equal-weight real superposition over all 2s+1 projections.
SpinConfig balanced_spin(HalfInt s);

/// Normalized Gaussian wavepacket
///   psi(x) = (2 pi sigma^2)^(-1/4) exp(-(x-c)^2/(4 sigma^2) + i p (x-c)/hbar + i phase),
/// so |psi|^2 has standard deviation sigma.
struct GaussianWavepacket {
  double center = 0.0;
  double width_sigma = 1e-6;
  double mean_momentum = 0.0;
  double global_phase = 0.0;

  void validate() const;
  Complex amplitude(double x) const;
  double modulus(double x) const;
};

struct Branch {
  HalfInt m;
  Complex amplitude;
  GaussianWavepacket packet;
};

/// Entangled spin-position superposition sum_m C_m |m> (x) |psi_m>.
class SpinPositionState {
 public:
  explicit SpinPositionState(std::vector<Branch> branches);

  const std::vector<Branch>& branches() const { return branches_; }
  std::size_t size() const { return branches_.size(); }
  double min_center() const;
  double max_center() const;

 private:
  std::vector<Branch> branches_;
};

/// Uniform sampling of [x_min, x_max] with n_points nodes, both ends included.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
  double x(std::size_t i) const { return x_min_ + spacing() * static_cast<double>(i); }
  bool is_power_of_two() const { return (n_ & (n_ - 1)) == 0; }
  std::vector<double> points() const;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

/// Smallest power of two that is >= n.
std::size_t next_power_of_two(std::size_t n);

/// Zeeman energy E_m = -gamma B hbar m, J.
double zeeman_energy(HalfInt m, const ParamSet& p);

/// Spin-dependent displacement dx_m = -k t_couple gamma B hbar m, m.
double displacement(HalfInt m, const ParamSet& p);

}  // namespace spinterf
