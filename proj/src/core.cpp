#include "spinterf/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "spinterf/errors.hpp"

namespace spinterf {

namespace {

constexpr double kNormTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

std::string HalfInt::to_string() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

void ParamSet::validate() const {
  require(std::isfinite(gamma) && gamma != 0.0, "gamma must be finite and nonzero");
  require(std::isfinite(k) && k > 0.0, "k must be positive");
  require(std::isfinite(t_couple) && t_couple >= 0.0, "t_couple must be >= 0");
  require(std::isfinite(t_free) && t_free >= 0.0, "t_free must be >= 0");
  require(std::isfinite(B), "B must be finite");
  require(std::isfinite(m_p) && m_p > 0.0, "m_p must be positive");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
  require(std::isfinite(x0), "x0 must be finite");
  require(std::isfinite(hbar) && hbar > 0.0, "hbar must be positive");
}

SpinConfig::SpinConfig(HalfInt s, std::vector<Complex> amplitudes)
    : s_(s), amplitudes_(std::move(amplitudes)) {
  require(s.twice() >= 0, "spin quantum number must be non-negative");
  require(amplitudes_.size() == static_cast<std::size_t>(s.twice() + 1),
          "SpinConfig needs 2s+1 amplitudes");
  double norm = 0.0;
  for (const auto& c : amplitudes_) {
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), "spin amplitudes must be finite");
    norm += std::norm(c);
  }
  require(std::abs(norm - 1.0) <= kNormTolerance, "spin amplitudes must satisfy sum |C_m|^2 = 1");
}

HalfInt SpinConfig::projection(std::size_t index) const {
  return -s_ + HalfInt::from_twice(2 * static_cast<int>(index));
}

Complex SpinConfig::amplitude(HalfInt m) const {
  const int offset = m.twice() + s_.twice();
  if (offset < 0 || offset > 2 * s_.twice() || offset % 2 != 0) {
    throw ValidationError("projection " + m.to_string() + " not valid for spin " + s_.to_string());
  }
  return amplitudes_[static_cast<std::size_t>(offset / 2)];
}

SpinConfig balanced_spin_half() {
  const double c = 1.0 / std::numbers::sqrt2;
  return SpinConfig(kHalf, {Complex(c, 0.0), Complex(c, 0.0)});
}

SpinConfig balanced_spin(HalfInt s) {
  require(s.twice() >= 0, "spin quantum number must be non-negative");
  const auto n = static_cast<std::size_t>(s.twice() + 1);
  const double c = 1.0 / std::sqrt(static_cast<double>(n));
  return SpinConfig(s, std::vector<Complex>(n, Complex(c, 0.0)));
}

void GaussianWavepacket::validate() const {
  require(std::isfinite(center), "packet center must be finite");
  require(std::isfinite(width_sigma) && width_sigma > 0.0, "packet width must be positive");
  require(std::isfinite(mean_momentum), "packet momentum must be finite");
  require(std::isfinite(global_phase), "packet phase must be finite");
}

double GaussianWavepacket::modulus(double x) const {
  const double u = (x - center) / width_sigma;
  const double norm = std::pow(2.0 * std::numbers::pi * width_sigma * width_sigma, -0.25);
  return norm * std::exp(-0.25 * u * u);
}

Complex GaussianWavepacket::amplitude(double x) const {
  const double phase = mean_momentum * (x - center) / constants::hbar + global_phase;
  return std::polar(modulus(x), phase);
}

SpinPositionState::SpinPositionState(std::vector<Branch> branches) : branches_(std::move(branches)) {
  require(!branches_.empty(), "state needs at least one branch");
  std::set<HalfInt> seen;
  double norm = 0.0;
  for (const auto& b : branches_) {
    require(seen.insert(b.m).second, "branch projections must be distinct");
    b.packet.validate();
    norm += std::norm(b.amplitude);
  }
  require(std::abs(norm - 1.0) <= kNormTolerance, "branch amplitudes must satisfy sum |C_m|^2 = 1");
}

double SpinPositionState::min_center() const {
  return std::min_element(branches_.begin(), branches_.end(),
                          [](const Branch& a, const Branch& b) { return a.packet.center < b.packet.center; })
      ->packet.center;
}

double SpinPositionState::max_center() const {
  return std::max_element(branches_.begin(), branches_.end(),
                          [](const Branch& a, const Branch& b) { return a.packet.center < b.packet.center; })
      ->packet.center;
}

Grid::Grid(double x_min, double x_max, std::size_t n_points) : x_min_(x_min), x_max_(x_max), n_(n_points) {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min, "grid needs x_max > x_min");
  require(n_points >= 2, "grid needs at least 2 points");
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double zeeman_energy(HalfInt m, const ParamSet& p) { return -p.gamma * p.B * p.hbar * m.value(); }

double displacement(HalfInt m, const ParamSet& p) { return p.k * p.t_couple * zeeman_energy(m, p); }

}  // namespace spinterf
