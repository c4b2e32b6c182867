#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "spinterf/dynamics.hpp"
#include "spinterf/errors.hpp"

using namespace spinterf;

namespace {

ParamSet rubidium() {
  ParamSet p;
  p.sigma = 1e-6;
  p.m_p = constants::rb87_mass;
  return p;
}

Grid window(double center, double width, double pad, std::size_t n) {
  return Grid(center - pad * width, center + pad * width, n);
}

double max_error(const SampledWavefunction& a, const SampledWavefunction& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) e = std::max(e, std::abs(a.values[i] - b.values[i]));
  return e;
}

}  // namespace

TEST_CASE("spreading ratio and evolved width for rubidium at 1 ms") {
  CHECK(spreading_ratio(1e-6, 1e-3, constants::rb87_mass) == doctest::Approx(0.36538417885108447).epsilon(1e-14));
  CHECK(sigma_t(1e-6, 1e-3, constants::rb87_mass) == doctest::Approx(1.0646621990822635e-6).epsilon(1e-14));
}

TEST_CASE("evolved width: t = 0, monotone, far-field slope") {
  const double m = constants::rb87_mass, s = 1e-6;
  CHECK(sigma_t(s, 0.0, m) == s);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double w = sigma_t(s, i * 1e-3, m);
    CHECK(w > prev);
    prev = w;
  }
  const double t1 = 10.0, t2 = 20.0;
  const double slope = (sigma_t(s, t2, m) - sigma_t(s, t1, m)) / (t2 - t1);
  CHECK(slope == doctest::Approx(constants::hbar / (2.0 * m * s)).epsilon(1e-9));
}

TEST_CASE("entangle shifts each branch by its displacement") {
  ParamSet p = rubidium();
  p.x0 = 3e-6;
  const GaussianWavepacket g{p.x0, p.sigma, 0.0, 0.0};
  const auto s = entangle(balanced_spin(HalfInt::integer(1)), g, p);
  REQUIRE(s.size() == 3);
  for (const auto& b : s.branches()) CHECK(b.packet.center == doctest::Approx(p.x0 + displacement(b.m, p)));
  CHECK_THROWS_AS(entangle(balanced_spin_half(), {0.0, p.sigma, 0.0, 0.0}, p), ValidationError);
}

TEST_CASE("closed-form modulus and Gouy phase agree with the exact propagator") {
  const ParamSet p = rubidium();
  const GaussianWavepacket g{0.0, p.sigma, 0.0, 0.0};
  for (double t : {1e-4, 1e-3, 5e-3}) {
    const EvolvedPacket e = evolve_analytic(g, t, p);
    for (double u : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
      const double x = u * e.packet.width_sigma;
      CHECK(e.packet.modulus(x) == doctest::Approx(std::abs(exact_free_amplitude(g, t, p.m_p, x))).epsilon(1e-12));
    }
    CHECK(e.phase.gouy == doctest::Approx(std::arg(exact_free_amplitude(g, t, p.m_p, 0.0))).epsilon(1e-12));
  }
}

TEST_CASE("closed-form chirp differs from the exact chirp by tau^2 / (1 + tau^2)") {
  const ParamSet p = rubidium();
  const GaussianWavepacket g{0.0, p.sigma, 0.0, 0.0};
  for (double t : {1e-4, 1e-3, 2e-2}) {
    const double tau = spreading_ratio(p.sigma, t, p.m_p);
    const EvolvedPacket e = evolve_analytic(g, t, p);
    const double u = 0.3 * p.sigma;
    const double exact = std::arg(exact_free_amplitude(g, t, p.m_p, u) / exact_free_amplitude(g, t, p.m_p, 0.0));
    CHECK(exact == doctest::Approx(e.phase.curvature * u * u * tau * tau / (1 + tau * tau)).epsilon(1e-9));
  }
}

TEST_CASE("spectral evolution matches the exact propagator, including drift") {
  const ParamSet p = rubidium();
  for (double k0 : {0.0, 2.0 / p.sigma, -1.5 / p.sigma}) {
    const GaussianWavepacket g{0.0, p.sigma, constants::hbar * k0, 0.3};
    const double t = 1e-3;
    const double drift = constants::hbar * k0 * t / p.m_p;
    const Grid grid(std::min(0.0, drift) - 12.0 * sigma_t(p.sigma, t, p.m_p),
                    std::max(0.0, drift) + 12.0 * sigma_t(p.sigma, t, p.m_p), 4096);
    const SampledWavefunction out = evolve_spectral(sample(g, grid), t, p.m_p);
    SampledWavefunction ref{grid, std::vector<Complex>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) ref.values[i] = exact_free_amplitude(g, t, p.m_p, grid.x(i));
    CHECK(max_error(out, ref) < 1e-9 * ref.max_abs());
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("spectral step refuses packets touching the grid edge") {
  const ParamSet p = rubidium();
  const GaussianWavepacket g{0.0, p.sigma, 0.0, 0.0};
  CHECK_THROWS_AS(evolve_spectral(sample(g, window(0.0, p.sigma, 3.0, 512)), 1e-3, p.m_p), AliasingError);
  CHECK_THROWS_AS(evolve_spectral(sample(g, window(0.0, p.sigma, 12.0, 1024)), 0.2, p.m_p), AliasingError);
}

TEST_CASE("property: spectral density variance equals sigma_t^2") {
  oracle::Draws draw(2024);
  for (int i = 0; i < 10; ++i) {
    const double s = draw.log_uniform(0.3e-6, 3e-6);
    const double t = draw.log_uniform(1e-5, 5e-3);
    const double m = constants::rb87_mass;
    const double w = sigma_t(s, t, m);
    const GaussianWavepacket g{0.0, s, 0.0, 0.0};
    const Grid grid(-12.0 * w, 12.0 * w, next_power_of_two(static_cast<std::size_t>(24.0 * w / (s / 16.0))));
    const auto out = evolve_spectral(sample(g, grid), t, m);
    std::vector<double> dens;
    for (auto v : out.values) dens.push_back(std::norm(v));
    const auto mom = oracle::moments(dens, grid.x_min(), grid.spacing());
    CHECK(mom.variance == doctest::Approx(w * w).epsilon(1e-6));
  }
}

TEST_CASE("auto grid covers every branch and resolves the initial width") {
  ParamSet p = rubidium();
  p.B = 1e-5;
  const auto s = entangle(balanced_spin(HalfInt::integer(1)), {0.0, p.sigma, 0.0, 0.0}, p);
  const double t = 2e-3;
  const Grid g = auto_grid(s, t, p);
  CHECK(g.is_power_of_two());
  CHECK(g.spacing() <= p.sigma / 16.0);
  CHECK_NOTHROW(require_coverage(s, g, t, p));
  CHECK_THROWS_AS(require_coverage(s, Grid(g.x_min() + p.sigma, g.x_max(), g.size()), t, p), GridTooNarrow);
  CHECK_THROWS_AS(sample_state(s, Grid(-p.sigma, p.sigma, 64), t, p), GridTooNarrow);
  const auto branches = sample_state(s, g, t, p);
  CHECK(branches.size() == 3);
  for (const auto& b : branches) CHECK(b.wf.norm() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("analytic evolution input checks") {
  const ParamSet p = rubidium();
  CHECK_THROWS_AS(evolve_analytic({0.0, p.sigma, 0.0, 0.0}, -1.0, p), ValidationError);
  CHECK_THROWS_AS(evolve_analytic({0.0, p.sigma, 1e-28, 0.0}, 1e-3, p), ValidationError);
  const auto same = evolve_analytic({1e-6, p.sigma, 0.0, 0.2}, 0.0, p);
  CHECK(same.packet.width_sigma == p.sigma);
  CHECK(std::abs(same.amplitude(1.3e-6) - GaussianWavepacket{1e-6, p.sigma, 0.0, 0.2}.amplitude(1.3e-6)) < 1e-12);
}
