#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "spinterf/config.hpp"
#include "spinterf/core.hpp"
#include "spinterf/csv.hpp"
#include "spinterf/errors.hpp"

using namespace spinterf;

TEST_CASE("half-integer projections are exact") {
  const HalfInt half = kHalf;
  CHECK(half.twice() == 1);
  CHECK(half.value() == 0.5);
  CHECK((half + half) == HalfInt::integer(1));
  CHECK((-half).value() == -0.5);
  CHECK(half.to_string() == "1/2");
  CHECK((-half).to_string() == "-1/2");
  CHECK(HalfInt::integer(-1).to_string() == "-1");
  CHECK_FALSE(half.is_integer());
}

TEST_CASE("zeeman energy for a spin-1/2 electron-like ratio") {
  ParamSet p;
  p.gamma = 28.0 * constants::ghz_per_tesla;
  p.B = 1e-3;
  CHECK(zeeman_energy(kHalf, p) == doctest::Approx(-9.27649820431611e-27).epsilon(1e-13));
  CHECK(zeeman_energy(-kHalf, p) == doctest::Approx(9.27649820431611e-27).epsilon(1e-13));
}

TEST_CASE("displacement is linear in k, t, B and odd in m") {
  oracle::Draws draw(11);
  for (int i = 0; i < 50; ++i) {
    ParamSet p;
    p.k = draw.log_uniform(1e24, 1e28);
    p.t_couple = draw.log_uniform(1e-6, 1e-2);
    p.B = draw.uniform(-1e-4, 1e-4);
    const double dx = displacement(kHalf, p);
    CHECK(dx == doctest::Approx(-p.k * p.t_couple * p.gamma * p.B * p.hbar * 0.5).epsilon(1e-14));
    CHECK(displacement(-kHalf, p) == doctest::Approx(-dx).epsilon(1e-15));
    CHECK(displacement(HalfInt::integer(0), p) == 0.0);
    CHECK(displacement(kHalf, p.with_field(2.0 * p.B)) == doctest::Approx(2.0 * dx).epsilon(1e-14));
  }
}

TEST_CASE("spin configurations must be normalized") {
  CHECK_THROWS_AS(SpinConfig(kHalf, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(SpinConfig(kHalf, {1.0}), ValidationError);
  const SpinConfig one = balanced_spin(HalfInt::integer(1));
  CHECK(one.size() == 3);
  CHECK(one.projection(0) == HalfInt::integer(-1));
  CHECK(one.projection(2) == HalfInt::integer(1));
  double norm = 0.0;
  for (auto c : one.amplitudes()) norm += std::norm(c);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(balanced_spin_half().amplitude(kHalf)) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("parameter validation names the violated invariant") {
  ParamSet p;
  CHECK_NOTHROW(p.validate());
  p.sigma = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("sigma"), ValidationError);
  p = ParamSet{};
  p.m_p = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ParamSet{};
  p.t_free = -1e-3;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("states reject duplicate projections and bad norms") {
  const GaussianWavepacket g{0.0, 1e-6, 0.0, 0.0};
  const Complex a(std::sqrt(0.5), 0.0);
  CHECK_THROWS_AS(SpinPositionState({{kHalf, a, g}, {kHalf, a, g}}), ValidationError);
  CHECK_THROWS_AS(SpinPositionState({{kHalf, 1.0, g}, {-kHalf, 1.0, g}}), ValidationError);
  const SpinPositionState s({{kHalf, a, {2e-6, 1e-6, 0, 0}}, {-kHalf, a, {-3e-6, 1e-6, 0, 0}}});
  CHECK(s.min_center() == -3e-6);
  CHECK(s.max_center() == 2e-6);
}

TEST_CASE("packet amplitude is normalized") {
  const GaussianWavepacket g{1e-6, 2e-6, 3e-28, 0.7};
  const double norm = oracle::simpson([&](double x) { return std::norm(g.amplitude(x)); }, -30e-6, 32e-6, 20000);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid spacing and power-of-two sizing") {
  const Grid g(-1.0, 1.0, 5);
  CHECK(g.spacing() == 0.5);
  CHECK(g.x(4) == 1.0);
  CHECK_FALSE(g.is_power_of_two());
  CHECK(Grid(0.0, 1.0, 1024).is_power_of_two());
  CHECK(next_power_of_two(1) == 1);
  CHECK(next_power_of_two(1025) == 2048);
  CHECK(next_power_of_two(4096) == 4096);
  CHECK_THROWS_AS(Grid(1.0, 0.0, 8), ValidationError);
}

TEST_CASE("config text applies on top of defaults") {
  const auto entries = parse_config_text("# comment\nB = 2e-6\n gamma_ghz_per_t=14 # inline\nt_couple=3e-4\n");
  const ParamSet p = apply_config(ParamSet{}, entries);
  CHECK(p.B == 2e-6);
  CHECK(p.gamma == doctest::Approx(14.0 * constants::ghz_per_tesla).epsilon(1e-15));
  CHECK(p.t_couple == 3e-4);
  CHECK(p.t_free == 3e-4);
  CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config_text("B 1\n"), ValidationError);
  CHECK_THROWS_AS(apply_config(ParamSet{}, parse_config_text("gamma=1\ngamma_ghz_per_t=1\n")), ValidationError);
  CHECK_THROWS_AS(apply_config(ParamSet{}, parse_config_text("sigma=-1\n")), ValidationError);
  CHECK_THROWS_AS(apply_config(ParamSet{}, parse_config_text("B=1e-6x\n")), ValidationError);
}

TEST_CASE("config text round-trips every field exactly") {
  ParamSet p;
  p.gamma = 1.234567890123e11;
  p.k = 3.3e25;
  p.t_couple = 1.1e-3;
  p.t_free = 2.2e-3;
  p.B = -7.7e-7;
  p.sigma = 0.9e-6;
  p.x0 = 1e-7;
  const ParamSet q = apply_config(ParamSet{}, parse_config_text(to_config_text(p)));
  CHECK(q.gamma == p.gamma);
  CHECK(q.k == p.k);
  CHECK(q.t_couple == p.t_couple);
  CHECK(q.t_free == p.t_free);
  CHECK(q.B == p.B);
  CHECK(q.sigma == p.sigma);
  CHECK(q.x0 == p.x0);
}

TEST_CASE("csv floats round-trip and carry provenance") {
  oracle::Draws draw(5);
  for (int i = 0; i < 200; ++i) {
    const double v = draw.uniform(-1.0, 1.0) * std::pow(10.0, draw.uniform(-40, 40));
    CHECK(std::stod(format_double(v)) == v);
  }
  CsvTable t;
  t.comments.push_back(provenance_comment(ParamSet{}));
  t.header = {"a", "b"};
  t.add_row({1.0 / 3.0, -2e-300});
  std::stringstream io;
  t.write(io);
  CHECK(io.str().rfind("# spinterf 0.1.0", 0) == 0);
  const CsvTable back = read_csv(io);
  CHECK(back.header == t.header);
  CHECK(column_values(back, "a")[0] == 1.0 / 3.0);
  CHECK(column_values(back, "b")[0] == -2e-300);
  CHECK_THROWS_AS(column_index(back, "c"), ValidationError);
}
