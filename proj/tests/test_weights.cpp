#include <doctest.h>

#include <cmath>

#include "dyadlab/doubling.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

TEST_CASE("constant and power densities") {
  const Lattice lat = make_lattice(1, 3);
  const Weight c = gen_weight(lat, WeightSpec::constant(2.5));
  for (double v : c.density()) CHECK(v == 2.5);
  const Weight p = gen_weight(lat, WeightSpec::power(1.0));
  // Cell 0 center is 1/16, so |x - 1/2| = 7/16.
  CHECK(p.density()[0] == doctest::Approx(7.0 / 16.0));
  CHECK_THROWS_AS(gen_weight(lat, WeightSpec::power(-1.0)), Error);
}

TEST_CASE("halfspace cutoff keeps the upper orthant") {
  const Lattice lat = make_lattice(2, 2);
  const Weight w = gen_weight(lat, WeightSpec::halfspace_cutoff(WeightSpec::constant(1.0)));
  CHECK(w.total_mass() == doctest::Approx(0.25));
  CHECK(w.at(Coords{3, 3}) == 1.0);
  CHECK(w.at(Coords{1, 3}) == 0.0);
}

TEST_CASE("generation is deterministic") {
  const Lattice lat = make_lattice(2, 4);
  const WeightSpec s = WeightSpec::lognormal(42, 0.7, 2);
  const Weight a = gen_weight(lat, s), b = gen_weight(lat, s);
  CHECK(std::equal(a.density().begin(), a.density().end(), b.density().begin()));
  const Weight c = gen_weight(lat, WeightSpec::lognormal(43, 0.7, 2));
  CHECK_FALSE(std::equal(a.density().begin(), a.density().end(), c.density().begin()));
}

TEST_CASE("spec strings round trip") {
  for (const char* text : {"constant:1", "power:0.5", "halfspace:constant:1", "checkerboard:3:4",
                           "lognormal:9:0.5:2", "strong-rd:0.75:3"}) {
    const WeightSpec s = parse_weight_spec(text);
    CHECK(parse_weight_spec(s.str()).str() == s.str());
  }
  CHECK_THROWS_AS(parse_weight_spec("nonsense:1"), Error);
}

TEST_CASE("strong reverse doubling generator meets its target") {
  const Lattice lat = make_lattice(1, 8);
  for (double beta : {0.6, 0.75, 0.9}) {
    const Weight w = gen_weight(lat, WeightSpec::strong_rd(beta, 5));
    const DoublingReport rep = doubling_report(w, DoublingMode::strong);
    REQUIRE(rep.strong_beta);
    CHECK(*rep.strong_beta <= beta);
    CHECK(*rep.strong_beta >= 0.5);
  }
  CHECK_THROWS_AS(gen_weight(lat, WeightSpec::strong_rd(1.2, 1)), Error);
}
