#include <doctest.h>

#include <cmath>

#include "dyadlab/error.hpp"
#include "dyadlab/grids.hpp"
#include "dyadlab/random.hpp"

using namespace dyadlab;

TEST_CASE("shift offsets sum the finer bits") {
  ShiftParam s{0, 3, {1, 1, 0, 1}};
  CHECK(s.offset(3) == 0.0);
  CHECK(s.offset(2) == 0.125);
  CHECK(s.offset(0) == 0.5 + 0.125);  // bits at levels 1 and 3
  CHECK(s.bitstring() == "1101");
}

TEST_CASE("standard grid locate and ancestor") {
  const DyadicGrid g = DyadicGrid::standard(2, 0, 4);
  const GridCube q = g.locate(Point{0.3, 0.8}, 3);
  CHECK(q.index[0] == 2);
  CHECK(q.index[1] == 6);
  const GridCube a = g.ancestor(q, 2);
  CHECK(a.level == 1);
  CHECK(a.index[0] == 0);
  CHECK(a.index[1] == 1);
  CHECK(g.box(a).contains(g.box(q)));
}

TEST_CASE("one-third grid offsets alternate in sign") {
  const DyadicGrid g = DyadicGrid::third(1, 1, 0, 5);
  CHECK(g.offset(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(g.offset(0, 1) == doctest::Approx(-1.0 / 6.0));
  CHECK(g.offset(0, 2) == doctest::Approx(1.0 / 12.0));
  CHECK(onethird_grids(2, 0, 3).size() == 9);
}

TEST_CASE("grids tile and nest") {
  CHECK_FALSE(check_grid_structure(DyadicGrid::standard(2, 0, 4)));
  CHECK_FALSE(check_grid_structure(DyadicGrid::shifted({sample_shift(0, 6, 1)})));
  for (const auto& g : onethird_grids(1, -2, 6)) CHECK_FALSE(check_grid_structure(g));
}

TEST_CASE("descriptors round trip") {
  const DyadicGrid s = DyadicGrid::shifted({sample_shift(1, 6, 4), sample_shift(1, 6, 5)});
  CHECK(parse_grid_descriptor(s.descriptor()).descriptor() == s.descriptor());
  const DyadicGrid t = DyadicGrid::third(2, 5, 0, 3);
  CHECK(parse_grid_descriptor(t.descriptor()).descriptor() == t.descriptor());
  CHECK_THROWS_AS(parse_grid_descriptor("GRID9 dim=1"), Error);
}

TEST_CASE("sandwich contains the triple and stays comparable") {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const double h = std::exp2(-rng.uniform(0.0, 12.0));
    const double a = rng.uniform(0.0, 1.0);
    const Box P{1, {a}, {a + h}};
    const Sandwich sw = sandwich(P, 0);
    CHECK(sw.box.contains(dilate(P, 3.0)));
    CHECK(sw.box.side(0) <= 18.0 * h * (1 + 1e-12));
  }
  const Box P{2, {0.1, 0.2}, {0.15, 0.25}};
  const Sandwich sw = sandwich(P, 1);
  CHECK(sw.box.contains(dilate(P, 3.0)));
  CHECK(sw.ancestor_box.contains(dilate(P, 2.0)));
}

TEST_CASE("dyadic distance dominates the coordinate distance") {
  const DyadicGrid g = DyadicGrid::standard(1, 0, 10);
  CHECK(dyadic_distance(Point{0.49}, Point{0.51}, g) == 1.0);
  CHECK(dyadic_distance(Point{0.1}, Point{0.2}, g) == 0.25);
  CHECK(dyadic_distance(Point{0.1}, Point{0.1}, g) == std::ldexp(1.0, -10));
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Point x{rng.uniform()}, u{rng.uniform()};
    CHECK(dyadic_distance(x, u, g) >= std::abs(x[0] - u[0]));
  }
}

TEST_CASE("skeleton goodness test") {
  // [0.3, 0.31) against [0,1): skeleton {0, 0.5, 1}, distance 0.19.
  // Threshold 2 * 0.01^0.25 * 1 = 0.632..., so bad.
  CHECK_FALSE(good_in(0.3, 0.31, 0.0, 1.0, 0.25));
  // With eps = 0.9 the threshold is 2 * 0.01^0.9 = 0.0317, so good.
  CHECK(good_in(0.3, 0.31, 0.0, 1.0, 0.9));
  // Touching the midpoint is always bad.
  CHECK_FALSE(good_in(0.49, 0.5, 0.0, 1.0, 0.99));
}

TEST_CASE("goodness scope") {
  const DyadicGrid g = DyadicGrid::standard(1, 0, 4);
  CHECK_THROWS_AS(is_good(GridCube{4, {3}}, GoodnessParams{0.25, 8}, g), Error);
  CHECK(classify_good(GridCube{4, {3}}, GoodnessParams{0.25, 8}, g));
  CHECK_THROWS_AS(validate(GoodnessParams{1.5, 2}), Error);
}

TEST_CASE("bad probability estimate is reproducible and bounded") {
  const BadProbability a = bad_probability_mc(4, 0.25, 500, 9);
  const BadProbability b = bad_probability_mc(4, 0.25, 500, 9);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.p_hat >= 0.0);
  CHECK(a.p_hat <= 1.0);
  CHECK(a.half_width > 0.0);
  CHECK_THROWS_AS(bad_probability_mc(4, 0.25, 10, 9), Error);
}

TEST_CASE("bad probability decays once eps * r is large") {
  const double p8 = bad_probability_mc(8, 0.75, 2000, 4).p_hat;
  const double p12 = bad_probability_mc(12, 0.75, 2000, 4).p_hat;
  CHECK(p8 < 1.0);
  // 2^(-0.75 * 4) = 1/8 predicted; allow sampling noise.
  CHECK(p12 <= 0.25 * p8);
}
