#include <doctest.h>

#include <cmath>

#include "dyadlab/bump.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

TEST_CASE("bump of a constant weight is the mass") {
  const Weight w = gen_weight(make_lattice(2, 3), WeightSpec::constant(3.0));
  const Box Q{2, {0.25, 0.5}, {0.5, 0.75}};
  for (double theta : {1.0, 1.5, 4.0}) CHECK(bump_cube(w, Q, theta) == doctest::Approx(3.0 / 16.0));
}

TEST_CASE("bump by direct summation") {
  const Weight w(make_lattice(1, 1), {1.0, 4.0});
  // |Q|^(1/2) (int u^2)^(1/2) = 1 * sqrt(0.5 + 8) for theta = 2.
  CHECK(bump_cube(w, unit_box(1), 2.0) == doctest::Approx(std::sqrt(8.5)));
  // Outside the box the weight is zero but |Q| keeps its full volume.
  CHECK(bump_box(w, Box{1, {-1.0}, {1.0}}, 2.0) == doctest::Approx(std::sqrt(2.0) * std::sqrt(8.5)));
}

TEST_CASE("rectangle bump factors through the slice profile") {
  const Weight w = gen_weight(make_lattice(2, 4), WeightSpec::lognormal(8, 0.9));
  const Box I{1, {0.25}, {0.5}}, J{1, {0.0}, {0.5}};
  const double direct = bump_rect(w, I, J, 2.5);
  const double iterated = bump_cube(slice_profile(J, w, 1, 2.5), I, 2.5);
  CHECK(iterated == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("exponent validation names the constraint") {
  Exponents e;
  e.q = 2.0;
  try {
    e.validate();
    FAIL("expected domain error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::domain);
    CHECK(std::string(err.what()).find("p < q") != std::string::npos);
  }
  Exponents ok;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("family sizes") {
  // Levels 0..2 per axis: (1 + 2 + 4)^2 rectangles.
  CHECK(dyadic_rect_family(1, 1, 2).enumerate().size() == 49);
  CHECK(dyadic_cube_family(2, 2).enumerate().size() == 1 + 4 + 16);
}

TEST_CASE("characteristic of Lebesgue pairs") {
  // sigma = omega = 1, K = |I|^(-1/2)|J|^(-1/2), p = 2, q = 4:
  // each term is (|I||J|)^(-1/2 + 1/4 + 1/2) = (|I||J|)^(1/4), largest at the unit square.
  const Lattice lat = make_lattice(2, 3);
  const Weight one = lebesgue(lat);
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  Exponents e;
  e.theta = 2.0;
  for (auto kind : {CharKind::product_bump, CharKind::half_bump_omega, CharKind::no_bump}) {
    const CharResult c = characteristic(kind, K, one, one, e, dyadic_rect_family(1, 1, 3));
    CHECK(c.value == doctest::Approx(1.0));
    REQUIRE(c.witness);
    CHECK(c.witness->box().volume() == doctest::Approx(1.0));
  }
}

TEST_CASE("characteristic grows with bumping") {
  const Lattice lat = make_lattice(2, 3);
  const Weight s = gen_weight(lat, WeightSpec::lognormal(1, 1.0));
  const Weight w = gen_weight(lat, WeightSpec::lognormal(2, 1.0));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  Exponents e;
  e.theta = 2.0;
  CharOptions dyadic;
  dyadic.include_shifted = false;
  const auto fam = dyadic_rect_family(1, 1, 3);
  const double none = characteristic(CharKind::no_bump, K, s, w, e, fam, dyadic).value;
  const double half = characteristic(CharKind::half_bump_omega, K, s, w, e, fam).value;
  const double full = characteristic(CharKind::product_bump, K, s, w, e, fam).value;
  CHECK(none <= half * (1 + 1e-12));
  CHECK(half <= full * (1 + 1e-12));
  // The shifted family contains the dyadic rectangles.
  CHECK(characteristic(CharKind::no_bump, K, s, w, e, fam).value >= none * (1 - 1e-12));
}

TEST_CASE("one-parameter characteristic") {
  // Lebesgue on the line, alpha = 1/2, p = 2, q = 4: |Q|^(1/2 - 1/2 + 1/4) = |Q|^(1/4).
  const Weight one = lebesgue(make_lattice(1, 4));
  Exponents e;
  e.m = 1;
  e.n = 0;
  const CharResult c = characteristic(CharKind::one_param, KernelHandle::product_frac(0.5, 0.5, 1, 1), one,
                                      one, e, dyadic_cube_family(1, 4));
  CHECK(c.value == doctest::Approx(1.0));
}

TEST_CASE("kernel rejects out-of-range exponents") {
  CHECK_THROWS_AS(KernelHandle::product_frac(1.0, 0.5, 1, 1), Error);
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  CHECK(K(Box{1, {0.0}, {0.25}}, Box{1, {0.0}, {0.25}}) == doctest::Approx(4.0));
}
