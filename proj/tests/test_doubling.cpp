#include <doctest.h>

#include <cmath>

#include "dyadlab/doubling.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

namespace {

// Independent evaluation of the chain constants straight from their definitions.
StrongRdBound chain_oracle(double beta) {
  StrongRdBound b;
  b.N = 2;
  while (std::pow(beta, b.N) >= 0.25) ++b.N;
  const double h = std::ldexp(1.0, b.N - 1);
  b.gamma = h / (h - 1.0);
  b.M = 1;
  while (std::pow(b.gamma, b.M) < 2.0) ++b.M;
  b.C = std::ldexp(1.0, b.M);
  return b;
}

}  // namespace

TEST_CASE("Lebesgue measure doubles by exactly 2^d") {
  for (int d : {1, 2}) {
    const Weight w = lebesgue(make_lattice(d, d == 1 ? 6 : 4));
    const DoublingReport cube = doubling_report(w, DoublingMode::cube);
    REQUIRE(cube.doubling_constant);
    CHECK(*cube.doubling_constant == doctest::Approx(std::ldexp(1.0, d)));
    const DoublingReport rect = doubling_report(w, DoublingMode::rectangle);
    CHECK(*rect.doubling_constant == doctest::Approx(std::ldexp(1.0, d)));
  }
}

TEST_CASE("Lebesgue reverse doubling decays at rate d") {
  const DoublingReport rep = doubling_report(lebesgue(make_lattice(1, 7)), DoublingMode::cube);
  REQUIRE(rep.reverse);
  CHECK(rep.reverse->holds());
  CHECK(rep.reverse->eps1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.reverse->C == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Lebesgue is strongly reverse doubling with beta 1/2") {
  const DoublingReport rep = doubling_report(lebesgue(make_lattice(2, 3)), DoublingMode::strong);
  REQUIRE(rep.strong_beta);
  CHECK(*rep.strong_beta == doctest::Approx(0.5));
}

TEST_CASE("halfspace cutoff is not doubling but product reverse doubling") {
  const Weight w = gen_weight(make_lattice(2, 4), WeightSpec::halfspace_cutoff(WeightSpec::constant(1.0)));
  const DoublingReport rect = doubling_report(w, DoublingMode::rectangle);
  CHECK(rect.doubling_infinite());
  CHECK(w.integrate(rect.doubling_witness.inner) == 0.0);
  CHECK(w.integrate(rect.doubling_witness.outer) > 0.0);
  const DoublingReport rev = doubling_report(w, DoublingMode::product_reverse);
  REQUIRE(rev.reverse);
  CHECK(rev.reverse->product);
  CHECK(rev.reverse->holds());
  const DoublingReport strong = doubling_report(w, DoublingMode::strong);
  CHECK_FALSE(strong.strong_beta);
}

TEST_CASE("witnesses re-evaluate to the reported constants") {
  const Weight w = gen_weight(make_lattice(1, 8), WeightSpec::lognormal(3, 0.8, 4));
  const DoublingReport rect = doubling_report(w, DoublingMode::rectangle);
  CHECK(reevaluate(w, rect.doubling_witness) == *rect.doubling_constant);
  const DoublingReport strong = doubling_report(w, DoublingMode::strong);
  CHECK(reevaluate(w, strong.strong_witness) == *strong.strong_beta);
  const DoublingReport cube = doubling_report(w, DoublingMode::cube);
  const auto& fit = *cube.reverse;
  CHECK(reevaluate(w, fit.constant_witness) == doctest::Approx(fit.constant_witness.ratio));
  for (const auto& sc : fit.per_scale) CHECK(sc.witness.ratio <= fit.bound(sc.s, sc.t) * (1 + 1e-9));
}

TEST_CASE("strong reverse doubling chain constants") {
  for (double beta : {0.55, 0.6, 0.75, 0.8}) {
    const StrongRdBound got = strong_rd_doubling_bound(beta), want = chain_oracle(beta);
    CHECK(got.N == want.N);
    CHECK(got.gamma == doctest::Approx(want.gamma));
    CHECK(got.M == want.M);
    CHECK(got.C == want.C);
  }
  // Worked by hand: 0.6^3 < 1/4 <= 0.6^2, gamma = 4/3, (4/3)^3 >= 2 > (4/3)^2.
  const StrongRdBound b = strong_rd_doubling_bound(0.6);
  CHECK(b.N == 3);
  CHECK(b.M == 3);
  CHECK(b.C == 8.0);
}

TEST_CASE("mode names round trip") {
  for (auto m : {DoublingMode::cube, DoublingMode::rectangle, DoublingMode::product_reverse, DoublingMode::strong})
    CHECK(parse_doubling_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_doubling_mode("bogus"), Error);
}
