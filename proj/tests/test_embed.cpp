#include <doctest.h>

#include <cmath>

#include "dyadlab/doubling.hpp"
#include "dyadlab/embed.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

namespace {

// Brute-force sum over dyadic subintervals of [0,1) of |Q|_{mu,theta}^rho.
double carleson_lhs_1d(const Weight& w, double theta, double rho) {
  const int L = w.lattice().depth;
  double sum = 0.0;
  for (int l = 0; l <= L; ++l) {
    const double h = std::ldexp(1.0, -l);
    for (int i = 0; i < (1 << l); ++i) {
      double p = 0.0;
      const int cells = 1 << (L - l);
      for (int c = 0; c < cells; ++c) p += std::pow(w.density()[static_cast<std::size_t>(i * cells + c)], theta);
      p *= std::ldexp(1.0, -L);
      const double bump = std::pow(h, 1.0 - 1.0 / theta) * std::pow(p, 1.0 / theta);
      sum += std::pow(bump, rho);
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("automatic Carleson on Lebesgue") {
  const Weight one = lebesgue(make_lattice(1, 8));
  const CarlesonReport rep = automatic_carleson(unit_box(1), one, 2.0, 2.0);
  CHECK(rep.lhs_sum == doctest::Approx(2.0 - std::ldexp(1.0, -8)).epsilon(1e-12));
  // Constant (1 - 2^(-1/2))^-1.
  CHECK(rep.explicit_constant == doctest::Approx(1.0 / (1.0 - std::pow(2.0, -0.5))));
  CHECK(rep.pass());
}

TEST_CASE("automatic Carleson lhs against brute force") {
  const Weight w = gen_weight(make_lattice(1, 6), WeightSpec::lognormal(4, 1.0));
  const CarlesonReport rep = automatic_carleson(unit_box(1), w, 1.5, 3.0);
  CHECK(rep.lhs_sum == doctest::Approx(carleson_lhs_1d(w, 1.5, 3.0)).epsilon(1e-10));
  CHECK(automatic_carleson_worst(w, 1.5, 3.0).pass());
}

TEST_CASE("stopping cubes for a constant function") {
  const Lattice lat = make_lattice(1, 5);
  const Weight one = lebesgue(lat);
  const GridFunction f(lat, std::vector<double>(32, 1.0));
  const StoppingFamily low = stopping_cubes(f, one, 1.0, -1);
  REQUIRE(low.cubes.size() == 1);
  CHECK(low.cubes[0].level == 0);
  CHECK(low.averages[0] == doctest::Approx(1.0));
  CHECK(stopping_cubes(f, one, 1.0, 0).cubes.empty());  // strict inequality
}

TEST_CASE("stopping cubes are maximal and disjoint") {
  const Lattice lat = make_lattice(1, 6);
  std::vector<double> v(64, 0.1);
  v[10] = 50.0;
  v[40] = 20.0;
  const GridFunction f(lat, v);
  const StoppingFamily fam = stopping_cubes(f, lebesgue(lat), 1.0, 2);
  REQUIRE(fam.cubes.size() == 2);
  for (std::size_t i = 0; i < fam.boxes.size(); ++i) {
    CHECK(fam.averages[i] > 4.0);
    for (std::size_t j = i + 1; j < fam.boxes.size(); ++j) CHECK(intersect(fam.boxes[i], fam.boxes[j]).empty());
  }
  CHECK(fam.refined_violations.empty());
}

TEST_CASE("good Carleson on Lebesgue") {
  const Weight one = lebesgue(make_lattice(1, 8));
  const DoublingReport rep = doubling_report(one, DoublingMode::cube);
  const GoodnessParams g{0.75, 6};
  const CarlesonReport c = good_carleson_worst(one, 2.0, g, *rep.reverse);
  CHECK(c.pass());
  CHECK(c.explicit_constant ==
        doctest::Approx(good_carleson_constant(1, g, 2.0, *rep.reverse)));
}

TEST_CASE("good Carleson refuses a failed fit") {
  ReverseDoublingFit fit;
  fit.eps1 = -0.1;
  fit.C = 1.0;
  CHECK_THROWS_AS(good_carleson_constant(1, GoodnessParams{}, 2.0, fit), Error);
}

TEST_CASE("cube embedding for constants") {
  // lhs^4 = sum_l 2^l 2^(-2l) = 2 - 2^-L when r = 4, s = 2.
  const Lattice lat = make_lattice(1, 6);
  const GridFunction f(lat, std::vector<double>(64, 1.0));
  const EmbedResult e = embed_check_cubes(f, lebesgue(lat), 2.0, 4.0, 2.0);
  CHECK(std::pow(e.lhs, 4.0) == doctest::Approx(2.0 - std::ldexp(1.0, -6)));
  CHECK(e.rhs_norm == doctest::Approx(1.0));
  CHECK_THROWS_AS(embed_check_cubes(f, lebesgue(lat), 1.0, 4.0, 2.0), Error);
  CHECK_THROWS_AS(embed_check_cubes(f, lebesgue(lat), 2.0, 2.0, 4.0), Error);
}

TEST_CASE("rectangle embedding chain") {
  const Lattice lat = make_lattice(2, 4);
  const Weight w = gen_weight(lat, WeightSpec::lognormal(6, 0.8, 2));
  std::vector<double> v(256);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + static_cast<double>(i % 7);
  const GridFunction f(lat, v);
  const RectEmbedResult r = embed_check_rects(f, w, 2.0, 4.0, 2.0, 1);
  CHECK(r.chain_holds());
  CHECK(std::pow(r.result.lhs, 4.0) == doctest::Approx(r.lhs_r_by_slices).epsilon(1e-9));
  CHECK(embed_rect_lhs(f, w, 2.0, 4.0, 2.0, 1) == doctest::Approx(r.result.lhs).epsilon(1e-12));
}
