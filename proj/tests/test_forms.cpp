#include <doctest.h>

#include <cmath>

#include "dyadlab/error.hpp"
#include "dyadlab/forms.hpp"
#include "dyadlab/weights.hpp"

using namespace dyadlab;

TEST_CASE("bilinear form by hand") {
  const Lattice lat = make_lattice(2, 1);
  const Weight one = lebesgue(lat);
  const GridFunction f(lat, {1.0, 2.0, 3.0, 4.0});
  const GridFunction g(lat, {1.0, 1.0, 1.0, 1.0});
  const KernelHandle K = KernelHandle::custom([](const Box&, const Box&) { return 1.0; }, "one");
  const auto family = dyadic_rect_family(1, 1, 1).enumerate();
  // Oracle: for every rectangle, (int_R f)(int_R g), summed.
  double want = 0.0;
  for (const Rect& R : family) {
    double fi = 0.0, gi = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Box cell{2, {0.5 * a, 0.5 * b}, {0.5 * a + 0.5, 0.5 * b + 0.5}};
        if (R.box().contains(cell)) {
          fi += 0.25 * f.values()[static_cast<std::size_t>(2 * a + b)];
          gi += 0.25;
        }
      }
    want += fi * gi;
  }
  CHECK(bilinear_form(K, one, one, f, g, family).total == doctest::Approx(want));
}

TEST_CASE("good/bad split adds up") {
  const Lattice lat = make_lattice(2, 4);
  const Weight s = gen_weight(lat, WeightSpec::lognormal(1, 0.5));
  const Weight w = gen_weight(lat, WeightSpec::lognormal(2, 0.5));
  std::vector<double> fv(256), gv(256);
  for (std::size_t i = 0; i < 256; ++i) {
    fv[i] = 1.0 + static_cast<double>(i % 5);
    gv[i] = 1.0 + static_cast<double>(i % 3);
  }
  const GridFunction f(lat, fv), g(lat, gv);
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const auto fam = dyadic_rect_family(1, 1, 4);
  const FormValue v = goodbad_split(K, s, w, f, g, GoodnessParams{0.25, 2}, fam);
  REQUIRE(v.parts);
  CHECK(v.total == doctest::Approx(bilinear_form(K, s, w, f, g, fam.enumerate()).total).epsilon(1e-12));
  CHECK(v.parts->sum() - v.parts->bad_bad == doctest::Approx(v.total).epsilon(1e-12));
}

TEST_CASE("cell averages of radial powers") {
  // 1D: (1/h) int_{-h/2}^{h/2} |z|^a dz = (h/2)^a / (a+1).
  CHECK(cell_average_power(-0.5, 1, 0.25) == doctest::Approx(std::pow(0.125, -0.5) / 0.5));
  // Second moments: h^2/6 for a square, h^2/4 for a cube.
  CHECK(cell_average_power(2.0, 2, 0.5) == doctest::Approx(0.25 / 6.0).epsilon(1e-10));
  CHECK(cell_average_power(2.0, 3, 0.5) == doctest::Approx(0.25 / 4.0).epsilon(1e-10));
  CHECK(cell_average_power(0.0, 2, 0.3) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fractional integral matches direct summation off the diagonal") {
  const Lattice lat = make_lattice(2, 3);
  std::vector<double> v(64, 0.0);
  v[9] = 1.0;  // cell (1, 1)
  const GridFunction f(lat, v);
  const GridFunction If = apply_frac_integral(f, 0.5, 0.5, 1, 1);
  const double h = 0.125;
  // Cell (5, 3): |dx| = 4h, |dy| = 2h, exponents -1/2 each.
  const double want = std::pow(4 * h, -0.5) * std::pow(2 * h, -0.5) * h * h;
  CHECK(If.values()[5 * 8 + 3] == doctest::Approx(want).epsilon(1e-12));
  // Same cell along axis 0: the diagonal factor is the cell average.
  const double diag = cell_average_power(-0.5, 1, h) * std::pow(2 * h, -0.5) * h * h;
  CHECK(If.values()[1 * 8 + 3] == doctest::Approx(diag).epsilon(1e-12));
}

TEST_CASE("surrogate kernel is positive and comparable on a sample") {
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const Point x{0.1}, u{0.7}, y{0.3}, v{0.35};
  const double s = surrogate_kernel(x, y, u, v, K, 10);
  const double c = continuum_kernel(x, y, u, v, K);
  CHECK(c == doctest::Approx(std::pow(0.6, -0.5) * std::pow(0.05, -0.5)));
  CHECK(s > 0.0);
  CHECK(s / c < 100.0);
  CHECK(s / c > 0.01);
  CHECK_THROWS_AS(surrogate_kernel(x, y, x, v, K, 10), Error);
}

TEST_CASE("norm estimate dominates the dyadic characteristic") {
  const Lattice lat = make_lattice(2, 3);
  const Weight s = gen_weight(lat, WeightSpec::lognormal(3, 0.7));
  const Weight w = gen_weight(lat, WeightSpec::lognormal(4, 0.7));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const Exponents e;
  const auto fam = dyadic_rect_family(1, 1, 3).enumerate();
  CharOptions dyadic;
  dyadic.include_shifted = false;
  const double a = characteristic(CharKind::no_bump, K, s, w, e, fam, dyadic).value;
  NormOptions opts;
  opts.seed = 5;
  const NormEstimate est = norm_estimate(K, s, w, e, fam, opts);
  CHECK(est.lower_bound >= a * (1 - 1e-9));
  for (std::size_t t = 1; t < est.trace.size(); ++t) {
    if (est.trace[t].start == est.trace[t - 1].start)
      CHECK(est.trace[t].objective >= est.trace[t - 1].objective * (1 - 1e-9));
  }
  REQUIRE(est.best_f);
  CHECK(lp_norm(*est.best_f, s, e.p) == doctest::Approx(1.0));
  const NormEstimate again = norm_estimate(K, s, w, e, fam, opts);
  CHECK(again.lower_bound == est.lower_bound);
}
