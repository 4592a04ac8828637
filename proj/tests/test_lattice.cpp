#include <doctest.h>

#include <cmath>

#include "dyadlab/error.hpp"
#include "dyadlab/lattice.hpp"
#include "dyadlab/random.hpp"

using namespace dyadlab;

TEST_CASE("flat and unflat are inverse") {
  const Lattice lat = make_lattice(3, 3);
  for (Index i = 0; i < lat.cell_count(); ++i) CHECK(lat.flat(lat.unflat(i)) == i);
  CHECK(lat.flat(Coords{1, 0, 0}) == 64);  // axis 0 slowest
}

TEST_CASE("cell budget is enforced") {
  CHECK_NOTHROW(make_lattice(2, 12));
  try {
    make_lattice(2, 13);
    FAIL("expected resource error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
  }
}

TEST_CASE("align rejects off-grid faces") {
  const Lattice lat = make_lattice(1, 3);
  const CellBox c = align(lat, Box{1, {0.25}, {0.75}});
  CHECK(c.lo[0] == 2);
  CHECK(c.hi[0] == 6);
  CHECK_THROWS_AS(align(lat, Box{1, {0.1}, {0.5}}), Error);
}

TEST_CASE("prefix sums match naive summation") {
  const Lattice lat = make_lattice(2, 5);
  Rng rng(11);
  std::vector<double> d(static_cast<std::size_t>(lat.cell_count()));
  for (auto& x : d) x = rng.uniform(0.0, 3.0);
  const Weight w(lat, d);
  for (int t = 0; t < 200; ++t) {
    CellBox b{2, {}, {}};
    for (int k = 0; k < 2; ++k) {
      Index a = static_cast<Index>(rng.below(33)), c = static_cast<Index>(rng.below(33));
      if (a > c) std::swap(a, c);
      b.lo[k] = a;
      b.hi[k] = c;
    }
    double naive = 0.0;
    for (Index x = b.lo[0]; x < b.hi[0]; ++x)
      for (Index y = b.lo[1]; y < b.hi[1]; ++y) naive += d[static_cast<std::size_t>(x * 32 + y)];
    naive /= 1024.0;
    CHECK(w.integrate(b) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("clipped integral of a partial cell is proportional") {
  const Lattice lat = make_lattice(1, 1);
  const Weight w(lat, {2.0, 6.0});
  // [0.25, 0.75): a quarter of each cell.
  CHECK(w.table().sum_clipped(Box{1, {0.25}, {0.75}}) == doctest::Approx(0.25 * 2.0 + 0.25 * 6.0));
  // Zero extension outside the box.
  CHECK(w.table().sum_clipped(Box{1, {-1.0}, {0.5}}) == doctest::Approx(1.0));
  CHECK(w.table().sum_clipped(Box{1, {1.0}, {3.0}}) == 0.0);
}

TEST_CASE("power integrals and caching across copies") {
  const Lattice lat = make_lattice(1, 2);
  const Weight w(lat, {1.0, 2.0, 3.0, 4.0});
  const Weight copy = w;
  CHECK(w.power_integrate(whole(lat), 2.0) == doctest::Approx((1 + 4 + 9 + 16) / 4.0));
  CHECK(&w.table(2.0) == &copy.table(2.0));
  CHECK(w.total_mass() == doctest::Approx(2.5));
}

TEST_CASE("negative density is rejected") {
  CHECK_THROWS_AS(Weight(make_lattice(1, 1), {1.0, -0.5}), Error);
  CHECK_THROWS_AS(Weight(make_lattice(1, 1), {1.0, NAN}), Error);
}

TEST_CASE("refine preserves integrals") {
  const Lattice lat = make_lattice(2, 2);
  Rng rng(3);
  std::vector<double> d(16);
  for (auto& x : d) x = rng.uniform();
  const Weight w(lat, d);
  const Weight r = refine(w, 5);
  CHECK(r.lattice().depth == 5);
  CHECK(r.total_mass() == doctest::Approx(w.total_mass()).epsilon(1e-12));
  const Box b{2, {0.25, 0.5}, {0.75, 1.0}};
  CHECK(r.integrate(b) == doctest::Approx(w.integrate(b)).epsilon(1e-12));
}

TEST_CASE("lp norm and times") {
  const Lattice lat = make_lattice(1, 1);
  const Weight w(lat, {1.0, 3.0});
  const GridFunction f(lat, {2.0, 1.0});
  CHECK(lp_norm(f, w, 2.0) == doctest::Approx(std::sqrt(0.5 * 4.0 + 0.5 * 3.0)));
  CHECK(times(f, w).total_mass() == doctest::Approx(0.5 * 2.0 + 0.5 * 3.0));
}

TEST_CASE("product of boxes") {
  const Box I{1, {0.0}, {0.5}}, J{2, {0.25, 0.5}, {0.5, 1.0}};
  const Box P = product(I, J);
  CHECK(P.dim == 3);
  CHECK(P.volume() == doctest::Approx(0.5 * 0.25 * 0.5));
  CHECK(product(I, Box{0, {}, {}}).volume() == doctest::Approx(0.5));
}
