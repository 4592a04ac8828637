#include "dyadlab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "dyadlab/bump.hpp"
#include "dyadlab/doubling.hpp"
#include "dyadlab/embed.hpp"
#include "dyadlab/error.hpp"
#include "dyadlab/forms.hpp"
#include "dyadlab/grids.hpp"
#include "dyadlab/random.hpp"
#include "dyadlab/weights.hpp"

namespace dyadlab {

namespace {

constexpr double kSlack = 1.0 + 1e-9;

long scaled(double count, const SuiteOptions& o, long floor_at = 1) {
  return std::max(floor_at, static_cast<long>(std::llround(count * o.scale)));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random dyadic cube of a lattice with level in [0, max_level].
Box random_dyadic_cube(const Lattice& lat, Rng& rng, int max_level) {
  const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_level + 1)));
  Box b{lat.dim, {}, {}};
  for (int k = 0; k < lat.dim; ++k) {
    const auto i = static_cast<double>(rng.below(std::uint64_t{1} << level));
    b.lo[k] = std::ldexp(i, -level);
    b.hi[k] = std::ldexp(i + 1.0, -level);
  }
  return b;
}

int level_of(const Box& b) { return static_cast<int>(std::lround(-std::log2(b.side(0)))); }

void random_partition(const Box& P, int depth, Rng& rng, std::vector<Box>& out) {
  const int level = level_of(P);
  if (level >= depth || rng.uniform() < 0.4) {
    out.push_back(P);
    return;
  }
  const int d = P.dim;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Box c{d, {}, {}};
    for (int k = 0; k < d; ++k) {
      const double mid = 0.5 * (P.lo[k] + P.hi[k]);
      c.lo[k] = (mask >> k) & 1u ? mid : P.lo[k];
      c.hi[k] = (mask >> k) & 1u ? P.hi[k] : mid;
    }
    random_partition(c, depth, rng, out);
  }
}

// ---------------------------------------------------------------------------
// Criterion 1

CheckRow bump_subadditivity(const SuiteOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t root = derive_seed(o.seed, 1);
  const long n = scaled(200, o);
  double worst = 0.0;
  std::string witness;
  for (long i = 0; i < n; ++i) {
    const bool two_d = i % 2 == 1;
    const Lattice lat = make_lattice(two_d ? 2 : 1, two_d ? 5 : 8);
    Rng rng(derive_seed(root, static_cast<std::uint64_t>(i)));
    const Weight w = random_test_weight(lat, rng.bits());
    const double theta = rng.uniform(1.0, 4.0);
    const Box P = random_dyadic_cube(lat, rng, lat.depth - 1);
    std::vector<Box> parts;
    random_partition(P, lat.depth, rng, parts);
    const double whole = bump_cube(w, P, theta);
    long double sum = 0.0L;
    for (const Box& Q : parts) {
      const double b = bump_cube(w, Q, theta);
      sum += b;
      const double plain = w.integrate(Q);
      if (plain > 0.0 && plain / b > worst) {
        worst = plain / b;
        witness = "holder " + Q.str();
      }
    }
    if (whole > 0.0 && static_cast<double>(sum) / whole > worst) {
      worst = static_cast<double>(sum) / whole;
      witness = "partition of " + P.str() + " into " + std::to_string(parts.size());
    } else if (whole == 0.0 && sum > 0.0L) {
      worst = std::numeric_limits<double>::infinity();
      witness = "partition of null cube " + P.str();
    }
  }
  const double secs = seconds_since(t0);
  CheckRow row{"bump_subadditivity", worst <= kSlack && secs < 30.0, worst, kSlack, witness,
               std::to_string(n) + " weights, 1D L=8 and 2D L=5"};
  if (secs >= 30.0) row.detail += "; runtime budget exceeded";
  return row;
}

// ---------------------------------------------------------------------------
// Criterion 2

CheckRow iterated_bump_identity(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 2);
  const long n = scaled(100, o);
  const Lattice lat = make_lattice(2, 5);
  const Lattice line = make_lattice(1, 5);
  double worst = 0.0;
  std::string witness;
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(root, static_cast<std::uint64_t>(i)));
    const Weight w = random_test_weight(lat, rng.bits());
    const double theta = rng.uniform(1.0, 4.0);
    const Box I = random_dyadic_cube(line, rng, 5);
    const Box J = random_dyadic_cube(line, rng, 5);
    const double direct = bump_rect(w, I, J, theta);
    const double iterated = bump_cube(slice_profile(J, w, 1, theta), I, theta);
    const double scale = std::max(std::abs(direct), std::abs(iterated));
    const double err = scale > 0.0 ? std::abs(direct - iterated) / scale : 0.0;
    if (err > worst || witness.empty()) {
      worst = std::max(worst, err);
      witness = I.str() + " x " + J.str() + " theta=" + fmt(theta);
    }
  }
  return {"iterated_bump_identity", worst <= 1e-9, worst, 1e-9, witness,
          std::to_string(n) + " product weights, m=n=1, L=5"};
}

// ---------------------------------------------------------------------------
// Criterion 3

CheckRow automatic_carleson_check(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 3);
  const long n = scaled(100, o);
  const std::pair<double, double> params[] = {{2.0, 2.0}, {1.5, 3.0}, {3.0, 1.5}};
  double worst = 0.0;
  std::string witness;
  for (long i = 0; i < n; ++i) {
    const bool two_d = i % 2 == 1;
    const Lattice lat = make_lattice(two_d ? 2 : 1, two_d ? 5 : 8);
    const Weight w = random_test_weight(lat, derive_seed(root, static_cast<std::uint64_t>(i)));
    for (auto [theta, rho] : params) {
      const CarlesonReport rep = automatic_carleson_worst(w, theta, rho);
      if (rep.ratio > worst || witness.empty()) {
        worst = std::max(worst, rep.ratio);
        witness = "P=" + rep.witness.str() + " theta=" + fmt(theta) + " rho=" + fmt(rho);
      }
    }
  }
  const Lattice lat = make_lattice(1, 8);
  const CarlesonReport leb = automatic_carleson(unit_box(1), lebesgue(lat), 2.0, 2.0);
  const double expected = 2.0 - std::ldexp(1.0, -8);
  const double leb_err = std::abs(leb.lhs_sum - expected) / expected;
  CheckRow row{"automatic_carleson", worst <= kSlack && leb_err <= 1e-12, worst, kSlack, witness,
               std::to_string(n) + " weights x 3 (theta,rho); Lebesgue lhs " + fmt(leb.lhs_sum) +
                   " vs " + fmt(expected) + " (rel err " + fmt(leb_err) + ")"};
  return row;
}

// ---------------------------------------------------------------------------
// Criterion 4

CheckRow embedding_depth_stability(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 4);
  const long n = scaled(100, o);
  const double theta = 2.0, s = 2.0, r = 4.0;
  double worst = 0.0;
  std::string witness;
  bool chains = true;
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(root, static_cast<std::uint64_t>(i)));
    // 1D: the same function and weight at depths 8 and 10.
    {
      const int bw = 1 + static_cast<int>(rng.below(6));
      const int bf = 1 + static_cast<int>(rng.below(6));
      const Lattice coarse_w = make_lattice(1, bw), coarse_f = make_lattice(1, bf);
      const Weight w0 = random_test_weight(coarse_w, rng.bits(), bw);
      const GridFunction f0 = random_test_function(coarse_f, rng.bits(), bf);
      const double lo = embed_check_cubes(refine(f0, 8), refine(w0, 8), theta, r, s).ratio;
      const double hi = embed_check_cubes(refine(f0, 10), refine(w0, 10), theta, r, s).ratio;
      const double q = lo > 0.0 ? hi / lo : 0.0;
      if (q > worst || witness.empty()) {
        worst = std::max(worst, q);
        witness = "1D instance " + std::to_string(i) + " ratio(8)=" + fmt(lo) + " ratio(10)=" + fmt(hi);
      }
    }
    // 2D rectangles: depths 5 and 6 per axis.
    {
      const int bw = 1 + static_cast<int>(rng.below(4));
      const int bf = 1 + static_cast<int>(rng.below(4));
      const Weight w0 = random_test_weight(make_lattice(2, bw), rng.bits(), bw);
      const GridFunction f0 = random_test_function(make_lattice(2, bf), rng.bits(), bf);
      const RectEmbedResult a = embed_check_rects(refine(f0, 5), refine(w0, 5), theta, r, s, 1);
      const RectEmbedResult b = embed_check_rects(refine(f0, 6), refine(w0, 6), theta, r, s, 1);
      chains = chains && a.chain_holds() && b.chain_holds();
      const double q = a.result.ratio > 0.0 ? b.result.ratio / a.result.ratio : 0.0;
      if (q > worst) {
        worst = q;
        witness = "2D instance " + std::to_string(i) + " ratio(5)=" + fmt(a.result.ratio) +
                  " ratio(6)=" + fmt(b.result.ratio);
      }
    }
  }
  return {"embedding_depth_stability", worst <= 1.1 && chains, worst, 1.1, witness,
          std::to_string(n) + " instances, theta=2 s=2 r=4; slice chain " +
              (chains ? "holds" : "FAILS")};
}

// ---------------------------------------------------------------------------
// Criterion 5

CheckRow sandwich_check(const SuiteOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t root = derive_seed(o.seed, 5);
  const long n = scaled(100000, o);
  long failures = 0;
  double worst_size = 0.0;
  std::string witness;
  Rng rng(root);
  for (long i = 0; i < n; ++i) {
    const double h = std::exp2(-rng.uniform(0.0, 14.0));
    const double a = rng.uniform(-0.5, 1.5);
    const Box P{1, {a}, {a + h}};
    try {
      const Sandwich sw = sandwich(P, 0);
      const double ratio = sw.box.side(0) / h;
      const bool ok = sw.box.contains(dilate(P, 3.0)) && ratio <= 18.0;
      if (!ok) {
        ++failures;
        witness = P.str();
      }
      worst_size = std::max(worst_size, ratio);
    } catch (const Error& e) {
      ++failures;
      witness = P.str() + ": " + e.what();
    }
  }
  const double secs = seconds_since(t0);
  return {"sandwich", failures == 0 && secs < 60.0, static_cast<double>(failures), 0.0,
          witness.empty() ? "none" : witness,
          std::to_string(n) + " intervals; largest l(I)/l(P) = " + fmt(worst_size) +
              (secs < 60.0 ? "" : "; runtime budget exceeded")};
}

// ---------------------------------------------------------------------------
// Criterion 6

struct Window {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
};

Window surrogate_window(std::uint64_t seed, long n, int depth) {
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const Lattice line = make_lattice(1, depth);
  Rng rng(seed);
  Window w;
  for (long i = 0; i < n; ++i) {
    Point x{}, y{}, u{}, v{};
    do {
      x[0] = rng.uniform();
      u[0] = rng.uniform();
    } while (line.cell_of(x) == line.cell_of(u));
    do {
      y[0] = rng.uniform();
      v[0] = rng.uniform();
    } while (line.cell_of(y) == line.cell_of(v));
    const double ratio = surrogate_kernel(x, y, u, v, K, depth) / continuum_kernel(x, y, u, v, K);
    w.lo = std::min(w.lo, ratio);
    w.hi = std::max(w.hi, ratio);
  }
  return w;
}

CheckRow surrogate_window_check(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 6);
  const long n = scaled(10000, o);
  const Window a = surrogate_window(derive_seed(root, 0), n, 10);
  const Window b = surrogate_window(derive_seed(root, 1), n, 10);
  const double spread = std::max(a.hi / a.lo, b.hi / b.lo);
  const double move_lo = std::abs(a.lo - b.lo) / std::min(a.lo, b.lo);
  const double move_hi = std::abs(a.hi - b.hi) / std::min(a.hi, b.hi);
  const bool pass = spread <= 100.0 && move_lo < 0.2 && move_hi < 0.2;
  return {"surrogate_window", pass, spread, 100.0,
          "seed A [" + fmt(a.lo) + ", " + fmt(a.hi) + "], seed B [" + fmt(b.lo) + ", " + fmt(b.hi) + "]",
          "m=n=1 alpha=beta=1/2 L=10, " + std::to_string(n) + " quadruples per seed; endpoint moves " +
              fmt(move_lo) + ", " + fmt(move_hi) + " (limit 0.2)"};
}

// ---------------------------------------------------------------------------
// Criterion 7

CheckRow bad_probability_decay(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 7);
  const long n = scaled(10000, o, 100);
  const BadProbability p4 = bad_probability_mc(4, 0.25, n, derive_seed(root, 4));
  const BadProbability p12 = bad_probability_mc(12, 0.25, n, derive_seed(root, 12));
  const double bound = 4.0 * std::exp2(-0.25 * 8.0) * p4.p_hat + p4.half_width + p12.half_width;
  return {"bad_probability_decay", p12.p_hat <= bound, p12.p_hat, bound,
          "p(4)=" + fmt(p4.p_hat) + "+-" + fmt(p4.half_width) + " p(12)=" + fmt(p12.p_hat) + "+-" +
              fmt(p12.half_width),
          "eps=1/4, " + std::to_string(n) + " shifted grids per point, levels 0..48"};
}

// ---------------------------------------------------------------------------
// Criterion 8

CheckRow good_carleson_check(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 8);
  const GoodnessParams goodness{0.75, 6};
  const double rho = 2.0;
  const Lattice lat = make_lattice(1, 10);
  std::vector<std::pair<std::string, Weight>> weights;
  weights.emplace_back("lebesgue", lebesgue(lat));
  weights.emplace_back("halfspace", gen_weight(lat, WeightSpec::halfspace_cutoff(WeightSpec::constant(1.0))));
  const long n = scaled(20, o);
  long attempts = 0;
  for (long got = 0; got < n && attempts < 50 * n; ++attempts) {
    Weight w = random_test_weight(lat, derive_seed(root, static_cast<std::uint64_t>(attempts)));
    const DoublingReport rep = doubling_report(w, DoublingMode::cube);
    if (!rep.reverse || !rep.reverse->holds()) continue;
    weights.emplace_back("random#" + std::to_string(attempts), std::move(w));
    ++got;
  }
  double worst = 0.0;
  std::string witness;
  for (const auto& [name, w] : weights) {
    const DoublingReport rep = doubling_report(w, DoublingMode::cube);
    const CarlesonReport c = good_carleson_worst(w, rho, goodness, *rep.reverse);
    if (c.ratio > worst || witness.empty()) {
      worst = std::max(worst, c.ratio);
      witness = name + " P=" + c.witness.str() + " eta=" + fmt(rep.reverse->eps1) +
                " C=" + fmt(rep.reverse->C) + " constant=" + fmt(c.explicit_constant);
    }
  }
  return {"good_carleson", worst <= kSlack && static_cast<long>(weights.size()) == n + 2, worst, kSlack,
          witness,
          std::to_string(weights.size()) + " weights, 1D L=10, eps=3/4 r=6 rho=2"};
}

// ---------------------------------------------------------------------------
// Criterion 9

CheckRow norm_sandwich(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 9);
  const long n = scaled(20, o);
  const Lattice lat = make_lattice(2, 6);
  Exponents exps;
  exps.p = 2.0;
  exps.q = 4.0;
  exps.theta = 1.5;
  exps.alpha = 0.5;
  exps.beta = 0.5;
  const double r = 0.5 * (exps.p + exps.q);
  const double r_dual = r / (r - 1.0);
  const KernelHandle K = KernelHandle::product_frac(exps.alpha, exps.beta, 1, 1);
  const auto family = dyadic_rect_family(1, 1, lat.depth).enumerate();
  double worst_lower = 0.0, worst_upper = 0.0;
  std::string witness;
  CharOptions dyadic_only;
  dyadic_only.include_shifted = false;
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(root, static_cast<std::uint64_t>(i)));
    const Weight sigma = random_test_weight(lat, rng.bits(), 1 + static_cast<int>(rng.below(4)));
    const Weight omega = random_test_weight(lat, rng.bits(), 1 + static_cast<int>(rng.below(4)));
    const CharResult nb = characteristic(CharKind::no_bump, K, sigma, omega, exps, family, dyadic_only);
    const CharResult pb = characteristic(CharKind::product_bump, K, sigma, omega, exps, family);
    NormOptions nopts;
    nopts.seed = rng.bits();
    const NormEstimate est = norm_estimate(K, sigma, omega, exps, family, nopts);
    const double rs = embed_check_rects(*est.best_f, sigma, exps.theta, r, exps.p, 1).result.ratio;
    const double ro = embed_check_rects(*est.best_g, omega, exps.theta, r_dual, exps.q_prime(), 1).result.ratio;
    const double lower = est.lower_bound > 0.0 ? nb.value / est.lower_bound : (nb.value > 0.0 ? INFINITY : 0.0);
    const double upper_bound = rs * ro * pb.value;
    const double upper = upper_bound > 0.0 ? est.lower_bound / upper_bound : (est.lower_bound > 0.0 ? INFINITY : 0.0);
    if (lower > worst_lower || upper > worst_upper || witness.empty()) {
      witness = "instance " + std::to_string(i) + ": A_K=" + fmt(nb.value) + " N>=" + fmt(est.lower_bound) +
                " ratio_sigma*ratio_omega*A_K,theta=" + fmt(rs) + "*" + fmt(ro) + "*" + fmt(pb.value);
    }
    worst_lower = std::max(worst_lower, lower);
    worst_upper = std::max(worst_upper, upper);
  }
  const double measured = std::max(worst_lower, worst_upper);
  return {"norm_sandwich", worst_lower <= kSlack && worst_upper <= kSlack, measured, kSlack, witness,
          std::to_string(n) + " weight pairs, L=6 per axis, p=2 q=4 theta=1.5; worst lower ratio " +
              fmt(worst_lower) + ", worst upper ratio " + fmt(worst_upper)};
}

// ---------------------------------------------------------------------------
// Criterion 10

CheckRow halfspace_and_strong_rd(const SuiteOptions& o) {
  const std::uint64_t root = derive_seed(o.seed, 10);
  std::ostringstream detail;
  bool pass = true;
  double worst = 0.0;
  std::string witness;

  // Half-space cutoff: non-doubling with a witness, product reverse doubling.
  for (int dim : {1, 2}) {
    const Lattice lat = make_lattice(dim, dim == 1 ? 8 : 5);
    const Weight nu = gen_weight(lat, WeightSpec::halfspace_cutoff(WeightSpec::constant(1.0)));
    const DoublingReport dbl = doubling_report(nu, DoublingMode::rectangle);
    const bool flagged = dbl.doubling_infinite() && std::isinf(reevaluate(nu, dbl.doubling_witness));
    const DoublingReport rev = doubling_report(nu, DoublingMode::product_reverse);
    bool scales_ok = rev.reverse && rev.reverse->holds();
    if (rev.reverse) {
      for (const auto& sc : rev.reverse->per_scale) {
        scales_ok = scales_ok && sc.witness.ratio <= rev.reverse->bound(sc.s, sc.t) * kSlack;
      }
    }
    pass = pass && flagged && scales_ok;
    detail << dim << "D halfspace: doubling " << (flagged ? "INFINITE" : "finite") << " at "
           << dbl.doubling_witness.inner.str() << "; reverse eps=" << (rev.reverse ? fmt(rev.reverse->eps1) : "-");
    if (rev.reverse && rev.reverse->product) detail << "," << fmt(rev.reverse->eps2);
    detail << " C=" << (rev.reverse ? fmt(rev.reverse->C) : "-") << (scales_ok ? "" : " (FAILS)") << "; ";
  }

  // Strongly reverse doubling weights against the doubling bound.
  const long per_beta = scaled(4, o);
  const Lattice lat = make_lattice(1, 10);
  for (double beta : {0.6, 0.75, 0.9}) {
    const StrongRdBound bound = strong_rd_doubling_bound(beta);
    double max_dbl = 0.0;
    for (long i = 0; i < per_beta; ++i) {
      const Weight w = gen_weight(lat, WeightSpec::strong_rd(beta, derive_seed(root, static_cast<std::uint64_t>(i))));
      const DoublingReport strong = doubling_report(w, DoublingMode::strong);
      const DoublingReport dbl = doubling_report(w, DoublingMode::rectangle);
      const bool is_strong = strong.strong_beta && *strong.strong_beta <= beta;
      const double c = dbl.doubling_constant.value_or(INFINITY);
      max_dbl = std::max(max_dbl, c);
      const double q = c / bound.C;
      if (q > worst) {
        worst = q;
        witness = "beta=" + fmt(beta) + " weight " + std::to_string(i) + " doubling " + fmt(c) +
                  " at " + dbl.doubling_witness.inner.str() + " vs C=" + fmt(bound.C);
      }
      pass = pass && is_strong && c <= bound.C * kSlack;
    }
    detail << "beta=" << beta << ": N=" << bound.N << " gamma=" << fmt(bound.gamma) << " M=" << bound.M
           << " C=" << fmt(bound.C) << " max measured doubling " << fmt(max_dbl) << "; ";
  }
  return {"halfspace_and_strong_rd", pass, worst, 1.0, witness, detail.str()};
}

// ---------------------------------------------------------------------------
// Property checks

CheckRow prefix_vs_naive(const SuiteOptions& o) {
  const Lattice lat = make_lattice(2, std::min(o.depth, 7));
  Rng rng(derive_seed(o.seed, 101));
  const Weight w = random_test_weight(lat, rng.bits());
  double worst = 0.0;
  const long n = scaled(1000, o);
  const Index cells = lat.cells_per_axis();
  for (long i = 0; i < n; ++i) {
    CellBox b{2, {}, {}};
    for (int k = 0; k < 2; ++k) {
      Index a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(cells + 1)));
      Index c = static_cast<Index>(rng.below(static_cast<std::uint64_t>(cells + 1)));
      if (a > c) std::swap(a, c);
      b.lo[k] = a;
      b.hi[k] = c;
    }
    long double naive = 0.0L;
    for (Index x = b.lo[0]; x < b.hi[0]; ++x)
      for (Index y = b.lo[1]; y < b.hi[1]; ++y) naive += w.at(Coords{x, y});
    const double nv = static_cast<double>(naive) * lat.cell_volume();
    const double fast = w.integrate(b);
    if (nv > 0.0) worst = std::max(worst, std::abs(fast - nv) / nv);
  }
  return {"prefix_vs_naive", worst <= 1e-12, worst, 1e-12, "-", std::to_string(n) + " rectangles"};
}

CheckRow theta_monotonicity(const SuiteOptions& o) {
  const Lattice lat = make_lattice(2, std::min(o.depth, 4));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const auto family = dyadic_rect_family(1, 1, lat.depth).enumerate();
  double worst = 0.0;
  const long n = scaled(50, o);
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(derive_seed(o.seed, 102), static_cast<std::uint64_t>(i)));
    const Weight s = random_test_weight(lat, rng.bits());
    const Weight w = random_test_weight(lat, rng.bits());
    Exponents e;
    e.theta = rng.uniform(1.1, 3.0);
    Exponents e1 = e;
    e1.theta = 1.0;
    const double plain = characteristic(CharKind::product_bump, K, s, w, e1, family).value;
    const double bumped = characteristic(CharKind::product_bump, K, s, w, e, family).value;
    const double half = characteristic(CharKind::half_bump_omega, K, s, w, e, family).value;
    if (bumped > 0.0) worst = std::max({worst, plain / bumped, half / bumped});
  }
  return {"theta_monotonicity", worst <= kSlack, worst, kSlack, "-",
          std::to_string(n) + " pairs: product(theta=1) <= product(theta), half <= product"};
}

CheckRow witness_reevaluation(const SuiteOptions& o) {
  const Lattice lat = make_lattice(2, std::min(o.depth, 4));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  Rng rng(derive_seed(o.seed, 103));
  const Weight s = random_test_weight(lat, rng.bits());
  const Weight w = random_test_weight(lat, rng.bits());
  Exponents e;
  e.theta = 1.7;
  bool ok = true;
  for (CharKind kind : {CharKind::product_bump, CharKind::half_bump_omega, CharKind::no_bump}) {
    const CharResult c = characteristic(kind, K, s, w, e, dyadic_rect_family(1, 1, lat.depth));
    ok = ok && characteristic_term(kind, K, s, w, e, *c.witness) == c.value;
  }
  const DoublingReport rep = doubling_report(s, DoublingMode::rectangle);
  ok = ok && reevaluate(s, rep.doubling_witness) == *rep.doubling_constant;
  return {"witness_reevaluation", ok, ok ? 0.0 : 1.0, 0.0, "-", "characteristics and doubling witnesses"};
}

CheckRow goodbad_identity(const SuiteOptions& o) {
  const Lattice lat = make_lattice(2, std::min(o.depth, 5));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    Rng rng(derive_seed(derive_seed(o.seed, 104), static_cast<std::uint64_t>(i)));
    const Weight s = random_test_weight(lat, rng.bits());
    const Weight w = random_test_weight(lat, rng.bits());
    const GridFunction f = random_test_function(lat, rng.bits(), lat.depth);
    const GridFunction g = random_test_function(lat, rng.bits(), lat.depth);
    const FormValue v = goodbad_split(K, s, w, f, g, GoodnessParams{0.25, 4}, dyadic_rect_family(1, 1, lat.depth));
    const FormParts& p = *v.parts;
    const double err = std::abs(v.total - (p.sum() - p.bad_bad)) / std::max(v.total, 1e-300);
    const double over = v.total / std::max(p.sum(), 1e-300);
    worst = std::max({worst, err, over > kSlack ? over : 0.0});
  }
  return {"goodbad_identity", worst <= 1e-9, worst, 1e-9, "-", "total = parts - bad x bad, total <= parts"};
}

CheckRow norm_trace_monotone(const SuiteOptions& o) {
  const Lattice lat = make_lattice(2, std::min(o.depth, 4));
  const KernelHandle K = KernelHandle::product_frac(0.5, 0.5, 1, 1);
  const auto family = dyadic_rect_family(1, 1, lat.depth).enumerate();
  double worst = 0.0;
  const long n = scaled(10, o);
  for (long i = 0; i < n; ++i) {
    Rng rng(derive_seed(derive_seed(o.seed, 105), static_cast<std::uint64_t>(i)));
    const Weight s = random_test_weight(lat, rng.bits());
    const Weight w = random_test_weight(lat, rng.bits());
    NormOptions no;
    no.seed = rng.bits();
    const NormEstimate est = norm_estimate(K, s, w, Exponents{}, family, no);
    for (std::size_t t = 1; t < est.trace.size(); ++t) {
      if (est.trace[t].start != est.trace[t - 1].start) continue;
      const double drop = est.trace[t - 1].objective / est.trace[t].objective;
      worst = std::max(worst, drop);
    }
  }
  return {"norm_trace_monotone", worst <= kSlack, worst, kSlack, "-", std::to_string(n) + " instances"};
}

CheckRow grid_structure(const SuiteOptions& o) {
  std::vector<DyadicGrid> grids;
  grids.push_back(DyadicGrid::standard(1, 0, o.depth));
  grids.push_back(DyadicGrid::shifted({sample_shift(0, o.depth, derive_seed(o.seed, 106))}));
  for (const auto& g : onethird_grids(2, 0, o.depth)) grids.push_back(g);
  std::string bad;
  for (const auto& g : grids) {
    if (auto err = check_grid_structure(g)) bad = g.descriptor() + ": " + *err;
  }
  return {"grid_structure", bad.empty(), bad.empty() ? 0.0 : 1.0, 0.0, bad.empty() ? "-" : bad,
          std::to_string(grids.size()) + " grids, levels 0.." + std::to_string(o.depth)};
}

CheckRow dyadic_distance_bound(const SuiteOptions& o) {
  Rng rng(derive_seed(o.seed, 107));
  double worst = 0.0;
  const long n = scaled(10000, o);
  for (long i = 0; i < n; ++i) {
    const int d = 1 + static_cast<int>(i % 2);
    const DyadicGrid g = DyadicGrid::standard(d, 0, o.depth);
    Point x{}, u{};
    double e2 = 0.0;
    for (int k = 0; k < d; ++k) {
      x[k] = rng.uniform();
      u[k] = rng.uniform();
      e2 += (x[k] - u[k]) * (x[k] - u[k]);
    }
    const double dd = dyadic_distance(x, u, g);
    if (dd > 0.0) worst = std::max(worst, std::sqrt(e2) / std::sqrt(static_cast<double>(d)) / dd);
  }
  return {"dyadic_distance_bound", worst <= kSlack, worst, kSlack, "-", std::to_string(n) + " point pairs"};
}

CheckRow stopping_refined_bound(const SuiteOptions& o) {
  const Lattice lat = make_lattice(1, o.depth);
  std::size_t violations = 0, selected = 0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(derive_seed(derive_seed(o.seed, 108), static_cast<std::uint64_t>(i)));
    const Weight w = random_test_weight(lat, rng.bits());
    const GridFunction f = random_test_function(lat, rng.bits(), lat.depth);
    for (int k = -2; k <= 3; ++k) {
      const StoppingFamily fam = stopping_cubes(f, w, 1.5, k);
      violations += fam.refined_violations.size();
      selected += fam.cubes.size();
    }
  }
  return {"stopping_refined_bound", violations == 0, static_cast<double>(violations), 0.0, "-",
          std::to_string(selected) + " stopping cubes checked"};
}

CheckRow strong_rd_chain(const SuiteOptions& o) {
  const Lattice lat = make_lattice(1, std::min(o.depth, 9));
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double beta = 0.55 + 0.05 * i;
    const Weight w = gen_weight(lat, WeightSpec::strong_rd(beta, derive_seed(o.seed, 109 + i)));
    const DoublingReport strong = doubling_report(w, DoublingMode::strong);
    const DoublingReport dbl = doubling_report(w, DoublingMode::rectangle);
    if (!strong.strong_beta) return {"strong_rd_chain", false, 1.0, 0.0, "generator", "strong beta ABSENT"};
    const double c = strong_rd_doubling_bound(*strong.strong_beta).C;
    worst = std::max(worst, *dbl.doubling_constant / c);
  }
  return {"strong_rd_chain", worst <= kSlack, worst, kSlack, "-",
          "measured doubling / bound at the measured beta"};
}

}  // namespace

Weight random_test_weight(const Lattice& lat, std::uint64_t seed, int base_depth) {
  Rng rng(seed);
  const double roughness = rng.uniform(0.2, 1.2);
  const int base = base_depth >= 0 ? std::min(base_depth, lat.depth)
                                   : static_cast<int>(rng.below(static_cast<std::uint64_t>(lat.depth + 1)));
  const bool cut = rng.below(5) == 0;
  WeightSpec spec = WeightSpec::lognormal(rng.bits(), roughness, base);
  if (cut) spec = WeightSpec::halfspace_cutoff(spec);
  return gen_weight(lat, spec);
}

GridFunction random_test_function(const Lattice& lat, std::uint64_t seed, int base_depth) {
  Rng rng(seed);
  const Lattice coarse = make_lattice(lat.dim, std::min(base_depth, lat.depth));
  std::vector<double> v(static_cast<std::size_t>(coarse.cell_count()));
  for (auto& x : v) x = std::exp(0.8 * rng.normal());
  return refine(GridFunction(coarse, std::move(v)), lat.depth);
}

std::vector<Check> criteria_checks() {
  return {
      {"bump_subadditivity", bump_subadditivity},
      {"iterated_bump_identity", iterated_bump_identity},
      {"automatic_carleson", automatic_carleson_check},
      {"embedding_depth_stability", embedding_depth_stability},
      {"sandwich", sandwich_check},
      {"surrogate_window", surrogate_window_check},
      {"bad_probability_decay", bad_probability_decay},
      {"good_carleson", good_carleson_check},
      {"norm_sandwich", norm_sandwich},
      {"halfspace_and_strong_rd", halfspace_and_strong_rd},
  };
}

std::vector<Check> property_checks() {
  return {
      {"prefix_vs_naive", prefix_vs_naive},
      {"theta_monotonicity", theta_monotonicity},
      {"witness_reevaluation", witness_reevaluation},
      {"goodbad_identity", goodbad_identity},
      {"norm_trace_monotone", norm_trace_monotone},
      {"grid_structure", grid_structure},
      {"dyadic_distance_bound", dyadic_distance_bound},
      {"stopping_refined_bound", stopping_refined_bound},
      {"strong_rd_chain", strong_rd_chain},
  };
}

std::vector<CheckRow> run_checks(const std::vector<Check>& checks, const SuiteOptions& opts) {
  std::vector<CheckRow> rows;
  for (const Check& c : checks) {
    try {
      rows.push_back(c.run(opts));
    } catch (const std::exception& e) {
      rows.push_back(CheckRow{c.name, false, 0.0, 0.0, "-", std::string("error: ") + e.what()});
    }
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
  os << "check,pass,measured,bound,witness,detail\n";
  for (const auto& r : rows) {
    os << csv_field(r.name) << ',' << (r.pass ? "pass" : "fail") << ',' << fmt(r.measured) << ','
       << fmt(r.bound) << ',' << csv_field(r.witness) << ',' << csv_field(r.detail) << '\n';
  }
}

void write_rows_json(std::ostream& os, const std::vector<CheckRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["check"] = r.name;
    j["pass"] = r.pass;
    j["measured"] = std::isfinite(r.measured) ? nlohmann::ordered_json(r.measured) : nlohmann::ordered_json("inf");
    j["bound"] = std::isfinite(r.bound) ? nlohmann::ordered_json(r.bound) : nlohmann::ordered_json("inf");
    j["witness"] = r.witness;
    j["detail"] = r.detail;
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

}  // namespace dyadlab
