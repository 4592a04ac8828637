#include "dyadlab/forms.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

#include "dyadlab/error.hpp"
#include "dyadlab/random.hpp"

namespace dyadlab {

namespace {

void check_pair(const Weight& sigma, const Weight& omega, const GridFunction& f,
                const GridFunction& g) {
  if (!(sigma.lattice() == omega.lattice()) || !(f.lattice() == sigma.lattice()) ||
      !(g.lattice() == sigma.lattice())) {
    fail(ErrorKind::shape, "weights and functions must share one lattice");
  }
}

double rect_term(const KernelHandle& K, const MassTable& fs, const MassTable& go, const Rect& R) {
  const Box b = R.box();
  const double a = fs.sum_clipped(b);
  if (a <= 0.0) return 0.0;
  const double c = go.sum_clipped(b);
  if (c <= 0.0) return 0.0;
  return K(R.I, R.J) * a * c;
}

}  // namespace

FormValue bilinear_form(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                        const GridFunction& f, const GridFunction& g,
                        const std::vector<Rect>& family) {
  check_pair(sigma, omega, f, g);
  const Weight fs = times(f, sigma);
  const Weight go = times(g, omega);
  long double acc = 0.0L;
  for (const Rect& R : family) acc += rect_term(K, fs.table(), go.table(), R);
  FormValue v;
  v.total = static_cast<double>(acc);
  v.family_size = static_cast<long>(family.size());
  return v;
}

FormValue goodbad_split(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                        const GridFunction& f, const GridFunction& g,
                        const GoodnessParams& goodness, const RectFamily& family) {
  check_pair(sigma, omega, f, g);
  validate(goodness);
  const Weight fs = times(f, sigma);
  const Weight go = times(g, omega);
  long double total = 0.0L, gg = 0.0L, xb = 0.0L, bx = 0.0L, bb = 0.0L;
  const auto rects = family.enumerate();
  for (const Rect& R : rects) {
    const auto& [gi, gj] = family.pairs[static_cast<std::size_t>(R.pair)];
    const bool good_i = classify_good(R.ci, goodness, gi);
    const bool good_j = family.n == 0 || classify_good(R.cj, goodness, gj);
    const long double t = rect_term(K, fs.table(), go.table(), R);
    total += t;
    if (good_i && good_j) gg += t;
    if (!good_j) xb += t;
    if (!good_i) bx += t;
    if (!good_i && !good_j) bb += t;
  }
  FormValue v;
  v.total = static_cast<double>(total);
  v.family_size = static_cast<long>(rects.size());
  v.parts = FormParts{static_cast<double>(gg), static_cast<double>(xb), static_cast<double>(bx),
                      static_cast<double>(bb)};
  return v;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

double euclid(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

void require_product_frac(const KernelHandle& K) {
  if (!K.is_product_frac()) fail(ErrorKind::domain, "this operation needs a product_frac kernel");
}

double surrogate_factor(const Point& x, const Point& u, int dim, double exponent, int depth) {
  double s = 0.0;
  for (const DyadicGrid& grid : onethird_grids(dim, 0, depth)) {
    for (int level = 0; level <= depth; ++level) {
      if (grid.locate(x, level) == grid.locate(u, level)) {
        s += std::exp2(-static_cast<double>(dim) * level * exponent);
      }
    }
  }
  return s;
}

}  // namespace

double continuum_kernel(const Point& x, const Point& y, const Point& u, const Point& v,
                        const KernelHandle& K) {
  require_product_frac(K);
  return std::pow(euclid(x, u, K.m()), K.alpha() / K.m() - 1.0) *
         std::pow(euclid(y, v, K.n()), K.beta() / K.n() - 1.0);
}

double surrogate_kernel(const Point& x, const Point& y, const Point& u, const Point& v,
                        const KernelHandle& K, int depth) {
  require_product_frac(K);
  if (depth < 0) fail(ErrorKind::domain, "surrogate depth must be >= 0");
  const Lattice lm = make_lattice(K.m(), depth);
  const Lattice ln = make_lattice(K.n(), depth);
  if (lm.cell_of(x) == lm.cell_of(u) || ln.cell_of(y) == ln.cell_of(v)) {
    fail(ErrorKind::precondition, "surrogate kernel points share a finest cell");
  }
  return surrogate_factor(x, u, K.m(), K.alpha() / K.m() - 1.0, depth) *
         surrogate_factor(y, v, K.n(), K.beta() / K.n() - 1.0, depth);
}

// ---------------------------------------------------------------------------
// Fractional integral

double cell_average_power(double a, int m, double h) {
  if (!(a > -m)) fail(ErrorKind::domain, "|z|^a is not locally integrable for a <= -m");
  // Split the cube into 2m pyramids over its faces; on the face x_1 = h/2,
  // z = s (1, v) with s in (0, h/2], v in [-1, 1]^(m-1).
  using GL = boost::math::quadrature::gauss<double, 30>;
  double angular = 1.0;
  if (m == 2) {
    angular = GL::integrate([a](double v) { return std::pow(1.0 + v * v, 0.5 * a); }, -1.0, 1.0);
  } else if (m == 3) {
    angular = GL::integrate(
        [a](double v) {
          return GL::integrate([a, v](double w) { return std::pow(1.0 + v * v + w * w, 0.5 * a); },
                               -1.0, 1.0);
        },
        -1.0, 1.0);
  } else if (m != 1) {
    fail(ErrorKind::domain, "cell averages are implemented for m <= 3");
  }
  const double radial = std::pow(0.5 * h, a + m) / (a + m);
  return 2.0 * m * radial * angular / std::pow(h, m);
}

namespace {

// Kernel matrix between the cells of one factor lattice.
std::vector<double> factor_matrix(const Lattice& lat, double a) {
  const auto n = static_cast<std::size_t>(lat.cell_count());
  const double h = lat.cell_side();
  const double diag = cell_average_power(a, lat.dim, h);
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Coords ci = lat.unflat(static_cast<Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        k[i * n + j] = diag;
        continue;
      }
      const Coords cj = lat.unflat(static_cast<Index>(j));
      double d2 = 0.0;
      for (int t = 0; t < lat.dim; ++t) {
        const double d = static_cast<double>(ci[t] - cj[t]) * h;
        d2 += d * d;
      }
      k[i * n + j] = std::pow(std::sqrt(d2), a);
    }
  }
  return k;
}

}  // namespace

GridFunction apply_frac_integral(const GridFunction& f, double alpha, double beta, int m, int n) {
  const Lattice& lat = f.lattice();
  if (m < 1 || n < 1 || lat.dim != m + n) {
    fail(ErrorKind::shape, "fractional integral needs a lattice of dimension m + n");
  }
  if (!(alpha > 0.0 && alpha < m)) fail(ErrorKind::domain, "fractional integral needs 0 < alpha < m");
  if (!(beta > 0.0 && beta < n)) fail(ErrorKind::domain, "fractional integral needs 0 < beta < n");
  const Lattice first = make_lattice(m, lat.depth);
  const Lattice second = make_lattice(n, lat.depth);
  const auto n1 = static_cast<std::size_t>(first.cell_count());
  const auto n2 = static_cast<std::size_t>(second.cell_count());
  const auto k1 = factor_matrix(first, alpha / m - 1.0);
  const auto k2 = factor_matrix(second, beta / n - 1.0);
  const double v1 = first.cell_volume();
  const double v2 = second.cell_volume();
  const auto src = f.values();

  std::vector<double> half(n1 * n2, 0.0);
  for (std::size_t x = 0; x < n1; ++x) {
    for (std::size_t yo = 0; yo < n2; ++yo) {
      long double acc = 0.0L;
      for (std::size_t y = 0; y < n2; ++y) acc += k2[yo * n2 + y] * src[x * n2 + y];
      half[x * n2 + yo] = static_cast<double>(acc) * v2;
    }
  }
  std::vector<double> out(n1 * n2, 0.0);
  for (std::size_t xo = 0; xo < n1; ++xo) {
    for (std::size_t x = 0; x < n1; ++x) {
      const double k = k1[xo * n1 + x] * v1;
      if (k == 0.0) continue;
      for (std::size_t y = 0; y < n2; ++y) out[xo * n2 + y] += k * half[x * n2 + y];
    }
  }
  return GridFunction(lat, std::move(out));
}

// ---------------------------------------------------------------------------
// Norm estimation

namespace {

struct Prepared {
  Lattice lat;
  std::vector<CellBox> boxes;
  std::vector<double> k;
  std::array<Index, kMaxDim> stride{};
  Index nodes = 0;
};

Prepared prepare(const KernelHandle& K, const Lattice& lat, const std::vector<Rect>& family) {
  Prepared p{lat, {}, {}, {}, 0};
  p.boxes.reserve(family.size());
  for (const Rect& R : family) {
    p.boxes.push_back(align(lat, R.box()));
    p.k.push_back(K(R.I, R.J));
  }
  Index total = 1;
  for (int a = lat.dim - 1; a >= 0; --a) {
    p.stride[a] = total;
    total *= lat.cells_per_axis() + 1;
  }
  p.nodes = total;
  return p;
}

// sum_R coeff_R 1_R evaluated on every cell, via a difference array.
std::vector<double> accumulate(const Prepared& p, const std::vector<double>& coeff) {
  const Lattice& lat = p.lat;
  const int d = lat.dim;
  const Index side = lat.cells_per_axis() + 1;
  std::vector<long double> diff(static_cast<std::size_t>(p.nodes), 0.0L);
  for (std::size_t i = 0; i < p.boxes.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    const CellBox& b = p.boxes[i];
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Index node = 0;
      int highs = 0;
      for (int a = 0; a < d; ++a) {
        if (mask & (1u << a)) {
          node += b.hi[a] * p.stride[a];
          ++highs;
        } else {
          node += b.lo[a] * p.stride[a];
        }
      }
      diff[static_cast<std::size_t>(node)] += (highs % 2 == 0) ? coeff[i] : -coeff[i];
    }
  }
  for (int a = 0; a < d; ++a) {
    const Index s = p.stride[a];
    for (Index node = 0; node < p.nodes; ++node) {
      if ((node / s) % side > 0) diff[static_cast<std::size_t>(node)] += diff[static_cast<std::size_t>(node - s)];
    }
  }
  std::vector<double> out(static_cast<std::size_t>(lat.cell_count()));
  for (Index i = 0; i < lat.cell_count(); ++i) {
    const Coords c = lat.unflat(i);
    Index node = 0;
    for (int a = 0; a < d; ++a) node += c[a] * p.stride[a];
    out[static_cast<std::size_t>(i)] = std::max(0.0, static_cast<double>(diff[static_cast<std::size_t>(node)]));
  }
  return out;
}

std::vector<double> product_values(const std::vector<double>& f, std::span<const double> w) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = f[i] * w[i];
  return v;
}

std::vector<double> masses(const Prepared& p, const std::vector<double>& f, std::span<const double> w) {
  const MassTable t(p.lat, product_values(f, w));
  std::vector<double> m(p.boxes.size());
  for (std::size_t i = 0; i < p.boxes.size(); ++i) m[i] = t.sum(p.boxes[i]);
  return m;
}

double norm(const std::vector<double>& f, std::span<const double> w, double p, double vol) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.0 && w[i] > 0.0) acc += std::pow(static_cast<long double>(f[i]), p) * w[i];
  }
  return std::pow(static_cast<double>(acc) * vol, 1.0 / p);
}

// Maximizer over ||h||_{L^t(w)} = 1 of int T h dw: h = v^(t'-1) normalized.
bool best_response(std::vector<double>& h, const std::vector<double>& v, std::span<const double> w,
                   double t, double vol) {
  const double e = 1.0 / (t - 1.0);  // t' - 1
  for (std::size_t i = 0; i < v.size(); ++i) h[i] = v[i] > 0.0 ? std::pow(v[i], e) : 0.0;
  const double nrm = norm(h, w, t, vol);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) return false;
  for (auto& x : h) x /= nrm;
  return true;
}

}  // namespace

NormEstimate norm_estimate(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                           const Exponents& exps, const std::vector<Rect>& family,
                           const NormOptions& opts) {
  exps.validate();
  if (!(sigma.lattice() == omega.lattice())) fail(ErrorKind::shape, "sigma and omega lattices differ");
  if (family.empty()) fail(ErrorKind::domain, "norm estimate over an empty family");
  if (opts.iterations < 1) fail(ErrorKind::domain, "norm estimate needs at least one iteration");
  const Lattice& lat = sigma.lattice();
  const Prepared prep = prepare(K, lat, family);
  const auto su = sigma.density();
  const auto wu = omega.density();
  const double vol = lat.cell_volume();
  const double p = exps.p;
  const double qp = exps.q_prime();
  const auto cells = static_cast<std::size_t>(lat.cell_count());

  auto form = [&](const std::vector<double>& f, const std::vector<double>& g) {
    const auto a = masses(prep, f, su);
    const auto b = masses(prep, g, wu);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) acc += prep.k[i] * a[i] * b[i];
    const double nf = norm(f, su, p, vol);
    const double ng = norm(g, wu, qp, vol);
    if (!(nf > 0.0) || !(ng > 0.0)) return 0.0;
    return static_cast<double>(acc) / (nf * ng);
  };
  auto T = [&](const std::vector<double>& f, std::span<const double> w) {
    auto m = masses(prep, f, w);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] *= prep.k[i];
    return accumulate(prep, m);
  };

  NormEstimate est;
  auto run = [&](int start, std::uint64_t seed, std::vector<double> f, std::optional<std::vector<double>> g0) {
    std::vector<double> g(cells, 0.0);
    if (g0) {
      g = std::move(*g0);
    } else if (!best_response(g, T(f, su), wu, exps.q_prime(), vol)) {
      return;
    }
    double obj = form(f, g);
    est.trace.push_back({start, 0, obj, seed});
    auto keep = [&](double value) {
      if (value > est.lower_bound || !est.best_f) {
        est.lower_bound = value;
        est.best_f = GridFunction(lat, f);
        est.best_g = GridFunction(lat, g);
      }
    };
    keep(obj);
    for (int it = 1; it <= opts.iterations; ++it) {
      std::vector<double> nf(cells), ng(cells);
      if (!best_response(nf, T(g, wu), su, p, vol)) break;
      if (!best_response(ng, T(nf, su), wu, qp, vol)) break;
      const double next = form(nf, ng);
      if (next < obj) break;  // rounding only; keep the certified iterate
      f = std::move(nf);
      g = std::move(ng);
      est.trace.push_back({start, it, next, seed});
      keep(next);
      const bool stalled = next <= obj * (1.0 + opts.tolerance);
      obj = next;
      if (stalled) break;
    }
  };

  int start = 0;
  // Indicator starts, ranked by the single-rectangle lower bound.
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> proxy(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double s = sigma.table().sum(prep.boxes[i]);
    const double o = omega.table().sum(prep.boxes[i]);
    proxy[i] = (s > 0.0 && o > 0.0) ? prep.k[i] * std::pow(s, 1.0 / exps.p_prime()) * std::pow(o, 1.0 / exps.q) : 0.0;
  }
  const auto top = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, opts.indicator_starts)), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return proxy[a] > proxy[b] || (proxy[a] == proxy[b] && a < b); });
  for (std::size_t t = 0; t < top; ++t) {
    if (proxy[order[t]] <= 0.0) break;
    const CellBox& b = prep.boxes[order[t]];
    std::vector<double> ind(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      const Coords c = lat.unflat(static_cast<Index>(i));
      bool inside = true;
      for (int a = 0; a < lat.dim; ++a) inside = inside && c[a] >= b.lo[a] && c[a] < b.hi[a];
      ind[i] = inside ? 1.0 : 0.0;
    }
    std::vector<double> f = ind, g = ind;
    const double nf = norm(f, su, p, vol), ng = norm(g, wu, qp, vol);
    for (auto& x : f) x /= nf;
    for (auto& x : g) x /= ng;
    run(start++, 0, std::move(f), std::move(g));
  }
  for (int r = 0; r < opts.random_starts; ++r) {
    const std::uint64_t seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
    Rng rng(seed);
    std::vector<double> f(cells);
    for (auto& x : f) x = rng.uniform(0.05, 1.0);
    const double nf = norm(f, su, p, vol);
    if (!(nf > 0.0)) continue;
    for (auto& x : f) x /= nf;
    run(start++, seed, std::move(f), std::nullopt);
  }
  return est;
}

}  // namespace dyadlab
