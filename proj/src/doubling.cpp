#include "dyadlab/doubling.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "dyadlab/error.hpp"

namespace dyadlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kScanLimit = 200'000'000;

struct Span {
  Index lo = 0;
  Index hi = 0;
};

void check_budget(long count, const char* what) {
  if (count > kScanLimit) {
    fail(ErrorKind::resource, std::string(what) + " scan would visit " + std::to_string(count) +
                                  " rectangles (limit " + std::to_string(kScanLimit) + ")");
  }
}

// Calls visit(box) for every element of the product of per-axis span lists.
void for_each_product(int dim, const std::vector<std::vector<Span>>& axes,
                      const std::function<void(const CellBox&)>& visit) {
  for (const auto& a : axes)
    if (a.empty()) return;
  std::array<std::size_t, kMaxDim> idx{};
  CellBox box{dim, {}, {}};
  while (true) {
    for (int k = 0; k < dim; ++k) {
      box.lo[k] = axes[k][idx[k]].lo;
      box.hi[k] = axes[k][idx[k]].hi;
    }
    visit(box);
    int k = dim - 1;
    while (k >= 0 && ++idx[k] == axes[k].size()) idx[k--] = 0;
    if (k < 0) return;
  }
}

long product_size(const std::vector<std::vector<Span>>& axes) {
  long n = 1;
  for (const auto& a : axes) {
    n *= static_cast<long>(a.size());
    if (n > kScanLimit) return kScanLimit + 1;
  }
  return n;
}

RatioWitness make_witness(const Lattice& lat, const CellBox& outer, const CellBox& inner,
                          double ratio) {
  RatioWitness w;
  w.outer = outer.to_box(lat);
  w.inner = inner.to_box(lat);
  w.ratio = ratio;
  return w;
}

// Doubling ratio |outer| / |inner| with the 0/0 and x/0 conventions.
// Returns NaN for a skipped pair.
double doubling_ratio(double outer, double inner) {
  if (inner > 0.0) return outer / inner;
  return outer > 0.0 ? kInf : std::numeric_limits<double>::quiet_NaN();
}

CellBox shrink_cube(const CellBox& q, int first, int last, int s) {
  // Concentric shrink by 2^-s on axes [first, last); caller guarantees
  // the shrunken faces are cell boundaries.
  CellBox r = q;
  for (int k = first; k < last; ++k) {
    const Index side = q.hi[k] - q.lo[k];
    const Index inner = side >> s;
    const Index off = (side - inner) / 2;
    r.lo[k] = q.lo[k] + off;
    r.hi[k] = r.lo[k] + inner;
  }
  return r;
}

struct Fit {
  double intercept = 0.0;
  double slope_s = 0.0;
  double slope_t = 0.0;
};

// Least-squares fit of log2 ratio = a - e1 s (- e2 t).
Fit least_squares(const std::vector<ScaleMax>& pts, bool product) {
  Fit fit;
  std::vector<const ScaleMax*> use;
  for (const auto& p : pts)
    if (p.witness.ratio > 0.0) use.push_back(&p);
  if (use.empty()) return fit;
  if (!product) {
    if (use.size() == 1) {
      fit.slope_s = -std::log2(use[0]->witness.ratio) / use[0]->s;
      return fit;
    }
    double ms = 0.0, my = 0.0;
    for (auto* p : use) {
      ms += p->s;
      my += std::log2(p->witness.ratio);
    }
    ms /= use.size();
    my /= use.size();
    double sxx = 0.0, sxy = 0.0;
    for (auto* p : use) {
      sxx += (p->s - ms) * (p->s - ms);
      sxy += (p->s - ms) * (std::log2(p->witness.ratio) - my);
    }
    fit.slope_s = -sxy / sxx;
    fit.intercept = my + fit.slope_s * ms;
    return fit;
  }
  // Normal equations for (a, e1, e2), solved by Cramer's rule.
  double n = 0, ss = 0, st = 0, sss = 0, stt = 0, sst = 0, y = 0, ys = 0, yt = 0;
  for (auto* p : use) {
    const double l = std::log2(p->witness.ratio);
    n += 1;
    ss += p->s;
    st += p->t;
    sss += p->s * p->s;
    stt += p->t * p->t;
    sst += p->s * p->t;
    y += l;
    ys += l * p->s;
    yt += l * p->t;
  }
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h,
                 double i) { return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g); };
  const double D = det3(n, ss, st, ss, sss, sst, st, sst, stt);
  if (std::abs(D) < 1e-12) return fit;
  const double a = det3(y, ss, st, ys, sss, sst, yt, sst, stt) / D;
  const double b = det3(n, y, st, ss, ys, sst, st, yt, stt) / D;
  const double c = det3(n, ss, y, ss, sss, ys, st, sst, yt) / D;
  fit.intercept = a;
  fit.slope_s = -b;
  fit.slope_t = -c;
  return fit;
}

ReverseDoublingFit finish_fit(std::vector<ScaleMax> per_scale, bool product) {
  ReverseDoublingFit out;
  out.product = product;
  const Fit fit = least_squares(per_scale, product);
  out.eps1 = fit.slope_s;
  out.eps2 = product ? fit.slope_t : 0.0;
  out.C = 0.0;
  for (const auto& p : per_scale) {
    const double c = p.witness.ratio * std::exp2(out.eps1 * p.s + out.eps2 * p.t);
    if (c > out.C) {
      out.C = c;
      out.constant_witness = p.witness;
    }
  }
  out.per_scale = std::move(per_scale);
  return out;
}

// Dyadic cubes (over axes [first, last)) of every level with at least one
// admissible shrink.
std::vector<Span> dyadic_spans(const Lattice& lat, int level) {
  std::vector<Span> spans;
  const Index side = Index{1} << (lat.depth - level);
  for (Index k = 0; k < (Index{1} << level); ++k) spans.push_back({k * side, (k + 1) * side});
  return spans;
}

void scan_cube_doubling(const Weight& w, DoublingReport& rep) {
  const Lattice& lat = w.lattice();
  const MassTable& t = w.table();
  double best = -1.0;
  for (int level = 1; level < lat.depth; ++level) {
    const Index side = Index{1} << (lat.depth - level);
    std::vector<Span> spans;
    // 2Q stays in the box only for cubes off the boundary.
    for (Index k = 1; k + 1 < (Index{1} << level); ++k) spans.push_back({k * side, (k + 1) * side});
    std::vector<std::vector<Span>> axes(lat.dim, spans);
    for_each_product(lat.dim, axes, [&](const CellBox& q) {
      CellBox dq = q;
      for (int k = 0; k < lat.dim; ++k) {
        dq.lo[k] -= side / 2;
        dq.hi[k] += side / 2;
      }
      ++rep.scanned;
      const double r = doubling_ratio(t.sum(dq), t.sum(q));
      if (std::isnan(r)) return;
      if (r > best) {
        best = r;
        rep.doubling_witness = make_witness(lat, dq, q, r);
      }
    });
  }
  if (best >= 0.0) rep.doubling_constant = best;
}

void scan_cube_reverse(const Weight& w, DoublingReport& rep) {
  const Lattice& lat = w.lattice();
  const MassTable& t = w.table();
  std::map<int, ScaleMax> by_s;
  for (int level = 0; level + 1 < lat.depth; ++level) {
    std::vector<std::vector<Span>> axes(lat.dim, dyadic_spans(lat, level));
    for_each_product(lat.dim, axes, [&](const CellBox& q) {
      const double whole = t.sum(q);
      if (whole <= 0.0) return;
      for (int s = 1; level + s + 1 <= lat.depth; ++s) {
        const CellBox inner = shrink_cube(q, 0, lat.dim, s);
        ++rep.scanned;
        const double r = t.sum(inner) / whole;
        auto [it, fresh] = by_s.try_emplace(s);
        if (fresh || r > it->second.witness.ratio) {
          it->second.s = s;
          it->second.witness = make_witness(lat, q, inner, r);
          it->second.witness.s = s;
        }
      }
    });
  }
  std::vector<ScaleMax> pts;
  for (auto& [s, m] : by_s) pts.push_back(m);
  rep.reverse = finish_fit(std::move(pts), false);
}

std::vector<Span> even_doubling_spans(Index n) {
  std::vector<Span> spans;
  for (Index len = 2; 2 * len <= n; len += 2)
    for (Index lo = len / 2; lo + len + len / 2 <= n; ++lo) spans.push_back({lo, lo + len});
  return spans;
}

void scan_rectangle_doubling(const Weight& w, DoublingReport& rep) {
  const Lattice& lat = w.lattice();
  const MassTable& t = w.table();
  std::vector<std::vector<Span>> axes(lat.dim, even_doubling_spans(lat.cells_per_axis()));
  check_budget(product_size(axes), "rectangle doubling");
  double best = -1.0;
  for_each_product(lat.dim, axes, [&](const CellBox& r) {
    CellBox dr = r;
    for (int k = 0; k < lat.dim; ++k) {
      const Index h = (r.hi[k] - r.lo[k]) / 2;
      dr.lo[k] -= h;
      dr.hi[k] += h;
    }
    ++rep.scanned;
    const double v = doubling_ratio(t.sum(dr), t.sum(r));
    if (std::isnan(v)) return;
    if (v > best) {
      best = v;
      rep.doubling_witness = make_witness(lat, dr, r, v);
    }
  });
  if (best >= 0.0) rep.doubling_constant = best;
}

void scan_product_reverse(const Weight& w, int split, DoublingReport& rep) {
  const Lattice& lat = w.lattice();
  const MassTable& t = w.table();
  std::map<std::pair<int, int>, ScaleMax> by_st;
  for (int l1 = 0; l1 < lat.depth; ++l1) {
    for (int l2 = 0; l2 < lat.depth; ++l2) {
      std::vector<std::vector<Span>> axes;
      for (int k = 0; k < lat.dim; ++k) axes.push_back(dyadic_spans(lat, k < split ? l1 : l2));
      for_each_product(lat.dim, axes, [&](const CellBox& r) {
        const double whole = t.sum(r);
        if (whole <= 0.0) return;
        for (int s = 0; l1 + s + 1 <= lat.depth; ++s) {
          const CellBox rs = shrink_cube(r, 0, split, s);
          for (int u = 0; l2 + u + 1 <= lat.depth; ++u) {
            if (s == 0 && u == 0) continue;
            const CellBox inner = shrink_cube(rs, split, lat.dim, u);
            ++rep.scanned;
            const double v = t.sum(inner) / whole;
            auto [it, fresh] = by_st.try_emplace({s, u});
            if (fresh || v > it->second.witness.ratio) {
              it->second.s = s;
              it->second.t = u;
              it->second.witness = make_witness(lat, r, inner, v);
              it->second.witness.s = s;
              it->second.witness.t = u;
            }
          }
        }
      });
    }
  }
  std::vector<ScaleMax> pts;
  for (auto& [st, m] : by_st) pts.push_back(m);
  rep.reverse = finish_fit(std::move(pts), true);
}

void scan_strong(const Weight& w, DoublingReport& rep) {
  const Lattice& lat = w.lattice();
  const MassTable& t = w.table();
  const Index n = lat.cells_per_axis();
  std::vector<Span> all, even;
  for (Index lo = 0; lo < n; ++lo)
    for (Index hi = lo + 1; hi <= n; ++hi) {
      all.push_back({lo, hi});
      if ((hi - lo) % 2 == 0) even.push_back({lo, hi});
    }
  double best = 0.0;
  bool any = false;
  for (int axis = 0; axis < lat.dim; ++axis) {
    std::vector<std::vector<Span>> axes(lat.dim, all);
    axes[axis] = even;
    check_budget(product_size(axes), "strong reverse doubling");
    for_each_product(lat.dim, axes, [&](const CellBox& r) {
      const double whole = t.sum(r);
      ++rep.scanned;
      if (whole <= 0.0) return;
      CellBox lower = r, upper = r;
      const Index mid = (r.lo[axis] + r.hi[axis]) / 2;
      lower.hi[axis] = mid;
      upper.lo[axis] = mid;
      for (const CellBox* half : {&lower, &upper}) {
        const double v = t.sum(*half) / whole;
        if (!any || v > best) {
          any = true;
          best = v;
          rep.strong_witness = make_witness(lat, r, *half, v);
          rep.strong_witness.axis = axis;
        }
      }
    });
  }
  if (any && best < 1.0) rep.strong_beta = best;
}

}  // namespace

bool ReverseDoublingFit::holds() const {
  if (!(C > 0.0) || !std::isfinite(C)) return false;
  return eps1 > 0.0 && (!product || eps2 > 0.0);
}

double ReverseDoublingFit::bound(int s, int t) const {
  return C * std::exp2(-eps1 * s - (product ? eps2 * t : 0.0));
}

bool DoublingReport::doubling_infinite() const {
  return doubling_constant && std::isinf(*doubling_constant);
}

DoublingReport doubling_report(const Weight& w, DoublingMode mode, int first_dims) {
  const Lattice& lat = w.lattice();
  if (lat.depth < 2) fail(ErrorKind::domain, "doubling scans need lattice depth >= 2");
  DoublingReport rep;
  rep.mode = mode;
  switch (mode) {
    case DoublingMode::cube:
      scan_cube_doubling(w, rep);
      scan_cube_reverse(w, rep);
      break;
    case DoublingMode::rectangle:
      scan_rectangle_doubling(w, rep);
      break;
    case DoublingMode::product_reverse: {
      int split = first_dims == 0 ? lat.dim / 2 : first_dims;
      if (split < 0 || split > lat.dim) fail(ErrorKind::domain, "product split outside [0, dim]");
      if (lat.dim == 1 || split == 0 || split == lat.dim) {
        scan_cube_reverse(w, rep);
      } else {
        scan_product_reverse(w, split, rep);
      }
      break;
    }
    case DoublingMode::strong:
      scan_strong(w, rep);
      break;
  }
  return rep;
}

double reevaluate(const Weight& w, const RatioWitness& witness) {
  const double outer = w.integrate(witness.outer);
  const double inner = w.integrate(witness.inner);
  const bool doubling = witness.s == 0 && witness.t == 0 && witness.axis < 0;
  if (doubling) return doubling_ratio(outer, inner);
  return inner / outer;
}

StrongRdBound strong_rd_doubling_bound(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    fail(ErrorKind::domain, "strong reverse doubling needs 0 < beta < 1");
  }
  StrongRdBound b;
  b.N = 2;
  while (std::pow(beta, b.N) >= 0.25) ++b.N;
  const double half = std::ldexp(1.0, b.N - 1);
  b.gamma = half / (half - 1.0);
  // log is only a first guess; pow decides.
  b.M = std::max(1, static_cast<int>(std::floor(std::log(2.0) / std::log(b.gamma))) - 1);
  while (std::pow(b.gamma, b.M) < 2.0) ++b.M;
  while (b.M > 1 && std::pow(b.gamma, b.M - 1) >= 2.0) --b.M;
  b.C = std::ldexp(1.0, b.M);
  return b;
}

const char* to_string(DoublingMode mode) {
  switch (mode) {
    case DoublingMode::cube: return "cube";
    case DoublingMode::rectangle: return "rectangle";
    case DoublingMode::product_reverse: return "product_reverse";
    case DoublingMode::strong: return "strong";
  }
  return "?";
}

DoublingMode parse_doubling_mode(const std::string& text) {
  if (text == "cube") return DoublingMode::cube;
  if (text == "rectangle") return DoublingMode::rectangle;
  if (text == "product_reverse" || text == "product-reverse") return DoublingMode::product_reverse;
  if (text == "strong") return DoublingMode::strong;
  fail(ErrorKind::domain, "unknown doubling mode '" + text + "'");
}

}  // namespace dyadlab
