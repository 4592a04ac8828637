#include "dyadlab/embed.hpp"

#include <cmath>
#include <functional>

#include "dyadlab/bump.hpp"
#include "dyadlab/error.hpp"

namespace dyadlab {

namespace {

double bump_of(double volume, double power_integral, double theta) {
  if (theta == 1.0) return power_integral;
  if (power_integral <= 0.0) return 0.0;
  return std::pow(volume, 1.0 - 1.0 / theta) * std::pow(power_integral, 1.0 / theta);
}

CellBox dyadic_cell_box(const Lattice& lat, int level, const Coords& index) {
  CellBox c{lat.dim, {}, {}};
  const int shift = lat.depth - level;
  for (int k = 0; k < lat.dim; ++k) {
    c.lo[k] = index[k] << shift;
    c.hi[k] = (index[k] + 1) << shift;
  }
  return c;
}

double cube_volume(const Lattice& lat, int level) { return std::ldexp(1.0, -lat.dim * level); }

// Calls visit(level, index, cellbox) for every dyadic cube, coarse to fine.
void for_each_dyadic(const Lattice& lat,
                     const std::function<void(int, const Coords&, const CellBox&)>& visit) {
  for (int level = 0; level <= lat.depth; ++level) {
    const Lattice idx = make_lattice(lat.dim, level);
    for (Index i = 0; i < idx.cell_count(); ++i) {
      const Coords c = idx.unflat(i);
      visit(level, c, dyadic_cell_box(lat, level, c));
    }
  }
}

void check_embed_exponents(double theta, double r, double s) {
  if (!(theta > 1.0) || !std::isfinite(theta)) {
    fail(ErrorKind::domain, "the embedding needs theta > 1");
  }
  if (!(s > 1.0 && r > s && std::isfinite(r))) {
    fail(ErrorKind::domain, "the embedding needs 1 < s < r < inf");
  }
}

// Per-parent sums of term(Q) over dyadic Q inside P, bottom-up, then the
// worst ratio sum / rhs(P).
CarlesonReport worst_parent(const Lattice& lat, const std::function<double(int, const CellBox&, const Coords&)>& term,
                            const std::function<double(const CellBox&)>& rhs, double constant) {
  const int L = lat.depth;
  const int d = lat.dim;
  std::vector<std::vector<long double>> sums(static_cast<std::size_t>(L + 1));
  for (int level = L; level >= 0; --level) {
    const Lattice idx = make_lattice(d, level);
    auto& cur = sums[level];
    cur.assign(static_cast<std::size_t>(idx.cell_count()), 0.0L);
    for (Index i = 0; i < idx.cell_count(); ++i) {
      const Coords c = idx.unflat(i);
      long double acc = term(level, dyadic_cell_box(lat, level, c), c);
      if (level < L) {
        const Lattice child = make_lattice(d, level + 1);
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
          Coords cc{};
          for (int k = 0; k < d; ++k) cc[k] = 2 * c[k] + ((mask >> k) & 1u);
          acc += sums[level + 1][child.flat(cc)];
        }
      }
      cur[i] = acc;
    }
  }
  CarlesonReport rep;
  rep.explicit_constant = constant;
  bool any = false;
  for (int level = 0; level <= L; ++level) {
    const Lattice idx = make_lattice(d, level);
    for (Index i = 0; i < idx.cell_count(); ++i) {
      const Coords c = idx.unflat(i);
      const CellBox P = dyadic_cell_box(lat, level, c);
      const double lhs = static_cast<double>(sums[level][i]);
      const double bound = rhs(P);
      ++rep.parents;
      double ratio;
      if (bound > 0.0) {
        ratio = lhs / bound;
      } else if (lhs > 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        continue;
      }
      if (!any || ratio > rep.ratio) {
        any = true;
        rep.ratio = ratio;
        rep.lhs_sum = lhs;
        rep.rhs_bound = bound;
        rep.witness = P.to_box(lat);
      }
    }
  }
  if (!any) rep.witness = unit_box(d);
  return rep;
}

// Aligns P and finds its dyadic level.
void sub_lattice_check(const Lattice& lat, const Box& P, CellBox& cp, int& level) {
  cp = align(lat, P);
  const Index side = cp.hi[0] - cp.lo[0];
  level = -1;
  for (int l = 0; l <= lat.depth; ++l)
    if ((Index{1} << (lat.depth - l)) == side) level = l;
  for (int k = 0; k < lat.dim; ++k) {
    if (cp.hi[k] - cp.lo[k] != side || level < 0 || cp.lo[k] % side != 0) {
      fail(ErrorKind::alignment, "parent " + P.str() + " is not a dyadic cube of the lattice");
    }
  }
}

double sum_inside(const Lattice& lat, const CellBox& P, int plevel,
                  const std::function<double(int, const CellBox&, const Coords&)>& term) {
  long double acc = 0.0L;
  for (int level = plevel; level <= lat.depth; ++level) {
    const Index sub = Index{1} << (level - plevel);
    const Lattice idx = make_lattice(lat.dim, level - plevel);
    for (Index i = 0; i < idx.cell_count(); ++i) {
      Coords c = idx.unflat(i);
      for (int k = 0; k < lat.dim; ++k) c[k] += (P.lo[k] >> (lat.depth - plevel)) * sub;
      acc += term(level, dyadic_cell_box(lat, level, c), c);
    }
  }
  return static_cast<double>(acc);
}

}  // namespace

// ---------------------------------------------------------------------------
// Stopping cubes

StoppingFamily stopping_cubes(const GridFunction& f, const Weight& w, double theta, int k) {
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  if (!(theta >= 1.0)) fail(ErrorKind::domain, "stopping cubes need theta >= 1");
  const Lattice& lat = w.lattice();
  const Weight fw = times(f, w);
  const MassTable& mass = fw.table();
  const MassTable& pw = w.table(theta);
  const double threshold = std::ldexp(1.0, k);
  const double half = std::ldexp(1.0, k - 1);
  StoppingFamily out;
  out.k = k;

  std::function<void(int, const Coords&)> visit = [&](int level, const Coords& c) {
    const CellBox q = dyadic_cell_box(lat, level, c);
    const double b = bump_of(cube_volume(lat, level), pw.sum(q), theta);
    if (b <= 0.0) return;  // mu vanishes on q and on all its subcubes
    const double avg = mass.sum(q) / b;
    if (avg > threshold) {
      long double big = 0.0L;
      for (Index i = 0; i < lat.cell_count(); ++i) {
        const Coords x = lat.unflat(i);
        bool inside = true;
        for (int a = 0; a < lat.dim; ++a) inside = inside && x[a] >= q.lo[a] && x[a] < q.hi[a];
        if (inside && f.values()[i] > half) big += fw.density()[i];
      }
      const double refined = static_cast<double>(big) * lat.cell_volume() / b;
      if (!(refined > half)) out.refined_violations.push_back(out.cubes.size());
      out.cubes.push_back(GridCube{level, c});
      out.boxes.push_back(q.to_box(lat));
      out.averages.push_back(avg);
      return;
    }
    if (level == lat.depth) return;
    for (unsigned mask = 0; mask < (1u << lat.dim); ++mask) {
      Coords cc{};
      for (int a = 0; a < lat.dim; ++a) cc[a] = 2 * c[a] + ((mask >> a) & 1u);
      visit(level + 1, cc);
    }
  };
  visit(0, Coords{});
  return out;
}

// ---------------------------------------------------------------------------
// Carleson sums

namespace {

double automatic_constant(int d, double theta, double rho) {
  if (!(theta > 1.0) || !std::isfinite(theta)) fail(ErrorKind::domain, "automatic Carleson needs theta > 1");
  if (!(rho > 1.0) || !std::isfinite(rho)) fail(ErrorKind::domain, "Carleson sums need rho > 1");
  return 1.0 / (1.0 - std::exp2(-d * (rho - 1.0) * (1.0 - 1.0 / theta)));
}

}  // namespace

CarlesonReport automatic_carleson(const Box& P, const Weight& w, double theta, double rho) {
  const Lattice& lat = w.lattice();
  const double constant = automatic_constant(lat.dim, theta, rho);
  CellBox cp;
  int plevel = 0;
  sub_lattice_check(lat, P, cp, plevel);
  const MassTable& pw = w.table(theta);
  auto term = [&](int level, const CellBox& q, const Coords&) {
    return std::pow(bump_of(cube_volume(lat, level), pw.sum(q), theta), rho);
  };
  CarlesonReport rep;
  rep.explicit_constant = constant;
  rep.lhs_sum = sum_inside(lat, cp, plevel, term);
  rep.rhs_bound = constant * std::pow(bump_of(P.volume(), pw.sum(cp), theta), rho);
  rep.ratio = rep.rhs_bound > 0.0 ? rep.lhs_sum / rep.rhs_bound
                                  : (rep.lhs_sum > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.witness = P;
  rep.parents = 1;
  return rep;
}

CarlesonReport automatic_carleson_worst(const Weight& w, double theta, double rho) {
  const Lattice& lat = w.lattice();
  const double constant = automatic_constant(lat.dim, theta, rho);
  const MassTable& pw = w.table(theta);
  auto bump_rho = [&](const CellBox& q) {
    return std::pow(bump_of(q.to_box(lat).volume(), pw.sum(q), theta), rho);
  };
  return worst_parent(
      lat, [&](int, const CellBox& q, const Coords&) { return bump_rho(q); },
      [&](const CellBox& P) { return constant * bump_rho(P); }, constant);
}

double good_carleson_constant(int dim, const GoodnessParams& goodness, double rho,
                              const ReverseDoublingFit& fit) {
  validate(goodness);
  if (!(rho > 1.0) || !std::isfinite(rho)) fail(ErrorKind::domain, "Carleson sums need rho > 1");
  if (!fit.holds()) {
    fail(ErrorKind::precondition,
         "weight is not reverse doubling on the tested scales (eps = " + std::to_string(fit.eps1) +
             ", C = " + std::to_string(fit.C) + ", witness " + fit.constant_witness.outer.str() +
             " -> " + fit.constant_witness.inner.str() + ")");
  }
  const double first = (goodness.r + 1) * std::ldexp(1.0, dim * goodness.r);
  return first + fit.C / (1.0 - std::exp2(-fit.eps1 * (1.0 - goodness.eps) * (rho - 1.0)));
}

namespace {

std::function<double(int, const CellBox&, const Coords&)> good_term(const Weight& w, double rho,
                                                                   const GoodnessParams& goodness) {
  const Lattice lat = w.lattice();
  const DyadicGrid grid = DyadicGrid::standard(lat.dim, 0, lat.depth);
  const MassTable* t = &w.table();
  return [=](int level, const CellBox& q, const Coords& c) {
    if (!classify_good(GridCube{level, c}, goodness, grid)) return 0.0;
    return std::pow(t->sum(q), rho);
  };
}

}  // namespace

CarlesonReport good_carleson(const Box& P, const Weight& w, double rho,
                             const GoodnessParams& goodness, const ReverseDoublingFit& fit) {
  const Lattice& lat = w.lattice();
  const double constant = good_carleson_constant(lat.dim, goodness, rho, fit);
  CellBox cp;
  int plevel = 0;
  sub_lattice_check(lat, P, cp, plevel);
  CarlesonReport rep;
  rep.explicit_constant = constant;
  rep.lhs_sum = sum_inside(lat, cp, plevel, good_term(w, rho, goodness));
  rep.rhs_bound = constant * std::pow(w.table().sum(cp), rho);
  rep.ratio = rep.rhs_bound > 0.0 ? rep.lhs_sum / rep.rhs_bound
                                  : (rep.lhs_sum > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  rep.witness = P;
  rep.parents = 1;
  return rep;
}

CarlesonReport good_carleson_worst(const Weight& w, double rho, const GoodnessParams& goodness,
                                   const ReverseDoublingFit& fit) {
  const Lattice& lat = w.lattice();
  const double constant = good_carleson_constant(lat.dim, goodness, rho, fit);
  const MassTable& t = w.table();
  return worst_parent(lat, good_term(w, rho, goodness),
                      [&](const CellBox& P) { return constant * std::pow(t.sum(P), rho); },
                      constant);
}

// ---------------------------------------------------------------------------
// Embeddings

EmbedResult embed_check_cubes(const GridFunction& f, const Weight& w, double theta, double r,
                              double s) {
  check_embed_exponents(theta, r, s);
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  const Lattice& lat = w.lattice();
  const Weight fw = times(f, w);
  const MassTable& mass = fw.table();
  const MassTable& pw = w.table(theta);
  long double acc = 0.0L;
  for_each_dyadic(lat, [&](int level, const Coords&, const CellBox& q) {
    const double b = bump_of(cube_volume(lat, level), pw.sum(q), theta);
    if (b <= 0.0) return;
    const double m = mass.sum(q);
    if (m <= 0.0) return;
    acc += std::pow(b, r / s) * std::pow(m / b, r);
  });
  EmbedResult res;
  res.lhs = std::pow(static_cast<double>(acc), 1.0 / r);
  res.rhs_norm = lp_norm(f, w, s);
  res.ratio = res.rhs_norm > 0.0 ? res.lhs / res.rhs_norm : 0.0;
  return res;
}

bool RectEmbedResult::chain_holds() const {
  constexpr double slack = 1.0 + 1e-9;
  const double lhs_r = std::pow(result.lhs, r);
  if (std::abs(lhs_r - lhs_r_by_slices) > 1e-9 * std::max(lhs_r, lhs_r_by_slices)) return false;
  if (lhs_r > std::pow(c1, r) * intermediate * slack) return false;
  if (std::pow(intermediate, s / r) > middle * slack) return false;
  return middle <= std::pow(c2, s) * norm_s_power * slack;
}

namespace {

struct SplitLattices {
  Lattice full;
  Lattice first;
  Lattice second;
  int m = 1;
  int n = 1;
};

SplitLattices split(const Lattice& lat, int first_dims) {
  const int m = first_dims;
  const int n = lat.dim - m;
  if (m < 1 || n < 1) fail(ErrorKind::shape, "rectangle embedding needs a product lattice");
  return SplitLattices{lat, make_lattice(m, lat.depth), make_lattice(n, lat.depth), m, n};
}

CellBox join(const SplitLattices& sl, const CellBox& a, const CellBox& b) {
  CellBox c{sl.full.dim, {}, {}};
  for (int k = 0; k < sl.m; ++k) {
    c.lo[k] = a.lo[k];
    c.hi[k] = a.hi[k];
  }
  for (int k = 0; k < sl.n; ++k) {
    c.lo[sl.m + k] = b.lo[k];
    c.hi[sl.m + k] = b.hi[k];
  }
  return c;
}

struct DyadicList {
  std::vector<GridCube> cubes;
  std::vector<CellBox> boxes;
};

DyadicList all_dyadic(const Lattice& lat) {
  DyadicList out;
  for_each_dyadic(lat, [&](int level, const Coords& c, const CellBox& q) {
    out.cubes.push_back(GridCube{level, c});
    out.boxes.push_back(q);
  });
  return out;
}

}  // namespace

double embed_rect_lhs(const GridFunction& f, const Weight& w, double theta, double r, double s,
                      int first_dims,
                      const std::function<bool(const GridCube&, const GridCube&)>& keep) {
  check_embed_exponents(theta, r, s);
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  const SplitLattices sl = split(w.lattice(), first_dims);
  const Weight fw = times(f, w);
  const MassTable& mass = fw.table();
  const MassTable& pw = w.table(theta);
  const DyadicList A = all_dyadic(sl.first);
  const DyadicList B = all_dyadic(sl.second);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < A.boxes.size(); ++i) {
    for (std::size_t j = 0; j < B.boxes.size(); ++j) {
      if (keep && !keep(A.cubes[i], B.cubes[j])) continue;
      const CellBox R = join(sl, A.boxes[i], B.boxes[j]);
      const double vol = std::ldexp(1.0, -sl.m * A.cubes[i].level - sl.n * B.cubes[j].level);
      const double b = bump_of(vol, pw.sum(R), theta);
      if (b <= 0.0) continue;
      const double m = mass.sum(R);
      if (m <= 0.0) continue;
      acc += std::pow(b, r / s) * std::pow(m / b, r);
    }
  }
  return std::pow(static_cast<double>(acc), 1.0 / r);
}

RectEmbedResult embed_check_rects(const GridFunction& f, const Weight& w, double theta, double r,
                                  double s, int first_dims) {
  check_embed_exponents(theta, r, s);
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  const SplitLattices sl = split(w.lattice(), first_dims);
  RectEmbedResult out;
  out.result.lhs = embed_rect_lhs(f, w, theta, r, s, first_dims);
  out.result.rhs_norm = lp_norm(f, w, s);
  out.result.ratio = out.result.rhs_norm > 0.0 ? out.result.lhs / out.result.rhs_norm : 0.0;
  out.norm_s_power = std::pow(out.result.rhs_norm, s);
  out.r = r;
  out.s = s;

  const Weight fw = times(f, w);
  const MassTable& mass = fw.table();
  const double cell_m = sl.first.cell_volume();
  const auto first_cells = static_cast<std::size_t>(sl.first.cell_count());
  std::vector<long double> swapped(first_cells, 0.0L);
  long double by_slices = 0.0L, inter = 0.0L;

  const DyadicList B = all_dyadic(sl.second);
  for (std::size_t j = 0; j < B.boxes.size(); ++j) {
    const Box J = B.boxes[j].to_box(sl.second);
    const Weight profile = slice_profile(J, w, sl.m, theta);
    std::vector<double> F(first_cells, 0.0);
    for (std::size_t x = 0; x < first_cells; ++x) {
      const double nu = profile.density()[x];
      if (nu <= 0.0) continue;
      CellBox cell{sl.m, {}, {}};
      const Coords cx = sl.first.unflat(static_cast<Index>(x));
      for (int k = 0; k < sl.m; ++k) {
        cell.lo[k] = cx[k];
        cell.hi[k] = cx[k] + 1;
      }
      F[x] = mass.sum(join(sl, cell, B.boxes[j])) / cell_m / nu;
    }
    const GridFunction FJ(sl.first, F);
    const EmbedResult e = embed_check_cubes(FJ, profile, theta, r, s);
    by_slices += std::pow(static_cast<long double>(e.lhs), r);
    inter += std::pow(static_cast<long double>(e.rhs_norm), r);
    if (e.rhs_norm > 0.0) out.c1 = std::max(out.c1, e.ratio);
    for (std::size_t x = 0; x < first_cells; ++x) {
      const double nu = profile.density()[x];
      if (nu <= 0.0 || F[x] <= 0.0) continue;
      swapped[x] += std::pow(static_cast<long double>(std::pow(F[x], s) * nu), r / s);
    }
  }
  out.lhs_r_by_slices = static_cast<double>(by_slices);
  out.intermediate = static_cast<double>(inter);
  long double middle = 0.0L;
  for (auto v : swapped) middle += std::pow(v, s / r);
  out.middle = static_cast<double>(middle) * cell_m;

  // Per-slice cube embeddings in the second factor.
  const auto second_cells = static_cast<std::size_t>(sl.second.cell_count());
  for (std::size_t x = 0; x < first_cells; ++x) {
    std::vector<double> u(second_cells), g(second_cells);
    for (std::size_t y = 0; y < second_cells; ++y) {
      const Index flat = static_cast<Index>(x * second_cells + y);
      u[y] = w.density()[flat];
      g[y] = f.values()[flat];
    }
    const EmbedResult e = embed_check_cubes(GridFunction(sl.second, g), Weight(sl.second, u), theta, r, s);
    if (e.rhs_norm > 0.0) out.c2 = std::max(out.c2, e.ratio);
  }
  return out;
}

}  // namespace dyadlab
