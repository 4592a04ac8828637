#include "dyadlab/bump.hpp"

#include <cmath>
#include <sstream>

#include "dyadlab/error.hpp"

namespace dyadlab {

void Exponents::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::domain, "exponent constraint violated: " + what); };
  if (!(p > 1.0)) bad("p > 1");
  if (!(q > p)) bad("p < q");
  if (!std::isfinite(q)) bad("q < inf");
  if (!(theta >= 1.0) || !std::isfinite(theta)) bad("1 <= theta < inf");
  if (m < 1 || n < 0 || m + n > kMaxDim) bad("m >= 1, n >= 0, m + n <= 4");
  if (!(alpha > 0.0 && alpha < m)) bad("0 < alpha < m");
  if (n > 0 && !(beta > 0.0 && beta < n)) bad("0 < beta < n");
  if (r.has_value() != s.has_value()) bad("r and s are given together");
  if (r && s) {
    if (!(*s > 1.0)) bad("s > 1");
    if (!(*r > *s)) bad("s < r");
    if (!std::isfinite(*r)) bad("r < inf");
  }
}

namespace {

double bump_from(double volume, double power_integral, double theta) {
  if (theta == 1.0) return power_integral;
  if (power_integral <= 0.0) return 0.0;
  return std::pow(volume, 1.0 - 1.0 / theta) * std::pow(power_integral, 1.0 / theta);
}

void check_theta(double theta) {
  if (!(theta >= 1.0) || !std::isfinite(theta)) fail(ErrorKind::domain, "bump needs 1 <= theta < inf");
}

}  // namespace

double bump_cube(const Weight& w, const Box& Q, double theta) {
  check_theta(theta);
  const CellBox c = align(w.lattice(), Q);
  return bump_from(Q.volume(), w.table(theta).sum(c), theta);
}

double bump_box(const Weight& w, const Box& Q, double theta) {
  check_theta(theta);
  if (Q.dim != w.lattice().dim) fail(ErrorKind::shape, "box and weight dimensions differ");
  return bump_from(Q.volume(), w.table(theta).sum_clipped(Q), theta);
}

double bump_rect(const Weight& w, const Box& I, const Box& J, double theta) {
  return bump_cube(w, product(I, J), theta);
}

Weight slice_profile(const Box& J, const Weight& w, int first_dims, double theta) {
  check_theta(theta);
  const Lattice& lat = w.lattice();
  const int m = first_dims;
  const int n = lat.dim - m;
  if (m < 1 || n < 1 || J.dim != n) fail(ErrorKind::shape, "slice_profile needs a product lattice and J in its second factor");
  const Lattice first = make_lattice(m, lat.depth);
  const CellBox cj = align(make_lattice(n, lat.depth), J);
  const MassTable& t = w.table(theta);
  const double cell_m = first.cell_volume();
  const double jvol = J.volume();
  std::vector<double> d(static_cast<std::size_t>(first.cell_count()));
  for (Index i = 0; i < first.cell_count(); ++i) {
    const Coords x = first.unflat(i);
    CellBox full{lat.dim, {}, {}};
    for (int k = 0; k < m; ++k) {
      full.lo[k] = x[k];
      full.hi[k] = x[k] + 1;
    }
    for (int k = 0; k < n; ++k) {
      full.lo[m + k] = cj.lo[k];
      full.hi[m + k] = cj.hi[k];
    }
    d[i] = bump_from(jvol, t.sum(full) / cell_m, theta);
  }
  return Weight(first, std::move(d));
}

// ---------------------------------------------------------------------------
// Rectangle families

std::string Rect::str() const {
  if (J.dim == 0) return I.str();
  return I.str() + " x " + J.str();
}

std::vector<Rect> RectFamily::enumerate() const {
  std::vector<Rect> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [gi, gj] = pairs[p];
    for (int l1 = 0; l1 <= levels_first; ++l1) {
      const auto first = gi.cubes_meeting_box(l1);
      if (n == 0) {
        for (const auto& ci : first) out.push_back(Rect{gi.box(ci), Box{0, {}, {}}, static_cast<int>(p), ci, {}});
        continue;
      }
      for (int l2 = 0; l2 <= levels_second; ++l2) {
        const auto second = gj.cubes_meeting_box(l2);
        for (const auto& ci : first) {
          const Box bi = gi.box(ci);
          for (const auto& cj : second) out.push_back(Rect{bi, gj.box(cj), static_cast<int>(p), ci, cj});
        }
      }
    }
  }
  return out;
}

RectFamily dyadic_rect_family(int m, int n, int depth) {
  RectFamily f;
  f.m = m;
  f.n = n;
  f.levels_first = depth;
  f.levels_second = depth;
  f.pairs.emplace_back(DyadicGrid::standard(m, 0, depth), DyadicGrid::standard(n, 0, depth));
  return f;
}

RectFamily onethird_rect_family(int m, int n, int depth) {
  RectFamily f;
  f.m = m;
  f.n = n;
  f.levels_first = depth;
  f.levels_second = depth;
  for (const auto& gi : onethird_grids(m, 0, depth))
    for (const auto& gj : onethird_grids(n, 0, depth)) f.pairs.emplace_back(gi, gj);
  return f;
}

RectFamily dyadic_cube_family(int dim, int depth) {
  RectFamily f;
  f.m = dim;
  f.n = 0;
  f.levels_first = depth;
  f.pairs.emplace_back(DyadicGrid::standard(dim, 0, depth), DyadicGrid::standard(dim, 0, depth));
  return f;
}

// ---------------------------------------------------------------------------
// Characteristics

const char* to_string(CharKind kind) {
  switch (kind) {
    case CharKind::one_param: return "one_param";
    case CharKind::product_bump: return "product_bump";
    case CharKind::half_bump_omega: return "half_bump_omega";
    case CharKind::no_bump: return "no_bump";
  }
  return "?";
}

CharKind parse_char_kind(const std::string& text) {
  if (text == "one_param") return CharKind::one_param;
  if (text == "product_bump") return CharKind::product_bump;
  if (text == "half_bump_omega") return CharKind::half_bump_omega;
  if (text == "no_bump") return CharKind::no_bump;
  fail(ErrorKind::domain, "unknown characteristic kind '" + text + "'");
}

double characteristic_term(CharKind kind, const KernelHandle& K, const Weight& sigma,
                           const Weight& omega, const Exponents& exps, const Rect& R,
                           const CharOptions& opts) {
  const Box box = R.box();
  const double inv_pp = 1.0 / exps.p_prime();
  const double inv_q = 1.0 / exps.q;
  if (kind == CharKind::one_param) {
    const double vol = box.volume();
    const int m = opts.one_param_m > 0 ? opts.one_param_m : box.dim;
    const double th = exps.theta;
    const double avg_s = sigma.table(th).sum_clipped(box) / vol;
    const double avg_o = omega.table(th).sum_clipped(box) / vol;
    if (avg_s <= 0.0 || avg_o <= 0.0) return 0.0;
    return std::pow(vol, exps.alpha / m - 1.0 / exps.p + inv_q) *
           std::pow(avg_s, inv_pp / th) * std::pow(avg_o, inv_q / th);
  }
  const double th_sigma = kind == CharKind::product_bump ? exps.theta : 1.0;
  const double th_omega = kind == CharKind::no_bump ? 1.0 : exps.theta;
  const double s = bump_box(sigma, box, th_sigma);
  const double o = bump_box(omega, box, th_omega);
  if (s <= 0.0 || o <= 0.0) return 0.0;
  return K(R.I, R.J) * std::pow(o, inv_q) * std::pow(s, inv_pp);
}

CharResult characteristic(CharKind kind, const KernelHandle& K, const Weight& sigma,
                          const Weight& omega, const Exponents& exps,
                          const std::vector<Rect>& family, const CharOptions& opts) {
  if (family.empty()) fail(ErrorKind::domain, "characteristic over an empty family");
  if (!(sigma.lattice() == omega.lattice())) fail(ErrorKind::shape, "sigma and omega lattices differ");
  if (kind == CharKind::one_param && family.front().J.dim != 0) {
    fail(ErrorKind::shape, "one_param characteristic needs a cube family");
  }
  CharResult res;
  res.kind = kind;
  res.family_size = static_cast<long>(family.size());
  for (const Rect& R : family) {
    const double v = characteristic_term(kind, K, sigma, omega, exps, R, opts);
    if (!res.witness || v > res.value * (1.0 + 1e-12)) {
      res.value = v;
      res.witness = R;
    }
  }
  return res;
}

CharResult characteristic(CharKind kind, const KernelHandle& K, const Weight& sigma,
                          const Weight& omega, const Exponents& exps, const RectFamily& family,
                          const CharOptions& opts) {
  if (kind == CharKind::no_bump && opts.include_shifted && family.n > 0) {
    RectFamily shifted = onethird_rect_family(family.m, family.n, family.levels_first);
    shifted.levels_second = family.levels_second;
    return characteristic(kind, K, sigma, omega, exps, shifted.enumerate(), opts);
  }
  return characteristic(kind, K, sigma, omega, exps, family.enumerate(), opts);
}

}  // namespace dyadlab
