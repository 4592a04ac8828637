#include "dyadlab/grids.hpp"

#include <cmath>
#include <sstream>

#include "dyadlab/error.hpp"
#include "dyadlab/random.hpp"

namespace dyadlab {

double ShiftParam::offset(int level) const {
  double o = 0.0;
  for (int i = std::max(level + 1, lo); i <= hi; ++i) {
    if (bits[static_cast<std::size_t>(i - lo)]) o += std::ldexp(1.0, -i);
  }
  return o;
}

std::string ShiftParam::bitstring() const {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

ShiftParam sample_shift(int lo, int hi, std::uint64_t seed) {
  if (hi < lo) fail(ErrorKind::domain, "shift level range is empty");
  ShiftParam p{lo, hi, {}};
  Rng rng(seed);
  for (int i = lo; i <= hi; ++i) p.bits.push_back(rng.coin() ? 1 : 0);
  return p;
}

ShiftParam zero_shift(int lo, int hi) {
  if (hi < lo) fail(ErrorKind::domain, "shift level range is empty");
  return ShiftParam{lo, hi, std::vector<std::uint8_t>(static_cast<std::size_t>(hi - lo + 1), 0)};
}

// ---------------------------------------------------------------------------
// DyadicGrid

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::domain, "grid dimension must be in [1, 4]");
}

void check_range(int lo, int hi) {
  if (hi < lo) fail(ErrorKind::domain, "grid level range is empty");
}

int ipow3(int d) {
  int v = 1;
  for (int i = 0; i < d; ++i) v *= 3;
  return v;
}

}  // namespace

DyadicGrid DyadicGrid::standard(int dim, int lo, int hi) {
  check_dim(dim);
  check_range(lo, hi);
  DyadicGrid g;
  g.dim_ = dim;
  g.kind_ = Kind::standard;
  g.lo_ = lo;
  g.hi_ = hi;
  return g;
}

DyadicGrid DyadicGrid::shifted(std::vector<ShiftParam> shifts) {
  check_dim(static_cast<int>(shifts.size()));
  const int lo = shifts[0].lo, hi = shifts[0].hi;
  check_range(lo, hi);
  for (const auto& s : shifts) {
    if (s.lo != lo || s.hi != hi || s.bits.size() != static_cast<std::size_t>(hi - lo + 1)) {
      fail(ErrorKind::shape, "shift parameters of a grid must share one level range");
    }
  }
  DyadicGrid g;
  g.dim_ = static_cast<int>(shifts.size());
  g.kind_ = Kind::shifted;
  g.lo_ = lo;
  g.hi_ = hi;
  g.shifts_ = std::move(shifts);
  return g;
}

DyadicGrid DyadicGrid::third(int dim, int k, int lo, int hi) {
  check_dim(dim);
  check_range(lo, hi);
  if (k < 0 || k >= ipow3(dim)) fail(ErrorKind::domain, "one-third grid index out of range");
  DyadicGrid g;
  g.dim_ = dim;
  g.kind_ = Kind::third;
  g.lo_ = lo;
  g.hi_ = hi;
  g.third_ = k;
  for (int a = 0, rest = k; a < dim; ++a, rest /= 3) g.digits_[a] = rest % 3;
  return g;
}

double DyadicGrid::offset(int axis, int level) const {
  switch (kind_) {
    case Kind::standard: return 0.0;
    case Kind::shifted: return shifts_[axis].offset(level);
    case Kind::third: {
      const double o = std::ldexp(digits_[axis] / 3.0, -level);
      return (level % 2 == 0) ? o : -o;
    }
  }
  return 0.0;
}

double DyadicGrid::side(int level) const { return std::ldexp(1.0, -level); }

std::pair<double, double> DyadicGrid::interval(const GridCube& q, int axis) const {
  const double o = offset(axis, q.level);
  return {std::ldexp(static_cast<double>(q.index[axis]), -q.level) + o,
          std::ldexp(static_cast<double>(q.index[axis] + 1), -q.level) + o};
}

Box DyadicGrid::box(const GridCube& q) const {
  Box b{dim_, {}, {}};
  for (int k = 0; k < dim_; ++k) std::tie(b.lo[k], b.hi[k]) = interval(q, k);
  return b;
}

GridCube DyadicGrid::locate(const Point& x, int level) const {
  GridCube q{level, {}};
  for (int k = 0; k < dim_; ++k) {
    q.index[k] = static_cast<Index>(std::floor(std::ldexp(x[k] - offset(k, level), level)));
  }
  return q;
}

GridCube DyadicGrid::ancestor(const GridCube& q, int up) const {
  if (up == 0) return q;
  const Box b = box(q);
  Point c{};
  for (int k = 0; k < dim_; ++k) c[k] = 0.5 * (b.lo[k] + b.hi[k]);
  return locate(c, q.level - up);
}

std::pair<Index, Index> DyadicGrid::index_range(int level, int axis) const {
  const double o = offset(axis, level);
  const auto first = static_cast<Index>(std::floor(std::ldexp(-o, level)));
  const auto last = static_cast<Index>(std::ceil(std::ldexp(1.0 - o, level))) - 1;
  return {first, last};
}

std::vector<GridCube> DyadicGrid::cubes_meeting_box(int level) const {
  std::array<std::pair<Index, Index>, kMaxDim> range{};
  for (int k = 0; k < dim_; ++k) range[k] = index_range(level, k);
  std::vector<GridCube> out;
  GridCube q{level, {}};
  for (int k = 0; k < dim_; ++k) q.index[k] = range[k].first;
  while (true) {
    out.push_back(q);
    int k = dim_ - 1;
    while (k >= 0 && q.index[k] == range[k].second) {
      q.index[k] = range[k].first;
      --k;
    }
    if (k < 0) return out;
    ++q.index[k];
  }
}

DyadicGrid DyadicGrid::axis_grid(int axis) const {
  switch (kind_) {
    case Kind::standard: return standard(1, lo_, hi_);
    case Kind::shifted: return shifted({shifts_[axis]});
    case Kind::third: return third(1, digits_[axis], lo_, hi_);
  }
  return standard(1, lo_, hi_);
}

bool DyadicGrid::aligned_to(int depth) const {
  switch (kind_) {
    case Kind::standard: return true;
    case Kind::shifted: return hi_ <= depth;
    case Kind::third:
      for (int k = 0; k < dim_; ++k)
        if (digits_[k] != 0) return false;
      return true;
  }
  return false;
}

std::string DyadicGrid::descriptor() const {
  std::ostringstream os;
  os << "GRID1 dim=" << dim_ << " kind=";
  switch (kind_) {
    case Kind::standard: os << "std"; break;
    case Kind::shifted: os << "shift"; break;
    case Kind::third: os << "third:" << third_; break;
  }
  os << " levels=" << lo_ << ".." << hi_ << " beta=";
  if (kind_ == Kind::shifted) {
    for (int k = 0; k < dim_; ++k) os << (k ? "," : "") << shifts_[k].bitstring();
  } else {
    os << '-';
  }
  return os.str();
}

DyadicGrid parse_grid_descriptor(const std::string& text) {
  std::istringstream is(text);
  std::string magic, dtok, ktok, ltok, btok;
  is >> magic >> dtok >> ktok >> ltok >> btok;
  auto bad = [&](const std::string& why) -> DyadicGrid {
    fail(ErrorKind::format, "bad grid descriptor (" + why + "): '" + text + "'");
  };
  if (magic != "GRID1") return bad("magic");
  auto value = [&](const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) bad("expected " + key);
    return tok.substr(key.size() + 1);
  };
  int dim = 0, lo = 0, hi = 0;
  try {
    dim = std::stoi(value(dtok, "dim"));
    const std::string levels = value(ltok, "levels");
    const auto dots = levels.find("..");
    if (dots == std::string::npos) bad("levels");
    lo = std::stoi(levels.substr(0, dots));
    hi = std::stoi(levels.substr(dots + 2));
  } catch (const std::logic_error&) {
    return bad("number");
  }
  const std::string kind = value(ktok, "kind");
  const std::string beta = value(btok, "beta");
  if (kind == "std") return DyadicGrid::standard(dim, lo, hi);
  if (kind.rfind("third:", 0) == 0) {
    try {
      return DyadicGrid::third(dim, std::stoi(kind.substr(6)), lo, hi);
    } catch (const std::logic_error&) {
      return bad("third index");
    }
  }
  if (kind != "shift") return bad("kind");
  std::vector<ShiftParam> shifts;
  std::istringstream bs(beta);
  std::string part;
  while (std::getline(bs, part, ',')) {
    if (part.size() != static_cast<std::size_t>(hi - lo + 1)) bad("bitstring length");
    ShiftParam p{lo, hi, {}};
    for (char c : part) {
      if (c != '0' && c != '1') bad("bitstring");
      p.bits.push_back(c == '1');
    }
    shifts.push_back(std::move(p));
  }
  if (static_cast<int>(shifts.size()) != dim) return bad("one bitstring per axis");
  return DyadicGrid::shifted(std::move(shifts));
}

std::vector<DyadicGrid> onethird_grids(int dim, int lo, int hi) {
  check_dim(dim);
  std::vector<DyadicGrid> grids;
  for (int k = 0; k < ipow3(dim); ++k) grids.push_back(DyadicGrid::third(dim, k, lo, hi));
  return grids;
}

std::optional<std::string> check_grid_structure(const DyadicGrid& grid) {
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const DyadicGrid g = grid.axis_grid(axis);
    for (int level = grid.lo(); level <= grid.hi(); ++level) {
      const double tol = 1e-12 * g.side(level);
      const auto [first, last] = g.index_range(level, 0);
      GridCube q{level, {}};
      q.index[0] = first;
      auto iv = g.interval(q, 0);
      if (iv.first > tol) return "level " + std::to_string(level) + " misses the left end";
      for (Index i = first; i <= last; ++i) {
        q.index[0] = i;
        const auto cur = g.interval(q, 0);
        if (i > first && std::abs(cur.first - iv.second) > tol) {
          return "gap or overlap at level " + std::to_string(level);
        }
        if (level > grid.lo()) {
          const auto parent = g.interval(g.ancestor(q, 1), 0);
          if (cur.first < parent.first - tol || cur.second > parent.second + tol) {
            return "interval at level " + std::to_string(level) + " straddles its parent";
          }
        }
        iv = cur;
      }
      if (iv.second < 1.0 - tol) return "level " + std::to_string(level) + " misses the right end";
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sandwich and distance

Sandwich sandwich(const Box& P, int j) {
  if (j < 0) fail(ErrorKind::domain, "sandwich depth j must be >= 0");
  const int d = P.dim;
  const double h = P.side(0);
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::domain, "sandwich needs a nonempty cube");
  for (int k = 1; k < d; ++k) {
    if (std::abs(P.side(k) - h) > 1e-12 * h) fail(ErrorKind::shape, "sandwich needs a cube");
  }
  const Box triple = dilate(P, 3.0);
  const Box spread = dilate(P, std::ldexp(1.0, j));
  Point c{};
  for (int k = 0; k < d; ++k) c[k] = 0.5 * (P.lo[k] + P.hi[k]);
  // Levels with 3 l(P) <= 2^-level <= 18 l(P), finest first.
  const int finest = static_cast<int>(std::floor(-std::log2(3.0 * h))) + 1;
  const auto grids = onethird_grids(d, 0, 0);
  for (int level = finest; std::ldexp(1.0, -level) <= 18.0 * h; --level) {
    if (std::ldexp(1.0, -level) < 3.0 * h) continue;
    for (std::size_t g = 0; g < grids.size(); ++g) {
      const GridCube I = grids[g].locate(c, level);
      const Box ib = grids[g].box(I);
      if (!ib.contains(triple)) continue;
      const Box ab = grids[g].box(grids[g].ancestor(I, j));
      if (!ab.contains(spread)) continue;
      return Sandwich{static_cast<int>(g), I, ib, ab};
    }
  }
  fail(ErrorKind::contract, "no one-third grid cube sandwiches " + P.str() +
                                " with j = " + std::to_string(j));
}

double dyadic_distance(const Point& x, const Point& u, const DyadicGrid& grid) {
  for (int level = grid.hi(); level >= grid.lo(); --level) {
    if (grid.locate(x, level) == grid.locate(u, level)) return grid.side(level);
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Goodness

void validate(const GoodnessParams& params) {
  if (!(params.eps > 0.0 && params.eps < 1.0)) {
    fail(ErrorKind::domain, "goodness needs 0 < eps < 1");
  }
  if (params.r < 1) fail(ErrorKind::domain, "goodness needs r >= 1");
}

bool good_in(double a, double b, double c, double e, double eps) {
  const double lj = b - a;
  const double lk = e - c;
  double dist = std::numeric_limits<double>::infinity();
  for (double s : {c, 0.5 * (c + e), e}) {
    if (s >= a && s <= b) return false;
    dist = std::min(dist, s < a ? a - s : s - b);
  }
  return dist > 2.0 * std::pow(lj, eps) * std::pow(lk, 1.0 - eps);
}

bool classify_good(const GridCube& cube, const GoodnessParams& params, const DyadicGrid& grid) {
  validate(params);
  for (int up = params.r; cube.level - up >= grid.lo(); ++up) {
    const GridCube K = grid.ancestor(cube, up);
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const auto [a, b] = grid.interval(cube, axis);
      const auto [c, e] = grid.interval(K, axis);
      if (!good_in(a, b, c, e, params.eps)) return false;
    }
  }
  return true;
}

bool is_good(const GridCube& cube, const GoodnessParams& params, const DyadicGrid& grid) {
  validate(params);
  if (params.r > grid.hi() - grid.lo()) {
    fail(ErrorKind::scope, "goodness separation r = " + std::to_string(params.r) +
                               " exceeds the grid's level span " +
                               std::to_string(grid.hi() - grid.lo()));
  }
  return classify_good(cube, params, grid);
}

BadProbability bad_probability_mc(int r, double eps, long samples, std::uint64_t seed,
                                  int fine_level) {
  const GoodnessParams params{eps, r};
  validate(params);
  if (samples < 100) fail(ErrorKind::domain, "bad_probability_mc needs at least 100 samples");
  if (fine_level < 1 || fine_level > 52) fail(ErrorKind::domain, "fine level must be in [1, 52]");
  if (r > fine_level) {
    fail(ErrorKind::scope, "separation r exceeds the sampled grids' level span");
  }
  BadProbability out;
  out.samples = samples;
  // Fixed finest-level reference interval near x = 0.3.
  GridCube J{fine_level, {}};
  J.index[0] = static_cast<Index>(std::floor(std::ldexp(0.3, fine_level)));
  for (long i = 0; i < samples; ++i) {
    const DyadicGrid g =
        DyadicGrid::shifted({sample_shift(0, fine_level, derive_seed(seed, static_cast<std::uint64_t>(i)))});
    // The finest level carries no offset, so J is always a member.
    if (g.offset(0, fine_level) != 0.0) continue;
    ++out.members;
    if (!classify_good(J, params, g)) ++out.bad;
  }
  if (out.members == 0) fail(ErrorKind::degenerate, "reference interval never in a sampled grid");
  const double n = static_cast<double>(out.members);
  const double p = static_cast<double>(out.bad) / n;
  constexpr double z = 1.959963984540054;
  out.p_hat = p;
  out.half_width = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / (1.0 + z * z / n);
  return out;
}

}  // namespace dyadlab
