#include "dyadlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyadlab/error.hpp"

namespace dyadlab {

double Lattice::cell_side() const { return std::ldexp(1.0, -depth); }

double Lattice::cell_volume() const { return std::ldexp(1.0, -dim * depth); }

Index Lattice::flat(const Coords& cell) const {
  Index idx = 0;
  for (int k = 0; k < dim; ++k) idx = (idx << depth) | cell[k];
  return idx;
}

Coords Lattice::unflat(Index flat_index) const {
  Coords c{};
  const Index mask = cells_per_axis() - 1;
  for (int k = dim - 1; k >= 0; --k) {
    c[k] = flat_index & mask;
    flat_index >>= depth;
  }
  return c;
}

Coords Lattice::cell_of(const Point& x) const {
  Coords c{};
  const Index n = cells_per_axis();
  for (int k = 0; k < dim; ++k) {
    const auto i = static_cast<Index>(std::floor(std::ldexp(x[k], depth)));
    c[k] = std::clamp<Index>(i, 0, n - 1);
  }
  return c;
}

Lattice make_lattice(int dim, int depth) {
  if (dim < 1 || dim > kMaxDim) {
    fail(ErrorKind::domain, "lattice dimension must be in [1, " + std::to_string(kMaxDim) +
                                "], got " + std::to_string(dim));
  }
  if (depth < 0) fail(ErrorKind::domain, "lattice depth must be nonnegative");
  if (dim * depth > kCellBudgetLog2) {
    fail(ErrorKind::resource, "lattice with dim*depth = " + std::to_string(dim * depth) +
                                  " exceeds the cell budget 2^" +
                                  std::to_string(kCellBudgetLog2));
  }
  return Lattice{dim, depth};
}

// ---------------------------------------------------------------------------
// Boxes

double Box::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= std::max(0.0, hi[k] - lo[k]);
  return v;
}

bool Box::empty() const {
  for (int k = 0; k < dim; ++k)
    if (!(hi[k] > lo[k])) return true;
  return false;
}

bool Box::contains(const Box& other) const {
  if (other.empty()) return true;
  for (int k = 0; k < dim; ++k)
    if (other.lo[k] < lo[k] || other.hi[k] > hi[k]) return false;
  return true;
}

bool Box::contains(const Point& x) const {
  for (int k = 0; k < dim; ++k)
    if (x[k] < lo[k] || x[k] >= hi[k]) return false;
  return true;
}

std::string Box::str() const {
  std::ostringstream os;
  os.precision(17);
  for (int k = 0; k < dim; ++k) {
    if (k) os << 'x';
    os << '[' << lo[k] << ',' << hi[k] << ')';
  }
  return os.str();
}

Box unit_box(int dim) {
  Box b{dim, {}, {}};
  for (int k = 0; k < dim; ++k) b.hi[k] = 1.0;
  return b;
}

Box intersect(const Box& a, const Box& b) {
  Box r{a.dim, {}, {}};
  for (int k = 0; k < a.dim; ++k) {
    r.lo[k] = std::max(a.lo[k], b.lo[k]);
    r.hi[k] = std::max(r.lo[k], std::min(a.hi[k], b.hi[k]));
  }
  return r;
}

Box dilate(const Box& b, double factor) {
  Box r{b.dim, {}, {}};
  for (int k = 0; k < b.dim; ++k) {
    const double c = 0.5 * (b.lo[k] + b.hi[k]);
    const double h = 0.5 * factor * (b.hi[k] - b.lo[k]);
    r.lo[k] = c - h;
    r.hi[k] = c + h;
  }
  return r;
}

Box product(const Box& first, const Box& second) {
  if (first.dim + second.dim > kMaxDim) fail(ErrorKind::shape, "product box exceeds 4 dimensions");
  Box r{first.dim + second.dim, {}, {}};
  for (int k = 0; k < first.dim; ++k) {
    r.lo[k] = first.lo[k];
    r.hi[k] = first.hi[k];
  }
  for (int k = 0; k < second.dim; ++k) {
    r.lo[first.dim + k] = second.lo[k];
    r.hi[first.dim + k] = second.hi[k];
  }
  return r;
}

bool CellBox::empty() const {
  for (int k = 0; k < dim; ++k)
    if (hi[k] <= lo[k]) return true;
  return false;
}

Index CellBox::cell_count() const {
  if (empty()) return 0;
  Index c = 1;
  for (int k = 0; k < dim; ++k) c *= hi[k] - lo[k];
  return c;
}

Box CellBox::to_box(const Lattice& lat) const {
  Box b{dim, {}, {}};
  for (int k = 0; k < dim; ++k) {
    b.lo[k] = std::ldexp(static_cast<double>(lo[k]), -lat.depth);
    b.hi[k] = std::ldexp(static_cast<double>(hi[k]), -lat.depth);
  }
  return b;
}

CellBox align(const Lattice& lat, const Box& box) {
  if (box.dim != lat.dim) {
    fail(ErrorKind::shape, "box of dimension " + std::to_string(box.dim) +
                               " on a lattice of dimension " + std::to_string(lat.dim));
  }
  CellBox c{lat.dim, {}, {}};
  const auto n = static_cast<double>(lat.cells_per_axis());
  auto to_node = [&](double x) -> Index {
    const double scaled = std::ldexp(x, lat.depth);
    if (!(scaled >= 0.0 && scaled <= n) || scaled != std::floor(scaled)) {
      fail(ErrorKind::alignment, "coordinate " + std::to_string(x) +
                                     " is not a cell boundary of the depth-" +
                                     std::to_string(lat.depth) + " lattice");
    }
    return static_cast<Index>(scaled);
  };
  for (int k = 0; k < lat.dim; ++k) {
    c.lo[k] = to_node(box.lo[k]);
    c.hi[k] = std::max(c.lo[k], to_node(box.hi[k]));
  }
  return c;
}

CellBox whole(const Lattice& lat) {
  CellBox c{lat.dim, {}, {}};
  for (int k = 0; k < lat.dim; ++k) c.hi[k] = lat.cells_per_axis();
  return c;
}

// ---------------------------------------------------------------------------
// MassTable

MassTable::MassTable(const Lattice& lat, std::span<const double> values) : lat_(lat) {
  const Index n = lat.cells_per_axis();
  const Index nodes = n + 1;
  Index total = 1;
  for (int k = lat.dim - 1; k >= 0; --k) {
    stride_[k] = total;
    total *= nodes;
  }
  prefix_.assign(static_cast<std::size_t>(total), 0.0L);

  for (Index i = 0; i < lat.cell_count(); ++i) {
    const Coords c = lat.unflat(i);
    Index node = 0;
    for (int k = 0; k < lat.dim; ++k) node += (c[k] + 1) * stride_[k];
    prefix_[node] = values[i];
  }
  // Running sums along each axis in turn.
  for (int axis = 0; axis < lat.dim; ++axis) {
    const Index s = stride_[axis];
    for (Index node = 0; node < total; ++node) {
      const Index coord = (node / s) % nodes;
      if (coord > 0) prefix_[node] += prefix_[node - s];
    }
  }
}

long double MassTable::corner(const Coords& node) const {
  Index idx = 0;
  for (int k = 0; k < lat_.dim; ++k) idx += node[k] * stride_[k];
  return prefix_[idx];
}

double MassTable::sum(const CellBox& box) const {
  if (box.empty()) return 0.0;
  const int d = lat_.dim;
  long double acc = 0.0L;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Coords node{};
    int lows = 0;
    for (int k = 0; k < d; ++k) {
      if (mask & (1u << k)) {
        node[k] = box.hi[k];
      } else {
        node[k] = box.lo[k];
        ++lows;
      }
    }
    const long double v = corner(node);
    acc += (lows % 2 == 0) ? v : -v;
  }
  return static_cast<double>(std::max(0.0L, acc) * static_cast<long double>(lat_.cell_volume()));
}

long double MassTable::cumulative(const Point& x) const {
  // The cumulative integral of a piecewise-constant function is multilinear
  // inside each cell, so interpolating the node prefix sums is exact.
  const int d = lat_.dim;
  const Index n = lat_.cells_per_axis();
  Coords base{};
  std::array<long double, kMaxDim> frac{};
  for (int k = 0; k < d; ++k) {
    const long double scaled = std::ldexp(static_cast<long double>(x[k]), lat_.depth);
    Index i = static_cast<Index>(std::floor(scaled));
    i = std::clamp<Index>(i, 0, n);
    base[k] = i;
    frac[k] = (i == n) ? 0.0L : scaled - static_cast<long double>(i);
  }
  long double acc = 0.0L;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    long double wgt = 1.0L;
    Coords node = base;
    for (int k = 0; k < d && wgt != 0.0L; ++k) {
      if (mask & (1u << k)) {
        wgt *= frac[k];
        node[k] += 1;
      } else {
        wgt *= 1.0L - frac[k];
      }
    }
    if (wgt != 0.0L) acc += wgt * corner(node);
  }
  return acc;
}

double MassTable::sum_clipped(const Box& box) const {
  const Box b = intersect(box, unit_box(lat_.dim));
  if (b.empty()) return 0.0;
  const int d = lat_.dim;
  long double acc = 0.0L;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Point x{};
    int lows = 0;
    for (int k = 0; k < d; ++k) {
      if (mask & (1u << k)) {
        x[k] = b.hi[k];
      } else {
        x[k] = b.lo[k];
        ++lows;
      }
    }
    const long double v = cumulative(x);
    acc += (lows % 2 == 0) ? v : -v;
  }
  return static_cast<double>(std::max(0.0L, acc) * static_cast<long double>(lat_.cell_volume()));
}

// ---------------------------------------------------------------------------
// Weight

Weight::Weight(Lattice lat, std::vector<double> density)
    : lat_(lat), cache_(std::make_shared<Cache>()) {
  if (static_cast<Index>(density.size()) != lat.cell_count()) {
    fail(ErrorKind::shape, "density has " + std::to_string(density.size()) +
                               " values, lattice has " + std::to_string(lat.cell_count()) +
                               " cells");
  }
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (!std::isfinite(density[i]) || density[i] < 0.0) {
      fail(ErrorKind::invalid_value,
           "density at cell " + std::to_string(i) + " is " + std::to_string(density[i]) +
               "; weights must be finite and nonnegative");
    }
  }
  density_ = std::make_shared<const std::vector<double>>(std::move(density));
}

const MassTable& Weight::table(double theta) const {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    fail(ErrorKind::domain, "power table exponent must be positive and finite");
  }
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->tables.find(theta);
  if (it != cache_->tables.end()) return *it->second;
  std::unique_ptr<const MassTable> table;
  if (theta == 1.0) {
    table = std::make_unique<const MassTable>(lat_, *density_);
  } else {
    std::vector<double> powered(density_->size());
    std::transform(density_->begin(), density_->end(), powered.begin(),
                   [theta](double u) { return u == 0.0 ? 0.0 : std::pow(u, theta); });
    table = std::make_unique<const MassTable>(lat_, powered);
  }
  const MassTable& ref = *table;
  cache_->tables.emplace(theta, std::move(table));
  return ref;
}

double Weight::integrate(const Box& box) const { return table().sum(align(lat_, box)); }

double Weight::integrate(const CellBox& box) const { return table().sum(box); }

double Weight::power_integrate(const Box& box, double theta) const {
  return table(theta).sum(align(lat_, box));
}

double Weight::power_integrate(const CellBox& box, double theta) const {
  return table(theta).sum(box);
}

// ---------------------------------------------------------------------------
// GridFunction and helpers

GridFunction::GridFunction(Lattice lat, std::vector<double> values)
    : lat_(lat), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != lat.cell_count()) {
    fail(ErrorKind::shape, "grid function has " + std::to_string(values_.size()) +
                               " values, lattice has " + std::to_string(lat.cell_count()) +
                               " cells");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      fail(ErrorKind::invalid_value,
           "grid function value at cell " + std::to_string(i) + " must be finite and >= 0");
    }
  }
}

Weight times(const GridFunction& f, const Weight& w) {
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  std::vector<double> d(f.values().size());
  const auto u = w.density();
  const auto v = f.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = v[i] * u[i];
  return Weight(w.lattice(), std::move(d));
}

double lp_norm(const GridFunction& f, const Weight& w, double p) {
  if (!(f.lattice() == w.lattice())) fail(ErrorKind::shape, "function and weight lattices differ");
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::domain, "lp_norm needs 1 <= p < inf");
  const auto u = w.density();
  const auto v = f.values();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0 || u[i] == 0.0) continue;
    acc += static_cast<long double>(p == 1.0 ? v[i] : std::pow(v[i], p)) * u[i];
  }
  acc *= static_cast<long double>(w.lattice().cell_volume());
  return std::pow(static_cast<double>(acc), 1.0 / p);
}

namespace {

std::vector<double> refine_values(const Lattice& lat, std::span<const double> values,
                                  int new_depth, Lattice& out) {
  if (new_depth < lat.depth) fail(ErrorKind::domain, "refine cannot coarsen a lattice");
  out = make_lattice(lat.dim, new_depth);
  const int shift = new_depth - lat.depth;
  std::vector<double> r(static_cast<std::size_t>(out.cell_count()));
  for (Index i = 0; i < out.cell_count(); ++i) {
    Coords c = out.unflat(i);
    for (int k = 0; k < lat.dim; ++k) c[k] >>= shift;
    r[i] = values[lat.flat(c)];
  }
  return r;
}

}  // namespace

Weight refine(const Weight& w, int new_depth) {
  Lattice out;
  auto v = refine_values(w.lattice(), w.density(), new_depth, out);
  return Weight(out, std::move(v));
}

GridFunction refine(const GridFunction& f, int new_depth) {
  Lattice out;
  auto v = refine_values(f.lattice(), f.values(), new_depth, out);
  return GridFunction(out, std::move(v));
}

Weight lebesgue(const Lattice& lat) {
  return Weight(lat, std::vector<double>(static_cast<std::size_t>(lat.cell_count()), 1.0));
}

}  // namespace dyadlab
