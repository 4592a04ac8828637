#pragma once

// Finite dyadic lattices on the unit box [0,1)^d and piecewise-constant
// densities living on them. Every integral here is an exact finite sum.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace dyadlab {

inline constexpr int kMaxDim = 4;
/// Maximum total cell count is 2^kCellBudgetLog2.
inline constexpr int kCellBudgetLog2 = 24;

using Index = std::int64_t;
using Coords = std::array<Index, kMaxDim>;
using Point = std::array<double, kMaxDim>;

struct Lattice {
  int dim = 1;
  int depth = 0;

  Index cells_per_axis() const { return Index{1} << depth; }
  Index cell_count() const { return Index{1} << (dim * depth); }
  double cell_side() const;
  double cell_volume() const;

  /// Row-major flat index of a cell (axis 0 varies slowest).
  Index flat(const Coords& cell) const;
  Coords unflat(Index flat_index) const;
  /// Finest cell containing a point of the box.
  Coords cell_of(const Point& x) const;

  bool operator==(const Lattice&) const = default;
};

/// Validating constructor; throws resource error beyond 2^24 cells.
Lattice make_lattice(int dim, int depth);

/// Half-open real box prod_k [lo_k, hi_k).
struct Box {
  int dim = 1;
  Point lo{};
  Point hi{};

  double volume() const;
  double side(int axis) const { return hi[axis] - lo[axis]; }
  bool empty() const;
  bool contains(const Box& other) const;
  bool contains(const Point& x) const;
  std::string str() const;
};

Box unit_box(int dim);
Box intersect(const Box& a, const Box& b);
/// Concentric dilation by `factor` (shrinks when factor < 1).
Box dilate(const Box& b, double factor);
/// Cartesian product of boxes in dimensions m and n.
Box product(const Box& first, const Box& second);

/// Cell-aligned box in integer cell coordinates, [lo_k, hi_k) per axis.
struct CellBox {
  int dim = 1;
  Coords lo{};
  Coords hi{};

  bool empty() const;
  Index cell_count() const;
  Box to_box(const Lattice& lat) const;
  bool operator==(const CellBox&) const = default;
};

/// Exact conversion; throws alignment error unless every face lies on a cell
/// boundary inside the closed unit box.
CellBox align(const Lattice& lat, const Box& box);
CellBox whole(const Lattice& lat);

/// d-dimensional prefix sums of a cell array, held in extended precision so
/// rectangle queries stay within 1e-12 of naive summation.
class MassTable {
 public:
  MassTable(const Lattice& lat, std::span<const double> values);

  /// Sum of value * cell_volume over the cells of `box`.
  double sum(const CellBox& box) const;
  /// Integral over an arbitrary real box of the piecewise-constant function
  /// (zero outside the unit box).
  double sum_clipped(const Box& box) const;

 private:
  long double corner(const Coords& node) const;
  long double cumulative(const Point& x) const;

  Lattice lat_;
  std::array<Index, kMaxDim> stride_{};
  std::vector<long double> prefix_;
};

class Weight {
 public:
  /// Throws invalid-value error on a negative or non-finite density.
  Weight(Lattice lat, std::vector<double> density);

  const Lattice& lattice() const { return lat_; }
  std::span<const double> density() const { return *density_; }
  double at(const Coords& cell) const { return (*density_)[lat_.flat(cell)]; }

  /// Prefix table of density^theta (theta = 1 is the plain density).
  /// Tables are built on first request and shared between copies.
  const MassTable& table(double theta = 1.0) const;
  void register_theta(double theta) const { (void)table(theta); }

  double integrate(const Box& box) const;
  double integrate(const CellBox& box) const;
  double power_integrate(const Box& box, double theta) const;
  double power_integrate(const CellBox& box, double theta) const;
  double total_mass() const { return integrate(whole(lat_)); }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<double, std::unique_ptr<const MassTable>> tables;
  };

  Lattice lat_;
  std::shared_ptr<const std::vector<double>> density_;
  std::shared_ptr<Cache> cache_;
};

class GridFunction {
 public:
  GridFunction(Lattice lat, std::vector<double> values);

  const Lattice& lattice() const { return lat_; }
  std::span<const double> values() const { return values_; }
  double at(const Coords& cell) const { return values_[lat_.flat(cell)]; }

 private:
  Lattice lat_;
  std::vector<double> values_;
};

/// Density f * u, so that integrating it over R gives the integral of f dmu.
Weight times(const GridFunction& f, const Weight& w);

/// (sum f^p * u * cellvolume)^(1/p).
double lp_norm(const GridFunction& f, const Weight& w, double p);

/// Constant extension of a density to a finer lattice of the same dimension.
Weight refine(const Weight& w, int new_depth);
GridFunction refine(const GridFunction& f, int new_depth);

Weight lebesgue(const Lattice& lat);

}  // namespace dyadlab
