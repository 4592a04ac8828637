#pragma once

// Standard, randomly shifted and one-third dyadic grids on the line and
// their products. A level-l cube of a grid is
//   prod_k [ i_k 2^-l + o_k(l), (i_k + 1) 2^-l + o_k(l) )
// where o_k(l) is the grid's offset on axis k at level l.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

/// Shift bits beta_i for levels i in [lo, hi]. The level-l offset is
/// sum_{l < i <= hi} 2^-i beta_i, so the finest level is never shifted.
struct ShiftParam {
  int lo = 0;
  int hi = 0;
  std::vector<std::uint8_t> bits;  // bits[i - lo]

  double offset(int level) const;
  std::string bitstring() const;
};

ShiftParam sample_shift(int lo, int hi, std::uint64_t seed);
ShiftParam zero_shift(int lo, int hi);

struct GridCube {
  int level = 0;
  Coords index{};

  bool operator==(const GridCube&) const = default;
};

class DyadicGrid {
 public:
  enum class Kind { standard, shifted, third };

  static DyadicGrid standard(int dim, int lo, int hi);
  /// One ShiftParam per axis, all with the level range [lo, hi].
  static DyadicGrid shifted(std::vector<ShiftParam> shifts);
  /// One-third grid number `k` in [0, 3^dim): base-3 digit u_a of k (axis 0
  /// least significant) gives the offset (-1)^l (u_a / 3) 2^-l on axis a.
  /// Offsets follow a formula, so every integer level is available; [lo, hi]
  /// only bounds the levels enumerated by callers.
  static DyadicGrid third(int dim, int k, int lo, int hi);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int third_index() const { return third_; }
  const std::vector<ShiftParam>& shifts() const { return shifts_; }

  double offset(int axis, int level) const;
  double side(int level) const;
  Box box(const GridCube& q) const;
  /// 1D interval of `q` along `axis`.
  std::pair<double, double> interval(const GridCube& q, int axis) const;

  GridCube locate(const Point& x, int level) const;
  /// Ancestor `up` levels above (up = 0 is the cube itself).
  GridCube ancestor(const GridCube& q, int up) const;
  /// Range [first, last] of indices of level-`level` cubes meeting [0,1) on `axis`.
  std::pair<Index, Index> index_range(int level, int axis) const;
  /// Every level-`level` cube meeting the unit box.
  std::vector<GridCube> cubes_meeting_box(int level) const;

  /// Restriction of the grid to `axis` as a 1D grid.
  DyadicGrid axis_grid(int axis) const;
  /// Offsets are multiples of 2^-depth (cubes at levels <= depth are unions
  /// of lattice cells, up to clipping to the unit box).
  bool aligned_to(int depth) const;

  /// `GRID1 dim=<d> kind=<std|shift|third:k> levels=<lo>..<hi> beta=<bits>`
  /// with comma-separated per-axis bitstrings (`-` when not shifted).
  std::string descriptor() const;

 private:
  int dim_ = 1;
  Kind kind_ = Kind::standard;
  int lo_ = 0;
  int hi_ = 0;
  int third_ = 0;
  std::array<int, kMaxDim> digits_{};
  std::vector<ShiftParam> shifts_;
};

DyadicGrid parse_grid_descriptor(const std::string& text);

/// The 3^dim one-third grids.
std::vector<DyadicGrid> onethird_grids(int dim, int lo, int hi);

/// Exhaustive tiling and nesting check over levels [lo, hi] restricted to
/// the unit box; returns a description of the first violation.
std::optional<std::string> check_grid_structure(const DyadicGrid& grid);

struct Sandwich {
  int grid = 0;  // index into onethird_grids
  GridCube cube;
  Box box;
  Box ancestor_box;  // the j-th ancestor
};

/// A one-third grid cube I with l(I) <= 18 l(P), 3P inside I, and 2^j P
/// inside the j-th ancestor of I. P must be a cube (equal sides).
/// Throws contract error if the search finds nothing.
Sandwich sandwich(const Box& P, int j);

/// Side of the smallest grid cube (levels [lo, hi]) containing both points:
/// 2^-hi when they share a finest cube, 1 when they split already at level lo.
double dyadic_distance(const Point& x, const Point& u, const DyadicGrid& grid);

struct GoodnessParams {
  double eps = 0.25;
  int r = 8;
};

void validate(const GoodnessParams& params);

/// 1D test: distance from [a,b) to the skeleton {c, (c+e)/2, e} of [c,e)
/// exceeds 2 l(J)^eps l(K)^(1-eps). Distance is 0 when a skeleton point lies
/// in the closed interval [a,b].
bool good_in(double a, double b, double c, double e, double eps);

/// Per-axis goodness of `cube` against every ancestor at least r levels up
/// inside the grid's level range (vacuously true when none exist).
bool classify_good(const GridCube& cube, const GoodnessParams& params, const DyadicGrid& grid);

/// As classify_good, but throws scope error when r exceeds the grid's level
/// span so that no cube can have a qualifying ancestor.
bool is_good(const GridCube& cube, const GoodnessParams& params, const DyadicGrid& grid);

struct BadProbability {
  double p_hat = 0.0;
  double half_width = 0.0;  // Wilson 95%
  long samples = 0;
  long members = 0;
  long bad = 0;
};

/// Fraction of uniformly shifted 1D grids (levels [0, fine_level]) in which
/// a fixed finest-level reference interval is bad. Sample i uses the shift
/// drawn from derive_seed(seed, i).
BadProbability bad_probability_mc(int r, double eps, long samples, std::uint64_t seed,
                                   int fine_level = 48);

}  // namespace dyadlab
