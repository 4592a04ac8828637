#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dyadlab/bump.hpp"
#include "dyadlab/grids.hpp"
#include "dyadlab/kernel.hpp"
#include "dyadlab/lattice.hpp"

namespace dyadlab {

struct FormParts {
  double good_good = 0.0;
  double any_bad = 0.0;  // J bad, I arbitrary
  double bad_any = 0.0;  // I bad, J arbitrary
  double bad_bad = 0.0;  // counted in both of the previous parts

  double sum() const { return good_good + any_bad + bad_any; }
};

struct FormValue {
  double total = 0.0;
  std::optional<FormParts> parts;
  long family_size = 0;
};

/// sum_R K(R) (int_R f dsigma) (int_R g domega); rectangles may stick out of
/// the unit box (weights extend by zero).
FormValue bilinear_form(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                        const GridFunction& f, const GridFunction& g,
                        const std::vector<Rect>& family);

/// Same sum split by goodness of I (in the pair's first grid) and of J (in
/// the second). Cubes are classified permissively: a cube without ancestors
/// r levels up is good.
FormValue goodbad_split(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                        const GridFunction& f, const GridFunction& g,
                        const GoodnessParams& goodness, const RectFamily& family);

/// |x-u|^(alpha/m-1) |y-v|^(beta/n-1) (Euclidean distances).
double continuum_kernel(const Point& x, const Point& y, const Point& u, const Point& v,
                        const KernelHandle& K);

/// sum over the 3^m * 3^n one-third grid pairs and levels [0, depth] of
/// K(R) 1_R(x,y) 1_R(u,v). Throws precondition error when x and u (or y and
/// v) share a finest cell of the depth-`depth` lattice.
double surrogate_kernel(const Point& x, const Point& y, const Point& u, const Point& v,
                        const KernelHandle& K, int depth);

/// Discrete product fractional integral on an (m+n)-dimensional lattice:
/// value at each cell center of sum_cells |x-u|^(a) |y-t|^(b) f(u,t) vol,
/// a = alpha/m - 1, b = beta/n - 1, where a factor whose two cells coincide
/// is replaced by its average over the cell.
GridFunction apply_frac_integral(const GridFunction& f, double alpha, double beta, int m, int n);

/// (1/|Q|) int_Q |z - center|^a dz over a cube of side h in dimension m.
double cell_average_power(double a, int m, double h);

struct NormOptions {
  int iterations = 25;
  int random_starts = 4;
  /// Starts from (1_R, 1_R) for the rectangles with the largest
  /// K(R) |R|_sigma^(1/p') |R|_omega^(1/q).
  int indicator_starts = 6;
  std::uint64_t seed = 0;
  /// Stop a start once an iteration improves by less than this fraction.
  double tolerance = 1e-12;
};

struct TraceRow {
  int start = 0;
  int iteration = 0;
  double objective = 0.0;
  std::uint64_t seed = 0;
};

struct NormEstimate {
  /// Largest B(f,g) / (||f||_{L^p(sigma)} ||g||_{L^q'(omega)}) seen.
  double lower_bound = 0.0;
  std::vector<TraceRow> trace;
  std::optional<GridFunction> best_f;  // ||f||_{L^p(sigma)} = 1
  std::optional<GridFunction> best_g;  // ||g||_{L^q'(omega)} = 1
};

/// Alternating maximization of the normalized form over a family of
/// cell-aligned rectangles. Each half step takes the exact maximizer
/// (g proportional to (Tf)^(q-1), f to (T*g)^(p'-1)), so every start's
/// objective is nondecreasing.
NormEstimate norm_estimate(const KernelHandle& K, const Weight& sigma, const Weight& omega,
                           const Exponents& exps, const std::vector<Rect>& family,
                           const NormOptions& opts = {});

}  // namespace dyadlab
