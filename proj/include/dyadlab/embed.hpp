#pragma once

#include <functional>
#include <vector>

#include "dyadlab/doubling.hpp"
#include "dyadlab/grids.hpp"
#include "dyadlab/lattice.hpp"

namespace dyadlab {

// Everything here runs over the standard dyadic cubes of the weight's
// lattice, levels 0..depth.

struct StoppingFamily {
  int k = 0;
  std::vector<GridCube> cubes;
  std::vector<Box> boxes;
  /// (1/|M|_{mu,theta}) int_M f dmu for each selected cube.
  std::vector<double> averages;
  /// Indices of cubes where (1/|M|_{mu,theta}) int_{M and f > 2^(k-1)} f dmu
  /// fails to exceed 2^(k-1).
  std::vector<std::size_t> refined_violations;
};

/// Maximal dyadic cubes whose bump-normalized average of f exceeds 2^k
/// (strictly). Cubes with zero bump are never selected.
StoppingFamily stopping_cubes(const GridFunction& f, const Weight& w, double theta, int k);

struct CarlesonReport {
  double lhs_sum = 0.0;
  double rhs_bound = 0.0;
  double explicit_constant = 0.0;
  double ratio = 0.0;
  Box witness;
  long parents = 0;

  bool pass() const { return ratio <= 1.0 + 1e-9; }
};

/// sum_{dyadic Q in P} |Q|_{mu,theta}^rho against
/// (1 - 2^(-d (rho-1)/theta'))^-1 |P|_{mu,theta}^rho. Needs theta > 1, rho > 1.
CarlesonReport automatic_carleson(const Box& P, const Weight& w, double theta, double rho);
/// Worst ratio over every dyadic parent cube P.
CarlesonReport automatic_carleson_worst(const Weight& w, double theta, double rho);

/// (r+1) 2^(d r) + C / (1 - 2^(-eta (1-eps) (rho-1))).
double good_carleson_constant(int dim, const GoodnessParams& goodness, double rho,
                              const ReverseDoublingFit& fit);

/// sum_{good dyadic Q in P} |Q|_mu^rho against good_carleson_constant * |P|_mu^rho.
/// Goodness is taken in the standard grid with levels [0, depth]. Throws
/// precondition error (naming the fit's witness) when the fit does not show
/// reverse doubling.
CarlesonReport good_carleson(const Box& P, const Weight& w, double rho,
                             const GoodnessParams& goodness, const ReverseDoublingFit& fit);
CarlesonReport good_carleson_worst(const Weight& w, double rho, const GoodnessParams& goodness,
                                   const ReverseDoublingFit& fit);

struct EmbedResult {
  double lhs = 0.0;
  double rhs_norm = 0.0;  // ||f||_{L^s(mu)}
  double ratio = 0.0;     // lhs / rhs_norm (0 when f vanishes mu-a.e.)
};

/// {sum_Q |Q|_{mu,theta}^(r/s) ((1/|Q|_{mu,theta}) int_Q f dmu)^r}^(1/r).
/// Needs theta > 1 and 1 < s < r.
EmbedResult embed_check_cubes(const GridFunction& f, const Weight& w, double theta, double r,
                              double s);

/// Rectangle version over the standard dyadic rectangles I x J of a product
/// lattice (first `first_dims` axes carry I), with the slice-wise proof chain
///   lhs^r = sum_J lhs_J^r <= c1^r * intermediate,
///   intermediate^(s/r) <= middle <= c2^s ||f||_s^s,
/// where intermediate = sum_J (int (F^J)^s dJ_{mu,theta})^(r/s), middle is
/// the Minkowski-swapped integral, c1 the worst per-J cube ratio and c2 the
/// worst per-slice cube ratio.
struct RectEmbedResult {
  EmbedResult result;
  double lhs_r_by_slices = 0.0;  // sum_J lhs_J^r
  double intermediate = 0.0;
  double middle = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double norm_s_power = 0.0;  // ||f||_s^s
  double r = 0.0;
  double s = 0.0;

  /// All links of the chain hold with relative slack 1e-9.
  bool chain_holds() const;
};

RectEmbedResult embed_check_rects(const GridFunction& f, const Weight& w, double theta, double r,
                                  double s, int first_dims);

/// Plain rectangle sum only (no chain); optional filter keeps a subset of
/// the rectangles, identified by their I and J cubes.
double embed_rect_lhs(const GridFunction& f, const Weight& w, double theta, double r, double s,
                      int first_dims,
                      const std::function<bool(const GridCube&, const GridCube&)>& keep = {});

}  // namespace dyadlab
