#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/grids.hpp"
#include "dyadlab/kernel.hpp"
#include "dyadlab/lattice.hpp"

namespace dyadlab {

struct Exponents {
  double p = 2.0;
  double q = 4.0;
  double theta = 1.0;
  double alpha = 0.5;
  double beta = 0.5;
  int m = 1;
  int n = 1;
  std::optional<double> r;
  std::optional<double> s;

  double p_prime() const { return p / (p - 1.0); }
  double q_prime() const { return q / (q - 1.0); }
  /// 1/theta' = 1 - 1/theta (0 when theta = 1).
  double inv_theta_prime() const { return 1.0 - 1.0 / theta; }

  /// Throws domain error naming the first violated constraint.
  void validate() const;
};

/// |Q|_{mu,theta} = |Q|^(1/theta') (int_Q u^theta)^(1/theta) on a
/// cell-aligned box; theta = 1 gives |Q|_mu.
double bump_cube(const Weight& w, const Box& Q, double theta);
/// Same functional on an arbitrary box; the weight is extended by zero
/// outside the unit box while |Q| stays the full volume.
double bump_box(const Weight& w, const Box& Q, double theta);
double bump_rect(const Weight& w, const Box& I, const Box& J, double theta);

/// Density x -> |J|_{mu_x,theta} on the first `first_dims` axes, where mu_x is
/// the slice of w at x and J is cell-aligned in the remaining axes.
Weight slice_profile(const Box& J, const Weight& w, int first_dims, double theta);

/// A rectangle I x J drawn from grid pair `pair` of a family. Cube families
/// (n = 0) carry a 0-dimensional J.
struct Rect {
  Box I;
  Box J;
  int pair = 0;
  GridCube ci;
  GridCube cj;

  Box box() const { return product(I, J); }
  std::string str() const;
};

/// Rectangles I x J from a list of grid pairs with levels [0, levels_first]
/// and [0, levels_second], keeping the cubes that meet the unit box.
struct RectFamily {
  int m = 1;
  int n = 1;
  std::vector<std::pair<DyadicGrid, DyadicGrid>> pairs;
  int levels_first = 0;
  int levels_second = 0;

  std::vector<Rect> enumerate() const;
};

/// Standard dyadic rectangles of a product lattice of the given depth.
RectFamily dyadic_rect_family(int m, int n, int depth);
/// The 3^m * 3^n products of one-third grids.
RectFamily onethird_rect_family(int m, int n, int depth);
/// Dyadic cubes of a `dim`-dimensional lattice (n = 0).
RectFamily dyadic_cube_family(int dim, int depth);

enum class CharKind { one_param, product_bump, half_bump_omega, no_bump };

const char* to_string(CharKind kind);
CharKind parse_char_kind(const std::string& text);

struct CharOptions {
  /// no_bump: replace the family by the one-third rectangle families of the
  /// same dimensions and depth.
  bool include_shifted = true;
  /// one_param: the m in |I|^(alpha/m - 1/p + 1/q); 0 means the dimension.
  int one_param_m = 0;
};

struct CharResult {
  CharKind kind = CharKind::product_bump;
  double value = 0.0;
  std::optional<Rect> witness;
  long family_size = 0;
};

/// Single term of the supremum defining a characteristic.
double characteristic_term(CharKind kind, const KernelHandle& K, const Weight& sigma,
                           const Weight& omega, const Exponents& exps, const Rect& R,
                           const CharOptions& opts = {});

/// Supremum over a finite family, with the first rectangle attaining it
/// (ties within 1e-12 relative keep the earlier rectangle).
CharResult characteristic(CharKind kind, const KernelHandle& K, const Weight& sigma,
                          const Weight& omega, const Exponents& exps,
                          const std::vector<Rect>& family, const CharOptions& opts = {});
CharResult characteristic(CharKind kind, const KernelHandle& K, const Weight& sigma,
                          const Weight& omega, const Exponents& exps, const RectFamily& family,
                          const CharOptions& opts = {});

}  // namespace dyadlab
