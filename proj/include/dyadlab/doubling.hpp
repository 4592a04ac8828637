#pragma once

#include <optional>
#include <vector>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

enum class DoublingMode { cube, rectangle, product_reverse, strong };

/// An outer/inner rectangle pair together with the mass ratio it realizes:
/// |outer|/|inner| for doubling witnesses (s = t = 0, axis = -1), otherwise
/// |inner|/|outer| (a shrink or a half).
struct RatioWitness {
  Box outer;
  Box inner;
  int s = 0;  // shrink depth in the first factor (or the only factor)
  int t = 0;  // shrink depth in the second factor
  int axis = -1;  // strong mode: the halved axis
  double ratio = 0.0;
};

/// Largest shrink ratio |(2^-s I) x (2^-t J)| / |I x J| seen at one (s, t).
struct ScaleMax {
  int s = 0;
  int t = 0;
  RatioWitness witness;
};

/// Measured reverse-doubling constants: ratios are bounded by
/// C * 2^(-eps1*s - eps2*t). The exponents are the least-squares decay rates
/// of the per-scale maxima; C is the smallest constant making the bound hold
/// at every tested scale, attained by `constant_witness`.
struct ReverseDoublingFit {
  bool product = false;
  double eps1 = 0.0;
  double eps2 = 0.0;  // product case only
  double C = 0.0;
  RatioWitness constant_witness;
  std::vector<ScaleMax> per_scale;

  /// Positive decay in every factor.
  bool holds() const;
  double bound(int s, int t) const;
};

struct DoublingReport {
  DoublingMode mode = DoublingMode::cube;
  /// +inf flags INFINITE (a null set whose double has positive mass).
  std::optional<double> doubling_constant;
  RatioWitness doubling_witness;
  std::optional<ReverseDoublingFit> reverse;
  /// Empty means ABSENT (some half carries all of its rectangle's mass).
  std::optional<double> strong_beta;
  RatioWitness strong_witness;
  long scanned = 0;

  bool doubling_infinite() const;
};

/// Scans the extremal ratios that define each doubling-type constant.
///
/// cube:            dyadic cubes Q with 2Q inside the box; also fits the
///                  cube reverse-doubling constants over dyadic cubes.
/// rectangle:       every cell-aligned rectangle with even side lengths whose
///                  concentric double lies inside the box.
/// product_reverse: dyadic rectangles I x J split after `first_dims` axes
///                  (0 = automatic: d/2, or the cube case when d = 1).
/// strong:          every cell-aligned rectangle with an even side along some
///                  axis, halved along that axis.
///
/// 0/0 ratios are skipped; x/0 with x > 0 is INFINITE.
DoublingReport doubling_report(const Weight& w, DoublingMode mode, int first_dims = 0);

/// Re-evaluates the mass ratio recorded in a witness.
double reevaluate(const Weight& w, const RatioWitness& witness);

/// Constants of the strong-reverse-doubling => doubling chain: N >= 2 minimal
/// with beta^N < 1/4, gamma = 2^(N-1)/(2^(N-1)-1), M minimal with
/// gamma^M >= 2, C = 2^M (may overflow to +inf for beta near 1).
struct StrongRdBound {
  int N = 0;
  double gamma = 0.0;
  int M = 0;
  double C = 0.0;
};

StrongRdBound strong_rd_doubling_bound(double beta);

const char* to_string(DoublingMode mode);
DoublingMode parse_doubling_mode(const std::string& text);

}  // namespace dyadlab
