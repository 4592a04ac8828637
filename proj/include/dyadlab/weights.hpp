#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

/// Descriptor of a deterministic weight family.
struct WeightSpec {
  enum class Kind { constant, power, halfspace_cutoff, checkerboard, lognormal, strong_rd };

  Kind kind = Kind::constant;
  double value = 1.0;      // constant: c; power: exponent a; strong_rd: beta
  double contrast = 4.0;   // checkerboard: value on odd cells (even cells get 1)
  double roughness = 0.5;  // lognormal: std-dev of log density
  int level = 1;           // checkerboard level
  int base_depth = -1;     // lognormal: resolution of the random field (-1: lattice depth)
  std::uint64_t seed = 0;
  Point center{0.5, 0.5, 0.5, 0.5};  // power: singular point x0
  std::shared_ptr<const WeightSpec> base;  // halfspace_cutoff

  static WeightSpec constant(double c);
  static WeightSpec power(double a);
  static WeightSpec halfspace_cutoff(WeightSpec base);
  static WeightSpec checkerboard(int level, double contrast);
  static WeightSpec lognormal(std::uint64_t seed, double roughness, int base_depth = -1);
  static WeightSpec strong_rd(double beta, std::uint64_t seed);

  std::string str() const;
};

/// Parse "constant:1", "power:0.5", "halfspace:<spec>", "checkerboard:3:4",
/// "lognormal:<seed>:<roughness>[:<base_depth>]", "strong-rd:<beta>:<seed>".
WeightSpec parse_weight_spec(const std::string& text);

/// Same spec and seed give identical density arrays.
///
/// halfspace_cutoff keeps the base density on the orthant [1/2,1)^d and
/// zeroes it elsewhere. strong_rd draws smooth log-trigonometric factors per
/// axis and shrinks their amplitude until the measured half-mass fraction of
/// every even-length cell-aligned rectangle is at most beta.
Weight gen_weight(const Lattice& lat, const WeightSpec& spec);

}  // namespace dyadlab
