#pragma once

#include <functional>
#include <string>

#include "dyadlab/lattice.hpp"

namespace dyadlab {

/// Nonnegative rectangle kernel K(I x J).
class KernelHandle {
 public:
  using Fn = std::function<double(const Box& I, const Box& J)>;

  /// K(I x J) = |I|^(alpha/m - 1) |J|^(beta/n - 1) with |.| the volume.
  /// Requires 0 < alpha < m and 0 < beta < n.
  static KernelHandle product_frac(double alpha, double beta, int m, int n);
  static KernelHandle custom(Fn fn, std::string name);

  double operator()(const Box& I, const Box& J) const;

  bool is_product_frac() const { return !fn_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int m() const { return m_; }
  int n() const { return n_; }
  const std::string& name() const { return name_; }

 private:
  double alpha_ = 0.0;
  double beta_ = 0.0;
  int m_ = 1;
  int n_ = 1;
  Fn fn_;
  std::string name_;
};

}  // namespace dyadlab
