#include "dyadlab/kernel.hpp"

#include <cmath>
#include <sstream>

#include "dyadlab/error.hpp"

namespace dyadlab {

KernelHandle KernelHandle::product_frac(double alpha, double beta, int m, int n) {
  if (m < 1 || n < 1 || m + n > kMaxDim) fail(ErrorKind::domain, "kernel needs m, n >= 1, m + n <= 4");
  if (!(alpha > 0.0 && alpha < m)) {
    fail(ErrorKind::domain, "kernel needs 0 < alpha < m (alpha = " + std::to_string(alpha) +
                                ", m = " + std::to_string(m) + ")");
  }
  if (!(beta > 0.0 && beta < n)) {
    fail(ErrorKind::domain, "kernel needs 0 < beta < n (beta = " + std::to_string(beta) +
                                ", n = " + std::to_string(n) + ")");
  }
  KernelHandle k;
  k.alpha_ = alpha;
  k.beta_ = beta;
  k.m_ = m;
  k.n_ = n;
  std::ostringstream os;
  os << "product_frac(" << alpha << ',' << beta << ',' << m << ',' << n << ')';
  k.name_ = os.str();
  return k;
}

KernelHandle KernelHandle::custom(Fn fn, std::string name) {
  if (!fn) fail(ErrorKind::domain, "custom kernel needs a callable");
  KernelHandle k;
  k.fn_ = std::move(fn);
  k.name_ = std::move(name);
  return k;
}

double KernelHandle::operator()(const Box& I, const Box& J) const {
  if (fn_) {
    const double v = fn_(I, J);
    if (!(v >= 0.0)) fail(ErrorKind::contract, "custom kernel returned a negative value");
    return v;
  }
  return std::pow(I.volume(), alpha_ / m_ - 1.0) * std::pow(J.volume(), beta_ / n_ - 1.0);
}

}  // namespace dyadlab
