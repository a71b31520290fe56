#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "musvm/types.hpp"

namespace musvm {

/// K(x, z): the dot product for linear kernels, exp(-gamma ||x - z||^2) for RBF.
template <typename DerivedX, typename DerivedZ>
double kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<DerivedX>& x,
                   const Eigen::MatrixBase<DerivedZ>& z) {
  if (x.size() != z.size()) {
    throw Error(ErrorKind::invalid_input, "kernel_eval: dimension mismatch (" +
                                              std::to_string(x.size()) + " vs " +
                                              std::to_string(z.size()) + ")");
  }
  switch (spec.kind) {
    case KernelKind::linear:
      return x.dot(z);
    case KernelKind::rbf:
      return std::exp(-spec.gamma * (x - z).squaredNorm());
  }
  return 0.0;
}

/// Squared feature-space distance K(x,x) + K(z,z) - 2K(x,z), clamped at zero.
template <typename DerivedX, typename DerivedZ>
double kernel_distance_sq(const KernelSpec& spec, const Eigen::MatrixBase<DerivedX>& x,
                          const Eigen::MatrixBase<DerivedZ>& z) {
  const double d = kernel_eval(spec, x, x) + kernel_eval(spec, z, z) - 2.0 * kernel_eval(spec, x, z);
  return std::max(0.0, d);
}

/// Dense symmetric kernel matrix over a fixed sample list.
struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec spec;

  Index size() const { return values.rows(); }
  double operator()(Index i, Index j) const { return values(i, j); }
};

/// Kernel matrix of the columns of `samples`. Entries are evaluated
/// independently (no reductions across entries), so the result is identical
/// for any thread count.
GramMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& samples);

/// Rectangular kernel block K(a_i, b_j) for the columns of a and b.
Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b);

}  // namespace musvm
