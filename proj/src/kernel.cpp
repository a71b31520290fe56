#include "musvm/kernel.hpp"

#include "musvm/parallel.hpp"

namespace musvm {

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw Error(ErrorKind::invalid_input, "rbf kernel requires gamma > 0");
  }
}

GramMatrix gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& samples) {
  spec.validate();
  const Index n = samples.cols();
  if (n == 0) throw Error(ErrorKind::invalid_input, "gram_matrix: empty sample list");

  GramMatrix gram{Eigen::MatrixXd(n, n), spec};
  // Each task owns column j and fills rows 0..j; the mirror is written afterwards.
  parallel_for(n, [&](Index j) {
    for (Index i = 0; i <= j; ++i) {
      gram.values(i, j) = kernel_eval(spec, samples.col(i), samples.col(j));
    }
  });
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) gram.values(i, j) = gram.values(j, i);
  }
  return gram;
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& a,
                             const Eigen::MatrixXd& b) {
  spec.validate();
  if (a.rows() != b.rows()) throw Error(ErrorKind::invalid_input, "cross_kernel: dimension mismatch");
  Eigen::MatrixXd out(a.cols(), b.cols());
  parallel_for(b.cols(), [&](Index j) {
    for (Index i = 0; i < a.cols(); ++i) out(i, j) = kernel_eval(spec, a.col(i), b.col(j));
  });
  return out;
}

}  // namespace musvm
