#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "musvm/musvm.hpp"

namespace th {

using musvm::Index;

// Kernel written out by hand, independent of the library's evaluator.
inline double naive_kernel(const musvm::KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  double s = 0.0;
  if (spec.kind == musvm::KernelKind::linear) {
    for (Index j = 0; j < x.size(); ++j) s += x(j) * z(j);
    return s;
  }
  for (Index j = 0; j < x.size(); ++j) s += (x(j) - z(j)) * (x(j) - z(j));
  return std::exp(-spec.gamma * s);
}

inline Eigen::MatrixXd naive_gram(const musvm::KernelSpec& spec, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd k(x.cols(), x.cols());
  for (Index i = 0; i < x.cols(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) k(i, j) = naive_kernel(spec, x.col(i), x.col(j));
  }
  return k;
}

inline Eigen::VectorXd naive_decision(const musvm::Model& m, const Eigen::VectorXd& x) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m.num_classes);
  for (Index i = 0; i < m.support_count(); ++i) {
    const double k = naive_kernel(m.kernel, m.support_samples.col(i), x);
    for (int l = 0; l < m.num_classes; ++l) f(l) += m.alpha(i, l) * k;
  }
  return f;
}

// W(a) by explicit triple loop.
inline double naive_dual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& e, const Eigen::MatrixXd& k) {
  double quad = 0.0;
  double lin = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.rows(); ++j) {
      for (Index l = 0; l < a.cols(); ++l) quad += a(i, l) * a(j, l) * k(i, j);
    }
    for (Index l = 0; l < a.cols(); ++l) lin += a(i, l) * e(i, l);
  }
  return -0.5 * quad - lin;
}

inline musvm::Dataset make_data(const Eigen::MatrixXd& x, std::vector<int> labels, int L) {
  musvm::Dataset d;
  d.samples = x;
  d.labels = std::move(labels);
  d.num_classes = L;
  return d;
}

inline musvm::UniversumSet no_universum(Index dim) { return {Eigen::MatrixXd(dim, 0)}; }

inline musvm::SolverOptions tol(double t) {
  musvm::SolverOptions o;
  o.tol = t;
  return o;
}

inline Eigen::MatrixXd random_matrix(Index r, Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  }
  return m;
}

}  // namespace th
