#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "musvm/error.hpp"

namespace musvm {

using Index = Eigen::Index;

enum class KernelKind { linear, rbf };

/// Default RBF width, 2^-7.
inline constexpr double kDefaultGamma = 1.0 / 128.0;

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = kDefaultGamma;

  static KernelSpec linear() { return {KernelKind::linear, kDefaultGamma}; }
  static KernelSpec rbf(double gamma = kDefaultGamma) { return {KernelKind::rbf, gamma}; }

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

/// Labeled training data. Samples are stored one per column (d x n) and
/// labels are 0-based class ids in [0, num_classes).
struct Dataset {
  Eigen::MatrixXd samples;
  std::vector<int> labels;
  int num_classes = 0;

  Index size() const { return samples.cols(); }
  Index dim() const { return samples.rows(); }

  void validate() const;
};

/// Unlabeled universum samples, one per column. An empty set (m = 0)
/// turns every MU-SVM operation into its plain multiclass SVM counterpart.
struct UniversumSet {
  Eigen::MatrixXd samples;

  Index size() const { return samples.cols(); }
  Index dim() const { return samples.rows(); }
};

struct Hyperparams {
  double c = 1.0;
  double c_star = 0.0;
  double delta = 0.0;
  KernelSpec kernel;

  void validate() const;
};

enum class RowKind : std::uint8_t { training, universum };

/// Where an augmented row came from. For universum copies `source` is the
/// universum index and `artificial_label` the class the copy is labeled with.
struct RowOrigin {
  RowKind kind = RowKind::training;
  Index source = 0;
  int artificial_label = 0;
};

/// Training rows followed by L labeled copies of every universum sample.
struct AugmentedProblem {
  Eigen::MatrixXd samples;  // d x (n + mL)
  std::vector<int> labels;
  Eigen::VectorXd costs;
  Eigen::MatrixXd margins;  // (n + mL) x L
  Index n_train = 0;
  int num_classes = 0;
  std::vector<RowOrigin> origin;

  Index rows() const { return samples.cols(); }
  bool is_training(Index row) const { return row < n_train; }
};

}  // namespace musvm
