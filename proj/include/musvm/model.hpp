#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "musvm/dual_solver.hpp"
#include "musvm/kernel.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// Trained predictor f_l(x) = sum_i alpha_il K(x_i, x).
struct Model {
  Eigen::MatrixXd support_samples;  // d x |SV|
  Eigen::MatrixXd alpha;            // |SV| x L
  KernelSpec kernel;
  int num_classes = 0;
  Index dim = 0;
  Hyperparams params;
  /// External label of each internal class id; empty means 1..L.
  std::vector<int> label_map;

  Index support_count() const { return support_samples.cols(); }
};

/// Training rows (cost C, margins 1 - [l == y]) followed by L copies of every
/// universum sample (cost C*, margins -delta (1 - [l == copy label])).
AugmentedProblem augment(const Dataset& train, const UniversumSet& universum,
                         const Hyperparams& params);

/// Builds a model from the rows of `solution` with at least one nonzero alpha.
Model make_model(const AugmentedProblem& problem, const DualSolution& solution,
                 const Hyperparams& params, std::vector<int> label_map = {});

Eigen::VectorXd decision_values(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Decision values for every column of `x`, returned as L x cols.
Eigen::MatrixXd decision_matrix(const Model& model, const Eigen::MatrixXd& x);

/// Index of the largest entry; ties go to the smallest index.
int argmax_class(const Eigen::Ref<const Eigen::VectorXd>& values);

/// 0-based predicted class.
int predict(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x);
std::vector<int> predict_all(const Model& model, const Eigen::MatrixXd& x);

/// Fraction of samples whose prediction differs from the label.
double error_rate(const Model& model, const Dataset& data);

/// 1/2 sum_l |w_l|^2 + sum_i C_i xi_i with
/// xi_i = max(0, max_l (e_il - f_{y_i}(x_i) + f_l(x_i))).
double primal_objective(const Model& model, const AugmentedProblem& problem);

enum class SvType : std::uint8_t { none, type1, type2 };

struct SvPartition {
  std::vector<Index> sv1;
  std::vector<Index> sv2;
  std::vector<Index> non_sv;
  std::vector<SvType> type;  // per row
};

/// Relative tolerance for SV classification: tau_sv = kSvTolerance * C_i.
inline constexpr double kSvTolerance = 1e-6;

/// Type 1: 0 < alpha_{i,y_i} < C_i, Type 2: alpha_{i,y_i} = C_i, both tested
/// with tolerance tau_sv.
SvPartition classify_support_vectors(const DualSolution& solution, const AugmentedProblem& problem);

}  // namespace musvm
