#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "musvm/kernel.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// Solution of the augmented multiclass dual
///
///   max_a  W(a) = -1/2 sum_{i,j} sum_l a_il a_jl K_ij - sum_{i,l} a_il e_il
///   s.t.   sum_l a_il = 0,   a_il <= C_i [l == y_i].
struct DualSolution {
  Eigen::MatrixXd alpha;  // rows x L
  double objective = 0.0;
  int iterations = 0;
  double kkt_gap = 0.0;
  bool converged = false;
  std::vector<double> objective_history;  // W after every epoch
};

struct SolverOptions {
  /// Stop once the KKT violation psi drops to tol.
  double tol = 1e-3;
  int max_epochs = 100000;
  /// Rows held at alpha_i = 0 (the leave-one-out constraint).
  std::vector<Index> pinned_rows;
  /// Feasible starting point; infeasible rows are re-solved from the gradient.
  std::optional<Eigen::MatrixXd> warm_start;
  /// Epochs between full gradient recomputations.
  int refresh_interval = 50;
};

/// Block-coordinate ascent over rows; each row subproblem is solved exactly.
DualSolution solve_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                        const SolverOptions& options = {});

/// Exact maximizer of -(k_ii/2)||a||^2 - a.g subject to sum(a) = 0 and
/// a_l <= C_i [l == y_i]. `y` is 0-based.
Eigen::VectorXd subproblem_solve(const Eigen::Ref<const Eigen::VectorXd>& g, double k_ii,
                                 double c_i, int y);

/// G = K alpha + e, the gradient of the minimization form of the dual.
Eigen::MatrixXd dual_gradient(const AugmentedProblem& problem, const GramMatrix& gram,
                              const Eigen::MatrixXd& alpha);

/// psi = max_i [ max_l G_il - min_{l free} G_il ]; zero at the optimum.
/// Pinned rows are excluded.
double kkt_violation(const DualSolution& solution, const AugmentedProblem& problem,
                     const GramMatrix& gram, const std::vector<Index>& pinned_rows = {});

double dual_objective(const DualSolution& solution, const AugmentedProblem& problem,
                      const GramMatrix& gram);

/// Largest violation of sum_l a_il = 0 or of the upper bounds.
double feasibility_violation(const Eigen::MatrixXd& alpha, const AugmentedProblem& problem);

}  // namespace musvm
