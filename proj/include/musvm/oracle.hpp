#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "musvm/dual_solver.hpp"
#include "musvm/kernel.hpp"
#include "musvm/model.hpp"
#include "musvm/span_bound.hpp"
#include "musvm/types.hpp"

// Slow reference implementations. None of them call the decomposition solver
// or the closed-form span code, apart from exact_loo_error which is defined
// in terms of re-solves.
namespace musvm::oracle {

struct OracleConfig {
  double step_size = 0.0;  // <= 0: 1 / Lipschitz estimate
  int max_iters = 200000;
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

/// Size cap for brute_force_dual.
inline constexpr Index kBruteForceCap = 200;

/// Accelerated projected gradient ascent on the dual with row-wise Euclidean
/// projections (bisection on the water level).
DualSolution brute_force_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                              const OracleConfig& cfg = {},
                              const std::optional<Eigen::MatrixXd>& initial = std::nullopt);

/// Euclidean projection of v onto {sum a = 0, a_l <= bound_l}.
Eigen::VectorXd project_capped(const Eigen::Ref<const Eigen::VectorXd>& v,
                               const Eigen::Ref<const Eigen::VectorXd>& bound);

/// Euclidean projection of v onto {sum a = 0, a_l >= lower_l} with components
/// where `fixed_zero` is set forced to 0.
Eigen::VectorXd project_floored(const Eigen::Ref<const Eigen::VectorXd>& v,
                                const Eigen::Ref<const Eigen::VectorXd>& lower,
                                const std::vector<char>& fixed_zero);

inline constexpr Index kLooCap = 500;

struct LooResult {
  double error = 0.0;
  std::vector<int> predictions;  // 0-based, per training row
};

/// Leave-one-out by re-solving with each training row pinned at zero.
LooResult exact_loo(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                    const SolverOptions& options = {});
double exact_loo_error(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                       const SolverOptions& options = {});

/// Leave-one-out by deleting each training row and retraining from scratch.
LooResult exact_loo_by_deletion(const Dataset& train, const UniversumSet& universum,
                                const Hyperparams& params, const SolverOptions& options = {});

struct Lemma1Span {
  double span = 0.0;     // S_t
  double span_sq = 0.0;  // S_t^2
  double fw_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd beta;        // rows x L
  bool inequalities_active = false;  // some lower bound is tight at beta
};

inline constexpr Index kLemma1Cap = 100;

/// Inequality-constrained span: min sum_ij (sum_l b_il b_jl) K_ij over b with b_t = alpha_t,
/// b = 0 outside SV1, and for r in SV1 \ {t}: sum_l b_rl = 0,
/// b_{r,y_r} >= alpha_{r,y_r} - C_r, b_rl >= alpha_rl where alpha_rl < 0 (l != y_r),
/// b_rl = 0 for the remaining components.
Lemma1Span span_qp_lemma1(const DualSolution& solution, const AugmentedProblem& problem,
                          const GramMatrix& gram, Index t, double tol = 1e-8, int max_iters = 2000000);

/// Is b feasible for the span_qp_lemma1 constraint set (within tol)?
bool lemma1_feasible(const DualSolution& solution, const AugmentedProblem& problem, Index t,
                     const Eigen::MatrixXd& beta, double tol = 1e-9);

struct KktSpan {
  double span_sq = 0.0;
  bool pseudo_inverse = false;
  Eigen::MatrixXd beta;  // rows x L
};

/// Equality-only span by a direct dense KKT solve: rows sv1 \ {t} free with
/// sum-zero rows, b_t = alpha_t.
KktSpan span_kkt_oracle(const DualSolution& solution, const GramMatrix& gram, Index t,
                        const std::vector<Index>& sv1);

/// Diameter of the smallest feature-space ball holding all columns of x.
double enclosing_ball_diameter(const KernelSpec& spec, const Eigen::MatrixXd& x, double tol = 1e-9,
                               int max_iters = 10000000);

struct BinaryUsvm {
  Eigen::MatrixXd samples;  // training then universum columns
  Eigen::VectorXd coef;     // w = sum coef_i phi(x_i)
  KernelSpec kernel;
  double objective = 0.0;
  int iterations = 0;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

inline constexpr Index kBinaryCap = 400;

/// Binary universum SVM without bias, hinge loss on training samples (class 0
/// is +1) and delta-insensitive loss on universum samples:
///   min 1/2|w|^2 + 2C sum xi + 2C* sum zeta.
BinaryUsvm binary_usvm_oracle(const Dataset& train, const UniversumSet& universum,
                              const Hyperparams& params, const OracleConfig& cfg = {});

struct Theorem1Result {
  double bound = 0.0;
  double D = 0.0;
  std::map<Index, double> spans;  // S_t for SV1 training rows
  SpanReport report;
};

/// QP-span leave-one-out bound with D from enclosing_ball_diameter over the training rows
/// and spans from span_qp_lemma1.
Theorem1Result theorem1_bound(const AugmentedProblem& problem, const GramMatrix& gram,
                              const DualSolution& solution, double qp_tol = 1e-8);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Eigen::MatrixXd& a, std::uint64_t seed, int iters = 500);

}  // namespace musvm::oracle
