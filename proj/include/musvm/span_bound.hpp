#pragma once

#include <Eigen/Dense>

#include <map>
#include <vector>

#include "musvm/dual_solver.hpp"
#include "musvm/kernel.hpp"
#include "musvm/model.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// KKT matrix over Type 1 support vectors
///
///   H = [ K_SV1 kron I_L   A^T ]      A = I kron 1_L^T
///       [ A                0   ]
///
/// Rows that share a sample (the L copies of one universum point) are merged
/// into a single unit; `row_unit` maps each SV1 row to its unit.
struct HSystem {
  Eigen::MatrixXd H;      // assembled on request, units * (L + 1) square
  Eigen::MatrixXd H_inv;  // assembled on request
  std::vector<Index> sv1_order;
  std::vector<Index> row_unit;   // parallel to sv1_order
  std::vector<Index> unit_rep;   // a representative row per unit
  std::vector<Index> unit_size;  // SV1 rows merged into each unit
  Eigen::MatrixXd kernel;        // units x units, ridge included
  Eigen::MatrixXd kernel_inv;
  int num_classes = 0;
  double ridge = 0.0;
  bool pseudo_inverse = false;

  Index units() const { return kernel.rows(); }
  /// Unit holding `row`, or -1 when the row is not in SV1.
  Index unit_of(Index row) const;
};

/// Negative ridge selects the default 1e-10 * trace(K_SV1) / |SV1|.
inline constexpr double kDefaultRidge = -1.0;

/// One unit per row (no merging).
HSystem build_h_system(const std::vector<Index>& sv1, const GramMatrix& gram, int num_classes,
                       double ridge = kDefaultRidge, bool assemble = true);

/// Units merge universum copies of the same source sample.
HSystem build_h_system(const AugmentedProblem& problem, const SvPartition& partition,
                       const GramMatrix& gram, double ridge = kDefaultRidge, bool assemble = false);

/// S_t^2 = alpha_t^T [(H^-1)_tt]^-1 alpha_t for t in SV1. The block is
/// singular on 1_L, so it is inverted on the sum-zero subspace where alpha_t lives.
double span_sv1(Index t, const HSystem& hs, const Eigen::Ref<const Eigen::VectorXd>& alpha_t);

/// S_t^2 = alpha_t^T [K_tt I - K_t^T H^-1 K_t] alpha_t for t in SV2.
double span_sv2(Index t, const HSystem& hs, const GramMatrix& gram,
                const Eigen::Ref<const Eigen::VectorXd>& alpha_t);

struct SpanReport {
  std::map<Index, double> spans;  // training SV row -> S_t^2
  Index psi1_count = 0;
  Index psi2_count = 0;
  Index psi3_count = 0;
  Index n_train = 0;
  double bound_theorem1 = 0.0;
  double bound_theorem2 = 0.0;
  double D = 0.0;
  bool isolated_fallback = false;  // SV1 empty, spans of isolated points used
  bool pseudo_inverse = false;
};

/// Closed-form spans for every training support vector.
SpanReport compute_spans(const AugmentedProblem& problem, const GramMatrix& gram,
                         const DualSolution& solution, const SvPartition& partition,
                         double ridge = kDefaultRidge);

/// |Psi_3| / n with Psi_3 = {t in SV and T : S_t^2 >= alpha_t . f(x_t)}.
/// Fills psi3_count and bound_theorem2.
double loo_estimate_theorem2(const DualSolution& solution, const AugmentedProblem& problem,
                             const GramMatrix& gram, SpanReport& spans);

/// (|Psi_1| + |Psi_2|) / n with Psi_1 = SV2 and T and
/// Psi_2 = {t in SV1 and T : S_t max(sqrt(2) D, 1/sqrt(C)) >= 1}.
/// `spans_qp` holds S_t (not squared) for the SV1 training rows.
double loo_bound_theorem1(const DualSolution& solution, const AugmentedProblem& problem, double D,
                          const std::map<Index, double>& spans_qp, SpanReport* report = nullptr);

}  // namespace musvm
