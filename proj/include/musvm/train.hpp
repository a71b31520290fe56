#pragma once

#include "musvm/dual_solver.hpp"
#include "musvm/kernel.hpp"
#include "musvm/model.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// Everything produced by one training run; span computations reuse the
/// problem, Gram matrix and solution.
struct TrainResult {
  AugmentedProblem problem;
  GramMatrix gram;
  DualSolution solution;
  SvPartition partition;
  Model model;
};

TrainResult train(const Dataset& data, const UniversumSet& universum, const Hyperparams& params,
                  const SolverOptions& options = {});

/// C* = C n / (m L); zero when there is no universum.
double auto_cstar(double c, Index n, Index m, int num_classes);

}  // namespace musvm
