#include "musvm/train.hpp"

namespace musvm {

TrainResult train(const Dataset& data, const UniversumSet& universum, const Hyperparams& params,
                  const SolverOptions& options) {
  TrainResult r;
  r.problem = augment(data, universum, params);
  r.gram = gram_matrix(params.kernel, r.problem.samples);
  r.solution = solve_dual(r.problem, r.gram, options);
  r.partition = classify_support_vectors(r.solution, r.problem);
  r.model = make_model(r.problem, r.solution, params);
  return r;
}

double auto_cstar(double c, Index n, Index m, int num_classes) {
  if (m == 0) return 0.0;
  return c * static_cast<double>(n) / (static_cast<double>(m) * num_classes);
}

}  // namespace musvm
