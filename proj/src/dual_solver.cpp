#include "musvm/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace musvm {

namespace {

double free_tolerance(double c) { return 1e-12 * std::max(1.0, c); }

// max_l G_il - min over components strictly below their bound.
double row_violation(const Eigen::MatrixXd& grad, const Eigen::MatrixXd& alpha, Index i, double c,
                     int y) {
  const double tau = free_tolerance(c);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < grad.cols(); ++l) {
    hi = std::max(hi, grad(i, l));
    const double bound = l == y ? c : 0.0;
    if (alpha(i, l) < bound - tau) lo = std::min(lo, grad(i, l));
  }
  if (!std::isfinite(lo)) return 0.0;
  return std::max(0.0, hi - lo);
}

std::vector<char> row_mask(Index rows, const std::vector<Index>& pinned) {
  std::vector<char> mask(static_cast<std::size_t>(rows), 0);
  for (Index r : pinned) {
    if (r < 0 || r >= rows) throw Error(ErrorKind::invalid_input, "pinned row out of range");
    mask[static_cast<std::size_t>(r)] = 1;
  }
  return mask;
}

double objective_from_gradient(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& grad,
                               const Eigen::MatrixXd& margins) {
  return -0.5 * (alpha.array() * (grad + margins).array()).sum();
}

bool row_feasible(const Eigen::MatrixXd& alpha, Index i, double c, int y) {
  if (!alpha.row(i).allFinite()) return false;
  if (std::abs(alpha.row(i).sum()) > 1e-10 * std::max(1.0, c)) return false;
  for (Index l = 0; l < alpha.cols(); ++l) {
    if (alpha(i, l) > (l == y ? c : 0.0) + 1e-12 * std::max(1.0, c)) return false;
  }
  return true;
}

void check_problem(const AugmentedProblem& problem, const GramMatrix& gram) {
  if (gram.size() != problem.rows()) {
    throw Error(ErrorKind::invalid_input, "gram matrix size " + std::to_string(gram.size()) +
                                              " does not match problem rows " +
                                              std::to_string(problem.rows()));
  }
}

}  // namespace

Eigen::VectorXd subproblem_solve(const Eigen::Ref<const Eigen::VectorXd>& g, double k_ii,
                                 double c_i, int y) {
  const Index L = g.size();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(L);
  if (!(k_ii > 0.0) || !(c_i > 0.0)) return a;

  // Euclidean projection of v = -g / k_ii onto {sum a = 0, a_l <= B_l}:
  // a_l = min(B_l, v_l - theta), theta found by scanning sorted breakpoints.
  const Eigen::VectorXd v = -g / k_ii;
  Eigen::VectorXd bound = Eigen::VectorXd::Zero(L);
  bound(y) = c_i;
  const Eigen::VectorXd brk = v - bound;
  std::vector<Index> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index p, Index q) { return brk(p) > brk(q); });

  double capped = 0.0;
  double free_sum = v.sum();
  double theta = free_sum / static_cast<double>(L);
  for (Index k = 0; k < L; ++k) {
    // k components capped (the k largest breakpoints), the rest free.
    theta = (capped + free_sum) / static_cast<double>(L - k);
    const bool above_free = theta >= brk(order[static_cast<std::size_t>(k)]);
    const bool below_capped = k == 0 || theta <= brk(order[static_cast<std::size_t>(k - 1)]);
    if (above_free && below_capped) break;
    const Index l = order[static_cast<std::size_t>(k)];
    capped += bound(l);
    free_sum -= v(l);
  }
  Index last_free = -1;
  for (Index l = 0; l < L; ++l) {
    a(l) = std::min(bound(l), v(l) - theta);
    if (a(l) < bound(l)) last_free = l;
  }
  if (last_free >= 0) {
    a(last_free) = 0.0;
    a(last_free) = std::min(bound(last_free), -a.sum());
  }
  return a;
}

Eigen::MatrixXd dual_gradient(const AugmentedProblem& problem, const GramMatrix& gram,
                              const Eigen::MatrixXd& alpha) {
  check_problem(problem, gram);
  return gram.values * alpha + problem.margins;
}

double kkt_violation(const DualSolution& solution, const AugmentedProblem& problem,
                     const GramMatrix& gram, const std::vector<Index>& pinned_rows) {
  const Eigen::MatrixXd grad = dual_gradient(problem, gram, solution.alpha);
  const std::vector<char> pinned = row_mask(problem.rows(), pinned_rows);
  double psi = 0.0;
  for (Index i = 0; i < problem.rows(); ++i) {
    if (pinned[static_cast<std::size_t>(i)] || !(gram(i, i) > 0.0)) continue;
    psi = std::max(psi, row_violation(grad, solution.alpha, i, problem.costs(i),
                                      problem.labels[static_cast<std::size_t>(i)]));
  }
  return psi;
}

double dual_objective(const DualSolution& solution, const AugmentedProblem& problem,
                      const GramMatrix& gram) {
  check_problem(problem, gram);
  const Eigen::MatrixXd& a = solution.alpha;
  return -0.5 * (a.transpose() * gram.values * a).trace() - (a.array() * problem.margins.array()).sum();
}

double feasibility_violation(const Eigen::MatrixXd& alpha, const AugmentedProblem& problem) {
  double worst = 0.0;
  for (Index i = 0; i < alpha.rows(); ++i) {
    worst = std::max(worst, std::abs(alpha.row(i).sum()));
    const int y = problem.labels[static_cast<std::size_t>(i)];
    for (Index l = 0; l < alpha.cols(); ++l) {
      worst = std::max(worst, alpha(i, l) - (l == y ? problem.costs(i) : 0.0));
    }
  }
  return worst;
}

DualSolution solve_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                        const SolverOptions& options) {
  check_problem(problem, gram);
  if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_input, "solver tolerance must be > 0");
  const Index N = problem.rows();
  const Index L = problem.num_classes;
  const Eigen::MatrixXd& K = gram.values;
  const std::vector<char> pinned = row_mask(N, options.pinned_rows);

  std::vector<char> active(static_cast<std::size_t>(N));
  for (Index i = 0; i < N; ++i) {
    active[static_cast<std::size_t>(i)] = !pinned[static_cast<std::size_t>(i)] && K(i, i) > 0.0;
  }
  auto label = [&](Index i) { return problem.labels[static_cast<std::size_t>(i)]; };

  DualSolution sol;
  sol.alpha = Eigen::MatrixXd::Zero(N, L);
  std::vector<Index> reproject;
  if (options.warm_start) {
    const Eigen::MatrixXd& w = *options.warm_start;
    if (w.rows() != N || w.cols() != L) throw Error(ErrorKind::invalid_input, "warm start has wrong shape");
    for (Index i = 0; i < N; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      if (row_feasible(w, i, problem.costs(i), label(i))) {
        sol.alpha.row(i) = w.row(i);
      } else {
        reproject.push_back(i);
      }
    }
  }

  Eigen::MatrixXd grad = K * sol.alpha + problem.margins;

  auto update_row = [&](Index i) {
    const double kii = K(i, i);
    const Eigen::VectorXd g = grad.row(i).transpose() - kii * sol.alpha.row(i).transpose();
    const Eigen::VectorXd next = subproblem_solve(g, kii, problem.costs(i), label(i));
    const Eigen::RowVectorXd delta = next.transpose() - sol.alpha.row(i);
    if ((delta.array() == 0.0).all()) return;
    grad.noalias() += K.col(i) * delta;
    sol.alpha.row(i) = next.transpose();
  };
  auto violation = [&](Index i) {
    return row_violation(grad, sol.alpha, i, problem.costs(i), label(i));
  };

  for (Index i : reproject) update_row(i);

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    double psi = 0.0;
    for (Index i = 0; i < N; ++i) {
      if (active[static_cast<std::size_t>(i)]) psi = std::max(psi, violation(i));
    }
    sol.kkt_gap = psi;
    if (psi <= options.tol) {
      sol.converged = true;
      break;
    }

    for (Index i = 0; i < N; ++i) {
      if (active[static_cast<std::size_t>(i)] && violation(i) > options.tol) update_row(i);
    }
    Index worst = -1;
    psi = 0.0;
    for (Index i = 0; i < N; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      const double v = violation(i);
      if (v > psi) {
        psi = v;
        worst = i;
      }
    }
    if (worst >= 0) update_row(worst);

    ++sol.iterations;
    if (options.refresh_interval > 0 && sol.iterations % options.refresh_interval == 0) {
      grad.noalias() = K * sol.alpha;
      grad += problem.margins;
    }
    sol.objective_history.push_back(objective_from_gradient(sol.alpha, grad, problem.margins));
  }

  if (!sol.converged) {
    double psi = 0.0;
    for (Index i = 0; i < N; ++i) {
      if (active[static_cast<std::size_t>(i)]) psi = std::max(psi, violation(i));
    }
    sol.kkt_gap = psi;
    sol.converged = psi <= options.tol;
  }
  sol.objective = objective_from_gradient(sol.alpha, grad, problem.margins);
  return sol;
}

}  // namespace musvm
