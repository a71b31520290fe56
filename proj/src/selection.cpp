#include "musvm/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>
#include <string>

#include "musvm/parallel.hpp"
#include "musvm/train.hpp"

namespace musvm {

namespace {

Dataset subset(const Dataset& data, const std::vector<Index>& idx) {
  Dataset out;
  out.num_classes = data.num_classes;
  out.samples.resize(data.dim(), static_cast<Index>(idx.size()));
  out.labels.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.samples.col(static_cast<Index>(k)) = data.samples.col(idx[k]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(idx[k])]);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void SelectionPlan::validate() const {
  if (c_grid.empty() || delta_grid.empty()) throw Error(ErrorKind::invalid_input, "selection grids must be nonempty");
  if (method == SelectionMethod::cv && folds < 2) throw Error(ErrorKind::invalid_input, "cross-validation needs k >= 2");
  for (double c : c_grid) {
    if (!(c > 0.0)) throw Error(ErrorKind::invalid_input, "C grid values must be > 0");
  }
  for (double d : delta_grid) {
    if (!(d >= 0.0)) throw Error(ErrorKind::invalid_input, "delta grid values must be >= 0");
  }
  for (double g : gamma_grid) {
    if (!(g > 0.0)) throw Error(ErrorKind::invalid_input, "gamma grid values must be > 0");
  }
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int num_classes, int k,
                                  std::uint64_t seed) {
  const Index n = static_cast<Index>(labels.size());
  if (k < 2 || k > n) {
    throw Error(ErrorKind::invalid_input, "stratified_folds: need 2 <= k <= n (k = " + std::to_string(k) +
                                              ", n = " + std::to_string(n) + ")");
  }
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<Index> members;
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (Index i : members) {
      fold[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

std::vector<double> cross_validate(const Dataset& train, int k, std::uint64_t seed,
                                   const std::function<double(const Dataset&, const Dataset&)>& evaluate) {
  const std::vector<int> fold = stratified_folds(train.labels, train.num_classes, k, seed);
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  parallel_for(k, [&](Index f) {
    std::vector<Index> fit;
    std::vector<Index> held;
    for (Index i = 0; i < train.size(); ++i) (fold[static_cast<std::size_t>(i)] == f ? held : fit).push_back(i);
    out[static_cast<std::size_t>(f)] = evaluate(subset(train, fit), subset(train, held));
  });
  return out;
}

CvResult kfold_cv_error(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                        int k, std::uint64_t seed, const SolverOptions& options) {
  CvResult r;
  r.fold_errors = cross_validate(train, k, seed, [&](const Dataset& fit, const Dataset& held) {
    const TrainResult tr = musvm::train(fit, universum, params, options);
    if (!tr.solution.converged) {
      throw Error(ErrorKind::non_convergence, "kfold_cv_error: fold solve did not converge");
    }
    return error_rate(tr.model, held);
  });
  r.mean = mean_of(r.fold_errors);
  r.stddev = stddev_of(r.fold_errors);
  return r;
}

Theorem2Result theorem2_estimate(const Dataset& train, const UniversumSet& universum,
                                 const Hyperparams& params, const SolverOptions& options) {
  const TrainResult tr = musvm::train(train, universum, params, options);
  Theorem2Result r;
  r.converged = tr.solution.converged;
  r.report = compute_spans(tr.problem, tr.gram, tr.solution, tr.partition);
  r.estimate = loo_estimate_theorem2(tr.solution, tr.problem, tr.gram, r.report);
  return r;
}

std::vector<GridPoint> evaluate_grid(const Dataset& train, const UniversumSet& universum,
                                     const std::vector<Hyperparams>& grid, const SelectionPlan& plan) {
  std::vector<GridPoint> out(grid.size());
  parallel_for(static_cast<Index>(grid.size()), [&](Index g) {
    const auto start = std::chrono::steady_clock::now();
    GridPoint& p = out[static_cast<std::size_t>(g)];
    p.params = grid[static_cast<std::size_t>(g)];
    if (plan.method == SelectionMethod::cv) {
      const CvResult cv = kfold_cv_error(train, universum, p.params, plan.folds, plan.seed, plan.solver);
      p.estimate = cv.mean;
      p.stddev = cv.stddev;
    } else {
      const Theorem2Result t2 = theorem2_estimate(train, universum, p.params, plan.solver);
      if (!t2.converged) throw Error(ErrorKind::non_convergence, "theorem2 estimate: solve did not converge");
      p.estimate = t2.estimate;
    }
    p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return out;
}

const GridPoint& grid_argmin(const std::vector<GridPoint>& points) {
  if (points.empty()) throw Error(ErrorKind::invalid_input, "grid_argmin: empty grid");
  auto key = [](const GridPoint& p) {
    return std::make_tuple(p.estimate, p.params.delta, p.params.c, p.params.kernel.gamma);
  };
  return *std::min_element(points.begin(), points.end(),
                           [&](const GridPoint& a, const GridPoint& b) { return key(a) < key(b); });
}

SelectionResult two_step_select(const Dataset& train, const UniversumSet& universum,
                                const SelectionPlan& plan) {
  plan.validate();
  SelectionResult res;
  const UniversumSet none{Eigen::MatrixXd(train.dim(), 0)};

  std::vector<Hyperparams> grid_a;
  const std::vector<double> gammas = plan.gamma_grid.empty() ? std::vector<double>{plan.kernel.gamma} : plan.gamma_grid;
  for (double c : plan.c_grid) {
    for (double g : gammas) {
      Hyperparams h;
      h.c = c;
      h.kernel = plan.kernel;
      h.kernel.gamma = g;
      grid_a.push_back(h);
    }
  }
  if (grid_a.size() == 1) {
    res.chosen = grid_a.front();
  } else {
    res.step_a = evaluate_grid(train, none, grid_a, plan);
    res.chosen = grid_argmin(res.step_a).params;
  }

  const Index m = universum.size();
  if (m == 0) {
    res.chosen.c_star = 0.0;
    res.chosen.delta = 0.0;
    return res;
  }
  Hyperparams base = res.chosen;
  base.c_star = auto_cstar(base.c, train.size(), m, train.num_classes);
  if (plan.delta_grid.size() == 1) {
    base.delta = plan.delta_grid.front();
    res.chosen = base;
    return res;
  }
  std::vector<Hyperparams> grid_b;
  for (double d : plan.delta_grid) {
    Hyperparams h = base;
    h.delta = d;
    grid_b.push_back(h);
  }
  res.step_b = evaluate_grid(train, universum, grid_b, plan);
  res.chosen = grid_argmin(res.step_b).params;
  return res;
}

Eigen::VectorXd rank_parameters(const Eigen::MatrixXd& per_run_estimates) {
  const Index runs = per_run_estimates.rows();
  const Index G = per_run_estimates.cols();
  if (runs < 1) throw Error(ErrorKind::invalid_input, "rank_parameters: need at least one run");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(G);
  for (Index r = 0; r < runs; ++r) {
    std::vector<Index> order(static_cast<std::size_t>(G));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return per_run_estimates(r, a) < per_run_estimates(r, b);
    });
    for (Index i = 0; i < G;) {
      Index j = i;
      while (j + 1 < G && per_run_estimates(r, order[static_cast<std::size_t>(j + 1)]) ==
                              per_run_estimates(r, order[static_cast<std::size_t>(i)])) {
        ++j;
      }
      const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
      for (Index k = i; k <= j; ++k) total(order[static_cast<std::size_t>(k)]) += rank;
      i = j + 1;
    }
  }
  return total / static_cast<double>(runs);
}

}  // namespace musvm
