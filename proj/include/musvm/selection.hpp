#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "musvm/dual_solver.hpp"
#include "musvm/span_bound.hpp"
#include "musvm/types.hpp"

namespace musvm {

enum class SelectionMethod { cv, theorem2 };

struct SelectionPlan {
  std::vector<double> c_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  std::vector<double> delta_grid{0.0, 0.01, 0.05, 0.1};
  /// Empty: use `kernel` as given.
  std::vector<double> gamma_grid;
  KernelSpec kernel;
  SelectionMethod method = SelectionMethod::theorem2;
  int folds = 5;
  std::uint64_t seed = 1;
  SolverOptions solver;

  void validate() const;
};

struct GridPoint {
  Hyperparams params;
  double estimate = 0.0;
  double stddev = 0.0;
  double seconds = 0.0;
};

struct SelectionResult {
  std::vector<GridPoint> step_a;  // (C, gamma) with C* = 0
  std::vector<GridPoint> step_b;  // delta with C* = C n / (m L)
  Hyperparams chosen;
};

/// Fold id per sample. Each class is shuffled with `seed` and dealt round-robin
/// across folds; the dealing position carries over from one class to the next.
std::vector<int> stratified_folds(const std::vector<int>& labels, int num_classes, int k,
                                  std::uint64_t seed);

/// Runs `evaluate(fold_train, fold_test)` for each fold and returns the
/// per-fold results.
std::vector<double> cross_validate(const Dataset& train, int k, std::uint64_t seed,
                                   const std::function<double(const Dataset&, const Dataset&)>& evaluate);

struct CvResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> fold_errors;
};

/// Stratified k-fold validation error; the universum joins every fold's
/// training set and never its validation set.
CvResult kfold_cv_error(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                        int k, std::uint64_t seed, const SolverOptions& options = {});

struct Theorem2Result {
  double estimate = 0.0;
  SpanReport report;
  bool converged = false;
};

/// Trains once on the full set and returns the span-based estimate.
Theorem2Result theorem2_estimate(const Dataset& train, const UniversumSet& universum,
                                 const Hyperparams& params, const SolverOptions& options = {});

/// Estimates every grid point with the plan's method (in parallel) and
/// records wall clock per point.
std::vector<GridPoint> evaluate_grid(const Dataset& train, const UniversumSet& universum,
                                     const std::vector<Hyperparams>& grid, const SelectionPlan& plan);

/// Smallest estimate; ties go to smaller delta, then C, then gamma.
const GridPoint& grid_argmin(const std::vector<GridPoint>& points);

/// Step a tunes (C, gamma) for the plain SVM; step b fixes them, sets
/// C* = C n / (m L), and tunes delta.
SelectionResult two_step_select(const Dataset& train, const UniversumSet& universum,
                                const SelectionPlan& plan);

/// Mean rank of each grid point across runs (rows); ties share the mean rank.
Eigen::VectorXd rank_parameters(const Eigen::MatrixXd& per_run_estimates);

}  // namespace musvm
