#include <doctest.h>

#include <set>

#include "helpers.hpp"

using namespace musvm;

namespace {

Dataset balanced(int L, int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GaussianSpec gs;
  gs.n = L * per_class;
  gs.num_classes = L;
  gs.separation = 2.0;
  return sample_gaussian(gs, rng);
}

}  // namespace

TEST_CASE("stratified_folds: balanced sizes, per-class spread, determinism") {
  const Dataset d = balanced(3, 10, 1);
  const std::vector<int> f = stratified_folds(d.labels, 3, 5, 42);
  std::vector<int> size(5, 0);
  std::vector<std::vector<int>> per(5, std::vector<int>(3, 0));
  for (std::size_t i = 0; i < f.size(); ++i) {
    ++size[f[i]];
    ++per[f[i]][d.labels[i]];
  }
  for (int k = 0; k < 5; ++k) {
    CHECK(size[k] == 6);
    for (int c = 0; c < 3; ++c) CHECK(per[k][c] == 2);
  }
  CHECK(stratified_folds(d.labels, 3, 5, 42) == f);
  CHECK(stratified_folds(d.labels, 3, 5, 43) != f);
  CHECK_THROWS_AS(stratified_folds(d.labels, 3, 1, 1), Error);
  CHECK_THROWS_AS(stratified_folds(d.labels, 3, 31, 1), Error);
}

TEST_CASE("constant predictor on balanced data errs (L-1)/L in every fold") {
  const Dataset d = balanced(4, 10, 2);
  const std::vector<double> errs = cross_validate(d, 5, 7, [](const Dataset&, const Dataset& held) {
    Index wrong = 0;
    for (int y : held.labels) wrong += y != 2;
    return static_cast<double>(wrong) / static_cast<double>(held.size());
  });
  REQUIRE(errs.size() == 5);
  for (double e : errs) CHECK(e == doctest::Approx(0.75));
}

TEST_CASE("validation folds never contain universum samples and training folds partition the data") {
  const Dataset d = balanced(3, 6, 3);
  std::set<double> seen;
  Index held_total = 0;
  cross_validate(d, 3, 1, [&](const Dataset& fit, const Dataset& held) {
    CHECK(fit.size() + held.size() == d.size());
    for (Index i = 0; i < held.size(); ++i) seen.insert(held.samples(0, i));
    held_total += held.size();
    return 0.0;
  });
  CHECK(held_total == d.size());
  CHECK(static_cast<Index>(seen.size()) == d.size());
}

TEST_CASE("k = n cross-validation equals exact leave-one-out") {
  std::mt19937_64 rng(4);
  GaussianSpec gs;
  gs.n = 12;
  gs.num_classes = 3;
  gs.separation = 1.0;
  const Dataset d = sample_gaussian(gs, rng);
  const UniversumSet u = random_averaging(d, 4, rng);
  Hyperparams h;
  h.c = 1.0;
  h.c_star = 0.5;
  h.delta = 0.05;
  h.kernel = KernelSpec::rbf(0.5);
  const CvResult cv = kfold_cv_error(d, u, h, 12, 9, th::tol(1e-10));
  const double loo = oracle::exact_loo_error(d, u, h, th::tol(1e-10));
  CHECK(cv.mean == doctest::Approx(loo).epsilon(1e-12));
}

TEST_CASE("kfold_cv_error is deterministic for a fixed seed and thread count independent") {
  const Dataset d = balanced(3, 10, 5);
  Hyperparams h;
  h.kernel = KernelSpec::rbf(0.3);
  set_thread_count(1);
  const CvResult a = kfold_cv_error(d, th::no_universum(2), h, 5, 11);
  set_thread_count(4);
  const CvResult b = kfold_cv_error(d, th::no_universum(2), h, 5, 11);
  set_thread_count(1);
  CHECK(a.fold_errors == b.fold_errors);
  CHECK(a.mean == b.mean);
  CHECK(a.stddev >= 0.0);
}

TEST_CASE("two_step_select: no universum skips the delta step") {
  const Dataset d = balanced(3, 8, 6);
  SelectionPlan plan;
  plan.c_grid = {0.1, 1.0, 10.0};
  plan.method = SelectionMethod::theorem2;
  const SelectionResult r = two_step_select(d, th::no_universum(2), plan);
  CHECK(r.step_a.size() == 3);
  CHECK(r.step_b.empty());
  CHECK(r.chosen.c_star == 0.0);
  CHECK(r.chosen.delta == 0.0);
  CHECK(r.chosen.c == grid_argmin(r.step_a).params.c);
}

TEST_CASE("two_step_select: singleton delta grid is returned without evaluation") {
  std::mt19937_64 rng(7);
  const Dataset d = balanced(3, 8, 7);
  const UniversumSet u = random_averaging(d, 10, rng);
  SelectionPlan plan;
  plan.c_grid = {1.0, 10.0};
  plan.delta_grid = {0.05};
  const SelectionResult r = two_step_select(d, u, plan);
  CHECK(r.step_b.empty());
  CHECK(r.chosen.delta == 0.05);
  CHECK(r.chosen.c_star == doctest::Approx(r.chosen.c * 24.0 / (10.0 * 3.0)));
}

TEST_CASE("two_step_select: step b fixes C and uses the n/(mL) cost ratio") {
  std::mt19937_64 rng(8);
  const Dataset d = balanced(3, 8, 8);
  const UniversumSet u = random_averaging(d, 12, rng);
  for (SelectionMethod m : {SelectionMethod::cv, SelectionMethod::theorem2}) {
    SelectionPlan plan;
    plan.c_grid = {0.1, 1.0};
    plan.gamma_grid = {0.1, 1.0};
    plan.kernel = KernelSpec::rbf();
    plan.method = m;
    plan.folds = 3;
    const SelectionResult r = two_step_select(d, u, plan);
    CHECK(r.step_a.size() == 4);
    REQUIRE(r.step_b.size() == 4);
    for (const GridPoint& p : r.step_b) {
      CHECK(p.params.c == grid_argmin(r.step_a).params.c);
      CHECK(p.params.kernel.gamma == grid_argmin(r.step_a).params.kernel.gamma);
      CHECK(p.params.c_star == doctest::Approx(p.params.c * 24.0 / 36.0));
      CHECK(p.seconds >= 0.0);
      CHECK(p.estimate >= 0.0);
      CHECK(p.estimate <= 1.0);
    }
    CHECK(r.chosen.delta == grid_argmin(r.step_b).params.delta);
  }
}

TEST_CASE("grid_argmin tie-breaking") {
  std::vector<GridPoint> pts(4);
  pts[0].params.delta = 0.1;
  pts[0].params.c = 1;
  pts[0].estimate = 0.2;
  pts[1].params.delta = 0.05;
  pts[1].params.c = 10;
  pts[1].estimate = 0.2;
  pts[2].params.delta = 0.05;
  pts[2].params.c = 1;
  pts[2].estimate = 0.2;
  pts[3].params.delta = 0.0;
  pts[3].params.c = 1;
  pts[3].estimate = 0.3;
  CHECK(&grid_argmin(pts) == &pts[2]);
  CHECK_THROWS_AS(grid_argmin({}), Error);
}

TEST_CASE("plan validation") {
  SelectionPlan p;
  p.c_grid.clear();
  CHECK_THROWS_AS(p.validate(), Error);
  p = SelectionPlan{};
  p.method = SelectionMethod::cv;
  p.folds = 1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = SelectionPlan{};
  CHECK_NOTHROW(p.validate());
  CHECK(p.c_grid.size() == 8);
  CHECK(p.delta_grid == std::vector<double>{0.0, 0.01, 0.05, 0.1});
}

TEST_CASE("rank_parameters examples") {
  Eigen::MatrixXd one(1, 3);
  one << 0.1, 0.3, 0.2;
  CHECK(rank_parameters(one) == Eigen::Vector3d(1, 3, 2));
  const Eigen::MatrixXd tie = Eigen::MatrixXd::Constant(2, 5, 0.4);
  CHECK(rank_parameters(tie) == Eigen::VectorXd::Constant(5, 3.0));
  Eigen::MatrixXd rev(2, 2);
  rev << 0.1, 0.2, 0.2, 0.1;
  CHECK(rank_parameters(rev) == Eigen::Vector2d(1.5, 1.5));
  CHECK_THROWS_AS(rank_parameters(Eigen::MatrixXd(0, 3)), Error);
}

TEST_CASE("ranks are invariant under order-preserving maps") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> u(0, 5);
  Eigen::MatrixXd e(6, 7);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 7; ++j) e(i, j) = u(rng) / 10.0;
  }
  const Eigen::MatrixXd mapped = e.array().exp() * 3.0 + 1.0;
  CHECK(rank_parameters(e).isApprox(rank_parameters(mapped), 0.0));
}
