#include <doctest.h>

#include "helpers.hpp"

using namespace musvm;

namespace {

TrainResult one_sample(double c) {
  const Dataset d = th::make_data(Eigen::MatrixXd::Ones(1, 1), {0}, 2);
  Hyperparams h;
  h.c = c;
  return train(d, th::no_universum(1), h, th::tol(1e-12));
}

// Objective of the row subproblem (maximization form).
double row_objective(const Eigen::VectorXd& a, const Eigen::VectorXd& g, double k) {
  return -0.5 * k * a.squaredNorm() - a.dot(g);
}

}  // namespace

TEST_CASE("one-sample closed forms") {
  const TrainResult a = one_sample(1.0);
  CHECK(a.solution.alpha(0, 0) == doctest::Approx(0.5));
  CHECK(a.solution.alpha(0, 1) == doctest::Approx(-0.5));
  CHECK(a.solution.objective == doctest::Approx(0.25));
  CHECK(dual_objective(a.solution, a.problem, a.gram) == doctest::Approx(0.25));
  CHECK(kkt_violation(a.solution, a.problem, a.gram) <= 1e-10);

  const TrainResult b = one_sample(0.2);
  CHECK(b.solution.alpha(0, 0) == doctest::Approx(0.2));
  CHECK(b.solution.alpha(0, 1) == doctest::Approx(-0.2));
  CHECK(b.solution.objective == doctest::Approx(0.16));
}

TEST_CASE("C* = 0 deactivates the universum") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RandomInstanceSpec spec;
    spec.rbf = seed % 2 == 1;
    RandomInstance inst = random_instance(seed, spec);
    std::mt19937_64 rng(seed);
    inst.universum = UniversumSet{th::random_matrix(inst.train.dim(), 4, rng)};
    inst.params.c_star = 0.0;
    const TrainResult with = train(inst.train, inst.universum, inst.params, th::tol(1e-10));
    const TrainResult without = train(inst.train, th::no_universum(inst.train.dim()), inst.params, th::tol(1e-10));
    const Index n = inst.train.size();
    CHECK(with.solution.alpha.bottomRows(with.problem.rows() - n).isZero(0.0));
    CHECK((with.solution.alpha.topRows(n) - without.solution.alpha).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("solve_dual agrees with the projected-gradient oracle") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    RandomInstanceSpec spec;
    spec.rbf = seed % 2 == 0;
    const RandomInstance inst = random_instance(seed, spec);
    const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
    const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
    const DualSolution fast = solve_dual(p, g, th::tol(1e-8));
    const DualSolution ref = oracle::brute_force_dual(p, g);
    REQUIRE(fast.converged);
    CHECK(std::abs(fast.objective - ref.objective) / (1.0 + std::abs(ref.objective)) <= 1e-6);
    CHECK(feasibility_violation(fast.alpha, p) <= 1e-10);
  }
}

TEST_CASE("solution is feasible and the objective history never decreases") {
  const RandomInstance inst = random_instance(33);
  const TrainResult tr = train(inst.train, inst.universum, inst.params, th::tol(1e-8));
  CHECK(feasibility_violation(tr.solution.alpha, tr.problem) <= 1e-10);
  const auto& h = tr.solution.objective_history;
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] >= h[k - 1] - 1e-12 * (1.0 + std::abs(h[k])));
  CHECK(tr.solution.objective == doctest::Approx(th::naive_dual(tr.solution.alpha, tr.problem.margins, tr.gram.values)));
}

TEST_CASE("pinned rows stay at zero") {
  const RandomInstance inst = random_instance(44);
  const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
  const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
  SolverOptions o = th::tol(1e-8);
  o.pinned_rows = {0};
  const DualSolution s = solve_dual(p, g, o);
  CHECK(s.alpha.row(0).isZero(0.0));
  CHECK(s.converged);
  CHECK(kkt_violation(s, p, g, o.pinned_rows) <= 1e-8);
}

TEST_CASE("epoch limit reports non-convergence instead of throwing") {
  const RandomInstance inst = random_instance(45);
  const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
  const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
  SolverOptions o = th::tol(1e-14);
  o.max_epochs = 1;
  const DualSolution s = solve_dual(p, g, o);
  CHECK_FALSE(s.converged);
  CHECK(feasibility_violation(s.alpha, p) <= 1e-10);
}

TEST_CASE("warm start at the optimum converges immediately to the same point") {
  const RandomInstance inst = random_instance(46);
  const TrainResult tr = train(inst.train, inst.universum, inst.params, th::tol(1e-9));
  SolverOptions o = th::tol(1e-8);
  o.warm_start = tr.solution.alpha;
  const DualSolution s = solve_dual(tr.problem, tr.gram, o);
  CHECK(s.converged);
  CHECK((s.alpha - tr.solution.alpha).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("subproblem_solve: g = 0 gives zero") {
  CHECK(subproblem_solve(Eigen::VectorXd::Zero(4), 1.3, 2.0, 1).isZero(0.0));
}

TEST_CASE("subproblem_solve: two classes reduce to a clamp") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d g(u(rng), u(rng));
    const double kii = 0.1 + std::abs(u(rng));
    const double c = 0.05 + std::abs(u(rng));
    const double a = std::clamp((g(1) - g(0)) / (2 * kii), 0.0, c);
    const Eigen::VectorXd s = subproblem_solve(g, kii, c, 0);
    CHECK(s(0) == doctest::Approx(a).epsilon(1e-12));
    CHECK(s(1) == doctest::Approx(-a).epsilon(1e-12));
    const Eigen::VectorXd s1 = subproblem_solve(Eigen::Vector2d(g(1), g(0)), kii, c, 1);
    CHECK(s1(1) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("subproblem_solve: four classes match an exhaustive grid search") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::Vector4d g(u(rng), u(rng), u(rng), u(rng));
    const double kii = 0.5 + std::abs(u(rng));
    const double c = 1.0;
    const int y = trial % 4;
    const Eigen::VectorXd s = subproblem_solve(g, kii, c, y);
    // Grid over the three non-label components in [-C, 0] with sum >= -C.
    const int steps = 100;
    double best = -1e300;
    Eigen::Vector4d arg = Eigen::Vector4d::Zero();
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; i + j <= steps; ++j) {
        for (int k = 0; i + j + k <= steps; ++k) {
          Eigen::Vector4d a;
          int idx = 0;
          const double vals[3] = {-c * i / steps, -c * j / steps, -c * k / steps};
          for (int l = 0; l < 4; ++l) a(l) = l == y ? 0.0 : vals[idx++];
          a(y) = -a.sum();
          const double v = row_objective(a, g, kii);
          if (v > best) {
            best = v;
            arg = a;
          }
        }
      }
    }
    const double got = row_objective(s, g, kii);
    CHECK(got >= best - 1e-12);
    CHECK(got - best <= 1e-4);
    CHECK((s - arg).cwiseAbs().maxCoeff() <= 0.03);
    CHECK(std::abs(s.sum()) <= 1e-12);
    for (int l = 0; l < 4; ++l) CHECK(s(l) <= (l == y ? c : 0.0) + 1e-15);
  }
}

TEST_CASE("kkt_violation examples") {
  const RandomInstance inst = random_instance(51);
  const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
  const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
  DualSolution zero;
  zero.alpha = Eigen::MatrixXd::Zero(p.rows(), p.num_classes);
  CHECK(kkt_violation(zero, p, g) >= 1.0);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    DualSolution any;
    any.alpha = th::random_matrix(p.rows(), p.num_classes, rng);
    CHECK(kkt_violation(any, p, g) >= 0.0);
  }
}

TEST_CASE("dual_objective matches a naive triple loop") {
  const RandomInstance inst = random_instance(52);
  const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
  const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
  DualSolution s;
  s.alpha = Eigen::MatrixXd::Zero(p.rows(), p.num_classes);
  CHECK(dual_objective(s, p, g) == 0.0);
  std::mt19937_64 rng(4);
  s.alpha = th::random_matrix(p.rows(), p.num_classes, rng);
  const double ref = th::naive_dual(s.alpha, p.margins, g.values);
  CHECK(dual_objective(s, p, g) == doctest::Approx(ref).epsilon(1e-12));
  const Eigen::MatrixXd grad = dual_gradient(p, g, s.alpha);
  CHECK((grad - (g.values * s.alpha + p.margins)).cwiseAbs().maxCoeff() <= 1e-12);
}
