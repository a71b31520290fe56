#include <doctest.h>

#include "helpers.hpp"

using namespace musvm;

namespace {

Model single_sv_model() {
  Model m;
  m.kernel = KernelSpec::linear();
  m.num_classes = 2;
  m.dim = 2;
  m.support_samples = Eigen::MatrixXd(2, 1);
  m.support_samples << 1, 0;
  m.alpha = Eigen::MatrixXd(1, 2);
  m.alpha << 0.5, -0.5;
  return m;
}

}  // namespace

TEST_CASE("augment: universum copies carry cost C* and margins -delta") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(2, 2), {0, 2}, 3);
  const UniversumSet u{Eigen::MatrixXd::Random(2, 1)};
  Hyperparams h;
  h.c = 1.0;
  h.c_star = 0.5;
  h.delta = 0.1;
  const AugmentedProblem p = augment(d, u, h);
  REQUIRE(p.rows() == 5);
  CHECK(p.n_train == 2);
  // Universum copy with artificial label 1 (internal class 0) sits right after the training rows.
  CHECK(p.labels[2] == 0);
  CHECK(p.costs(2) == 0.5);
  CHECK(p.margins(2, 0) == 0.0);
  CHECK(p.margins(2, 1) == doctest::Approx(-0.1));
  CHECK(p.margins(2, 2) == doctest::Approx(-0.1));
  for (int l = 0; l < 3; ++l) {
    CHECK(p.origin[2 + l].kind == RowKind::universum);
    CHECK(p.origin[2 + l].source == 0);
    CHECK(p.origin[2 + l].artificial_label == l);
    CHECK(p.samples.col(2 + l) == u.samples.col(0));
  }
  CHECK(p.margins.row(0) == Eigen::RowVector3d(0, 1, 1));
  CHECK(p.margins.row(1) == Eigen::RowVector3d(1, 1, 0));
  CHECK(p.costs(0) == 1.0);
}

TEST_CASE("augment: empty universum gives the plain training problem") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(3, 4), {0, 1, 1, 0}, 2);
  Hyperparams h;
  h.c = 2.5;
  const AugmentedProblem p = augment(d, th::no_universum(3), h);
  REQUIRE(p.rows() == 4);
  CHECK((p.costs.array() == 2.5).all());
  for (Index i = 0; i < 4; ++i) {
    for (int l = 0; l < 2; ++l) CHECK(p.margins(i, l) == (l == d.labels[i] ? 0.0 : 1.0));
  }
}

TEST_CASE("augment: delta 0 zeroes all universum margins") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(2, 1), {1}, 2);
  Hyperparams h;
  h.c_star = 1.0;
  const AugmentedProblem p = augment(d, UniversumSet{Eigen::MatrixXd::Random(2, 2)}, h);
  REQUIRE(p.rows() == 5);
  CHECK(p.margins.bottomRows(4).isZero(0.0));
}

TEST_CASE("augment rejects bad input") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(2, 2), {0, 1}, 2);
  Hyperparams h;
  CHECK_THROWS_AS(augment(d, UniversumSet{Eigen::MatrixXd::Random(3, 1)}, h), Error);
  Hyperparams bad = h;
  bad.c = 0.0;
  CHECK_THROWS_AS(augment(d, th::no_universum(2), bad), Error);
  bad = h;
  bad.delta = -0.1;
  CHECK_THROWS_AS(augment(d, th::no_universum(2), bad), Error);
  const Dataset one_class = th::make_data(Eigen::MatrixXd::Random(2, 2), {0, 0}, 1);
  CHECK_THROWS_AS(augment(one_class, th::no_universum(2), h), Error);
  const Dataset out_of_range = th::make_data(Eigen::MatrixXd::Random(2, 2), {0, 2}, 2);
  CHECK_THROWS_AS(augment(out_of_range, th::no_universum(2), h), Error);
}

TEST_CASE("decision_values examples") {
  Model m = single_sv_model();
  const Eigen::VectorXd f = decision_values(m, Eigen::Vector2d(2, 0));
  CHECK(f(0) == doctest::Approx(1.0));
  CHECK(f(1) == doctest::Approx(-1.0));
  m.alpha.setZero();
  CHECK(decision_values(m, Eigen::Vector2d(2, 0)).isZero(0.0));
  CHECK_THROWS_AS(decision_values(m, Eigen::Vector3d(1, 2, 3)), Error);
}

TEST_CASE("decision_values matches a naive double loop") {
  std::mt19937_64 rng(8);
  for (const KernelSpec spec : {KernelSpec::linear(), KernelSpec::rbf(0.4)}) {
    Model m;
    m.kernel = spec;
    m.num_classes = 4;
    m.dim = 3;
    m.support_samples = th::random_matrix(3, 17, rng);
    m.alpha = th::random_matrix(17, 4, rng);
    const Eigen::MatrixXd probes = th::random_matrix(3, 10, rng);
    const Eigen::MatrixXd batch = decision_matrix(m, probes);
    for (Index k = 0; k < 10; ++k) {
      const Eigen::VectorXd ref = th::naive_decision(m, probes.col(k));
      const Eigen::VectorXd f = decision_values(m, probes.col(k));
      CHECK((f - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
      CHECK((batch.col(k) - f).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("predict uses argmax with smallest-id ties") {
  const Model m = single_sv_model();
  CHECK(predict(m, Eigen::Vector2d(2, 0)) == 0);
  CHECK(argmax_class(Eigen::Vector3d(0, 0, 0)) == 0);
  CHECK(argmax_class(Eigen::Vector3d(-1, 2, 2)) == 1);
  CHECK(argmax_class(Eigen::Vector2d(1, -1)) == 0);
}

TEST_CASE("separable 2D toy set is fit perfectly and matches the brute-force model") {
  Eigen::MatrixXd x(2, 8);
  x << 2, 3, 2.5, 3.5, -2, -3, -2.5, -3.5,  //
      1, 0.5, -1, 0, 1, -0.5, 0, 0.5;
  const Dataset d = th::make_data(x, {0, 0, 0, 0, 1, 1, 1, 1}, 2);
  Hyperparams h;
  h.c = 10.0;
  const TrainResult tr = train(d, th::no_universum(2), h, th::tol(1e-8));
  REQUIRE(tr.solution.converged);
  CHECK(error_rate(tr.model, d) == 0.0);
  const DualSolution ref = oracle::brute_force_dual(tr.problem, tr.gram);
  const Model ref_model = make_model(tr.problem, ref, h);
  CHECK(predict_all(ref_model, x) == predict_all(tr.model, x));
}

TEST_CASE("primal_objective with zero weights is nC") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(2, 5), {0, 1, 2, 0, 1}, 3);
  Hyperparams h;
  h.c = 0.7;
  h.c_star = 2.0;
  const UniversumSet u{Eigen::MatrixXd::Random(2, 3)};
  const AugmentedProblem p = augment(d, u, h);
  Model m;
  m.kernel = h.kernel;
  m.num_classes = 3;
  m.dim = 2;
  m.support_samples.resize(2, 0);
  m.alpha.resize(0, 3);
  CHECK(primal_objective(m, p) == doctest::Approx(5 * 0.7));
}

TEST_CASE("primal and dual agree at the optimum") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    RandomInstanceSpec spec;
    spec.rbf = seed % 2 == 0;
    const RandomInstance inst = random_instance(seed, spec);
    const double t = 1e-8;
    const TrainResult tr = train(inst.train, inst.universum, inst.params, th::tol(t));
    REQUIRE(tr.solution.converged);
    const double primal = primal_objective(tr.model, tr.problem);
    const double dual = dual_objective(tr.solution, tr.problem, tr.gram);
    CHECK(primal - dual >= -1e-9);
    // Gap bounded by psi times the total cost mass.
    CHECK(primal - dual <= 10 * t * (1.0 + tr.problem.costs.sum()));
  }
}

TEST_CASE("one-sample problem: primal equals dual equals 0.25") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Ones(1, 1), {0}, 2);
  const TrainResult tr = train(d, th::no_universum(1), Hyperparams{}, th::tol(1e-12));
  CHECK(primal_objective(tr.model, tr.problem) == doctest::Approx(0.25));
  CHECK(tr.solution.objective == doctest::Approx(0.25));
}

TEST_CASE("classify_support_vectors") {
  const Dataset d = th::make_data(Eigen::MatrixXd::Random(2, 3), {0, 1, 0}, 2);
  Hyperparams h;
  h.c = 2.0;
  const AugmentedProblem p = augment(d, th::no_universum(2), h);
  DualSolution s;
  s.alpha = Eigen::MatrixXd::Zero(3, 2);
  SvPartition part = classify_support_vectors(s, p);
  CHECK(part.sv1.empty());
  CHECK(part.sv2.empty());
  CHECK(part.non_sv.size() == 3);

  const double tau = kSvTolerance * h.c;
  s.alpha.row(0) << 2.0, -2.0;
  s.alpha.row(1) << -(2.0 - 10 * tau), 2.0 - 10 * tau;
  part = classify_support_vectors(s, p);
  CHECK(part.sv2 == std::vector<Index>{0});
  CHECK(part.sv1 == std::vector<Index>{1});
  CHECK(part.non_sv == std::vector<Index>{2});
  CHECK(part.type[0] == SvType::type2);
  CHECK(part.type[1] == SvType::type1);
  CHECK(part.type[2] == SvType::none);
}

TEST_CASE("stored model rows are nonzero and sum to zero") {
  const RandomInstance inst = random_instance(21);
  const TrainResult tr = train(inst.train, inst.universum, inst.params, th::tol(1e-8));
  for (Index i = 0; i < tr.model.support_count(); ++i) {
    CHECK((tr.model.alpha.row(i).array() != 0.0).any());
    CHECK(std::abs(tr.model.alpha.row(i).sum()) <= 1e-10);
  }
}
