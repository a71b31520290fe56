#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "musvm/musvm.hpp"

namespace musvm::cli {

namespace {

SolverOptions tight() {
  SolverOptions o;
  o.tol = 1e-8;
  return o;
}

SuiteOutcome solver_suite(std::uint64_t seed, int count, std::ostream& log) {
  SuiteOutcome out;
  for (int i = 0; i < count; ++i) {
    RandomInstanceSpec spec;
    spec.rbf = i % 2 == 1;
    const RandomInstance inst = random_instance(seed + static_cast<std::uint64_t>(i), spec);
    const AugmentedProblem p = augment(inst.train, inst.universum, inst.params);
    const GramMatrix g = gram_matrix(inst.params.kernel, p.samples);
    const DualSolution fast = solve_dual(p, g, tight());
    const DualSolution ref = oracle::brute_force_dual(p, g);
    const double rel = std::abs(fast.objective - ref.objective) / (1.0 + std::abs(ref.objective));
    const double feas = feasibility_violation(fast.alpha, p);
    const bool ok = fast.converged && rel <= 1e-6 && feas <= 1e-10;
    ++out.cases;
    out.violations += !ok;
    log << "solver case " << i << ": rows " << p.rows() << " rel " << rel << " feas " << feas
        << (ok ? " ok" : " VIOLATION") << '\n';
  }
  return out;
}

SuiteOutcome theorem1_suite(std::uint64_t seed, int count, std::ostream& log) {
  SuiteOutcome out;
  for (int i = 0; i < count; ++i) {
    RandomInstanceSpec spec;
    spec.max_n = 20;
    spec.rbf = i % 2 == 1;
    const RandomInstance inst = random_instance(seed + static_cast<std::uint64_t>(i), spec);
    const TrainResult tr = train(inst.train, inst.universum, inst.params, tight());
    const oracle::Theorem1Result b = oracle::theorem1_bound(tr.problem, tr.gram, tr.solution);
    const double loo = oracle::exact_loo_error(inst.train, inst.universum, inst.params, tight());
    const bool ok = loo <= b.bound + 1e-12;
    ++out.cases;
    out.violations += !ok;
    log << "theorem1 case " << i << ": n " << inst.train.size() << " loo " << loo << " bound " << b.bound
        << (ok ? " ok" : " VIOLATION") << '\n';
  }
  return out;
}

SuiteOutcome spans_suite(std::uint64_t seed, int count, std::ostream& log) {
  SuiteOutcome out;
  for (int i = 0; i < count; ++i) {
    RandomInstanceSpec spec;
    spec.rbf = true;
    const RandomInstance inst = random_instance(seed + static_cast<std::uint64_t>(i), spec);
    SolverOptions o;
    o.tol = 1e-10;
    const TrainResult tr = train(inst.train, inst.universum, inst.params, o);
    if (tr.partition.sv1.empty()) continue;
    const SpanReport rep = compute_spans(tr.problem, tr.gram, tr.solution, tr.partition);
    double worst = 0.0;
    for (const auto& [t, s2] : rep.spans) {
      const double ref = oracle::span_kkt_oracle(tr.solution, tr.gram, t, tr.partition.sv1).span_sq;
      worst = std::max(worst, std::abs(s2 - ref) / std::max({std::abs(ref), std::abs(s2), 1e-12}));
    }
    const bool ok = worst <= 1e-6;
    ++out.cases;
    out.violations += !ok;
    log << "spans case " << i << ": spans " << rep.spans.size() << " worst rel " << worst
        << (ok ? " ok" : " VIOLATION") << '\n';
  }
  return out;
}

SuiteOutcome binary_suite(std::uint64_t seed, int count, std::ostream& log) {
  SuiteOutcome out;
  for (int i = 0; i < count; ++i) {
    RandomInstanceSpec spec;
    spec.min_classes = spec.max_classes = 2;
    spec.rbf = i % 2 == 1;
    const RandomInstance inst = random_instance(seed + static_cast<std::uint64_t>(i), spec);
    const TrainResult tr = train(inst.train, inst.universum, inst.params, tight());
    const oracle::BinaryUsvm bin = oracle::binary_usvm_oracle(inst.train, inst.universum, inst.params);
    std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(i));
    std::normal_distribution<double> nd(0.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd x(inst.train.dim());
      for (Index j = 0; j < x.size(); ++j) x(j) = nd(rng);
      const Eigen::VectorXd f = decision_values(tr.model, x);
      worst = std::max(worst, std::abs((f(0) - f(1)) - bin.decision(x)));
    }
    const bool ok = worst <= 1e-5;
    ++out.cases;
    out.violations += !ok;
    log << "binary case " << i << ": m " << inst.universum.size() << " worst " << worst
        << (ok ? " ok" : " VIOLATION") << '\n';
  }
  return out;
}

}  // namespace

bool is_suite(const std::string& name) {
  return name == "solver" || name == "theorem1" || name == "spans" || name == "binary" || name == "all";
}

SuiteOutcome run_suite(const std::string& name, std::uint64_t seed, int count, std::ostream& log) {
  if (name == "solver") return solver_suite(seed, count, log);
  if (name == "theorem1") return theorem1_suite(seed, count, log);
  if (name == "spans") return spans_suite(seed, count, log);
  if (name == "binary") return binary_suite(seed, count, log);
  SuiteOutcome total;
  for (const char* s : {"solver", "theorem1", "spans", "binary"}) {
    const SuiteOutcome o = run_suite(s, seed, count, log);
    total.cases += o.cases;
    total.violations += o.violations;
  }
  return total;
}

}  // namespace musvm::cli
