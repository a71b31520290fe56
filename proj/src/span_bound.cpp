#include "musvm/span_bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "musvm/parallel.hpp"

namespace musvm {

namespace {

constexpr double kMinRcond = 1e-14;

Eigen::MatrixXd centering(int L) {
  return Eigen::MatrixXd::Identity(L, L) - Eigen::MatrixXd::Constant(L, L, 1.0 / L);
}

HSystem build_units(std::vector<Index> sv1, std::vector<Index> row_unit, std::vector<Index> unit_rep,
                    const GramMatrix& gram, int L, double ridge, bool assemble) {
  if (sv1.empty()) throw Error(ErrorKind::invalid_input, "build_h_system: SV1 is empty");
  if (L < 2) throw Error(ErrorKind::invalid_input, "build_h_system: need at least 2 classes");
  HSystem hs;
  hs.num_classes = L;
  hs.sv1_order = std::move(sv1);
  hs.row_unit = std::move(row_unit);
  hs.unit_rep = std::move(unit_rep);
  const Index s = static_cast<Index>(hs.unit_rep.size());
  hs.unit_size.assign(static_cast<std::size_t>(s), 0);
  for (Index u : hs.row_unit) ++hs.unit_size[static_cast<std::size_t>(u)];

  hs.kernel.resize(s, s);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) {
      hs.kernel(a, b) = gram(hs.unit_rep[static_cast<std::size_t>(a)], hs.unit_rep[static_cast<std::size_t>(b)]);
    }
  }
  hs.ridge = ridge < 0.0 ? 1e-10 * hs.kernel.trace() / static_cast<double>(s) : ridge;
  hs.kernel.diagonal().array() += hs.ridge;

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s, s);
  Eigen::LLT<Eigen::MatrixXd> llt(hs.kernel);
  if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) {
    hs.kernel_inv = llt.solve(eye);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hs.kernel);
    hs.kernel_inv = cod.pseudoInverse();
    hs.pseudo_inverse = true;
  }

  if (assemble) {
    const Index nb = s * L;
    const Eigen::MatrixXd I_L = Eigen::MatrixXd::Identity(L, L);
    const Eigen::MatrixXd P = centering(L);
    hs.H = Eigen::MatrixXd::Zero(nb + s, nb + s);
    hs.H_inv = Eigen::MatrixXd::Zero(nb + s, nb + s);
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) {
        hs.H.block(a * L, b * L, L, L) = hs.kernel(a, b) * I_L;
        hs.H_inv.block(a * L, b * L, L, L) = hs.kernel_inv(a, b) * P;
        hs.H_inv(nb + a, nb + b) = -hs.kernel(a, b) / L;
      }
      for (Index l = 0; l < L; ++l) {
        hs.H(a * L + l, nb + a) = hs.H(nb + a, a * L + l) = 1.0;
        hs.H_inv(a * L + l, nb + a) = hs.H_inv(nb + a, a * L + l) = 1.0 / L;
      }
    }
  }
  return hs;
}

}  // namespace

Index HSystem::unit_of(Index row) const {
  for (std::size_t k = 0; k < sv1_order.size(); ++k) {
    if (sv1_order[k] == row) return row_unit[k];
  }
  return -1;
}

HSystem build_h_system(const std::vector<Index>& sv1, const GramMatrix& gram, int num_classes,
                       double ridge, bool assemble) {
  std::vector<Index> unit(sv1.size());
  for (std::size_t k = 0; k < sv1.size(); ++k) unit[k] = static_cast<Index>(k);
  return build_units(sv1, unit, sv1, gram, num_classes, ridge, assemble);
}

HSystem build_h_system(const AugmentedProblem& problem, const SvPartition& partition,
                       const GramMatrix& gram, double ridge, bool assemble) {
  std::map<std::pair<int, Index>, Index> key_unit;
  std::vector<Index> unit;
  std::vector<Index> rep;
  for (Index r : partition.sv1) {
    const RowOrigin& o = problem.origin[static_cast<std::size_t>(r)];
    const std::pair<int, Index> key{o.kind == RowKind::training ? 0 : 1, o.kind == RowKind::training ? r : o.source};
    auto [it, fresh] = key_unit.emplace(key, static_cast<Index>(rep.size()));
    if (fresh) rep.push_back(r);
    unit.push_back(it->second);
  }
  return build_units(partition.sv1, unit, rep, gram, problem.num_classes, ridge, assemble);
}

double span_sv1(Index t, const HSystem& hs, const Eigen::Ref<const Eigen::VectorXd>& alpha_t) {
  const Index u = hs.unit_of(t);
  if (u < 0) throw Error(ErrorKind::invalid_input, "span_sv1: row " + std::to_string(t) + " is not in SV1");
  const int L = hs.num_classes;
  if (alpha_t.size() != L) throw Error(ErrorKind::invalid_input, "span_sv1: alpha_t has wrong length");
  if (alpha_t.isZero(0.0)) return 0.0;
  // Another copy of the same sample can absorb alpha_t entirely.
  if (hs.unit_size[static_cast<std::size_t>(u)] > 1) return 0.0;

  const Eigen::MatrixXd block = hs.H_inv.size() > 0 ? Eigen::MatrixXd(hs.H_inv.block(u * L, u * L, L, L))
                                                     : Eigen::MatrixXd(hs.kernel_inv(u, u) * centering(L));
  const Eigen::MatrixXd completed = block + Eigen::MatrixXd::Constant(L, L, 1.0 / L);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(completed);
  const double rc = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (!(rc > kMinRcond) || !ldlt.isPositive()) {
    throw Error(ErrorKind::numerical, "span_sv1: (H^-1)_tt block is singular (rcond " + std::to_string(rc) + ")");
  }
  return std::max(0.0, alpha_t.dot(ldlt.solve(alpha_t)));
}

double span_sv2(Index t, const HSystem& hs, const GramMatrix& gram,
                const Eigen::Ref<const Eigen::VectorXd>& alpha_t) {
  const int L = hs.num_classes;
  if (alpha_t.size() != L) throw Error(ErrorKind::invalid_input, "span_sv2: alpha_t has wrong length");
  const Index s = hs.units();
  Eigen::VectorXd k(s);
  for (Index a = 0; a < s; ++a) k(a) = gram(t, hs.unit_rep[static_cast<std::size_t>(a)]);

  Eigen::MatrixXd coupling;
  if (hs.H_inv.size() > 0) {
    Eigen::MatrixXd Kt = Eigen::MatrixXd::Zero(hs.H_inv.rows(), L);
    for (Index a = 0; a < s; ++a) Kt.block(a * L, 0, L, L) = k(a) * Eigen::MatrixXd::Identity(L, L);
    coupling = Kt.transpose() * hs.H_inv * Kt;
  } else {
    coupling = k.dot(hs.kernel_inv * k) * centering(L);
  }
  const double s2 = gram(t, t) * alpha_t.squaredNorm() - alpha_t.dot(coupling * alpha_t);
  return std::max(0.0, s2);
}

SpanReport compute_spans(const AugmentedProblem& problem, const GramMatrix& gram,
                         const DualSolution& solution, const SvPartition& partition, double ridge) {
  SpanReport report;
  report.n_train = problem.n_train;
  std::vector<Index> rows;
  for (Index t = 0; t < problem.n_train; ++t) {
    if (partition.type[static_cast<std::size_t>(t)] != SvType::none) rows.push_back(t);
  }
  std::vector<double> values(rows.size(), 0.0);

  if (partition.sv1.empty()) {
    report.isolated_fallback = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      values[k] = gram(rows[k], rows[k]) * solution.alpha.row(rows[k]).squaredNorm();
    }
  } else {
    const HSystem hs = build_h_system(problem, partition, gram, ridge, false);
    report.pseudo_inverse = hs.pseudo_inverse;
    parallel_for(static_cast<Index>(rows.size()), [&](Index k) {
      const Index t = rows[static_cast<std::size_t>(k)];
      const Eigen::VectorXd a = solution.alpha.row(t).transpose();
      values[static_cast<std::size_t>(k)] = partition.type[static_cast<std::size_t>(t)] == SvType::type1
                                                ? span_sv1(t, hs, a)
                                                : span_sv2(t, hs, gram, a);
    });
  }
  for (std::size_t k = 0; k < rows.size(); ++k) report.spans.emplace(rows[k], values[k]);
  return report;
}

double loo_estimate_theorem2(const DualSolution& solution, const AugmentedProblem& problem,
                             const GramMatrix& gram, SpanReport& spans) {
  Index count = 0;
  for (const auto& [t, s2] : spans.spans) {
    if (!problem.is_training(t)) continue;
    const Eigen::VectorXd f = solution.alpha.transpose() * gram.values.col(t);
    const double rhs = solution.alpha.row(t).dot(f.transpose());
    if (s2 - rhs >= -1e-9 * std::max(std::abs(s2), std::abs(rhs))) ++count;
  }
  spans.psi3_count = count;
  spans.bound_theorem2 = problem.n_train > 0 ? static_cast<double>(count) / problem.n_train : 0.0;
  return spans.bound_theorem2;
}

double loo_bound_theorem1(const DualSolution& solution, const AugmentedProblem& problem, double D,
                          const std::map<Index, double>& spans_qp, SpanReport* report) {
  const SvPartition partition = classify_support_vectors(solution, problem);
  Index psi1 = 0;
  Index psi2 = 0;
  for (Index t = 0; t < problem.n_train; ++t) {
    const SvType type = partition.type[static_cast<std::size_t>(t)];
    if (type == SvType::type2) {
      ++psi1;
    } else if (type == SvType::type1) {
      const auto it = spans_qp.find(t);
      if (it == spans_qp.end()) {
        throw Error(ErrorKind::invalid_input, "loo_bound_theorem1: no span for row " + std::to_string(t));
      }
      const double factor = std::max(std::sqrt(2.0) * D, 1.0 / std::sqrt(problem.costs(t)));
      if (it->second * factor >= 1.0) ++psi2;
    }
  }
  const double bound = problem.n_train > 0 ? static_cast<double>(psi1 + psi2) / problem.n_train : 0.0;
  if (report) {
    report->psi1_count = psi1;
    report->psi2_count = psi2;
    report->D = D;
    report->bound_theorem1 = bound;
    report->n_train = problem.n_train;
  }
  return bound;
}

}  // namespace musvm
