#include "musvm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "musvm/parallel.hpp"

namespace musvm::oracle {

namespace {

// Root of a decreasing function on [lo, hi] with phi(lo) >= 0 >= phi(hi).
template <typename Phi>
double bisect(Phi&& phi, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double dual_value(const Eigen::MatrixXd& K, const Eigen::MatrixXd& a, const Eigen::MatrixXd& e) {
  double quad = 0.0;
  for (Index l = 0; l < a.cols(); ++l) quad += a.col(l).dot(K * a.col(l));
  return -0.5 * quad - (a.array() * e.array()).sum();
}

Eigen::MatrixXd row_bounds(const AugmentedProblem& problem) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(problem.rows(), problem.num_classes);
  for (Index i = 0; i < problem.rows(); ++i) b(i, problem.labels[static_cast<std::size_t>(i)]) = problem.costs(i);
  return b;
}

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& v, const Eigen::MatrixXd& bounds) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Index i = 0; i < v.rows(); ++i) {
    out.row(i) = project_capped(v.row(i).transpose(), bounds.row(i).transpose()).transpose();
  }
  return out;
}

Eigen::MatrixXd kernel_block(const KernelSpec& spec, const Eigen::MatrixXd& x) {
  const Index n = x.cols();
  Eigen::MatrixXd K(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = kernel_eval(spec, x.col(i), x.col(j));
  }
  return K;
}

}  // namespace

double power_iteration(const Eigen::MatrixXd& a, std::uint64_t seed, int iters) {
  if (a.rows() == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::VectorXd v(a.rows());
  for (Index i = 0; i < v.size(); ++i) v(i) = unif(rng);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double norm = v.norm();
    if (norm == 0.0) break;
    v /= norm;
    const Eigen::VectorXd w = a * v;
    lambda = std::max(lambda, v.dot(w));
    v = w;
  }
  // The Rayleigh quotient approaches the top eigenvalue from below.
  return lambda * 1.05 + 1e-300;
}

Eigen::VectorXd project_capped(const Eigen::Ref<const Eigen::VectorXd>& v,
                               const Eigen::Ref<const Eigen::VectorXd>& bound) {
  const double lo = (v - bound).minCoeff();
  const double hi = std::max(lo, v.sum() / static_cast<double>(v.size()));
  auto phi = [&](double theta) { return bound.cwiseMin((v.array() - theta).matrix()).sum(); };
  const double theta = bisect(phi, lo, hi);
  return bound.cwiseMin((v.array() - theta).matrix());
}

Eigen::VectorXd project_floored(const Eigen::Ref<const Eigen::VectorXd>& v,
                                const Eigen::Ref<const Eigen::VectorXd>& lower,
                                const std::vector<char>& fixed_zero) {
  const Index L = v.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(L);
  double vsum = 0.0;
  Index nfree = 0;
  double hi = -std::numeric_limits<double>::infinity();
  for (Index l = 0; l < L; ++l) {
    if (fixed_zero[static_cast<std::size_t>(l)]) continue;
    vsum += v(l);
    ++nfree;
    hi = std::max(hi, v(l) - lower(l));
  }
  if (nfree == 0) return out;
  const double lo = std::min(vsum / static_cast<double>(nfree), hi);
  auto phi = [&](double theta) {
    double s = 0.0;
    for (Index l = 0; l < L; ++l) {
      if (!fixed_zero[static_cast<std::size_t>(l)]) s += std::max(lower(l), v(l) - theta);
    }
    return s;
  };
  const double theta = bisect(phi, lo, hi);
  for (Index l = 0; l < L; ++l) {
    if (!fixed_zero[static_cast<std::size_t>(l)]) out(l) = std::max(lower(l), v(l) - theta);
  }
  return out;
}

DualSolution brute_force_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                              const OracleConfig& cfg, const std::optional<Eigen::MatrixXd>& initial) {
  const Index N = problem.rows();
  if (N > kBruteForceCap) {
    throw Error(ErrorKind::invalid_input, "brute_force_dual: " + std::to_string(N) + " rows exceeds cap of " +
                                              std::to_string(kBruteForceCap));
  }
  if (gram.size() != N) throw Error(ErrorKind::invalid_input, "brute_force_dual: gram size mismatch");
  const Eigen::MatrixXd& K = gram.values;
  const Eigen::MatrixXd& e = problem.margins;
  const Eigen::MatrixXd bounds = row_bounds(problem);
  double eta = cfg.step_size > 0.0 ? cfg.step_size : 1.0 / power_iteration(K, cfg.seed);
  if (!std::isfinite(eta)) eta = 1.0;

  auto ascent = [&](const Eigen::MatrixXd& a) -> Eigen::MatrixXd { return -(K * a + e); };

  DualSolution sol;
  Eigen::MatrixXd x = initial ? project_rows(*initial, bounds) : Eigen::MatrixXd::Zero(N, problem.num_classes);
  Eigen::MatrixXd x_prev = x;
  double wx = dual_value(K, x, e);
  double t = 1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Eigen::MatrixXd plain = project_rows(x + eta * ascent(x), bounds);
    const double move = (plain - x).cwiseAbs().maxCoeff();
    if (move <= cfg.tol) {
      sol.converged = true;
      sol.kkt_gap = move;
      break;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Eigen::MatrixXd y = x + ((t - 1.0) / t_next) * (x - x_prev);
    Eigen::MatrixXd z = project_rows(y + eta * ascent(y), bounds);
    double wz = dual_value(K, z, e);
    if (wz < wx) {
      // Momentum overshot: restart from the plain step.
      t = 1.0;
      z = plain;
      wz = dual_value(K, z, e);
      if (wz < wx) {
        eta *= 0.5;
        ++sol.iterations;
        continue;
      }
    } else {
      t = t_next;
    }
    x_prev = x;
    x = z;
    wx = wz;
    ++sol.iterations;
    sol.kkt_gap = move;
  }
  sol.alpha = x;
  sol.objective = wx;
  return sol;
}

LooResult exact_loo(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                    const SolverOptions& options) {
  const Index n = train.size();
  if (n > kLooCap) {
    throw Error(ErrorKind::invalid_input, "exact_loo_error: n = " + std::to_string(n) + " exceeds cap of " +
                                              std::to_string(kLooCap));
  }
  const AugmentedProblem problem = augment(train, universum, params);
  const GramMatrix gram = gram_matrix(params.kernel, problem.samples);
  SolverOptions full_opts = options;
  full_opts.pinned_rows.clear();
  full_opts.warm_start.reset();
  const DualSolution full = solve_dual(problem, gram, full_opts);

  LooResult result;
  result.predictions.assign(static_cast<std::size_t>(n), 0);
  parallel_for(n, [&](Index t) {
    SolverOptions opts = full_opts;
    opts.pinned_rows = {t};
    Eigen::MatrixXd warm = full.alpha;
    warm.row(t).setZero();
    opts.warm_start = std::move(warm);
    const DualSolution sol = solve_dual(problem, gram, opts);
    if (!sol.converged) {
      throw Error(ErrorKind::non_convergence, "exact_loo_error: re-solve without training row " +
                                                  std::to_string(t) + " did not converge (psi = " +
                                                  std::to_string(sol.kkt_gap) + ")");
    }
    const Eigen::VectorXd f = sol.alpha.transpose() * gram.values.col(t);
    result.predictions[static_cast<std::size_t>(t)] = argmax_class(f);
  });
  Index wrong = 0;
  for (Index t = 0; t < n; ++t) wrong += result.predictions[static_cast<std::size_t>(t)] != train.labels[static_cast<std::size_t>(t)];
  result.error = static_cast<double>(wrong) / static_cast<double>(n);
  return result;
}

double exact_loo_error(const Dataset& train, const UniversumSet& universum, const Hyperparams& params,
                       const SolverOptions& options) {
  return exact_loo(train, universum, params, options).error;
}

LooResult exact_loo_by_deletion(const Dataset& train, const UniversumSet& universum,
                                const Hyperparams& params, const SolverOptions& options) {
  const Index n = train.size();
  if (n < 2) throw Error(ErrorKind::invalid_input, "exact_loo_by_deletion: needs n >= 2");
  if (n > kLooCap) throw Error(ErrorKind::invalid_input, "exact_loo_by_deletion: n exceeds cap");
  LooResult result;
  result.predictions.assign(static_cast<std::size_t>(n), 0);
  Index wrong = 0;
  for (Index t = 0; t < n; ++t) {
    Dataset rest;
    rest.num_classes = train.num_classes;
    rest.samples.resize(train.dim(), n - 1);
    for (Index i = 0, k = 0; i < n; ++i) {
      if (i == t) continue;
      rest.samples.col(k++) = train.samples.col(i);
      rest.labels.push_back(train.labels[static_cast<std::size_t>(i)]);
    }
    const AugmentedProblem problem = augment(rest, universum, params);
    const GramMatrix gram = gram_matrix(params.kernel, problem.samples);
    SolverOptions opts = options;
    opts.pinned_rows.clear();
    opts.warm_start.reset();
    const DualSolution sol = solve_dual(problem, gram, opts);
    if (!sol.converged) {
      throw Error(ErrorKind::non_convergence, "exact_loo_by_deletion: solve without row " + std::to_string(t) +
                                                  " did not converge");
    }
    const Model model = make_model(problem, sol, params);
    const int pred = predict(model, train.samples.col(t));
    result.predictions[static_cast<std::size_t>(t)] = pred;
    wrong += pred != train.labels[static_cast<std::size_t>(t)];
  }
  result.error = static_cast<double>(wrong) / static_cast<double>(n);
  return result;
}

namespace {

struct Lemma1Setup {
  std::vector<Index> free_rows;
  Eigen::MatrixXd lower;  // free x L
  std::vector<std::vector<char>> fixed;
};

Lemma1Setup lemma1_setup(const DualSolution& solution, const AugmentedProblem& problem, Index t,
                         const std::vector<Index>& sv1) {
  const Index L = problem.num_classes;
  Lemma1Setup s;
  for (Index r : sv1) {
    if (r != t) s.free_rows.push_back(r);
  }
  s.lower = Eigen::MatrixXd::Zero(static_cast<Index>(s.free_rows.size()), L);
  s.fixed.assign(s.free_rows.size(), std::vector<char>(static_cast<std::size_t>(L), 0));
  for (std::size_t k = 0; k < s.free_rows.size(); ++k) {
    const Index r = s.free_rows[k];
    const int y = problem.labels[static_cast<std::size_t>(r)];
    const double tau = kSvTolerance * problem.costs(r);
    for (Index l = 0; l < L; ++l) {
      const double a = solution.alpha(r, l);
      if (l == y) {
        s.lower(static_cast<Index>(k), l) = a - problem.costs(r);
      } else if (a < -tau) {
        s.lower(static_cast<Index>(k), l) = a;
      } else {
        s.fixed[k][static_cast<std::size_t>(l)] = 1;
      }
    }
  }
  return s;
}

}  // namespace

Lemma1Span span_qp_lemma1(const DualSolution& solution, const AugmentedProblem& problem,
                          const GramMatrix& gram, Index t, double tol, int max_iters) {
  const SvPartition part = classify_support_vectors(solution, problem);
  if (part.type[static_cast<std::size_t>(t)] != SvType::type1) {
    throw Error(ErrorKind::invalid_input, "span_qp_lemma1: row " + std::to_string(t) + " is not a Type 1 SV");
  }
  if (static_cast<Index>(part.sv1.size()) > kLemma1Cap) {
    throw Error(ErrorKind::invalid_input, "span_qp_lemma1: |SV1| exceeds cap of " + std::to_string(kLemma1Cap));
  }
  const Index L = problem.num_classes;
  const Lemma1Setup setup = lemma1_setup(solution, problem, t, part.sv1);
  const Index f = static_cast<Index>(setup.free_rows.size());
  const Eigen::RowVectorXd at = solution.alpha.row(t);

  Eigen::MatrixXd Kff(f, f);
  Eigen::VectorXd kft(f);
  for (Index a = 0; a < f; ++a) {
    const Index ra = setup.free_rows[static_cast<std::size_t>(a)];
    kft(a) = gram(ra, t);
    for (Index b = 0; b < f; ++b) Kff(a, b) = gram(ra, setup.free_rows[static_cast<std::size_t>(b)]);
  }
  const double ktt = gram(t, t);

  auto objective = [&](const Eigen::MatrixXd& B) {
    return (B.transpose() * Kff * B).trace() + 2.0 * (kft.transpose() * B).dot(at) + ktt * at.squaredNorm();
  };
  auto gradient = [&](const Eigen::MatrixXd& B) -> Eigen::MatrixXd {
    return 2.0 * (Kff * B + kft * at);
  };
  auto project = [&](const Eigen::MatrixXd& V) {
    Eigen::MatrixXd out(f, L);
    for (Index k = 0; k < f; ++k) {
      out.row(k) = project_floored(V.row(k).transpose(), setup.lower.row(k).transpose(),
                                   setup.fixed[static_cast<std::size_t>(k)])
                       .transpose();
    }
    return out;
  };
  auto fw_gap = [&](const Eigen::MatrixXd& B, const Eigen::MatrixXd& G) {
    double gap = 0.0;
    for (Index k = 0; k < f; ++k) {
      double lin_lb = 0.0;
      double sum_lb = 0.0;
      double gmin = std::numeric_limits<double>::infinity();
      double at_b = 0.0;
      for (Index l = 0; l < L; ++l) {
        if (setup.fixed[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) continue;
        lin_lb += G(k, l) * setup.lower(k, l);
        sum_lb += setup.lower(k, l);
        gmin = std::min(gmin, G(k, l));
        at_b += G(k, l) * B(k, l);
      }
      if (std::isfinite(gmin)) gap += at_b - (lin_lb - sum_lb * gmin);
    }
    return gap;
  };

  Lemma1Span res;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(f, L);
  if (f > 0) {
    const double lip = 2.0 * power_iteration(Kff, 7);
    const double eta = lip > 0.0 ? 1.0 / lip : 1.0;
    Eigen::MatrixXd y = x;
    double fx = objective(x);
    double tk = 1.0;
    for (int it = 0; it < max_iters; ++it) {
      if (it % 10 == 0) {
        res.fw_gap = fw_gap(x, gradient(x));
        if (res.fw_gap <= tol) {
          res.converged = true;
          break;
        }
      }
      const Eigen::MatrixXd z = project(y - eta * gradient(y));
      const double fz = objective(z);
      const Eigen::MatrixXd x_old = x;
      if (fz <= fx) {
        x = z;
        fx = fz;
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      y = x + (tk / t_next) * (z - x) + ((tk - 1.0) / t_next) * (x - x_old);
      tk = t_next;
      res.iterations = it + 1;
    }
    if (!res.converged) {
      res.fw_gap = fw_gap(x, gradient(x));
      res.converged = res.fw_gap <= tol;
    }
    if (!res.converged) {
      throw Error(ErrorKind::non_convergence, "span_qp_lemma1: row " + std::to_string(t) +
                                                  " stopped with Frank-Wolfe gap " + std::to_string(res.fw_gap) +
                                                  " after " + std::to_string(res.iterations) + " iterations");
    }
  } else {
    res.converged = true;
  }
  res.span_sq = std::max(0.0, objective(x));
  res.span = std::sqrt(res.span_sq);

  res.beta = Eigen::MatrixXd::Zero(problem.rows(), L);
  res.beta.row(t) = at;
  for (Index k = 0; k < f; ++k) {
    res.beta.row(setup.free_rows[static_cast<std::size_t>(k)]) = x.row(k);
    for (Index l = 0; l < L; ++l) {
      if (setup.fixed[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) continue;
      if (x(k, l) - setup.lower(k, l) <= 1e-9 * std::max(1.0, std::abs(setup.lower(k, l)))) {
        res.inequalities_active = true;
      }
    }
  }
  return res;
}

bool lemma1_feasible(const DualSolution& solution, const AugmentedProblem& problem, Index t,
                     const Eigen::MatrixXd& beta, double tol) {
  const SvPartition part = classify_support_vectors(solution, problem);
  const Lemma1Setup setup = lemma1_setup(solution, problem, t, part.sv1);
  const Index L = problem.num_classes;
  std::vector<char> allowed(static_cast<std::size_t>(problem.rows()), 0);
  for (Index r : setup.free_rows) allowed[static_cast<std::size_t>(r)] = 1;
  if ((beta.row(t) - solution.alpha.row(t)).cwiseAbs().maxCoeff() > tol) return false;
  for (Index r = 0; r < problem.rows(); ++r) {
    if (r != t && !allowed[static_cast<std::size_t>(r)] && beta.row(r).cwiseAbs().maxCoeff() > tol) return false;
  }
  for (std::size_t k = 0; k < setup.free_rows.size(); ++k) {
    const Index r = setup.free_rows[k];
    if (std::abs(beta.row(r).sum()) > tol) return false;
    for (Index l = 0; l < L; ++l) {
      const double b = beta(r, l);
      if (setup.fixed[k][static_cast<std::size_t>(l)] ? std::abs(b) > tol
                                                      : b < setup.lower(static_cast<Index>(k), l) - tol) {
        return false;
      }
    }
  }
  return true;
}

KktSpan span_kkt_oracle(const DualSolution& solution, const GramMatrix& gram, Index t,
                        const std::vector<Index>& sv1) {
  const Index L = solution.alpha.cols();
  std::vector<Index> free_rows;
  for (Index r : sv1) {
    if (r != t) free_rows.push_back(r);
  }
  const Index f = static_cast<Index>(free_rows.size());
  const Eigen::VectorXd at = solution.alpha.row(t).transpose();

  KktSpan out;
  out.beta = Eigen::MatrixXd::Zero(solution.alpha.rows(), L);
  out.beta.row(t) = at.transpose();
  if (f > 0) {
    const Index nv = f * L;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv + f, nv + f);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + f);
    for (Index a = 0; a < f; ++a) {
      const Index ra = free_rows[static_cast<std::size_t>(a)];
      for (Index b = 0; b < f; ++b) {
        const double k = gram(ra, free_rows[static_cast<std::size_t>(b)]);
        for (Index l = 0; l < L; ++l) M(a * L + l, b * L + l) = 2.0 * k;
      }
      for (Index l = 0; l < L; ++l) {
        M(a * L + l, nv + a) = 1.0;
        M(nv + a, a * L + l) = 1.0;
        rhs(a * L + l) = -2.0 * gram(ra, t) * at(l);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd sol;
    if (lu.isInvertible()) {
      sol = lu.solve(rhs);
    } else {
      out.pseudo_inverse = true;
      sol = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(M).solve(rhs);
    }
    for (Index a = 0; a < f; ++a) {
      out.beta.row(free_rows[static_cast<std::size_t>(a)]) = sol.segment(a * L, L).transpose();
    }
  }
  std::vector<Index> support = free_rows;
  support.push_back(t);
  double s2 = 0.0;
  for (Index i : support) {
    for (Index j : support) s2 += out.beta.row(i).dot(out.beta.row(j)) * gram(i, j);
  }
  out.span_sq = std::max(0.0, s2);
  return out;
}

double enclosing_ball_diameter(const KernelSpec& spec, const Eigen::MatrixXd& x, double tol, int max_iters) {
  const Index n = x.cols();
  if (n == 0) throw Error(ErrorKind::invalid_input, "enclosing_ball_diameter: empty sample list");
  const Eigen::MatrixXd K = kernel_block(spec, x);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  lambda(0) = 1.0;
  Eigen::VectorXd k_lambda = K.col(0);
  double quad = K(0, 0);
  double upper = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Index far = 0;
    double far_d2 = -1.0;
    for (Index j = 0; j < n; ++j) {
      const double d2 = K(j, j) - 2.0 * k_lambda(j) + quad;
      if (d2 > far_d2) {
        far_d2 = d2;
        far = j;
      }
    }
    upper = std::sqrt(std::max(0.0, far_d2));
    const double dual = lambda.dot(K.diagonal()) - quad;
    const double lower = std::sqrt(std::max(0.0, dual));
    if (upper - lower < 0.5 * tol) break;
    // Exact line search on the dual along e_far - lambda.
    const double slope = far_d2 - dual;
    const double curv = far_d2;
    const double s = curv > 0.0 ? std::clamp(slope / (2.0 * curv), 0.0, 1.0) : 0.0;
    if (s == 0.0) break;
    lambda *= (1.0 - s);
    lambda(far) += s;
    quad = (1.0 - s) * (1.0 - s) * quad + 2.0 * s * (1.0 - s) * k_lambda(far) + s * s * K(far, far);
    k_lambda = (1.0 - s) * k_lambda + s * K.col(far);
  }
  return 2.0 * upper;
}

double BinaryUsvm::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double f = 0.0;
  for (Index i = 0; i < samples.cols(); ++i) f += coef(i) * kernel_eval(kernel, samples.col(i), x);
  return f;
}

BinaryUsvm binary_usvm_oracle(const Dataset& train, const UniversumSet& universum,
                              const Hyperparams& params, const OracleConfig& cfg) {
  train.validate();
  params.validate();
  if (train.num_classes != 2) throw Error(ErrorKind::invalid_input, "binary_usvm_oracle: needs exactly 2 classes");
  const Index n = train.size();
  const Index m = universum.size();
  if (n + m > kBinaryCap) throw Error(ErrorKind::invalid_input, "binary_usvm_oracle: size cap exceeded");
  if (m > 0 && universum.dim() != train.dim()) {
    throw Error(ErrorKind::invalid_input, "binary_usvm_oracle: dimension mismatch");
  }

  BinaryUsvm out;
  out.kernel = params.kernel;
  out.samples.resize(train.dim(), n + m);
  out.samples.leftCols(n) = train.samples;
  if (m > 0) out.samples.rightCols(m) = universum.samples;
  const Eigen::MatrixXd K = kernel_block(params.kernel, out.samples);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) y(i) = train.labels[static_cast<std::size_t>(i)] == 0 ? 1.0 : -1.0;
  const double c = 2.0 * params.c;
  const double cs = 2.0 * params.c_star;
  const double delta = params.delta;

  // z = [a; p; q], a in [0, c], p, q in [0, c*], u = [y a; q - p].
  auto coef = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd u(n + m);
    u.head(n) = y.cwiseProduct(z.head(n));
    u.tail(m) = z.segment(n + m, m) - z.segment(n, m);
    return u;
  };
  auto value = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd u = coef(z);
    return z.head(n).sum() - 0.5 * u.dot(K * u) - delta * z.tail(2 * m).sum();
  };
  auto ascent = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd ku = K * coef(z);
    Eigen::VectorXd g(n + 2 * m);
    g.head(n) = Eigen::VectorXd::Ones(n) - y.cwiseProduct(ku.head(n));
    g.segment(n, m) = ku.tail(m) - Eigen::VectorXd::Constant(m, delta);
    g.segment(n + m, m) = -ku.tail(m) - Eigen::VectorXd::Constant(m, delta);
    return g;
  };
  Eigen::VectorXd hi(n + 2 * m);
  hi.head(n).setConstant(c);
  hi.tail(2 * m).setConstant(cs);
  auto project = [&](const Eigen::VectorXd& z) { return z.cwiseMax(0.0).cwiseMin(hi); };

  double eta = cfg.step_size > 0.0 ? cfg.step_size : 1.0 / (2.0 * power_iteration(K, cfg.seed));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 2 * m);
  Eigen::VectorXd x_prev = x;
  double fx = value(x);
  double t = 1.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Eigen::VectorXd plain = project(x + eta * ascent(x));
    if ((plain - x).cwiseAbs().maxCoeff() <= cfg.tol) break;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Eigen::VectorXd z = project(x + ((t - 1.0) / t_next) * (x - x_prev) + eta * ascent(x + ((t - 1.0) / t_next) * (x - x_prev)));
    double fz = value(z);
    if (fz < fx) {
      t = 1.0;
      z = plain;
      fz = value(z);
      if (fz < fx) {
        eta *= 0.5;
        continue;
      }
    } else {
      t = t_next;
    }
    x_prev = x;
    x = z;
    fx = fz;
    out.iterations = it + 1;
  }
  out.coef = coef(x);
  out.objective = fx;
  return out;
}

Theorem1Result theorem1_bound(const AugmentedProblem& problem, const GramMatrix& gram,
                              const DualSolution& solution, double qp_tol) {
  Theorem1Result out;
  const SvPartition part = classify_support_vectors(solution, problem);
  out.D = enclosing_ball_diameter(gram.spec, problem.samples.leftCols(problem.n_train), 1e-7);
  std::vector<Index> rows;
  for (Index t : part.sv1) {
    if (problem.is_training(t)) rows.push_back(t);
  }
  std::vector<double> spans(rows.size(), 0.0);
  parallel_for(static_cast<Index>(rows.size()), [&](Index k) {
    const Lemma1Span s = span_qp_lemma1(solution, problem, gram, rows[static_cast<std::size_t>(k)], qp_tol);
    spans[static_cast<std::size_t>(k)] = s.span;
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.spans.emplace(rows[k], spans[k]);
    out.report.spans.emplace(rows[k], spans[k] * spans[k]);
  }
  out.bound = loo_bound_theorem1(solution, problem, out.D, out.spans, &out.report);
  return out;
}

}  // namespace musvm::oracle
