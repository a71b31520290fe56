#include "musvm/model.hpp"

#include <cmath>
#include <string>

#include "musvm/parallel.hpp"

namespace musvm {

void Dataset::validate() const {
  if (num_classes < 2) throw Error(ErrorKind::invalid_input, "dataset needs at least 2 classes");
  if (size() < 1) throw Error(ErrorKind::invalid_input, "dataset is empty");
  if (static_cast<Index>(labels.size()) != size()) {
    throw Error(ErrorKind::invalid_input, "dataset: label count does not match sample count");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw Error(ErrorKind::invalid_input, "dataset: label " + std::to_string(y) + " out of range");
    }
  }
  if (!samples.allFinite()) throw Error(ErrorKind::invalid_input, "dataset: non-finite sample value");
}

void Hyperparams::validate() const {
  if (!(c > 0.0 && std::isfinite(c))) throw Error(ErrorKind::invalid_input, "C must be > 0");
  if (!(c_star >= 0.0 && std::isfinite(c_star))) throw Error(ErrorKind::invalid_input, "C* must be >= 0");
  if (!(delta >= 0.0 && std::isfinite(delta))) throw Error(ErrorKind::invalid_input, "delta must be >= 0");
  kernel.validate();
}

AugmentedProblem augment(const Dataset& train, const UniversumSet& universum,
                         const Hyperparams& params) {
  train.validate();
  params.validate();
  const Index n = train.size();
  const Index m = universum.size();
  const int L = train.num_classes;
  if (m > 0 && universum.dim() != train.dim()) {
    throw Error(ErrorKind::invalid_input, "augment: universum dimension " +
                                              std::to_string(universum.dim()) + " != training dimension " +
                                              std::to_string(train.dim()));
  }
  const Index rows = n + m * L;

  AugmentedProblem p;
  p.samples.resize(train.dim(), rows);
  p.labels.resize(static_cast<std::size_t>(rows));
  p.costs.resize(rows);
  p.margins.resize(rows, L);
  p.origin.resize(static_cast<std::size_t>(rows));
  p.n_train = n;
  p.num_classes = L;

  for (Index i = 0; i < n; ++i) {
    const int y = train.labels[static_cast<std::size_t>(i)];
    p.samples.col(i) = train.samples.col(i);
    p.labels[static_cast<std::size_t>(i)] = y;
    p.costs(i) = params.c;
    p.margins.row(i).setOnes();
    p.margins(i, y) = 0.0;
    p.origin[static_cast<std::size_t>(i)] = {RowKind::training, i, y};
  }
  for (Index u = 0; u < m; ++u) {
    for (int l = 0; l < L; ++l) {
      const Index r = n + u * L + l;
      p.samples.col(r) = universum.samples.col(u);
      p.labels[static_cast<std::size_t>(r)] = l;
      p.costs(r) = params.c_star;
      p.margins.row(r).setConstant(-params.delta);
      p.margins(r, l) = 0.0;
      p.origin[static_cast<std::size_t>(r)] = {RowKind::universum, u, l};
    }
  }
  return p;
}

Model make_model(const AugmentedProblem& problem, const DualSolution& solution,
                 const Hyperparams& params, std::vector<int> label_map) {
  std::vector<Index> keep;
  for (Index i = 0; i < solution.alpha.rows(); ++i) {
    if ((solution.alpha.row(i).array() != 0.0).any()) keep.push_back(i);
  }
  Model model;
  model.kernel = params.kernel;
  model.num_classes = problem.num_classes;
  model.dim = problem.samples.rows();
  model.params = params;
  model.label_map = std::move(label_map);
  model.support_samples.resize(model.dim, static_cast<Index>(keep.size()));
  model.alpha.resize(static_cast<Index>(keep.size()), problem.num_classes);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    model.support_samples.col(static_cast<Index>(k)) = problem.samples.col(keep[k]);
    model.alpha.row(static_cast<Index>(k)) = solution.alpha.row(keep[k]);
  }
  return model;
}

Eigen::VectorXd decision_values(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim) {
    throw Error(ErrorKind::invalid_input, "decision_values: expected dimension " +
                                              std::to_string(model.dim) + ", got " +
                                              std::to_string(x.size()));
  }
  const Index s = model.support_count();
  Eigen::VectorXd k(s);
  for (Index i = 0; i < s; ++i) k(i) = kernel_eval(model.kernel, model.support_samples.col(i), x);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model.num_classes);
  for (int l = 0; l < model.num_classes; ++l) {
    double acc = 0.0;
    for (Index i = 0; i < s; ++i) acc += model.alpha(i, l) * k(i);
    f(l) = acc;
  }
  return f;
}

Eigen::MatrixXd decision_matrix(const Model& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(model.num_classes, x.cols());
  parallel_for(x.cols(), [&](Index j) { out.col(j) = decision_values(model, x.col(j)); });
  return out;
}

int argmax_class(const Eigen::Ref<const Eigen::VectorXd>& values) {
  int best = 0;
  for (Index l = 1; l < values.size(); ++l) {
    if (values(l) > values(best)) best = static_cast<int>(l);
  }
  return best;
}

int predict(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return argmax_class(decision_values(model, x));
}

std::vector<int> predict_all(const Model& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd f = decision_matrix(model, x);
  std::vector<int> out(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j) out[static_cast<std::size_t>(j)] = argmax_class(f.col(j));
  return out;
}

double error_rate(const Model& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  const std::vector<int> pred = predict_all(model, data.samples);
  Index wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != data.labels[i];
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double primal_objective(const Model& model, const AugmentedProblem& problem) {
  const Index s = model.support_count();
  double reg = 0.0;
  if (s > 0) {
    const Eigen::MatrixXd k = cross_kernel(model.kernel, model.support_samples, model.support_samples);
    reg = 0.5 * (model.alpha.transpose() * k * model.alpha).trace();
  }
  const Eigen::MatrixXd f = decision_matrix(model, problem.samples);
  double loss = 0.0;
  for (Index i = 0; i < problem.rows(); ++i) {
    const int y = problem.labels[static_cast<std::size_t>(i)];
    double xi = 0.0;
    for (int l = 0; l < problem.num_classes; ++l) {
      xi = std::max(xi, problem.margins(i, l) - f(y, i) + f(l, i));
    }
    loss += problem.costs(i) * xi;
  }
  return reg + loss;
}

SvPartition classify_support_vectors(const DualSolution& solution, const AugmentedProblem& problem) {
  SvPartition part;
  part.type.assign(static_cast<std::size_t>(problem.rows()), SvType::none);
  for (Index i = 0; i < problem.rows(); ++i) {
    const double c = problem.costs(i);
    const double a = solution.alpha(i, problem.labels[static_cast<std::size_t>(i)]);
    const double tau = kSvTolerance * c;
    SvType t = SvType::none;
    if (c > 0.0 && a > tau) t = a >= c - tau ? SvType::type2 : SvType::type1;
    part.type[static_cast<std::size_t>(i)] = t;
    (t == SvType::type1 ? part.sv1 : t == SvType::type2 ? part.sv2 : part.non_sv).push_back(i);
  }
  return part;
}

}  // namespace musvm
