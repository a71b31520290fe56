#include "musvm/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace musvm {

namespace {

Eigen::VectorXd class_mean(const GaussianSpec& spec, int k) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(spec.dim);
  const double angle = 2.0 * std::numbers::pi * k / spec.num_classes;
  mu(0) = spec.separation * std::cos(angle);
  if (spec.dim > 1) mu(1) = spec.separation * std::sin(angle);
  return mu;
}

}  // namespace

Dataset sample_gaussian(const GaussianSpec& spec, std::mt19937_64& rng) {
  if (spec.n < 1 || spec.num_classes < 2 || spec.dim < 1) {
    throw Error(ErrorKind::invalid_input, "sample_gaussian: invalid spec");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.num_classes = spec.num_classes;
  data.samples.resize(spec.dim, spec.n);
  data.labels.resize(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    const int y = static_cast<int>(i % spec.num_classes);
    data.labels[static_cast<std::size_t>(i)] = y;
    Eigen::VectorXd x = class_mean(spec, y);
    for (Index j = 0; j < spec.dim; ++j) {
      const bool nuisance = j >= 2 && j < 2 + spec.nuisance_dims;
      x(j) += spec.noise * (nuisance ? spec.nuisance_scale : 1.0) * normal(rng);
    }
    data.samples.col(i) = x;
  }
  return data;
}

UniversumSet random_averaging(const Dataset& train, Index m, std::mt19937_64& rng) {
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(train.num_classes));
  for (Index i = 0; i < train.size(); ++i) by_class[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(i)])].push_back(i);
  for (const auto& members : by_class) {
    if (members.empty()) throw Error(ErrorKind::invalid_input, "random_averaging: a class has no samples");
  }
  UniversumSet u;
  u.samples = Eigen::MatrixXd::Zero(train.dim(), m);
  for (Index j = 0; j < m; ++j) {
    for (const auto& members : by_class) {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      u.samples.col(j) += train.samples.col(members[pick(rng)]);
    }
    u.samples.col(j) /= static_cast<double>(train.num_classes);
  }
  return u;
}

UniversumSet gaussian_universum(Index m, Index dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  UniversumSet u;
  u.samples.resize(dim, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < dim; ++i) u.samples(i, j) = normal(rng);
  }
  return u;
}

RandomInstance random_instance(std::uint64_t seed, const RandomInstanceSpec& spec) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> classes(spec.min_classes, spec.max_classes);
  const int L = classes(rng);
  std::uniform_int_distribution<Index> count(std::max<Index>(L, 2), std::max<Index>(spec.max_n, L));
  std::uniform_int_distribution<Index> ucount(0, spec.max_m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GaussianSpec g;
  g.n = count(rng);
  g.num_classes = L;
  g.dim = spec.dim;
  g.separation = 0.5 + 1.5 * unit(rng);
  g.noise = 0.6;
  RandomInstance inst;
  inst.train = sample_gaussian(g, rng);
  inst.universum = gaussian_universum(ucount(rng), spec.dim, 0.8, rng);
  inst.params.c = std::pow(10.0, -1.0 + 2.0 * unit(rng));
  inst.params.c_star = inst.universum.size() > 0 ? inst.params.c * std::pow(10.0, -1.5 + 1.5 * unit(rng)) : 0.0;
  const double deltas[] = {0.0, 0.01, 0.05, 0.1};
  inst.params.delta = deltas[static_cast<int>(unit(rng) * 4) % 4];
  inst.params.kernel = spec.rbf ? KernelSpec::rbf(0.25 + unit(rng)) : KernelSpec::linear();
  return inst;
}

}  // namespace musvm
