#include "musvm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>


namespace musvm {

double class_projection(const Eigen::Ref<const Eigen::VectorXd>& f, int k, bool exclude_self) {
  if (k < 0 || k >= f.size()) throw Error(ErrorKind::invalid_input, "class_projection: class out of range");
  double best = -std::numeric_limits<double>::infinity();
  for (Index l = 0; l < f.size(); ++l) {
    if (exclude_self && l == k) continue;
    best = std::max(best, f(l));
  }
  return f(k) - best;
}

ProjectionTable projection_values(const Model& model, const Dataset& train, const UniversumSet& universum,
                                  bool exclude_self) {
  const int L = model.num_classes;
  ProjectionTable table;
  table.train.assign(static_cast<std::size_t>(L), {});
  table.universum.assign(static_cast<std::size_t>(L), {});
  if (train.size() > 0) {
    const Eigen::MatrixXd f = decision_matrix(model, train.samples);
    for (Index i = 0; i < train.size(); ++i) {
      const int y = train.labels[static_cast<std::size_t>(i)];
      table.train[static_cast<std::size_t>(y)].push_back(class_projection(f.col(i), y, exclude_self));
    }
  }
  if (universum.size() > 0) {
    const Eigen::MatrixXd f = decision_matrix(model, universum.samples);
    for (int k = 0; k < L; ++k) {
      auto& list = table.universum[static_cast<std::size_t>(k)];
      list.reserve(static_cast<std::size_t>(universum.size()));
      for (Index i = 0; i < universum.size(); ++i) list.push_back(class_projection(f.col(i), k, exclude_self));
    }
  }
  return table;
}

Index Histogram::total() const {
  Index s = 0;
  for (Index c : counts) s += c;
  return s;
}

Histogram histogram(const std::vector<double>& values, int bins, std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw Error(ErrorKind::invalid_input, "histogram: need at least one bin");
  double lo = 0.0;
  double hi = 0.0;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(hi > lo)) throw Error(ErrorKind::invalid_input, "histogram: range must satisfy lo < hi");
  } else {
    double r = 0.0;
    for (double v : values) r = std::max(r, std::abs(v));
    if (r == 0.0) r = 1.0;
    lo = -r;
    hi = r;
  }
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[static_cast<std::size_t>(b)] = lo + width * b;
  h.edges.back() = hi;
  for (double v : values) {
    auto b = static_cast<long long>(std::floor((v - lo) / width));
    b = std::clamp<long long>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

Eigen::VectorXi universum_label_frequencies(const Model& model, const UniversumSet& universum) {
  Eigen::VectorXi freq = Eigen::VectorXi::Zero(model.num_classes);
  if (universum.size() == 0) return freq;
  for (int c : predict_all(model, universum.samples)) ++freq(c);
  return freq;
}

void write_histogram_csv(std::ostream& out, const ProjectionTable& table, int bins) {
  double r = 0.0;
  for (const auto* lists : {&table.train, &table.universum}) {
    for (const auto& list : *lists) {
      for (double v : list) r = std::max(r, std::abs(v));
    }
  }
  if (r == 0.0) r = 1.0;
  out << "component,class,bin_left,bin_right,count\n";
  char buf[128];
  auto emit = [&](const char* name, const std::vector<std::vector<double>>& lists) {
    for (std::size_t k = 0; k < lists.size(); ++k) {
      const Histogram h = histogram(lists[k], bins, std::make_pair(-r, r));
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%lld\n", name, k + 1, h.edges[b], h.edges[b + 1],
                      static_cast<long long>(h.counts[b]));
        out << buf;
      }
    }
  };
  emit("train", table.train);
  emit("universum", table.universum);
}

}  // namespace musvm
