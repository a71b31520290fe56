#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "musvm/model.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// Projection f_k(x) - max_{l != k} f_l(x), or with the max over every l when
/// `exclude_self` is false (that form is never positive).
double class_projection(const Eigen::Ref<const Eigen::VectorXd>& f, int k, bool exclude_self = true);

struct ProjectionTable {
  std::vector<std::vector<double>> train;      // per class, own-class samples only
  std::vector<std::vector<double>> universum;  // per class, every universum sample
};

ProjectionTable projection_values(const Model& model, const Dataset& train, const UniversumSet& universum,
                                  bool exclude_self = true);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<Index> counts;
  Index total() const;
};

inline constexpr int kDefaultBins = 50;

/// Uniform bins over `range` (default: [-r, r] with r = max |value|, or
/// [-1, 1] when r = 0). The last bin is closed on the right; values outside
/// the range go to the nearest end bin.
Histogram histogram(const std::vector<double>& values, int bins = kDefaultBins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

/// Predicted class counts over the universum.
Eigen::VectorXi universum_label_frequencies(const Model& model, const UniversumSet& universum);

/// CSV with header component,class,bin_left,bin_right,count; classes 1-based.
/// Every list shares the range derived from all projection values.
void write_histogram_csv(std::ostream& out, const ProjectionTable& table, int bins = kDefaultBins);

}  // namespace musvm
