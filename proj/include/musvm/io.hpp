#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "musvm/model.hpp"
#include "musvm/types.hpp"

namespace musvm {

/// Parsed labeled file. Internal class ids follow the sorted distinct file
/// labels; `label_map[k]` is the file label of class k.
struct LabeledData {
  Dataset data;
  std::vector<int> label_map;
};

/// Sparse text format, one sample per line: `label idx:val idx:val ...` with
/// 1-based, strictly increasing indices. Blank lines and lines starting with
/// '#' are skipped. The dimension is the largest index seen.
LabeledData parse_sparse_dataset(std::istream& in, const std::string& name = "<stream>");
LabeledData parse_sparse_dataset(const std::string& path);

/// Same grammar; labels are read and discarded.
UniversumSet parse_sparse_universum(std::istream& in, const std::string& name = "<stream>");
UniversumSet parse_sparse_universum(const std::string& path);

/// Pads samples with zero rows up to `dim`; more rows than `dim` is an error.
Eigen::MatrixXd conform_dim(const Eigen::MatrixXd& samples, Index dim, const std::string& what);

/// Labels written through `label_map` (1-based when empty). Index d is always
/// written so the dimension survives a round trip.
void write_sparse_dataset(std::ostream& out, const Dataset& data, const std::vector<int>& label_map = {});
void write_sparse_universum(std::ostream& out, const UniversumSet& universum);

inline constexpr int kModelFormatVersion = 1;

void serialize_model(std::ostream& out, const Model& model);
void serialize_model(const Model& model, const std::string& path);
Model deserialize_model(std::istream& in);
Model deserialize_model(const std::string& path);

/// External label for internal class k.
int external_label(const Model& model, int k);

}  // namespace musvm
