#include "musvm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

namespace musvm {

namespace {

struct Record {
  int label = 0;
  std::vector<std::pair<Index, double>> entries;
};

[[noreturn]] void data_error(const std::string& name, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::data, name + ":" + std::to_string(line) + ": " + what);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<Record> read_records(std::istream& in, const std::string& name, Index& dim) {
  std::vector<Record> records;
  std::string line;
  std::size_t lineno = 0;
  dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    Record rec;
    if (!parse_number(tokens.front(), rec.label)) {
      data_error(name, lineno, "bad label '" + std::string(tokens.front()) + "'");
    }
    Index last = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::string_view tok = tokens[k];
      const std::size_t colon = tok.find(':');
      Index idx = 0;
      double val = 0.0;
      if (colon == std::string_view::npos || !parse_number(tok.substr(0, colon), idx) ||
          !parse_number(tok.substr(colon + 1), val)) {
        data_error(name, lineno, "malformed entry '" + std::string(tok) + "'");
      }
      if (idx < 1) data_error(name, lineno, "index must be >= 1 in '" + std::string(tok) + "'");
      if (idx <= last) data_error(name, lineno, "indices must be strictly increasing at '" + std::string(tok) + "'");
      if (!std::isfinite(val)) data_error(name, lineno, "non-finite value in '" + std::string(tok) + "'");
      last = idx;
      rec.entries.emplace_back(idx, val);
    }
    dim = std::max(dim, last);
    records.push_back(std::move(rec));
  }
  if (in.bad()) throw Error(ErrorKind::data, name + ": read error");
  if (records.empty()) throw Error(ErrorKind::data, name + ": no samples");
  return records;
}

Eigen::MatrixXd densify(const std::vector<Record>& records, Index dim) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& [idx, val] : records[i].entries) x(idx - 1, static_cast<Index>(i)) = val;
  }
  return x;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::data, "cannot open '" + path + "'");
  return f;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows(std::ostream& out, const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const Index d = x.rows();
  for (Index i = 0; i < x.cols(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) {
      if (x(j, i) != 0.0 || j == d - 1) out << ' ' << (j + 1) << ':' << fmt(x(j, i));
    }
    out << '\n';
  }
}

// Line-oriented reader for the model format.
class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::vector<std::string_view> next(const char* expecting) {
    while (std::getline(in_, line_)) {
      ++lineno_;
      auto tokens = split_ws(line_);
      if (!tokens.empty()) return tokens;
    }
    throw Error(ErrorKind::data, "model file truncated: expected " + std::string(expecting));
  }

  std::vector<std::string_view> keyed(const char* key, std::size_t values) {
    auto t = next(key);
    if (t.front() != key || t.size() != values + 1) fail(std::string("expected '") + key + "' line");
    return t;
  }

  template <class T>
  T number(std::string_view s) {
    T v{};
    if (!parse_number(s, v)) fail("bad number '" + std::string(s) + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::data, "model file line " + std::to_string(lineno_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t lineno_ = 0;
};

}  // namespace

LabeledData parse_sparse_dataset(std::istream& in, const std::string& name) {
  Index dim = 0;
  const std::vector<Record> records = read_records(in, name, dim);
  LabeledData out;
  for (const Record& r : records) out.label_map.push_back(r.label);
  std::sort(out.label_map.begin(), out.label_map.end());
  out.label_map.erase(std::unique(out.label_map.begin(), out.label_map.end()), out.label_map.end());
  std::map<int, int> to_class;
  for (std::size_t k = 0; k < out.label_map.size(); ++k) to_class[out.label_map[k]] = static_cast<int>(k);
  out.data.samples = densify(records, dim);
  out.data.num_classes = static_cast<int>(out.label_map.size());
  for (const Record& r : records) out.data.labels.push_back(to_class[r.label]);
  return out;
}

LabeledData parse_sparse_dataset(const std::string& path) {
  auto f = open_in(path);
  return parse_sparse_dataset(f, path);
}

UniversumSet parse_sparse_universum(std::istream& in, const std::string& name) {
  Index dim = 0;
  const std::vector<Record> records = read_records(in, name, dim);
  return UniversumSet{densify(records, dim)};
}

UniversumSet parse_sparse_universum(const std::string& path) {
  auto f = open_in(path);
  return parse_sparse_universum(f, path);
}

Eigen::MatrixXd conform_dim(const Eigen::MatrixXd& samples, Index dim, const std::string& what) {
  if (samples.rows() > dim) {
    throw Error(ErrorKind::data, what + " has dimension " + std::to_string(samples.rows()) + ", expected at most " +
                                     std::to_string(dim));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, samples.cols());
  out.topRows(samples.rows()) = samples;
  return out;
}

void write_sparse_dataset(std::ostream& out, const Dataset& data, const std::vector<int>& label_map) {
  std::vector<int> labels;
  for (int y : data.labels) labels.push_back(label_map.empty() ? y + 1 : label_map[static_cast<std::size_t>(y)]);
  write_rows(out, data.samples, labels);
}

void write_sparse_universum(std::ostream& out, const UniversumSet& universum) {
  write_rows(out, universum.samples, std::vector<int>(static_cast<std::size_t>(universum.size()), 0));
}

int external_label(const Model& model, int k) {
  return model.label_map.empty() ? k + 1 : model.label_map[static_cast<std::size_t>(k)];
}

void serialize_model(std::ostream& out, const Model& model) {
  const int L = model.num_classes;
  out << "musvm-model " << kModelFormatVersion << '\n';
  out << "kernel " << (model.kernel.kind == KernelKind::rbf ? "rbf" : "linear") << ' ' << fmt(model.kernel.gamma)
      << '\n';
  out << "classes " << L << '\n';
  out << "labels";
  for (int k = 0; k < L; ++k) out << ' ' << external_label(model, k);
  out << '\n';
  out << "dim " << model.dim << '\n';
  out << "params " << fmt(model.params.c) << ' ' << fmt(model.params.c_star) << ' ' << fmt(model.params.delta) << '\n';
  out << "support_vectors " << model.support_count() << '\n';
  for (Index s = 0; s < model.support_count(); ++s) {
    for (Index j = 0; j < model.dim; ++j) out << (j ? " " : "") << fmt(model.support_samples(j, s));
    for (int l = 0; l < L; ++l) out << (model.dim > 0 || l > 0 ? " " : "") << fmt(model.alpha(s, l));
    out << '\n';
  }
  out << "end\n";
}

void serialize_model(const Model& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::data, "cannot write '" + path + "'");
  serialize_model(f, model);
  if (!f) throw Error(ErrorKind::data, "write failed for '" + path + "'");
}

Model deserialize_model(std::istream& in) {
  ModelReader rd(in);
  auto head = rd.next("header");
  if (head.size() != 2 || head[0] != "musvm-model") {
    throw Error(ErrorKind::version, "not a model file (missing 'musvm-model' header)");
  }
  int version = 0;
  if (!parse_number(head[1], version) || version != kModelFormatVersion) {
    throw Error(ErrorKind::version, "unsupported model format version '" + std::string(head[1]) + "' (expected " +
                                        std::to_string(kModelFormatVersion) + ")");
  }
  Model m;
  auto kern = rd.keyed("kernel", 2);
  if (kern[1] == "rbf") {
    m.kernel.kind = KernelKind::rbf;
  } else if (kern[1] == "linear") {
    m.kernel.kind = KernelKind::linear;
  } else {
    rd.fail("unknown kernel '" + std::string(kern[1]) + "'");
  }
  m.kernel.gamma = rd.number<double>(kern[2]);
  m.num_classes = rd.number<int>(rd.keyed("classes", 1)[1]);
  if (m.num_classes < 2) rd.fail("need at least 2 classes");
  const int L = m.num_classes;
  auto labels = rd.keyed("labels", static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) m.label_map.push_back(rd.number<int>(labels[static_cast<std::size_t>(k) + 1]));
  m.dim = rd.number<Index>(rd.keyed("dim", 1)[1]);
  if (m.dim < 0) rd.fail("negative dimension");
  auto params = rd.keyed("params", 3);
  m.params.c = rd.number<double>(params[1]);
  m.params.c_star = rd.number<double>(params[2]);
  m.params.delta = rd.number<double>(params[3]);
  m.params.kernel = m.kernel;
  const Index S = rd.number<Index>(rd.keyed("support_vectors", 1)[1]);
  if (S < 0) rd.fail("negative support vector count");
  m.support_samples.resize(m.dim, S);
  m.alpha.resize(S, L);
  const std::size_t width = static_cast<std::size_t>(m.dim) + static_cast<std::size_t>(L);
  for (Index s = 0; s < S; ++s) {
    auto row = rd.next("support vector row");
    if (row.size() != width) rd.fail("support vector row has " + std::to_string(row.size()) + " values, expected " +
                                     std::to_string(width));
    for (Index j = 0; j < m.dim; ++j) m.support_samples(j, s) = rd.number<double>(row[static_cast<std::size_t>(j)]);
    for (int l = 0; l < L; ++l) m.alpha(s, l) = rd.number<double>(row[static_cast<std::size_t>(m.dim + l)]);
  }
  auto end = rd.next("'end'");
  if (end.size() != 1 || end[0] != "end") rd.fail("expected 'end'");
  try {
    m.params.validate();
  } catch (const Error& e) {
    rd.fail(e.what());
  }
  return m;
}

Model deserialize_model(const std::string& path) {
  auto f = open_in(path);
  return deserialize_model(f);
}

}  // namespace musvm
