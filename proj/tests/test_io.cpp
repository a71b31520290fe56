#include <doctest.h>

#include <sstream>

#include "helpers.hpp"

using namespace musvm;

namespace {

LabeledData parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sparse_dataset(in, "mem");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    return e.what();
  }
  return "";
}

Model round_trip(const Model& m) {
  std::stringstream s;
  serialize_model(s, m);
  return deserialize_model(s);
}

}  // namespace

TEST_CASE("parse a sparse line") {
  const LabeledData d = parse("2 1:0.5 3:-1\n");
  REQUIRE(d.data.size() == 1);
  CHECK(d.data.dim() == 3);
  CHECK(d.label_map == std::vector<int>{2});
  CHECK(d.data.samples.col(0) == Eigen::Vector3d(0.5, 0, -1));
}

TEST_CASE("labels are remapped to contiguous classes") {
  const LabeledData d = parse("# header\n3 1:1\n\n7 2:1\n7 1:2 2:3\n");
  CHECK(d.label_map == std::vector<int>{3, 7});
  CHECK(d.data.labels == std::vector<int>{0, 1, 1});
  CHECK(d.data.num_classes == 2);
  CHECK(d.data.dim() == 2);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_of("1 1:0.5\n1 2:x\n").find("mem:2") != std::string::npos);
  CHECK(error_of("1 2:1 1:1\n").find("increasing") != std::string::npos);
  CHECK(error_of("1 1:1 1:2\n").find("increasing") != std::string::npos);
  CHECK(error_of("1 0:1\n").find(">= 1") != std::string::npos);
  CHECK(error_of("a 1:1\n").find("label") != std::string::npos);
  CHECK(error_of("1 1=2\n").find("malformed") != std::string::npos);
  CHECK(error_of("").find("no samples") != std::string::npos);
  CHECK(error_of("# only a comment\n\n").find("no samples") != std::string::npos);
  CHECK_THROWS_AS(parse_sparse_dataset("/nonexistent/file.txt"), Error);
}

TEST_CASE("universum files ignore labels") {
  std::istringstream in("0 1:1\n5 2:2\n");
  const UniversumSet u = parse_sparse_universum(in);
  REQUIRE(u.size() == 2);
  CHECK(u.samples.col(1) == Eigen::Vector2d(0, 2));
}

TEST_CASE("conform_dim pads and rejects") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 3);
  const Eigen::MatrixXd p = conform_dim(x, 4, "x");
  CHECK(p.rows() == 4);
  CHECK(p.bottomRows(2).isZero(0.0));
  CHECK_THROWS_AS(conform_dim(x, 1, "x"), Error);
}

TEST_CASE("dataset round trip is exact") {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd x = th::random_matrix(5, 12, rng);
  x(4, 0) = 0.0;
  x.row(4).setZero();  // trailing all-zero coordinate must survive
  x(2, 3) = 0.0;
  std::vector<int> y;
  for (int i = 0; i < 12; ++i) y.push_back(i % 3);
  const Dataset d = th::make_data(x, y, 3);
  std::stringstream s;
  write_sparse_dataset(s, d, {4, 8, 9});
  const LabeledData back = parse(s.str());
  CHECK(back.data.samples == d.samples);
  CHECK(back.data.labels == d.labels);
  CHECK(back.label_map == std::vector<int>{4, 8, 9});

  std::stringstream su;
  write_sparse_universum(su, UniversumSet{x});
  CHECK(parse_sparse_universum(su).samples == x);
}

TEST_CASE("model round trip reproduces decision values bit for bit") {
  const RandomInstance inst = random_instance(5, {15, 3, 3, 5, 3, true});
  TrainResult tr = train(inst.train, inst.universum, inst.params);
  tr.model.label_map = {10, 20, 30};
  const Model back = round_trip(tr.model);
  CHECK(back.label_map == tr.model.label_map);
  CHECK(back.kernel == tr.model.kernel);
  CHECK(back.params.c == tr.model.params.c);
  CHECK(back.params.c_star == tr.model.params.c_star);
  CHECK(back.params.delta == tr.model.params.delta);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd probes = th::random_matrix(3, 100, rng, 2.0);
  for (Index k = 0; k < 100; ++k) {
    const Eigen::VectorXd a = decision_values(tr.model, probes.col(k));
    const Eigen::VectorXd b = decision_values(back, probes.col(k));
    CHECK((a.array() == b.array()).all());
  }
  std::stringstream s1, s2;
  serialize_model(s1, tr.model);
  serialize_model(s2, back);
  CHECK(s1.str() == s2.str());
}

TEST_CASE("empty model round trips to the tie-break predictor") {
  Model m;
  m.num_classes = 3;
  m.dim = 2;
  m.kernel = KernelSpec::rbf(0.25);
  m.support_samples.resize(2, 0);
  m.alpha.resize(0, 3);
  const Model back = round_trip(m);
  CHECK(back.support_count() == 0);
  CHECK(predict(back, Eigen::Vector2d(3, -1)) == 0);
  CHECK(external_label(back, 0) == 1);
}

TEST_CASE("corrupted or truncated model files fail closed") {
  const RandomInstance inst = random_instance(6);
  const TrainResult tr = train(inst.train, inst.universum, inst.params);
  std::stringstream s;
  serialize_model(s, tr.model);
  const std::string text = s.str();

  auto kind_of = [](const std::string& t) {
    std::istringstream in(t);
    try {
      deserialize_model(in);
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("deserialize accepted a bad file");
    return ErrorKind::invalid_input;
  };
  CHECK(kind_of("musvm-model 2" + text.substr(text.find('\n'))) == ErrorKind::version);
  CHECK(kind_of("garbage\n" + text) == ErrorKind::version);
  CHECK(kind_of(text.substr(0, text.size() / 2)) == ErrorKind::data);
  CHECK(kind_of(text.substr(0, text.rfind("end"))) == ErrorKind::data);
  std::string bad_number = text;
  bad_number.replace(bad_number.find("classes ") + 8, 1, "x");
  CHECK(kind_of(bad_number) == ErrorKind::data);
}
