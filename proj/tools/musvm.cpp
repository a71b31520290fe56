#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "musvm/musvm.hpp"
#include "suites.hpp"

namespace {

using namespace musvm;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNonConvergence = 3, kVerifyFailed = 4 };

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Inputs {
  LabeledData train;
  UniversumSet universum;
};

Inputs load_inputs(const std::string& data, const std::string& universum) {
  Inputs in;
  in.train = parse_sparse_dataset(data);
  in.universum.samples.resize(in.train.data.dim(), 0);
  if (!universum.empty()) in.universum = parse_sparse_universum(universum);
  const Index d = std::max(in.train.data.dim(), in.universum.dim());
  in.train.data.samples = conform_dim(in.train.data.samples, d, data);
  in.universum.samples = conform_dim(in.universum.samples, d, universum);
  in.train.data.validate();
  return in;
}

struct TrainFlags {
  std::string data;
  std::string universum;
  double c = 1.0;
  std::string cstar_ratio = "auto";
  double cstar = -1.0;
  double delta = 0.0;
  std::string kernel = "linear";
  double gamma = kDefaultGamma;
  double tol = 1e-3;
  long long max_epochs = 100000;

  void add(CLI::App* app, bool hyper = true) {
    app->add_option("--data", data, "training file")->required()->check(CLI::ExistingFile);
    app->add_option("--universum", universum, "universum file")->check(CLI::ExistingFile);
    add_kernel(app);
    app->add_option("--tol", tol, "KKT tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-epochs", max_epochs, "solver epoch limit")->check(CLI::PositiveNumber);
    if (!hyper) return;
    app->add_option("-C", c, "training cost")->check(CLI::PositiveNumber);
    app->add_option("--cstar-ratio", cstar_ratio, "C*/C, or 'auto' for n/(mL)");
    app->add_option("--cstar", cstar, "universum cost (overrides --cstar-ratio)")->check(CLI::NonNegativeNumber);
    app->add_option("--delta", delta, "universum insensitivity")->check(CLI::NonNegativeNumber);
  }

  void add_kernel(CLI::App* app) {
    app->add_option("--kernel", kernel, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    app->add_option("--gamma", gamma, "RBF width")->check(CLI::PositiveNumber);
  }

  KernelSpec kernel_spec() const { return kernel == "rbf" ? KernelSpec::rbf(gamma) : KernelSpec::linear(); }

  SolverOptions solver() const {
    SolverOptions o;
    o.tol = tol;
    o.max_epochs = max_epochs;
    return o;
  }

  Hyperparams params(const Inputs& in) const {
    Hyperparams h;
    h.c = c;
    h.delta = delta;
    h.kernel = kernel_spec();
    const Index m = in.universum.size();
    if (cstar >= 0.0) {
      h.c_star = cstar;
    } else if (cstar_ratio == "auto") {
      h.c_star = auto_cstar(c, in.train.data.size(), m, in.train.data.num_classes);
    } else {
      double r = 0.0;
      std::istringstream ss(cstar_ratio);
      if (!(ss >> r) || !ss.eof() || r < 0.0) {
        throw Error(ErrorKind::invalid_input, "--cstar-ratio must be 'auto' or a nonnegative number");
      }
      h.c_star = r * c;
    }
    if (m == 0) h.c_star = 0.0;
    h.validate();
    return h;
  }
};

void require_converged(const DualSolution& s) {
  if (!s.converged) {
    throw Error(ErrorKind::non_convergence, "solver stopped after " + std::to_string(s.iterations) +
                                                " epochs with KKT gap " + num(s.kkt_gap));
  }
}

void print_params(const Hyperparams& h) {
  std::cout << "C " << num(h.c) << "\ncstar " << num(h.c_star) << "\ndelta " << num(h.delta) << "\nkernel "
            << (h.kernel.kind == KernelKind::rbf ? "rbf" : "linear") << "\ngamma " << num(h.kernel.gamma) << '\n';
}

void print_sv_counts(const TrainResult& tr) {
  Index counts[2][2] = {{0, 0}, {0, 0}};
  for (Index r = 0; r < tr.problem.rows(); ++r) {
    const SvType t = tr.partition.type[static_cast<std::size_t>(r)];
    if (t == SvType::none) continue;
    ++counts[t == SvType::type2][tr.problem.is_training(r) ? 0 : 1];
  }
  std::cout << "sv type1 training " << counts[0][0] << " universum " << counts[0][1] << '\n'
            << "sv type2 training " << counts[1][0] << " universum " << counts[1][1] << '\n'
            << "support rows " << tr.model.support_count() << '\n';
}

int cmd_train(const TrainFlags& f, const std::string& out) {
  const Inputs in = load_inputs(f.data, f.universum);
  const Hyperparams h = f.params(in);
  TrainResult tr = train(in.train.data, in.universum, h, f.solver());
  require_converged(tr.solution);
  tr.model.label_map = in.train.label_map;
  std::cout << "objective " << num(tr.solution.objective) << "\nepochs " << tr.solution.iterations << "\nkkt_gap "
            << num(tr.solution.kkt_gap) << '\n';
  print_sv_counts(tr);
  if (!out.empty()) serialize_model(tr.model, out);
  return kOk;
}

Dataset load_for_model(const Model& model, const std::string& path, std::vector<int>& file_labels) {
  LabeledData ld = parse_sparse_dataset(path);
  ld.data.samples = conform_dim(ld.data.samples, model.dim, path);
  file_labels.clear();
  for (int y : ld.data.labels) file_labels.push_back(ld.label_map[static_cast<std::size_t>(y)]);
  return ld.data;
}

int cmd_predict(const std::string& model_path, const std::string& data, const std::string& out) {
  const Model model = deserialize_model(model_path);
  std::vector<int> truth;
  const Dataset d = load_for_model(model, data, truth);
  std::ostringstream ss;
  for (int k : predict_all(model, d.samples)) ss << external_label(model, k) << '\n';
  if (out.empty()) {
    std::cout << ss.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!(f << ss.str())) throw Error(ErrorKind::data, "cannot write '" + out + "'");
  }
  return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& data) {
  const Model model = deserialize_model(model_path);
  std::vector<int> truth;
  const Dataset d = load_for_model(model, data, truth);
  const std::vector<int> pred = predict_all(model, d.samples);
  Index wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += external_label(model, pred[i]) != truth[i];
  std::cout << "error " << num(static_cast<double>(wrong) / static_cast<double>(pred.size())) << " (" << wrong << '/'
            << pred.size() << ")\n";
  return kOk;
}

void write_report(const std::string& path, const SelectionResult& r) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::data, "cannot write '" + path + "'");
  f << "step,C,cstar,delta,gamma,estimate,std,seconds\n";
  auto rows = [&](const char* step, const std::vector<GridPoint>& pts) {
    for (const GridPoint& p : pts) {
      f << step << ',' << exact(p.params.c) << ',' << exact(p.params.c_star) << ',' << exact(p.params.delta) << ','
        << exact(p.params.kernel.gamma) << ',' << exact(p.estimate) << ',' << exact(p.stddev) << ','
        << num(p.seconds) << '\n';
    }
  };
  rows("a", r.step_a);
  rows("b", r.step_b);
}

int cmd_select(const TrainFlags& f, SelectionPlan plan, const std::string& method, const std::string& report) {
  const Inputs in = load_inputs(f.data, f.universum);
  plan.kernel = f.kernel_spec();
  plan.method = method == "cv" ? SelectionMethod::cv : SelectionMethod::theorem2;
  plan.solver = f.solver();
  const auto start = std::chrono::steady_clock::now();
  const SelectionResult r = two_step_select(in.train.data, in.universum, plan);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  print_params(r.chosen);
  std::cout << "grid_points " << r.step_a.size() + r.step_b.size() << "\nseconds " << num(secs) << '\n';
  if (!report.empty()) write_report(report, r);
  return kOk;
}

int cmd_bound(const TrainFlags& f, bool theorem1) {
  const Inputs in = load_inputs(f.data, f.universum);
  const Hyperparams h = f.params(in);
  const TrainResult tr = train(in.train.data, in.universum, h, f.solver());
  require_converged(tr.solution);
  SpanReport rep = compute_spans(tr.problem, tr.gram, tr.solution, tr.partition);
  loo_estimate_theorem2(tr.solution, tr.problem, tr.gram, rep);
  std::cout << "n " << rep.n_train << "\npsi3 " << rep.psi3_count << "\ntheorem2_estimate " << num(rep.bound_theorem2)
            << '\n';
  if (rep.isolated_fallback) std::cout << "note no type 1 support vectors; isolated spans used\n";
  if (rep.pseudo_inverse) std::cout << "note kernel block was singular; pseudo-inverse used\n";
  if (theorem1) {
    const oracle::Theorem1Result t1 = oracle::theorem1_bound(tr.problem, tr.gram, tr.solution);
    std::cout << "D " << num(t1.D) << "\npsi1 " << t1.report.psi1_count << "\npsi2 " << t1.report.psi2_count
              << "\ntheorem1_bound " << num(t1.bound) << '\n';
  }
  return kOk;
}

int cmd_loo(const TrainFlags& f) {
  const Inputs in = load_inputs(f.data, f.universum);
  const Hyperparams h = f.params(in);
  const double e = oracle::exact_loo_error(in.train.data, in.universum, h, f.solver());
  std::cout << "loo_error " << num(e) << '\n';
  return kOk;
}

int cmd_hist(const std::string& model_path, const std::string& data, const std::string& universum, int bins,
             bool include_self, const std::string& out) {
  const Model model = deserialize_model(model_path);
  std::vector<int> truth;
  Dataset d = load_for_model(model, data, truth);
  // Classes follow the model's label order, not the file's.
  for (std::size_t i = 0; i < truth.size(); ++i) {
    int k = 0;
    while (k < model.num_classes && external_label(model, k) != truth[i]) ++k;
    if (k == model.num_classes) {
      throw Error(ErrorKind::data, data + ": label " + std::to_string(truth[i]) + " is unknown to the model");
    }
    d.labels[i] = k;
  }
  d.num_classes = model.num_classes;
  UniversumSet u{Eigen::MatrixXd(model.dim, 0)};
  if (!universum.empty()) {
    u = parse_sparse_universum(universum);
    u.samples = conform_dim(u.samples, model.dim, universum);
  }
  const ProjectionTable table = projection_values(model, d, u, !include_self);
  std::ostringstream csv;
  write_histogram_csv(csv, table, bins);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!(f << csv.str())) throw Error(ErrorKind::data, "cannot write '" + out + "'");
    const Eigen::VectorXi freq = universum_label_frequencies(model, u);
    for (int k = 0; k < model.num_classes; ++k) {
      std::cout << "universum_label " << external_label(model, k) << ' ' << freq(k) << '\n';
    }
  }
  return kOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int count) {
  const cli::SuiteOutcome o = cli::run_suite(suite, seed, count, std::cout);
  std::cout << "suite " << suite << ": " << o.cases << " cases, " << o.violations << " violations\n";
  return o.violations == 0 ? kOk : kVerifyFailed;
}

struct GenFlags {
  GaussianSpec spec;
  Index m = 0;
  Index test_n = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string universum_out;
  std::string test_out;
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::data, "cannot write '" + path + "'");
  body(f);
  if (!f) throw Error(ErrorKind::data, "write failed for '" + path + "'");
}

int cmd_gen(const GenFlags& g) {
  std::mt19937_64 rng(g.seed);
  const Dataset train = sample_gaussian(g.spec, rng);
  write_file(g.out, [&](std::ostream& o) { write_sparse_dataset(o, train); });
  if (g.m > 0) {
    if (g.universum_out.empty()) throw Error(ErrorKind::invalid_input, "--m needs --universum-out");
    const UniversumSet u = random_averaging(train, g.m, rng);
    write_file(g.universum_out, [&](std::ostream& o) { write_sparse_universum(o, u); });
  }
  if (g.test_n > 0) {
    if (g.test_out.empty()) throw Error(ErrorKind::invalid_input, "--test-n needs --test-out");
    GaussianSpec ts = g.spec;
    ts.n = g.test_n;
    const Dataset test = sample_gaussian(ts, rng);
    write_file(g.test_out, [&](std::ostream& o) { write_sparse_dataset(o, test); });
  }
  return kOk;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_input:
      return kUsage;
    case ErrorKind::non_convergence:
      return kNonConvergence;
    default:
      return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiclass universum SVM"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MUSVM_THREADS or 1)")
      ->check(CLI::PositiveNumber)
      ->envname("MUSVM_THREADS");

  TrainFlags tf;
  std::string out;
  std::string model_path;
  std::string data;
  std::string universum;

  auto* train_cmd = app.add_subcommand("train", "train a model");
  tf.add(train_cmd);
  train_cmd->add_option("-o,--output", out, "model file");

  auto* predict_cmd = app.add_subcommand("predict", "predict labels");
  predict_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", data)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("-o,--output", out, "predictions file (default stdout)");

  auto* eval_cmd = app.add_subcommand("eval", "error rate of a model on labeled data");
  eval_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", data)->required()->check(CLI::ExistingFile);

  SelectionPlan plan;
  std::string method = "theorem2";
  std::string report;
  auto* select_cmd = app.add_subcommand("select", "two-step model selection");
  tf.add(select_cmd, false);
  select_cmd->add_option("--method", method)->check(CLI::IsMember({"cv", "theorem2"}));
  select_cmd->add_option("--folds", plan.folds)->check(CLI::Range(2, 1 << 30));
  select_cmd->add_option("--seed", plan.seed);
  select_cmd->add_option("--c-grid", plan.c_grid)->delimiter(',');
  select_cmd->add_option("--delta-grid", plan.delta_grid)->delimiter(',');
  select_cmd->add_option("--gamma-grid", plan.gamma_grid)->delimiter(',');
  select_cmd->add_option("--report", report, "per-grid-point CSV");

  bool theorem1 = false;
  auto* bound_cmd = app.add_subcommand("bound", "span-based leave-one-out estimates");
  tf.add(bound_cmd);
  bound_cmd->add_flag("--theorem1", theorem1, "also compute the QP-span bound (small problems)");

  auto* loo_cmd = app.add_subcommand("loo", "exact leave-one-out error");
  tf.add(loo_cmd);

  int bins = kDefaultBins;
  bool include_self = false;
  auto* hist_cmd = app.add_subcommand("hist", "histogram-of-projections CSV");
  hist_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  hist_cmd->add_option("--data", data)->required()->check(CLI::ExistingFile);
  hist_cmd->add_option("--universum", universum)->check(CLI::ExistingFile);
  hist_cmd->add_option("--bins", bins)->check(CLI::PositiveNumber);
  hist_cmd->add_flag("--include-self", include_self, "take the max over every class");
  hist_cmd->add_option("-o,--output", out, "CSV file (default stdout)");

  std::string suite = "all";
  std::uint64_t seed = 1;
  int count = 10;
  auto* verify_cmd = app.add_subcommand("verify", "oracle consistency suites");
  verify_cmd->add_option("--suite", suite)->check(CLI::IsMember({"solver", "theorem1", "spans", "binary", "all"}));
  verify_cmd->add_option("--seed", seed);
  verify_cmd->add_option("--count", count)->check(CLI::PositiveNumber);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "synthetic Gaussian data with random-averaging universum");
  gen_cmd->add_option("--n", gen.spec.n)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--classes", gen.spec.num_classes)->check(CLI::Range(2, 1 << 20));
  gen_cmd->add_option("--dim", gen.spec.dim)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--separation", gen.spec.separation);
  gen_cmd->add_option("--noise", gen.spec.noise)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--nuisance-dims", gen.spec.nuisance_dims)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--nuisance-scale", gen.spec.nuisance_scale)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--m", gen.m)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--test-n", gen.test_n)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("-o,--output", gen.out)->required();
  gen_cmd->add_option("--universum-out", gen.universum_out);
  gen_cmd->add_option("--test-out", gen.test_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (*train_cmd) return cmd_train(tf, out);
    if (*predict_cmd) return cmd_predict(model_path, data, out);
    if (*eval_cmd) return cmd_eval(model_path, data);
    if (*select_cmd) return cmd_select(tf, plan, method, report);
    if (*bound_cmd) return cmd_bound(tf, theorem1);
    if (*loo_cmd) return cmd_loo(tf);
    if (*hist_cmd) return cmd_hist(model_path, data, universum, bins, include_self, out);
    if (*verify_cmd) return cmd_verify(suite, seed, count);
    if (*gen_cmd) return cmd_gen(gen);
  } catch (const Error& e) {
    std::cerr << "musvm: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "musvm: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
