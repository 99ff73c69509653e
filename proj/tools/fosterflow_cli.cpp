// fosterflow: SBM generation, community detection, flow histograms and
// runtime benchmarks from the command line.
//
// Exit codes: 0 success, 1 runtime failure, 2 input or validation error,
// 3 precondition violation (disconnected or too-small input graph).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fosterflow/fosterflow.hpp>

namespace ff = fosterflow;

namespace {

enum ExitCode : int { kOk = 0, kRuntime = 1, kInput = 2, kPrecondition = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  return os;
}

ff::GraphDocument load_graph(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open '" + path + "' for reading");
  return ff::read_graph_file(is);
}

void finish(std::ofstream &os, const std::string &path) {
  os.flush();
  if (!os) throw UsageError("failed writing '" + path + "'");
}

struct GenerateArgs {
  ff::SbmParams params;
  std::string out;
};

struct DetectArgs {
  std::string in, out;
  ff::DetectorConfig cfg;
  std::string prune_side = "high";
};

struct HistogramArgs {
  std::string in, out;
  ff::FlowConfig flow;
};

struct BenchmarkArgs {
  std::vector<std::size_t> n{30, 60, 120};
  std::vector<std::size_t> k{3};
  std::vector<double> p_in{0.7};
  std::vector<double> p_out{0.07};
  std::uint64_t seed = 0;
  std::vector<std::string> methods{"foster_flow", "spectral"};
  std::size_t reps = 5;
  std::string out;
};

int run_generate(const GenerateArgs &a) {
  a.params.validate();
  auto inst = ff::generate_sbm(a.params);
  auto os = open_out(a.out);
  ff::write_graph_file(os, {inst.graph, inst.planted});
  finish(os, a.out);
  return kOk;
}

int run_detect(DetectArgs a) {
  a.cfg.prune_side = ff::parse_prune_side(a.prune_side);
  a.cfg.validate();
  const auto doc = load_graph(a.in);
  const auto result = ff::detect_communities(doc.graph, a.cfg);
  std::optional<double> ari;
  if (doc.partition) ari = ff::adjusted_rand_index(result.partition, *doc.partition);
  auto os = open_out(a.out);
  os << ff::serialize_result(ff::summarize(result, a.cfg, ari));
  finish(os, a.out);
  return kOk;
}

int run_histogram(const HistogramArgs &a) {
  a.flow.validate();
  const auto doc = load_graph(a.in);
  const auto flowed = ff::run_flow(doc.graph, a.flow, false);
  const auto kappa = ff::foster_curvature(flowed.graph);
  auto os = open_out(a.out);
  ff::write_histogram_csv(os, doc.graph, flowed.graph, kappa);
  finish(os, a.out);
  return kOk;
}

int run_benchmark(const BenchmarkArgs &a) {
  std::vector<ff::SbmParams> grid;
  for (auto n : a.n)
    for (auto k : a.k)
      for (auto pin : a.p_in)
        for (auto pout : a.p_out) {
          ff::SbmParams p{n, k, pin, pout, a.seed};
          p.validate();
          grid.push_back(p);
        }
  std::vector<ff::Method> methods;
  for (const auto &m : a.methods) methods.push_back(ff::parse_method(m));
  auto os = open_out(a.out);
  const auto records = ff::benchmark_runtime(grid, methods, a.reps);
  ff::write_benchmark_csv(os, records);
  finish(os, a.out);
  std::size_t failures = 0;
  for (const auto &r : records)
    if (r.error) {
      ++failures;
      std::cerr << "benchmark: " << ff::to_string(r.method) << " n=" << r.params.n
                << " seed=" << r.seed << ": " << *r.error << '\n';
    }
  return failures == records.size() ? kRuntime : kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Foster-Ricci flow community detection"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto *generate = app.add_subcommand("generate", "Sample a stochastic block model graph");
  generate->add_option("--n", gen.params.n, "Node count")->default_val(60);
  generate->add_option("--k", gen.params.k, "Community count")->default_val(3);
  generate->add_option("--p-in", gen.params.p_in, "Intra-community edge probability")
      ->default_val(0.7)
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--p-out", gen.params.p_out, "Inter-community edge probability")
      ->default_val(0.07)
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--seed", gen.params.seed, "PRNG seed")->default_val(0);
  generate->add_option("--out", gen.out, "Output graph file")->required();

  DetectArgs det;
  auto *detect = app.add_subcommand("detect", "Detect communities in a graph file");
  detect->add_option("--in", det.in, "Input graph file")->required();
  detect->add_option("--out", det.out, "Output result file (JSON)")->required();
  detect->add_option("--eta", det.cfg.flow.eta, "Flow learning rate")->default_val(0.3);
  detect->add_option("--epsilon", det.cfg.flow.epsilon, "Minimum edge weight")->default_val(1e-6);
  detect->add_option("--flow-iters", det.cfg.flow.iterations, "Flow iterations per stage")
      ->default_val(15);
  detect->add_option("--max-cycles", det.cfg.max_cycles, "Maximum pruning cycles")->default_val(10);
  detect->add_option("--prune-side", det.prune_side, "GMM component to prune")
      ->default_val("high")
      ->check(CLI::IsMember({"high", "low"}));
  detect->add_option("--gmm-tol", det.cfg.gmm_tol, "EM relative tolerance")->default_val(1e-8);
  detect->add_option("--gmm-max-iter", det.cfg.gmm_max_iter, "EM iteration cap")->default_val(500);
  detect->add_option("--gmm-restarts", det.cfg.gmm_restarts, "Random EM restarts")->default_val(0);
  detect->add_option("--seed", det.cfg.seed, "Seed for EM restarts")->default_val(0);

  HistogramArgs hist;
  auto *histogram = app.add_subcommand("histogram", "Export edge weights before/after the flow");
  histogram->add_option("--in", hist.in, "Input graph file")->required();
  histogram->add_option("--out", hist.out, "Output CSV")->required();
  histogram->add_option("--flow-iters", hist.flow.iterations, "Flow iterations")->default_val(15);
  histogram->add_option("--eta", hist.flow.eta, "Flow learning rate")->default_val(0.3);
  histogram->add_option("--epsilon", hist.flow.epsilon, "Minimum edge weight")->default_val(1e-6);

  BenchmarkArgs bench;
  auto *benchmark = app.add_subcommand("benchmark", "Time methods over an SBM grid");
  benchmark->add_option("--n", bench.n, "Node counts")->delimiter(',')->capture_default_str();
  benchmark->add_option("--k", bench.k, "Community counts")->delimiter(',')->capture_default_str();
  benchmark->add_option("--p-in", bench.p_in, "Intra probabilities")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  benchmark->add_option("--p-out", bench.p_out, "Inter probabilities")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  benchmark->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  benchmark->add_option("--methods", bench.methods, "foster_flow and/or spectral")
      ->delimiter(',')
      ->check(CLI::IsMember({"foster_flow", "spectral"}))
      ->capture_default_str();
  benchmark->add_option("--reps", bench.reps, "Repetitions per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--out", bench.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*detect) return run_detect(det);
    if (*histogram) return run_histogram(hist);
    if (*benchmark) return run_benchmark(bench);
  } catch (const ff::PreconditionError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ff::ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
