#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <fosterflow/io.hpp>
#include <fosterflow/sbm_bench.hpp>

#include "support/test_graphs.hpp"

using namespace fosterflow;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fosterflow_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string &name) const { return (dir_ / name).string(); }

  int run(const std::string &args) const {
    const std::string cmd = std::string(FOSTERFLOW_CLI_PATH) + " " + args + " 2>" +
                            path("stderr.txt") + " >" + path("stdout.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const std::string &p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  void write_graph(const std::string &name, const WeightedGraph &g,
                   std::optional<Partition> p = std::nullopt) const {
    std::ofstream os(path(name));
    write_graph_file(os, {g, std::move(p)});
  }

  static std::vector<std::string> lines(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) out.push_back(l);
    return out;
  }

  fs::path dir_;
};

} // namespace

TEST_F(CliTest, GeneratePaperInstance) {
  ASSERT_EQ(run("generate --n 60 --k 3 --p-in 0.7 --p-out 0.07 --seed 1 --out " + path("g.txt")),
            0);
  std::ifstream is(path("g.txt"));
  auto doc = read_graph_file(is);
  EXPECT_EQ(doc.graph.node_count(), 60u);
  ASSERT_TRUE(doc.partition.has_value());
  EXPECT_EQ(doc.partition->size(), 60u);
  EXPECT_EQ(doc.graph, generate_sbm({60, 3, 0.7, 0.07, 1}).graph);
}

TEST_F(CliTest, GenerateCliques) {
  ASSERT_EQ(run("generate --n 6 --k 2 --p-in 1 --p-out 0 --out " + path("g.txt")), 0);
  std::ifstream is(path("g.txt"));
  EXPECT_EQ(read_graph_file(is).graph.edge_count(), 6u);
}

TEST_F(CliTest, GenerateValidation) {
  EXPECT_EQ(run("generate --p-in 1.5 --out " + path("g.txt")), 2);
  EXPECT_EQ(run("generate --n 2 --k 3 --out " + path("g.txt")), 2);
  EXPECT_EQ(run("generate --out " + path("missing_dir/g.txt")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, DetectSbmWithAri) {
  ASSERT_EQ(run("generate --seed 1 --out " + path("g.txt")), 0);
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json")), 0);
  auto doc = parse_result(slurp(path("r.json")));
  EXPECT_EQ(doc.partition.size(), 60u);
  EXPECT_EQ(doc.partition.community_count(), 3u);
  ASSERT_TRUE(doc.ari.has_value());
  EXPECT_GE(*doc.ari, 0.9);
  EXPECT_EQ(doc.config, DetectorConfig{});
}

TEST_F(CliTest, DetectTwoCliques) {
  write_graph("g.txt", fosterflow::testing::two_cliques_bridge(6));
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json")), 0);
  auto doc = parse_result(slurp(path("r.json")));
  // Cliques end up in different communities; the bridge endpoints split off.
  EXPECT_EQ(doc.partition.community_count(), 4u);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 6; j < 12; ++j) EXPECT_NE(doc.partition.labels[i], doc.partition.labels[j]);
  EXPECT_EQ(doc.termination, Termination::disconnected);
  EXPECT_FALSE(doc.ari.has_value());
}

TEST_F(CliTest, DetectHomogeneousClique) {
  write_graph("g.txt", fosterflow::testing::complete_graph(8));
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json")), 0);
  auto doc = parse_result(slurp(path("r.json")));
  EXPECT_EQ(doc.partition.community_count(), 1u);
  EXPECT_TRUE(doc.termination == Termination::degenerate_gmm ||
              doc.termination == Termination::max_cycles_reached);
}

TEST_F(CliTest, DetectFlagsEchoedInConfig) {
  write_graph("g.txt", fosterflow::testing::two_cliques_bridge(5));
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json") +
                " --eta 0.5 --epsilon 1e-5 --flow-iters 7 --max-cycles 3 --prune-side low"
                " --seed 9"),
            0);
  auto doc = parse_result(slurp(path("r.json")));
  EXPECT_EQ(doc.config.flow.eta, 0.5);
  EXPECT_EQ(doc.config.flow.epsilon, 1e-5);
  EXPECT_EQ(doc.config.flow.iterations, 7u);
  EXPECT_EQ(doc.config.max_cycles, 3u);
  EXPECT_EQ(doc.config.prune_side, PruneSide::low);
  EXPECT_EQ(doc.config.seed, 9u);
}

TEST_F(CliTest, DetectErrors) {
  write_graph("disc.txt", WeightedGraph::unit(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}));
  EXPECT_EQ(run("detect --in " + path("disc.txt") + " --out " + path("r.json")), 3);
  {
    std::ofstream os(path("bad.txt"));
    os << "nodes 3\n0 1 1\n0 1 2\n";
  }
  EXPECT_EQ(run("detect --in " + path("bad.txt") + " --out " + path("r.json")), 2);
  EXPECT_EQ(run("detect --in " + path("nope.txt") + " --out " + path("r.json")), 2);
  write_graph("g.txt", fosterflow::testing::complete_graph(5));
  EXPECT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json") + " --eta 2"), 2);
  EXPECT_EQ(run("detect --in " + path("g.txt") + " --out " + path("r.json") +
                " --prune-side middle"),
            2);
}

TEST_F(CliTest, DetectIsByteDeterministic) {
  ASSERT_EQ(run("generate --seed 5 --out " + path("g.txt")), 0);
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("a.json")), 0);
  ASSERT_EQ(run("detect --in " + path("g.txt") + " --out " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(CliTest, HistogramCompleteGraph) {
  write_graph("g.txt", fosterflow::testing::complete_graph(5));
  ASSERT_EQ(run("histogram --in " + path("g.txt") + " --out " + path("h.csv")), 0);
  auto rows = lines(slurp(path("h.csv")));
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "edge_u,edge_v,weight_before,weight_after,curvature_final");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ss(rows[i]);
    std::string u, v, before, after;
    std::getline(ss, u, ',');
    std::getline(ss, v, ',');
    std::getline(ss, before, ',');
    std::getline(ss, after, ',');
    EXPECT_NEAR(std::stod(after), 1.0, 1e-9);
  }
}

TEST_F(CliTest, HistogramSbmDirection) {
  ASSERT_EQ(run("generate --seed 3 --out " + path("g.txt")), 0);
  ASSERT_EQ(run("histogram --in " + path("g.txt") + " --out " + path("h.csv")), 0);
  std::ifstream is(path("g.txt"));
  auto doc = read_graph_file(is);
  auto rows = lines(slurp(path("h.csv")));
  ASSERT_EQ(rows.size(), doc.graph.edge_count() + 1);
  double inter = 0, intra = 0;
  std::size_t ni = 0, na = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ss(rows[i]);
    std::string u, v, before, after;
    std::getline(ss, u, ',');
    std::getline(ss, v, ',');
    std::getline(ss, before, ',');
    std::getline(ss, after, ',');
    const bool cross = doc.partition->labels[std::stoul(u)] != doc.partition->labels[std::stoul(v)];
    (cross ? inter : intra) += std::stod(after);
    ++(cross ? ni : na);
  }
  EXPECT_GT(inter / ni, intra / na);
}

TEST_F(CliTest, HistogramDisconnectedInput) {
  write_graph("g.txt", WeightedGraph::unit(4, {{0, 1}, {2, 3}}));
  EXPECT_EQ(run("histogram --in " + path("g.txt") + " --out " + path("h.csv")), 3);
}

TEST_F(CliTest, BenchmarkGrid) {
  ASSERT_EQ(run("benchmark --n 30 --methods spectral --reps 1 --out " + path("b.csv")), 0);
  EXPECT_EQ(lines(slurp(path("b.csv"))).size(), 2u);

  ASSERT_EQ(run("benchmark --n 30,60 --methods foster_flow,spectral --reps 3 --out " +
                path("b2.csv")),
            0);
  auto rows = lines(slurp(path("b2.csv")));
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "method,n,k,p_in,p_out,seed,edge_count,wall_time_seconds,ari");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ari = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    EXPECT_GE(ari, -1.0);
    EXPECT_LE(ari, 1.0);
  }
}

TEST_F(CliTest, BenchmarkFailures) {
  EXPECT_EQ(run("benchmark --n 20 --k 2 --p-in 0.5 --p-out 0 --methods foster_flow --reps 2"
                " --out " + path("b.csv")),
            1);
  EXPECT_EQ(lines(slurp(path("b.csv"))).size(), 3u);
  EXPECT_EQ(run("benchmark --methods louvain --out " + path("b.csv")), 2);
}
