#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "fstk.hpp"
#include "manifest.hpp"

using namespace pgmrf;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pgmrf");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pgmrf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  void simulate_small(const std::string& model = "bernoulli", const std::string& frames = "1") {
    const auto r = run({"simulate", "--scene", "piecewise", "--rows", "12", "--cols", "10", "--frames",
                        frames, "--model", model, "--target-mean", "0.3", "--seed", "7", "--out-dir",
                        dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesStacksAndManifest) {
  simulate_small();
  for (const char* f : {"truth.fstk", "obs.fstk", "mask.fstk", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const auto truth = io::read_intensity(p("truth.fstk"));
  EXPECT_EQ(truth.rows(), 12u);
  double mean = 0.0;
  for (double v : truth.data()) mean += v / truth.size();
  EXPECT_NEAR(mean, 0.3, 1e-12);
  EXPECT_EQ(io::parse_header(io::read_file(p("obs.fstk"))).dtype, io::Dtype::U1);
  const auto m = io::RunManifest::parse(io::read_file(p("manifest.txt")));
  EXPECT_EQ(*m.find("seed"), "7");
  EXPECT_NE(m.find("wall_clock_utc"), nullptr);
}

TEST_F(CliTest, SimulateFromInput) {
  io::write_file_atomic(p("in.fstk"), io::format_fstk(IntensityStack(Geometry{4, 4, 1}, 3.0)));
  const auto r = run({"simulate", "--input", p("in.fstk"), "--model", "poisson", "--target-mean", "1.0",
                      "--out-dir", p("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_intensity(p("o/truth.fstk")), IntensityStack(Geometry{4, 4, 1}, 1.0));
  EXPECT_EQ(io::parse_header(io::read_file(p("o/obs.fstk"))).dtype, io::Dtype::U32);
}

TEST_F(CliTest, UsageErrors) {
  auto r = run({"simulate", "--scene", "piecewise", "--target-mean", "0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--model"), std::string::npos);
  r = run({"simulate", "--scene", "piecewise", "--input", "x.fstk", "--model", "poisson",
           "--target-mean", "0.1"});
  EXPECT_EQ(r.code, 2);
  r = run({"simulate", "--model", "poisson", "--target-mean", "0.1"});
  EXPECT_EQ(r.code, 2);
  r = run({"denoise", "x.fstk", "--model", "gaussian"});
  EXPECT_EQ(r.code, 2);
  r = run({});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"--version"}).out, std::string(cli::kVersion) + "\n");
}

TEST_F(CliTest, DenoiseConfigErrorsAreUsage) {
  simulate_small();
  const auto r = run({"denoise", p("obs.fstk"), "--model", "bernoulli", "--iters", "10", "--burnin", "10"});
  EXPECT_EQ(r.code, 2);
  const auto b = run({"denoise", p("obs.fstk"), "--model", "bernoulli", "--adapt", "alpha-beta"});
  EXPECT_EQ(b.code, 2);
}

TEST_F(CliTest, DenoiseRejectsCountsForBernoulli) {
  CountStack y(Geometry{3, 3, 1}, 0u);
  y(2, 1, 0) = 4;
  io::write_file_atomic(p("counts.fstk"), io::format_fstk(y, io::Dtype::U32));
  const auto r = run({"denoise", p("counts.fstk"), "--model", "bernoulli", "--iters", "5", "--burnin", "1",
                      "--out-dir", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find(to_string(GridIndex{2, 1, 0})), std::string::npos);
}

TEST_F(CliTest, MissingFileIsDataError) {
  EXPECT_EQ(run({"denoise", p("nope.fstk"), "--model", "poisson"}).code, 3);
}

TEST_F(CliTest, DenoiseOutputsAndReplay) {
  simulate_small("bernoulli", "3");
  const auto r = run({"denoise", p("obs.fstk"), "--model", "bernoulli", "--temporal", "on", "--iters", "30",
                      "--burnin", "10", "--adapt", "alpha", "--mask", p("mask.fstk"), "--seed", "3",
                      "--quantiles", "--time-boundary", "cyclic", "--out-dir", p("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"x_mmse.fstk", "x_var.fstk", "accept.fstk", "x_q05.fstk", "x_q50.fstk",
                        "x_q95.fstk", "hyper.csv", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(fs::path(p("run")) / f)) << f;
  }
  const std::string trace = io::read_file(p("run/hyper.csv"));
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "iteration,alpha,beta");
  const auto manifest = io::RunManifest::parse(io::read_file(p("run/manifest.txt")));
  EXPECT_EQ(*manifest.find("input.obs.fnv1a64"), io::fnv1a64_hex(io::read_file(p("obs.fstk"))));

  const std::string first = io::read_file(p("run/x_mmse.fstk"));
  fs::remove(p("run/x_mmse.fstk"));
  const auto replay = run({"replay", p("run/manifest.txt")});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(io::read_file(p("run/x_mmse.fstk")), first);
}

TEST_F(CliTest, EvaluateTable) {
  simulate_small();
  auto r = run({"evaluate", "--truth", p("truth.fstk"), "--estimate", p("truth.fstk")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "frame,nmse,nse_std,detection_rate\n0,0,0,\nall,0,0,\n");
  io::write_file_atomic(p("zero.fstk"), io::format_fstk(IntensityStack(Geometry{12, 10, 1}, 0.0)));
  r = run({"evaluate", "--truth", p("truth.fstk"), "--estimate", p("zero.fstk"), "--obs", p("obs.fstk"),
           "--out", p("metrics.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = io::read_file(p("metrics.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n', csv.find('\n') + 1)).substr(csv.find('\n') + 1, 4), "0,1,");
  io::write_file_atomic(p("small.fstk"), io::format_fstk(IntensityStack(Geometry{2, 2, 1}, 1.0)));
  EXPECT_EQ(run({"evaluate", "--truth", p("truth.fstk"), "--estimate", p("small.fstk")}).code, 3);
}

TEST_F(CliTest, IntegrateGroups) {
  io::write_file_atomic(p("y.fstk"), io::format_fstk(CountStack(Geometry{2, 2, 300}, 0u), io::Dtype::U1));
  auto r = run({"integrate", p("y.fstk"), "--group-size", "25", "--out", p("g25.fstk")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_counts(p("g25.fstk")).frames(), 12u);
  r = run({"integrate", p("y.fstk"), "--group-size", "300", "--out", p("g300.fstk")});
  EXPECT_EQ(io::read_counts(p("g300.fstk")).frames(), 1u);
  r = run({"integrate", p("y.fstk"), "--group-size", "7", "--out", p("g7.fstk")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("dropped 6"), std::string::npos);
  EXPECT_EQ(run({"integrate", p("y.fstk"), "--group-size", "0", "--out", p("g0.fstk")}).code, 2);
}

TEST_F(CliTest, SweepGrid) {
  const auto r = run({"sweep", "--rows", "8", "--cols", "8", "--reps", "1", "--iters", "12", "--burnin", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::vector<std::string> targets;
  while (std::getline(lines, line)) targets.push_back(line.substr(0, line.find(',')));
  EXPECT_EQ(targets, (std::vector<std::string>{"0.025", "0.05", "0.1", "0.5", "0.8", "1"}));
}
