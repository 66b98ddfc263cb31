#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "slipdet/sequence_io.hpp"

namespace fs = std::filesystem;
using namespace slipdet;

namespace {

const std::string kCli = SLIPDET_CLI_PATH;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("slipdet_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  fs::path dir_;
};

const char* kChainScenario = R"({
  "model": "beam_chain",
  "frame_rate_hz": 30,
  "noise_sigma": 1e-7,
  "params": {"nodes": 21},
  "schedule": [{"duration": 6}, {"duration": 60, "velocity": 0.01}]
})";

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("profiles"), 2);
  EXPECT_EQ(run("profiles --out " + p("x") + " --bogus"), 2);
  EXPECT_EQ(run("simulate --out " + p("x") + " --config " + p("missing.json")), 2);
  EXPECT_EQ(run("profiles --out " + p("x") + " --rc 1.0,abc"), 2);
}

TEST_F(CliTest, ProfilesRefusesToOverwrite) {
  const std::string args = "profiles --out " + p("prof") + " --ra 3 --rc 1.5,1.25,1.0,0.75,0.5 --svg";
  ASSERT_EQ(run(args), 0);
  for (const char* f : {"profiles.csv", "slip_profiles.csv", "peaks.csv", "phi.svg", "slip.svg", "slip_derivative.svg"})
    EXPECT_TRUE(fs::exists(dir_ / "prof" / f)) << f;
  const std::string before = slurp(dir_ / "prof" / "peaks.csv");
  EXPECT_EQ(run(args), 2);
  EXPECT_EQ(slurp(dir_ / "prof" / "peaks.csv"), before);
  EXPECT_EQ(run(args + " --force"), 0);
  EXPECT_EQ(slurp(dir_ / "prof" / "peaks.csv"), before);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  const auto cfg = write("chain.json", kChainScenario);
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 17 --out " + p(t + "/sim")), 0);
    ASSERT_EQ(run("detect --sequence " + p(t + "/sim/frames.json") + " --out " + p(t + "/det")), 0);
    ASSERT_EQ(run("evaluate --estimated " + p(t + "/det/states.csv") + " --truth " + p(t + "/sim/states.csv") +
                  " --out " + p(t + "/eval")),
              0);
  }
  for (const char* f : {"sim/frames.json", "sim/frames.bin", "sim/states.csv", "det/events.csv", "det/slipmap.csv",
                        "eval/report.csv", "eval/summary.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 18 --out " + p("c/sim")), 0);
  EXPECT_NE(slurp(dir_ / "a/sim/frames.bin"), slurp(dir_ / "c/sim/frames.bin"));
}

TEST_F(CliTest, TruncatedPayloadIsInputError) {
  const auto cfg = write("chain.json", kChainScenario);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + p("sim")), 0);
  fs::resize_file(dir_ / "sim/frames.bin", fs::file_size(dir_ / "sim/frames.bin") / 2);
  EXPECT_EQ(run("detect --sequence " + p("sim/frames.json") + " --out " + p("det")), 3);
  EXPECT_FALSE(fs::exists(dir_ / "det"));
}

TEST_F(CliTest, DetectorConfigError) {
  const auto cfg = write("chain.json", kChainScenario);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + p("sim")), 0);
  const auto bad = write("det.json", R"({"detector": {"lag": 1}})");
  EXPECT_EQ(run("detect --sequence " + p("sim/frames.json") + " --config " + bad.string() + " --out " + p("det")), 5);
  EXPECT_FALSE(fs::exists(dir_ / "det"));
}

TEST_F(CliTest, SolverErrorExitCode) {
  const auto cfg = write("chain.json", R"({
    "model": "beam_chain", "params": {"nodes": 21},
    "schedule": [{"duration": 30, "velocity": 0.05}],
    "solver": {"max_sweeps": 1}
  })");
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + p("sim")), 4);
}

TEST_F(CliTest, MalformedScenarioIsInputError) {
  const auto cfg = write("bad.json", R"({"model": "fem"})");
  EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + p("sim")), 3);
  const auto macro = write("macro.json", R"({"model": "analytic", "schedule": [0, 1e9]})");
  EXPECT_EQ(run("simulate --config " + macro.string() + " --out " + p("sim")), 3);
}

TEST_F(CliTest, FrictionFitNeedsForces) {
  const auto cfg = write("an.json", R"({
    "model": "analytic", "params": {"rows": 20, "cols": 20, "pitch": 0.35},
    "schedule": {"from": 0, "to": 3.6, "frames": 24, "hold": 6}
  })");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + p("sim")), 0);
  ASSERT_EQ(run("detect --sequence " + p("sim/frames.json") + " --out " + p("det")), 0);
  EXPECT_EQ(run("fit-friction --sequence " + p("sim/frames.json") + " --events " + p("det/events.csv") + " --out " +
                p("fit")),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "fit/samples.csv"));


  io::Sequence bare;
  std::vector<DeformationFrame> frames(3);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    frames[t].t = static_cast<double>(t) / 30.0;
    frames[t].positions = Grid<Vec3>(4, 4, Vec3{0.0, 0.0, 0.0});
    frames[t].displacements = Grid<Vec3>(4, 4, Vec3{0.0, 0.0, 0.0});
  }
  bare.header = io::make_header(frames, 4, 4, 30.0);
  bare.frames = std::move(frames);
  io::write_sequence(dir_ / "bare.json", bare);
  const auto events = write("ev.csv", "frame,t,i,j,type,value,delta\n1,0.033,0,3,pos_extreme,0.1,0.1\n");
  EXPECT_EQ(run("fit-friction --sequence " + p("bare.json") + " --events " + events.string() + " --out " + p("fit2")),
            3);
  EXPECT_FALSE(fs::exists(dir_ / "fit2"));
}
