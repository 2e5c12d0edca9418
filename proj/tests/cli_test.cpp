#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "safa/latent_map.hpp"
#include "safa/rng.hpp"
#include "safa/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "safa_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(SAFA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const auto p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

fs::path fresh(const std::string& name) {
  const auto p = kRoot / name;
  fs::remove_all(p);
  return p;
}

const char* kSmallBounds = R"({"seed": 4, "bounds": {"dims": [4], "deltas": [0.1],
  "pairings": ["shared"], "trials": 300, "steps": 50}})";

}  // namespace

TEST(Cli, GenerateWritesRun) {
  const auto out = fresh("gen");
  ASSERT_EQ(run("generate --fast --seed 3 --mode safastar --out " + out.string()), 0);
  for (const char* f : {"canvas.safa", "canvas_c0.pgm", "trajectory.csv", "metrics.csv",
                        "manifest.json", "spectrum_overlap.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto manifest = slurp(out / "manifest.json");
  EXPECT_NE(manifest.find("\"safastar\""), std::string::npos);
  EXPECT_NE(manifest.find("config_hash"), std::string::npos);
}

TEST(Cli, ByteIdenticalAcrossThreadCounts) {
  const auto a = fresh("det_a");
  const auto b = fresh("det_b");
  ASSERT_EQ(run("generate --fast --seed 8 --threads 1 --out " + a.string()), 0);
  ASSERT_EQ(run("generate --fast --seed 8 --threads 4 --out " + b.string()), 0);
  for (const char* f : {"canvas.safa", "trajectory.csv", "metrics.csv", "spectrum_overlap.csv",
                        "manifest.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, ConfigAndInputErrorsExitOne) {
  EXPECT_EQ(run("generate --fast --out " + fresh("noseed").string()), 1);
  EXPECT_EQ(run("generate --config " + write_config("bad_key.json", R"({"seed": 1, "wdith": 3})").string()),
            1);
  EXPECT_EQ(run("generate --config " +
                write_config("bad_geom.json", R"({"seed": 1, "canvas": {"width": 401}})").string()),
            1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("generate --fast --seed 1 --mode blend"), 1);
  fs::create_directories(kRoot);
  std::ofstream(kRoot / "junk.safa") << "not a tensor";
  EXPECT_EQ(run("analyze --canvas " + (kRoot / "junk.safa").string()), 1);
}

TEST(Cli, AnalyzeStoredCanvas) {
  safa::LatentMap m(2, 16, 400);
  safa::fill_standard_normal(m.data(), 5);
  fs::create_directories(kRoot);
  safa::write_safa(kRoot / "noise.safa", m);
  const auto out = fresh("analyze");
  ASSERT_EQ(run("analyze --canvas " + (kRoot / "noise.safa").string() +
                " --subview-width 80 --overlap-rate 0.2 --out " + out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  EXPECT_TRUE(fs::exists(out / "spectrum_reference.csv"));

  safa::write_safa(kRoot / "flat.safa", safa::LatentMap(1, 8, 400, 1.0));
  EXPECT_EQ(run("analyze --canvas " + (kRoot / "flat.safa").string() + " --out " +
                fresh("flat").string()),
            2);
}

TEST(Cli, SweepWritesTable) {
  const auto out = fresh("sweep");
  ASSERT_EQ(run("sweep --fast --seed 2 --param r_guide --grid 0,0.5 --out " + out.string()), 0);
  const auto csv = slurp(out / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(out / "r_guide_0" / "canvas.safa"));
  EXPECT_EQ(run("sweep --fast --seed 2 --param colour --grid 1 --out " + out.string()), 1);
}

TEST(Cli, BoundValidationExitCodes) {
  const auto cfg = write_config("bounds.json", kSmallBounds);
  const auto out = fresh("bounds");
  EXPECT_EQ(run("validate-bounds --config " + cfg.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "bounds.csv"));
  EXPECT_EQ(run("validate-bounds --config " + cfg.string() + " --debug-bound-scale 0.001 --out " +
                fresh("bounds_bad").string()),
            3);
}
