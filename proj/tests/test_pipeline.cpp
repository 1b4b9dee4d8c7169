#include <doctest.h>

#include <json.hpp>

#include "adbar/pipeline.hpp"
#include "support.hpp"

using namespace adbar;
using adbar::testing::TempDir;

namespace {

RunConfig tiny(const fs::path& out) {
  RunConfig cfg;
  cfg.mesh_level = 4;
  cfg.N = 8;
  cfg.R = 3.0;
  cfg.c = 4;
  cfg.boundary_points = 64;
  cfg.zeta_max = 1.0;
  cfg.h_zeta = 0.25;
  cfg.output_dir = out;
  cfg.oracle_n = 64;
  return cfg;
}

const StageRecord& stage(const RunResult& r, const std::string& name) {
  for (const auto& s : r.stages)
    if (s.name == name) return s;
  throw std::runtime_error("no stage " + name);
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = config_from_json_text(R"({"phantom": "test2", "noise_eta": 0.001, "c": 6})");
  CHECK(cfg.phantom == "test2");
  CHECK(cfg.noise_eta == 0.001);
  CHECK(cfg.c == 6);
  CHECK(cfg.R == 6.0);
  CHECK(cfg.zeta_n() == 256);
  CHECK_THROWS_AS(config_from_json_text(R"({"radius": 5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"c": "seven"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("[1, 2]"), ConfigError);
  RunConfig bad;
  bad.noise_eta = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.c = 20;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.boundary_points = 10;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const auto round = config_from_json_text(config_to_json_text(cfg));
  CHECK(config_to_json_text(round) == config_to_json_text(cfg));
}

TEST_CASE("extremes by half-plane") {
  auto g = ReconstructionGrid::make(1.0, 4);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = g.point(i).real();
  const auto e = extremes(g);
  CHECK(e.max == 0.75);
  CHECK(e.min == -0.75);
  CHECK(e.left_max == -0.25);
  CHECK(e.right_min == 0.25);
}

TEST_CASE("compare on identical and mismatched grids") {
  auto g = ReconstructionGrid::make(1.0, 6);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = 1.0;
  auto h = g;
  h.values[g.index(3, 3)] = 1.5;
  const auto m = compare(h, g);
  CHECK(m.sup_error == 0.5);
  CHECK(m.common_points == 32);
  CHECK(compare(g, g).l2_relative_error == 0.0);
  CHECK_THROWS_AS(compare(g, ReconstructionGrid::make(1.0, 8)), ConfigError);
}

TEST_CASE("end-to-end run on the unit conductivity") {
  TempDir dir("pipe_id");
  RunConfig cfg = tiny(dir.path());
  cfg.phantom = "identity";
  const auto r = run_pipeline(cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.reconstruction.size(); ++i)
    if (r.reconstruction.mask[i]) worst = std::max(worst, std::abs(r.reconstruction.values[i] - 1.0));
  CHECK(worst <= 0.02);
  CHECK(fs::exists(dir.path() / "manifest.json"));
  CHECK(fs::exists(dir.path() / "dn.json"));
  CHECK(fs::exists(dir.path() / "scatter" / "scattering.csv"));
  CHECK(fs::exists(dir.path() / "reconstruct" / "reconstruction.pgm"));
}

TEST_CASE("stages are cached and invalidated by their inputs") {
  TempDir dir("pipe_cache");
  RunConfig cfg = tiny(dir.path());
  const auto first = run_pipeline(cfg);
  const std::string csv = io::read_text(dir.path() / "reconstruct" / "reconstruction.csv");
  for (const auto& s : first.stages) CHECK_FALSE(s.cached);

  const auto second = run_pipeline(cfg);
  CHECK(stage(second, "simulate").cached);
  CHECK(stage(second, "scatter").cached);
  CHECK(stage(second, "reconstruct").cached);
  CHECK(io::read_text(dir.path() / "reconstruct" / "reconstruction.csv") == csv);

  cfg.noise_eta = 1e-3;
  const auto third = run_pipeline(cfg);
  CHECK(stage(third, "simulate").cached);
  CHECK_FALSE(stage(third, "scatter").cached);
  CHECK_FALSE(stage(third, "reconstruct").cached);
  CHECK(io::read_text(dir.path() / "reconstruct" / "reconstruction.csv") != csv);

  const auto manifest = nlohmann::json::parse(io::read_text(dir.path() / "manifest.json"));
  CHECK(manifest["config"]["noise_eta"] == 1e-3);
  CHECK(manifest["hashes"]["reconstruction.csv"] ==
        io::sha256_file(dir.path() / "reconstruct" / "reconstruction.csv"));
}

TEST_CASE("fresh runs are byte-for-byte reproducible") {
  TempDir a("pipe_det_a"), b("pipe_det_b");
  RunConfig cfg = tiny(a.path());
  cfg.noise_eta = 1e-3;
  cfg.seed = 9;
  run_pipeline(cfg);
  cfg.output_dir = b.path();
  run_pipeline(cfg);
  for (const char* f : {"dn.json", "scatter/scattering.csv", "reconstruct/reconstruction.csv"})
    CHECK(io::sha256_file(a.path() / f) == io::sha256_file(b.path() / f));
}

TEST_CASE("oracle stage writes the comparison") {
  TempDir dir("pipe_oracle");
  RunConfig cfg = tiny(dir.path());
  cfg.oracle = true;
  run_pipeline(cfg);
  CHECK(fs::exists(dir.path() / "oracle" / "oracle.csv"));
  CHECK(fs::exists(dir.path() / "oracle" / "boundary.csv"));
  const auto m = nlohmann::json::parse(io::read_text(dir.path() / "compare.json"));
  CHECK(m["common_points"].get<int>() > 0);
  CHECK(m["oracle"]["max"].get<double>() > 1.0);
}

TEST_CASE("errors carry the stage name") {
  TempDir dir("pipe_err");
  RunConfig cfg = tiny(dir.path());
  cfg.phantom = "no-such-phantom";
  try {
    run_pipeline(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("simulate") != std::string::npos);
  }
}
