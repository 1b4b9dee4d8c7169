#include "adbar/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include <json.hpp>
#include <omp.h>

#include "adbar/version.hpp"

namespace adbar {

using nlohmann::json;

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (phantom.empty()) fail("phantom must be set");
  if (mesh_level < 0 || mesh_level > 10) fail("mesh_level must be in [0, 10]");
  if (N < 1) fail("N must be >= 1");
  if (!(noise_eta >= 0.0)) fail("noise_eta must be >= 0");
  if (!(R > 0.0)) fail("R must be positive");
  if (c < 1 || c > 12) fail("c must be in [1, 12]");
  if (boundary_points < 4 * N + 1) fail("boundary_points must be at least 4N + 1");
  if (!(zeta_max > 0.0)) fail("zeta_max must be positive");
  if (!(h_zeta > 0.0) || zeta_n() < 1) fail("h_zeta must be positive and at most 2 zeta_max");
  if (workers < 0) fail("workers must be >= 0");
  if (oracle_n < 8) fail("oracle_n must be >= 8");
  if (!(oracle_half_width > 1.0)) fail("oracle_half_width must exceed 1");
}

int RunConfig::zeta_n() const { return static_cast<int>(std::lround(2.0 * zeta_max / h_zeta)); }

RunConfig config_from_json_text(std::string_view text, RunConfig cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> known = {
      "phantom", "mesh_level", "N",         "noise_eta", "seed",    "R",      "c",
      "boundary_points", "zeta_max", "h_zeta", "output_dir", "workers", "oracle", "oracle_n",
      "oracle_half_width"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  try {
    cfg.phantom = j.value("phantom", cfg.phantom);
    cfg.mesh_level = j.value("mesh_level", cfg.mesh_level);
    cfg.N = j.value("N", cfg.N);
    cfg.noise_eta = j.value("noise_eta", cfg.noise_eta);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.R = j.value("R", cfg.R);
    cfg.c = j.value("c", cfg.c);
    cfg.boundary_points = j.value("boundary_points", cfg.boundary_points);
    cfg.zeta_max = j.value("zeta_max", cfg.zeta_max);
    cfg.h_zeta = j.value("h_zeta", cfg.h_zeta);
    cfg.output_dir = j.value("output_dir", cfg.output_dir.string());
    cfg.workers = j.value("workers", cfg.workers);
    cfg.oracle = j.value("oracle", cfg.oracle);
    cfg.oracle_n = j.value("oracle_n", cfg.oracle_n);
    cfg.oracle_half_width = j.value("oracle_half_width", cfg.oracle_half_width);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  return config_from_json_text(io::read_text(path), std::move(base));
}

std::string config_to_json_text(const RunConfig& cfg) {
  const json j = {{"phantom", cfg.phantom},
                  {"mesh_level", cfg.mesh_level},
                  {"N", cfg.N},
                  {"noise_eta", cfg.noise_eta},
                  {"seed", cfg.seed},
                  {"R", cfg.R},
                  {"c", cfg.c},
                  {"boundary_points", cfg.boundary_points},
                  {"zeta_max", cfg.zeta_max},
                  {"h_zeta", cfg.h_zeta},
                  {"output_dir", cfg.output_dir.string()},
                  {"workers", cfg.workers},
                  {"oracle", cfg.oracle},
                  {"oracle_n", cfg.oracle_n},
                  {"oracle_half_width", cfg.oracle_half_width}};
  return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hash_of(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) s += p + '\x1f';
  return io::sha256_hex(s);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool cache_hit(const fs::path& dir, const std::string& key, std::initializer_list<const char*> files) {
  if (!fs::exists(dir / "stage.key") || io::read_text(dir / "stage.key") != key) return false;
  for (const char* f : files)
    if (!fs::exists(dir / f)) return false;
  return true;
}

json record_json(const StageRecord& r) {
  json stats = json::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  return {{"name", r.name}, {"key", r.key}, {"cached", r.cached}, {"seconds", r.seconds}, {"stats", stats}};
}

template <class F>
auto in_stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError("stage " + name + ": " + e.what(), e.diagnostic());
  } catch (const InvalidFieldError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  }
}

}  // namespace

VoltageTable simulate_voltages(const ConductivityField& field, int mesh_level, int N,
                               const fs::path& cache_dir, StageRecord* record, Execution exec) {
  const auto t0 = Clock::now();
  const std::string key = hash_of({"simulate", kVersion, io::phantom_to_json_text(field),
                                   std::to_string(mesh_level), std::to_string(N)});
  StageRecord rec{"simulate", key, false, 0.0, {}};
  VoltageTable table;
  if (!cache_dir.empty() && cache_hit(cache_dir, key, {"voltages.bin"})) {
    table = io::load_voltages(cache_dir / "voltages.bin");
    rec.cached = true;
  } else {
    field.validate();
    const DiscMesh mesh = build_mesh(mesh_level);
    table = NeumannSolver(mesh, as_function(field), N).voltage_table(exec);
    rec.stats.emplace_back("triangles", static_cast<double>(mesh.triangles.size()));
    rec.stats.emplace_back("vertices", static_cast<double>(mesh.vertices.size()));
    if (!cache_dir.empty()) {
      io::save_voltages(cache_dir / "voltages.bin", table);
      io::write_text(cache_dir / "stage.key", key);
    }
  }
  rec.seconds = since(t0);
  if (record) *record = rec;
  return table;
}

DNMatrix noisy_dn(const VoltageTable& clean, double eta, std::uint64_t seed) {
  return dn_from_voltages(add_noise(clean, eta, seed));
}

OracleResult run_oracle(const ConductivityField& field, const BeltramiOptions& opt,
                        ReconstructionGrid grid, Execution exec) {
  OracleResult r;
  r.map = solve_beltrami(field, opt, exec);
  r.gamma = true_isotropization(r.map, field, std::move(grid));
  r.boundary = deformed_boundary(r.map, 512, exec);
  r.winding = winding_number(r.boundary);
  return r;
}

void save_oracle(const fs::path& dir, const OracleResult& result) {
  io::save_grid(dir, "oracle", result.gamma);
  io::save_polyline(dir / "boundary.csv", result.boundary);
  double rmax = 0.0;
  for (const Complex& p : result.boundary) rmax = std::max(rmax, std::abs(p));
  const json j = {{"A", {result.map.A.real(), result.map.A.imag()}},
                  {"A_moment", {result.map.A_moment.real(), result.map.A_moment.imag()}},
                  {"iterations", result.map.iterations},
                  {"residual", result.map.residual},
                  {"boundary_max_radius", rmax},
                  {"winding_number", result.winding},
                  {"S", result.map.S},
                  {"n", result.map.n}};
  io::write_text(dir / "map.json", j.dump(2));
}

Extremes extremes(const ReconstructionGrid& g) {
  Extremes e;
  const double inf = std::numeric_limits<double>::infinity();
  e.max = e.left_max = e.right_max = -inf;
  e.min = e.left_min = e.right_min = inf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.mask[i]) continue;
    const Complex z = g.point(i);
    const double v = g.values[i];
    if (v > e.max) e.max = v, e.argmax = z;
    if (v < e.min) e.min = v, e.argmin = z;
    if (z.real() < 0.0) {
      if (v > e.left_max) e.left_max = v, e.left_argmax = z;
      e.left_min = std::min(e.left_min, v);
    } else if (z.real() > 0.0) {
      if (v > e.right_max) e.right_max = v, e.right_argmax = z;
      e.right_min = std::min(e.right_min, v);
    }
  }
  return e;
}

CompareMetrics compare(const ReconstructionGrid& recon, const ReconstructionGrid& oracle) {
  if (recon.n != oracle.n || recon.zeta_max != oracle.zeta_max)
    throw ConfigError("compare: reconstruction and oracle grids differ");
  CompareMetrics m;
  double num2 = 0.0, den2 = 0.0;
  for (std::size_t i = 0; i < recon.size(); ++i) {
    if (!recon.mask[i] || !oracle.mask[i]) continue;
    ++m.common_points;
    const double d = recon.values[i] - oracle.values[i];
    m.sup_error = std::max(m.sup_error, std::abs(d));
    num2 += d * d;
    den2 += oracle.values[i] * oracle.values[i];
  }
  if (m.common_points == 0) throw ConfigError("compare: grids share no points");
  m.l2_relative_error = den2 > 0.0 ? std::sqrt(num2 / den2) : std::sqrt(num2);
  m.recon = extremes(recon);
  m.oracle = extremes(oracle);
  return m;
}

std::string metrics_to_json_text(const CompareMetrics& m) {
  auto ex = [](const Extremes& e) {
    return json{{"max", e.max},           {"min", e.min},           {"left_max", e.left_max},
                {"right_max", e.right_max}, {"left_min", e.left_min}, {"right_min", e.right_min}};
  };
  const json j = {{"sup_error", m.sup_error},
                  {"l2_relative_error", m.l2_relative_error},
                  {"common_points", m.common_points},
                  {"reconstruction", ex(m.recon)},
                  {"oracle", ex(m.oracle)}};
  return j.dump(2);
}

RunResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  RunResult result;

  const ConductivityField field = in_stage("simulate", [&] { return io::load_phantom(cfg.phantom); });
  StageRecord sim;
  const VoltageTable clean = in_stage("simulate", [&] {
    return simulate_voltages(field, cfg.mesh_level, cfg.N, out / "simulate", &sim);
  });
  result.stages.push_back(sim);

  const auto t_dn = Clock::now();
  const std::string dn_key = hash_of({sim.key, num(cfg.noise_eta), std::to_string(cfg.seed)});
  const DNMatrix dn = in_stage("noise", [&] { return noisy_dn(clean, cfg.noise_eta, cfg.seed); });
  io::save_dn(out / "dn.json", dn, {field.name, cfg.mesh_level, cfg.noise_eta, cfg.seed});
  result.stages.push_back({"noise", dn_key, false, since(t_dn), {{"noise_eta", cfg.noise_eta}}});

  const ScatterOptions sopt{cfg.R, cfg.boundary_points, {}};
  const std::string scat_key =
      hash_of({"scatter", dn_key, num(cfg.R), std::to_string(cfg.c), std::to_string(sopt.boundary_points),
               num(sopt.gmres.tolerance), std::to_string(sopt.gmres.restart),
               std::to_string(sopt.gmres.max_iterations)});
  const fs::path scat_dir = out / "scatter";
  const auto t_sc = Clock::now();
  StageRecord scat{"scatter", scat_key, false, 0.0, {}};
  result.scattering = in_stage("scatter", [&] {
    if (cache_hit(scat_dir, scat_key, {"scattering.csv", "scattering.json"})) {
      scat.cached = true;
      return io::load_scattering(scat_dir);
    }
    const HilbertMatrices H = build_hilbert(dn);
    ScatteringData d = compute_scattering(H, KGrid(cfg.R, cfg.c), sopt);
    io::save_scattering(scat_dir, d);
    io::write_text(scat_dir / "stage.key", scat_key);
    return d;
  });
  for (const auto& line : result.scattering.log) std::fprintf(stderr, "scatter: %s\n", line.c_str());
  scat.seconds = since(t_sc);
  scat.stats = {{"zeroed_points", result.scattering.zeroed_points},
                {"max_residual", result.scattering.max_residual}};
  result.stages.push_back(scat);

  const DbarOptions dopt;
  const std::string rec_key = hash_of({"reconstruct", scat_key, num(cfg.zeta_max), std::to_string(cfg.zeta_n()),
                                       num(dopt.gmres.tolerance)});
  const fs::path rec_dir = out / "reconstruct";
  const auto t_rc = Clock::now();
  StageRecord rec{"reconstruct", rec_key, false, 0.0, {}};
  result.reconstruction = in_stage("reconstruct", [&] {
    if (cache_hit(rec_dir, rec_key, {"reconstruction.csv", "reconstruction.json"})) {
      rec.cached = true;
      return io::load_grid(rec_dir, "reconstruction");
    }
    const DbarWorkspace ws(result.scattering, dopt);
    ReconstructionGrid g = reconstruct(ws, ReconstructionGrid::make(cfg.zeta_max, cfg.zeta_n()));
    io::save_grid(rec_dir, "reconstruction", g, {cfg.R, cfg.c});
    io::write_text(rec_dir / "stage.key", rec_key);
    return g;
  });
  rec.seconds = since(t_rc);
  const Extremes ex = extremes(result.reconstruction);
  rec.stats = {{"failed_points", result.reconstruction.failed_count}, {"min", ex.min}, {"max", ex.max}};
  result.stages.push_back(rec);

  json extra = json::object();
  if (cfg.oracle) {
    const auto t_or = Clock::now();
    const OracleResult orc = in_stage("oracle", [&] {
      return run_oracle(field, {cfg.oracle_half_width, cfg.oracle_n, 1e-8, 500},
                        ReconstructionGrid::make(cfg.zeta_max, cfg.zeta_n()));
    });
    save_oracle(out / "oracle", orc);
    const CompareMetrics m = compare(result.reconstruction, orc.gamma);
    io::write_text(out / "compare.json", metrics_to_json_text(m));
    result.stages.push_back({"oracle", "", false, since(t_or),
                             {{"iterations", orc.map.iterations}, {"sup_error", m.sup_error}}});
  }

  json manifest = {{"version", kVersion},
                   {"config", json::parse(config_to_json_text(cfg))},
                   {"stages", json::array()},
                   {"outputs",
                    {{"dn", "dn.json"},
                     {"scattering", "scatter/scattering.csv"},
                     {"reconstruction", "reconstruct/reconstruction.csv"}}}};
  for (const auto& s : result.stages) manifest["stages"].push_back(record_json(s));
  manifest["hashes"] = {{"dn.json", io::sha256_file(out / "dn.json")},
                        {"scattering.csv", io::sha256_file(scat_dir / "scattering.csv")},
                        {"reconstruction.csv", io::sha256_file(rec_dir / "reconstruction.csv")}};
  result.manifest_path = out / "manifest.json";
  io::write_text(result.manifest_path, manifest.dump(2));
  return result;
}

}  // namespace adbar
