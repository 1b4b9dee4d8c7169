// adbar: command-line driver for the anisotropic D-bar toolkit.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <optional>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "adbar/pipeline.hpp"
#include "adbar/version.hpp"

namespace {

using namespace adbar;

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

void set_workers(int workers) {
  if (workers < 0) throw ConfigError("--workers must be >= 0");
  if (workers > 0) omp_set_num_threads(workers);
}

int cmd_simulate(const std::string& phantom, int level, int N, double eta, std::uint64_t seed,
                 const fs::path& out, const fs::path& cache) {
  const ConductivityField field = io::load_phantom(phantom);
  StageRecord rec;
  const VoltageTable clean = simulate_voltages(field, level, N, cache, &rec);
  const DNMatrix dn = noisy_dn(clean, eta, seed);
  io::save_dn(out, dn, {field.name, level, eta, seed});
  std::fprintf(stderr, "simulate: %s (%s, %.1f s)\n", out.c_str(), rec.cached ? "cached" : "computed",
               rec.seconds);
  return 0;
}

int cmd_scatter(const fs::path& dn_path, double R, int c, int M, const fs::path& out,
                const std::vector<std::pair<double, double>>& trace_k, const fs::path& trace_out) {
  const DNMatrix dn = io::load_dn(dn_path);
  const HilbertMatrices H = build_hilbert(dn);
  const ScatteringData d = compute_scattering(H, KGrid(R, c), {R, M, {}});
  for (const auto& line : d.log) std::fprintf(stderr, "scatter: %s\n", line.c_str());
  io::save_scattering(out, d);
  if (!trace_k.empty()) {
    const TrigTransform transform(dn.N, M);
    std::vector<CGOTrace> traces;
    for (const auto& [k1, k2] : trace_k) traces.push_back(solve_cgo_traces(H, {k1, k2}, transform));
    io::save_trace_dump(trace_out.empty() ? out / "traces.csv" : trace_out, traces);
  }
  std::fprintf(stderr, "scatter: %d zeroed points, max residual %.3g\n", d.zeroed_points, d.max_residual);
  return 0;
}

int cmd_reconstruct(const fs::path& scat_dir, double zeta_max, double h, const fs::path& out) {
  const ScatteringData d = io::load_scattering(scat_dir);
  const DbarWorkspace ws(d);
  const ReconstructionGrid g = reconstruct(ws, ReconstructionGrid::with_spacing(zeta_max, h));
  io::save_grid(out, "reconstruction", g, {d.grid.R, d.grid.c});
  const Extremes e = extremes(g);
  std::fprintf(stderr, "reconstruct: min %.4f max %.4f, %d failed points\n", e.min, e.max, g.failed_count);
  return 0;
}

int cmd_oracle(const std::string& phantom, double S, int n, double zeta_max, double h, const fs::path& out) {
  const ConductivityField field = io::load_phantom(phantom);
  const OracleResult r =
      run_oracle(field, {S, n, 1e-8, 500}, ReconstructionGrid::with_spacing(zeta_max, h));
  save_oracle(out, r);
  const Extremes e = extremes(r.gamma);
  std::fprintf(stderr, "oracle: %d iterations, gamma in [%.4f, %.4f], winding %d\n", r.map.iterations,
               e.min, e.max, r.winding);
  return 0;
}

int cmd_compare(const fs::path& recon, const fs::path& oracle, const fs::path& out) {
  const CompareMetrics m =
      compare(io::load_grid(recon, "reconstruction"), io::load_grid(oracle, "oracle"));
  const std::string text = metrics_to_json_text(m);
  if (out.empty())
    std::cout << text << '\n';
  else
    io::write_text(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic D-bar reconstruction toolkit"};
  app.set_version_flag("--version", std::string(adbar::kVersion));
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (0: all cores)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "FEM forward solve to a D-N matrix");
  std::string sim_phantom = "test1";
  int sim_level = 8, sim_N = 16;
  double sim_eta = 0.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "dn.json", sim_cache;
  sim->add_option("--phantom", sim_phantom, "Builtin name or phantom JSON");
  sim->add_option("--mesh-level", sim_level, "Uniform refinement level");
  sim->add_option("--N", sim_N, "Trigonometric basis order");
  sim->add_option("--noise", sim_eta, "Relative noise level eta");
  sim->add_option("--seed", sim_seed, "Noise seed");
  sim->add_option("--out", sim_out, "Output D-N JSON");
  sim->add_option("--cache", sim_cache, "Directory for the noise-free voltage cache");

  // scatter
  auto* sc = app.add_subcommand("scatter", "CGO traces and scattering data from a D-N matrix");
  std::string sc_dn, sc_out = "scatter", sc_trace_out;
  double sc_R = 6.0;
  int sc_c = 7, sc_M = 256;
  std::vector<std::pair<double, double>> sc_trace_k;
  sc->add_option("--dn", sc_dn, "D-N JSON")->required();
  sc->add_option("--radius", sc_R, "Truncation radius R");
  sc->add_option("--kexp", sc_c, "k-grid exponent c (2^c points per axis)");
  sc->add_option("--boundary-points", sc_M, "Boundary samples for e^{ikz} products");
  sc->add_option("--out", sc_out, "Output directory");
  sc->add_option("--trace-k", sc_trace_k, "Dump CGO traces at k = (k1, k2)")->expected(0, -1);
  sc->add_option("--trace-out", sc_trace_out, "Trace dump CSV");

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "D-bar solve on a zeta grid");
  std::string rc_scat, rc_out = "reconstruct";
  double rc_zmax = 1.2, rc_h = 2.4 / 256;
  rc->add_option("--scattering", rc_scat, "Scattering directory")->required();
  rc->add_option("--zeta-max", rc_zmax, "Reconstruction radius");
  rc->add_option("--h-zeta", rc_h, "Reconstruction grid spacing");
  rc->add_option("--out", rc_out, "Output directory");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Quasiconformal map and true isotropization");
  std::string or_phantom = "test1", or_out = "oracle";
  double or_S = 2.0, or_zmax = 1.2, or_h = 2.4 / 256;
  int or_n = 1024;
  orc->add_option("--phantom", or_phantom, "Builtin name or phantom JSON");
  orc->add_option("--half-width", or_S, "Beltrami grid covers [-S, S]^2");
  orc->add_option("--n", or_n, "Beltrami cells per axis");
  orc->add_option("--zeta-max", or_zmax, "Output radius");
  orc->add_option("--h-zeta", or_h, "Output grid spacing");
  orc->add_option("--out", or_out, "Output directory");

  // compare
  auto* cmp = app.add_subcommand("compare", "Error metrics between reconstruction and oracle");
  std::string cmp_recon, cmp_oracle, cmp_out;
  cmp->add_option("--recon", cmp_recon, "Reconstruction directory")->required();
  cmp->add_option("--oracle", cmp_oracle, "Oracle directory")->required();
  cmp->add_option("--out", cmp_out, "Metrics JSON (default: stdout)");

  // run
  auto* run = app.add_subcommand("run", "simulate -> scatter -> reconstruct with caching");
  std::string run_config;
  std::optional<std::string> run_phantom, run_out;
  std::optional<double> run_eta, run_R;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_c, run_level;
  bool run_oracle_flag = false;
  run->add_option("--config", run_config, "JSON config file");
  run->add_option("--phantom", run_phantom, "Override phantom");
  run->add_option("--mesh-level", run_level, "Override mesh level");
  run->add_option("--noise", run_eta, "Override noise level");
  run->add_option("--seed", run_seed, "Override seed");
  run->add_option("--radius", run_R, "Override truncation radius");
  run->add_option("--kexp", run_c, "Override k-grid exponent");
  run->add_option("--out", run_out, "Override output directory");
  run->add_flag("--oracle", run_oracle_flag, "Also run the oracle and compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    set_workers(workers);
    if (sim->parsed())
      return cmd_simulate(sim_phantom, sim_level, sim_N, sim_eta, sim_seed, sim_out, sim_cache);
    if (sc->parsed()) return cmd_scatter(sc_dn, sc_R, sc_c, sc_M, sc_out, sc_trace_k, sc_trace_out);
    if (rc->parsed()) return cmd_reconstruct(rc_scat, rc_zmax, rc_h, rc_out);
    if (orc->parsed()) return cmd_oracle(or_phantom, or_S, or_n, or_zmax, or_h, or_out);
    if (cmp->parsed()) return cmd_compare(cmp_recon, cmp_oracle, cmp_out);
    if (run->parsed()) {
      RunConfig cfg = run_config.empty() ? RunConfig{} : load_config(run_config);
      if (run_phantom) cfg.phantom = *run_phantom;
      if (run_level) cfg.mesh_level = *run_level;
      if (run_eta) cfg.noise_eta = *run_eta;
      if (run_seed) cfg.seed = *run_seed;
      if (run_R) cfg.R = *run_R;
      if (run_c) cfg.c = *run_c;
      if (run_out) cfg.output_dir = *run_out;
      if (run_oracle_flag) cfg.oracle = true;
      if (workers > 0) cfg.workers = workers;
      const RunResult r = run_pipeline(cfg);
      for (const auto& s : r.stages)
        std::fprintf(stderr, "%-12s %s %8.2f s\n", s.name.c_str(), s.cached ? "cached  " : "computed",
                     s.seconds);
      std::fprintf(stderr, "manifest: %s\n", r.manifest_path.c_str());
      return 0;
    }
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s (diagnostic %.3g)\n", e.what(), e.diagnostic());
    return kNumericalError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const InvalidFieldError& e) {
    std::fprintf(stderr, "invalid field: %s\n", e.what());
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "file error: %s\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}
