#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adbar/cgo_bie.hpp"
#include "adbar/dbar.hpp"
#include "adbar/forward.hpp"
#include "adbar/phantoms.hpp"
#include "adbar/scattering.hpp"

namespace adbar::io {

namespace fs = std::filesystem;

// Phantoms: {name, smoothing_rho, inclusions: [{shape, center, semi_axes,
// rotation_rad, tensor: [[a, b], [b, c]]}]}.
ConductivityField phantom_from_json_text(std::string_view text);
std::string phantom_to_json_text(const ConductivityField& field);
/// A builtin name or a path to a JSON file.
ConductivityField load_phantom(const std::string& ref);

struct DnMeta {
  std::string phantom;
  int mesh_level = 0;
  double noise_eta = 0.0;
  std::uint64_t seed = 0;
};

// {basis: "trig", N, matrix: row-major (2N+1)^2, meta: {...}}
void save_dn(const fs::path& path, const DNMatrix& dn, const DnMeta& meta);
DNMatrix load_dn(const fs::path& path, DnMeta* meta = nullptr);

/// Binary cache of a noise-free voltage table.
void save_voltages(const fs::path& path, const VoltageTable& table);
VoltageTable load_voltages(const fs::path& path);

/// <dir>/scattering.csv (k1, k2, Re t, Im t) and <dir>/scattering.json
/// {R, c, truncation_radius, zeroed_points, max_residual}.
void save_scattering(const fs::path& dir, const ScatteringData& data);
/// tau is recovered from t; b1 values are not stored and load as zero.
ScatteringData load_scattering(const fs::path& dir);

struct GridMeta {
  double R = 0.0;
  int c = 0;
};

/// <dir>/<stem>.csv (zeta1, zeta2, gamma) over masked points, <dir>/<stem>.pgm
/// and <dir>/<stem>.json {min, max, zeta_max, h_zeta, n, R, c, failed_points,
/// max_imag_residual}.
void save_grid(const fs::path& dir, const std::string& stem, const ReconstructionGrid& grid,
               const GridMeta& meta = {});
ReconstructionGrid load_grid(const fs::path& dir, const std::string& stem, GridMeta* meta = nullptr);

/// 8-bit binary PGM, values mapped linearly from [lo, hi]; unmasked pixels are 0.
void write_pgm(const fs::path& path, const ReconstructionGrid& grid, double lo, double hi);

/// Rows (x, y).
void save_polyline(const fs::path& path, const std::vector<Complex>& points);

/// Rows (k1, k2, branch, theta_index, Re M, Im M).
void save_trace_dump(const fs::path& path, const std::vector<CGOTrace>& traces);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

}  // namespace adbar::io
