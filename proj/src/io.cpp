#include "adbar/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

namespace adbar::io {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const fs::path& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw ConfigError("malformed number '" + std::string(s) + "' in " + where.string());
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(what + ": bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

ConductivityField phantom_from_json_text(std::string_view text) {
  const std::string what = "phantom";
  const json j = parse_json(text, what);
  ConductivityField f;
  f.name = j.value("name", std::string("custom"));
  f.smoothing_rho = get<double>(j, "smoothing_rho", what);
  for (const json& ij : j.value("inclusions", json::array())) {
    Inclusion inc;
    const auto shape = get<std::string>(ij, "shape", what);
    if (shape == "disc") inc.shape = ShapeKind::disc;
    else if (shape == "ellipse") inc.shape = ShapeKind::ellipse;
    else throw ConfigError(what + ": unknown shape '" + shape + "'");
    const auto c = get<std::vector<double>>(ij, "center", what);
    const auto ax = get<std::vector<double>>(ij, "semi_axes", what);
    const auto t = get<std::vector<std::vector<double>>>(ij, "tensor", what);
    if (c.size() != 2 || ax.empty() || ax.size() > 2 || t.size() != 2 || t[0].size() != 2 ||
        t[1].size() != 2)
      throw ConfigError(what + ": malformed inclusion");
    if (t[0][1] != t[1][0]) throw InvalidFieldError(what + ": tensor must be symmetric");
    inc.center = {c[0], c[1]};
    inc.semi_a = ax[0];
    inc.semi_b = ax.size() == 2 ? ax[1] : ax[0];
    inc.rotation_rad = ij.value("rotation_rad", 0.0);
    inc.tensor = {t[0][0], t[0][1], t[1][1]};
    f.inclusions.push_back(inc);
  }
  f.validate();
  return f;
}

std::string phantom_to_json_text(const ConductivityField& field) {
  json j;
  j["name"] = field.name;
  j["smoothing_rho"] = field.smoothing_rho;
  j["inclusions"] = json::array();
  for (const auto& inc : field.inclusions) {
    j["inclusions"].push_back({
        {"shape", inc.shape == ShapeKind::disc ? "disc" : "ellipse"},
        {"center", {inc.center.real(), inc.center.imag()}},
        {"semi_axes", {inc.semi_a, inc.semi_b}},
        {"rotation_rad", inc.rotation_rad},
        {"tensor", {{inc.tensor.xx, inc.tensor.xy}, {inc.tensor.xy, inc.tensor.yy}}},
    });
  }
  return j.dump(2);
}

ConductivityField load_phantom(const std::string& ref) {
  const auto names = phantoms::builtin_names();
  if (std::find(names.begin(), names.end(), ref) != names.end()) return phantoms::builtin(ref);
  if (!fs::exists(ref)) throw ConfigError("'" + ref + "' is neither a builtin phantom nor a file");
  return phantom_from_json_text(read_text(ref));
}

void save_dn(const fs::path& path, const DNMatrix& dn, const DnMeta& meta) {
  json j;
  j["basis"] = "trig";
  j["N"] = dn.N;
  std::vector<double> flat;
  flat.reserve(dn.L.size());
  for (Eigen::Index r = 0; r < dn.L.rows(); ++r)
    for (Eigen::Index c = 0; c < dn.L.cols(); ++c) flat.push_back(dn.L(r, c));
  j["matrix"] = flat;
  j["meta"] = {{"phantom", meta.phantom},
               {"mesh_level", meta.mesh_level},
               {"noise_eta", meta.noise_eta},
               {"seed", meta.seed}};
  write_text(path, j.dump());
}

DNMatrix load_dn(const fs::path& path, DnMeta* meta) {
  const std::string what = path.string();
  const json j = parse_json(read_text(path), what);
  if (j.value("basis", std::string()) != "trig") throw ConfigError(what + ": basis must be 'trig'");
  DNMatrix dn;
  dn.N = get<int>(j, "N", what);
  if (dn.N < 1) throw ConfigError(what + ": N must be >= 1");
  const auto flat = get<std::vector<double>>(j, "matrix", what);
  const int s = dn.size();
  if (flat.size() != static_cast<std::size_t>(s) * s) throw ConfigError(what + ": matrix has wrong size");
  dn.L.resize(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) dn.L(r, c) = flat[static_cast<std::size_t>(r) * s + c];
  if (meta && j.contains("meta")) {
    const json& m = j["meta"];
    meta->phantom = m.value("phantom", std::string());
    meta->mesh_level = m.value("mesh_level", 0);
    meta->noise_eta = m.value("noise_eta", 0.0);
    meta->seed = m.value("seed", std::uint64_t{0});
  }
  return dn;
}

namespace {
constexpr char kVoltageMagic[8] = {'A', 'D', 'B', 'V', 'O', 'L', 'T', '1'};

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_matrix(std::ifstream& in, const fs::path& path) {
  std::int64_t dims[2] = {0, 0};
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || dims[0] < 0 || dims[1] < 0 || dims[0] * dims[1] > (std::int64_t{1} << 32))
    throw ConfigError("corrupt voltage cache " + path.string());
  Eigen::MatrixXd m(dims[0], dims[1]);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw ConfigError("truncated voltage cache " + path.string());
  return m;
}
}  // namespace

void save_voltages(const fs::path& path, const VoltageTable& table) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(kVoltageMagic, sizeof kVoltageMagic);
  const std::int64_t N = table.N;
  out.write(reinterpret_cast<const char*>(&N), sizeof N);
  write_matrix(out, table.voltages);
  write_matrix(out, table.projection);
}

VoltageTable load_voltages(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 8, kVoltageMagic)) throw ConfigError("not a voltage cache: " + path.string());
  std::int64_t N = 0;
  in.read(reinterpret_cast<char*>(&N), sizeof N);
  VoltageTable t;
  t.N = static_cast<int>(N);
  t.voltages = read_matrix(in, path);
  t.projection = read_matrix(in, path);
  if (t.voltages.cols() != 2 * t.N || t.projection.rows() != 2 * t.N + 1 ||
      t.projection.cols() != t.voltages.rows())
    throw ConfigError("inconsistent voltage cache " + path.string());
  return t;
}

void save_scattering(const fs::path& dir, const ScatteringData& data) {
  fs::create_directories(dir);
  std::string csv = "k1,k2,re_t,im_t\n";
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    const Complex k = data.grid.point(i);
    csv += num(k.real()) + ',' + num(k.imag()) + ',' + num(data.t[i].real()) + ',' +
           num(data.t[i].imag()) + '\n';
  }
  write_text(dir / "scattering.csv", csv);
  const json j = {{"R", data.grid.R},
                  {"c", data.grid.c},
                  {"truncation_radius", data.truncation_radius},
                  {"zeroed_points", data.zeroed_points},
                  {"max_residual", data.max_residual}};
  write_text(dir / "scattering.json", j.dump(2));
}

ScatteringData load_scattering(const fs::path& dir) {
  const fs::path side = dir / "scattering.json";
  const json j = parse_json(read_text(side), side.string());
  ScatteringData d;
  d.grid = KGrid(get<double>(j, "R", side.string()), get<int>(j, "c", side.string()));
  d.truncation_radius = j.value("truncation_radius", d.grid.R);
  d.zeroed_points = j.value("zeroed_points", 0);
  d.max_residual = j.value("max_residual", 0.0);
  const std::size_t n = d.grid.size();
  d.t.assign(n, 0.0);
  d.tau.assign(n, 0.0);
  d.b1_plus.assign(n, 0.0);
  d.b1_minus.assign(n, 0.0);
  d.zeroed.assign(n, 0);

  const fs::path csv_path = dir / "scattering.csv";
  std::istringstream in(read_text(csv_path));
  std::string line;
  std::getline(in, line);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4 || row >= n) throw ConfigError("malformed " + csv_path.string());
    d.t[row] = {parse_double(f[2], csv_path), parse_double(f[3], csv_path)};
    const Complex k = d.grid.point(row);
    if (k != Complex{}) d.tau[row] = d.t[row] / (Complex{0.0, -4.0 * kPi} * std::conj(k));
    ++row;
  }
  if (row != n) throw ConfigError(csv_path.string() + " has " + std::to_string(row) + " rows, expected " + std::to_string(n));
  return d;
}

void write_pgm(const fs::path& path, const ReconstructionGrid& grid, double lo, double hi) {
  std::string out = "P5\n" + std::to_string(grid.n) + ' ' + std::to_string(grid.n) + "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (int row = 0; row < grid.n; ++row) {
    const int iy = grid.n - 1 - row;  // top row is the largest zeta_2
    for (int ix = 0; ix < grid.n; ++ix) {
      const std::size_t i = grid.index(ix, iy);
      unsigned char px = 0;
      if (grid.mask[i]) px = static_cast<unsigned char>(std::lround(255.0 * std::clamp((grid.values[i] - lo) / span, 0.0, 1.0)));
      out.push_back(static_cast<char>(px));
    }
  }
  write_text(path, out);
}

void save_grid(const fs::path& dir, const std::string& stem, const ReconstructionGrid& grid,
               const GridMeta& meta) {
  fs::create_directories(dir);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, imag = 0.0;
  std::string csv = "zeta1,zeta2,gamma\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.mask[i]) continue;
    const Complex z = grid.point(i);
    csv += num(z.real()) + ',' + num(z.imag()) + ',' + num(grid.values[i]) + '\n';
    lo = std::min(lo, grid.values[i]);
    hi = std::max(hi, grid.values[i]);
    imag = std::max(imag, grid.imag_residual[i]);
  }
  if (!(lo <= hi)) lo = hi = 0.0;
  write_text(dir / (stem + ".csv"), csv);
  write_pgm(dir / (stem + ".pgm"), grid, lo, hi);
  const json j = {{"min", lo},           {"max", hi},
                  {"zeta_max", grid.zeta_max}, {"h_zeta", grid.h()},
                  {"n", grid.n},         {"R", meta.R},
                  {"c", meta.c},         {"failed_points", grid.failed_count},
                  {"max_imag_residual", imag}};
  write_text(dir / (stem + ".json"), j.dump(2));
}

ReconstructionGrid load_grid(const fs::path& dir, const std::string& stem, GridMeta* meta) {
  const fs::path side = dir / (stem + ".json");
  const json j = parse_json(read_text(side), side.string());
  ReconstructionGrid g = ReconstructionGrid::make(get<double>(j, "zeta_max", side.string()),
                                                  get<int>(j, "n", side.string()));
  g.failed_count = j.value("failed_points", 0);
  if (meta) {
    meta->R = j.value("R", 0.0);
    meta->c = j.value("c", 0);
  }
  std::fill(g.mask.begin(), g.mask.end(), 0);
  const fs::path csv_path = dir / (stem + ".csv");
  std::istringstream in(read_text(csv_path));
  std::string line;
  std::getline(in, line);
  const double h = g.h();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw ConfigError("malformed " + csv_path.string());
    const double x = parse_double(f[0], csv_path), y = parse_double(f[1], csv_path);
    const long ix = std::lround((x + g.zeta_max) / h - 0.5);
    const long iy = std::lround((y + g.zeta_max) / h - 0.5);
    if (ix < 0 || iy < 0 || ix >= g.n || iy >= g.n) throw ConfigError("point outside grid in " + csv_path.string());
    const std::size_t i = g.index(static_cast<int>(ix), static_cast<int>(iy));
    g.values[i] = parse_double(f[2], csv_path);
    g.mask[i] = 1;
  }
  return g;
}

void save_polyline(const fs::path& path, const std::vector<Complex>& points) {
  std::string csv = "x,y\n";
  for (const Complex& p : points) csv += num(p.real()) + ',' + num(p.imag()) + '\n';
  write_text(path, csv);
}

void save_trace_dump(const fs::path& path, const std::vector<CGOTrace>& traces) {
  std::string csv = "k1,k2,branch,theta_index,re_m,im_m\n";
  for (const auto& tr : traces) {
    for (int b = 0; b < 2; ++b) {
      const auto& vals = b == 0 ? tr.plus_values : tr.minus_values;
      for (std::size_t i = 0; i < vals.size(); ++i)
        csv += num(tr.k.real()) + ',' + num(tr.k.imag()) + ',' + (b == 0 ? "plus" : "minus") + ',' +
               std::to_string(i) + ',' + num(vals[i].real()) + ',' + num(vals[i].imag()) + '\n';
    }
  }
  write_text(path, csv);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

}  // namespace adbar::io
