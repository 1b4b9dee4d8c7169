#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "adbar/types.hpp"

namespace adbar::testing {

/// D-N eigenvalue of mode n for the disc with conductivity gamma_in on r < a
/// and 1 on a < r < 1 (separation of variables: u = (r^n + B r^-n) outside).
inline double two_layer_dn_eigenvalue(int n, double gamma_in, double a) {
  const double rho = (1.0 - gamma_in) / (1.0 + gamma_in);
  const double q = rho * std::pow(a, 2 * n);
  return n * (1.0 - q) / (1.0 + q);
}

/// Uniform sample of points in the square [-r, r]^2.
inline std::vector<Point> square_samples(double r, int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.emplace_back(-r + 2.0 * r * (i + 0.5) / n, -r + 2.0 * r * (j + 0.5) / n);
  return pts;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adbar_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace adbar::testing
