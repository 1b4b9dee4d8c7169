#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adbar/cgo_bie.hpp"

namespace adbar {

/// Square grid {j h : j in Z^2, -2^{c-1} <= j_i < 2^{c-1}} with h = 2R/2^c.
/// Points are stored row-major with k2 varying slowest.
struct KGrid {
  double R = 6.0;
  int c = 7;

  KGrid() = default;
  KGrid(double radius, int exponent);

  int n() const { return 1 << c; }
  double h() const { return 2.0 * R / n(); }
  std::size_t size() const { return static_cast<std::size_t>(n()) * n(); }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n() + ix; }
  Complex point(int ix, int iy) const { return {(ix - n() / 2) * h(), (iy - n() / 2) * h()}; }
  Complex point(std::size_t idx) const {
    return point(static_cast<int>(idx % n()), static_cast<int>(idx / n()));
  }
  /// Index of k = 0.
  std::size_t origin() const { return index(n() / 2, n() / 2); }
};

struct ScatteringData {
  KGrid grid;
  double truncation_radius = 0.0;
  std::vector<Complex> t;
  std::vector<Complex> tau;
  std::vector<Complex> b1_plus;
  std::vector<Complex> b1_minus;
  std::vector<std::uint8_t> zeroed;  ///< 1 where |k| <= radius but the CGO solve failed
  int zeroed_points = 0;
  double max_residual = 0.0;
  std::vector<std::string> log;
};

struct ScatterOptions {
  double truncation_radius = -1.0;  ///< < 0 means grid.R
  int boundary_points = 256;
  GmresOptions gmres;
};

/// (1/M) sum_n (M(e^{i theta_n}) - 1) e^{i theta_n}.
Complex integrate_b1(std::span<const Complex> trace, const TrigTransform& transform);

/// (conj(b1+) - conj(b1-)) / 2.
Complex tau_from_b1(Complex b1_plus, Complex b1_minus);

/// -4 pi i conj(k) tau.
Complex t_from_tau(Complex k, Complex tau);

/// Whether grid point idx lies inside the truncation disc (and is not k = 0).
bool inside_truncation(const KGrid& grid, std::size_t idx, double radius);

ScatteringData compute_scattering(const HilbertMatrices& H, const KGrid& grid,
                                  const ScatterOptions& opt = {},
                                  Execution exec = Execution::parallel);

/// Restricts data to |k| <= radius (radius <= the original radius).
ScatteringData truncate(const ScatteringData& data, double radius);

}  // namespace adbar
