#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "adbar/krylov.hpp"
#include "adbar/scattering.hpp"

namespace adbar {

struct DbarOptions {
  GmresOptions gmres{1e-7, 30, 300};
};

/// Solution of the truncated D-bar equation at one zeta.
struct DbarSolution {
  std::vector<Complex> M;  ///< on the k-grid, same ordering as KGrid
  Complex M_at_origin;
  double residual = 0.0;
  int iterations = 0;
};

/// Precomputed data shared by all zeta solves: the transformed fundamental
/// solution 1/(pi k) (zero at k = 0) on the zero-padded grid and t(k)/(4 pi conj k)
/// (zero at k = 0). Immutable after construction.
class DbarWorkspace {
 public:
  explicit DbarWorkspace(const ScatteringData& data, DbarOptions opt = {});
  ~DbarWorkspace();
  DbarWorkspace(DbarWorkspace&&) noexcept;

  const KGrid& grid() const { return grid_; }
  const DbarOptions& options() const { return opt_; }
  const std::vector<Complex>& t_over_kbar() const { return tk_; }

  /// Throws NumericalError when GMRES fails.
  DbarSolution solve(Complex zeta) const;
  /// gamma_R(zeta) = M_R(zeta, 0)^2 (complex; imaginary part is a consistency residual).
  Complex gamma(Complex zeta) const;

  /// Same system solved with the convolution evaluated by direct summation.
  /// O(n^4); reference for small grids only.
  DbarSolution solve_direct(Complex zeta) const;

 private:
  std::vector<Complex> coefficient(Complex zeta) const;

  struct Impl;
  KGrid grid_;
  DbarOptions opt_;
  std::vector<Complex> tk_;
  std::unique_ptr<Impl> impl_;
};

/// Square grid of cell centers over [-zeta_max, zeta_max]^2, masked to
/// |zeta| <= zeta_max.
struct ReconstructionGrid {
  double zeta_max = 1.2;
  int n = 256;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  std::vector<double> imag_residual;
  std::vector<std::uint8_t> failed;
  int failed_count = 0;

  static ReconstructionGrid make(double zeta_max, int n);
  /// n = round(2 zeta_max / h).
  static ReconstructionGrid with_spacing(double zeta_max, double h);

  double h() const { return 2.0 * zeta_max / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }
  Complex point(int ix, int iy) const {
    return {-zeta_max + (ix + 0.5) * h(), -zeta_max + (iy + 0.5) * h()};
  }
  Complex point(std::size_t idx) const {
    return point(static_cast<int>(idx % n), static_cast<int>(idx / n));
  }
};

/// gamma_R at every masked point. Failed solves are flagged and filled with the
/// mean of their successful neighbours.
ReconstructionGrid reconstruct(const DbarWorkspace& ws, ReconstructionGrid grid,
                               Execution exec = Execution::parallel);

struct Extremum {
  Complex location;
  double value = 0.0;
};

/// Local search for an extremum of gamma_R: evaluates a (2m+1)^2 stencil of
/// spacing `step` around `start`, recentres on the best point, and halves the
/// step `levels` times.
Extremum refine_extremum(const DbarWorkspace& ws, Complex start, double step, bool maximize,
                         int levels = 3, int m = 2, Execution exec = Execution::parallel);

}  // namespace adbar
