#pragma once

#include <vector>

#include "adbar/dbar.hpp"
#include "adbar/phantoms.hpp"

namespace adbar {

struct BeltramiOptions {
  double half_width = 2.0;  ///< grid covers [-S, S]^2
  int n = 1024;             ///< cells per axis
  double tolerance = 1e-8;
  int max_iterations = 500;
};

/// Quasiconformal map F = z + C(omega) normalised at infinity, sampled at the
/// cell centres of a uniform grid. omega = dbar F is piecewise constant on cells.
struct QCMap {
  double S = 2.0;
  int n = 0;
  std::vector<Complex> F;
  std::vector<Complex> omega;
  std::vector<Complex> nu;  ///< Beltrami coefficient of F
  Complex A;                ///< from (F - z) z averaged on |z| = S/2
  Complex A_moment;         ///< (1/pi) integral of omega
  int iterations = 0;
  double residual = 0.0;

  double h() const { return 2.0 * S / n; }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }
  Complex node(int ix, int iy) const { return {-S + (ix + 0.5) * h(), -S + (iy + 0.5) * h()}; }

  /// F at an arbitrary point by summing the cell integrals of the Cauchy kernel.
  Complex evaluate(Complex z) const;
  /// Real Jacobian [[dRe F/dx, dRe F/dy], [dIm F/dx, dIm F/dy]] at an interior
  /// node by central differences.
  Eigen::Matrix2d jacobian(int ix, int iy) const;
  /// Smallest finite-difference Jacobian determinant over interior nodes.
  double min_jacobian() const;
};

/// Beltrami coefficient nu with dbar F = nu dF pushing sigma forward to an
/// isotropic tensor: nu = (s22 - s11 - 2i s12) / (tr + 2 sqrt(det)) = -mu_tilde.
Complex beltrami_nu(const Tensor2& sigma);

/// Exact integral (1/pi) int_Q du / u over the axis-aligned square of side h
/// centred at m.
Complex cauchy_cell(Complex m, double h);
/// Exact principal-value integral (-1/pi) int_Q du / u^2 over the same square.
Complex beurling_cell(Complex m, double h);

/// Solves omega = nu (1 + S omega) by fixed-point iteration with cell-exact
/// Cauchy and Beurling kernels applied through zero-padded FFT convolution.
/// Throws NumericalError (diagnostic = sup |nu|) on non-convergence.
QCMap solve_beltrami(const ConductivityField& field, const BeltramiOptions& opt = {},
                     Execution exec = Execution::parallel);

/// sqrt(det sigma) at F^{-1}(zeta) on the grid's cells. Points not covered by
/// the image of the sample grid are removed from the mask.
ReconstructionGrid true_isotropization(const QCMap& map, const ConductivityField& field,
                                       ReconstructionGrid grid);

/// F on `samples` equiangular points of the unit circle.
std::vector<Complex> deformed_boundary(const QCMap& map, int samples = 512,
                                       Execution exec = Execution::parallel);

/// Winding number of a closed polyline about `centre`.
int winding_number(const std::vector<Complex>& curve, Complex centre = 0.0);

/// Sup over interior nodes at distance > margin from every inclusion interface
/// of |(1/J) DF sigma DF^T - sqrt(det sigma) I| / sqrt(det sigma) (entrywise max).
double pushforward_error(const QCMap& map, const ConductivityField& field, double margin);

}  // namespace adbar
