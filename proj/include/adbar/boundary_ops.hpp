#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "adbar/forward.hpp"
#include "adbar/types.hpp"

namespace adbar {

/// Coefficients of a complex boundary function in the trigonometric basis,
/// stacked as [<Re g, phi_0..phi_2N>, <Im g, phi_0..phi_2N>] (length 4N+2).
using TrigCoefficients = Eigen::VectorXd;

/// Which CGO family: `plus` uses H_sigma on real parts, `minus` the roles of
/// H_sigma and H_sigma_hat exchanged.
enum class Branch { plus, minus };

/// Transforms between basis coefficients and samples on the equiangular grid
/// theta_i = 2 pi i / M.
class TrigTransform {
 public:
  TrigTransform(int N, int M);

  int N() const { return N_; }
  int M() const { return M_; }
  int basis_size() const { return 2 * N_ + 1; }

  const std::vector<double>& theta() const { return theta_; }
  /// e^{i theta_i}
  const std::vector<Complex>& nodes() const { return nodes_; }

  /// Trapezoidal projection onto phi_0..phi_2N.
  TrigCoefficients forward(std::span<const Complex> samples) const;
  std::vector<Complex> inverse(const TrigCoefficients& coeffs) const;

  /// Same as forward/inverse but on M x 2 (Re, Im) and (2N+1) x 2 blocks.
  Eigen::MatrixX2d forward_block(const Eigen::MatrixX2d& samples) const;
  Eigen::MatrixX2d inverse_block(const Eigen::MatrixX2d& coeffs) const;

 private:
  int N_;
  int M_;
  std::vector<double> theta_;
  std::vector<Complex> nodes_;
  Eigen::MatrixXd analysis_;   // (2N+1) x M
  Eigen::MatrixXd synthesis_;  // M x (2N+1)
};

/// Tangential derivative in the non-constant basis: block diagonal with
/// blocks [[0, n], [-n, 0]], n = 1..N.
Eigen::MatrixXd build_DT(int N);

/// (2N+1) x (2N+1) matrices of the sigma- and sigma_hat-Hilbert transforms.
/// First row and column are zero in both.
struct HilbertMatrices {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_hat;

  int N() const { return static_cast<int>(sigma.rows() - 1) / 2; }
  /// Swap roles (the Hilbert matrices of sigma_hat).
  HilbertMatrices swapped() const { return {sigma_hat, sigma}; }
};

/// H_sigma = [0 0; 0 D_T^{-1} L], H_sigma_hat = [0 0; 0 -(D_T^{-1} L)^{-1}].
/// Throws NumericalError if D_T^{-1} L is singular to working precision.
HilbertMatrices build_hilbert(const DNMatrix& dn, double max_condition = 1e12);

/// The standard Hilbert transform (sigma = I): cos(n.) -> sin(n.), sin(n.) -> -cos(n.).
HilbertMatrices standard_hilbert(int N);

/// Averaging operator: keeps the phi_0 coefficient of real and imaginary parts.
TrigCoefficients apply_average(const TrigCoefficients& g);

/// P_sigma g = (1/2)(I + i H) g + (1/2) L g, with H acting as H_sigma on the
/// real part and H_sigma_hat on the imaginary part (swapped for `minus`).
TrigCoefficients apply_P(const HilbertMatrices& H, Branch which, const TrigCoefficients& g);

/// Riesz projection P_0 (sigma = I).
TrigCoefficients apply_P0(const TrigCoefficients& g);

/// P^k g = e^{-ikz} P(e^{ikz} g), pointwise products taken on the sample grid.
class ConjugatedProjection {
 public:
  ConjugatedProjection(const HilbertMatrices& H, Branch which, Complex k,
                       const TrigTransform& transform);

  TrigCoefficients apply(const TrigCoefficients& g) const;
  Complex k() const { return k_; }

 private:
  Eigen::MatrixX2d multiply(const Eigen::MatrixX2d& samples, bool inverse) const;

  const HilbertMatrices* H_;
  Branch which_;
  Complex k_;
  const TrigTransform* transform_;
  std::vector<Complex> phase_;  // e^{ik z_i}
};

TrigCoefficients apply_Pk_sigma(const HilbertMatrices& H, Branch which, Complex k,
                                const TrigCoefficients& g, const TrigTransform& transform);

/// Coefficients of the constant function 1.
TrigCoefficients constant_coefficients(int N, Complex value = 1.0);

}  // namespace adbar
