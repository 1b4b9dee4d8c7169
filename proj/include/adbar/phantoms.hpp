#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adbar/types.hpp"

namespace adbar {

enum class ShapeKind { disc, ellipse };

struct Inclusion {
  ShapeKind shape = ShapeKind::disc;
  Point center{0.0, 0.0};
  double semi_a = 0.1;  ///< radius for discs
  double semi_b = 0.1;
  double rotation_rad = 0.0;
  Tensor2 tensor = Tensor2::identity();
};

/// Piecewise-constant anisotropic conductivity on the plane: identity
/// background plus inclusions, optionally blended across a band of width
/// `smoothing_rho` around each interface with a C^2 transition.
///
/// Inclusions are assumed pairwise disjoint (including their transition
/// bands); then every value is a convex combination of SPD tensors.
struct ConductivityField {
  std::string name = "identity";
  double smoothing_rho = 0.0;
  std::vector<Inclusion> inclusions;

  /// Throws InvalidFieldError unless all tensors are SPD and every inclusion
  /// (with its transition band) stays inside the unit disc.
  void validate() const;
};

using TensorFunction = std::function<Tensor2(Point)>;

/// Beltrami-type coefficients of a conductivity value.
struct MuCoefficients {
  Complex mu_tilde;  ///< (s11 - s22 + 2i s12) / (s11 + s22 + 2 sqrt(det))
  Complex mu1;       ///< (s22 - s11 - 2i s12) / (1 + tr + det)
  double mu2;        ///< (1 - det) / (1 + tr + det)
};

/// C^2 blending weight: 1 for d <= -rho/2, 0 for d >= rho/2, where d is the
/// signed distance to the interface (negative inside). rho == 0 gives a step.
double transition_weight(double signed_distance, double rho);

/// Signed (approximate, for ellipses) distance to the boundary of an inclusion.
double signed_distance(const Inclusion& inc, Point z);

Tensor2 evaluate_sigma(const ConductivityField& field, Point z);

/// sigma / det(sigma). Throws InvalidFieldError for det <= 0.
Tensor2 sigma_hat(const Tensor2& sigma);
Tensor2 sigma_hat(const ConductivityField& field, Point z);

MuCoefficients mu_coefficients(const Tensor2& sigma);
MuCoefficients mu_coefficients(const ConductivityField& field, Point z);

/// sqrt(det sigma(z)): the isotropic conductivity in physical coordinates.
double sqrt_det_sigma(const ConductivityField& field, Point z);

TensorFunction as_function(const ConductivityField& field);
/// z -> sigma_hat(field, z).
TensorFunction hat_function(const ConductivityField& field);

namespace phantoms {

inline constexpr double kDefaultRho = 0.05;

ConductivityField identity();

/// Two discs of radius 0.35 at (-0.5, 0) and (0.5, 0) with tensors
/// diag(1, 4) (left) and diag(2, 1) (right).
ConductivityField two_inclusions(double rho = kDefaultRho);

/// Two elliptical lungs diag(0.4, 0.8) and a disc heart diag(6, 2). The
/// positions are approximations of the published figure.
ConductivityField heart_lungs(double rho = kDefaultRho);

/// Isotropic disc of conductivity `gamma` and radius `radius` at the origin.
ConductivityField centered_disc(double gamma, double radius, double rho = 0.0);

/// Names accepted by `builtin`: identity, test1, test2, test2-discontinuous.
std::vector<std::string> builtin_names();

/// Throws ConfigError for unknown names.
ConductivityField builtin(const std::string& name);

}  // namespace phantoms
}  // namespace adbar
