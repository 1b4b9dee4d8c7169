#include "adbar/phantoms.hpp"

#include <algorithm>
#include <cmath>

namespace adbar {

namespace {

void check_spd(const Tensor2& t, const std::string& where) {
  if (!std::isfinite(t.xx) || !std::isfinite(t.xy) || !std::isfinite(t.yy))
    throw InvalidFieldError(where + ": non-finite tensor entry");
  if (t.xx <= 0.0 || t.det() <= 0.0)
    throw InvalidFieldError(where + ": tensor is not positive definite");
}

// Farthest point of the inclusion (plus half the transition band) from the origin.
double outer_radius(const Inclusion& inc, double rho) {
  return std::abs(inc.center) + std::max(inc.semi_a, inc.semi_b) + 0.5 * rho;
}

}  // namespace

void ConductivityField::validate() const {
  if (!(smoothing_rho >= 0.0)) throw InvalidFieldError("smoothing_rho must be >= 0");
  for (std::size_t i = 0; i < inclusions.size(); ++i) {
    const auto& inc = inclusions[i];
    const std::string where = name + " inclusion " + std::to_string(i);
    check_spd(inc.tensor, where);
    if (!(inc.semi_a > 0.0) || !(inc.semi_b > 0.0))
      throw InvalidFieldError(where + ": semi-axes must be positive");
    if (outer_radius(inc, smoothing_rho) >= 1.0)
      throw InvalidFieldError(where + ": conductivity must equal the identity near the boundary");
  }
}

double transition_weight(double d, double rho) {
  if (rho <= 0.0) return d <= 0.0 ? 1.0 : 0.0;
  const double half = 0.5 * rho;
  if (d <= -half) return 1.0;
  if (d >= half) return 0.0;
  const double t = (half - d) / rho;  // 0 at the outer edge, 1 at the inner edge
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double signed_distance(const Inclusion& inc, Point z) {
  const Point local = (z - inc.center) * std::polar(1.0, -inc.rotation_rad);
  if (inc.shape == ShapeKind::disc) return std::abs(local) - inc.semi_a;
  const double s = std::hypot(local.real() / inc.semi_a, local.imag() / inc.semi_b);
  return (s - 1.0) * std::min(inc.semi_a, inc.semi_b);
}

Tensor2 evaluate_sigma(const ConductivityField& field, Point z) {
  Tensor2 sigma = Tensor2::identity();
  if (std::norm(z) >= 1.0) return sigma;
  for (const auto& inc : field.inclusions) {
    const double w = transition_weight(signed_distance(inc, z), field.smoothing_rho);
    if (w > 0.0) sigma = sigma + (inc.tensor - Tensor2::identity()) * w;
  }
  return sigma;
}

Tensor2 sigma_hat(const Tensor2& sigma) {
  const double d = sigma.det();
  if (!(d > 0.0)) throw InvalidFieldError("sigma_hat: non-positive determinant");
  return sigma * (1.0 / d);
}

Tensor2 sigma_hat(const ConductivityField& field, Point z) {
  return sigma_hat(evaluate_sigma(field, z));
}

MuCoefficients mu_coefficients(const Tensor2& s) {
  const double det = s.det();
  if (!(det > 0.0) || s.xx <= 0.0) throw InvalidFieldError("mu_coefficients: tensor is not SPD");
  const double tr = s.trace();
  const Complex aniso{s.xx - s.yy, 2.0 * s.xy};
  const double denom = 1.0 + tr + det;
  return {aniso / (tr + 2.0 * std::sqrt(det)), -aniso / denom, (1.0 - det) / denom};
}

MuCoefficients mu_coefficients(const ConductivityField& field, Point z) {
  return mu_coefficients(evaluate_sigma(field, z));
}

double sqrt_det_sigma(const ConductivityField& field, Point z) {
  return std::sqrt(evaluate_sigma(field, z).det());
}

TensorFunction as_function(const ConductivityField& field) {
  return [field](Point z) { return evaluate_sigma(field, z); };
}

TensorFunction hat_function(const ConductivityField& field) {
  return [field](Point z) { return sigma_hat(field, z); };
}

namespace phantoms {

ConductivityField identity() { return {"identity", 0.0, {}}; }

ConductivityField two_inclusions(double rho) {
  ConductivityField f{"test1", rho, {}};
  f.inclusions.push_back({ShapeKind::disc, {-0.5, 0.0}, 0.35, 0.35, 0.0, {1.0, 0.0, 4.0}});
  f.inclusions.push_back({ShapeKind::disc, {0.5, 0.0}, 0.35, 0.35, 0.0, {2.0, 0.0, 1.0}});
  return f;
}

ConductivityField heart_lungs(double rho) {
  ConductivityField f{rho > 0.0 ? "test2" : "test2-discontinuous", rho, {}};
  const Tensor2 lung{0.4, 0.0, 0.8};
  f.inclusions.push_back({ShapeKind::ellipse, {-0.5, 0.05}, 0.2, 0.4, 0.0, lung});
  f.inclusions.push_back({ShapeKind::ellipse, {0.5, 0.05}, 0.2, 0.4, 0.0, lung});
  f.inclusions.push_back({ShapeKind::disc, {0.0, -0.15}, 0.22, 0.22, 0.0, {6.0, 0.0, 2.0}});
  return f;
}

ConductivityField centered_disc(double gamma, double radius, double rho) {
  ConductivityField f{"centered-disc", rho, {}};
  f.inclusions.push_back(
      {ShapeKind::disc, {0.0, 0.0}, radius, radius, 0.0, Tensor2::isotropic(gamma)});
  return f;
}

std::vector<std::string> builtin_names() {
  return {"identity", "test1", "test2", "test2-discontinuous"};
}

ConductivityField builtin(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "test1") return two_inclusions();
  if (name == "test2") return heart_lungs();
  if (name == "test2-discontinuous") return heart_lungs(0.0);
  throw ConfigError("unknown builtin phantom '" + name + "'");
}

}  // namespace phantoms
}  // namespace adbar
