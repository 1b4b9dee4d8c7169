#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace adbar {

using Complex = std::complex<double>;

/// Points of the plane are identified with complex numbers z = x1 + i x2.
using Point = Complex;

inline constexpr double kPi = 3.14159265358979323846;

/// How data-parallel loops are executed. `serial` is the reference path the
/// tests compare the OpenMP path against.
enum class Execution { serial, parallel };

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
struct Tensor2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  static constexpr Tensor2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr Tensor2 isotropic(double g) { return {g, 0.0, g}; }

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }

  Tensor2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
  Tensor2 operator+(const Tensor2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Tensor2 operator-(const Tensor2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  bool operator==(const Tensor2&) const = default;
};

/// Malformed conductivity (non-SPD tensor, non-positive determinant, bad shape).
class InvalidFieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver breakdown: singular systems, Krylov non-convergence, ill-conditioned data.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double diagnostic = 0.0)
      : std::runtime_error(what), diagnostic_(diagnostic) {}

  /// Residual, condition estimate or contraction factor, depending on the thrower.
  double diagnostic() const { return diagnostic_; }

 private:
  double diagnostic_;
};

/// Invalid configuration, arguments or input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adbar
