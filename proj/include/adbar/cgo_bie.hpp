#pragma once

#include <vector>

#include "adbar/boundary_ops.hpp"
#include "adbar/krylov.hpp"

namespace adbar {

/// One branch of a CGO boundary trace at fixed k.
struct CGOHalf {
  TrigCoefficients coefficients;
  std::vector<Complex> values;  ///< samples on the transform's boundary grid
  double residual = 0.0;        ///< relative residual of the linear system
  int iterations = 0;
};

/// Boundary traces of M^+ and M^- at one k.
struct CGOTrace {
  Complex k;
  std::vector<Complex> plus_values;
  std::vector<Complex> minus_values;
  double gmres_residual = 0.0;  ///< max over both branches
};

/// The operator I - P^k - P_0 on stacked coefficients.
class BieOperator {
 public:
  BieOperator(const HilbertMatrices& H, Branch which, Complex k, const TrigTransform& transform);

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
  /// Right-hand side -F(1).
  Eigen::VectorXd rhs() const;

 private:
  ConjugatedProjection Pk_;
  int N_;
};

/// Solves (I - P^k - P_0) M = -F(1) matrix-free with restarted GMRES.
/// Throws NumericalError (diagnostic = residual) when GMRES does not converge.
CGOHalf solve_cgo_trace(const HilbertMatrices& H, Complex k, Branch which,
                        const TrigTransform& transform, const GmresOptions& opt = {});

/// Same system assembled densely and solved by LU. Reference for tests.
CGOHalf solve_cgo_trace_dense(const HilbertMatrices& H, Complex k, Branch which,
                              const TrigTransform& transform);

CGOTrace solve_cgo_traces(const HilbertMatrices& H, Complex k, const TrigTransform& transform,
                          const GmresOptions& opt = {});

}  // namespace adbar
