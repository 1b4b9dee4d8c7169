#include "adbar/cgo_bie.hpp"

#include <sstream>

namespace adbar {

BieOperator::BieOperator(const HilbertMatrices& H, Branch which, Complex k,
                         const TrigTransform& transform)
    : Pk_(H, which, k, transform), N_(transform.N()) {}

Eigen::VectorXd BieOperator::operator()(const Eigen::VectorXd& x) const {
  return x - Pk_.apply(x) - apply_P0(x);
}

Eigen::MatrixXd BieOperator::dense() const {
  const Eigen::Index n = 2 * (2 * N_ + 1);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    A.col(j) = (*this)(e);
    e(j) = 0.0;
  }
  return A;
}

Eigen::VectorXd BieOperator::rhs() const { return -constant_coefficients(N_); }

namespace {

CGOHalf finish(const BieOperator& op, Eigen::VectorXd coeffs, const TrigTransform& transform,
               int iterations) {
  CGOHalf out;
  const Eigen::VectorXd b = op.rhs();
  out.residual = (op(coeffs) - b).norm() / b.norm();
  out.iterations = iterations;
  out.values = transform.inverse(coeffs);
  out.coefficients = std::move(coeffs);
  return out;
}

}  // namespace

CGOHalf solve_cgo_trace(const HilbertMatrices& H, Complex k, Branch which,
                        const TrigTransform& transform, const GmresOptions& opt) {
  const BieOperator op(H, which, k, transform);
  const Eigen::VectorXd b = op.rhs();
  // M = 1 is the exact solution for sigma = I and a good start otherwise.
  GmresResult r = gmres(op, b, constant_coefficients(transform.N()), opt);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "CGO trace solve did not converge at k = (" << k.real() << ", " << k.imag()
        << "), relative residual " << r.relative_residual << " after " << r.iterations
        << " iterations";
    throw NumericalError(msg.str(), r.relative_residual);
  }
  return finish(op, std::move(r.x), transform, r.iterations);
}

CGOHalf solve_cgo_trace_dense(const HilbertMatrices& H, Complex k, Branch which,
                              const TrigTransform& transform) {
  const BieOperator op(H, which, k, transform);
  Eigen::VectorXd x = op.dense().partialPivLu().solve(op.rhs());
  return finish(op, std::move(x), transform, 0);
}

CGOTrace solve_cgo_traces(const HilbertMatrices& H, Complex k, const TrigTransform& transform,
                          const GmresOptions& opt) {
  CGOHalf plus = solve_cgo_trace(H, k, Branch::plus, transform, opt);
  CGOHalf minus = solve_cgo_trace(H, k, Branch::minus, transform, opt);
  return {k, std::move(plus.values), std::move(minus.values), std::max(plus.residual, minus.residual)};
}

}  // namespace adbar
