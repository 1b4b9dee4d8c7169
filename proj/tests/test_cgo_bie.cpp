#include <doctest.h>

#include "adbar/cgo_bie.hpp"

using namespace adbar;

namespace {

const HilbertMatrices& test1_hilbert() {
  static const HilbertMatrices H =
      build_hilbert(assemble_dn(build_mesh(6), phantoms::two_inclusions(), 16));
  return H;
}

double max_deviation(const std::vector<Complex>& v, Complex c) {
  double m = 0.0;
  for (Complex x : v) m = std::max(m, std::abs(x - c));
  return m;
}

}  // namespace

TEST_CASE("unit conductivity gives M = 1 for |k| <= 7") {
  const TrigTransform tr(16, 256);
  const auto H = standard_hilbert(16);
  for (Complex k : {Complex{0.5, 0.0}, Complex{-3.0, 2.0}, Complex{0.0, -5.0}, Complex{4.9, 4.9}}) {
    CAPTURE(k);
    const auto trace = solve_cgo_traces(H, k, tr);
    CHECK(max_deviation(trace.plus_values, 1.0) <= 1e-6);
    CHECK(max_deviation(trace.minus_values, 1.0) <= 1e-6);
    CHECK(trace.gmres_residual <= 1e-8);
  }
}

TEST_CASE("k = 0 gives the constant solution for any conductivity") {
  const TrigTransform tr(16, 256);
  const auto half = solve_cgo_trace(test1_hilbert(), 0.0, Branch::plus, tr);
  CHECK(max_deviation(half.values, 1.0) <= 1e-8);
}

TEST_CASE("matrix-free GMRES agrees with the dense LU solution") {
  const TrigTransform tr(16, 256);
  for (Branch b : {Branch::plus, Branch::minus}) {
    const Complex k{2.0, -1.0};
    const auto it = solve_cgo_trace(test1_hilbert(), k, b, tr, {1e-12, 66, 400});
    const auto lu = solve_cgo_trace_dense(test1_hilbert(), k, b, tr);
    CHECK((it.coefficients - lu.coefficients).norm() <= 1e-9 * lu.coefficients.norm());
    CHECK(it.residual <= 1e-12);
  }
}

TEST_CASE("default solve meets the residual target and is not trivial") {
  const TrigTransform tr(16, 256);
  const auto trace = solve_cgo_traces(test1_hilbert(), {3.0, 1.0}, tr);
  CHECK(trace.gmres_residual <= 1e-8);
  CHECK(max_deviation(trace.plus_values, 1.0) > 1e-3);
  const BieOperator A(test1_hilbert(), Branch::plus, {3.0, 1.0}, tr);
  CHECK((A.dense().col(5) - A(Eigen::VectorXd::Unit(66, 5))).norm() <= 1e-13);
}

TEST_CASE("minus branch equals the plus branch of the swapped Hilbert pair") {
  const TrigTransform tr(16, 256);
  const Complex k{-1.5, 2.5};
  const auto a = solve_cgo_trace(test1_hilbert(), k, Branch::minus, tr);
  const auto b = solve_cgo_trace(test1_hilbert().swapped(), k, Branch::plus, tr);
  CHECK(a.coefficients == b.coefficients);
}

TEST_CASE("reflection symmetry of a y-symmetric conductivity") {
  // sigma(x, -y) = R sigma(x, y) R with R = diag(1, -1) gives
  // M(theta, -conj k) = conj M(-theta, k).
  const TrigTransform tr(16, 256);
  const GmresOptions tight{1e-12, 66, 600};
  const int M = tr.M();
  for (Complex k : {Complex{1.0, 0.0}, Complex{0.6, 0.8}, Complex{-0.3, 2.0}}) {
    CAPTURE(k);
    for (Branch b : {Branch::plus, Branch::minus}) {
      const auto at_k = solve_cgo_trace(test1_hilbert(), k, b, tr, tight);
      const auto at_reflected = solve_cgo_trace(test1_hilbert(), -std::conj(k), b, tr, tight);
      double err = 0.0;
      for (int i = 0; i < M; ++i)
        err = std::max(err, std::abs(at_reflected.values[i] - std::conj(at_k.values[(M - i) % M])));
      CHECK(err <= 1e-10);
    }
  }
}

TEST_CASE("non-convergence is reported with the residual") {
  const TrigTransform tr(16, 256);
  try {
    solve_cgo_trace(test1_hilbert(), {4.0, 3.0}, Branch::plus, tr, {1e-14, 2, 2});
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.diagnostic() > 1e-14);
  }
}
