#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace adbar {

struct GmresOptions {
  double tolerance = 1e-8;  ///< on ||b - Ax|| / ||b||
  int restart = 40;
  int max_iterations = 400;
};

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES for a real-linear operator on R^n (Euclidean inner product).
/// `apply(const Eigen::VectorXd&) -> Eigen::VectorXd`.
template <class Operator>
GmresResult gmres(const Operator& apply, const Eigen::VectorXd& b, Eigen::VectorXd x0,
                  const GmresOptions& opt = {}) {
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x = Eigen::VectorXd::Zero(b.size());
    res.converged = true;
    return res;
  }
  if (x0.size() != b.size()) x0 = Eigen::VectorXd::Zero(b.size());
  res.x = std::move(x0);

  const int m = std::max(1, opt.restart);
  std::vector<Eigen::VectorXd> V(m + 1);
  Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  Eigen::VectorXd r = b - apply(res.x);
  double beta = r.norm();
  res.relative_residual = beta / bnorm;
  if (res.relative_residual <= opt.tolerance) {
    res.converged = true;
    return res;
  }

  while (res.iterations < opt.max_iterations) {
    V[0] = r / beta;
    g.setZero();
    g(0) = beta;
    Hm.setZero();
    int j = 0;
    for (; j < m && res.iterations < opt.max_iterations; ++j) {
      ++res.iterations;
      Eigen::VectorXd w = apply(V[j]);
      for (int i = 0; i <= j; ++i) {
        Hm(i, j) = V[i].dot(w);
        w -= Hm(i, j) * V[i];
      }
      Hm(j + 1, j) = w.norm();
      const bool breakdown = Hm(j + 1, j) <= 1e-14 * bnorm;
      if (!breakdown) V[j + 1] = w / Hm(j + 1, j);

      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * Hm(i, j) + sn(i) * Hm(i + 1, j);
        Hm(i + 1, j) = -sn(i) * Hm(i, j) + cs(i) * Hm(i + 1, j);
        Hm(i, j) = t;
      }
      const double rr = std::hypot(Hm(j, j), Hm(j + 1, j));
      cs(j) = rr == 0.0 ? 1.0 : Hm(j, j) / rr;
      sn(j) = rr == 0.0 ? 0.0 : Hm(j + 1, j) / rr;
      Hm(j, j) = rr;
      Hm(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      res.relative_residual = std::abs(g(j + 1)) / bnorm;
      if (res.relative_residual <= opt.tolerance || breakdown) {
        ++j;
        break;
      }
    }

    const Eigen::VectorXd y =
        Hm.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) res.x += y(i) * V[i];

    r = b - apply(res.x);
    beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= opt.tolerance) {
      res.converged = true;
      return res;
    }
    if (beta == 0.0) break;
  }
  res.converged = res.relative_residual <= opt.tolerance;
  return res;
}

}  // namespace adbar
