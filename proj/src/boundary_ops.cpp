#include "adbar/boundary_ops.hpp"

#include <cmath>

namespace adbar {

TrigTransform::TrigTransform(int N, int M) : N_(N), M_(M) {
  if (N < 1) throw ConfigError("basis order N must be >= 1");
  if (M < 2 * N + 1) throw ConfigError("boundary grid must have at least 2N+1 points");
  const int nb = 2 * N + 1;
  theta_.resize(M);
  nodes_.resize(M);
  analysis_.resize(nb, M);
  synthesis_.resize(M, nb);
  const double dtheta = 2.0 * kPi / M;
  for (int i = 0; i < M; ++i) {
    theta_[i] = dtheta * i;
    nodes_[i] = std::polar(1.0, theta_[i]);
    for (int n = 0; n < nb; ++n) {
      const double phi = trig_basis(n, theta_[i]);
      synthesis_(i, n) = phi;
      analysis_(n, i) = phi * dtheta;
    }
  }
}

Eigen::MatrixX2d TrigTransform::forward_block(const Eigen::MatrixX2d& samples) const {
  return analysis_ * samples;
}

Eigen::MatrixX2d TrigTransform::inverse_block(const Eigen::MatrixX2d& coeffs) const {
  return synthesis_ * coeffs;
}

TrigCoefficients TrigTransform::forward(std::span<const Complex> samples) const {
  if (static_cast<int>(samples.size()) != M_) throw ConfigError("sample count mismatch");
  Eigen::MatrixX2d s(M_, 2);
  for (int i = 0; i < M_; ++i) {
    s(i, 0) = samples[i].real();
    s(i, 1) = samples[i].imag();
  }
  const Eigen::MatrixX2d c = forward_block(s);
  TrigCoefficients out(2 * basis_size());
  out << c.col(0), c.col(1);
  return out;
}

std::vector<Complex> TrigTransform::inverse(const TrigCoefficients& coeffs) const {
  const int nb = basis_size();
  if (coeffs.size() != 2 * nb) throw ConfigError("coefficient vector has wrong length");
  Eigen::MatrixX2d c(nb, 2);
  c.col(0) = coeffs.head(nb);
  c.col(1) = coeffs.tail(nb);
  const Eigen::MatrixX2d s = inverse_block(c);
  std::vector<Complex> out(M_);
  for (int i = 0; i < M_; ++i) out[i] = {s(i, 0), s(i, 1)};
  return out;
}

Eigen::MatrixXd build_DT(int N) {
  if (N < 1) throw ConfigError("basis order N must be >= 1");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (int n = 1; n <= N; ++n) {
    D(2 * n - 2, 2 * n - 1) = n;
    D(2 * n - 1, 2 * n - 2) = -n;
  }
  return D;
}

HilbertMatrices build_hilbert(const DNMatrix& dn, double max_condition) {
  const int N = dn.N;
  const int n = 2 * N;
  if (dn.L.rows() != n + 1 || dn.L.cols() != n + 1) throw ConfigError("D-N matrix has wrong size");

  // D_T^{-1} is block diagonal with blocks [[0, -1/n], [1/n, 0]].
  Eigen::MatrixXd DTinv = Eigen::MatrixXd::Zero(n, n);
  for (int m = 1; m <= N; ++m) {
    DTinv(2 * m - 2, 2 * m - 1) = -1.0 / m;
    DTinv(2 * m - 1, 2 * m - 2) = 1.0 / m;
  }
  const Eigen::MatrixXd Ht = DTinv * dn.L.bottomRightCorner(n, n);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ht);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= max_condition))
    throw NumericalError("sigma-Hilbert block is singular (diagnostic: condition number)",
                         cond);

  HilbertMatrices H;
  H.sigma = Eigen::MatrixXd::Zero(n + 1, n + 1);
  H.sigma_hat = Eigen::MatrixXd::Zero(n + 1, n + 1);
  H.sigma.bottomRightCorner(n, n) = Ht;
  H.sigma_hat.bottomRightCorner(n, n) = -Ht.partialPivLu().inverse();
  return H;
}

HilbertMatrices standard_hilbert(int N) { return build_hilbert(identity_dn(N)); }

TrigCoefficients apply_average(const TrigCoefficients& g) {
  const Eigen::Index nb = g.size() / 2;
  TrigCoefficients out = TrigCoefficients::Zero(g.size());
  out(0) = g(0);
  out(nb) = g(nb);
  return out;
}

TrigCoefficients apply_P(const HilbertMatrices& H, Branch which, const TrigCoefficients& g) {
  const Eigen::Index nb = g.size() / 2;
  const auto& on_real = which == Branch::plus ? H.sigma : H.sigma_hat;
  const auto& on_imag = which == Branch::plus ? H.sigma_hat : H.sigma;
  const auto re = g.head(nb);
  const auto im = g.tail(nb);
  TrigCoefficients out(g.size());
  // i * (a + i b) = -b + i a
  out.head(nb) = 0.5 * (re - on_imag * im);
  out.tail(nb) = 0.5 * (im + on_real * re);
  out(0) += 0.5 * g(0);
  out(nb) += 0.5 * g(nb);
  return out;
}

TrigCoefficients apply_P0(const TrigCoefficients& g) {
  // H_0 maps the (cos m, sin m) pair (a, b) to (-b, a).
  const Eigen::Index nb = g.size() / 2;
  auto hilbert0 = [nb](const auto& v) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(nb);
    for (Eigen::Index p = 1; p + 1 < nb + 1; p += 2) {
      h(p) = -v(p + 1);
      h(p + 1) = v(p);
    }
    return h;
  };
  const Eigen::VectorXd re = g.head(nb);
  const Eigen::VectorXd im = g.tail(nb);
  TrigCoefficients out(g.size());
  out.head(nb) = 0.5 * (re - hilbert0(im));
  out.tail(nb) = 0.5 * (im + hilbert0(re));
  out(0) += 0.5 * g(0);
  out(nb) += 0.5 * g(nb);
  return out;
}

ConjugatedProjection::ConjugatedProjection(const HilbertMatrices& H, Branch which, Complex k,
                                           const TrigTransform& transform)
    : H_(&H), which_(which), k_(k), transform_(&transform) {
  if (H.N() != transform.N()) throw ConfigError("Hilbert matrices and transform disagree on N");
  const auto& z = transform.nodes();
  phase_.resize(z.size());
  const Complex ik{-k.imag(), k.real()};
  for (std::size_t i = 0; i < z.size(); ++i) phase_[i] = std::exp(ik * z[i]);
}

Eigen::MatrixX2d ConjugatedProjection::multiply(const Eigen::MatrixX2d& s, bool inverse) const {
  Eigen::MatrixX2d out(s.rows(), 2);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const Complex p = inverse ? 1.0 / phase_[i] : phase_[i];
    const Complex v = Complex{s(i, 0), s(i, 1)} * p;
    out(i, 0) = v.real();
    out(i, 1) = v.imag();
  }
  return out;
}

TrigCoefficients ConjugatedProjection::apply(const TrigCoefficients& g) const {
  const Eigen::Index nb = transform_->basis_size();
  if (g.size() != 2 * nb) throw ConfigError("coefficient vector has wrong length");
  Eigen::MatrixX2d c(nb, 2);
  c.col(0) = g.head(nb);
  c.col(1) = g.tail(nb);

  const Eigen::MatrixX2d shifted = transform_->forward_block(multiply(transform_->inverse_block(c), false));
  TrigCoefficients stacked(2 * nb);
  stacked << shifted.col(0), shifted.col(1);
  const TrigCoefficients projected = apply_P(*H_, which_, stacked);
  c.col(0) = projected.head(nb);
  c.col(1) = projected.tail(nb);
  const Eigen::MatrixX2d back = transform_->forward_block(multiply(transform_->inverse_block(c), true));
  TrigCoefficients out(2 * nb);
  out << back.col(0), back.col(1);
  return out;
}

TrigCoefficients apply_Pk_sigma(const HilbertMatrices& H, Branch which, Complex k,
                                const TrigCoefficients& g, const TrigTransform& transform) {
  return ConjugatedProjection(H, which, k, transform).apply(g);
}

TrigCoefficients constant_coefficients(int N, Complex value) {
  const int nb = 2 * N + 1;
  TrigCoefficients c = TrigCoefficients::Zero(2 * nb);
  const double norm = std::sqrt(2.0 * kPi);  // <1, phi_0>
  c(0) = value.real() * norm;
  c(nb) = value.imag() * norm;
  return c;
}

}  // namespace adbar
