#include "adbar/beltrami.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace adbar {

Complex beltrami_nu(const Tensor2& s) {
  const double det = s.det();
  if (!(det > 0.0) || s.xx <= 0.0) throw InvalidFieldError("beltrami_nu: tensor is not SPD");
  return Complex{s.yy - s.xx, -2.0 * s.xy} / (s.trace() + 2.0 * std::sqrt(det));
}

namespace {

// Antiderivative in y of ln(x^2 + y^2).
double log_primitive(double x, double y) {
  const double r2 = x * x + y * y;
  double v = -2.0 * y;
  if (r2 > 0.0) v += y * std::log(r2);
  if (x != 0.0) v += 2.0 * x * std::atan(y / x);
  return v;
}

}  // namespace

Complex cauchy_cell(Complex m, double h) {
  const double x0 = m.real() - 0.5 * h, x1 = m.real() + 0.5 * h;
  const double y0 = m.imag() - 0.5 * h, y1 = m.imag() + 0.5 * h;
  // d/du log|u|^2 = 1/u, and int_Q d/du f = (int_Q f_x - i int_Q f_y) / 2.
  const double jx = log_primitive(x1, y1) - log_primitive(x1, y0) - log_primitive(x0, y1) +
                    log_primitive(x0, y0);
  const double jy = log_primitive(y1, x1) - log_primitive(y1, x0) - log_primitive(y0, x1) +
                    log_primitive(y0, x0);
  return Complex{jx, -jy} / (2.0 * kPi);
}

Complex beurling_cell(Complex m, double h) {
  if (m == Complex{}) return 0.0;
  const double x0 = m.real() - 0.5 * h, x1 = m.real() + 0.5 * h;
  const double y0 = m.imag() - 0.5 * h, y1 = m.imag() + 0.5 * h;
  const Complex I{0.0, 1.0};
  // -1/u^2 = d/du (1/u); integrate 1/u along the square's edges.
  auto int_dy = [&](double x) { return -I * std::log(Complex{x, y1} / Complex{x, y0}); };
  auto int_dx = [&](double y) { return std::log(Complex{x1, y} / Complex{x0, y}); };
  const Complex ix = int_dy(x1) - int_dy(x0);
  const Complex iy = int_dx(y1) - int_dx(y0);
  return (ix - I * iy) / (2.0 * kPi);
}

QCMap solve_beltrami(const ConductivityField& field, const BeltramiOptions& opt, Execution exec) {
  field.validate();
  if (!(opt.half_width > 1.0)) throw ConfigError("Beltrami grid must contain the unit disc");
  if (opt.n < 8) throw ConfigError("Beltrami grid too small");

  QCMap map;
  map.S = opt.half_width;
  map.n = opt.n;
  const int n = opt.n;
  const double h = map.h();
  const std::size_t cells = static_cast<std::size_t>(n) * n;
  map.nu.assign(cells, 0.0);

#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      map.nu[map.index(ix, iy)] = beltrami_nu(evaluate_sigma(field, map.node(ix, iy)));

  double kappa = 0.0;
  for (const Complex& v : map.nu) kappa = std::max(kappa, std::abs(v));

  map.omega.assign(cells, 0.0);
  if (kappa > 0.0) {
    const detail::PaddedConvolver beurling(
        n, [h](int dx, int dy) { return beurling_cell({dx * h, dy * h}, h); }, 1.0);
    detail::FftBuffer work = beurling.make_work();
    std::vector<Complex> s_omega(cells);
    map.omega = map.nu;
    double change = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
      beurling.convolve(map.omega.data(), s_omega.data(), work);
      change = 0.0;
      for (std::size_t i = 0; i < cells; ++i) {
        const Complex next = map.nu[i] * (1.0 + s_omega[i]);
        change = std::max(change, std::abs(next - map.omega[i]));
        map.omega[i] = next;
      }
      map.iterations = it;
      map.residual = change / kappa;
      if (map.residual <= opt.tolerance) break;
    }
    if (map.residual > opt.tolerance) {
      std::ostringstream msg;
      msg << "Beltrami iteration did not converge: sup|nu| = " << kappa << ", relative change "
          << map.residual << " after " << map.iterations << " iterations";
      throw NumericalError(msg.str(), kappa);
    }
  }

  map.F.assign(cells, 0.0);
  if (kappa > 0.0) {
    const detail::PaddedConvolver cauchy(
        n, [h](int dx, int dy) { return cauchy_cell({dx * h, dy * h}, h); }, 1.0);
    detail::FftBuffer work = cauchy.make_work();
    cauchy.convolve(map.omega.data(), map.F.data(), work);
  }
  Complex total = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t i = map.index(ix, iy);
      map.F[i] += map.node(ix, iy);
      total += map.omega[i];
    }
  map.A_moment = total * h * h / kPi;

  const int ring = 256;
  Complex acc = 0.0;
  for (int j = 0; j < ring; ++j) {
    const Complex z = std::polar(0.5 * map.S, 2.0 * kPi * j / ring);
    acc += (map.evaluate(z) - z) * z;
  }
  map.A = acc / static_cast<double>(ring);
  return map;
}

Complex QCMap::evaluate(Complex z) const {
  const double hh = h();
  const double near = 3.0 * hh;
  Complex sum = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Complex w = omega[index(ix, iy)];
      if (w == Complex{}) continue;
      const Complex u = z - node(ix, iy);
      // The midpoint rule for the harmonic kernel 1/u is exact to O(h^4).
      sum += w * (std::abs(u) < near ? cauchy_cell(u, hh) : hh * hh / (kPi * u));
    }
  }
  return z + sum;
}

Eigen::Matrix2d QCMap::jacobian(int ix, int iy) const {
  const double hh = h();
  const Complex fx = (F[index(ix + 1, iy)] - F[index(ix - 1, iy)]) / (2.0 * hh);
  const Complex fy = (F[index(ix, iy + 1)] - F[index(ix, iy - 1)]) / (2.0 * hh);
  Eigen::Matrix2d D;
  D << fx.real(), fy.real(), fx.imag(), fy.imag();
  return D;
}

double QCMap::min_jacobian() const {
  double m = std::numeric_limits<double>::infinity();
  for (int iy = 1; iy + 1 < n; ++iy)
    for (int ix = 1; ix + 1 < n; ++ix) m = std::min(m, jacobian(ix, iy).determinant());
  return m;
}

ReconstructionGrid true_isotropization(const QCMap& map, const ConductivityField& field,
                                       ReconstructionGrid grid) {
  std::vector<std::uint8_t> covered(grid.size(), 0);
  const double ht = grid.h();
  const int nt = grid.n;
  auto to_index = [&](double v) { return (v + grid.zeta_max) / ht - 0.5; };

  auto raster = [&](const std::array<Complex, 3>& src, const std::array<Complex, 3>& img) {
    const Complex e1 = img[1] - img[0], e2 = img[2] - img[0];
    const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
    if (det == 0.0) return;
    double xmin = img[0].real(), xmax = xmin, ymin = img[0].imag(), ymax = ymin;
    for (const Complex& p : img) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
    const int ix0 = std::max(0, static_cast<int>(std::ceil(to_index(xmin))));
    const int ix1 = std::min(nt - 1, static_cast<int>(std::floor(to_index(xmax))));
    const int iy0 = std::max(0, static_cast<int>(std::ceil(to_index(ymin))));
    const int iy1 = std::min(nt - 1, static_cast<int>(std::floor(to_index(ymax))));
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const std::size_t i = grid.index(ix, iy);
        if (!grid.mask[i] || covered[i]) continue;
        const Complex d = grid.point(ix, iy) - img[0];
        const double b1 = (d.real() * e2.imag() - d.imag() * e2.real()) / det;
        const double b2 = (e1.real() * d.imag() - e1.imag() * d.real()) / det;
        const double tol = -1e-12;
        if (b1 < tol || b2 < tol || b1 + b2 > 1.0 - tol) continue;
        const Complex z = src[0] + b1 * (src[1] - src[0]) + b2 * (src[2] - src[0]);
        grid.values[i] = sqrt_det_sigma(field, z);
        covered[i] = 1;
      }
    }
  };

  for (int iy = 0; iy + 1 < map.n; ++iy) {
    for (int ix = 0; ix + 1 < map.n; ++ix) {
      const Complex z00 = map.node(ix, iy), z10 = map.node(ix + 1, iy);
      const Complex z01 = map.node(ix, iy + 1), z11 = map.node(ix + 1, iy + 1);
      const Complex f00 = map.F[map.index(ix, iy)], f10 = map.F[map.index(ix + 1, iy)];
      const Complex f01 = map.F[map.index(ix, iy + 1)], f11 = map.F[map.index(ix + 1, iy + 1)];
      raster({z00, z10, z11}, {f00, f10, f11});
      raster({z00, z11, z01}, {f00, f11, f01});
    }
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.imag_residual[i] = 0.0;
    grid.failed[i] = 0;
    if (!covered[i]) {
      grid.mask[i] = 0;
      grid.values[i] = 0.0;
    }
  }
  grid.failed_count = 0;
  return grid;
}

std::vector<Complex> deformed_boundary(const QCMap& map, int samples, Execution exec) {
  std::vector<Complex> out(samples);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (int j = 0; j < samples; ++j) out[j] = map.evaluate(std::polar(1.0, 2.0 * kPi * j / samples));
  return out;
}

int winding_number(const std::vector<Complex>& curve, Complex centre) {
  double total = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Complex a = curve[i] - centre;
    const Complex b = curve[(i + 1) % curve.size()] - centre;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

double pushforward_error(const QCMap& map, const ConductivityField& field, double margin) {
  const double band = 0.5 * field.smoothing_rho + margin;
  double worst = 0.0;
  for (int iy = 1; iy + 1 < map.n; ++iy) {
    for (int ix = 1; ix + 1 < map.n; ++ix) {
      const Complex z = map.node(ix, iy);
      bool near_interface = false;
      for (const auto& inc : field.inclusions)
        near_interface = near_interface || std::abs(signed_distance(inc, z)) < band;
      if (near_interface) continue;
      const Tensor2 s = evaluate_sigma(field, z);
      Eigen::Matrix2d sig;
      sig << s.xx, s.xy, s.xy, s.yy;
      const Eigen::Matrix2d D = map.jacobian(ix, iy);
      const Eigen::Matrix2d push = D * sig * D.transpose() / D.determinant();
      const double g = std::sqrt(s.det());
      const double err = (push - g * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() / g;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace adbar
