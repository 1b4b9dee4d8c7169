#include "adbar/dbar.hpp"

#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace adbar {

struct DbarWorkspace::Impl {
  explicit Impl(const KGrid& g)
      : conv(
            g.n(),
            [h = g.h()](int dx, int dy) {
              if (dx == 0 && dy == 0) return Complex{};
              return 1.0 / (kPi * Complex{dx * h, dy * h});
            },
            g.h() * g.h()) {}

  detail::PaddedConvolver conv;
};

DbarWorkspace::DbarWorkspace(const ScatteringData& data, DbarOptions opt)
    : grid_(data.grid), opt_(opt), impl_(std::make_unique<Impl>(data.grid)) {
  if (data.t.size() != grid_.size()) throw ConfigError("scattering data does not match its grid");
  tk_.assign(grid_.size(), 0.0);
  for (std::size_t i = 0; i < tk_.size(); ++i) {
    if (i == grid_.origin()) continue;
    tk_[i] = data.t[i] / (4.0 * kPi * std::conj(grid_.point(i)));
  }
}

DbarWorkspace::~DbarWorkspace() = default;
DbarWorkspace::DbarWorkspace(DbarWorkspace&&) noexcept = default;

std::vector<Complex> DbarWorkspace::coefficient(Complex zeta) const {
  std::vector<Complex> T(tk_.size(), 0.0);
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (tk_[i] == Complex{}) continue;
    const Complex k = grid_.point(i);
    // e(zeta, -k) = exp(-i(k zeta + conj(k zeta))) = exp(-2i Re(k zeta))
    T[i] = tk_[i] * std::polar(1.0, -2.0 * (k * zeta).real());
  }
  return T;
}

namespace {

const Complex* as_complex(const Eigen::VectorXd& v) {
  return reinterpret_cast<const Complex*>(v.data());
}
Complex* as_complex(Eigen::VectorXd& v) { return reinterpret_cast<Complex*>(v.data()); }

template <class Convolve>
DbarSolution solve_system(const KGrid& grid, const std::vector<Complex>& T,
                          const GmresOptions& gopt, Complex zeta, Convolve&& convolve) {
  const std::size_t n = T.size();
  std::vector<Complex> f(n), g(n);
  // x -> x - h^2 G * (T conj x); real-linear on R^{2n}.
  auto apply = [&](const Eigen::VectorXd& xv) {
    const Complex* x = as_complex(xv);
    for (std::size_t i = 0; i < n; ++i) f[i] = T[i] * std::conj(x[i]);
    convolve(f.data(), g.data());
    Eigen::VectorXd yv(xv.size());
    Complex* y = as_complex(yv);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - g[i];
    return yv;
  };
  Eigen::VectorXd b(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    b(2 * i) = 1.0;
    b(2 * i + 1) = 0.0;
  }
  GmresResult r = gmres(apply, b, b, gopt);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "D-bar solve did not converge at zeta = (" << zeta.real() << ", " << zeta.imag()
        << "), relative residual " << r.relative_residual;
    throw NumericalError(msg.str(), r.relative_residual);
  }
  DbarSolution s;
  const Complex* x = as_complex(r.x);
  s.M.assign(x, x + n);
  s.M_at_origin = s.M[grid.origin()];
  s.residual = r.relative_residual;
  s.iterations = r.iterations;
  return s;
}

}  // namespace

DbarSolution DbarWorkspace::solve(Complex zeta) const {
  const std::vector<Complex> T = coefficient(zeta);
  detail::FftBuffer work = impl_->conv.make_work();
  return solve_system(grid_, T, opt_.gmres, zeta, [&](const Complex* f, Complex* out) {
    impl_->conv.convolve(f, out, work);
  });
}

DbarSolution DbarWorkspace::solve_direct(Complex zeta) const {
  const std::vector<Complex> T = coefficient(zeta);
  const int n = grid_.n();
  const double h = grid_.h();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < T.size(); ++i)
    if (T[i] != Complex{}) support.push_back(i);
  return solve_system(grid_, T, opt_.gmres, zeta, [&](const Complex* f, Complex* out) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        Complex sum = 0.0;
        for (std::size_t j : support) {
          const int dx = ix - static_cast<int>(j % n);
          const int dy = iy - static_cast<int>(j / n);
          if (dx == 0 && dy == 0) continue;
          sum += f[j] / (kPi * Complex{dx * h, dy * h});
        }
        out[grid_.index(ix, iy)] = h * h * sum;
      }
    }
  });
}

Complex DbarWorkspace::gamma(Complex zeta) const {
  const Complex m0 = solve(zeta).M_at_origin;
  return m0 * m0;
}

ReconstructionGrid ReconstructionGrid::make(double zeta_max, int n) {
  if (!(zeta_max > 0.0)) throw ConfigError("zeta_max must be positive");
  if (n < 1) throw ConfigError("reconstruction grid size must be positive");
  ReconstructionGrid g;
  g.zeta_max = zeta_max;
  g.n = n;
  g.values.assign(g.size(), 0.0);
  g.imag_residual.assign(g.size(), 0.0);
  g.failed.assign(g.size(), 0);
  g.mask.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) g.mask[i] = std::abs(g.point(i)) <= zeta_max;
  return g;
}

ReconstructionGrid ReconstructionGrid::with_spacing(double zeta_max, double h) {
  if (!(h > 0.0)) throw ConfigError("zeta spacing must be positive");
  return make(zeta_max, static_cast<int>(std::lround(2.0 * zeta_max / h)));
}

ReconstructionGrid reconstruct(const DbarWorkspace& ws, ReconstructionGrid grid, Execution exec) {
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.mask[i]) work.push_back(i);

  const auto count = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic, 8) if (exec == Execution::parallel)
  for (std::ptrdiff_t w = 0; w < count; ++w) {
    const std::size_t i = work[w];
    try {
      const Complex g = ws.gamma(grid.point(i));
      grid.values[i] = g.real();
      grid.imag_residual[i] = std::abs(g.imag());
    } catch (const NumericalError&) {
      grid.failed[i] = 1;
    }
  }

  grid.failed_count = 0;
  const int n = grid.n;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t i = grid.index(ix, iy);
      if (!grid.failed[i]) continue;
      ++grid.failed_count;
      double sum = 0.0;
      int used = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
          const std::size_t j = grid.index(jx, jy);
          if (grid.mask[j] && !grid.failed[j]) {
            sum += grid.values[j];
            ++used;
          }
        }
      }
      grid.values[i] = used > 0 ? sum / used : 1.0;
    }
  }
  return grid;
}

Extremum refine_extremum(const DbarWorkspace& ws, Complex start, double step, bool maximize,
                         int levels, int m, Execution exec) {
  Extremum best{start, ws.gamma(start).real()};
  const int side = 2 * m + 1;
  for (int level = 0; level < levels; ++level, step *= 0.5) {
    std::vector<double> vals(static_cast<std::size_t>(side) * side);
    std::vector<std::uint8_t> ok(vals.size(), 0);
    const Complex centre = best.location;
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (int s = 0; s < side * side; ++s) {
      const Complex z = centre + step * Complex(s % side - m, s / side - m);
      try {
        vals[s] = ws.gamma(z).real();
        ok[s] = 1;
      } catch (const NumericalError&) {
      }
    }
    for (int s = 0; s < side * side; ++s) {
      if (!ok[s]) continue;
      const bool better = maximize ? vals[s] > best.value : vals[s] < best.value;
      if (better) best = {centre + step * Complex(s % side - m, s / side - m), vals[s]};
    }
  }
  return best;
}

}  // namespace adbar
