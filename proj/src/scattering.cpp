#include "adbar/scattering.hpp"

#include <sstream>

namespace adbar {

KGrid::KGrid(double radius, int exponent) : R(radius), c(exponent) {
  if (!(radius > 0.0)) throw ConfigError("k-grid radius must be positive");
  if (exponent < 1 || exponent > 12) throw ConfigError("k-grid exponent must be in [1, 12]");
}

Complex integrate_b1(std::span<const Complex> trace, const TrigTransform& transform) {
  const auto& z = transform.nodes();
  if (trace.size() != z.size()) throw ConfigError("trace length does not match boundary grid");
  Complex sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += (trace[i] - 1.0) * z[i];
  return sum / static_cast<double>(z.size());
}

Complex tau_from_b1(Complex b1_plus, Complex b1_minus) {
  return 0.5 * (std::conj(b1_plus) - std::conj(b1_minus));
}

Complex t_from_tau(Complex k, Complex tau) {
  return Complex{0.0, -4.0 * kPi} * std::conj(k) * tau;
}

bool inside_truncation(const KGrid& grid, std::size_t idx, double radius) {
  if (idx == grid.origin()) return false;
  return std::abs(grid.point(idx)) <= radius;
}

ScatteringData compute_scattering(const HilbertMatrices& H, const KGrid& grid,
                                  const ScatterOptions& opt, Execution exec) {
  const TrigTransform transform(H.N(), opt.boundary_points);
  ScatteringData out;
  out.grid = grid;
  out.truncation_radius = opt.truncation_radius < 0.0 ? grid.R : opt.truncation_radius;
  const std::size_t n = grid.size();
  out.t.assign(n, 0.0);
  out.tau.assign(n, 0.0);
  out.b1_plus.assign(n, 0.0);
  out.b1_minus.assign(n, 0.0);
  out.zeroed.assign(n, 0);
  std::vector<double> residual(n, 0.0);
  std::vector<std::string> failure(n);

  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < n; ++i)
    if (inside_truncation(grid, i, out.truncation_radius)) work.push_back(i);

  const auto count = static_cast<std::ptrdiff_t>(work.size());
#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::parallel)
  for (std::ptrdiff_t w = 0; w < count; ++w) {
    const std::size_t i = work[w];
    const Complex k = grid.point(i);
    try {
      const CGOTrace tr = solve_cgo_traces(H, k, transform, opt.gmres);
      out.b1_plus[i] = integrate_b1(tr.plus_values, transform);
      out.b1_minus[i] = integrate_b1(tr.minus_values, transform);
      out.tau[i] = tau_from_b1(out.b1_plus[i], out.b1_minus[i]);
      out.t[i] = t_from_tau(k, out.tau[i]);
      residual[i] = tr.gmres_residual;
    } catch (const NumericalError& e) {
      out.zeroed[i] = 1;
      residual[i] = e.diagnostic();
      failure[i] = e.what();
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (out.zeroed[i]) {
      ++out.zeroed_points;
      out.log.push_back(failure[i] + "; t set to 0");
    } else {
      out.max_residual = std::max(out.max_residual, residual[i]);
    }
  }
  return out;
}

ScatteringData truncate(const ScatteringData& data, double radius) {
  if (radius > data.truncation_radius)
    throw ConfigError("cannot truncate scattering data to a larger radius");
  ScatteringData out = data;
  out.truncation_radius = radius;
  out.zeroed_points = 0;
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    if (inside_truncation(out.grid, i, radius)) {
      out.zeroed_points += out.zeroed[i];
      continue;
    }
    out.t[i] = out.tau[i] = out.b1_plus[i] = out.b1_minus[i] = 0.0;
    out.zeroed[i] = 0;
  }
  return out;
}

}  // namespace adbar
