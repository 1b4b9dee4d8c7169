#include <doctest.h>

#include <array>

#include "adbar/beltrami.hpp"

using namespace adbar;

namespace {

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kNodes{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                       0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                       0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kWeights{0.1894506104550685, 0.1826034150449236,
                                         0.1691565193950025, 0.1495959888165767,
                                         0.1246289712555339, 0.0951585116824928,
                                         0.0622535239386479, 0.0271524594117541};

template <class F>
Complex gauss_square(Complex m, double h, F f) {
  Complex s{};
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double xi = (i < 8 ? -kNodes[7 - i] : kNodes[i - 8]);
      const double wi = (i < 8 ? kWeights[7 - i] : kWeights[i - 8]);
      const double yj = (j < 8 ? -kNodes[7 - j] : kNodes[j - 8]);
      const double wj = (j < 8 ? kWeights[7 - j] : kWeights[j - 8]);
      s += wi * wj * f(m + 0.5 * h * Complex{xi, yj});
    }
  return s * (0.25 * h * h);
}

ConductivityField constant_disc(const Tensor2& t, double a) {
  return {"disc", 0.0, {{ShapeKind::disc, {0.0, 0.0}, a, a, 0.0, t}}};
}

}  // namespace

TEST_CASE("cell kernels match quadrature away from the singularity") {
  const double h = 0.1;
  for (Complex m : {Complex{0.3, 0.0}, Complex{-0.2, 0.25}, Complex{0.05, -0.4}}) {
    CAPTURE(m);
    const Complex c = gauss_square(m, h, [](Complex u) { return 1.0 / (kPi * u); });
    const Complex b = gauss_square(m, h, [](Complex u) { return -1.0 / (kPi * u * u); });
    CHECK(std::abs(cauchy_cell(m, h) - c) <= 1e-10 * std::abs(c));
    CHECK(std::abs(beurling_cell(m, h) - b) <= 1e-8 * std::abs(b));
  }
}

TEST_CASE("cell kernels: symmetry at the centre and far-field limits") {
  const double h = 0.01;
  CHECK(std::abs(cauchy_cell(0.0, h)) <= 1e-15);
  CHECK(beurling_cell(0.0, h) == Complex{});
  const Complex m{3.0, -4.0};
  CHECK(std::abs(cauchy_cell(m, h) - h * h / (kPi * m)) <= 1e-6 * h * h);
  CHECK(std::abs(beurling_cell(m, h) + h * h / (kPi * m * m)) <= 1e-6 * h * h);
}

TEST_CASE("Beltrami coefficient of constant tensors") {
  CHECK(beltrami_nu(Tensor2::identity()) == Complex{});
  CHECK(beltrami_nu(Tensor2::isotropic(3.0)) == Complex{});
  CHECK(beltrami_nu({1.0, 0.0, 4.0}).real() == doctest::Approx(1.0 / 3.0));
  CHECK(beltrami_nu({2.0, 0.0, 1.0}).real() == doctest::Approx(-1.0 / (3.0 + 2.0 * std::sqrt(2.0))));
  const Tensor2 s{1.3, 0.2, 0.7};
  CHECK(std::abs(beltrami_nu(s) + mu_coefficients(s).mu_tilde) <= 1e-15);
}

TEST_CASE("identity conductivity gives the identity map") {
  const auto map = solve_beltrami(phantoms::identity(), {2.0, 64});
  for (int iy = 0; iy < map.n; ++iy)
    for (int ix = 0; ix < map.n; ++ix) CHECK(map.F[map.index(ix, iy)] == map.node(ix, iy));
  CHECK(map.A == Complex{});
}

TEST_CASE("constant anisotropy on a disc is an affine stretch inside") {
  // For constant nu on |z| < a: omega = nu chi, F = z + nu conj(z) inside,
  // z + nu a^2 / z outside, and A = nu a^2.
  const double a = 0.5;
  for (Tensor2 t : {Tensor2{1.0, 0.0, 4.0}, Tensor2{2.0, 0.0, 1.0}}) {
    const Complex nu = beltrami_nu(t);
    const auto map = solve_beltrami(constant_disc(t, a), {2.0, 512});
    double inner = 0.0, outer = 0.0;
    for (int iy = 0; iy < map.n; ++iy)
      for (int ix = 0; ix < map.n; ++ix) {
        const Complex z = map.node(ix, iy);
        const double r = std::abs(z);
        const Complex F = map.F[map.index(ix, iy)];
        if (r < 0.8 * a) inner = std::max(inner, std::abs(F - z - nu * std::conj(z)));
        if (r > 1.2 * a && r < 1.5) outer = std::max(outer, std::abs(F - z - nu * a * a / z));
      }
    CHECK(inner <= 5e-4);
    CHECK(outer <= 1e-3);
    CHECK(std::abs(map.A - nu * a * a) <= 1e-2 * std::abs(nu) * a * a);
    CHECK(std::abs(map.A_moment - nu * a * a) <= 1e-2 * std::abs(nu) * a * a);
    const Complex z{0.1, 0.2};
    CHECK(std::abs(map.evaluate(z) - z - nu * std::conj(z)) <= 5e-4);
    CHECK(map.min_jacobian() > 0.0);
  }
}

TEST_CASE("winding numbers") {
  std::vector<Complex> circle;
  for (int i = 0; i < 100; ++i) circle.push_back(std::polar(1.0, 2.0 * kPi * i / 100));
  CHECK(winding_number(circle) == 1);
  CHECK(winding_number(circle, {2.0, 0.0}) == 0);
  std::vector<Complex> reversed(circle.rbegin(), circle.rend());
  CHECK(winding_number(reversed) == -1);
  std::vector<Complex> twice = circle;
  twice.insert(twice.end(), circle.begin(), circle.end());
  CHECK(winding_number(twice) == 2);
}

TEST_CASE("test1 map is a homeomorphism of the disc") {
  const auto field = phantoms::two_inclusions();
  const auto map = solve_beltrami(field, {2.0, 256});
  CHECK(map.min_jacobian() > 0.0);
  const auto boundary = deformed_boundary(map, 256);
  CHECK(winding_number(boundary) == 1);
  CHECK(map.residual <= 1e-8);
  // away from the interfaces the pushed-forward tensor is isotropic
  CHECK(pushforward_error(map, field, 4.0 * map.h()) <= 0.05);
}

TEST_CASE("isotropization of the unit conductivity is one") {
  const auto map = solve_beltrami(phantoms::identity(), {2.0, 64});
  const auto g = true_isotropization(map, phantoms::identity(), ReconstructionGrid::make(1.0, 16));
  int covered = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) {
      ++covered;
      CHECK(g.values[i] == doctest::Approx(1.0));
    }
  CHECK(covered > 150);
}

TEST_CASE("isotropization of an isotropic disc is the conductivity itself") {
  const auto field = phantoms::centered_disc(2.0, 0.4, 0.0);
  const auto map = solve_beltrami(field, {2.0, 128});
  const auto g = true_isotropization(map, field, ReconstructionGrid::make(1.0, 20));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.mask[i]) {
      const double r = std::abs(g.point(i));
      if (r < 0.35) CHECK(g.values[i] == doctest::Approx(2.0));
      if (r > 0.45) CHECK(g.values[i] == doctest::Approx(1.0));
    }
}

TEST_CASE("serial and parallel solves agree bitwise") {
  const auto field = phantoms::heart_lungs();
  const auto a = solve_beltrami(field, {2.0, 128}, Execution::serial);
  const auto b = solve_beltrami(field, {2.0, 128}, Execution::parallel);
  CHECK(a.F == b.F);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("non-convergence reports sup |nu|") {
  BeltramiOptions opt{2.0, 64};
  opt.max_iterations = 1;
  try {
    solve_beltrami(constant_disc({1.0, 0.0, 4.0}, 0.5), opt);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.diagnostic() == doctest::Approx(1.0 / 3.0));
  }
}
