#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "adbar/phantoms.hpp"
#include "adbar/types.hpp"

namespace adbar {

/// Conforming P1 triangulation of the unit disc. Boundary vertices lie on the
/// circle and are listed counterclockwise starting at angle 0.
struct DiscMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary;
  int level = 0;

  static constexpr int kBaseTriangles = 4;
};

/// Base mesh: the square with corners on the circle, split at the origin.
/// Each level splits every triangle in four; boundary midpoints are pushed
/// radially onto the circle, so boundary vertices stay equiangular.
DiscMesh build_mesh(int refinement_level);

/// Trigonometric basis on the boundary: phi_0 = (2 pi)^{-1/2},
/// phi_{2m-1} = cos(m theta)/sqrt(pi), phi_{2m} = sin(m theta)/sqrt(pi).
double trig_basis(int index, double theta);

/// Boundary voltages of the 2N Neumann solves (one column per current
/// pattern phi_1..phi_2N) together with the projection that maps boundary
/// nodal values to <u, phi_m>, m = 0..2N.
struct VoltageTable {
  int N = 16;
  Eigen::MatrixXd voltages;    ///< n_boundary x 2N
  Eigen::MatrixXd projection;  ///< (2N+1) x n_boundary
};

/// Discrete Dirichlet-to-Neumann matrix in the trigonometric basis.
/// Row and column 0 (the constant function) are zero.
struct DNMatrix {
  int N = 16;
  Eigen::MatrixXd L;

  int size() const { return 2 * N + 1; }
};

/// Factorizes the anisotropic stiffness matrix once and solves the pure
/// Neumann problems div(sigma grad u) = 0, sigma du/dn = phi_j with the
/// normalization int_{boundary} u dS = 0.
class NeumannSolver {
 public:
  NeumannSolver(const DiscMesh& mesh, const TensorFunction& sigma, int N = 16);
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;

  /// Nodal potential for current pattern phi_j, 1 <= j <= 2N.
  Eigen::VectorXd solve(int j) const;

  /// Load vector of phi_m (m = 0..2N) against the boundary hat functions,
  /// integrated exactly in the angle variable.
  const Eigen::MatrixXd& boundary_loads() const;

  /// All 2N solves; independent right-hand sides run concurrently under
  /// Execution::parallel.
  VoltageTable voltage_table(Execution exec = Execution::parallel) const;

  int N() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd solve_neumann(const DiscMesh& mesh, const ConductivityField& field, int j,
                              int N = 16);

/// N-D matrix R (columns 1..2N filled, column 0 zero) from a voltage table.
Eigen::MatrixXd nd_matrix(const VoltageTable& table);

/// Inverts the non-constant block of R. Throws NumericalError carrying the
/// condition number when it exceeds `max_condition`.
DNMatrix dn_from_voltages(const VoltageTable& table, double max_condition = 1e12);

DNMatrix assemble_dn(const DiscMesh& mesh, const ConductivityField& field, int N = 16,
                     Execution exec = Execution::parallel);

/// V^j + eta * N^j * max|V^j| with N^j standard normal, one stream per pattern.
/// eta == 0 returns the table unchanged.
VoltageTable add_noise(const VoltageTable& table, double eta, std::uint64_t seed);

/// Analytic D-N matrix of the unit conductivity: diag(0, 1, 1, 2, 2, ..., N, N).
DNMatrix identity_dn(int N);

}  // namespace adbar
