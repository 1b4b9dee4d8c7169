#include "adbar/forward.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace adbar {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

void refine(DiscMesh& mesh) {
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(mesh.triangles.size() * 2);
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++edge_count[edge_key(t[e], t[(e + 1) % 3])];

  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(edge_count.size());
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    Point m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    if (edge_count[key] == 1) m /= std::abs(m);  // boundary edge: onto the circle
    const int idx = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(m);
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 3>> children;
  children.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    children.push_back({t[0], ab, ca});
    children.push_back({ab, t[1], bc});
    children.push_back({ca, bc, t[2]});
    children.push_back({ab, bc, ca});
  }
  mesh.triangles = std::move(children);
  ++mesh.level;
}

double angle_of(Point z) {
  const double a = std::arg(z);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

// 6-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 6> kGaussX = {-0.9324695142031521, -0.6612093864662645,
                                           -0.2386191860831969, 0.2386191860831969,
                                           0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kGaussW = {0.1713244923791704, 0.3607615730481386,
                                           0.4679139345726910, 0.4679139345726910,
                                           0.3607615730481386, 0.1713244923791704};

}  // namespace

DiscMesh build_mesh(int refinement_level) {
  if (refinement_level < 0) throw ConfigError("mesh refinement level must be >= 0");
  DiscMesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}};
  for (int l = 0; l < refinement_level; ++l) refine(mesh);

  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
    if (std::abs(std::abs(mesh.vertices[v]) - 1.0) < 1e-12) mesh.boundary.push_back(v);
  std::sort(mesh.boundary.begin(), mesh.boundary.end(), [&](int a, int b) {
    return angle_of(mesh.vertices[a]) < angle_of(mesh.vertices[b]);
  });
  return mesh;
}

double trig_basis(int index, double theta) {
  if (index == 0) return 1.0 / std::sqrt(2.0 * kPi);
  const int m = (index + 1) / 2;
  const double s = 1.0 / std::sqrt(kPi);
  return (index % 2 == 1) ? s * std::cos(m * theta) : s * std::sin(m * theta);
}

struct NeumannSolver::Impl {
  int N = 16;
  int n_vertices = 0;
  std::vector<int> boundary;
  Eigen::MatrixXd loads;  // (2N+1) x n_boundary
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

NeumannSolver::NeumannSolver(const DiscMesh& mesh, const TensorFunction& sigma, int N)
    : impl_(std::make_unique<Impl>()) {
  if (N < 1) throw ConfigError("basis order N must be >= 1");
  auto& im = *impl_;
  im.N = N;
  im.n_vertices = static_cast<int>(mesh.vertices.size());
  im.boundary = mesh.boundary;

  // Stiffness with vertex 0 (the origin) pinned; the zero-mean shift is applied
  // after the solve, which yields the same solution as a mean-zero constraint
  // because every load vector integrates to zero.
  const int n = im.n_vertices - 1;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (const auto& t : mesh.triangles) {
    const Point p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
    const double twice_area =
        (p1 - p0).real() * (p2 - p0).imag() - (p1 - p0).imag() * (p2 - p0).real();
    if (!(twice_area > 0.0)) throw NumericalError("degenerate or inverted triangle", twice_area);
    const Tensor2 s = sigma((p0 + p1 + p2) / 3.0);
    const std::array<Point, 3> p = {p0, p1, p2};
    std::array<double, 3> gx{}, gy{};
    for (int i = 0; i < 3; ++i) {
      const Point pj = p[(i + 1) % 3], pk = p[(i + 2) % 3];
      gx[i] = (pj.imag() - pk.imag()) / twice_area;
      gy[i] = (pk.real() - pj.real()) / twice_area;
    }
    const double area = 0.5 * twice_area;
    for (int i = 0; i < 3; ++i) {
      if (t[i] == 0) continue;
      for (int l = 0; l < 3; ++l) {
        if (t[l] == 0) continue;
        const double sx = s.xx * gx[l] + s.xy * gy[l];
        const double sy = s.xy * gx[l] + s.yy * gy[l];
        trips.emplace_back(t[i] - 1, t[l] - 1, area * (gx[i] * sx + gy[i] * sy));
      }
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  im.llt.compute(K);
  if (im.llt.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");

  // Loads: int phi_m(theta) v_i(theta) dtheta with v_i the boundary hat function,
  // linear in theta on each boundary edge.
  const int nb = static_cast<int>(im.boundary.size());
  im.loads = Eigen::MatrixXd::Zero(2 * N + 1, nb);
  for (int e = 0; e < nb; ++e) {
    const int next = (e + 1) % nb;
    const double ta = angle_of(mesh.vertices[im.boundary[e]]);
    double tb = angle_of(mesh.vertices[im.boundary[next]]);
    if (tb <= ta) tb += 2.0 * kPi;
    const double half = 0.5 * (tb - ta);
    for (std::size_t q = 0; q < kGaussX.size(); ++q) {
      const double theta = ta + half * (kGaussX[q] + 1.0);
      const double wb = (theta - ta) / (tb - ta);
      const double w = kGaussW[q] * half;
      for (int m = 0; m <= 2 * N; ++m) {
        const double f = trig_basis(m, theta) * w;
        im.loads(m, e) += f * (1.0 - wb);
        im.loads(m, next) += f * wb;
      }
    }
  }
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

int NeumannSolver::N() const { return impl_->N; }

const Eigen::MatrixXd& NeumannSolver::boundary_loads() const { return impl_->loads; }

Eigen::VectorXd NeumannSolver::solve(int j) const {
  const auto& im = *impl_;
  if (j < 1 || j > 2 * im.N) throw ConfigError("current pattern index out of range");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(im.n_vertices - 1);
  for (std::size_t b = 0; b < im.boundary.size(); ++b)
    rhs(im.boundary[b] - 1) = im.loads(j, static_cast<Eigen::Index>(b));
  const Eigen::VectorXd reduced = im.llt.solve(rhs);
  Eigen::VectorXd u(im.n_vertices);
  u(0) = 0.0;
  u.tail(im.n_vertices - 1) = reduced;

  double mean = 0.0;
  for (std::size_t b = 0; b < im.boundary.size(); ++b)
    mean += im.loads(0, static_cast<Eigen::Index>(b)) * u(im.boundary[b]);
  u.array() -= mean / im.loads.row(0).sum();
  return u;
}

VoltageTable NeumannSolver::voltage_table(Execution exec) const {
  const auto& im = *impl_;
  VoltageTable table;
  table.N = im.N;
  table.projection = im.loads;
  const int nb = static_cast<int>(im.boundary.size());
  table.voltages.resize(nb, 2 * im.N);
  const int patterns = 2 * im.N;
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (int j = 1; j <= patterns; ++j) {
    const Eigen::VectorXd u = solve(j);
    for (int b = 0; b < nb; ++b) table.voltages(b, j - 1) = u(im.boundary[b]);
  }
  return table;
}

Eigen::VectorXd solve_neumann(const DiscMesh& mesh, const ConductivityField& field, int j, int N) {
  return NeumannSolver(mesh, as_function(field), N).solve(j);
}

Eigen::MatrixXd nd_matrix(const VoltageTable& table) {
  const int n = 2 * table.N + 1;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  R.rightCols(n - 1) = table.projection * table.voltages;
  return R;
}

DNMatrix dn_from_voltages(const VoltageTable& table, double max_condition) {
  const Eigen::MatrixXd R = nd_matrix(table);
  const int n = 2 * table.N;
  const Eigen::MatrixXd block = R.bottomRightCorner(n, n);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= max_condition))
    throw NumericalError("N-D matrix is ill-conditioned (diagnostic: condition number)",
                         cond);
  DNMatrix dn;
  dn.N = table.N;
  dn.L = Eigen::MatrixXd::Zero(n + 1, n + 1);
  dn.L.bottomRightCorner(n, n) = block.partialPivLu().inverse();
  return dn;
}

DNMatrix assemble_dn(const DiscMesh& mesh, const ConductivityField& field, int N, Execution exec) {
  field.validate();
  return dn_from_voltages(NeumannSolver(mesh, as_function(field), N).voltage_table(exec));
}

VoltageTable add_noise(const VoltageTable& table, double eta, std::uint64_t seed) {
  if (eta < 0.0) throw ConfigError("noise level must be >= 0");
  VoltageTable noisy = table;
  if (eta == 0.0) return noisy;
  for (Eigen::Index j = 0; j < table.voltages.cols(); ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = eta * table.voltages.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index b = 0; b < table.voltages.rows(); ++b)
      noisy.voltages(b, j) += scale * normal(rng);
  }
  return noisy;
}

DNMatrix identity_dn(int N) {
  DNMatrix dn;
  dn.N = N;
  dn.L = Eigen::MatrixXd::Zero(2 * N + 1, 2 * N + 1);
  for (int m = 1; m <= N; ++m) {
    dn.L(2 * m - 1, 2 * m - 1) = m;
    dn.L(2 * m, 2 * m) = m;
  }
  return dn;
}

}  // namespace adbar
