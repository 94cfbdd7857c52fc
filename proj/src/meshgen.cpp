#include "fve/meshgen.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fve/refbasis.hpp"

namespace fve {

double RectMesh::h() const {
  double m = 0.0;
  for (int i = 1; i <= nx(); ++i) m = std::max(m, hx(i));
  for (int j = 1; j <= ny(); ++j) m = std::max(m, hy(j));
  return m;
}

double RectMesh::c1() const {
  const double H = h();
  double worst = 0.0;
  for (int i = 1; i <= nx(); ++i) worst = std::max(worst, H / hx(i));
  for (int j = 1; j <= ny(); ++j) worst = std::max(worst, H / hy(j));
  return worst;
}

void RectMesh::validate(double c1_bound) const {
  if (x.size() < 3 || y.size() < 3)
    throw std::invalid_argument("RectMesh: need at least 2x2 elements");
  if (x.front() != 0.0 || x.back() != 1.0 || y.front() != 0.0 || y.back() != 1.0)
    throw std::invalid_argument("RectMesh: domain must be the unit square");
  for (size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw std::invalid_argument("RectMesh: x coordinates must increase strictly");
  for (size_t j = 1; j < y.size(); ++j)
    if (!(y[j] > y[j - 1]))
      throw std::invalid_argument("RectMesh: y coordinates must increase strictly");
  if (c1() > c1_bound)
    throw std::invalid_argument("RectMesh: quasi-uniformity ratio exceeds bound");
}

RectMesh uniform_mesh(int nx, int ny) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("uniform_mesh: need nx, ny >= 2");
  RectMesh m;
  m.x.resize(nx + 1);
  m.y.resize(ny + 1);
  for (int i = 0; i <= nx; ++i) m.x[i] = static_cast<double>(i) / nx;
  for (int j = 0; j <= ny; ++j) m.y[j] = static_cast<double>(j) / ny;
  m.validate();
  return m;
}

RectMesh perturbed_mesh(int nx, int ny, double delta, unsigned long seed) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("perturbed_mesh: need nx, ny >= 2");
  if (delta < 0.0 || delta >= 0.5)
    throw std::invalid_argument("perturbed_mesh: need 0 <= delta < 1/2");
  RectMesh m = uniform_mesh(nx, ny);
  std::mt19937_64 rng(seed);
  auto draw = [&rng]() {
    // Uniform in [-1,1); explicit mapping keeps the stream portable.
    return 2.0 * ((rng() >> 11) * 0x1p-53) - 1.0;
  };
  for (int i = 1; i < nx; ++i) m.x[i] += draw() * delta / nx;
  for (int j = 1; j < ny; ++j) m.y[j] += draw() * delta / ny;
  // Worst case h/h_min = (1+2*delta)/(1-2*delta); allow it.
  const double bound = std::max(3.0, (1.0 + 2.0 * delta) / (1.0 - 2.0 * delta));
  m.validate(bound + 1e-9);
  return m;
}

namespace {

void check_element_index(const RectMesh& mesh, int i, int j) {
  if (i < 1 || i > mesh.nx() || j < 1 || j > mesh.ny())
    throw std::out_of_range("element index out of range");
}

}  // namespace

Point map_to_element(const RectMesh& mesh, int i, int j, double xhat, double yhat) {
  check_element_index(mesh, i, j);
  return {0.5 * mesh.hx(i) * xhat + 0.5 * (mesh.x[i - 1] + mesh.x[i]),
          0.5 * mesh.hy(j) * yhat + 0.5 * (mesh.y[j - 1] + mesh.y[j])};
}

Point map_from_element(const RectMesh& mesh, int i, int j, double x, double y) {
  check_element_index(mesh, i, j);
  const Point p = {(2.0 * x - (mesh.x[i - 1] + mesh.x[i])) / mesh.hx(i),
                   (2.0 * y - (mesh.y[j - 1] + mesh.y[j])) / mesh.hy(j)};
  const double tol_x = 1e-12 * 2.0 / mesh.hx(i), tol_y = 1e-12 * 2.0 / mesh.hy(j);
  if (p.x < -1.0 - tol_x || p.x > 1.0 + tol_x || p.y < -1.0 - tol_y ||
      p.y > 1.0 + tol_y)
    throw std::invalid_argument("map_from_element: point outside the element");
  return p;
}

ElementDualGeometry element_dual_geometry(const RectMesh& mesh,
                                          const DualStrategy& strategy,
                                          int i, int j) {
  check_element_index(mesh, i, j);
  const int k = strategy.k();
  ElementDualGeometry g;
  g.i = i;
  g.j = j;
  g.ax.resize(k);
  g.ay.resize(k);
  for (int s = 0; s < k; ++s) {
    g.ax[s] = map_to_element(mesh, i, j, strategy.x.alpha[s], -1.0).x;
    g.ay[s] = map_to_element(mesh, i, j, -1.0, strategy.y.alpha[s]).y;
  }
  g.cx.resize(k + 2);
  g.cy.resize(k + 2);
  g.cx.front() = mesh.x[i - 1];
  g.cx.back() = mesh.x[i];
  g.cy.front() = mesh.y[j - 1];
  g.cy.back() = mesh.y[j];
  std::copy(g.ax.begin(), g.ax.end(), g.cx.begin() + 1);
  std::copy(g.ay.begin(), g.ay.end(), g.cy.begin() + 1);
  return g;
}

DofMap global_dof_map(const RectMesh& mesh, int k) {
  if (k < 1) throw std::invalid_argument("global_dof_map: k must be >= 1");
  return DofMap{k, mesh.nx(), mesh.ny()};
}

std::vector<double> trial_node_coords(const std::vector<double>& grid, int k) {
  const auto lob = lobatto_nodes(k);
  const int n = static_cast<int>(grid.size()) - 1;
  std::vector<double> coords(k * n + 1);
  for (int e = 0; e < n; ++e) {
    const double mid = 0.5 * (grid[e] + grid[e + 1]);
    const double half = 0.5 * (grid[e + 1] - grid[e]);
    for (int s = 0; s < k; ++s) coords[k * e + s] = mid + half * lob[s];
  }
  coords.front() = grid.front();
  coords.back() = grid.back();
  return coords;
}

void to_json(nlohmann::json& j, const RectMesh& mesh) {
  j = nlohmann::json{{"x", mesh.x}, {"y", mesh.y}};
}

RectMesh mesh_from_json(const nlohmann::json& j) {
  if (j.contains("x") && j.contains("y")) {
    RectMesh m;
    m.x = j.at("x").get<std::vector<double>>();
    m.y = j.at("y").get<std::vector<double>>();
    m.validate(1e300);  // explicit meshes: only structural checks
    return m;
  }
  const int nx = j.at("nx").get<int>();
  const int ny = j.at("ny").get<int>();
  const double delta = j.value("perturb", 0.0);
  if (delta == 0.0) return uniform_mesh(nx, ny);
  return perturbed_mesh(nx, ny, delta, j.value("seed", 0ul));
}

}  // namespace fve
