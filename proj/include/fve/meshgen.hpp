#pragma once

// Rectangular primary meshes of the unit square, affine element maps,
// per-element dual geometry, and the tensor Lagrange DOF numbering.

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fve/dualscheme.hpp"

namespace fve {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct RectMesh {
  std::vector<double> x;  // N_x+1 grid lines, x.front() = 0, x.back() = 1
  std::vector<double> y;

  int nx() const { return static_cast<int>(x.size()) - 1; }
  int ny() const { return static_cast<int>(y.size()) - 1; }
  // Element indices are 1-based: element (i,j) = [x_{i-1},x_i]x[y_{j-1},y_j].
  double hx(int i) const { return x[i] - x[i - 1]; }
  double hy(int j) const { return y[j] - y[j - 1]; }
  double h() const;   // max cell extent
  double c1() const;  // quasi-uniformity ratio max(h/h_i^x, h/h_j^y)
  void validate(double c1_bound = 3.0) const;
};

RectMesh uniform_mesh(int nx, int ny);

// Interior grid lines jittered by independent uniform draws in
// [-delta/N, delta/N]; delta < 1/2 keeps the ordering. Deterministic
// given seed (raw 64-bit generator output mapped to [0,1) explicitly, so
// meshes are reproducible across platforms).
RectMesh perturbed_mesh(int nx, int ny, double delta, unsigned long seed);

// Affine map of [-1,1]^2 onto element (i,j) and its inverse. The inverse
// rejects points beyond 1e-12 outside the closed element.
Point map_to_element(const RectMesh& mesh, int i, int j, double xhat, double yhat);
Point map_from_element(const RectMesh& mesh, int i, int j, double x, double y);

// Physical dual geometry of one element: the k dual abscissae per
// direction and the k+2 sub-cell cut coordinates (element edges plus
// dual lines). Sub-cell (s,t) = [cx[s], cx[s+1]] x [cy[t], cy[t+1]] is the
// control-volume piece of local trial node (s,t); the 2k interior dual
// lines carry the flux integrals.
struct ElementDualGeometry {
  int i = 0, j = 0;
  std::vector<double> ax, ay;  // k dual abscissae, strictly inside
  std::vector<double> cx, cy;  // k+2 cuts including the element edges
};

ElementDualGeometry element_dual_geometry(const RectMesh& mesh,
                                          const DualStrategy& strategy,
                                          int i, int j);

// Row-major numbering of the (k*nx+1)(k*ny+1) tensor Lagrange nodes with
// a boundary mask; interior nodes get a contiguous secondary numbering
// for the eliminated system.
struct DofMap {
  int k = 0, nx = 0, ny = 0;

  int nodes_x() const { return k * nx + 1; }
  int nodes_y() const { return k * ny + 1; }
  int total() const { return nodes_x() * nodes_y(); }
  int interior_count() const { return (nodes_x() - 2) * (nodes_y() - 2); }
  int node(int I, int J) const { return J * nodes_x() + I; }
  bool is_boundary(int I, int J) const {
    return I == 0 || J == 0 || I == nodes_x() - 1 || J == nodes_y() - 1;
  }
  // -1 for boundary nodes.
  int interior_index(int I, int J) const {
    return is_boundary(I, J) ? -1 : (J - 1) * (nodes_x() - 2) + (I - 1);
  }
  // Global node of local node (s,t) in element (i,j) (all but (i,j) 0-based).
  int global_node(int i, int j, int s, int t) const {
    return node(k * (i - 1) + s, k * (j - 1) + t);
  }
};

DofMap global_dof_map(const RectMesh& mesh, int k);

// Physical coordinates of the 1D trial-node lattice (Lobatto points per
// element, shared endpoints counted once).
std::vector<double> trial_node_coords(const std::vector<double>& grid, int k);

// {"x": [...], "y": [...]} or {"nx":, "ny":, "perturb":, "seed":}.
void to_json(nlohmann::json& j, const RectMesh& mesh);
RectMesh mesh_from_json(const nlohmann::json& j);

}  // namespace fve
