#pragma once

// Element-wise assembly of the finite-volume-element Petrov-Galerkin
// system (piecewise-constant test functions on the dual sub-cells) and of
// the standard Galerkin FEM system, Dirichlet elimination, sparse solve,
// and evaluation of the discrete field.

#include <Eigen/Sparse>
#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>

#include "fve/dualscheme.hpp"
#include "fve/meshgen.hpp"
#include "fve/pdemodel.hpp"
#include "fve/refbasis.hpp"

namespace fve {

struct SparseSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;  // interior x interior
  Eigen::VectorXd b;

  int n() const { return static_cast<int>(A.rows()); }
};

// A C0 tensor Lagrange function: nodal coefficients over the full lattice
// (boundary entries included, zero for homogeneous Dirichlet solutions).
class DiscreteField {
 public:
  DiscreteField(RectMesh mesh, int k, Eigen::VectorXd coeffs);

  const RectMesh& mesh() const { return mesh_; }
  int k() const { return k_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

  double value(double x, double y) const;
  std::array<double, 2> gradient(double x, double y) const;
  // Same, but with the owning element chosen by the caller; this fixes
  // the one-sided gradient on element edges.
  double value_on_element(int i, int j, double x, double y) const;
  std::array<double, 2> gradient_on_element(int i, int j, double x, double y) const;

  // 1-based element index containing (x,y); points on grid lines go to
  // the element on the right/top (last element for x = 1 or y = 1).
  std::pair<int, int> locate(double x, double y) const;

 private:
  RectMesh mesh_;
  int k_;
  Eigen::VectorXd coeffs_;
  LagrangeBasis1D basis_;
};

// Flux/volume form per sub-cell: row of local trial node (s,t) receives
//   - int_{dual segments bounding sub-cell (s,t)} (D grad phi) . n ds
//   + int_{sub-cell} (Q . grad phi + r phi) dxdy,
// and the load int_{sub-cell} f. Each interior dual line is integrated
// once and scattered with opposite signs to its two flanking rows.
// Integrals use 2k+3 Gauss points per direction.
SparseSystem assemble_fve(const RectMesh& mesh, const DualStrategy& strategy,
                          const ManufacturedProblem& problem);

// Standard Galerkin form int (D grad phi_j).grad phi_i + (Q.grad phi_j +
// r phi_j) phi_i with the same quadrature and elimination policy.
SparseSystem assemble_fem(const RectMesh& mesh, int k,
                          const ManufacturedProblem& problem);

// Same assemblies, but over the full trial-node lattice (boundary rows and
// columns kept). Used for stencil inspection and kernel diagnostics.
SparseSystem assemble_fve_unreduced(const RectMesh& mesh,
                                    const DualStrategy& strategy,
                                    const ManufacturedProblem& problem);

SparseSystem assemble_fem_unreduced(const RectMesh& mesh, int k,
                                    const ManufacturedProblem& problem);

// Sparse LU with iterative refinement down to a relative residual <= tol.
// Throws SolverFailure (carrying the achieved residual) otherwise.
DiscreteField solve(const SparseSystem& system, const RectMesh& mesh, int k,
                    double tol = 1e-12, int max_refine = 5);

// Nodal interpolant; when zero_boundary is set the boundary coefficients
// are forced to exactly zero (appropriate for exact BVP solutions).
DiscreteField interpolate(const RectMesh& mesh, int k, const ScalarField& f,
                          bool zero_boundary = false);

// MatrixMarket coordinate export for external inspection.
void write_matrix_market(const SparseSystem& system, const std::string& path);

}  // namespace fve
