#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fve/assembly.hpp"
#include "fve/dualscheme.hpp"
#include "fve/meshgen.hpp"
#include "fve/pdemodel.hpp"
#include "fve/refbasis.hpp"

namespace fve {

// Which correction family a construction uses: Super targets derivative
// accuracy one order above optimal at the dual abscissae and value accuracy
// at the residual roots; Ultra targets derivative accuracy two orders above
// optimal on the dual-abscissa/root tensor grid.
enum class SuperMode { Super, Ultra };

// Corrections b_s (s = 2..k) for one direction of a dual strategy, obtained
// from the (k-1)x(k-1) collocation system at the interior dual abscissae.
// The leading term of the corrected residual polynomial is normalized to 1.
struct CorrectionSet {
  int k = 0;
  std::vector<double> b;    // entry [s-2] is the correction with index s
  double condition = 1.0;   // condition number of the constraint solve
  double residual = 0.0;    // max residual of the solved constraints

  double coeff(int s) const;  // b_s for 2 <= s <= k (0 for k = 1)
};

// Solve sum_{s=2..k} b_s L_{s-1}(alpha_m) = -L_k(alpha_m), m = 1..k-1.
CorrectionSet super_corrections(const DirectionStrategy& dir);

// Same collocation matrix with right-hand side -L_{k+1}(alpha_m).
CorrectionSet ultra_corrections(const DirectionStrategy& dir);

// Residual of the constraint extended to the last abscissa m = k. It
// vanishes (to rounding) when the strategy's moment order r is at least
// k-1 (Super) or k (Ultra).
double extension_residual(const DirectionStrategy& dir, SuperMode mode);

// The one-direction residual polynomial of the corrected interpolant:
// sum_{s=2..k} b_s Mhat_s + Mhat_{k+1} (Super) or ... + Mhat_{k+2} (Ultra),
// expressed in the antiderivative (Mhat) basis. Vanishes at -1 and 1.
Polynomial1D residual_polynomial(const DirectionStrategy& dir, SuperMode mode);

// The k+1 real roots of residual_polynomial(dir, Super), sorted ascending.
// Includes -1 and 1 (snapped exactly). Throws ComplexOrOutOfRangeRoot if
// the point structure degenerates for the given strategy.
std::vector<double> super_points(const DirectionStrategy& dir);

// All reference-element point families of a strategy: derivative points
// (the dual abscissae) and function-value points (residual roots) per
// direction. The ultraconvergence grid for an x-derivative is the tensor
// alpha_x x ps_y (and symmetrically for y), k(k+1) points per element.
struct SuperPointSets {
  std::vector<double> alpha_x, alpha_y;  // derivative points, size k each
  std::vector<double> ps_x, ps_y;        // value points, size k+1 each
};

SuperPointSets point_sets(const DualStrategy& strategy);

void to_json(nlohmann::json& j, const SuperPointSets& p);

// Local expansion of a smooth function on one element in the tensor
// antiderivative basis: u(xhat, yhat) ~ sum b(s,t) Mhat_s(xhat) Mhat_t(yhat)
// for 0 <= s,t <= degree, computed as the L2 projection onto the tensor
// polynomial space of that degree.
struct MDecomposition {
  int degree = 0;
  Eigen::MatrixXd b;  // (degree+1) x (degree+1)

  double eval(double xhat, double yhat) const;
};

MDecomposition mdecompose_element(const ScalarField& u, const RectMesh& mesh,
                                  int i, int j, int degree);

// Nodal values (on the element's tensor Lagrange nodes; row = x index,
// column = y index) of the corrected local interpolant of u on element
// (i,j): the decomposition truncated to the mode's triangular index set
// with the correction strips applied.
Eigen::MatrixXd superclose_local(const ScalarField& u, const RectMesh& mesh,
                                 const DualStrategy& strategy, SuperMode mode,
                                 int i, int j);

// Conforming field obtained by averaging the per-element nodal values at
// shared lattice nodes. Boundary values are kept as constructed (they match
// u to high order, not exactly).
DiscreteField build_superclose(const ScalarField& u, const RectMesh& mesh,
                               const DualStrategy& strategy, SuperMode mode);

DiscreteField build_superclose(const ManufacturedProblem& problem,
                               const RectMesh& mesh,
                               const DualStrategy& strategy, SuperMode mode);

// Largest absolute mismatch of the per-element construction across shared
// element edges, sampled at k+3 points per edge. Decays at the rate of the
// truncation error; exact continuity is not asserted.
double superclose_max_jump(const ScalarField& u, const RectMesh& mesh,
                           const DualStrategy& strategy, SuperMode mode);

// |integral over [-1,1] of the Super residual polynomial|. Zero (to
// rounding) when the strategy satisfies the k-k moment condition; may be
// nonzero for r = k-1 strategies.
double verify_vanishing_means(const DirectionStrategy& dir);

}  // namespace fve
