#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fve/assembly.hpp"
#include "fve/dualscheme.hpp"
#include "fve/meshgen.hpp"
#include "fve/pdemodel.hpp"
#include "fve/superstruct.hpp"

namespace fve {

// One convergence-study row: mesh size, unknown count, timing, and the
// requested norm values keyed by name.
struct ErrorReport {
  double h = 0.0;
  int dofs = 0;
  double wall_seconds = 0.0;
  std::map<std::string, double> norms;
};

// Pointwise error closure evaluated from a designated element, so values on
// element edges and interior dual lines are one-sided and unambiguous.
using ElementFn = std::function<double(int i, int j, double x, double y)>;

ElementFn make_value_error(const ManufacturedProblem& problem,
                           const DiscreteField& field);
ElementFn make_dx_error(const ManufacturedProblem& problem,
                        const DiscreteField& field);
ElementFn make_dy_error(const ManufacturedProblem& problem,
                        const DiscreteField& field);

// Derivative-superconvergence norm: per element, the squared x-derivative
// error on the k vertical dual lines is integrated in y (Gauss, 2k+3
// points) and weighted by the element width.
double norm_h1x_super(const ElementFn& dx_error, const RectMesh& mesh,
                      const DualStrategy& strategy);

// Function-value norm on the tensor grid of residual-polynomial roots,
// weighted |K|/(k+1)^2 so that e == c gives c on the unit square.
double norm_l2_super(const ElementFn& value_error, const RectMesh& mesh,
                     const DualStrategy& strategy);

// Derivative norm on the tensor grid (dual abscissae in x) x (value points
// in y), weighted |K|/(k(k+1)).
double norm_h1x_ultra(const ElementFn& dx_error, const RectMesh& mesh,
                      const DualStrategy& strategy);

struct GlobalNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

// Standard L2 and H1-seminorm of the error by element-wise Gauss
// quadrature with 2k+3 points per direction.
GlobalNorms global_norms(const ElementFn& value_error, const ElementFn& dx_error,
                         const ElementFn& dy_error, const RectMesh& mesh,
                         int k);

// Element-wise L2/H1 distance between the discrete solution and the
// per-element corrected interpolant (no averaging across edges, so the
// measurement is not polluted by the merge).
GlobalNorms superclose_gap_norms(const DiscreteField& uh, const ScalarField& u,
                                 const DualStrategy& strategy, SuperMode mode);

// Observed convergence orders between consecutive reports:
// log(e_prev/e_cur)/log(h_prev/h_cur). The first entry per norm is empty,
// as is any entry whose errors vanish or are not finite.
std::map<std::string, std::vector<std::optional<double>>> estimate_orders(
    const std::vector<ErrorReport>& reports);

}  // namespace fve
