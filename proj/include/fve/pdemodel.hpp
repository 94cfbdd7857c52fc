#pragma once

// Coefficient fields and manufactured solutions for
//   -div(D grad u) + Q . grad u + r u = f   on (0,1)^2,   u = 0 on the boundary,
// with D symmetric positive definite. Three benchmark coefficient
// patterns (pure diffusion / diagonal diffusion-reaction / full-tensor
// convection-diffusion-reaction) share the exact solution
//   u = sin(pi x) sin(2 pi y) e^{x - 1/2 + y^2},
// plus polynomial problems for patch tests.

#include <functional>
#include <string>

namespace fve {

using ScalarField = std::function<double(double, double)>;

struct CoefficientField {
  ScalarField d11, d12, d22;  // diffusion tensor, d21 = d12
  ScalarField q1, q2;         // convection
  ScalarField r;              // reaction
  // First partials entering the divergence expansion of the source and
  // the well-posedness bound r - (1/2) div Q.
  ScalarField d11_x, d12_x, d12_y, d22_y, q1_x, q2_y;
};

struct ManufacturedProblem {
  std::string name;
  CoefficientField coef;
  ScalarField u, u_x, u_y, u_xx, u_xy, u_yy;
  ScalarField f;  // hand-expanded analytic source
};

ManufacturedProblem bvp_d();
ManufacturedProblem bvp_dr();
ManufacturedProblem bvp_dqr();
ManufacturedProblem problem_by_name(const std::string& name);

// u = [x(1-x)^{k-1}] [y(1-y)^{k-1}] in Q^k, zero on the boundary, with a
// constant diffusion tensor and exact polynomial source. k >= 2 (there is
// no bilinear polynomial vanishing on the whole boundary).
ManufacturedProblem polynomial_problem(int k, double d11 = 1.0,
                                       double d12 = 0.0, double d22 = 1.0);

// Source composed term-by-term from the coefficient and solution
// derivatives (product-rule expansion); cross-checks the hand-expanded f.
double compose_source(const ManufacturedProblem& p, double x, double y);

// Sampled lower bounds over n quasi-random points in the open square:
// min eigenvalue of D, and min of r - (q1_x + q2_y)/2.
double sampled_spd_margin(const CoefficientField& c, int n = 1000);
double sampled_kappa(const CoefficientField& c, int n = 1000);

}  // namespace fve
