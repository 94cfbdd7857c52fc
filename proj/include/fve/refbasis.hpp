#pragma once

// Reference-element machinery on [-1,1]: Legendre polynomials, their
// antiderivative family (M-functions), Gauss rules, 1D Lagrange bases,
// and a small polynomial type with basis conversions.

#include <complex>
#include <functional>
#include <vector>

namespace fve {

struct ValueDeriv {
  double value;
  double deriv;
};

// L_n(x) and L_n'(x) by the three-term recurrence.
ValueDeriv legendre_eval(int n, double x);

// M_0 = 1, M_1 = x, and M_{i}' = L_{i-1} with M_i(-1) = 0 for i >= 2.
// Evaluated through the antiderivative identity
//   M_i = (L_i - L_{i-2}) / (2i - 1),   i >= 2,
// which avoids the factorial growth of the Rodrigues-type formula.
double mfunction_eval(int i, double x);
double mfunction_deriv(int i, double x);

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, in [-1,1]
  std::vector<double> weights;  // positive, sum to 2
  int exactness_degree = 0;

  int size() const { return static_cast<int>(nodes.size()); }
  double integrate(const std::function<double(double)>& f) const;
  // Integrate over [a,b] by affine transport of the rule.
  double integrate_mapped(double a, double b,
                          const std::function<double(double)>& f) const;
};

// n-point Gauss-Legendre rule (nodes are the roots of L_n, located by
// Newton iteration). Cached; 1 <= n <= 20.
const QuadratureRule& gauss_rule(int n);

// k+1 Gauss-Lobatto points: -1, roots of L_k', 1. Ascending.
std::vector<double> lobatto_nodes(int k);

// Lagrange basis {phi_0..phi_k} on strictly increasing nodes.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(std::vector<double> nodes);
  int size() const { return static_cast<int>(nodes_.size()); }
  int order() const { return size() - 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  double value(int i, double x) const;
  double deriv(int i, double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> denom_;  // prod_{j != i} (x_i - x_j)
};

enum class PolyBasis { Monomial, Legendre, MFunction };

struct Polynomial1D {
  PolyBasis basis = PolyBasis::Monomial;
  std::vector<double> coeffs;  // coeffs[i] multiplies basis function i

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double eval(double x) const;
  Polynomial1D to(PolyBasis target) const;
  // d/dx, returned in the monomial basis.
  Polynomial1D derivative() const;
};

// All complex roots via the companion matrix of the monomial form,
// polished by a few Newton steps.
std::vector<std::complex<double>> polynomial_roots(const Polynomial1D& p);

}  // namespace fve
