#include "fve/pdemodel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fve {

namespace {

// The exact solution factors as u = A(x) B(y) with
//   A = sin(pi x) e^{x-1/2},   B = sin(2 pi y) e^{y^2}.
double A0(double x) { return std::sin(M_PI * x) * std::exp(x - 0.5); }
double A1(double x) {
  return std::exp(x - 0.5) * (M_PI * std::cos(M_PI * x) + std::sin(M_PI * x));
}
double A2(double x) {
  return std::exp(x - 0.5) * (2.0 * M_PI * std::cos(M_PI * x) +
                              (1.0 - M_PI * M_PI) * std::sin(M_PI * x));
}
double B0(double y) { return std::sin(2.0 * M_PI * y) * std::exp(y * y); }
double B1(double y) {
  return std::exp(y * y) * (2.0 * M_PI * std::cos(2.0 * M_PI * y) +
                            2.0 * y * std::sin(2.0 * M_PI * y));
}
double B2(double y) {
  return std::exp(y * y) *
         (8.0 * M_PI * y * std::cos(2.0 * M_PI * y) +
          (2.0 + 4.0 * y * y - 4.0 * M_PI * M_PI) * std::sin(2.0 * M_PI * y));
}

void attach_exact_solution(ManufacturedProblem& p) {
  p.u = [](double x, double y) { return A0(x) * B0(y); };
  p.u_x = [](double x, double y) { return A1(x) * B0(y); };
  p.u_y = [](double x, double y) { return A0(x) * B1(y); };
  p.u_xx = [](double x, double y) { return A2(x) * B0(y); };
  p.u_xy = [](double x, double y) { return A1(x) * B1(y); };
  p.u_yy = [](double x, double y) { return A0(x) * B2(y); };
}

ScalarField zero_field() {
  return [](double, double) { return 0.0; };
}

}  // namespace

ManufacturedProblem bvp_d() {
  ManufacturedProblem p;
  p.name = "bvp-d";
  p.coef.d11 = p.coef.d22 = [](double, double) { return 1.0; };
  p.coef.d12 = zero_field();
  p.coef.q1 = p.coef.q2 = p.coef.r = zero_field();
  p.coef.d11_x = p.coef.d12_x = p.coef.d12_y = p.coef.d22_y = zero_field();
  p.coef.q1_x = p.coef.q2_y = zero_field();
  attach_exact_solution(p);
  p.f = [](double x, double y) { return -(A2(x) * B0(y) + A0(x) * B2(y)); };
  return p;
}

ManufacturedProblem bvp_dr() {
  ManufacturedProblem p;
  p.name = "bvp-dr";
  p.coef.d11 = [](double x, double y) { return y * std::exp(x) + 1.0; };
  p.coef.d22 = [](double x, double y) { return x * std::exp(y) + 1.0; };
  p.coef.d12 = zero_field();
  p.coef.q1 = p.coef.q2 = zero_field();
  p.coef.r = [](double x, double y) { return (x + 1.0) * (y + 1.0); };
  p.coef.d11_x = [](double x, double y) { return y * std::exp(x); };
  p.coef.d22_y = [](double x, double y) { return x * std::exp(y); };
  p.coef.d12_x = p.coef.d12_y = zero_field();
  p.coef.q1_x = p.coef.q2_y = zero_field();
  attach_exact_solution(p);
  p.f = [](double x, double y) {
    return -(y * std::exp(x)) * A1(x) * B0(y) -
           (y * std::exp(x) + 1.0) * A2(x) * B0(y) -
           (x * std::exp(y)) * A0(x) * B1(y) -
           (x * std::exp(y) + 1.0) * A0(x) * B2(y) +
           (x + 1.0) * (y + 1.0) * A0(x) * B0(y);
  };
  return p;
}

ManufacturedProblem bvp_dqr() {
  ManufacturedProblem p;
  p.name = "bvp-dqr";
  p.coef.d11 = [](double x, double y) { return y * std::exp(x) + 1.0; };
  p.coef.d22 = [](double x, double y) { return x * std::exp(y) + 1.0; };
  p.coef.d12 = [](double x, double y) { return x * y; };
  p.coef.q1 = [](double x, double) { return std::cos(x); };
  p.coef.q2 = [](double, double y) { return std::cos(y); };
  p.coef.r = [](double x, double y) { return (x + 1.0) * (y + 1.0); };
  p.coef.d11_x = [](double x, double y) { return y * std::exp(x); };
  p.coef.d22_y = [](double x, double y) { return x * std::exp(y); };
  p.coef.d12_x = [](double, double y) { return y; };
  p.coef.d12_y = [](double x, double) { return x; };
  p.coef.q1_x = [](double x, double) { return -std::sin(x); };
  p.coef.q2_y = [](double, double y) { return -std::sin(y); };
  attach_exact_solution(p);
  p.f = [](double x, double y) {
    // Divergence expanded by the product rule:
    //   u_x picks up -(d11_x + d12_y) + q1, u_y picks up -(d12_x + d22_y) + q2,
    //   u_xy appears twice through the off-diagonal entry.
    const double cu_x = -(y * std::exp(x) + x - std::cos(x));
    const double cu_y = -(y + x * std::exp(y) - std::cos(y));
    return cu_x * A1(x) * B0(y) - (y * std::exp(x) + 1.0) * A2(x) * B0(y) -
           2.0 * x * y * A1(x) * B1(y) + cu_y * A0(x) * B1(y) -
           (x * std::exp(y) + 1.0) * A0(x) * B2(y) +
           (x + 1.0) * (y + 1.0) * A0(x) * B0(y);
  };
  return p;
}

ManufacturedProblem problem_by_name(const std::string& name) {
  if (name == "bvp-d") return bvp_d();
  if (name == "bvp-dr") return bvp_dr();
  if (name == "bvp-dqr") return bvp_dqr();
  throw std::invalid_argument("unknown problem: " + name);
}

namespace {

struct Poly {
  std::vector<double> c;  // monomial coefficients
  double operator()(double x) const {
    double v = 0.0;
    for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  }
  Poly deriv() const {
    if (c.size() <= 1) return {{0.0}};
    Poly d;
    d.c.resize(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d.c[i - 1] = i * c[i];
    return d;
  }
};

// x (1-x)^{k-1} expanded via the binomial theorem.
Poly boundary_bubble(int k) {
  Poly g;
  g.c.assign(k + 1, 0.0);
  double binom = 1.0;
  for (int m = 0; m < k; ++m) {
    g.c[m + 1] = (m % 2 == 0 ? binom : -binom);
    binom = binom * (k - 1 - m) / (m + 1);
  }
  return g;
}

}  // namespace

ManufacturedProblem polynomial_problem(int k, double d11, double d12, double d22) {
  if (k < 2)
    throw std::invalid_argument(
        "polynomial_problem: no Q^1 polynomial vanishes on the whole boundary; k >= 2");
  if (!(d11 > 0.0) || !(d11 * d22 - d12 * d12 > 0.0))
    throw std::invalid_argument("polynomial_problem: D must be positive definite");
  const Poly g = boundary_bubble(k);
  const Poly g1 = g.deriv();
  const Poly g2 = g1.deriv();

  ManufacturedProblem p;
  p.name = "poly-" + std::to_string(k);
  p.coef.d11 = [d11](double, double) { return d11; };
  p.coef.d12 = [d12](double, double) { return d12; };
  p.coef.d22 = [d22](double, double) { return d22; };
  p.coef.q1 = p.coef.q2 = p.coef.r = zero_field();
  p.coef.d11_x = p.coef.d12_x = p.coef.d12_y = p.coef.d22_y = zero_field();
  p.coef.q1_x = p.coef.q2_y = zero_field();
  p.u = [g](double x, double y) { return g(x) * g(y); };
  p.u_x = [g, g1](double x, double y) { return g1(x) * g(y); };
  p.u_y = [g, g1](double x, double y) { return g(x) * g1(y); };
  p.u_xx = [g, g2](double x, double y) { return g2(x) * g(y); };
  p.u_xy = [g1](double x, double y) { return g1(x) * g1(y); };
  p.u_yy = [g, g2](double x, double y) { return g(x) * g2(y); };
  p.f = [g, g1, g2, d11, d12, d22](double x, double y) {
    return -(d11 * g2(x) * g(y) + 2.0 * d12 * g1(x) * g1(y) +
             d22 * g(x) * g2(y));
  };
  return p;
}

double compose_source(const ManufacturedProblem& p, double x, double y) {
  const CoefficientField& c = p.coef;
  return -(c.d11_x(x, y) * p.u_x(x, y) + c.d11(x, y) * p.u_xx(x, y) +
           c.d12_x(x, y) * p.u_y(x, y) + c.d12(x, y) * p.u_xy(x, y)) -
         (c.d12_y(x, y) * p.u_x(x, y) + c.d12(x, y) * p.u_xy(x, y) +
          c.d22_y(x, y) * p.u_y(x, y) + c.d22(x, y) * p.u_yy(x, y)) +
         c.q1(x, y) * p.u_x(x, y) + c.q2(x, y) * p.u_y(x, y) +
         c.r(x, y) * p.u(x, y);
}

namespace {

// Halton sequence: cheap deterministic space-filling samples.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

double sampled_spd_margin(const CoefficientField& c, int n) {
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const double x = halton(i, 2), y = halton(i, 3);
    const double a = c.d11(x, y), b = c.d12(x, y), d = c.d22(x, y);
    const double tr = a + d, det = a * d - b * b;
    const double lam_min = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
    margin = std::min(margin, lam_min);
  }
  return margin;
}

double sampled_kappa(const CoefficientField& c, int n) {
  double kappa = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const double x = halton(i, 2), y = halton(i, 3);
    kappa = std::min(kappa, c.r(x, y) - 0.5 * (c.q1_x(x, y) + c.q2_y(x, y)));
  }
  return kappa;
}

}  // namespace fve
