#include "fve/superstruct.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "fve/errors.hpp"

namespace fve {

namespace {

// Collocation matrix A(m-1, s-2) = L_{s-1}(alpha_m) shared by both
// correction families; only the right-hand side differs.
CorrectionSet solve_corrections(const DirectionStrategy& dir, int rhs_degree) {
  dir.validate();
  const int k = dir.k;
  CorrectionSet out;
  out.k = k;
  if (k == 1) return out;

  const int n = k - 1;
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd rhs(n);
  for (int m = 1; m <= n; ++m) {
    const double al = dir.alpha[m - 1];
    for (int s = 2; s <= k; ++s) A(m - 1, s - 2) = legendre_eval(s - 1, al).value;
    rhs(m - 1) = -legendre_eval(rhs_degree, al).value;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) <= sv(0) * 1e-14)
    throw SingularConstraintSystem(
        "correction constraints are singular for this dual strategy");
  const Eigen::VectorXd x = svd.solve(rhs);
  out.b.assign(x.data(), x.data() + n);
  out.condition = sv(0) / sv(n - 1);
  out.residual = (A * x - rhs).lpNorm<Eigen::Infinity>();
  return out;
}

int leading_degree(int k, SuperMode mode) {
  return mode == SuperMode::Super ? k + 1 : k + 2;
}

}  // namespace

double CorrectionSet::coeff(int s) const {
  if (s < 2 || s > k) return 0.0;
  return b[s - 2];
}

CorrectionSet super_corrections(const DirectionStrategy& dir) {
  return solve_corrections(dir, dir.k);
}

CorrectionSet ultra_corrections(const DirectionStrategy& dir) {
  return solve_corrections(dir, dir.k + 1);
}

double extension_residual(const DirectionStrategy& dir, SuperMode mode) {
  const int k = dir.k;
  const CorrectionSet c = mode == SuperMode::Super ? super_corrections(dir)
                                                   : ultra_corrections(dir);
  const double al = dir.alpha[k - 1];
  double r = legendre_eval(mode == SuperMode::Super ? k : k + 1, al).value;
  for (int s = 2; s <= k; ++s) r += c.coeff(s) * legendre_eval(s - 1, al).value;
  return std::abs(r);
}

Polynomial1D residual_polynomial(const DirectionStrategy& dir, SuperMode mode) {
  const int k = dir.k;
  const int lead = leading_degree(k, mode);
  const CorrectionSet c = mode == SuperMode::Super ? super_corrections(dir)
                                                   : ultra_corrections(dir);
  Polynomial1D p;
  p.basis = PolyBasis::MFunction;
  p.coeffs.assign(lead + 1, 0.0);
  for (int s = 2; s <= k; ++s) p.coeffs[s] = c.coeff(s);
  p.coeffs[lead] = 1.0;
  return p;
}

std::vector<double> super_points(const DirectionStrategy& dir) {
  const Polynomial1D res = residual_polynomial(dir, SuperMode::Super);
  const auto roots = polynomial_roots(res);
  const int k = dir.k;
  if (static_cast<int>(roots.size()) != k + 1)
    throw ComplexOrOutOfRangeRoot("residual polynomial has wrong degree");

  std::vector<double> pts;
  pts.reserve(roots.size());
  for (const auto& z : roots) {
    if (std::abs(z.imag()) > 1e-10)
      throw ComplexOrOutOfRangeRoot(
          "residual polynomial has a complex root; the value-point "
          "structure degenerates for this strategy");
    double x = z.real();
    if (x < -1.0 - 1e-10 || x > 1.0 + 1e-10)
      throw ComplexOrOutOfRangeRoot(
          "residual polynomial root outside the reference interval");
    x = std::clamp(x, -1.0, 1.0);
    if (std::abs(x + 1.0) < 1e-9) x = -1.0;
    if (std::abs(x - 1.0) < 1e-9) x = 1.0;
    pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i] - pts[i - 1] < 1e-10)
      throw ComplexOrOutOfRangeRoot("residual polynomial has a repeated root");
  if (pts.front() != -1.0 || pts.back() != 1.0)
    throw ComplexOrOutOfRangeRoot(
        "residual polynomial does not vanish at the element endpoints");
  for (double x : pts)
    if (std::abs(res.eval(x)) > 1e-11)
      throw ComplexOrOutOfRangeRoot("root fails the residual check");
  return pts;
}

SuperPointSets point_sets(const DualStrategy& strategy) {
  strategy.validate();
  SuperPointSets p;
  p.alpha_x = strategy.x.alpha;
  p.alpha_y = strategy.y.alpha;
  p.ps_x = super_points(strategy.x);
  p.ps_y = super_points(strategy.y);
  return p;
}

void to_json(nlohmann::json& j, const SuperPointSets& p) {
  j = nlohmann::json{{"alpha_x", p.alpha_x},
                     {"ps_x", p.ps_x},
                     {"alpha_y", p.alpha_y},
                     {"ps_y", p.ps_y}};
}

double MDecomposition::eval(double xhat, double yhat) const {
  const int n = degree + 1;
  std::vector<double> mx(n), my(n);
  for (int s = 0; s < n; ++s) {
    mx[s] = mfunction_eval(s, xhat);
    my[s] = mfunction_eval(s, yhat);
  }
  double v = 0.0;
  for (int t = 0; t < n; ++t) {
    double sx = 0.0;
    for (int s = 0; s < n; ++s) sx += b(s, t) * mx[s];
    v += sx * my[t];
  }
  return v;
}

MDecomposition mdecompose_element(const ScalarField& u, const RectMesh& mesh,
                                  int i, int j, int degree) {
  const int n = degree + 1;
  const QuadratureRule& quad = gauss_rule(degree + 2);
  const int nq = quad.size();

  // Legendre values at the quadrature points.
  Eigen::MatrixXd leg(nq, n);
  for (int g = 0; g < nq; ++g)
    for (int m = 0; m < n; ++m) leg(g, m) = legendre_eval(m, quad.nodes[g]).value;

  Eigen::MatrixXd uval(nq, nq);
  for (int gy = 0; gy < nq; ++gy)
    for (int gx = 0; gx < nq; ++gx) {
      const Point p = map_to_element(mesh, i, j, quad.nodes[gx], quad.nodes[gy]);
      uval(gx, gy) = u(p.x, p.y);
    }

  // Tensor Legendre coefficients of the L2 projection onto Q^degree.
  Eigen::MatrixXd c(n, n);
  for (int m = 0; m < n; ++m) {
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int gy = 0; gy < nq; ++gy) {
        double sx = 0.0;
        for (int gx = 0; gx < nq; ++gx)
          sx += quad.weights[gx] * leg(gx, m) * uval(gx, gy);
        acc += quad.weights[gy] * leg(gy, t) * sx;
      }
      c(m, t) = 0.25 * (2 * m + 1) * (2 * t + 1) * acc;
    }
  }

  // Basis change Legendre -> antiderivative basis: Mhat_s = sum_i S(i,s) L_i
  // with S upper triangular, so the coefficient grids satisfy c = S b S^T.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  S(0, 0) = 1.0;
  if (n > 1) S(1, 1) = 1.0;
  for (int s = 2; s < n; ++s) {
    S(s, s) = 1.0 / (2 * s - 1);
    S(s - 2, s) = -1.0 / (2 * s - 1);
  }
  const Eigen::MatrixXd y = S.triangularView<Eigen::Upper>().solve(c);
  MDecomposition out;
  out.degree = degree;
  out.b = S.triangularView<Eigen::Upper>().solve(y.transpose()).transpose();
  return out;
}

namespace {

// The mode's corrected (k+1)x(k+1) coefficient grid in the antiderivative
// tensor basis for one element.
Eigen::MatrixXd corrected_coefficients(const ScalarField& u,
                                       const RectMesh& mesh,
                                       const DualStrategy& strategy,
                                       SuperMode mode, int i, int j,
                                       const CorrectionSet& cx,
                                       const CorrectionSet& cy,
                                       const CorrectionSet& cx1,
                                       const CorrectionSet& cy1) {
  const int k = strategy.k();
  const int d = leading_degree(k, mode);
  const MDecomposition dec = mdecompose_element(u, mesh, i, j, d);
  const bool ultra = mode == SuperMode::Ultra;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int s = 0; s <= k; ++s)
    for (int t = 0; t <= k; ++t)
      if (s + t <= d) q(s, t) = dec.b(s, t);

  // Correction strips: indices with one factor of degree >= 2 paired with a
  // low transverse factor absorb the truncated leading column/row.
  for (int s = 2; s <= k; ++s)
    for (int t = 0; t <= 1; ++t) {
      q(s, t) -= cx.coeff(s) * dec.b(k + 1, t);
      if (ultra) q(s, t) -= cx1.coeff(s) * dec.b(k + 2, t);
    }
  for (int t = 2; t <= k; ++t)
    for (int s = 0; s <= 1; ++s) {
      q(s, t) -= cy.coeff(t) * dec.b(s, k + 1);
      if (ultra) q(s, t) -= cy1.coeff(t) * dec.b(s, k + 2);
    }
  return q;
}

Eigen::MatrixXd nodal_from_coefficients(const Eigen::MatrixXd& q, int k) {
  const std::vector<double> lob = lobatto_nodes(k);
  Eigen::MatrixXd mtab(k + 1, k + 1);  // mtab(a, s) = Mhat_s(lob[a])
  for (int a = 0; a <= k; ++a)
    for (int s = 0; s <= k; ++s) mtab(a, s) = mfunction_eval(s, lob[a]);
  return mtab * q * mtab.transpose();  // V(a, c) = sum q(s,t) M_s(x_a) M_t(y_c)
}

struct StrategyCorrections {
  CorrectionSet cx, cy, cx1, cy1;
};

StrategyCorrections corrections_for(const DualStrategy& strategy,
                                    SuperMode mode) {
  StrategyCorrections c;
  c.cx = super_corrections(strategy.x);
  c.cy = super_corrections(strategy.y);
  if (mode == SuperMode::Ultra) {
    c.cx1 = ultra_corrections(strategy.x);
    c.cy1 = ultra_corrections(strategy.y);
  }
  return c;
}

}  // namespace

Eigen::MatrixXd superclose_local(const ScalarField& u, const RectMesh& mesh,
                                 const DualStrategy& strategy, SuperMode mode,
                                 int i, int j) {
  const StrategyCorrections c = corrections_for(strategy, mode);
  const Eigen::MatrixXd q = corrected_coefficients(u, mesh, strategy, mode, i,
                                                   j, c.cx, c.cy, c.cx1, c.cy1);
  return nodal_from_coefficients(q, strategy.k());
}

DiscreteField build_superclose(const ScalarField& u, const RectMesh& mesh,
                               const DualStrategy& strategy, SuperMode mode) {
  const int k = strategy.k();
  const DofMap dof = global_dof_map(mesh, k);
  const StrategyCorrections c = corrections_for(strategy, mode);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dof.total());
  Eigen::VectorXd count = Eigen::VectorXd::Zero(dof.total());
  for (int j = 1; j <= mesh.ny(); ++j)
    for (int i = 1; i <= mesh.nx(); ++i) {
      const Eigen::MatrixXd q = corrected_coefficients(
          u, mesh, strategy, mode, i, j, c.cx, c.cy, c.cx1, c.cy1);
      const Eigen::MatrixXd v = nodal_from_coefficients(q, k);
      for (int t = 0; t <= k; ++t)
        for (int s = 0; s <= k; ++s) {
          const int g = dof.global_node(i, j, s, t);
          sum[g] += v(s, t);
          count[g] += 1.0;
        }
    }
  Eigen::VectorXd coeffs = sum.cwiseQuotient(count);
  return DiscreteField(mesh, k, std::move(coeffs));
}

DiscreteField build_superclose(const ManufacturedProblem& problem,
                               const RectMesh& mesh,
                               const DualStrategy& strategy, SuperMode mode) {
  return build_superclose(problem.u, mesh, strategy, mode);
}

double superclose_max_jump(const ScalarField& u, const RectMesh& mesh,
                           const DualStrategy& strategy, SuperMode mode) {
  const int k = strategy.k();
  const int nx = mesh.nx(), ny = mesh.ny();
  const StrategyCorrections c = corrections_for(strategy, mode);
  const LagrangeBasis1D basis(lobatto_nodes(k));

  std::vector<Eigen::MatrixXd> nodal(static_cast<size_t>(nx) * ny);
  for (int j = 1; j <= ny; ++j)
    for (int i = 1; i <= nx; ++i) {
      const Eigen::MatrixXd q = corrected_coefficients(
          u, mesh, strategy, mode, i, j, c.cx, c.cy, c.cx1, c.cy1);
      nodal[(i - 1) + static_cast<size_t>(nx) * (j - 1)] =
          nodal_from_coefficients(q, k);
    }
  auto cell = [&](int i, int j) -> const Eigen::MatrixXd& {
    return nodal[(i - 1) + static_cast<size_t>(nx) * (j - 1)];
  };

  const int ns = k + 3;
  std::vector<double> sample(ns);
  for (int m = 0; m < ns; ++m) sample[m] = -1.0 + 2.0 * m / (ns - 1);
  Eigen::MatrixXd ltab(ns, k + 1);  // Lagrange values at the edge samples
  for (int m = 0; m < ns; ++m)
    for (int a = 0; a <= k; ++a) ltab(m, a) = basis.value(a, sample[m]);

  double jump = 0.0;
  for (int j = 1; j <= ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const Eigen::MatrixXd& L = cell(i, j);
      const Eigen::MatrixXd& R = cell(i + 1, j);
      for (int m = 0; m < ns; ++m) {
        double vl = 0.0, vr = 0.0;
        for (int a = 0; a <= k; ++a) {
          vl += L(k, a) * ltab(m, a);
          vr += R(0, a) * ltab(m, a);
        }
        jump = std::max(jump, std::abs(vl - vr));
      }
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 1; i <= nx; ++i) {
      const Eigen::MatrixXd& B = cell(i, j);
      const Eigen::MatrixXd& T = cell(i, j + 1);
      for (int m = 0; m < ns; ++m) {
        double vb = 0.0, vt = 0.0;
        for (int a = 0; a <= k; ++a) {
          vb += B(a, k) * ltab(m, a);
          vt += T(a, 0) * ltab(m, a);
        }
        jump = std::max(jump, std::abs(vb - vt));
      }
    }
  return jump;
}

double verify_vanishing_means(const DirectionStrategy& dir) {
  const Polynomial1D res = residual_polynomial(dir, SuperMode::Super);
  const QuadratureRule& quad = gauss_rule(dir.k + 3);
  return std::abs(quad.integrate([&](double x) { return res.eval(x); }));
}

}  // namespace fve
