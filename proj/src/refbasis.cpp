#include "fve/refbasis.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fve {

ValueDeriv legendre_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("legendre_eval: n must be >= 0");
  if (n == 0) return {1.0, 0.0};
  double pm1 = 1.0, dm1 = 0.0;  // L_0
  double p = x, d = 1.0;        // L_1
  for (int m = 1; m < n; ++m) {
    // (m+1) L_{m+1} = (2m+1) x L_m - m L_{m-1}, differentiated alongside.
    const double pn = ((2 * m + 1) * x * p - m * pm1) / (m + 1);
    const double dn = ((2 * m + 1) * (p + x * d) - m * dm1) / (m + 1);
    pm1 = p;
    dm1 = d;
    p = pn;
    d = dn;
  }
  return {p, d};
}

double mfunction_eval(int i, double x) {
  if (i < 0) throw std::invalid_argument("mfunction_eval: i must be >= 0");
  if (i == 0) return 1.0;
  if (i == 1) return x;
  return (legendre_eval(i, x).value - legendre_eval(i - 2, x).value) /
         (2.0 * i - 1.0);
}

double mfunction_deriv(int i, double x) {
  if (i < 0) throw std::invalid_argument("mfunction_deriv: i must be >= 0");
  if (i == 0) return 0.0;
  return legendre_eval(i - 1, x).value;
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (int q = 0; q < size(); ++q) s += weights[q] * f(nodes[q]);
  return s;
}

double QuadratureRule::integrate_mapped(
    double a, double b, const std::function<double(double)>& f) const {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int q = 0; q < size(); ++q) s += weights[q] * f(mid + half * nodes[q]);
  return half * s;
}

namespace {

QuadratureRule make_gauss(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.exactness_degree = 2 * n - 1;
  for (int i = 1; i <= n; ++i) {
    // Classical asymptotic seed, then Newton on L_n.
    double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const auto [v, d] = legendre_eval(n, x);
      const double dx = v / d;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw std::runtime_error("gauss_rule: Newton did not converge");
    const auto [v, d] = legendre_eval(n, x);
    (void)v;
    rule.nodes[n - i] = x;  // seeds are descending in i
    rule.weights[n - i] = 2.0 / ((1.0 - x * x) * d * d);
  }
  // Symmetrize so that paired nodes are exact negatives and the middle
  // node of an odd rule is exactly zero.
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -m;
    rule.nodes[n - 1 - i] = m;
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_rule(int n) {
  if (n < 1 || n > 20)
    throw std::invalid_argument("gauss_rule: need 1 <= n <= 20");
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

std::vector<double> lobatto_nodes(int k) {
  if (k < 1) throw std::invalid_argument("lobatto_nodes: k must be >= 1");
  std::vector<double> nodes(k + 1);
  nodes.front() = -1.0;
  nodes.back() = 1.0;
  for (int i = 1; i < k; ++i) {
    // Interior nodes are the roots of L_k'. Chebyshev-Lobatto seeds.
    double x = std::cos(M_PI * i / k);
    for (int it = 0; it < 100; ++it) {
      const auto [v, d] = legendre_eval(k, x);
      // L_k'' from the Legendre differential equation.
      const double dd = (2.0 * x * d - k * (k + 1.0) * v) / (1.0 - x * x);
      const double dx = d / dd;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[k - i] = x;
  }
  for (int i = 1; i < (k + 1) / 2; ++i) {
    const double m = 0.5 * (nodes[k - i] - nodes[i]);
    nodes[i] = -m;
    nodes[k - i] = m;
  }
  if (k % 2 == 0 && k >= 2) nodes[k / 2] = 0.0;
  return nodes;
}

LagrangeBasis1D::LagrangeBasis1D(std::vector<double> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2)
    throw std::invalid_argument("LagrangeBasis1D: need at least two nodes");
  for (size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument(
          "LagrangeBasis1D: nodes must be strictly increasing");
  denom_.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    double d = 1.0;
    for (size_t j = 0; j < nodes_.size(); ++j)
      if (j != i) d *= nodes_[i] - nodes_[j];
    denom_[i] = d;
  }
}

double LagrangeBasis1D::value(int i, double x) const {
  double p = 1.0;
  for (int j = 0; j < size(); ++j)
    if (j != i) p *= x - nodes_[j];
  return p / denom_[i];
}

double LagrangeBasis1D::deriv(int i, double x) const {
  double s = 0.0;
  for (int m = 0; m < size(); ++m) {
    if (m == i) continue;
    double p = 1.0;
    for (int j = 0; j < size(); ++j)
      if (j != i && j != m) p *= x - nodes_[j];
    s += p;
  }
  return s / denom_[i];
}

namespace {

// Columns = monomial coefficients of L_0..L_n.
Eigen::MatrixXd legendre_monomial_matrix(int n) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B(0, 0) = 1.0;
  if (n >= 1) B(1, 1) = 1.0;
  for (int m = 1; m < n; ++m) {
    // (m+1) L_{m+1} = (2m+1) x L_m - m L_{m-1}
    for (int d = 0; d <= m; ++d)
      B(d + 1, m + 1) += (2.0 * m + 1.0) / (m + 1.0) * B(d, m);
    for (int d = 0; d <= m - 1; ++d)
      B(d, m + 1) -= static_cast<double>(m) / (m + 1.0) * B(d, m - 1);
  }
  return B;
}

// Columns = monomial coefficients of M_0..M_n.
Eigen::MatrixXd mfunction_monomial_matrix(int n) {
  const Eigen::MatrixXd L = legendre_monomial_matrix(n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B(0, 0) = 1.0;
  if (n >= 1) B(1, 1) = 1.0;
  for (int i = 2; i <= n; ++i)
    B.col(i) = (L.col(i) - L.col(i - 2)) / (2.0 * i - 1.0);
  return B;
}

Eigen::MatrixXd basis_matrix(PolyBasis b, int n) {
  switch (b) {
    case PolyBasis::Legendre:
      return legendre_monomial_matrix(n);
    case PolyBasis::MFunction:
      return mfunction_monomial_matrix(n);
    case PolyBasis::Monomial:
      return Eigen::MatrixXd::Identity(n + 1, n + 1);
  }
  throw std::logic_error("basis_matrix: unreachable");
}

}  // namespace

double Polynomial1D::eval(double x) const {
  if (coeffs.empty()) return 0.0;
  switch (basis) {
    case PolyBasis::Monomial: {
      double v = 0.0;
      for (int i = degree(); i >= 0; --i) v = v * x + coeffs[i];
      return v;
    }
    case PolyBasis::Legendre: {
      double v = 0.0;
      for (int i = 0; i <= degree(); ++i)
        v += coeffs[i] * legendre_eval(i, x).value;
      return v;
    }
    case PolyBasis::MFunction: {
      double v = 0.0;
      for (int i = 0; i <= degree(); ++i) v += coeffs[i] * mfunction_eval(i, x);
      return v;
    }
  }
  throw std::logic_error("Polynomial1D::eval: unreachable");
}

Polynomial1D Polynomial1D::to(PolyBasis target) const {
  if (target == basis) return *this;
  const int n = degree();
  const Eigen::VectorXd c =
      Eigen::Map<const Eigen::VectorXd>(coeffs.data(), n + 1);
  // Route through the monomial basis; both basis matrices are upper
  // triangular with nonzero diagonal, so the solve is exact back
  // substitution.
  const Eigen::VectorXd mono = basis_matrix(basis, n) * c;
  Eigen::VectorXd out = mono;
  if (target != PolyBasis::Monomial)
    out = basis_matrix(target, n)
              .triangularView<Eigen::Upper>()
              .solve(mono);
  Polynomial1D res;
  res.basis = target;
  res.coeffs.assign(out.data(), out.data() + n + 1);
  return res;
}

Polynomial1D Polynomial1D::derivative() const {
  const Polynomial1D m = to(PolyBasis::Monomial);
  Polynomial1D d;
  d.basis = PolyBasis::Monomial;
  if (m.degree() <= 0) {
    d.coeffs = {0.0};
    return d;
  }
  d.coeffs.resize(m.coeffs.size() - 1);
  for (size_t i = 1; i < m.coeffs.size(); ++i)
    d.coeffs[i - 1] = i * m.coeffs[i];
  return d;
}

std::vector<std::complex<double>> polynomial_roots(const Polynomial1D& p) {
  std::vector<double> c = p.to(PolyBasis::Monomial).coeffs;
  while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()[i];
  // Newton polish on the complex Horner form.
  for (auto& z : roots) {
    for (int it = 0; it < 3; ++it) {
      std::complex<double> v = 0.0, d = 0.0;
      for (int i = n; i >= 0; --i) {
        d = d * z + v;
        v = v * z + c[i];
      }
      if (std::abs(d) == 0.0) break;
      z -= v / d;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace fve
