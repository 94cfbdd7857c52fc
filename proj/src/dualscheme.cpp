#include "fve/dualscheme.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

#include "fve/errors.hpp"
#include "fve/refbasis.hpp"

namespace fve {

std::vector<double> DirectionStrategy::weights() const {
  std::vector<double> w(k);
  for (int s = 1; s <= k; ++s) w[s - 1] = a[s] - a[s - 1];
  return w;
}

void DirectionStrategy::validate() const {
  if (k < 1) throw std::invalid_argument("DirectionStrategy: k must be >= 1");
  if (r < k - 1 || r > 2 * k - 2)
    throw std::invalid_argument("DirectionStrategy: need k-1 <= r <= 2k-2");
  if (static_cast<int>(alpha.size()) != k ||
      static_cast<int>(a.size()) != k + 1)
    throw std::invalid_argument("DirectionStrategy: parameter count mismatch");
  if (a.front() != -1.0 || a.back() != 1.0)
    throw std::invalid_argument("DirectionStrategy: a_0 = -1, a_k = 1 required");
  double prev = -1.0;
  for (double v : alpha) {
    if (!(v > prev) || !(v < 1.0))
      throw OrderingViolation("dual parameters must satisfy -1 < alpha_1 < ... < alpha_k < 1");
    prev = v;
  }
  for (int s = 1; s <= k; ++s)
    if (!(a[s] > a[s - 1]))
      throw OrderingViolation("interpolation parameters must be strictly increasing");
}

void DualStrategy::validate() const {
  x.validate();
  y.validate();
  if (x.k != y.k)
    throw std::invalid_argument("DualStrategy: directions must share k");
}

std::vector<double> orthogonality_residual(const std::vector<double>& alpha,
                                           const std::vector<double>& a,
                                           int r) {
  const int k = static_cast<int>(alpha.size());
  if (static_cast<int>(a.size()) != k + 1)
    throw std::invalid_argument("orthogonality_residual: a must have k+1 entries");
  if (std::abs(a.front() + 1.0) > 1e-14 || std::abs(a.back() - 1.0) > 1e-14)
    throw std::invalid_argument("orthogonality_residual: a_0 = -1, a_k = 1 required");
  std::vector<double> res(r + 1);
  for (int i = 0; i <= r; ++i) {
    double moment = 0.0;
    for (int s = 1; s <= k; ++s)
      moment += (a[s] - a[s - 1]) * std::pow(alpha[s - 1], i + 1);
    const double exact = (i % 2 == 1) ? 2.0 / (i + 2.0) : 0.0;
    res[i] = moment - exact;
  }
  return res;
}

DirectionStrategy solve_strategy(
    int k, int r, const std::vector<std::optional<double>>& interior_a,
    const std::vector<double>& alpha_guess,
    const std::vector<double>& free_a_guess) {
  if (k < 1 || r < k - 1 || r > 2 * k - 2)
    throw std::invalid_argument("solve_strategy: need k >= 1, k-1 <= r <= 2k-2");
  if (static_cast<int>(interior_a.size()) != k - 1)
    throw std::invalid_argument("solve_strategy: interior_a must have k-1 entries");
  if (static_cast<int>(alpha_guess.size()) != k)
    throw std::invalid_argument("solve_strategy: alpha_guess must have k entries");

  std::vector<int> free_idx;  // indices into a_1..a_{k-1}
  for (int i = 0; i < k - 1; ++i)
    if (!interior_a[i]) free_idx.push_back(i + 1);
  const int m = static_cast<int>(free_idx.size());
  if (k + m != r + 1)
    throw std::invalid_argument(
        "solve_strategy: unknown count (k dual + free interpolation) must equal r+1");
  if (static_cast<int>(free_a_guess.size()) != m)
    throw std::invalid_argument("solve_strategy: free_a_guess size mismatch");

  const int n = r + 1;
  Eigen::VectorXd z(n);
  for (int i = 0; i < k; ++i) z[i] = alpha_guess[i];
  for (int i = 0; i < m; ++i) z[k + i] = free_a_guess[i];

  auto assemble_a = [&](const Eigen::VectorXd& zz) {
    std::vector<double> a(k + 1);
    a.front() = -1.0;
    a.back() = 1.0;
    int f = 0;
    for (int i = 1; i < k; ++i)
      a[i] = interior_a[i - 1] ? *interior_a[i - 1] : zz[k + f++];
    return a;
  };
  auto residual = [&](const Eigen::VectorXd& zz) {
    std::vector<double> alpha(zz.data(), zz.data() + k);
    const auto res = orthogonality_residual(alpha, assemble_a(zz), r);
    return Eigen::Map<const Eigen::VectorXd>(res.data(), n).eval();
  };

  const double tol = 1e-12;
  constexpr double fd_step = 1e-7;
  Eigen::VectorXd res = residual(z);
  bool converged = res.lpNorm<Eigen::Infinity>() <= tol;
  for (int it = 0; it < 50 && !converged; ++it) {
    Eigen::MatrixXd J(n, n);
    for (int c = 0; c < n; ++c) {
      Eigen::VectorXd zp = z;
      zp[c] += fd_step;
      J.col(c) = (residual(zp) - res) / fd_step;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || smax / smin > 1e12)
      throw NonConvergence("solve_strategy: Jacobian condition number exceeds 1e12");
    z -= svd.solve(res);
    res = residual(z);
    converged = res.lpNorm<Eigen::Infinity>() <= tol;
  }
  if (!converged)
    throw NonConvergence("solve_strategy: residual above 1e-12 after 50 iterations");

  DirectionStrategy s;
  s.k = k;
  s.r = r;
  s.alpha.assign(z.data(), z.data() + k);
  s.a = assemble_a(z);
  s.validate();  // throws OrderingViolation if the root broke monotonicity
  return s;
}

DirectionStrategy gaussian_duality(int k) {
  if (k < 1 || k > 10)
    throw std::invalid_argument("gaussian_duality: need 1 <= k <= 10");
  const QuadratureRule& g = gauss_rule(k);
  DirectionStrategy s;
  s.k = k;
  s.r = 2 * k - 2;
  s.alpha = g.nodes;
  s.a.resize(k + 1);
  s.a[0] = -1.0;
  for (int i = 1; i <= k; ++i) s.a[i] = s.a[i - 1] + g.weights[i - 1];
  s.a[k] = 1.0;  // exact endpoint (weights sum to 2 up to roundoff)
  s.validate();
  return s;
}

namespace {

using OptVec = std::vector<std::optional<double>>;

DirectionStrategy solved_direction(int k, int r, const OptVec& interior_a,
                                   const std::vector<double>& alpha_seed,
                                   const std::vector<double>& free_seed) {
  return solve_strategy(k, r, interior_a, alpha_seed, free_seed);
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "FVE-3-2", "FVE-3-3", "FVE-3-4", "FVE-4-3", "FVE-4-4", "FVE-4-6"};
  return names;
}

DualStrategy preset(const std::string& name) {
  DualStrategy s;
  s.name = name;
  // Fixed interpolation parameters are exact rationals; 4-digit decimals
  // are Newton seeds that get re-solved to machine precision.
  if (name == "FVE-3-2") {
    s.x = solved_direction(3, 2, {-1.0 / 5.0, 7.0 / 50.0},
                           {-0.6406, -0.0748, 0.6255}, {});
    s.y = solved_direction(3, 2, {-1.0 / 2.0, 1.0 / 5.0},
                           {-0.7622, -0.2073, 0.6577}, {});
  } else if (name == "FVE-3-3") {
    s.x = solved_direction(3, 3, {-3.0 / 5.0, std::nullopt},
                           {-0.8563, -0.1534, 0.7243}, {0.3301});
    s.y = solved_direction(3, 3, {-5.0 / 7.0, std::nullopt},
                           {-0.9380, -0.2435, 0.7011}, {0.2744});
  } else if (name == "FVE-3-4") {
    s.x = s.y = gaussian_duality(3);
  } else if (name == "FVE-4-3") {
    s.x = solved_direction(4, 3, {-7.0 / 10.0, 1.0 / 5.0, 4.0 / 5.0},
                           {-0.9156, -0.2698, 0.5678, 0.8838}, {});
    s.y = solved_direction(4, 3, {-7.0 / 10.0, 1.0 / 10.0, 3.0 / 4.0},
                           {-0.9020, -0.3187, 0.4628, 0.8990}, {});
  } else if (name == "FVE-4-4") {
    s.x = solved_direction(4, 4, {-4.0 / 5.0, -1.0 / 25.0, std::nullopt},
                           {-0.9579, -0.4479, 0.3699, 0.9093}, {0.7270});
    s.y = solved_direction(4, 4, {-16.0 / 25.0, 1.0 / 10.0, std::nullopt},
                           {-0.8598, -0.2885, 0.4744, 0.9452}, {0.7960});
  } else if (name == "FVE-4-6") {
    s.x = s.y = gaussian_duality(4);
  } else {
    throw UnknownPreset("unknown preset: " + name);
  }
  return s;
}

double verify_dual_quadrature(const DirectionStrategy& s) {
  const auto A = s.weights();
  double worst = 0.0;
  for (int d = 0; d <= s.r + 1; ++d) {
    double q = 0.0;
    for (int i = 0; i < s.k; ++i) q += A[i] * std::pow(s.alpha[i], d);
    const double exact = (d % 2 == 0) ? 2.0 / (d + 1.0) : 0.0;
    worst = std::max(worst, std::abs(q - exact));
  }
  return worst;
}

namespace {

void direction_to_json(nlohmann::json& j, const DirectionStrategy& d) {
  j = nlohmann::json{{"alpha", d.alpha}, {"a", d.a}};
}

DirectionStrategy direction_from_json(const nlohmann::json& j, int k, int r) {
  DirectionStrategy d;
  d.k = k;
  d.r = r;
  d.alpha = j.at("alpha").get<std::vector<double>>();
  d.a = j.at("a").get<std::vector<double>>();
  return d;
}

}  // namespace

void to_json(nlohmann::json& j, const DualStrategy& s) {
  j = nlohmann::json{{"k", s.x.k}, {"r", s.x.r}};
  if (!s.name.empty()) j["name"] = s.name;
  direction_to_json(j["x"], s.x);
  direction_to_json(j["y"], s.y);
}

void from_json(const nlohmann::json& j, DualStrategy& s) {
  const int k = j.at("k").get<int>();
  const int r = j.at("r").get<int>();
  s.name = j.value("name", "");
  s.x = direction_from_json(j.at("x"), k, r);
  s.y = direction_from_json(j.at("y"), k, r);
  s.validate();
}

}  // namespace fve
