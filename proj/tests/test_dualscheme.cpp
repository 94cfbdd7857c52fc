#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fve/dualscheme.hpp"
#include "fve/errors.hpp"
#include "fve/refbasis.hpp"

using namespace fve;

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// The four-digit parameters published with the tabulated schemes; the two
// maximal-order schemes carry exact closed forms instead.
struct PrintedScheme {
  int r;
  std::vector<double> alpha_x, alpha_y;
  std::vector<double> a_x, a_y;  // interior interpolation parameters
};

const std::map<std::string, PrintedScheme>& printed_schemes() {
  static const std::map<std::string, PrintedScheme> table = {
      {"FVE-3-2",
       {2,
        {-0.6406, -0.0748, 0.6255},
        {-0.7622, -0.2073, 0.6577},
        {-1.0 / 5, 7.0 / 50},
        {-1.0 / 2, 1.0 / 5}}},
      {"FVE-3-3",
       {3,
        {-0.8563, -0.1534, 0.7243},
        {-0.9380, -0.2435, 0.7011},
        {-3.0 / 5, 0.3301},
        {-5.0 / 7, 0.2744}}},
      {"FVE-3-4",
       {4,
        {-std::sqrt(3.0 / 5), 0.0, std::sqrt(3.0 / 5)},
        {-std::sqrt(3.0 / 5), 0.0, std::sqrt(3.0 / 5)},
        {},
        {}}},
      {"FVE-4-3",
       {3,
        {-0.9156, -0.2698, 0.5678, 0.8838},
        {-0.9020, -0.3187, 0.4628, 0.8990},
        {-7.0 / 10, 1.0 / 5, 4.0 / 5},
        {-7.0 / 10, 1.0 / 10, 3.0 / 4}}},
      {"FVE-4-4",
       {4,
        {-0.9579, -0.4479, 0.3699, 0.9093},
        {-0.8598, -0.2885, 0.4744, 0.9452},
        {-4.0 / 5, -1.0 / 25, 0.7270},
        {-16.0 / 25, 1.0 / 10, 0.7960}}},
      {"FVE-4-6",
       {6,
        {-std::sqrt((15 + 2 * std::sqrt(30.0)) / 35),
         -std::sqrt((15 - 2 * std::sqrt(30.0)) / 35),
         std::sqrt((15 - 2 * std::sqrt(30.0)) / 35),
         std::sqrt((15 + 2 * std::sqrt(30.0)) / 35)},
        {-std::sqrt((15 + 2 * std::sqrt(30.0)) / 35),
         -std::sqrt((15 - 2 * std::sqrt(30.0)) / 35),
         std::sqrt((15 - 2 * std::sqrt(30.0)) / 35),
         std::sqrt((15 + 2 * std::sqrt(30.0)) / 35)},
        {},
        {}}},
  };
  return table;
}

}  // namespace

TEST_CASE("orthogonality_residual vanishes for hand-built Gaussian data") {
  // k = 1: alpha = {0}, a = {-1, 1}; the midpoint rule is exact on P^1.
  CHECK(inf_norm(orthogonality_residual({0.0}, {-1.0, 1.0}, 0)) <= 1e-16);

  // k = 3 with exact Gauss nodes/cumulative weights; exact on P^5 (r = 4).
  const double g = std::sqrt(0.6);
  const std::vector<double> alpha = {-g, 0.0, g};
  const std::vector<double> a = {-1.0, -4.0 / 9, 4.0 / 9, 1.0};
  CHECK(inf_norm(orthogonality_residual(alpha, a, 4)) <= 1e-15);

  // One moment order beyond 2k-2 the residual is the Gauss quadrature error
  // of x^6: 2*(5/9)*(3/5)^3 - 2/7 = -8/175.
  const std::vector<double> over = orthogonality_residual(alpha, a, 5);
  REQUIRE(over.size() == 6);
  CHECK(inf_norm({over.begin(), over.begin() + 5}) <= 1e-15);
  CHECK(over[5] == doctest::Approx(-8.0 / 175).epsilon(1e-13));
}

TEST_CASE("orthogonality_residual moments alternate between 2/(i+2) and zero") {
  // With A_1 = 2, alpha_1 = 0 and r = 0 the single residual is
  // 2*0 - (1 - (-1)^0)/2 = 0; shifting alpha makes residual_0 = 2*alpha.
  const std::vector<double> res = orthogonality_residual({0.25}, {-1.0, 1.0}, 0);
  REQUIRE(res.size() == 1);
  CHECK(res[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("gaussian_duality reaches the maximal moment order for k = 1..5") {
  for (int k = 1; k <= 5; ++k) {
    const DirectionStrategy s = gaussian_duality(k);
    CHECK(s.k == k);
    CHECK(s.r == 2 * k - 2);
    s.validate();
    CHECK(inf_norm(orthogonality_residual(s.alpha, s.a, s.r)) <= 1e-13);
    CHECK(verify_dual_quadrature(s) <= 1e-13);

    const QuadratureRule& g = gauss_rule(k);
    for (int i = 0; i < k; ++i)
      CHECK(s.alpha[i] == doctest::Approx(g.nodes[i]).epsilon(1e-14));
  }

  // k = 2: alpha = +-1/sqrt(3), cumulative weights give a = {-1, 0, 1}.
  const DirectionStrategy s2 = gaussian_duality(2);
  CHECK(s2.alpha[0] == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(s2.a[1]) <= 1e-14);
}

TEST_CASE("weights are the successive differences of the interpolation parameters") {
  const DirectionStrategy s = gaussian_duality(3);
  const std::vector<double> w = s.weights();
  REQUIRE(w.size() == 3);
  double sum = 0;
  for (int i = 0; i < 3; ++i) {
    CHECK(w[i] == doctest::Approx(s.a[i + 1] - s.a[i]).epsilon(1e-15));
    sum += w[i];
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("all six presets re-solve to machine-precision orthogonality") {
  REQUIRE(preset_names().size() == 6);
  for (const std::string& name : preset_names()) {
    const DualStrategy s = preset(name);
    CAPTURE(name);
    CHECK(s.name == name);
    s.validate();
    CHECK(inf_norm(orthogonality_residual(s.x.alpha, s.x.a, s.x.r)) <= 1e-12);
    CHECK(inf_norm(orthogonality_residual(s.y.alpha, s.y.a, s.y.r)) <= 1e-12);
    CHECK(verify_dual_quadrature(s.x) <= 1e-12);
    CHECK(verify_dual_quadrature(s.y) <= 1e-12);
  }
  CHECK_THROWS_AS(preset("FVE-9-9"), UnknownPreset);
}

TEST_CASE("preset dual parameters match the published four-digit values") {
  for (const auto& [name, printed] : printed_schemes()) {
    const DualStrategy s = preset(name);
    CAPTURE(name);
    CHECK(s.x.r == printed.r);
    CHECK(s.y.r == printed.r);
    REQUIRE(s.x.alpha.size() == printed.alpha_x.size());
    for (size_t i = 0; i < printed.alpha_x.size(); ++i) {
      CHECK(std::abs(s.x.alpha[i] - printed.alpha_x[i]) <= 5e-5);
      CHECK(std::abs(s.y.alpha[i] - printed.alpha_y[i]) <= 5e-5);
    }
  }
}

TEST_CASE("strategies built from the printed digits satisfy the moment "
          "conditions to four-digit accuracy") {
  for (const auto& [name, printed] : printed_schemes()) {
    const DualStrategy machine = preset(name);
    CAPTURE(name);
    for (int dir = 0; dir < 2; ++dir) {
      const std::vector<double>& alpha = dir == 0 ? printed.alpha_x : printed.alpha_y;
      const std::vector<double>& interior = dir == 0 ? printed.a_x : printed.a_y;
      std::vector<double> a = {-1.0};
      if (interior.empty()) {
        // Maximal-order schemes: the published parameters are closed forms,
        // so reuse the machine interpolation parameters.
        const DirectionStrategy& m = dir == 0 ? machine.x : machine.y;
        a.assign(m.a.begin(), m.a.end());
      } else {
        a.insert(a.end(), interior.begin(), interior.end());
        a.push_back(1.0);
      }
      CHECK(inf_norm(orthogonality_residual(alpha, a, printed.r)) <= 5e-4);
    }
  }
}

TEST_CASE("solve_strategy reproduces the FVE-3-2 x-direction from its seeds") {
  // k = 3, r = 2: all interpolation parameters fixed, three alphas unknown.
  const DirectionStrategy s = solve_strategy(
      3, 2, {std::optional<double>(-0.2), std::optional<double>(0.14)},
      {-0.6406, -0.0748, 0.6255});
  const DualStrategy machine = preset("FVE-3-2");
  for (int i = 0; i < 3; ++i)
    CHECK(s.alpha[i] == doctest::Approx(machine.x.alpha[i]).epsilon(1e-10));
  CHECK(inf_norm(orthogonality_residual(s.alpha, s.a, 2)) <= 1e-12);
}

TEST_CASE("solve_strategy handles free interpolation parameters") {
  // k = 3, r = 3: a_1 fixed at -3/5, a_2 free -> four unknowns, four moments.
  const DirectionStrategy s =
      solve_strategy(3, 3, {std::optional<double>(-0.6), std::nullopt},
                     {-0.8563, -0.1534, 0.7243}, {0.3301});
  const DualStrategy machine = preset("FVE-3-3");
  for (int i = 0; i < 3; ++i)
    CHECK(s.alpha[i] == doctest::Approx(machine.x.alpha[i]).epsilon(1e-10));
  CHECK(s.a[2] == doctest::Approx(machine.x.a[2]).epsilon(1e-10));
}

TEST_CASE("solve_strategy validates the unknown count and rejects hopeless seeds") {
  // k + #free = 3 + 1 = 4 != r + 1 = 3.
  CHECK_THROWS_AS(solve_strategy(3, 2, {std::optional<double>(-0.2), std::nullopt},
                                 {-0.6, -0.1, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_strategy(3, 2, {std::optional<double>(-0.2)},
                                 {-0.6, -0.1, 0.6}),
                  std::invalid_argument);
  // Coincident alpha seeds give a singular Jacobian.
  CHECK_THROWS_AS(solve_strategy(3, 2,
                                 {std::optional<double>(-0.2), std::optional<double>(0.14)},
                                 {0.3, 0.3, 0.3}),
                  NonConvergence);
}

TEST_CASE("k = 1 admits only the midpoint strategy") {
  const DirectionStrategy s = solve_strategy(1, 0, {}, {0.1});
  CHECK(std::abs(s.alpha[0]) <= 1e-13);
  CHECK(s.a[0] == -1.0);
  CHECK(s.a[1] == 1.0);
}

TEST_CASE("validate rejects malformed strategies") {
  DirectionStrategy s = gaussian_duality(3);

  DirectionStrategy bad = s;
  bad.alpha[0] = bad.alpha[1];
  CHECK_THROWS_AS(bad.validate(), OrderingViolation);

  bad = s;
  bad.alpha[0] = -1.5;
  CHECK_THROWS_AS(bad.validate(), OrderingViolation);

  bad = s;
  bad.a[1] = bad.a[2] + 0.1;
  CHECK_THROWS_AS(bad.validate(), OrderingViolation);

  bad = s;
  bad.a[0] = -0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = s;
  bad.r = 2 * bad.k - 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  DualStrategy d;
  d.x = gaussian_duality(3);
  d.y = gaussian_duality(4);
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("verify_dual_quadrature detects a broken moment") {
  DirectionStrategy s = gaussian_duality(2);
  s.a[1] = 0.25;  // destroys the weight balance
  CHECK(verify_dual_quadrature(s) > 1e-3);
}

TEST_CASE("scheme JSON round-trips exactly") {
  const DualStrategy s = preset("FVE-4-3");
  nlohmann::json j;
  to_json(j, s);
  CHECK(j.at("k").get<int>() == 4);
  CHECK(j.at("name").get<std::string>() == "FVE-4-3");

  DualStrategy back;
  from_json(j, back);
  back.validate();
  CHECK(back.name == s.name);
  CHECK(back.x.r == s.x.r);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.x.alpha[i] == s.x.alpha[i]);
    CHECK(back.y.alpha[i] == s.y.alpha[i]);
  }
  for (int i = 0; i <= 4; ++i) {
    CHECK(back.x.a[i] == s.x.a[i]);
    CHECK(back.y.a[i] == s.y.a[i]);
  }
}
