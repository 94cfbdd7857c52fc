#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fve/errnorms.hpp"
#include "fve/errors.hpp"
#include "fve/superstruct.hpp"

using namespace fve;

namespace {

ElementFn constant_fn(double c) {
  return [c](int, int, double, double) { return c; };
}

}  // namespace

TEST_CASE("all norms vanish on the zero error") {
  const RectMesh mesh = perturbed_mesh(4, 4, 0.2, 2);
  const DualStrategy s = preset("FVE-3-3");
  const ElementFn zero = constant_fn(0.0);
  CHECK(norm_h1x_super(zero, mesh, s) == 0.0);
  CHECK(norm_l2_super(zero, mesh, s) == 0.0);
  CHECK(norm_h1x_ultra(zero, mesh, s) == 0.0);
  const GlobalNorms g = global_norms(zero, zero, zero, mesh, 3);
  CHECK(g.l2 == 0.0);
  CHECK(g.h1_semi == 0.0);
}

TEST_CASE("norm weights are calibrated on the unit square") {
  const RectMesh mesh = perturbed_mesh(5, 3, 0.25, 9);
  const DualStrategy s = preset("FVE-3-3");

  // A constant function value error of c has discrete L2 norm exactly c.
  CHECK(norm_l2_super(constant_fn(2.5), mesh, s) ==
        doctest::Approx(2.5).epsilon(1e-13));

  // A unit derivative error gives sqrt(k) in the derivative
  // superconvergence norm (k dual lines, each weighted by the cell width)
  // and exactly 1 in the ultraconvergence norm.
  CHECK(norm_h1x_super(constant_fn(1.0), mesh, s) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
  CHECK(norm_h1x_ultra(constant_fn(1.0), mesh, s) ==
        doctest::Approx(1.0).epsilon(1e-13));

  // Same calibration for a k = 4 strategy.
  const DualStrategy s4 = preset("FVE-4-4");
  CHECK(norm_h1x_super(constant_fn(1.0), mesh, s4) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK(norm_h1x_ultra(constant_fn(1.0), mesh, s4) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("global_norms integrates smooth errors accurately") {
  const RectMesh mesh = uniform_mesh(6, 6);
  // e = sin(pi x) sin(pi y): ||e||_L2 = 1/2, |e|_H1 = pi/sqrt(2).
  const ElementFn ev = [](int, int, double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  };
  const ElementFn ex = [](int, int, double x, double y) {
    return M_PI * std::cos(M_PI * x) * std::sin(M_PI * y);
  };
  const ElementFn ey = [](int, int, double x, double y) {
    return M_PI * std::sin(M_PI * x) * std::cos(M_PI * y);
  };
  const GlobalNorms g = global_norms(ev, ex, ey, mesh, 3);
  CHECK(g.l2 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(g.h1_semi == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-10));

  // e = x has H1 seminorm 1 on the unit square.
  const GlobalNorms lin = global_norms(
      [](int, int, double x, double) { return x; }, constant_fn(1.0),
      constant_fn(0.0), mesh, 2);
  CHECK(lin.l2 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(lin.h1_semi == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the ultra norm only needs the transverse value points") {
  // FVE-3-2's x-direction value points are degenerate (complex), yet the
  // x-derivative ultra norm is still defined: its grid is
  // alpha_x x ps_y, which never touches ps_x.
  const DualStrategy s = preset("FVE-3-2");
  const RectMesh mesh = uniform_mesh(4, 4);
  CHECK_THROWS_AS(point_sets(s), ComplexOrOutOfRangeRoot);
  CHECK(norm_h1x_ultra(constant_fn(1.0), mesh, s) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("error closures evaluate the solution-field mismatch one-sided") {
  const ManufacturedProblem prob = bvp_d();
  const RectMesh mesh = uniform_mesh(3, 3);
  // The interpolant of a Q^3 function is that function, so all closures
  // vanish identically when the "exact" fields match it.
  ManufacturedProblem poly = polynomial_problem(3);
  const DiscreteField pf = interpolate(mesh, 3, poly.u);
  const ElementFn ev = make_value_error(poly, pf);
  const ElementFn ex = make_dx_error(poly, pf);
  const ElementFn ey = make_dy_error(poly, pf);
  for (double x : {0.1, 0.45, 0.8}) {
    for (double y : {0.2, 0.65}) {
      const auto [i, j] = pf.locate(x, y);
      CHECK(std::abs(ev(i, j, x, y)) <= 1e-12);
      CHECK(std::abs(ex(i, j, x, y)) <= 1e-11);
      CHECK(std::abs(ey(i, j, x, y)) <= 1e-11);
    }
  }

  // For a non-polynomial solution the closures are nonzero and obey the
  // designated-element convention on the shared edge.
  const DiscreteField uf = interpolate(mesh, 3, prob.u);
  const ElementFn dxe = make_dx_error(prob, uf);
  const double left = dxe(1, 1, 1.0 / 3, 0.2);
  const double right = dxe(2, 1, 1.0 / 3, 0.2);
  CHECK(std::isfinite(left));
  CHECK(std::isfinite(right));
  CHECK(left != right);  // one-sided derivatives differ across the edge
}

TEST_CASE("superclose_gap_norms is zero when the field equals the kept-set "
          "interpolant") {
  const RectMesh mesh = perturbed_mesh(3, 3, 0.15, 8);
  const DualStrategy s = preset("FVE-3-3");
  const ScalarField u = [](double x, double y) {
    return (2 * x - 1) * (0.5 * y + 2);
  };
  const DiscreteField uf = interpolate(mesh, 3, u);
  for (SuperMode mode : {SuperMode::Super, SuperMode::Ultra}) {
    const GlobalNorms gap = superclose_gap_norms(uf, u, s, mode);
    CHECK(gap.l2 <= 1e-12);
    CHECK(gap.h1_semi <= 1e-12);
  }

  // A perturbed field is measured, not masked: bump one interior
  // coefficient and the gap becomes visible in both norms.
  Eigen::VectorXd c = uf.coeffs();
  const DofMap dof = global_dof_map(mesh, 3);
  c[dof.node(4, 5)] += 1e-3;
  const DiscreteField bumped(mesh, 3, c);
  const GlobalNorms gap = superclose_gap_norms(bumped, u, s, SuperMode::Super);
  CHECK(gap.l2 > 1e-5);
  CHECK(gap.h1_semi > 1e-4);
}

TEST_CASE("estimate_orders: pairwise rates, omissions, and mixed spacing") {
  std::vector<ErrorReport> reports(3);
  reports[0].h = 0.5;
  reports[1].h = 0.25;
  reports[2].h = 0.125;
  for (int i = 0; i < 3; ++i) {
    reports[i].norms["five"] = std::pow(reports[i].h, 5);
    reports[i].norms["two"] = 3.0 * reports[i].h * reports[i].h;
  }
  const auto orders = estimate_orders(reports);
  REQUIRE(orders.count("five") == 1);
  REQUIRE(orders.at("five").size() == 3);
  CHECK(!orders.at("five")[0].has_value());
  CHECK(orders.at("five")[1].value() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(orders.at("five")[2].value() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(orders.at("two")[1].value() == doctest::Approx(2.0).epsilon(1e-12));

  // Non-dyadic spacing uses the actual h ratio.
  std::vector<ErrorReport> mixed(2);
  mixed[0].h = 1.0 / 2;
  mixed[1].h = 1.0 / 3;
  mixed[0].norms["e"] = 8.0;
  mixed[1].norms["e"] = 1.0;
  const auto m = estimate_orders(mixed);
  CHECK(m.at("e")[1].value() ==
        doctest::Approx(std::log(8.0) / std::log(1.5)).epsilon(1e-12));

  // Zero and non-finite errors suppress the order instead of throwing.
  std::vector<ErrorReport> zero(2);
  zero[0].h = 0.5;
  zero[1].h = 0.25;
  zero[0].norms["e"] = 1e-9;
  zero[1].norms["e"] = 0.0;
  CHECK(!estimate_orders(zero).at("e")[1].has_value());
  zero[1].norms["e"] = std::nan("");
  CHECK(!estimate_orders(zero).at("e")[1].has_value());

  // Fewer than two reports cannot define an order.
  CHECK_THROWS_AS(estimate_orders({reports[0]}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_orders({}), std::invalid_argument);

  // Coincident mesh sizes are rejected rather than dividing by log(1).
  std::vector<ErrorReport> same(2);
  same[0].h = 0.5;
  same[1].h = 0.5;
  same[0].norms["e"] = 1.0;
  same[1].norms["e"] = 0.5;
  CHECK_THROWS_AS(estimate_orders(same), std::invalid_argument);
}
