#include "fve/errnorms.hpp"

#include <cmath>
#include <stdexcept>

#include "fve/refbasis.hpp"

namespace fve {

ElementFn make_value_error(const ManufacturedProblem& problem,
                           const DiscreteField& field) {
  const ScalarField u = problem.u;
  return [u, &field](int i, int j, double x, double y) {
    return u(x, y) - field.value_on_element(i, j, x, y);
  };
}

ElementFn make_dx_error(const ManufacturedProblem& problem,
                        const DiscreteField& field) {
  const ScalarField ux = problem.u_x;
  return [ux, &field](int i, int j, double x, double y) {
    return ux(x, y) - field.gradient_on_element(i, j, x, y)[0];
  };
}

ElementFn make_dy_error(const ManufacturedProblem& problem,
                        const DiscreteField& field) {
  const ScalarField uy = problem.u_y;
  return [uy, &field](int i, int j, double x, double y) {
    return uy(x, y) - field.gradient_on_element(i, j, x, y)[1];
  };
}

double norm_h1x_super(const ElementFn& dx_error, const RectMesh& mesh,
                      const DualStrategy& strategy) {
  const int k = strategy.k();
  const QuadratureRule& quad = gauss_rule(2 * k + 3);
  double total = 0.0;
  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const ElementDualGeometry geo = element_dual_geometry(mesh, strategy, i, j);
      const double hy = mesh.hy(j);
      const double ymid = 0.5 * (mesh.y[j - 1] + mesh.y[j]);
      double acc = 0.0;
      for (int s = 0; s < k; ++s) {
        const double xs = geo.ax[s];
        for (int g = 0; g < quad.size(); ++g) {
          const double y = ymid + 0.5 * hy * quad.nodes[g];
          const double v = dx_error(i, j, xs, y);
          acc += quad.weights[g] * 0.5 * hy * v * v;
        }
      }
      total += mesh.hx(i) * acc;
    }
  }
  return std::sqrt(total);
}

double norm_l2_super(const ElementFn& value_error, const RectMesh& mesh,
                     const DualStrategy& strategy) {
  const int k = strategy.k();
  const SuperPointSets pts = point_sets(strategy);
  const double wnodes = 1.0 / ((k + 1) * (k + 1));
  double total = 0.0;
  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const double area = mesh.hx(i) * mesh.hy(j);
      double acc = 0.0;
      for (int t = 0; t <= k; ++t) {
        const double y = map_to_element(mesh, i, j, 0.0, pts.ps_y[t]).y;
        for (int s = 0; s <= k; ++s) {
          const double x = map_to_element(mesh, i, j, pts.ps_x[s], 0.0).x;
          const double v = value_error(i, j, x, y);
          acc += v * v;
        }
      }
      total += area * wnodes * acc;
    }
  }
  return std::sqrt(total);
}

double norm_h1x_ultra(const ElementFn& dx_error, const RectMesh& mesh,
                      const DualStrategy& strategy) {
  const int k = strategy.k();
  // Only the transverse value points enter; the x-direction needs just the
  // dual abscissae, so a strategy whose own x value points degenerate is
  // still measurable.
  const std::vector<double>& alpha_x = strategy.x.alpha;
  const std::vector<double> ps_y = super_points(strategy.y);
  const double wnodes = 1.0 / (k * (k + 1));
  double total = 0.0;
  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const double area = mesh.hx(i) * mesh.hy(j);
      double acc = 0.0;
      for (int t = 0; t <= k; ++t) {
        const double y = map_to_element(mesh, i, j, 0.0, ps_y[t]).y;
        for (int s = 0; s < k; ++s) {
          const double x = map_to_element(mesh, i, j, alpha_x[s], 0.0).x;
          const double v = dx_error(i, j, x, y);
          acc += v * v;
        }
      }
      total += area * wnodes * acc;
    }
  }
  return std::sqrt(total);
}

GlobalNorms global_norms(const ElementFn& value_error, const ElementFn& dx_error,
                         const ElementFn& dy_error, const RectMesh& mesh,
                         int k) {
  const QuadratureRule& quad = gauss_rule(2 * k + 3);
  double l2 = 0.0, semi = 0.0;
  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const double scale = 0.25 * mesh.hx(i) * mesh.hy(j);
      for (int gy = 0; gy < quad.size(); ++gy) {
        const double y = map_to_element(mesh, i, j, 0.0, quad.nodes[gy]).y;
        for (int gx = 0; gx < quad.size(); ++gx) {
          const double x = map_to_element(mesh, i, j, quad.nodes[gx], 0.0).x;
          const double w = scale * quad.weights[gx] * quad.weights[gy];
          const double e = value_error(i, j, x, y);
          const double ex = dx_error(i, j, x, y);
          const double ey = dy_error(i, j, x, y);
          l2 += w * e * e;
          semi += w * (ex * ex + ey * ey);
        }
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(semi)};
}

GlobalNorms superclose_gap_norms(const DiscreteField& uh, const ScalarField& u,
                                 const DualStrategy& strategy, SuperMode mode) {
  const int k = strategy.k();
  const RectMesh& mesh = uh.mesh();
  if (uh.k() != k)
    throw std::invalid_argument(
        "superclose_gap_norms: field order does not match the strategy");
  const DofMap dof = global_dof_map(mesh, k);
  const LagrangeBasis1D basis(lobatto_nodes(k));
  const QuadratureRule& quad = gauss_rule(k + 2);
  const int nq = quad.size();

  Eigen::MatrixXd val(nq, k + 1), der(nq, k + 1);
  for (int g = 0; g < nq; ++g)
    for (int a = 0; a <= k; ++a) {
      val(g, a) = basis.value(a, quad.nodes[g]);
      der(g, a) = basis.deriv(a, quad.nodes[g]);
    }

  double l2 = 0.0, semi = 0.0;
  Eigen::MatrixXd diff(k + 1, k + 1);
  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const Eigen::MatrixXd vi = superclose_local(u, mesh, strategy, mode, i, j);
      for (int t = 0; t <= k; ++t)
        for (int s = 0; s <= k; ++s)
          diff(s, t) = uh.coeffs()[dof.global_node(i, j, s, t)] - vi(s, t);

      const double hx = mesh.hx(i), hy = mesh.hy(j);
      const double scale = 0.25 * hx * hy;
      for (int gy = 0; gy < nq; ++gy) {
        for (int gx = 0; gx < nq; ++gx) {
          const double w = scale * quad.weights[gx] * quad.weights[gy];
          double e = 0.0, exr = 0.0, eyr = 0.0;
          for (int t = 0; t <= k; ++t)
            for (int s = 0; s <= k; ++s) {
              const double d = diff(s, t);
              e += d * val(gx, s) * val(gy, t);
              exr += d * der(gx, s) * val(gy, t);
              eyr += d * val(gx, s) * der(gy, t);
            }
          const double ex = exr * 2.0 / hx, ey = eyr * 2.0 / hy;
          l2 += w * e * e;
          semi += w * (ex * ex + ey * ey);
        }
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(semi)};
}

std::map<std::string, std::vector<std::optional<double>>> estimate_orders(
    const std::vector<ErrorReport>& reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("estimate_orders: need at least two reports");
  std::map<std::string, std::vector<std::optional<double>>> out;
  for (const auto& [name, value] : reports.front().norms)
    out[name].assign(reports.size(), std::nullopt);
  for (size_t m = 1; m < reports.size(); ++m) {
    const double h0 = reports[m - 1].h, h1 = reports[m].h;
    if (!(h0 > 0.0) || !(h1 > 0.0) || h0 == h1)
      throw std::invalid_argument("estimate_orders: mesh sizes must be distinct");
    for (auto& [name, orders] : out) {
      const auto it0 = reports[m - 1].norms.find(name);
      const auto it1 = reports[m].norms.find(name);
      if (it0 == reports[m - 1].norms.end() || it1 == reports[m].norms.end())
        continue;
      const double e0 = it0->second, e1 = it1->second;
      if (!(e0 > 0.0) || !(e1 > 0.0) || !std::isfinite(e0) || !std::isfinite(e1))
        continue;  // vanished or invalid error: order omitted
      orders[m] = std::log(e0 / e1) / std::log(h0 / h1);
    }
  }
  return out;
}

}  // namespace fve
