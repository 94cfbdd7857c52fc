#include "fve/assembly.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fve/errors.hpp"
#include "fve/refbasis.hpp"

namespace fve {

namespace {

// Reference-element tables for one direction: the dual cuts split [-1,1]
// into k+1 sub-intervals; Gauss points are placed per sub-interval once,
// and all 1D basis values/derivatives are tabulated there and on the dual
// lines themselves. Element loops then only evaluate PDE coefficients.
struct DirectionTables {
  std::vector<double> cuts;                       // k+2: -1, alpha..., 1
  std::vector<double> half;                       // (k+1) half-lengths of sub-intervals
  std::vector<std::vector<double>> qp;            // [sub][g] reference Gauss points
  std::vector<std::vector<std::vector<double>>> val;  // [sub][g][i]
  std::vector<std::vector<std::vector<double>>> der;  // [sub][g][i]
  std::vector<std::vector<double>> line_val;      // [m][i] at alpha_m
  std::vector<std::vector<double>> line_der;      // [m][i]
};

DirectionTables make_tables(const DirectionStrategy& dir,
                            const LagrangeBasis1D& basis,
                            const QuadratureRule& quad) {
  const int k = dir.k;
  const int nb = basis.size();
  DirectionTables t;
  t.cuts.resize(k + 2);
  t.cuts.front() = -1.0;
  t.cuts.back() = 1.0;
  std::copy(dir.alpha.begin(), dir.alpha.end(), t.cuts.begin() + 1);
  t.half.resize(k + 1);
  t.qp.resize(k + 1);
  t.val.resize(k + 1);
  t.der.resize(k + 1);
  for (int s = 0; s <= k; ++s) {
    const double mid = 0.5 * (t.cuts[s] + t.cuts[s + 1]);
    t.half[s] = 0.5 * (t.cuts[s + 1] - t.cuts[s]);
    t.qp[s].resize(quad.size());
    t.val[s].assign(quad.size(), std::vector<double>(nb));
    t.der[s].assign(quad.size(), std::vector<double>(nb));
    for (int g = 0; g < quad.size(); ++g) {
      const double x = mid + t.half[s] * quad.nodes[g];
      t.qp[s][g] = x;
      for (int i = 0; i < nb; ++i) {
        t.val[s][g][i] = basis.value(i, x);
        t.der[s][g][i] = basis.deriv(i, x);
      }
    }
  }
  t.line_val.assign(k, std::vector<double>(nb));
  t.line_der.assign(k, std::vector<double>(nb));
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < nb; ++i) {
      t.line_val[m][i] = basis.value(i, dir.alpha[m]);
      t.line_der[m][i] = basis.deriv(i, dir.alpha[m]);
    }
  return t;
}

SparseSystem finalize(const DofMap& dof, bool reduced,
                      std::vector<Eigen::Triplet<double>>& trips,
                      Eigen::VectorXd& rhs) {
  SparseSystem sys;
  const int n = reduced ? dof.interior_count() : dof.total();
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  sys.b = std::move(rhs);
  return sys;
}

SparseSystem assemble_fve_impl(const RectMesh& mesh,
                               const DualStrategy& strategy,
                               const ManufacturedProblem& problem,
                               bool reduced) {
  strategy.validate();
  const int k = strategy.k();
  const DofMap dof = global_dof_map(mesh, k);
  const LagrangeBasis1D basis(lobatto_nodes(k));
  const QuadratureRule& quad = gauss_rule(2 * k + 3);
  const DirectionTables tx = make_tables(strategy.x, basis, quad);
  const DirectionTables ty = make_tables(strategy.y, basis, quad);

  const int nb = k + 1;            // 1D basis count
  const int nloc = nb * nb;        // local trial nodes = local sub-cells
  auto loc = [nb](int s, int t) { return t * nb + s; };

  Eigen::MatrixXd Ke(nloc, nloc);
  Eigen::VectorXd Fe(nloc);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.nx()) * mesh.ny() * nloc * nloc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(reduced ? dof.interior_count()
                                                      : dof.total());
  const CoefficientField& c = problem.coef;

  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const double hx = mesh.hx(i), hy = mesh.hy(j);
      const double sx = 2.0 / hx, sy = 2.0 / hy;
      const double cx0 = 0.5 * (mesh.x[i - 1] + mesh.x[i]);
      const double cy0 = 0.5 * (mesh.y[j - 1] + mesh.y[j]);
      auto phys_x = [&](double xhat) { return cx0 + 0.5 * hx * xhat; };
      auto phys_y = [&](double yhat) { return cy0 + 0.5 * hy * yhat; };
      Ke.setZero();
      Fe.setZero();

      // Vertical dual lines x = alpha^x_m: the flux through each segment
      // leaves the sub-cell on the left (outward normal +x) and enters
      // the one on the right.
      for (int m = 1; m <= k; ++m) {
        const double xl = phys_x(strategy.x.alpha[m - 1]);
        for (int t = 0; t <= k; ++t) {
          for (int g = 0; g < quad.size(); ++g) {
            const double yl = phys_y(ty.qp[t][g]);
            const double w = quad.weights[g] * ty.half[t] * 0.5 * hy;
            const double d11v = c.d11(xl, yl), d12v = c.d12(xl, yl);
            for (int qy = 0; qy < nb; ++qy) {
              for (int p = 0; p < nb; ++p) {
                const double gx = sx * tx.line_der[m - 1][p] * ty.val[t][g][qy];
                const double gy = sy * tx.line_val[m - 1][p] * ty.der[t][g][qy];
                const double flux = w * (d11v * gx + d12v * gy);
                Ke(loc(m - 1, t), loc(p, qy)) -= flux;
                Ke(loc(m, t), loc(p, qy)) += flux;
              }
            }
          }
        }
      }
      // Horizontal dual lines y = alpha^y_m.
      for (int m = 1; m <= k; ++m) {
        const double yl = phys_y(strategy.y.alpha[m - 1]);
        for (int s = 0; s <= k; ++s) {
          for (int g = 0; g < quad.size(); ++g) {
            const double xl = phys_x(tx.qp[s][g]);
            const double w = quad.weights[g] * tx.half[s] * 0.5 * hx;
            const double d12v = c.d12(xl, yl), d22v = c.d22(xl, yl);
            for (int qy = 0; qy < nb; ++qy) {
              for (int p = 0; p < nb; ++p) {
                const double gx = sx * tx.der[s][g][p] * ty.line_val[m - 1][qy];
                const double gy = sy * tx.val[s][g][p] * ty.line_der[m - 1][qy];
                const double flux = w * (d12v * gx + d22v * gy);
                Ke(loc(s, m - 1), loc(p, qy)) -= flux;
                Ke(loc(s, m), loc(p, qy)) += flux;
              }
            }
          }
        }
      }
      // Sub-cell volume terms and load.
      for (int t = 0; t <= k; ++t) {
        for (int s = 0; s <= k; ++s) {
          const int row = loc(s, t);
          for (int gy = 0; gy < quad.size(); ++gy) {
            const double yl = phys_y(ty.qp[t][gy]);
            const double wy = quad.weights[gy] * ty.half[t] * 0.5 * hy;
            for (int gx = 0; gx < quad.size(); ++gx) {
              const double xl = phys_x(tx.qp[s][gx]);
              const double w = wy * quad.weights[gx] * tx.half[s] * 0.5 * hx;
              Fe(row) += w * problem.f(xl, yl);
              const double q1v = c.q1(xl, yl), q2v = c.q2(xl, yl),
                           rv = c.r(xl, yl);
              if (q1v == 0.0 && q2v == 0.0 && rv == 0.0) continue;
              for (int qy = 0; qy < nb; ++qy) {
                for (int p = 0; p < nb; ++p) {
                  const double phi = tx.val[s][gx][p] * ty.val[t][gy][qy];
                  const double gxv = sx * tx.der[s][gx][p] * ty.val[t][gy][qy];
                  const double gyv = sy * tx.val[s][gx][p] * ty.der[t][gy][qy];
                  Ke(row, loc(p, qy)) +=
                      w * (q1v * gxv + q2v * gyv + rv * phi);
                }
              }
            }
          }
        }
      }
      // Scatter with boundary elimination (or full lattice for
      // diagnostics).
      for (int t = 0; t <= k; ++t) {
        for (int s = 0; s <= k; ++s) {
          const int In = k * (i - 1) + s, Jn = k * (j - 1) + t;
          const int row = reduced ? dof.interior_index(In, Jn)
                                  : dof.node(In, Jn);
          if (row < 0) continue;
          rhs[row] += Fe(loc(s, t));
          for (int qy = 0; qy < nb; ++qy) {
            for (int p = 0; p < nb; ++p) {
              const int Ic = k * (i - 1) + p, Jc = k * (j - 1) + qy;
              const int col = reduced ? dof.interior_index(Ic, Jc)
                                      : dof.node(Ic, Jc);
              if (col < 0) continue;
              const double v = Ke(loc(s, t), loc(p, qy));
              if (v != 0.0) trips.emplace_back(row, col, v);
            }
          }
        }
      }
    }
  }
  return finalize(dof, reduced, trips, rhs);
}

SparseSystem assemble_fem_impl(const RectMesh& mesh, int k,
                               const ManufacturedProblem& problem,
                               bool reduced) {
  const DofMap dof = global_dof_map(mesh, k);
  const LagrangeBasis1D basis(lobatto_nodes(k));
  const QuadratureRule& quad = gauss_rule(2 * k + 3);
  const int nb = k + 1, nloc = nb * nb, nq = quad.size();
  auto loc = [nb](int s, int t) { return t * nb + s; };

  // Basis tables over the full reference element.
  std::vector<std::vector<double>> val(nq, std::vector<double>(nb)),
      der(nq, std::vector<double>(nb));
  for (int g = 0; g < nq; ++g)
    for (int i = 0; i < nb; ++i) {
      val[g][i] = basis.value(i, quad.nodes[g]);
      der[g][i] = basis.deriv(i, quad.nodes[g]);
    }

  Eigen::MatrixXd Ke(nloc, nloc);
  Eigen::VectorXd Fe(nloc);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.nx()) * mesh.ny() * nloc * nloc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(reduced ? dof.interior_count()
                                                      : dof.total());
  const CoefficientField& c = problem.coef;

  for (int j = 1; j <= mesh.ny(); ++j) {
    for (int i = 1; i <= mesh.nx(); ++i) {
      const double hx = mesh.hx(i), hy = mesh.hy(j);
      const double sx = 2.0 / hx, sy = 2.0 / hy;
      Ke.setZero();
      Fe.setZero();
      for (int gy = 0; gy < nq; ++gy) {
        const double yl = map_to_element(mesh, i, j, 0.0, quad.nodes[gy]).y;
        for (int gx = 0; gx < nq; ++gx) {
          const double xl = map_to_element(mesh, i, j, quad.nodes[gx], 0.0).x;
          const double w =
              quad.weights[gx] * quad.weights[gy] * 0.25 * hx * hy;
          const double d11v = c.d11(xl, yl), d12v = c.d12(xl, yl),
                       d22v = c.d22(xl, yl), q1v = c.q1(xl, yl),
                       q2v = c.q2(xl, yl), rv = c.r(xl, yl),
                       fv = problem.f(xl, yl);
          for (int qy = 0; qy < nb; ++qy) {
            for (int p = 0; p < nb; ++p) {
              const int a = loc(p, qy);
              const double phi_a = val[gx][p] * val[gy][qy];
              const double ax = sx * der[gx][p] * val[gy][qy];
              const double ay = sy * val[gx][p] * der[gy][qy];
              Fe(a) += w * fv * phi_a;
              for (int ty = 0; ty < nb; ++ty) {
                for (int u = 0; u < nb; ++u) {
                  const int btrial = loc(u, ty);
                  const double bx = sx * der[gx][u] * val[gy][ty];
                  const double by = sy * val[gx][u] * der[gy][ty];
                  const double phi_b = val[gx][u] * val[gy][ty];
                  Ke(a, btrial) +=
                      w * (d11v * bx * ax + d12v * (bx * ay + by * ax) +
                           d22v * by * ay +
                           (q1v * bx + q2v * by + rv * phi_b) * phi_a);
                }
              }
            }
          }
        }
      }
      for (int t = 0; t <= k; ++t) {
        for (int s = 0; s <= k; ++s) {
          const int In = k * (i - 1) + s, Jn = k * (j - 1) + t;
          const int row = reduced ? dof.interior_index(In, Jn)
                                  : dof.node(In, Jn);
          if (row < 0) continue;
          rhs[row] += Fe(loc(s, t));
          for (int ty = 0; ty < nb; ++ty) {
            for (int u = 0; u < nb; ++u) {
              const int Ic = k * (i - 1) + u, Jc = k * (j - 1) + ty;
              const int col = reduced ? dof.interior_index(Ic, Jc)
                                      : dof.node(Ic, Jc);
              if (col < 0) continue;
              const double v = Ke(loc(s, t), loc(u, ty));
              if (v != 0.0) trips.emplace_back(row, col, v);
            }
          }
        }
      }
    }
  }
  return finalize(dof, reduced, trips, rhs);
}

}  // namespace

SparseSystem assemble_fve(const RectMesh& mesh, const DualStrategy& strategy,
                          const ManufacturedProblem& problem) {
  return assemble_fve_impl(mesh, strategy, problem, /*reduced=*/true);
}

SparseSystem assemble_fve_unreduced(const RectMesh& mesh,
                                    const DualStrategy& strategy,
                                    const ManufacturedProblem& problem) {
  return assemble_fve_impl(mesh, strategy, problem, /*reduced=*/false);
}

SparseSystem assemble_fem(const RectMesh& mesh, int k,
                          const ManufacturedProblem& problem) {
  return assemble_fem_impl(mesh, k, problem, /*reduced=*/true);
}

SparseSystem assemble_fem_unreduced(const RectMesh& mesh, int k,
                                    const ManufacturedProblem& problem) {
  return assemble_fem_impl(mesh, k, problem, /*reduced=*/false);
}

DiscreteField::DiscreteField(RectMesh mesh, int k, Eigen::VectorXd coeffs)
    : mesh_(std::move(mesh)),
      k_(k),
      coeffs_(std::move(coeffs)),
      basis_(lobatto_nodes(k)) {
  const DofMap dof = global_dof_map(mesh_, k_);
  if (coeffs_.size() != dof.total())
    throw std::invalid_argument("DiscreteField: coefficient count mismatch");
}

std::pair<int, int> DiscreteField::locate(double x, double y) const {
  const auto& gx = mesh_.x;
  const auto& gy = mesh_.y;
  if (x < gx.front() - 1e-12 || x > gx.back() + 1e-12 ||
      y < gy.front() - 1e-12 || y > gy.back() + 1e-12)
    throw std::invalid_argument("DiscreteField: point outside the domain");
  int i = static_cast<int>(std::upper_bound(gx.begin(), gx.end(), x) -
                           gx.begin());
  int j = static_cast<int>(std::upper_bound(gy.begin(), gy.end(), y) -
                           gy.begin());
  i = std::clamp(i, 1, mesh_.nx());
  j = std::clamp(j, 1, mesh_.ny());
  return {i, j};
}

double DiscreteField::value_on_element(int i, int j, double x, double y) const {
  const double xhat = (2.0 * x - (mesh_.x[i - 1] + mesh_.x[i])) / mesh_.hx(i);
  const double yhat = (2.0 * y - (mesh_.y[j - 1] + mesh_.y[j])) / mesh_.hy(j);
  const DofMap dof = global_dof_map(mesh_, k_);
  double v = 0.0;
  for (int t = 0; t <= k_; ++t) {
    const double by = basis_.value(t, yhat);
    if (by == 0.0) continue;
    double sx = 0.0;
    for (int s = 0; s <= k_; ++s)
      sx += coeffs_[dof.global_node(i, j, s, t)] * basis_.value(s, xhat);
    v += sx * by;
  }
  return v;
}

std::array<double, 2> DiscreteField::gradient_on_element(int i, int j, double x,
                                                         double y) const {
  const double xhat = (2.0 * x - (mesh_.x[i - 1] + mesh_.x[i])) / mesh_.hx(i);
  const double yhat = (2.0 * y - (mesh_.y[j - 1] + mesh_.y[j])) / mesh_.hy(j);
  const DofMap dof = global_dof_map(mesh_, k_);
  double gx = 0.0, gy = 0.0;
  for (int t = 0; t <= k_; ++t) {
    const double by = basis_.value(t, yhat);
    const double dy = basis_.deriv(t, yhat);
    for (int s = 0; s <= k_; ++s) {
      const double cv = coeffs_[dof.global_node(i, j, s, t)];
      gx += cv * basis_.deriv(s, xhat) * by;
      gy += cv * basis_.value(s, xhat) * dy;
    }
  }
  return {gx * 2.0 / mesh_.hx(i), gy * 2.0 / mesh_.hy(j)};
}

double DiscreteField::value(double x, double y) const {
  const auto [i, j] = locate(x, y);
  return value_on_element(i, j, x, y);
}

std::array<double, 2> DiscreteField::gradient(double x, double y) const {
  const auto [i, j] = locate(x, y);
  return gradient_on_element(i, j, x, y);
}

DiscreteField solve(const SparseSystem& system, const RectMesh& mesh, int k,
                    double tol, int max_refine) {
  const DofMap dof = global_dof_map(mesh, k);
  if (system.n() != dof.interior_count())
    throw std::invalid_argument("solve: system/mesh dimension mismatch");

  Eigen::SparseMatrix<double> A = system.A;  // column-major copy for LU
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverFailure("solve: sparse LU factorization failed (singular system?)",
                        std::numeric_limits<double>::infinity());

  const double bnorm = std::max(system.b.norm(),
                                std::numeric_limits<double>::min());
  Eigen::VectorXd xv = lu.solve(system.b);
  double rel = (system.b - system.A * xv).norm() / bnorm;
  for (int round = 0; round < max_refine && rel > tol; ++round) {
    const Eigen::VectorXd res = system.b - system.A * xv;
    xv += lu.solve(res);
    rel = (system.b - system.A * xv).norm() / bnorm;
  }
  if (!(rel <= tol))
    throw SolverFailure("solve: relative residual " + std::to_string(rel) +
                            " above tolerance",
                        rel);

  Eigen::VectorXd full = Eigen::VectorXd::Zero(dof.total());
  for (int J = 1; J < dof.nodes_y() - 1; ++J)
    for (int I = 1; I < dof.nodes_x() - 1; ++I)
      full[dof.node(I, J)] = xv[dof.interior_index(I, J)];
  return DiscreteField(mesh, k, std::move(full));
}

DiscreteField interpolate(const RectMesh& mesh, int k, const ScalarField& f,
                          bool zero_boundary) {
  const DofMap dof = global_dof_map(mesh, k);
  const auto xs = trial_node_coords(mesh.x, k);
  const auto ys = trial_node_coords(mesh.y, k);
  Eigen::VectorXd coeffs(dof.total());
  for (int J = 0; J < dof.nodes_y(); ++J)
    for (int I = 0; I < dof.nodes_x(); ++I)
      coeffs[dof.node(I, J)] =
          (zero_boundary && dof.is_boundary(I, J)) ? 0.0 : f(xs[I], ys[J]);
  return DiscreteField(mesh, k, std::move(coeffs));
}

void write_matrix_market(const SparseSystem& system, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("write_matrix_market: cannot open " + path);
  std::fprintf(fp, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(fp, "%d %d %ld\n", system.n(), system.n(),
               static_cast<long>(system.A.nonZeros()));
  for (int r = 0; r < system.A.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             system.A, r);
         it; ++it)
      std::fprintf(fp, "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                   static_cast<int>(it.col()) + 1, it.value());
  std::fclose(fp);
}

}  // namespace fve
