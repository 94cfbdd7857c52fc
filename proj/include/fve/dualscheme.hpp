#pragma once

// Dual strategies: the per-direction dual parameters alpha and
// interpolation parameters a tied together by the k-r-order
// orthogonality (moment) condition
//
//   sum_{s=1..k} (a_s - a_{s-1}) alpha_s^{i+1} = (1 - (-1)^i)/(i+2),
//   i = 0..r,       k-1 <= r <= 2k-2,
//
// equivalently: the weights A_s = a_s - a_{s-1} form a k-point quadrature
// at the alpha_s that is exact on polynomials of degree <= r+1.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fve {

struct DirectionStrategy {
  int k = 0;                  // trial order
  int r = 0;                  // orthogonality order, k-1 <= r <= 2k-2
  std::vector<double> alpha;  // k dual parameters, strictly increasing, in (-1,1)
  std::vector<double> a;      // k+1 interpolation parameters, a[0]=-1 < ... < a[k]=1

  // Quadrature weights A_s = a_s - a_{s-1}, s = 1..k.
  std::vector<double> weights() const;
  // Throws OrderingViolation / std::invalid_argument on malformed data.
  void validate() const;
};

struct DualStrategy {
  std::string name;  // preset name or empty for custom strategies
  DirectionStrategy x;
  DirectionStrategy y;

  int k() const { return x.k; }
  void validate() const;
};

// residual_i = sum_s (a_s - a_{s-1}) alpha_s^{i+1} - (1-(-1)^i)/(i+2),
// for i = 0..r.
std::vector<double> orthogonality_residual(const std::vector<double>& alpha,
                                           const std::vector<double>& a,
                                           int r);

// Newton-solve the moment equations for the k alphas plus the free
// interpolation parameters. `interior_a` has k-1 entries for a_1..a_{k-1};
// a fixed entry carries its value, an empty entry is an unknown. The
// number of unknowns (k + #free) must equal r+1. Guesses for the free
// interpolation parameters are given in index order.
DirectionStrategy solve_strategy(int k, int r,
                                 const std::vector<std::optional<double>>& interior_a,
                                 const std::vector<double>& alpha_guess,
                                 const std::vector<double>& free_a_guess = {});

// alpha at the Gauss nodes, a from the cumulative Gauss weights; achieves
// the maximal order r = 2k-2.
DirectionStrategy gaussian_duality(int k);

// The six tabulated schemes: FVE-3-2, FVE-3-3, FVE-3-4, FVE-4-3,
// FVE-4-4, FVE-4-6. Printed 4-digit parameters serve as Newton seeds;
// the returned strategy is re-solved to machine precision.
DualStrategy preset(const std::string& name);
const std::vector<std::string>& preset_names();

// Max quadrature error of the weights A_s at nodes alpha_s over monomials
// of degree <= r+1.
double verify_dual_quadrature(const DirectionStrategy& s);

// Scheme-definition JSON:
// {"name": ..., "k": int, "r": int, "x": {"alpha": [...], "a": [...]}, "y": {...}}
void to_json(nlohmann::json& j, const DualStrategy& s);
void from_json(const nlohmann::json& j, DualStrategy& s);

}  // namespace fve
