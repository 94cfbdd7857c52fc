#pragma once

#include <stdexcept>
#include <string>

namespace fve {

// Newton iteration failed to reach tolerance (bad seed, infeasible
// parameter fixing, or an ill-conditioned Jacobian).
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solved parameter set violates the required strict ordering.
struct OrderingViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownPreset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The correction constraint system is (numerically) singular, which
// signals a degenerate dual strategy.
struct SingularConstraintSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A residual-polynomial root came out complex or outside [-1,1]; the
// point structure degenerates for such a strategy. Reported, not repaired.
struct ComplexOrOutOfRangeRoot : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear solver could not meet the requested relative residual.
struct SolverFailure : std::runtime_error {
  double achieved_residual;
  SolverFailure(const std::string& msg, double res)
      : std::runtime_error(msg), achieved_residual(res) {}
};

// A reference-comparison was requested for a (scheme, problem, norm, mesh)
// combination that the built-in table does not contain.
struct MissingReferenceCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fve
