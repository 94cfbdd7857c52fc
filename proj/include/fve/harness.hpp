#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fve/dualscheme.hpp"
#include "fve/errnorms.hpp"

namespace fve {

// A convergence study: one problem, one scheme, a mesh family, and a norm
// selection. Scheme names are preset names ("FVE-3-3"), "FE-k" for the
// Galerkin comparison runs, or a path to a scheme-definition JSON file.
struct StudyConfig {
  std::string problem = "bvp-d";
  std::string scheme;
  std::string kind = "auto";  // "fve" | "fem" | "auto" (inferred from scheme)
  std::vector<int> mesh_sizes;
  std::vector<std::string> mesh_files;  // overrides mesh_sizes when nonempty
  double perturb = 0.0;
  unsigned long seed = 1;
  std::vector<std::string> norms = {"l2", "h1"};
  std::string format = "markdown";  // csv | markdown | json
  std::string out;                  // empty = stdout
  bool check_reference = false;
  double tolerance_factor = 2.0;    // multiplicative band on error values
  double order_band = 0.3;          // absolute band on observed orders
};

StudyConfig config_from_json(const nlohmann::json& j);

// The scheme a config names, normalized: discretization kind, polynomial
// order, and the dual strategy used for assembly (fve) and for the
// evaluation point sets (both kinds; FE-k uses the Gaussian strategy's
// points).
struct ResolvedScheme {
  std::string name;
  std::string kind;  // "fve" | "fem"
  int k = 0;
  DualStrategy strategy;
};

ResolvedScheme resolve_scheme(const std::string& scheme,
                              const std::string& kind = "auto");

struct StudyResult {
  StudyConfig config;
  ResolvedScheme scheme;
  std::vector<ErrorReport> reports;
  std::map<std::string, std::vector<std::optional<double>>> orders;
};

// Runs the study: per mesh, assemble and solve (relative residual 1e-12),
// evaluate the requested norms, then estimate orders. Meshes may be
// processed concurrently (FVE_THREADS caps workers, 0/unset = hardware);
// reports are collected in mesh order and the result is deterministic.
StudyResult run_study(const StudyConfig& config);

// One published convergence column: errors at a mesh family and the orders
// between consecutive meshes.
struct ReferenceRow {
  std::string scheme;
  std::string problem;
  std::string norm;
  std::vector<int> mesh_n;
  std::vector<double> errors;
  std::vector<double> orders;  // size mesh_n.size()-1, between consecutive N
};

class ReferenceTable {
 public:
  static const ReferenceTable& builtin();
  const std::vector<ReferenceRow>& rows() const { return rows_; }
  // nullptr when the (scheme, problem, norm) key is absent.
  const ReferenceRow* find(const std::string& scheme, const std::string& problem,
                           const std::string& norm) const;
  // Canonical text form; guarded by a checksum test against transcription
  // drift.
  std::string serialize() const;

 private:
  std::vector<ReferenceRow> rows_;
};

struct ReferenceCheck {
  std::string description;
  double expected = 0.0;
  double actual = 0.0;
  bool pass = false;
};

// Checks every computed cell that has a reference counterpart: error values
// within the multiplicative factor, orders within the absolute band. Throws
// MissingReferenceCell when a requested norm has no reference column or no
// mesh size overlaps the published family.
std::vector<ReferenceCheck> compare_reference(const StudyResult& result,
                                              const ReferenceTable& table,
                                              double factor = 2.0,
                                              double order_band = 0.3);

std::string emit_csv(const StudyResult& result);
std::string emit_markdown(const StudyResult& result);
std::string emit_json(const StudyResult& result);

// Renders in the requested format to the path (or stdout when empty).
void emit(const StudyResult& result, const std::string& format,
          const std::string& path);

}  // namespace fve
