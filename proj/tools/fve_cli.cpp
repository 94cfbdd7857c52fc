#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "fve/assembly.hpp"
#include "fve/dualscheme.hpp"
#include "fve/errors.hpp"
#include "fve/harness.hpp"
#include "fve/meshgen.hpp"
#include "fve/superstruct.hpp"

namespace {

fve::RectMesh build_mesh(const fve::StudyConfig& cfg, size_t idx) {
  if (!cfg.mesh_files.empty()) {
    std::ifstream in(cfg.mesh_files[idx]);
    if (!in)
      throw std::runtime_error("cannot open mesh file " + cfg.mesh_files[idx]);
    nlohmann::json j;
    in >> j;
    return fve::mesh_from_json(j);
  }
  const int n = cfg.mesh_sizes.at(idx);
  return cfg.perturb > 0.0 ? fve::perturbed_mesh(n, n, cfg.perturb, cfg.seed)
                           : fve::uniform_mesh(n, n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Convergence studies for bi-k finite volume element schemes on "
      "rectangular meshes"};

  std::string config_path, problem, scheme, kind, format, out;
  std::string export_points, dump_matrix;
  std::vector<int> mesh_sizes;
  std::vector<std::string> norms;
  double perturb = 0.0, tolerance_factor = 2.0, order_band = 0.3;
  unsigned long seed = 1;
  bool check_reference = false, list_presets = false;

  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override its keys");
  app.add_option("--problem", problem, "Problem: bvp-d, bvp-dr, or bvp-dqr");
  app.add_option("--scheme", scheme,
                 "Scheme: preset name (see --list-presets), FE-k, or a "
                 "scheme-definition JSON path");
  app.add_option("--kind", kind, "Discretization kind: fve or fem");
  app.add_option("--mesh-sizes", mesh_sizes,
                 "Mesh subdivision counts, e.g. 12,16,20,24")
      ->delimiter(',');
  app.add_option("--perturb", perturb,
                 "Interior grid-line perturbation amplitude in [0, 0.5)");
  app.add_option("--seed", seed, "Perturbation RNG seed");
  app.add_option("--norms", norms,
                 "Norms: l2, h1, h1-semi, h1x-super, l2-super, h1x-ultra")
      ->delimiter(',');
  app.add_option("--format", format, "Output format: csv, markdown, or json");
  app.add_option("--out", out, "Output path (default: stdout)");
  app.add_flag("--check-reference", check_reference,
               "Compare computed cells against the embedded published "
               "values; nonzero exit on mismatch");
  app.add_option("--tolerance-factor", tolerance_factor,
                 "Multiplicative band for reference error values (default 2)");
  app.add_option("--order-band", order_band,
                 "Absolute band for reference orders (default 0.3)");
  app.add_flag("--list-presets", list_presets,
               "List built-in dual-strategy presets and exit");
  app.add_option("--export-points", export_points,
                 "Write the scheme's point sets as JSON to this path");
  app.add_option("--dump-matrix", dump_matrix,
                 "Write the first mesh's assembled matrix (MatrixMarket) to "
                 "this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const auto& name : fve::preset_names()) {
        const fve::DualStrategy s = fve::preset(name);
        std::printf("%-10s k=%d r=%d\n", name.c_str(), s.k(), s.x.r);
      }
      return 0;
    }

    fve::StudyConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config " + config_path);
      nlohmann::json j;
      in >> j;
      cfg = fve::config_from_json(j);
    }
    if (!problem.empty()) cfg.problem = problem;
    if (!scheme.empty()) cfg.scheme = scheme;
    if (!kind.empty()) cfg.kind = kind;
    if (!mesh_sizes.empty()) cfg.mesh_sizes = mesh_sizes;
    if (app.count("--perturb")) cfg.perturb = perturb;
    if (app.count("--seed")) cfg.seed = seed;
    if (!norms.empty()) cfg.norms = norms;
    if (!format.empty()) cfg.format = format;
    if (app.count("--out")) cfg.out = out;
    if (check_reference) cfg.check_reference = true;
    if (app.count("--tolerance-factor")) cfg.tolerance_factor = tolerance_factor;
    if (app.count("--order-band")) cfg.order_band = order_band;

    if (!export_points.empty()) {
      const fve::ResolvedScheme rs = fve::resolve_scheme(cfg.scheme, cfg.kind);
      const nlohmann::json j = fve::point_sets(rs.strategy);
      std::ofstream o(export_points);
      if (!o) throw std::runtime_error("cannot open " + export_points);
      o << j.dump(2) << '\n';
      if (cfg.mesh_sizes.empty() && cfg.mesh_files.empty()) return 0;
    }

    if (!dump_matrix.empty()) {
      const fve::ResolvedScheme rs = fve::resolve_scheme(cfg.scheme, cfg.kind);
      const fve::RectMesh mesh = build_mesh(cfg, 0);
      const fve::ManufacturedProblem prob = fve::problem_by_name(cfg.problem);
      const fve::SparseSystem sys =
          rs.kind == "fve" ? fve::assemble_fve(mesh, rs.strategy, prob)
                           : fve::assemble_fem(mesh, rs.k, prob);
      fve::write_matrix_market(sys, dump_matrix);
      if (cfg.mesh_sizes.size() + cfg.mesh_files.size() < 2) return 0;
    }

    const fve::StudyResult result = fve::run_study(cfg);
    fve::emit(result, cfg.format, cfg.out);

    if (cfg.check_reference) {
      const auto checks =
          fve::compare_reference(result, fve::ReferenceTable::builtin(),
                                 cfg.tolerance_factor, cfg.order_band);
      bool all = true;
      for (const auto& c : checks) {
        std::fprintf(stderr, "[%s] %s: computed %.6e, reference %.6e\n",
                     c.pass ? "PASS" : "FAIL", c.description.c_str(), c.actual,
                     c.expected);
        all = all && c.pass;
      }
      std::fprintf(stderr, "reference check: %s (%zu cells)\n",
                   all ? "PASS" : "FAIL", checks.size());
      return all ? 0 : 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
