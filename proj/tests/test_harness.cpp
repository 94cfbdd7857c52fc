#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fve/errors.hpp"
#include "fve/harness.hpp"
#include "fve/meshgen.hpp"

using namespace fve;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

StudyConfig small_config() {
  StudyConfig c;
  c.problem = "bvp-d";
  c.scheme = "FE-2";
  c.mesh_sizes = {2, 4};
  c.norms = {"l2", "h1"};
  return c;
}

}  // namespace

TEST_CASE("resolve_scheme: presets, Galerkin schemes, and kind inference") {
  const ResolvedScheme fve3 = resolve_scheme("FVE-3-3");
  CHECK(fve3.kind == "fve");
  CHECK(fve3.k == 3);
  CHECK(fve3.strategy.name == "FVE-3-3");

  const ResolvedScheme fe3 = resolve_scheme("FE-3");
  CHECK(fe3.kind == "fem");
  CHECK(fe3.k == 3);
  // The Galerkin runs evaluate at the Gaussian-duality points.
  const DirectionStrategy g3 = gaussian_duality(3);
  for (int i = 0; i < 3; ++i) {
    CHECK(fe3.strategy.x.alpha[i] == doctest::Approx(g3.alpha[i]).epsilon(1e-15));
    CHECK(fe3.strategy.y.alpha[i] == doctest::Approx(g3.alpha[i]).epsilon(1e-15));
  }

  CHECK(resolve_scheme("FVE-4-4", "auto").kind == "fve");
  CHECK_THROWS_AS(resolve_scheme("FE-3", "fve"), std::invalid_argument);
  CHECK_THROWS_AS(resolve_scheme("FVE-5-5"), UnknownPreset);
  CHECK_THROWS_AS(resolve_scheme(""), UnknownPreset);
  CHECK_THROWS_AS(resolve_scheme("FE-0"), UnknownPreset);
}

TEST_CASE("resolve_scheme loads scheme-definition files") {
  const DualStrategy custom = preset("FVE-4-3");
  nlohmann::json j;
  to_json(j, custom);
  j["name"] = "custom-43";
  const std::string path = "test_scheme_def.json";
  {
    std::ofstream out(path);
    out << j.dump();
  }
  const ResolvedScheme r = resolve_scheme(path);
  CHECK(r.kind == "fve");
  CHECK(r.k == 4);
  CHECK(r.name == path);
  CHECK(r.strategy.name == "custom-43");
  CHECK(r.strategy.x.alpha == custom.x.alpha);
  std::remove(path.c_str());
}

TEST_CASE("config_from_json parses fields and keeps defaults") {
  const nlohmann::json j = {
      {"problem", "bvp-dqr"}, {"scheme", "FVE-3-2"},
      {"mesh_sizes", {4, 8, 16}}, {"norms", {"h1x-super"}},
      {"perturb", 0.1},           {"seed", 9},
      {"format", "csv"},          {"check_reference", true},
      {"tolerance_factor", 3.0},  {"order_band", 0.5},
  };
  const StudyConfig c = config_from_json(j);
  CHECK(c.problem == "bvp-dqr");
  CHECK(c.scheme == "FVE-3-2");
  CHECK(c.mesh_sizes == std::vector<int>{4, 8, 16});
  CHECK(c.norms == std::vector<std::string>{"h1x-super"});
  CHECK(c.perturb == 0.1);
  CHECK(c.seed == 9);
  CHECK(c.format == "csv");
  CHECK(c.check_reference);
  CHECK(c.tolerance_factor == 3.0);
  CHECK(c.order_band == 0.5);

  const StudyConfig d = config_from_json(nlohmann::json{{"scheme", "FE-2"}});
  CHECK(d.problem == "bvp-d");
  CHECK(d.kind == "auto");
  CHECK(d.norms == std::vector<std::string>{"l2", "h1"});
  CHECK(d.tolerance_factor == 2.0);
}

TEST_CASE("run_study produces decreasing errors and sane metadata") {
  const StudyResult r = run_study(small_config());
  REQUIRE(r.reports.size() == 2);
  CHECK(r.reports[0].h == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.reports[1].h == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.reports[0].dofs == 9);   // (2*2+1)^2 lattice, interior only: 3^2
  CHECK(r.reports[1].dofs == 49);  // (2*4-1)^2
  CHECK(r.reports[0].wall_seconds > 0.0);
  for (const char* n : {"l2", "h1"}) {
    CHECK(r.reports[0].norms.at(n) > r.reports[1].norms.at(n));
    CHECK(r.orders.at(n).size() == 2);
    CHECK(!r.orders.at(n)[0].has_value());
    // Quadratic elements: L2 order 3, H1 order 2.
    const double want = std::string(n) == "l2" ? 3.0 : 2.0;
    CHECK(*r.orders.at(n)[1] == doctest::Approx(want).epsilon(0.2));
  }

  StudyConfig bad = small_config();
  bad.mesh_sizes = {};
  CHECK_THROWS_AS(run_study(bad), std::invalid_argument);
  bad.mesh_sizes = {1, 2};
  CHECK_THROWS_AS(run_study(bad), std::invalid_argument);
  // A bad norm is detected inside the per-mesh worker; the study wraps it
  // with the offending mesh label.
  bad = small_config();
  bad.norms = {"spectral-gap"};
  CHECK_THROWS_AS(run_study(bad), std::runtime_error);
}

TEST_CASE("run_study is deterministic: identical configs give byte-identical "
          "CSV") {
  StudyConfig c = small_config();
  c.problem = "bvp-dr";
  c.scheme = "FVE-3-3";
  c.mesh_sizes = {3, 6};
  c.perturb = 0.2;
  c.seed = 5;
  c.norms = {"l2", "h1x-ultra"};
  const std::string a = emit_csv(run_study(c));
  const std::string b = emit_csv(run_study(c));
  CHECK(a == b);
  CHECK(a.find("l2,h1x-ultra,l2_order,h1x-ultra_order") != std::string::npos);
}

TEST_CASE("mesh files drive the study when provided") {
  const RectMesh m1 = uniform_mesh(3, 3);
  const RectMesh m2 = perturbed_mesh(6, 6, 0.1, 4);
  const char* p1 = "test_mesh_a.json";
  const char* p2 = "test_mesh_b.json";
  for (auto [path, mesh] : {std::pair{p1, &m1}, {p2, &m2}}) {
    nlohmann::json j;
    to_json(j, *mesh);
    std::ofstream out(path);
    out << j.dump();
  }
  StudyConfig c = small_config();
  c.mesh_files = {p1, p2};
  c.mesh_sizes = {};  // ignored in favour of the files
  const StudyResult r = run_study(c);
  REQUIRE(r.reports.size() == 2);
  CHECK(r.reports[0].h == doctest::Approx(m1.h()).epsilon(1e-14));
  CHECK(r.reports[1].h == doctest::Approx(m2.h()).epsilon(1e-14));
  std::remove(p1);
  std::remove(p2);
}

TEST_CASE("reference table: content, lookup, and frozen checksum") {
  const ReferenceTable& table = ReferenceTable::builtin();
  CHECK(table.rows().size() == 12);

  const ReferenceRow* row = table.find("FVE-3-3", "bvp-dr", "h1x-ultra");
  REQUIRE(row != nullptr);
  CHECK(row->mesh_n == std::vector<int>{12, 16, 20, 24});
  CHECK(row->errors[1] == doctest::Approx(6.9806e-07).epsilon(1e-12));
  CHECK(row->orders[0] == doctest::Approx(4.9937).epsilon(1e-12));

  const ReferenceRow* fe4 = table.find("FE-4", "bvp-d", "h1x-ultra");
  REQUIRE(fe4 != nullptr);
  CHECK(fe4->mesh_n == std::vector<int>{8, 12, 16, 20});
  CHECK(fe4->errors[0] == doctest::Approx(3.3702e-07).epsilon(1e-12));

  CHECK(table.find("FVE-3-3", "bvp-d", "l2-super") == nullptr);
  CHECK(table.find("FVE-9-9", "bvp-d", "h1x-ultra") == nullptr);

  for (const ReferenceRow& r : table.rows()) {
    CHECK(r.orders.size() == r.mesh_n.size() - 1);
    CHECK(r.errors.size() == r.mesh_n.size());
    for (size_t i = 1; i < r.errors.size(); ++i) CHECK(r.errors[i] < r.errors[i - 1]);
  }

  // Transcription tripwire: the serialized table must not drift.
  const std::string text = table.serialize();
  CHECK(text.size() == 1210);
  CHECK(fnv1a(text) == 0xde519dbf76f1ff18ull);
}

TEST_CASE("compare_reference: banded error checks and exact-family order "
          "checks") {
  // Synthesize a result that matches the published column exactly.
  const ReferenceTable& table = ReferenceTable::builtin();
  const ReferenceRow* row = table.find("FVE-3-3", "bvp-dr", "h1x-ultra");
  REQUIRE(row != nullptr);

  StudyResult r;
  r.config.problem = "bvp-dr";
  r.config.scheme = "FVE-3-3";
  r.config.mesh_sizes = row->mesh_n;
  r.config.norms = {"h1x-ultra"};
  r.scheme = resolve_scheme("FVE-3-3");
  for (size_t m = 0; m < row->mesh_n.size(); ++m) {
    ErrorReport rep;
    rep.h = 1.0 / row->mesh_n[m];
    rep.norms["h1x-ultra"] = row->errors[m];
    r.reports.push_back(rep);
  }
  r.orders = estimate_orders(r.reports);

  const auto checks = compare_reference(r, table);
  CHECK(checks.size() == 7);  // 4 error cells + 3 order cells
  for (const auto& c : checks) CHECK(c.pass);

  // A 3x deviation in one cell fails that cell only.
  r.reports[2].norms["h1x-ultra"] = row->errors[2] * 3.0;
  r.orders = estimate_orders(r.reports);
  int fails = 0;
  for (const auto& c : compare_reference(r, table))
    if (!c.pass) ++fails;
  CHECK(fails >= 1);
  r.reports[2].norms["h1x-ultra"] = row->errors[2];
  r.orders = estimate_orders(r.reports);

  // Partial mesh overlap: error cells only, no order comparisons.
  StudyResult partial = r;
  partial.config.mesh_sizes = {16, 24};
  partial.reports = {r.reports[1], r.reports[3]};
  partial.orders = estimate_orders(partial.reports);
  const auto pc = compare_reference(partial, table);
  CHECK(pc.size() == 2);

  // Unknown norms and disjoint mesh families are reported loudly.
  StudyResult missing = r;
  missing.config.norms = {"l2"};
  missing.reports[0].norms["l2"] = 1.0;
  CHECK_THROWS_AS(compare_reference(missing, table), MissingReferenceCell);
  StudyResult disjoint = r;
  disjoint.config.mesh_sizes = {7, 9, 11, 13};
  CHECK_THROWS_AS(compare_reference(disjoint, table), MissingReferenceCell);
  CHECK_THROWS_AS(compare_reference(r, table, 0.5), std::invalid_argument);
}

TEST_CASE("emitters render the study in all three formats") {
  StudyConfig c = small_config();
  c.norms = {"l2"};
  const StudyResult r = run_study(c);

  const std::string csv = emit_csv(r);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "h,dofs,l2,l2_order");
  int rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty()) ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 2);

  const std::string md = emit_markdown(r);
  CHECK(md.find("| h | dofs | l2 | order |") == 0);
  CHECK(md.find("\\") != std::string::npos);  // first row has no order

  const nlohmann::json j = nlohmann::json::parse(emit_json(r));
  CHECK(j.at("scheme") == "FE-2");
  CHECK(j.at("kind") == "fem");
  CHECK(j.at("reports").size() == 2);
  CHECK(j.at("orders").at("l2")[0].is_null());
  CHECK(j.at("orders").at("l2")[1].is_number());
  CHECK(j.at("reports")[1].at("dofs") == 49);

  // File output and the unknown-format guard.
  const char* path = "test_emit_out.csv";
  emit(r, "csv", path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == csv);
  std::remove(path);
  CHECK_THROWS_AS(emit(r, "yaml", ""), std::invalid_argument);
}

TEST_CASE("perturbed studies report the actual mesh resolution") {
  StudyConfig c = small_config();
  c.scheme = "FVE-3-3";
  c.problem = "bvp-dr";
  c.mesh_sizes = {4, 8};
  c.perturb = 0.3;
  c.seed = 1;
  c.norms = {"l2"};
  const StudyResult r = run_study(c);
  const RectMesh m4 = perturbed_mesh(4, 4, 0.3, 1);
  const RectMesh m8 = perturbed_mesh(8, 8, 0.3, 1);
  CHECK(r.reports[0].h == doctest::Approx(m4.h()).epsilon(1e-14));
  CHECK(r.reports[1].h == doctest::Approx(m8.h()).epsilon(1e-14));
  CHECK(r.reports[0].h > 1.0 / 4);  // jitter stretches the widest cell
}
