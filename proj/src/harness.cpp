#include "fve/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "fve/assembly.hpp"
#include "fve/errors.hpp"
#include "fve/meshgen.hpp"
#include "fve/pdemodel.hpp"

namespace fve {

namespace {

int thread_count(size_t jobs) {
  long t = 0;
  if (const char* env = std::getenv("FVE_THREADS")) t = std::atol(env);
  if (t <= 0) t = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(std::min<size_t>(static_cast<size_t>(t), jobs));
}

ErrorReport run_one(const RectMesh& mesh, double h,
                    const ResolvedScheme& scheme,
                    const ManufacturedProblem& prob,
                    const std::vector<std::string>& norms) {
  const auto t0 = std::chrono::steady_clock::now();
  const SparseSystem sys =
      scheme.kind == "fve" ? assemble_fve(mesh, scheme.strategy, prob)
                           : assemble_fem(mesh, scheme.k, prob);
  const DiscreteField uh = solve(sys, mesh, scheme.k);

  ErrorReport rep;
  rep.h = h;
  rep.dofs = sys.n();
  const ElementFn ev = make_value_error(prob, uh);
  const ElementFn ex = make_dx_error(prob, uh);
  const ElementFn ey = make_dy_error(prob, uh);
  std::optional<GlobalNorms> glob;
  for (const auto& name : norms) {
    if (name == "l2" || name == "h1" || name == "h1-semi") {
      if (!glob) glob = global_norms(ev, ex, ey, mesh, scheme.k);
      rep.norms[name] = name == "l2"        ? glob->l2
                        : name == "h1-semi" ? glob->h1_semi
                                            : std::hypot(glob->l2, glob->h1_semi);
    } else if (name == "h1x-super") {
      rep.norms[name] = norm_h1x_super(ex, mesh, scheme.strategy);
    } else if (name == "l2-super") {
      rep.norms[name] = norm_l2_super(ev, mesh, scheme.strategy);
    } else if (name == "h1x-ultra") {
      rep.norms[name] = norm_h1x_ultra(ex, mesh, scheme.strategy);
    } else {
      throw std::invalid_argument("run_study: unknown norm '" + name + "'");
    }
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

ResolvedScheme resolve_scheme(const std::string& scheme,
                              const std::string& kind) {
  if (scheme.empty()) throw UnknownPreset("no scheme given");
  ResolvedScheme r;
  r.name = scheme;
  if (scheme.rfind("FE-", 0) == 0) {
    r.kind = "fem";
    try {
      r.k = std::stoi(scheme.substr(3));
    } catch (const std::exception&) {
      throw UnknownPreset("malformed scheme name: " + scheme);
    }
    if (r.k < 1 || r.k > 8)
      throw UnknownPreset("unsupported order in scheme name: " + scheme);
    const DirectionStrategy g = gaussian_duality(r.k);
    r.strategy.name = scheme;
    r.strategy.x = g;
    r.strategy.y = g;
    if (kind == "fve")
      throw std::invalid_argument("scheme " + scheme + " requires kind fem");
    return r;
  }

  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), scheme) != names.end()) {
    r.strategy = preset(scheme);
  } else if (std::filesystem::exists(scheme)) {
    std::ifstream in(scheme);
    nlohmann::json j;
    in >> j;
    r.strategy = j.get<DualStrategy>();
    if (r.strategy.name.empty()) r.strategy.name = scheme;
  } else {
    throw UnknownPreset("unknown scheme (not a preset, not a file): " + scheme);
  }
  r.k = r.strategy.k();
  r.kind = kind == "fem" ? "fem" : "fve";
  return r;
}

StudyConfig config_from_json(const nlohmann::json& j) {
  StudyConfig c;
  if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
  if (j.contains("scheme")) c.scheme = j.at("scheme").get<std::string>();
  if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
  if (j.contains("mesh_sizes"))
    c.mesh_sizes = j.at("mesh_sizes").get<std::vector<int>>();
  if (j.contains("mesh_files"))
    c.mesh_files = j.at("mesh_files").get<std::vector<std::string>>();
  if (j.contains("perturb")) c.perturb = j.at("perturb").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long>();
  if (j.contains("norms"))
    c.norms = j.at("norms").get<std::vector<std::string>>();
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("check_reference"))
    c.check_reference = j.at("check_reference").get<bool>();
  if (j.contains("tolerance_factor"))
    c.tolerance_factor = j.at("tolerance_factor").get<double>();
  if (j.contains("order_band")) c.order_band = j.at("order_band").get<double>();
  return c;
}

StudyResult run_study(const StudyConfig& config) {
  StudyResult result;
  result.config = config;
  result.scheme = resolve_scheme(config.scheme, config.kind);
  const ManufacturedProblem prob = problem_by_name(config.problem);

  std::vector<RectMesh> meshes;
  std::vector<double> hs;
  std::vector<std::string> labels;
  if (!config.mesh_files.empty()) {
    for (const auto& path : config.mesh_files) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("run_study: cannot open mesh file " + path);
      nlohmann::json j;
      in >> j;
      meshes.push_back(mesh_from_json(j));
      hs.push_back(meshes.back().h());
      labels.push_back(path);
    }
  } else {
    if (config.mesh_sizes.empty())
      throw std::invalid_argument("run_study: no mesh sizes given");
    for (int n : config.mesh_sizes) {
      if (n < 2)
        throw std::invalid_argument("run_study: mesh size must be at least 2");
      meshes.push_back(config.perturb > 0.0
                           ? perturbed_mesh(n, n, config.perturb, config.seed)
                           : uniform_mesh(n, n));
      hs.push_back(meshes.back().h());
      labels.push_back("N=" + std::to_string(n));
    }
  }

  result.reports.resize(meshes.size());
  std::atomic<size_t> next{0};
  std::mutex failure_mutex;
  std::string failure_mesh;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= meshes.size()) return;
      try {
        result.reports[idx] =
            run_one(meshes[idx], hs[idx], result.scheme, prob, config.norms);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
          failure_mesh = labels[idx];
        }
        return;
      }
    }
  };

  const int nthreads = thread_count(meshes.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const SolverFailure& e) {
      throw SolverFailure("study aborted at mesh " + failure_mesh + ": " +
                              e.what(),
                          e.achieved_residual);
    } catch (const std::exception& e) {
      throw std::runtime_error("study aborted at mesh " + failure_mesh + ": " +
                               e.what());
    }
  }

  if (result.reports.size() >= 2) result.orders = estimate_orders(result.reports);
  return result;
}

const ReferenceRow* ReferenceTable::find(const std::string& scheme,
                                         const std::string& problem,
                                         const std::string& norm) const {
  for (const auto& row : rows_)
    if (row.scheme == scheme && row.problem == problem && row.norm == norm)
      return &row;
  return nullptr;
}

std::string ReferenceTable::serialize() const {
  std::ostringstream os;
  for (const auto& row : rows_) {
    os << row.scheme << '|' << row.problem << '|' << row.norm << '|';
    for (size_t i = 0; i < row.mesh_n.size(); ++i)
      os << (i ? "," : "") << row.mesh_n[i];
    os << '|';
    for (size_t i = 0; i < row.errors.size(); ++i)
      os << (i ? "," : "") << format_double("%.4e", row.errors[i]);
    os << '|';
    for (size_t i = 0; i < row.orders.size(); ++i)
      os << (i ? "," : "") << format_double("%.4f", row.orders[i]);
    os << '\n';
  }
  return os.str();
}

std::vector<ReferenceCheck> compare_reference(const StudyResult& result,
                                              const ReferenceTable& table,
                                              double factor,
                                              double order_band) {
  if (!(factor >= 1.0))
    throw std::invalid_argument("compare_reference: factor must be >= 1");
  std::vector<ReferenceCheck> checks;
  const std::vector<int>& run_n = result.config.mesh_sizes;

  for (const auto& name : result.config.norms) {
    const ReferenceRow* row =
        table.find(result.scheme.name, result.config.problem, name);
    if (!row)
      throw MissingReferenceCell("no reference column for (" +
                                 result.scheme.name + ", " +
                                 result.config.problem + ", " + name + ")");

    bool any = false;
    for (size_t m = 0; m < run_n.size() && m < result.reports.size(); ++m) {
      const auto it = std::find(row->mesh_n.begin(), row->mesh_n.end(), run_n[m]);
      if (it == row->mesh_n.end()) continue;
      const size_t p = static_cast<size_t>(it - row->mesh_n.begin());
      any = true;
      const double want = row->errors[p];
      const double got = result.reports[m].norms.at(name);
      ReferenceCheck c;
      c.description = result.scheme.name + " " + result.config.problem + " " +
                      name + " error @N=" + std::to_string(run_n[m]);
      c.expected = want;
      c.actual = got;
      c.pass = got <= want * factor && got >= want / factor;
      checks.push_back(c);
    }
    if (!any)
      throw MissingReferenceCell(
          "no reference mesh size overlaps the study for (" +
          result.scheme.name + ", " + result.config.problem + ", " + name +
          ")");

    if (run_n == row->mesh_n) {
      const auto oit = result.orders.find(name);
      for (size_t m = 1; m < run_n.size(); ++m) {
        if (oit == result.orders.end() || !oit->second[m]) continue;
        ReferenceCheck c;
        c.description = result.scheme.name + " " + result.config.problem +
                        " " + name + " order @N=" + std::to_string(run_n[m]);
        c.expected = row->orders[m - 1];
        c.actual = *oit->second[m];
        c.pass = std::abs(c.actual - c.expected) <= order_band;
        checks.push_back(c);
      }
    }
  }
  return checks;
}

std::string emit_csv(const StudyResult& result) {
  std::ostringstream os;
  os << "h,dofs";
  for (const auto& n : result.config.norms) os << ',' << n;
  for (const auto& n : result.config.norms) os << ',' << n << "_order";
  os << '\n';
  for (size_t m = 0; m < result.reports.size(); ++m) {
    const ErrorReport& r = result.reports[m];
    os << format_double("%.10g", r.h) << ',' << r.dofs;
    for (const auto& n : result.config.norms)
      os << ',' << format_double("%.10e", r.norms.at(n));
    for (const auto& n : result.config.norms) {
      os << ',';
      const auto it = result.orders.find(n);
      if (it != result.orders.end() && it->second[m])
        os << format_double("%.4f", *it->second[m]);
    }
    os << '\n';
  }
  return os.str();
}

std::string emit_markdown(const StudyResult& result) {
  std::ostringstream os;
  os << "| h | dofs |";
  for (const auto& n : result.config.norms) os << ' ' << n << " | order |";
  os << "\n|---|---|";
  for (size_t i = 0; i < result.config.norms.size(); ++i) os << "---|---|";
  os << '\n';
  for (size_t m = 0; m < result.reports.size(); ++m) {
    const ErrorReport& r = result.reports[m];
    os << "| " << format_double("%.6g", r.h) << " | " << r.dofs << " |";
    for (const auto& n : result.config.norms) {
      os << ' ' << format_double("%.4E", r.norms.at(n)) << " |";
      const auto it = result.orders.find(n);
      if (it != result.orders.end() && it->second[m])
        os << ' ' << format_double("%.4f", *it->second[m]) << " |";
      else
        os << " \\ |";
    }
    os << '\n';
  }
  return os.str();
}

std::string emit_json(const StudyResult& result) {
  nlohmann::json j;
  j["problem"] = result.config.problem;
  j["scheme"] = result.scheme.name;
  j["kind"] = result.scheme.kind;
  j["k"] = result.scheme.k;
  j["norms"] = result.config.norms;
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) {
    nlohmann::json jr;
    jr["h"] = r.h;
    jr["dofs"] = r.dofs;
    jr["wall_seconds"] = r.wall_seconds;
    jr["norms"] = r.norms;
    reports.push_back(jr);
  }
  j["reports"] = reports;
  nlohmann::json orders;
  for (const auto& [name, seq] : result.orders) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& o : seq)
      arr.push_back(o ? nlohmann::json(*o) : nlohmann::json(nullptr));
    orders[name] = arr;
  }
  j["orders"] = orders;
  return j.dump(2) + "\n";
}

void emit(const StudyResult& result, const std::string& format,
          const std::string& path) {
  std::string text;
  if (format == "csv")
    text = emit_csv(result);
  else if (format == "markdown")
    text = emit_markdown(result);
  else if (format == "json")
    text = emit_json(result);
  else
    throw std::invalid_argument("emit: unknown format '" + format + "'");
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit: cannot open " + path);
  out << text;
  if (!out) throw std::runtime_error("emit: write failed for " + path);
}

}  // namespace fve
