#include "warpcert/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "warpcert/errors.hpp"
#include "warpcert/version.hpp"

namespace warpcert::io {
namespace {

using nlohmann::json;

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.builtin.empty()) j["builtin"] = c.builtin;
  if (!c.algebra_file.empty()) j["algebra_file"] = c.algebra_file;
  // Execution details (threads, output destination) are omitted: the echoed
  // config holds exactly the result-determining inputs, so re-running it
  // reproduces the report byte for byte on any machine and thread count.
  j["epsilon"] = c.epsilon;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["format"] = c.format;
  if (c.s) j["s"] = *c.s;
  if (c.s_max) j["s_max"] = *c.s_max;
  if (c.r) j["r"] = *c.r;
  if (c.r_min) j["r_min"] = *c.r_min;
  if (c.r_max) j["r_max"] = *c.r_max;
  if (c.r_step) j["r_step"] = *c.r_step;
  if (!c.epsilons.empty()) j["epsilons"] = c.epsilons;
  if (!c.s_list.empty()) j["s_list"] = c.s_list;
  if (c.command == "commutator") {
    j["m"] = c.m;
    j["trials"] = c.trials;
  }
  return j;
}

json base_report(const RunConfig& cfg) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = cfg.command;
  j["config"] = config_json(cfg);
  return j;
}

// Which curvature components the certificate may rely on. The mixed block of
// the closed forms disagrees with the oracle, so it is flagged untrusted and
// certification reads every component from the oracle tensor instead.
json provenance_json() {
  json p;
  p["certification_source"] = "oracle";
  p["mixed_components"] = "untrusted";
  p["mixed_excluded_from_certification"] = true;
  p["trusted_cross_check_classes"] = {"g_diagonal", "g_offpair",
                                      "radial_diagonal", "radial_offpair"};
  return p;
}

json profile_json(int k, double epsilon, double rho) {
  json p;
  p["k"] = k;
  p["epsilon"] = epsilon;
  p["rho"] = rho;
  p["ramp"] = "quintic";
  return p;
}

json certificate_core(const certify::PinchCertificate& cert) {
  json j;
  j["algebra"] = cert.algebra;
  j["k"] = cert.k;
  j["epsilon"] = cert.epsilon;
  j["rho"] = cert.rho;
  j["ramp"] = "quintic";
  j["s"] = cert.s;
  j["tol"] = cert.tol;
  j["seed"] = cert.seed;
  j["targets"] = {{"min", cert.target_min}, {"max", cert.target_max}};
  json rows = json::array();
  for (const auto& row : cert.rows) {
    rows.push_back({{"r", row.r},
                    {"lambda_min", row.lambda_min},
                    {"lambda_max", row.lambda_max},
                    {"sec_min", row.sec_min},
                    {"sec_max", row.sec_max}});
  }
  j["rows"] = std::move(rows);
  auto side = [](const certify::TailSide& t) {
    return json{{"monotone", t.monotone}, {"deviations", t.deviations}};
  };
  j["tails"] = {{"left", side(cert.tails.left)},
                {"right", side(cert.tails.right)},
                {"limit_envelope",
                 {{"min", cert.tails.limit_min}, {"max", cert.tails.limit_max}}},
                {"limit_within_targets", cert.tails.limit_within}};
  j["global"] = {{"min", cert.global_min},
                 {"max", cert.global_max},
                 {"ratio", cert.ratio}};
  j["theoretical_lower_bound"] = cert.theoretical_lower_bound;
  j["verdict"] = cert.verdict ? "pass" : "fail";
  if (!cert.blocking.empty()) j["blocking"] = cert.blocking;
  j["provenance"] = provenance_json();
  return j;
}

std::string finish(const json& j) { return j.dump(2) + "\n"; }

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

double number_at(const json& v, const std::string& origin,
                 const std::string& where) {
  if (!v.is_number()) fail(origin, where + " must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) fail(origin, where + " is not finite");
  return x;
}

int index_at(const json& v, Index dim, const std::string& origin,
             const std::string& where) {
  if (!v.is_number_integer()) fail(origin, where + " must be an integer");
  long long x = v.get<long long>();
  if (x < 1 || x > static_cast<long long>(dim))
    fail(origin, where + " is out of range 1.." + std::to_string(dim));
  return static_cast<int>(x);
}

}  // namespace

algebra::LieAlgebraSpec parse_algebra_text(const std::string& text,
                                           const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
  if (!j.is_object()) fail(origin, "top-level value must be an object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "dim" && key != "brackets" && key != "inner0" && key != "name")
      fail(origin, "unknown key \"" + key + "\"");
  }

  if (!j.contains("dim")) fail(origin, "missing \"dim\"");
  if (!j["dim"].is_number_integer())
    fail(origin, "\"dim\" must be an integer");
  long long dim = j["dim"].get<long long>();
  if (dim < 1 || dim > 64) fail(origin, "\"dim\" must be between 1 and 64");

  algebra::LieAlgebraSpec spec;
  spec.dim = static_cast<Index>(dim);

  if (j.contains("brackets")) {
    const json& br = j["brackets"];
    if (!br.is_array()) fail(origin, "\"brackets\" must be an array");
    std::set<std::tuple<int, int, int>> seen;
    for (size_t t = 0; t < br.size(); ++t) {
      const json& e = br[t];
      std::string where = "brackets[" + std::to_string(t) + "]";
      if (!e.is_array() || e.size() != 4)
        fail(origin, where + " must be [i, j, m, value]");
      algebra::BracketEntry entry;
      entry.i = index_at(e[0], spec.dim, origin, where + "[0]") - 1;
      entry.j = index_at(e[1], spec.dim, origin, where + "[1]") - 1;
      entry.m = index_at(e[2], spec.dim, origin, where + "[2]") - 1;
      entry.value = number_at(e[3], origin, where + "[3]");
      if (!seen.insert({entry.i, entry.j, entry.m}).second)
        fail(origin, where + " duplicates an earlier (i, j, m) entry");
      spec.brackets.push_back(entry);
    }
  }

  if (j.contains("inner0")) {
    const json& g = j["inner0"];
    if (!g.is_array()) fail(origin, "\"inner0\" must be an array");
    const Index n = spec.dim;
    spec.inner0 = Matrix(n, n);
    if (g.size() == static_cast<size_t>(n) && n > 1) {
      for (Index a = 0; a < n; ++a) {
        const json& row = g[static_cast<size_t>(a)];
        if (!row.is_array() || row.size() != static_cast<size_t>(n))
          fail(origin, "\"inner0\" rows must each hold " + std::to_string(n) +
                           " numbers");
        for (Index b = 0; b < n; ++b)
          spec.inner0(a, b) =
              number_at(row[static_cast<size_t>(b)], origin, "inner0 entry");
      }
    } else if (g.size() == static_cast<size_t>(n * n)) {
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
          spec.inner0(a, b) = number_at(g[static_cast<size_t>(a * n + b)],
                                        origin, "inner0 entry");
    } else {
      fail(origin, "\"inner0\" must be a flat row-major array of " +
                       std::to_string(n * n) + " numbers or " +
                       std::to_string(n) + " rows");
    }
  }

  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(origin, "\"name\" must be a string");
    spec.name = j["name"].get<std::string>();
  }
  return spec;
}

algebra::LieAlgebraSpec parse_algebra_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open algebra file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  algebra::LieAlgebraSpec spec = parse_algebra_text(buf.str(), path);
  if (spec.name.empty())
    spec.name = std::filesystem::path(path).stem().string();
  return spec;
}

std::string analyze_report(const algebra::ValidatedAlgebra& alg,
                           const algebra::GradedFrame& frame,
                           const algebra::ContainmentReport& containment,
                           const algebra::BracketWitness& witness,
                           double bracket_norm_constant, const RunConfig& cfg) {
  json j = base_report(cfg);
  j["algebra"] = frame.name;
  j["dim"] = alg.dim();
  j["k"] = frame.degree();
  j["series_dims"] = frame.series.dims();
  std::vector<int> level_dims;
  for (int i = 1; i <= frame.degree(); ++i)
    level_dims.push_back(frame.level_dim(i));
  j["level_dims"] = level_dims;
  j["levels"] = frame.lvl;
  j["jacobi_residual"] = alg.jacobi_residual();
  j["max_structure_constant"] = alg.max_structure_constant();
  j["max_adapted_structure_constant"] = frame.max_structure_constant;
  j["bracket_norm_constant"] = bracket_norm_constant;

  json pairs = json::array();
  for (const auto& e : containment.pairs) {
    pairs.push_back({{"level_i", e.i},
                     {"level_j", e.j},
                     {"depth", e.depth},
                     {"standard", e.standard_ok},
                     {"stronger", e.stronger_holds}});
  }
  j["containment"] = {{"pairs", std::move(pairs)},
                      {"all_standard", containment.all_standard},
                      {"all_stronger", containment.all_stronger}};

  std::vector<int> indices;
  for (int idx : witness.indices) indices.push_back(idx + 1);
  j["witness"] = {{"indices", indices},
                  {"norm", witness.norm},
                  {"value", to_std(witness.value)}};
  return finish(j);
}

std::string profile_report(const warp::WarpProfile& profile,
                           const warp::ProfileReport& checks,
                           const std::vector<double>& grid,
                           const RunConfig& cfg) {
  json j = base_report(cfg);
  j["profile"] = profile_json(profile.degree, profile.epsilon, profile.rho);
  std::vector<double> exponents;
  for (int i = 1; i <= profile.degree; ++i)
    exponents.push_back(profile.exponent(i));
  j["level_exponents"] = exponents;
  j["slope_cap"] = profile.slope_cap();
  j["checks"] = {{"min_slope", checks.min_slope},
                 {"max_slope", checks.max_slope},
                 {"max_log_curv", checks.max_log_curv},
                 {"log_curv_bound", checks.log_curv_bound},
                 {"max_sum_ratio", checks.max_sum_ratio},
                 {"pass", checks.pass}};
  j["grid"] = {{"min", grid.front()},
               {"max", grid.back()},
               {"points", grid.size()}};
  j["verdict"] = checks.pass ? "pass" : "fail";
  return finish(j);
}

std::string curvature_report(const curvature::FramedMetric& metric,
                             const curvature::CurvatureTensor& oracle,
                             const curvature::CurvatureTensor& closed_form,
                             const curvature::CurvatureTensor& limit,
                             const RunConfig& cfg) {
  json j = base_report(cfg);
  j["algebra"] = metric.frame.name;
  j["r"] = oracle.r;
  j["s"] = metric.scale;
  j["frame_dim"] = metric.frame_dim();
  j["profile"] = profile_json(metric.profile.degree, metric.profile.epsilon,
                              metric.profile.rho);
  j["layout"] = "row-major [a][b][c][d]; index 0 is the radial direction";
  j["tensors"] = {{"oracle", oracle.data()},
                  {"closed_form", closed_form.data()},
                  {"limit", limit.data()}};
  j["max_abs"] = {{"oracle", oracle.max_abs()},
                  {"closed_form", closed_form.max_abs()},
                  {"limit", limit.max_abs()}};
  j["residuals"] = {{"symmetry", oracle.symmetry_residual()},
                    {"first_bianchi", oracle.bianchi_residual()}};
  j["provenance"] = provenance_json();
  return finish(j);
}

std::string certificate_report(const certify::PinchCertificate& cert,
                               const std::vector<double>& scanned_scales,
                               const RunConfig& cfg) {
  json j = base_report(cfg);
  j.update(certificate_core(cert));
  if (!scanned_scales.empty()) j["scanned_scales"] = scanned_scales;
  return finish(j);
}

std::string sweep_csv(const certify::SweepTable& table) {
  std::string out = "epsilon,s,ratio,k_squared,pass\n";
  for (const auto& row : table.rows) {
    out += shortest(row.epsilon);
    out += ',';
    out += shortest(row.s);
    out += ',';
    out += shortest(row.ratio);
    out += ',';
    out += shortest(row.k_squared);
    out += ',';
    out += row.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string sweep_json(const certify::SweepTable& table, const RunConfig& cfg) {
  json j = base_report(cfg);
  j["k"] = table.k;
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"epsilon", row.epsilon},
                    {"s", row.s},
                    {"ratio", row.ratio},
                    {"k_squared", row.k_squared},
                    {"pass", row.pass}});
  }
  j["rows"] = std::move(rows);
  json certs = json::array();
  for (const auto& cert : table.certificates)
    certs.push_back(certificate_core(cert));
  j["certificates"] = std::move(certs);
  return finish(j);
}

std::string compare_report(const curvature::DiscrepancyReport& report,
                           const certify::DecayFit* fit, bool exact_zero,
                           const RunConfig& cfg) {
  json j = base_report(cfg);
  json classes = json::array();
  for (const auto& row : report.classes) {
    classes.push_back({{"class", curvature::class_name(row.cls)},
                       {"max_abs_diff", row.max_abs_diff},
                       {"trusted", row.trusted}});
  }
  j["classes"] = std::move(classes);
  j["limit_gap_by_scale"] = report.limit_gap_by_scale;
  j["residuals"] = {{"symmetry", report.max_symmetry_residual},
                    {"first_bianchi", report.max_bianchi_residual}};
  json decay;
  decay["exact_zero"] = exact_zero;
  if (fit != nullptr) {
    decay["slope"] = fit->slope;
    decay["max_residual"] = fit->max_residual;
    decay["samples"] = fit->points;
  }
  j["decay"] = std::move(decay);
  j["provenance"] = provenance_json();
  return finish(j);
}

std::string commutator_report(const unitriangular::CommutatorReport& report,
                              const RunConfig& cfg) {
  json j = base_report(cfg);
  j["m"] = report.m;
  j["trials"] = report.trials;
  j["triples_ok"] = report.triples_ok;
  j["corner"] = report.corner;
  j["witness_nontrivial"] = report.witness_nontrivial;
  j["all_mfold_trivial"] = report.all_mfold_trivial;
  j["depth_m_count"] = report.depth_m_count;
  json rows = json::array();
  for (Eigen::Index a = 0; a < report.nested_witness.rows(); ++a) {
    std::vector<std::int64_t> row;
    for (Eigen::Index b = 0; b < report.nested_witness.cols(); ++b)
      row.push_back(report.nested_witness(a, b));
    rows.push_back(row);
  }
  j["nested_witness"] = std::move(rows);
  j["verdict"] = (report.triples_ok && report.witness_nontrivial &&
                  report.all_mfold_trivial)
                     ? "pass"
                     : "fail";
  return finish(j);
}

}  // namespace warpcert::io
