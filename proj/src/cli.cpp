#include "warpcert/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warpcert/algebra.hpp"
#include "warpcert/certify.hpp"
#include "warpcert/curvature.hpp"
#include "warpcert/errors.hpp"
#include "warpcert/io.hpp"
#include "warpcert/version.hpp"
#include "warpcert/warp.hpp"

namespace warpcert::cli {
namespace {

algebra::LieAlgebraSpec load_spec(const io::RunConfig& cfg) {
  const bool has_file = !cfg.algebra_file.empty();
  const bool has_builtin = !cfg.builtin.empty();
  if (has_file == has_builtin)
    throw ParseError("exactly one of --algebra and --builtin is required");
  if (has_builtin) return algebra::builtin(cfg.builtin);
  return io::parse_algebra_file(cfg.algebra_file);
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ParseError("--r-step must be positive");
  if (!(hi > lo)) throw ParseError("--r-max must exceed --r-min");
  const double count = std::floor((hi - lo) / step + 1e-9) + 1.0;
  if (count > 1e6) throw ParseError("requested grid has too many points");
  std::vector<double> grid;
  const long n = static_cast<long>(count);
  grid.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) grid.push_back(lo + step * static_cast<double>(i));
  return grid;
}

std::vector<double> resolve_grid(const warp::WarpProfile& p,
                                 const io::RunConfig& cfg) {
  const bool any = cfg.r_min || cfg.r_max || cfg.r_step;
  if (!any) return warp::default_grid(p);
  if (!(cfg.r_min && cfg.r_max && cfg.r_step))
    throw ParseError("--r-min, --r-max and --r-step must be given together");
  return uniform_grid(*cfg.r_min, *cfg.r_max, *cfg.r_step);
}

void write_output(const std::string& text, const io::RunConfig& cfg,
                  std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw ParseError("cannot open output file: " + cfg.output);
  file << text;
  file.flush();
  if (!file.good())
    throw ParseError("failed writing output file: " + cfg.output);
}

int run_analyze(const io::RunConfig& cfg, std::ostream& out) {
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto containment = algebra::bracket_level_check(frame, cfg.tol);
  auto witness = algebra::kfold_bracket_witness(frame);
  const double norm_const = algebra::bracket_norm_constant(frame);
  write_output(io::analyze_report(alg, frame, containment, witness, norm_const,
                                  cfg),
               cfg, out);
  return 0;
}

int run_profile(const io::RunConfig& cfg, std::ostream& out) {
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto profile = warp::build_profile(frame.degree(), cfg.epsilon);
  auto grid = resolve_grid(profile, cfg);
  auto checks = warp::profile_check(profile, grid);
  write_output(io::profile_report(profile, checks, grid, cfg), cfg, out);
  return checks.pass ? 0 : 1;
}

int run_curvature(const io::RunConfig& cfg, std::ostream& out) {
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto profile = warp::build_profile(frame.degree(), cfg.epsilon);
  auto metric = curvature::make_metric(frame, profile, cfg.s.value_or(1.0));
  const double r = cfg.r.value_or(0.0);
  auto oracle = curvature::full_curvature(metric, r);
  auto closed = curvature::closed_form_curvature(metric, r);
  auto limit = curvature::limit_curvature(metric, r);
  write_output(io::curvature_report(metric, oracle, closed, limit, cfg), cfg,
               out);
  return 0;
}

int run_certify(const io::RunConfig& cfg, std::ostream& out) {
  if (cfg.s && cfg.s_max)
    throw ParseError("--s and --s-max are mutually exclusive");
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto profile = warp::build_profile(frame.degree(), cfg.epsilon);
  auto grid = resolve_grid(profile, cfg);
  certify::PinchCertificate cert;
  std::vector<double> scanned;
  if (cfg.s) {
    auto metric = curvature::make_metric(frame, profile, *cfg.s);
    cert = certify::certify_pinching(metric, grid, cfg.tol, cfg.seed,
                                     cfg.threads);
  } else {
    auto search =
        certify::find_s(frame, profile, grid, cfg.tol,
                        cfg.s_max.value_or(1048576.0), cfg.seed, cfg.threads);
    cert = std::move(search.certificate);
    scanned = std::move(search.scanned);
  }
  write_output(io::certificate_report(cert, scanned, cfg), cfg, out);
  return cert.verdict ? 0 : 1;
}

int run_sweep(const io::RunConfig& cfg, std::ostream& out) {
  if (cfg.epsilons.empty()) throw ParseError("--epsilons is required for sweep");
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto table =
      certify::epsilon_sweep(frame, cfg.epsilons, cfg.tol,
                             cfg.s_max.value_or(1048576.0), cfg.seed,
                             cfg.threads);
  const std::string text =
      cfg.format == "csv" ? io::sweep_csv(table) : io::sweep_json(table, cfg);
  write_output(text, cfg, out);
  const bool all_pass =
      std::all_of(table.rows.begin(), table.rows.end(),
                  [](const certify::SweepRow& row) { return row.pass; });
  return all_pass ? 0 : 1;
}

int run_oracle_check(const io::RunConfig& cfg, std::ostream& out) {
  auto alg = algebra::validate(load_spec(cfg));
  auto frame = algebra::graded_frame(alg);
  auto profile = warp::build_profile(frame.degree(), cfg.epsilon);
  std::vector<double> grid;
  if (cfg.r_min || cfg.r_max || cfg.r_step) {
    grid = resolve_grid(profile, cfg);
  } else {
    // Coarse symmetric default: the tensor comparison costs a full frame
    // curvature per (r, s) pair, so sample the ramp and both tails.
    const double rho = profile.rho;
    for (double r : {-rho - 4.0, -rho - 2.0, -rho - 1.0, -rho, -rho / 2, 0.0,
                     rho / 2, rho, rho + 1.0, rho + 2.0, rho + 4.0})
      grid.push_back(r);
  }
  auto report = curvature::compare_sources(frame, profile, grid, cfg.s_list);
  certify::DecayFit fit;
  bool have_fit = false;
  bool exact_zero = false;
  try {
    fit = certify::s_decay_check(frame, profile, cfg.s_list,
                                 cfg.r.value_or(profile.rho + 1.0));
    have_fit = true;
  } catch (const DegenerateFit&) {
    exact_zero = true;
  }
  write_output(io::compare_report(report, have_fit ? &fit : nullptr,
                                  exact_zero, cfg),
               cfg, out);
  return 0;
}

int run_commutator(const io::RunConfig& cfg, std::ostream& out) {
  auto report = unitriangular::commutator_check(cfg.m, cfg.trials, cfg.seed);
  write_output(io::commutator_report(report, cfg), cfg, out);
  const bool ok = report.triples_ok && report.witness_nontrivial &&
                  report.all_mfold_trivial;
  return ok ? 0 : 1;
}

bool is_input_error(const Error& e) {
  return dynamic_cast<const ParseError*>(&e) != nullptr ||
         dynamic_cast<const IndexError*>(&e) != nullptr ||
         dynamic_cast<const BadInnerProduct*>(&e) != nullptr ||
         dynamic_cast<const JacobiViolation*>(&e) != nullptr ||
         dynamic_cast<const NotNilpotent*>(&e) != nullptr ||
         dynamic_cast<const UnknownBuiltin*>(&e) != nullptr ||
         dynamic_cast<const BracketConflict*>(&e) != nullptr;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{std::string(kToolName) +
               ": warped negatively curved metrics from nilpotent Lie "
               "algebras, with certified pinching"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kVersion);

  io::RunConfig cfg;

  auto bind = [](CLI::App* sub, const std::string& name,
                 std::optional<double>& slot, const std::string& desc) {
    sub->add_option_function<double>(
        name, [&slot](const double& v) { slot = v; }, desc);
  };
  auto add_algebra = [&cfg](CLI::App* sub) {
    sub->add_option("--algebra", cfg.algebra_file,
                    "JSON file with dim/brackets/inner0");
    sub->add_option(
        "--builtin", cfg.builtin,
        "builtin algebra: heis3, heis5, abelian:n, filiform:n, free2step:k");
  };
  auto add_epsilon = [&cfg](CLI::App* sub) {
    sub->add_option("--epsilon", cfg.epsilon, "pinching parameter (default 0.25)")
        ->check(CLI::PositiveNumber);
  };
  auto add_grid = [&](CLI::App* sub) {
    bind(sub, "--r-min", cfg.r_min, "grid start");
    bind(sub, "--r-max", cfg.r_max, "grid end");
    bind(sub, "--r-step", cfg.r_step, "grid spacing");
  };
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "numerical tolerance (default 1e-6)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "RNG seed (default 0)");
    sub->add_option("--threads", cfg.threads,
                    "worker threads; results do not depend on this")
        ->check(CLI::Range(1, 256));
    sub->add_option("--output", cfg.output, "write the report to this file");
    sub->add_option("--format", cfg.format,
                    "json or csv (csv applies to sweep only)")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "validate an algebra, grade it, report containment and a "
                 "top-level bracket witness");
  add_algebra(analyze);
  add_common(analyze);

  CLI::App* profile = app.add_subcommand(
      "profile", "build the warp profile for the algebra and check its "
                 "slope, concavity and summation bounds");
  add_algebra(profile);
  add_epsilon(profile);
  add_grid(profile);
  add_common(profile);

  CLI::App* curvature_cmd = app.add_subcommand(
      "curvature", "full curvature tensor at one radius, with closed-form "
                   "and limit comparisons");
  add_algebra(curvature_cmd);
  add_epsilon(curvature_cmd);
  bind(curvature_cmd, "--r", cfg.r, "radius (default 0)");
  bind(curvature_cmd, "--s", cfg.s, "metric scale (default 1)");
  add_common(curvature_cmd);

  CLI::App* certify_cmd = app.add_subcommand(
      "certify", "certify sectional curvature within "
                 "[-(k+epsilon)^2 - tol, -1 + tol] over an r-grid");
  add_algebra(certify_cmd);
  add_epsilon(certify_cmd);
  bind(certify_cmd, "--s", cfg.s, "fixed metric scale");
  bind(certify_cmd, "--s-max", cfg.s_max,
       "search scales 1, 2, 4, ... up to this cap (default 2^20)");
  add_grid(certify_cmd);
  add_common(certify_cmd);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the scale search for a descending list of epsilons and "
               "tabulate the achieved pinching ratios");
  add_algebra(sweep);
  sweep->add_option("--epsilons", cfg.epsilons,
                    "comma-separated, positive, strictly descending")
      ->delimiter(',')
      ->required();
  bind(sweep, "--s-max", cfg.s_max, "scale search cap (default 2^20)");
  add_common(sweep);

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare the frame-based curvature oracle against the "
                      "closed forms and the limit tensor across scales");
  add_algebra(oracle);
  add_epsilon(oracle);
  oracle
      ->add_option("--s-list", cfg.s_list,
                   "comma-separated geometric scale list")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bind(oracle, "--r", cfg.r, "radius for the decay fit (default rho + 1)");
  add_grid(oracle);
  add_common(oracle);

  CLI::App* commutator = app.add_subcommand(
      "commutator", "group-level cross-check in unitriangular matrices: "
                    "nested commutator depth of the standard generators");
  commutator->add_option("--m", cfg.m, "matrix size (default 4)")
      ->check(CLI::Range(2, 12));
  commutator->add_option("--trials", cfg.trials,
                         "random product-expansion checks (default 1000)")
      ->check(CLI::Range(1L, 1000000L));
  add_common(commutator);

  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (cfg.format.empty())
      cfg.format = cfg.command == "sweep" ? "csv" : "json";
    if (cfg.format == "csv" && cfg.command != "sweep")
      throw ParseError("--format csv is only available for sweep");
    if (cfg.command == "oracle-check" && cfg.s_list.empty())
      cfg.s_list = {16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0};

    if (cfg.command == "analyze") return run_analyze(cfg, out);
    if (cfg.command == "profile") return run_profile(cfg, out);
    if (cfg.command == "curvature") return run_curvature(cfg, out);
    if (cfg.command == "certify") return run_certify(cfg, out);
    if (cfg.command == "sweep") return run_sweep(cfg, out);
    if (cfg.command == "oracle-check") return run_oracle_check(cfg, out);
    if (cfg.command == "commutator") return run_commutator(cfg, out);
    throw Error("unhandled command: " + cfg.command);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace warpcert::cli
