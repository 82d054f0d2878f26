#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "warpcert/algebra.hpp"
#include "warpcert/certify.hpp"
#include "warpcert/curvature.hpp"
#include "warpcert/unitriangular.hpp"
#include "warpcert/warp.hpp"

namespace warpcert::io {

// Resolved command-line configuration, echoed verbatim into every report so a
// report is sufficient to reproduce the run. Optional fields are emitted only
// when they were set.
struct RunConfig {
  std::string command;
  std::string builtin;       // mutually exclusive with algebra_file
  std::string algebra_file;
  std::string output;        // empty: stdout
  std::string format;        // "json" or "csv" (resolved, never empty in reports)
  double epsilon = 0.25;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> s;
  std::optional<double> s_max;
  std::optional<double> r;
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::optional<double> r_step;
  std::vector<double> epsilons;   // sweep only
  std::vector<double> s_list;     // oracle-check only
  int m = 4;                      // commutator only
  long trials = 1000;             // commutator only
};

// Reads a Lie algebra description from a JSON file:
//   {"dim": n, "brackets": [[i, j, m, value], ...], "inner0": [n*n numbers]}
// Bracket indices are 1-based in the file and converted to 0-based here.
// "inner0" is optional (defaults to the identity) and may be given either as a
// flat row-major array of n*n numbers or as n rows of n numbers.
// Duplicate (i, j, m) triples are rejected. Throws ParseError on any problem
// with the file itself; semantic errors are left to validate().
algebra::LieAlgebraSpec parse_algebra_file(const std::string& path);

// Same, from an in-memory string; `origin` is used in error messages.
algebra::LieAlgebraSpec parse_algebra_text(const std::string& text,
                                           const std::string& origin);

// Report builders. Each returns the complete output document (pretty-printed
// JSON with sorted keys and a trailing newline, or CSV). Reports embed the
// tool name, version, and the run configuration.

std::string analyze_report(const algebra::ValidatedAlgebra& alg,
                           const algebra::GradedFrame& frame,
                           const algebra::ContainmentReport& containment,
                           const algebra::BracketWitness& witness,
                           double bracket_norm_constant,
                           const RunConfig& cfg);

std::string profile_report(const warp::WarpProfile& profile,
                           const warp::ProfileReport& checks,
                           const std::vector<double>& grid,
                           const RunConfig& cfg);

std::string curvature_report(const curvature::FramedMetric& metric,
                             const curvature::CurvatureTensor& oracle,
                             const curvature::CurvatureTensor& closed_form,
                             const curvature::CurvatureTensor& limit,
                             const RunConfig& cfg);

std::string certificate_report(const certify::PinchCertificate& cert,
                               const std::vector<double>& scanned_scales,
                               const RunConfig& cfg);

std::string sweep_csv(const certify::SweepTable& table);

std::string sweep_json(const certify::SweepTable& table, const RunConfig& cfg);

// Cross-check report. `fit` is null when the decay fit was skipped because
// every sampled deviation was exactly zero at working precision (the abelian
// case); `exact_zero` records that outcome.
std::string compare_report(const curvature::DiscrepancyReport& report,
                           const certify::DecayFit* fit, bool exact_zero,
                           const RunConfig& cfg);

std::string commutator_report(const unitriangular::CommutatorReport& report,
                              const RunConfig& cfg);

}  // namespace warpcert::io
