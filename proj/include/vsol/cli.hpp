#pragma once

#include <string>
#include <vector>

#include "vsol/sol_ast.hpp"
#include "vsol/verify.hpp"

namespace vsol::cli {

enum class Mode { Conformance, Assertions, InstrumentOnly };

struct RunConfig {
  Mode mode = Mode::Conformance;
  std::vector<std::string> sol_paths;  // concatenated in order
  std::string policy_path;
  std::string root;  // empty: the policy's only workflow, else the last contract
  int k_max = 6;
  std::string solver;
  double timeout_s = 120;
  std::string emit_instrumented, emit_ir, emit_runtime_checks, dump_smt;
};

// Exit codes.
constexpr int kFullyVerified = 0, kRefuted = 1, kPartiallyVerified = 2, kInputError = 3, kToolError = 4;

struct Report {
  int exit_code = kInputError;
  std::string text;  // human-readable report
  std::string json;  // machine-readable report, no timings
};

constexpr int kReportSchemaVersion = 1;

// Runs the whole pipeline. Never throws: every failure ends up in the
// report with exit code kInputError or kToolError.
Report run(const RunConfig& cfg);

// One line per transaction (tx1: f(args) sender=0x..), then the failing
// assert with what it checks.
std::string render_trace(const verify::Trace& t, const sol::Program& typed, const std::string& root);

}  // namespace vsol::cli
