#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "vsol/cli.hpp"

int main(int argc, char** argv) {
  using vsol::cli::Mode;
  vsol::cli::RunConfig cfg;
  std::string report_json;
  bool quiet = false;

  CLI::App app{"Checks a contract against its workflow policy, or its own assertions."};
  std::map<std::string, Mode> modes = {
      {"conformance", Mode::Conformance}, {"assertions", Mode::Assertions}, {"instrument-only", Mode::InstrumentOnly}};
  app.add_option("--mode", cfg.mode, "conformance | assertions | instrument-only")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--sol", cfg.sol_paths, "contract source file(s), concatenated in order")->required();
  app.add_option("--policy", cfg.policy_path, "workflow policy (JSON)");
  app.add_option("--root", cfg.root, "contract to verify");
  app.add_option("--k", cfg.k_max, "transaction bound for the bounded search")->check(CLI::NonNegativeNumber);
  app.add_option("--solver", cfg.solver, "SMT solver executable (default: $SMT_SOLVER, then z3 on PATH)");
  app.add_option("--timeout", cfg.timeout_s, "seconds per solver query")->check(CLI::PositiveNumber);
  app.add_option("--report-json", report_json, "write the machine-readable report here");
  app.add_option("--emit-instrumented", cfg.emit_instrumented, "write the instrumented contract here");
  app.add_option("--emit-runtime-checks", cfg.emit_runtime_checks,
                 "write the instrumented contract with nondet-free checks here");
  app.add_option("--emit-ir", cfg.emit_ir, "write the translated program here");
  app.add_option("--dump-smt", cfg.dump_smt, "write every solver query to this directory");
  app.add_flag("-q,--quiet", quiet, "print only errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : vsol::cli::kInputError;
  }

  vsol::cli::Report rep = vsol::cli::run(cfg);
  if (!quiet || rep.exit_code >= vsol::cli::kInputError) (rep.exit_code >= vsol::cli::kInputError ? std::cerr : std::cout) << rep.text;
  if (!report_json.empty()) {
    std::ofstream out(report_json, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << report_json << "\n";
      return vsol::cli::kInputError;
    }
    out << rep.json;
  }
  return rep.exit_code;
}
