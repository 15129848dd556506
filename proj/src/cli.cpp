#include "vsol/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <regex>
#include <sstream>

#include "vsol/instrument.hpp"
#include "vsol/policy.hpp"
#include "vsol/sol.hpp"
#include "vsol/translate.hpp"

namespace vsol::cli {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("InputError", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("InputError", "cannot write " + path);
  out << text;
}

std::string hex(int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s0x%llx", v < 0 ? "-" : "", static_cast<unsigned long long>(v < 0 ? -v : v));
  return buf;
}

struct Source {
  std::string text;
  std::vector<std::pair<int, std::string>> starts;  // first line of each file
};

Source concat(const std::vector<std::string>& paths) {
  Source s;
  int line = 1;
  for (const auto& p : paths) {
    std::string t = read_file(p);
    if (!t.empty() && t.back() != '\n') t += '\n';
    s.starts.push_back({line, p});
    line += static_cast<int>(std::count(t.begin(), t.end(), '\n'));
    s.text += t;
  }
  return s;
}

// "12:5 rest" in a message -> "file.sol:12:5 rest".
std::string locate(const Source& src, const std::string& msg) {
  static const std::regex at(R"(^(\d+):(\d+)(.*)$)");
  std::smatch m;
  if (src.starts.empty() || !std::regex_match(msg, m, at)) return msg;
  int line = std::stoi(m[1]);
  const auto* file = &src.starts.front();
  for (const auto& s : src.starts)
    if (s.first <= line) file = &s;
  return file->second + ":" + std::to_string(line - file->first + 1) + ":" + m[2].str() + m[3].str();
}

const std::vector<sol::VarDecl>* params_of(const sol::Program& typed, const std::string& root, const std::string& proc) {
  if (proc == trans::ctor_name(root)) return &typed.find(root)->ctor.params;
  for (const auto& f : trans::harness_functions(typed, root))
    if (trans::proc_name(f.owner, f.fn->name) == proc) return &f.fn->params;
  return nullptr;
}

std::string render_value(const sol::TypeP& t, int64_t v) {
  if (!t) return std::to_string(v);
  switch (t->kind) {
    case sol::SolType::Address:
    case sol::SolType::Contract: return hex(v);
    case sol::SolType::Bool: return v ? "true" : "false";
    default: return std::to_string(v);
  }
}

struct Failure {
  std::string where, note;
};

Failure split_label(const std::string& label) {
  size_t sp = label.find(' ');
  if (sp == std::string::npos) return {label, ""};
  return {label.substr(0, sp), label.substr(sp + 1)};
}

std::string footer(const Failure& f) {
  if (f.note.empty()) return "assertion at " + f.where + " fails";
  return "violates " + f.note + " (assert at " + f.where + ")";
}

std::vector<std::string> tx_lines(const verify::Trace& t, const sol::Program& typed, const std::string& root) {
  std::vector<std::string> out;
  for (size_t i = 0; i < t.txs.size(); ++i) {
    const auto& tx = t.txs[i];
    const auto* ps = params_of(typed, root, tx.proc);
    std::string args;
    for (size_t a = 0; a < tx.args.size(); ++a)
      args += (a ? ", " : "") + render_value(ps && a < ps->size() ? (*ps)[a].type : nullptr, tx.args[a]);
    std::string line = "tx" + std::to_string(i + 1) + ": " + tx.function + "(" + args + ") sender=" + hex(tx.sender);
    if (!tx.nondet.empty()) {
      line += " nondet=[";
      for (size_t n = 0; n < tx.nondet.size(); ++n) line += (n ? ", " : "") + std::to_string(tx.nondet[n]);
      line += "]";
    }
    out.push_back(line);
  }
  return out;
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Conformance: return "conformance";
    case Mode::Assertions: return "assertions";
    case Mode::InstrumentOnly: return "instrument-only";
  }
  return "?";
}

json diag_json(const Diagnostic& d) { return {{"kind", d.kind}, {"location", d.location}, {"message", d.message}}; }

}  // namespace

std::string render_trace(const verify::Trace& t, const sol::Program& typed, const std::string& root) {
  std::string out;
  for (const auto& l : tx_lines(t, typed, root)) out += l + "\n";
  return out + footer(split_label(t.label)) + "\n";
}

Report run(const RunConfig& cfg) {
  Report rep;
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["mode"] = mode_name(cfg.mode);
  j["root"] = cfg.root;
  json diags = json::array();
  std::string text;
  Source src;

  auto finish = [&](int code, const std::string& verdict) {
    rep.exit_code = code;
    j["verdict"] = verdict;
    j["exit_code"] = code;
    j["diagnostics"] = diags;
    rep.json = j.dump(2) + "\n";
    rep.text = text;
    return rep;
  };
  auto fail = [&](int code, const Error& e) {
    text += "error: " + e.kind() + ": " + locate(src, e.detail()) + "\n";
    diags.push_back(diag_json({e.kind(), "", locate(src, e.detail())}));
    return finish(code, "Error");
  };

  try {
    if (cfg.sol_paths.empty()) throw Error("InputError", "no contract source given (--sol)");
    std::optional<policy::Policy> pol;
    if (cfg.mode != Mode::Assertions) {
      if (cfg.policy_path.empty()) throw Error("InputError", "--policy is required in " + mode_name(cfg.mode) + " mode");
      pol = policy::parse_policy(read_file(cfg.policy_path));
      auto bad = policy::validate_policy(*pol);
      if (!bad.empty()) {
        for (const auto& d : bad) {
          text += "error: " + to_string(d) + "\n";
          diags.push_back(diag_json(d));
        }
        return finish(kInputError, "Error");
      }
    }
    src = concat(cfg.sol_paths);
    sol::Program typed = sol::parse_contract(src.text);
    sol::typecheck(typed);

    std::string root = cfg.root;
    if (root.empty()) {
      if (pol && pol->workflows.size() == 1) root = pol->workflows[0].name;
      else if (!pol && !typed.contracts.empty()) root = typed.contracts.back().name;
      else throw Error("InputError", "--root is required: the policy has several workflows");
    }
    if (!typed.find(root)) throw Error("InputError", "root contract " + root + " is not defined");
    j["root"] = root;

    sol::Program program = typed;
    if (pol) {
      auto syn = sol::check_syntactic_conformance(typed, *pol);
      if (!syn.empty()) {
        for (const auto& d : syn) {
          Diagnostic l = d;
          l.location = locate(src, l.location);
          text += "error: " + to_string(l) + "\n";
          diags.push_back(diag_json(l));
        }
        return finish(kInputError, "NotSyntacticallyConformant");
      }
      if (!pol->find_workflow(root)) throw Error("InputError", "policy has no workflow named " + root);
      instr::Instrumented ins = instr::instrument_for_conformance(typed, *pol);
      for (const auto& d : ins.notes) {
        text += "note: " + to_string(d) + "\n";
        diags.push_back(diag_json(d));
      }
      program = ins.program;
      if (!cfg.emit_runtime_checks.empty())
        write_file(cfg.emit_runtime_checks, sol::print_program(instr::make_runtime_checks(program)));
    }
    if (!cfg.emit_instrumented.empty()) write_file(cfg.emit_instrumented, sol::print_program(program));
    if (cfg.mode == Mode::InstrumentOnly) {
      if (cfg.emit_instrumented.empty()) text += sol::print_program(program);
      return finish(kFullyVerified, "Instrumented");
    }

    trans::Translation t = trans::translate_program(program);
    trans::generate_harness(t, program, root);
    if (!cfg.emit_ir.empty()) write_file(cfg.emit_ir, vir::print_program(t.program));

    verify::CandidateScope scope = pol ? verify::scope_from_policy(program, root, *pol->find_workflow(root))
                                       : verify::scope_from_contract(program, root);
    auto cands = verify::generate_candidates(program, root, scope);
    verify::VerifyOptions vo;
    vo.k_max = cfg.k_max;
    vo.solver.path = cfg.solver;
    vo.solver.timeout_s = cfg.timeout_s;
    vo.solver.dump_dir = cfg.dump_smt;
    verify::VerifyResult r;
    try {
      r = verify::verify(t, root, cands, vo);
    } catch (const Error& e) {
      return fail(e.kind() == "RecursionDepthExceeded" ? kInputError : kToolError, e);
    }

    json inv = json::array();
    for (const auto& c : r.invariant) inv.push_back(c.text);
    j["candidates"] = cands.size();
    j["invariant"] = inv;
    j["houdini_sufficient"] = r.houdini_sufficient;
    j["k_max"] = cfg.k_max;
    j["bound"] = r.bound;

    text += "verdict: " + verify::to_string(r.verdict);
    int code = kPartiallyVerified;
    switch (r.verdict) {
      case verify::VerifyResult::FullyVerified:
        code = kFullyVerified;
        text += "\n";
        break;
      case verify::VerifyResult::Refuted:
        code = kRefuted;
        text += " (violation within " + std::to_string(r.bound) + " transaction" + (r.bound == 1 ? "" : "s") +
                " after the constructor)\n";
        break;
      case verify::VerifyResult::PartiallyVerified:
        text += " (no violation within " + std::to_string(r.bound) + " transaction" + (r.bound == 1 ? "" : "s") +
                " after the constructor)\n";
        break;
    }
    if (!r.invariant.empty() || r.verdict == verify::VerifyResult::FullyVerified) {
      text += r.houdini_sufficient ? "invariant:\n" : "inferred invariant (not sufficient):\n";
      if (r.invariant.empty()) text += "  true\n";
      for (const auto& c : r.invariant) text += "  " + c.text + "\n";
    }
    if (r.trace) {
      text += "trace:\n";
      for (const auto& l : tx_lines(*r.trace, program, root)) text += "  " + l + "\n";
      Failure f = split_label(r.trace->label);
      f.where = locate(src, f.where);
      text += "  " + footer(f) + "\n";
      json txs = json::array();
      auto lines = tx_lines(*r.trace, program, root);
      for (size_t i = 0; i < r.trace->txs.size(); ++i) {
        const auto& tx = r.trace->txs[i];
        txs.push_back({{"function", tx.function},
                       {"sender", hex(tx.sender)},
                       {"args", tx.args},
                       {"nondet", tx.nondet},
                       {"text", lines[i]}});
      }
      j["trace"] = {{"transactions", txs}, {"failing_assert", {{"location", f.where}, {"checks", f.note}}}};
    } else {
      j["trace"] = nullptr;
    }
    char timing[128];
    std::snprintf(timing, sizeof timing, "time: invariant inference %.2fs, bounded search %.2fs\n", r.houdini_seconds,
                  r.bmc_seconds);
    text += timing;
    return finish(code, verify::to_string(r.verdict));
  } catch (const Error& e) {
    return fail(kInputError, e);
  }
}

}  // namespace vsol::cli
