#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vsol/error.hpp"

namespace vsol::smt {

// Minimal s-expression, enough for solver responses.
struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> list;
  bool is_atom() const { return !atom.empty(); }
  std::string str() const;
};

// Throws Error("SolverError", ...) on malformed input.
std::vector<SExpr> parse_sexprs(const std::string& text);

struct SolverConfig {
  std::string path;  // empty: $SMT_SOLVER, then "z3" on PATH
  double timeout_s = 120;
  std::string dump_dir;  // non-empty: every query is written there
};

std::string resolve_solver_path(const std::string& flag);

enum class Status { Sat, Unsat, Unknown };
std::string to_string(Status s);

// One solver process. Commands go to its stdin; check() and get_values()
// read the responses. A query that runs past the timeout kills the process
// and reports Unknown; the session is then dead and every later call throws
// SolverCrashed until restart().
class Session {
 public:
  explicit Session(const SolverConfig& cfg);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void send(const std::string& commands);
  Status check();
  // Values of the given terms in the last model, as printed by the solver.
  std::map<std::string, std::string> get_values(const std::vector<std::string>& terms);
  bool alive() const { return pid_ > 0; }
  // Starts a fresh process and replays everything sent outside push/pop.
  void restart();

 private:
  void start();
  void kill_process();
  void write_all(const std::string& s);
  std::string read_response();

  SolverConfig cfg_;
  std::string path_;
  int pid_ = -1;
  int in_fd_ = -1, out_fd_ = -1;
  std::string buf_;
  std::string base_;  // commands at scope depth 0, for restart()
  int depth_ = 0;
};

// Integer value of a printed model value: 5, (- 5), true, false.
int64_t value_of(const std::string& printed);

struct Result {
  Status status = Status::Unknown;
  std::map<std::string, std::string> values;  // requested terms, when Sat
};

// Runs a complete script (without check-sat) in a fresh process, then
// check-sat and, when Sat, get-value on `want`. `name` labels the dump file.
Result check_script(const std::string& script, const SolverConfig& cfg, const std::vector<std::string>& want = {},
                    const std::string& name = "query");

}  // namespace vsol::smt
