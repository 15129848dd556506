#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vsol/sol_ast.hpp"

namespace vsol::sol {

// Source-level reference semantics for typed, modifier-free programs. Used as
// an independent oracle for the translation and for exhaustive search.
// Arrays follow the verification model: no bounds checks, length is a plain
// counter, and elements of arrays created by `new T[](n)` start at zero/null.
struct Value {
  enum Kind { Int, Str, Ref };
  Kind kind = Int;
  int64_t i = 0;
  std::string s;

  static Value integer(int64_t v) { return {Int, v, {}}; }
  static Value str(std::string v) { return {Str, 0, std::move(v)}; }
  static Value ref(int64_t r) { return {Ref, r, {}}; }
  bool operator==(const Value& o) const { return kind == o.kind && i == o.i && s == o.s; }
  bool operator<(const Value& o) const;
  std::string str() const;
};

struct HeapObj {
  bool instance = false;
  std::string contract;                  // instance: dynamic type
  std::map<std::string, Value> fields;   // instance: state variables
  TypeP type;                            // mapping/array type
  std::map<Value, Value> entries;        // mapping/array contents
  int64_t length = 0;
  // Set for objects created by mapping allocation: reference-typed entries
  // exist (fresh and empty) before they are first written.
  bool lazy_children = false;
};

struct SolState {
  std::map<int64_t, HeapObj> heap;
  int64_t next_ref = 1000;
};

class Interpreter {
 public:
  enum class Outcome { Completed, AssertFailed, Reverted, BudgetExhausted };
  struct Result {
    Outcome outcome = Outcome::Completed;
    Loc loc;               // failing assert / require
    Value ret;
    int64_t created = 0;   // create(): the new instance
  };

  explicit Interpreter(const Program& p, int64_t step_budget = 1000000);

  // Deploys a fresh instance; on revert the state is unchanged.
  Result create(const std::string& contract, const std::vector<Value>& args, int64_t sender);
  // A transaction: on revert or assert failure the state is rolled back.
  Result call(int64_t receiver, const std::string& fn, const std::vector<Value>& args, int64_t sender);

  SolState& state() { return st_; }
  const SolState& state() const { return st_; }
  const Program& program() const { return p_; }
  void set_nondet(std::function<bool()> f) { nondet_ = std::move(f); }

 private:
  const Program& p_;
  SolState st_;
  int64_t budget_;
  int64_t steps_ = 0;
  std::function<bool()> nondet_;

  friend class Exec;
};

}  // namespace vsol::sol
