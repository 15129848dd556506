#include "vsol/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace vsol::smt {

namespace {

[[noreturn]] void fail(const std::string& kind, const std::string& msg) { throw Error(kind, msg); }

bool space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

// Length of the first complete s-expression in s (after leading blanks), or
// npos when more input is needed.
size_t complete_prefix(const std::string& s) {
  size_t i = 0;
  while (i < s.size() && space(s[i])) ++i;
  if (i == s.size()) return std::string::npos;
  if (s[i] != '(') {
    while (i < s.size() && !space(s[i])) ++i;
    return i < s.size() ? i : std::string::npos;
  }
  int depth = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      for (++i; i < s.size(); ++i) {
        if (s[i] == '"' && (i + 1 >= s.size() || s[i + 1] != '"')) break;
        if (s[i] == '"') ++i;  // "" escape
      }
      if (i >= s.size()) return std::string::npos;
    } else if (c == '|') {
      i = s.find('|', i + 1);
      if (i == std::string::npos) return i;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

bool executable(const std::string& p) { return ::access(p.c_str(), X_OK) == 0; }

}  // namespace

std::string SExpr::str() const {
  if (is_atom()) return atom;
  std::string out = "(";
  for (size_t i = 0; i < list.size(); ++i) out += (i ? " " : "") + list[i].str();
  return out + ")";
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
  std::vector<SExpr> stack(1);
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (space(c)) {
      ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) fail("SolverError", "unbalanced response: " + text);
      SExpr done = std::move(stack.back());
      stack.pop_back();
      stack.back().list.push_back(std::move(done));
      ++i;
    } else {
      size_t j = i;
      if (c == '|') {
        j = text.find('|', i + 1);
        if (j == std::string::npos) fail("SolverError", "unterminated symbol: " + text);
        ++j;
      } else if (c == '"') {
        for (++j; j < text.size(); ++j) {
          if (text[j] == '"' && (j + 1 >= text.size() || text[j + 1] != '"')) break;
          if (text[j] == '"') ++j;
        }
        ++j;
      } else {
        while (j < text.size() && !space(text[j]) && text[j] != '(' && text[j] != ')') ++j;
      }
      SExpr a;
      a.atom = text.substr(i, j - i);
      stack.back().list.push_back(std::move(a));
      i = j;
    }
  }
  if (stack.size() != 1) fail("SolverError", "unbalanced response: " + text);
  return std::move(stack[0].list);
}

std::string resolve_solver_path(const std::string& flag) {
  std::string p = flag;
  if (p.empty()) {
    const char* env = std::getenv("SMT_SOLVER");
    p = env && *env ? env : "z3";
  }
  if (p.find('/') != std::string::npos) {
    if (!executable(p)) fail("SolverError", "solver not executable: " + p);
    return p;
  }
  const char* path = std::getenv("PATH");
  std::stringstream dirs(path ? path : "");
  std::string d;
  while (std::getline(dirs, d, ':')) {
    std::string cand = (d.empty() ? "." : d) + "/" + p;
    if (executable(cand)) return cand;
  }
  fail("SolverError", "solver not found on PATH: " + p);
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

Session::Session(const SolverConfig& cfg) : cfg_(cfg), path_(resolve_solver_path(cfg.path)) { start(); }

Session::~Session() {
  if (pid_ > 0) {
    std::string bye = "(exit)\n";
    (void)!::write(in_fd_, bye.data(), bye.size());
  }
  kill_process();
}

void Session::start() {
  static bool ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)ignored;
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) fail("SolverCrashed", std::strerror(errno));
  pid_t pid = ::fork();
  if (pid < 0) fail("SolverCrashed", std::strerror(errno));
  if (pid == 0) {
    ::dup2(to_child[0], 0);
    ::dup2(from_child[1], 1);
    ::dup2(from_child[1], 2);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl(path_.c_str(), path_.c_str(), "-in", "-smt2", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  buf_.clear();
  depth_ = 0;
  write_all("(set-option :print-success false)\n(set-option :produce-models true)\n");
}

void Session::kill_process() {
  if (in_fd_ >= 0) ::close(in_fd_);
  if (out_fd_ >= 0) ::close(out_fd_);
  in_fd_ = out_fd_ = -1;
  if (pid_ > 0) {
    int st = 0;
    // Give a solver that got (exit) a moment, then force it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &st, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      ::usleep(2000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &st, 0);
  }
  pid_ = -1;
}

void Session::restart() {
  kill_process();
  start();
  write_all(base_);
}

void Session::write_all(const std::string& s) {
  if (pid_ <= 0) fail("SolverCrashed", "solver session is not running");
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = ::write(in_fd_, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_process();
      fail("SolverCrashed", "solver closed its input");
    }
    off += static_cast<size_t>(n);
  }
}

void Session::send(const std::string& commands) {
  // Track scope depth so restart() replays only the base level.
  size_t pos = 0;
  while ((pos = commands.find("(push", pos)) != std::string::npos) ++depth_, ++pos;
  pos = 0;
  while ((pos = commands.find("(pop", pos)) != std::string::npos) --depth_, ++pos;
  if (depth_ == 0 && commands.find("(pop") == std::string::npos) base_ += commands;
  write_all(commands.back() == '\n' ? commands : commands + "\n");
}

std::string Session::read_response() {
  using clock = std::chrono::steady_clock;
  auto deadline = clock::now() + std::chrono::milliseconds(static_cast<int64_t>(cfg_.timeout_s * 1000));
  for (;;) {
    size_t n = complete_prefix(buf_);
    if (n != std::string::npos) {
      std::string r = buf_.substr(0, n);
      buf_.erase(0, n);
      size_t b = r.find_first_not_of(" \n\t\r");
      return b == std::string::npos ? "" : r.substr(b);
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0) {
      ::kill(pid_, SIGKILL);
      kill_process();
      return "";
    }
    pollfd pfd{out_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(std::min<int64_t>(left, 1000)));
    if (rc < 0 && errno != EINTR) fail("SolverCrashed", std::strerror(errno));
    if (rc <= 0) continue;
    char chunk[65536];
    ssize_t got = ::read(out_fd_, chunk, sizeof chunk);
    if (got <= 0) {
      std::string tail = buf_;
      kill_process();
      fail("SolverCrashed", "solver exited" + (tail.empty() ? std::string() : ": " + tail));
    }
    buf_.append(chunk, static_cast<size_t>(got));
  }
}

Status Session::check() {
  write_all("(check-sat)\n");
  std::string r = read_response();
  if (r.empty()) return Status::Unknown;  // timed out, process gone
  if (r == "sat") return Status::Sat;
  if (r == "unsat") return Status::Unsat;
  if (r == "unknown") return Status::Unknown;
  fail("SolverError", r);
}

std::map<std::string, std::string> Session::get_values(const std::vector<std::string>& terms) {
  std::map<std::string, std::string> out;
  if (terms.empty()) return out;
  std::string cmd = "(get-value (";
  for (size_t i = 0; i < terms.size(); ++i) cmd += (i ? " " : "") + terms[i];
  write_all(cmd + "))\n");
  std::string r = read_response();
  if (r.empty()) fail("SolverCrashed", "no response to get-value");
  if (r.rfind("(error", 0) == 0) fail("SolverError", r);
  auto es = parse_sexprs(r);
  if (es.size() != 1 || es[0].is_atom() || es[0].list.size() != terms.size()) fail("SolverError", r);
  for (size_t i = 0; i < terms.size(); ++i) {
    const SExpr& pair = es[0].list[i];
    if (pair.is_atom() || pair.list.size() != 2) fail("SolverError", r);
    out[terms[i]] = pair.list[1].str();
  }
  return out;
}

int64_t value_of(const std::string& printed) {
  if (printed == "true") return 1;
  if (printed == "false") return 0;
  auto es = parse_sexprs(printed);
  if (es.size() != 1) fail("SolverError", "not a value: " + printed);
  const SExpr& e = es[0];
  try {
    if (e.is_atom()) return std::stoll(e.atom);
    if (e.list.size() == 2 && e.list[0].atom == "-" && e.list[1].is_atom()) return -std::stoll(e.list[1].atom);
  } catch (const std::out_of_range&) {
    fail("SolverError", "value out of range: " + printed);
  } catch (const std::invalid_argument&) {
  }
  fail("SolverError", "not an integer value: " + printed);
}

Result check_script(const std::string& script, const SolverConfig& cfg, const std::vector<std::string>& want,
                    const std::string& name) {
  if (!cfg.dump_dir.empty()) {
    std::filesystem::create_directories(cfg.dump_dir);
    std::ofstream(std::filesystem::path(cfg.dump_dir) / (name + ".smt2")) << script << "(check-sat)\n";
  }
  Session s(cfg);
  s.send(script);
  Result r;
  r.status = s.check();
  if (r.status == Status::Sat) r.values = s.get_values(want);
  return r;
}

}  // namespace vsol::smt
