#pragma once

#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

inline std::string fixture_path(const std::string& name) { return std::string(VSOL_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Renames generated temporaries (__v1, __t2, ...) to v, v2, ... in order
// of first appearance.
inline std::string normalize_temps(const std::string& text) {
  std::regex tmp("__[a-z]+[0-9]+");
  std::map<std::string, std::string> names;
  std::string out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), tmp);
  size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    out += text.substr(last, it->position() - last);
    auto [pos, fresh] = names.emplace(it->str(), "");
    if (fresh) pos->second = names.size() == 1 ? "v" : "v" + std::to_string(names.size());
    out += pos->second;
    last = it->position() + it->length();
  }
  return out + text.substr(last);
}
