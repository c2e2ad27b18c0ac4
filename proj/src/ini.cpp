#include "ries/ini.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ries/common.hpp"

namespace ries {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_quote = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') in_quote = !in_quote;
    if (!in_quote && (c == '#' || c == ';')) return s.substr(0, i);
  }
  return s;
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
  IniFile f;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!val.empty() && val.front() == '"' && val.back() == '"' && val.size() >= 2)
      val = val.substr(1, val.size() - 2);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    f.values_[full] = val;
  }
  return f;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string IniFile::get_str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key: " + key);
  touched_[key] = true;
  return it->second;
}

std::string IniFile::get_str_or(const std::string& key, const std::string& dflt) const {
  auto it = values_.find(key);
  if (it == values_.end()) return dflt;
  touched_[key] = true;
  return it->second;
}

double IniFile::get_num(const std::string& key) const {
  std::string s = get_str(key);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError("config key " + key + ": not a number: '" + s + "'");
  return v;
}

double IniFile::get_num_or(const std::string& key, double dflt) const {
  if (!has(key)) return dflt;
  return get_num(key);
}

long IniFile::get_int_or(const std::string& key, long dflt) const {
  if (!has(key)) return dflt;
  double v = get_num(key);
  long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    throw ConfigError("config key " + key + ": expected integer");
  return n;
}

bool IniFile::get_bool_or(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  std::string s = get_str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key " + key + ": expected boolean, got '" + s + "'");
}

std::vector<std::string> IniFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!touched_.count(k)) out.push_back(k);
  return out;
}

}  // namespace ries
