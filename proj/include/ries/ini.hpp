#pragma once
#include <map>
#include <string>
#include <vector>

namespace ries {

// Minimal structured key/value reader. Format:
//   [section.subsection]
//   key = value        ; comment
// Keys are addressed as "section.subsection.key". Section-less keys keep their
// bare name. '#' and ';' start comments. Values keep internal whitespace.
class IniFile {
 public:
  static IniFile parse(const std::string& text);
  static IniFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  // Typed getters; the *_or forms fall back to a default when the key is
  // absent. Malformed numerics throw ConfigError naming the key.
  std::string get_str(const std::string& key) const;
  std::string get_str_or(const std::string& key, const std::string& dflt) const;
  double get_num(const std::string& key) const;
  double get_num_or(const std::string& key, double dflt) const;
  long get_int_or(const std::string& key, long dflt) const;
  bool get_bool_or(const std::string& key, bool dflt) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Keys actually read via a getter; lets a loader flag unknown keys.
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> touched_;
};

}  // namespace ries
