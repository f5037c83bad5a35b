#pragma once

// Experiment configuration files.
//
//   # comment
//   [garnett]              section name, used as the experiment id
//   kind = garnett_decay   required
//   depths = 2, 3, 4, 5    lists are comma separated
//
// Keys before the first section are suite-level settings (`seed`, `threads`).
// Every error names the line and the key.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirlab/geometry.hpp"

namespace dirlab {

struct ConfigEntry {
  std::string value;
  int line = 0;
};

class ConfigSection {
 public:
  ConfigSection() = default;
  ConfigSection(std::string name, int line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const noexcept { return name_; }
  int line() const noexcept { return line_; }
  const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }

  void set(const std::string& key, std::string value, int line = 0);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  Rational get_rational(const std::string& key, const Rational& fallback) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<Rational> get_rational_list(const std::string& key,
                                          const std::vector<Rational>& fallback) const;

  // Throws Parse naming the first key not in `allowed`.
  void check_keys(const std::vector<std::string>& allowed) const;

 private:
  [[noreturn]] void bad_value(const std::string& key, const std::string& expected) const;
  const ConfigEntry* find(const std::string& key) const;

  std::string name_;
  int line_ = 0;
  std::map<std::string, ConfigEntry> entries_;
};

struct Config {
  ConfigSection globals;
  std::vector<ConfigSection> sections;
};

Config parse_config(std::string_view text);
Config read_config_file(const std::string& path);

}  // namespace dirlab
