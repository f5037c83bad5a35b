#include "dirlab/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "dirlab/error.hpp"
#include "dirlab/pointset_io.hpp"

namespace dirlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_long(const std::string& text, long& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

void ConfigSection::set(const std::string& key, std::string value, int line) {
  entries_[key] = ConfigEntry{std::move(value), line};
}

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void ConfigSection::bad_value(const std::string& key, const std::string& expected) const {
  const ConfigEntry* e = find(key);
  fail(ErrorCode::Parse, "line " + std::to_string(e ? e->line : line_) + ": key '" + key + "' in [" +
                             name_ + "]: expected " + expected + ", got '" + (e ? e->value : "") + "'");
}

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
  const ConfigEntry* e = find(key);
  return e ? e->value : fallback;
}

std::string ConfigSection::require_string(const std::string& key) const {
  const ConfigEntry* e = find(key);
  if (!e || e->value.empty()) {
    fail(ErrorCode::Parse, "line " + std::to_string(line_) + ": section [" + name_ + "] is missing key '" + key + "'");
  }
  return e->value;
}

long ConfigSection::get_int(const std::string& key, long fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  long v = 0;
  if (!parse_long(e->value, v)) bad_value(key, "an integer");
  return v;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  double v = 0;
  if (!parse_double(e->value, v)) bad_value(key, "a number");
  return v;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  bad_value(key, "true or false");
}

Rational ConfigSection::get_rational(const std::string& key, const Rational& fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  try {
    return parse_rational(e->value);
  } catch (const Error&) {
    bad_value(key, "a rational number");
  }
}

std::vector<long> ConfigSection::get_int_list(const std::string& key, const std::vector<long>& fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  std::vector<long> out;
  for (const auto& item : split_list(e->value)) {
    long v = 0;
    if (!parse_long(item, v)) bad_value(key, "a list of integers");
    out.push_back(v);
  }
  return out;
}

std::vector<double> ConfigSection::get_double_list(const std::string& key,
                                                   const std::vector<double>& fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) {
    double v = 0;
    if (!parse_double(item, v)) bad_value(key, "a list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<Rational> ConfigSection::get_rational_list(const std::string& key,
                                                       const std::vector<Rational>& fallback) const {
  const ConfigEntry* e = find(key);
  if (!e) return fallback;
  std::vector<Rational> out;
  for (const auto& item : split_list(e->value)) {
    try {
      out.push_back(parse_rational(item));
    } catch (const Error&) {
      bad_value(key, "a list of rationals");
    }
  }
  return out;
}

void ConfigSection::check_keys(const std::vector<std::string>& allowed) const {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, entry] : entries_) {
    if (!ok.count(key)) {
      fail(ErrorCode::Parse, "line " + std::to_string(entry.line) + ": unknown key '" + key + "' in [" + name_ + "]");
    }
  }
}

Config parse_config(std::string_view text) {
  Config config;
  config.globals = ConfigSection("global", 0);
  ConfigSection* current = &config.globals;
  std::set<std::string> names;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(ErrorCode::Parse, "line " + std::to_string(line) + ": unterminated section header");
      std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (name.empty()) fail(ErrorCode::Parse, "line " + std::to_string(line) + ": empty section name");
      if (!names.insert(name).second) {
        fail(ErrorCode::Parse, "line " + std::to_string(line) + ": duplicate section [" + name + "]");
      }
      config.sections.emplace_back(name, line);
      current = &config.sections.back();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::Parse, "line " + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) fail(ErrorCode::Parse, "line " + std::to_string(line) + ": missing key before '='");
    if (current->has(key)) {
      fail(ErrorCode::Parse, "line " + std::to_string(line) + ": key '" + key + "' repeated in [" + current->name() + "]");
    }
    current->set(key, std::move(value), line);
  }
  return config;
}

Config read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace dirlab
