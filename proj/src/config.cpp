#include "qw2d/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qw {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_field(const std::string& key, const std::string& value,
                            const std::string& want) {
  throw std::runtime_error("config: " + key + ": cannot parse '" + value +
                           "' as " + want);
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw std::runtime_error("empty angle");
  double mult = 1.0;
  bool has_pi = false;
  if (t.size() >= 2 && (t.substr(t.size() - 2) == "pi" || t.substr(t.size() - 2) == "PI" ||
                        t.substr(t.size() - 2) == "Pi")) {
    has_pi = true;
    t = trim(t.substr(0, t.size() - 2));
    if (t.empty() || t == "+")
      mult = 1.0;
    else if (t == "-")
      mult = -1.0;
    else {
      size_t used = 0;
      mult = std::stod(t, &used);
      if (used != t.size()) throw std::runtime_error("trailing characters");
    }
    return mult * M_PI;
  }
  size_t used = 0;
  const double v = std::stod(t, &used);
  if (used != t.size()) throw std::runtime_error("trailing characters");
  (void)has_pi;
  return v;
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') continue;  // section headers
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               ": empty key");
    c.kv[key] = trim(t.substr(eq + 1));
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return from_string(buf.str());
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.kv) kv[k] = v;
}

std::string Config::get(const std::string& key, const std::string& def) const {
  auto it = kv.find(key);
  return it == kv.end() ? def : it->second;
}

long long Config::get_int(const std::string& key, long long def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  try {
    size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::runtime_error("");
    return v;
  } catch (...) {
    bad_field(key, it->second, "integer");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::runtime_error("");
    return v;
  } catch (...) {
    bad_field(key, it->second, "unsigned integer");
  }
}

double Config::get_double(const std::string& key, double def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::runtime_error("");
    return v;
  } catch (...) {
    bad_field(key, it->second, "number");
  }
}

double Config::get_angle(const std::string& key, double def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  try {
    return parse_angle(it->second);
  } catch (...) {
    bad_field(key, it->second, "angle (radians or e.g. 0.2pi)");
  }
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_field(key, v, "boolean");
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  std::vector<int> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::runtime_error("");
    } catch (...) {
      bad_field(key, it->second, "comma-separated integers");
    }
  }
  if (out.empty()) bad_field(key, it->second, "comma-separated integers");
  return out;
}

std::vector<double> Config::get_angle_list(const std::string& key,
                                           const std::vector<double>& def) const {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(parse_angle(item));
    } catch (...) {
      bad_field(key, it->second, "comma-separated angles");
    }
  }
  if (out.empty()) bad_field(key, it->second, "comma-separated angles");
  return out;
}

std::string Config::text() const {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace qw
