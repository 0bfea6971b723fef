#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qw {

// "0.2pi", "-pi", "pi" -> multiples of pi; plain numbers are radians.
double parse_angle(const std::string& text);

// Flat key = value file: '#' and ';' comments, [section] lines ignored,
// later assignments win. Lookups throw with the field name on bad values.
struct Config {
  std::map<std::string, std::string> kv;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  void merge(const Config& other);  // other wins
  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string get(const std::string& key, const std::string& def = "") const;
  long long get_int(const std::string& key, long long def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  double get_double(const std::string& key, double def) const;
  double get_angle(const std::string& key, double def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& def) const;
  std::vector<double> get_angle_list(const std::string& key,
                                     const std::vector<double>& def) const;

  // Sorted key = value lines; embedded in manifests.
  std::string text() const;
};

}  // namespace qw
