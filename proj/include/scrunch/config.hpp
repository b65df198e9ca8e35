#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scrunch {

// Plain-text key = value configuration with [section] headers. Keys are
// stored as "section.key" ("" section for the preamble).
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string str(const std::string& key, const std::string& def = "") const;
  double num(const std::string& key, double def) const;
  double num_required(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t def) const;
  std::vector<double> num_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  // Resolved key = value dump, sorted, for manifest.txt.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace scrunch
