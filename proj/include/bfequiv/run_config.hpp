#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bfe {

// Flat key=value configuration with dotted section prefixes.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::optional<std::vector<double>> get_list_opt(const std::string& key) const;

  // Relative paths in the config resolve against the config file's directory.
  std::filesystem::path get_path(const std::string& key) const;

  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  [[noreturn]] void bad_value(const std::string& key, const std::string& what) const;
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  std::string source_;
  std::filesystem::path base_dir_;
};

}  // namespace bfe
