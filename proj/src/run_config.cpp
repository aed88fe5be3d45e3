#include "bfequiv/run_config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bfequiv/error.hpp"

namespace bfe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return k.find("..") == std::string::npos;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* b = s.data();
  const auto res = std::from_chars(b, b + s.size(), out);
  return res.ec == std::errc() && res.ptr == b + s.size();
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) fail(ErrorCode::Config, where + "expected key=value, found '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) fail(ErrorCode::Config, where + "invalid key '" + key + "'");
    if (key.find('.') == std::string::npos)
      fail(ErrorCode::Config, where + "key '" + key + "' needs a section prefix (problem., prior., run.)");
    if (cfg.entries_.count(key))
      fail(ErrorCode::Config, where + "duplicate key '" + key + "' (first set on line " +
                                  std::to_string(cfg.entries_[key].line) + ")");
    if (value.empty()) fail(ErrorCode::Config, where + "empty value for '" + key + "'");
    cfg.entries_[key] = Entry{value, line_no};
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse(ss.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) fail(ErrorCode::Config, "invalid key '" + key + "'");
  entries_[key] = Entry{trim(value), 0};
}

const RunConfig::Entry& RunConfig::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorCode::Config, source_ + ": missing required key '" + key + "'");
  return it->second;
}

void RunConfig::bad_value(const std::string& key, const std::string& what) const {
  const auto& e = entry(key);
  const std::string where = e.line > 0 ? source_ + ":" + std::to_string(e.line) : std::string("override");
  fail(ErrorCode::Config, where + ": " + key + " = '" + e.value + "' is not " + what);
}

std::string RunConfig::get_string(const std::string& key) const { return entry(key).value; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? entry(key).value : fallback;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0.0;
  if (!parse_number(entry(key).value, v)) bad_value(key, "a number");
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long RunConfig::get_int(const std::string& key) const {
  long long v = 0;
  if (!parse_number(entry(key).value, v)) {
    // Accept integral values written in scientific notation, e.g. 1e6.
    double d = 0.0;
    if (!parse_number(entry(key).value, d) || d != static_cast<double>(static_cast<long long>(d)))
      bad_value(key, "an integer");
    v = static_cast<long long>(d);
  }
  return v;
}

long long RunConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  std::uint64_t v = 0;
  if (!parse_number(entry(key).value, v)) bad_value(key, "an unsigned 64-bit integer");
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entry(key).value;
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  bad_value(key, "a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(entry(key).value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_number(trim(item), v)) bad_value(key, "a comma-separated list of numbers");
    out.push_back(v);
  }
  if (out.empty()) bad_value(key, "a non-empty list");
  return out;
}

std::optional<std::vector<double>> RunConfig::get_list_opt(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_list(key);
}

std::filesystem::path RunConfig::get_path(const std::string& key) const {
  std::filesystem::path p = entry(key).value;
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

std::vector<std::string> RunConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

}  // namespace bfe
