#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace qcal {

/// Flat `key = value` configuration text (a TOML subset: one pair per line,
/// `#` comments, optional double quotes around string values).
///
/// Every accessor records the key as consumed so that callers can reject
/// unknown keys with `require_all_consumed()`. Malformed values raise
/// ConfigError naming the key and its line.
class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueConfig parse(std::string_view text, std::string source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& key) const;

  /// Inserts or replaces a value (line 0 marks a programmatic override).
  void set(const std::string& key, std::string value);

  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  /// Throws ConfigError listing every key that no accessor has read.
  void require_all_consumed() const;

 private:
  const Entry* find(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> consumed_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace qcal
