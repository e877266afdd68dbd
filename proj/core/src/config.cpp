#include "qcal/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "qcal/errors.hpp"

namespace qcal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source) {
  KeyValueConfig config;
  config.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto raw = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto where = config.source_ + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      throw ConfigError(where + ": tables are not supported in flat configs");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
    }
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string_view::npos) {
        throw ConfigError(where + ": unterminated string for key '" + std::string(key) + "'");
      }
      const auto rest = trim(value.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') {
        throw ConfigError(where + ": trailing text after string for key '" + std::string(key) + "'");
      }
      value = value.substr(1, close - 1);
    } else {
      const auto hash = value.find('#');
      if (hash != std::string_view::npos) value = trim(value.substr(0, hash));
    }
    if (value.empty()) {
      throw ConfigError(where + ": empty value for key '" + std::string(key) + "'");
    }
    const std::string k(key);
    if (config.entries_.count(k) != 0) {
      throw ConfigError(where + ": duplicate key '" + k + "' (first on line " +
                        std::to_string(config.entries_.at(k).line) + ")");
    }
    config.entries_[k] = Entry{std::string(value), line_no};
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

void KeyValueConfig::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  std::string where = source_;
  if (it != entries_.end() && it->second.line > 0) where += ":" + std::to_string(it->second.line);
  throw ConfigError(where + ": key '" + key + "': " + message);
}

bool KeyValueConfig::contains(const std::string& key) const { return entries_.count(key) != 0; }

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  double v = 0.0;
  const auto* first = e->value.data();
  const auto* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(key, "expected a number, got '" + e->value + "'");
  return v;
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  std::int64_t v = 0;
  const auto* first = e->value.data();
  const auto* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(const std::string& key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  std::uint64_t v = 0;
  const auto* first = e->value.data();
  const auto* last = first + e->value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    fail(key, "expected a non-negative integer, got '" + e->value + "'");
  }
  return v;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  entries_[key] = Entry{std::move(value), 0};
}

void KeyValueConfig::require_all_consumed() const {
  std::string unknown;
  for (const auto& [key, entry] : entries_) {
    if (consumed_.count(key) != 0) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += "'" + key + "'";
    if (entry.line > 0) unknown += " (line " + std::to_string(entry.line) + ")";
  }
  if (!unknown.empty()) throw ConfigError(source_ + ": unknown key(s) " + unknown);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace qcal
