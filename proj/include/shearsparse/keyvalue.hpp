#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shearsparse/error.hpp"

namespace shearsparse {

// Line-oriented "key = value" text. '#' starts a comment; blank lines are
// skipped; keys are unique. Values keep inner whitespace.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text, const std::string& origin = "<text>") {
    KeyValues kv;
    kv.origin_ = origin;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorKind::ParseError, origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) fail(ErrorKind::ParseError, origin + ":" + std::to_string(line_no) + ": empty key");
      if (!kv.values_.emplace(key, value).second)
        fail(ErrorKind::ParseError, origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      if (end == text.size()) break;
    }
    return kv;
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  const std::string& origin() const noexcept { return origin_; }
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorKind::ParseError, origin_ + ": missing key '" + key + "'");
    return it->second;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const { return to_double(key, text(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    const std::string& v = text(key);
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
      fail(ErrorKind::ParseError, origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
    return out;
  }
  long long integer(const std::string& key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  // Whitespace- or comma-separated numbers; empty value gives an empty list.
  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& tok : split(text(key), ", \t")) out.push_back(to_double(key, tok));
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
  }

  // Groups separated by ';', each a list of numbers.
  std::vector<std::vector<double>> groups(const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const std::string& g : split(text(key), ";")) {
      std::vector<double> row;
      for (const std::string& tok : split(g, ", \t")) row.push_back(to_double(key, tok));
      if (!row.empty()) out.push_back(std::move(row));
    }
    return out;
  }

  static std::vector<std::string> split(std::string_view s, std::string_view seps) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && seps.find(s[i]) != std::string_view::npos) ++i;
      std::size_t j = i;
      while (j < s.size() && seps.find(s[j]) == std::string_view::npos) ++j;
      if (j > i) out.emplace_back(trim(s.substr(i, j - i)));
      i = j;
    }
    return out;
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  double to_double(const std::string& key, const std::string& v) const {
    double out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
      fail(ErrorKind::ParseError, origin_ + ": key '" + key + "' has a non-numeric value '" + v + "'");
    return out;
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
};

}  // namespace shearsparse
