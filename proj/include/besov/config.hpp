// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace besov {

// Raised for any configuration problem; messages carry line numbers where a
// file location is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Structured-text configuration: '[section]' headers and 'key = value'
// lines, full-line '#' comments, arrays as '[v1, v2, ...]'.  Keys are
// tracked on access so unknown keys can be rejected after typed extraction.
class ConfigDoc {
 public:
  static ConfigDoc parse(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  std::int64_t get_int(const std::string& section,
                       const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& section,
                                         const std::string& key) const;

  // Throws ConfigError naming every unconsumed key with its line number.
  void require_all_consumed() const;

  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;

  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section,
                       const std::string& key) const;
};

// FNV-1a over the canonical text, printed as 16 hex digits; used as the
// provenance hash echoed into every output file.
std::string text_hash(const std::string& text);

}  // namespace besov
