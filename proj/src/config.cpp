// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 the besovdens authors

#include "besov/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace besov {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigDoc ConfigDoc::parse(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header '" + t + "'");
      }
      section = trim(t.substr(1, t.size() - 2));
      doc.sections_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value' or '[section]'");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any [section]");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    auto [it, inserted] = doc.sections_[section].insert(
        {key, Entry{value, lineno, false}});
    if (!inserted) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "' in [" + section + "] (first at line " +
                        std::to_string(it->second.line) + ")");
    }
  }
  return doc;
}

const ConfigDoc::Entry* ConfigDoc::find(const std::string& section,
                                        const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  kit->second.used = true;
  return &kit->second;
}

const ConfigDoc::Entry& ConfigDoc::require(const std::string& section,
                                           const std::string& key) const {
  const Entry* e = find(section, key);
  if (e == nullptr) {
    throw ConfigError("missing required key '" + key + "' in [" + section +
                      "]");
  }
  return *e;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigDoc::get_string(const std::string& section,
                                  const std::string& key) const {
  return require(section, key).value;
}

std::string ConfigDoc::get_string_or(const std::string& section,
                                     const std::string& key,
                                     const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

namespace {

std::int64_t parse_int(const ConfigDoc::Entry& e, const std::string& key) {
  // strtoll via from_chars for strictness
  std::int64_t out = 0;
  const std::string& v = e.value;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                      "' expects an integer, got '" + v + "'");
  }
  return out;
}

double parse_double(const ConfigDoc::Entry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                      "' expects a number, got '" + e.value + "'");
  }
}

}  // namespace

std::int64_t ConfigDoc::get_int(const std::string& section,
                                const std::string& key) const {
  return parse_int(require(section, key), key);
}

std::int64_t ConfigDoc::get_int_or(const std::string& section,
                                   const std::string& key,
                                   std::int64_t fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_int(*e, key) : fallback;
}

double ConfigDoc::get_double(const std::string& section,
                             const std::string& key) const {
  return parse_double(require(section, key), key);
}

double ConfigDoc::get_double_or(const std::string& section,
                                const std::string& key,
                                double fallback) const {
  const Entry* e = find(section, key);
  return e ? parse_double(*e, key) : fallback;
}

bool ConfigDoc::get_bool_or(const std::string& section, const std::string& key,
                            bool fallback) const {
  const Entry* e = find(section, key);
  if (e == nullptr) return fallback;
  if (e->value == "true" || e->value == "on" || e->value == "1") return true;
  if (e->value == "false" || e->value == "off" || e->value == "0") {
    return false;
  }
  throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                    "' expects true/false, got '" + e->value + "'");
}

std::vector<std::int64_t> ConfigDoc::get_int_list(const std::string& section,
                                                  const std::string& key) const {
  const Entry& e = require(section, key);
  std::string v = trim(e.value);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                      "' expects a list like [1, 2, 3]");
  }
  v = v.substr(1, v.size() - 2);
  std::vector<std::int64_t> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string s = trim(item);
    if (s.empty()) continue;
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                        "' has a non-integer element '" + s + "'");
    }
    out.push_back(x);
  }
  return out;
}

void ConfigDoc::require_all_consumed() const {
  std::string bad;
  for (const auto& [section, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.used) {
        if (!bad.empty()) bad += "; ";
        bad += "line " + std::to_string(entry.line) + ": unknown key '" + key +
               "' in [" + section + "]";
      }
    }
  }
  if (!bad.empty()) throw ConfigError(bad);
}

std::string text_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace besov
