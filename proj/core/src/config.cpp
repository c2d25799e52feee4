// Copyright (c) 2026 The railodo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "railodo/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "railodo/error.hpp"

namespace railodo {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value,
                    const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return d;
  } catch (const std::exception&) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": key '" + key +
                      "': cannot parse '" + value + "' as a number");
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text,
                                            const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (cfg.entries_.count(key) != 0) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = Entry{value, lineno};
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

const KeyValueConfig::Entry& KeyValueConfig::require(
    const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(origin_ + ": missing key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  return require(key).value;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const Entry& e = require(key);
  return parse_double(key, e.value, origin_, e.line);
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const Entry& e = require(key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "': cannot parse '" + e.value + "' as an integer");
  }
}

bool KeyValueConfig::get_bool(const std::string& key) const {
  const Entry& e = require(key);
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                    "': cannot parse '" + e.value + "' as a boolean");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const Entry& e = require(key);
  std::istringstream in(e.value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    out.push_back(parse_double(key, tok, origin_, e.line));
  }
  if (out.empty()) {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "': empty tuple");
  }
  return out;
}

std::string KeyValueConfig::get_string_or(const std::string& key,
                                          const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double_or(const std::string& key,
                                     double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int_or(const std::string& key,
                                        std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0};
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) {
    out.push_back(k);
  }
  return out;
}

void KeyValueConfig::require_known_keys(
    const std::set<std::string>& allowed) const {
  for (const auto& [k, e] : entries_) {
    if (allowed.count(k) == 0) {
      throw ConfigError(origin_ + ":" + std::to_string(e.line) +
                        ": unknown key '" + k + "'");
    }
  }
}

}  // namespace railodo
