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

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace railodo {

// Flat key=value configuration. One entry per line, '#' starts a comment,
// blank lines ignored. Sections are spelled with dotted keys
// (e.g. "imu.rate_hz = 300"). Values are scalars, whitespace-separated
// tuples, or bare strings.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text,
                                     const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  // Throwing getters; ConfigError messages carry the key name and, for
  // malformed values, the source line.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);

  // All keys, sorted.
  std::vector<std::string> keys() const;

  // Throws ConfigError naming the first key not in `allowed`.
  void require_known_keys(const std::set<std::string>& allowed) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_ = "<none>";

  const Entry& require(const std::string& key) const;
};

}  // namespace railodo
