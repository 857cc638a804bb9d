// Copyright 2026 The qmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Plain-text experiment configuration: one `key = value` pair per line,
 * `#` starts a comment, blank lines are ignored. Lists are comma separated.
 *
 *     seed = 42
 *     budgets = 100, 1000, 10000
 *     noise = hardware
 *     region.gradient = 20, 0, 20, 12
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmean {

/// Malformed configuration text or value (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written (CLI exit code 3).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Config {
  public:
    static Config parse(std::string_view text, std::string_view origin = "<config>");
    static Config load(const std::string &path);

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    void set(const std::string &key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string> &entries() const { return values_; }

    std::string get_string(const std::string &key) const;
    std::string get_string(const std::string &key, const std::string &fallback) const;
    std::int64_t get_int(const std::string &key) const;
    std::int64_t get_int(const std::string &key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string &key) const;
    std::uint64_t get_uint(const std::string &key, std::uint64_t fallback) const;
    double get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;
    std::vector<std::uint64_t> get_uint_list(const std::string &key) const;
    std::vector<double> get_double_list(const std::string &key) const;
    std::vector<std::string> get_string_list(const std::string &key) const;

    /// Keys starting with `prefix`, prefix stripped.
    std::map<std::string, std::string> with_prefix(const std::string &prefix) const;

    /// Canonical text form (sorted keys), parseable by `parse`.
    std::string to_text() const;

  private:
    std::map<std::string, std::string> values_;
};

/// Strict numeric parsing helpers shared with the CLI.
std::uint64_t parse_uint(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
std::vector<std::string> split_list(std::string_view text);

}  // namespace qmean
