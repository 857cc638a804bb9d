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

#include "qmean/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qmean {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
            return false;
        }
    }
    return true;
}

std::string describe(std::string_view what, std::string_view text) {
    return std::string(what) + ": cannot parse '" + std::string(text) + "'";
}

}  // namespace

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) return v;
    // Accept integral scientific notation such as 1e5.
    const double d = parse_double(text, what);
    if (d >= 0 && d <= 9.0e18 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
    throw ConfigError(describe(what, text) + " as a non-negative integer");
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(describe(what, text) + " as an integer");
    }
    return v;
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string s(trim(text));
    if (s.empty()) throw ConfigError(describe(what, text) + " as a number");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        throw ConfigError(describe(what, text) + " as a number");
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw ConfigError(describe(what, text) + " as a number");
    }
    return v;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                               : comma - start));
        if (item.empty()) throw ConfigError("empty item in list '" + std::string(text) + "'");
        out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Config Config::parse(std::string_view text, std::string_view origin) {
    Config cfg;
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
        const std::string where = std::string(origin) + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
        if (cfg.has(std::string(key))) {
            throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
        }
        cfg.values_[std::string(key)] = std::string(value);
        if (end == text.size()) break;
    }
    return cfg;
}

Config Config::load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string Config::get_string(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string &key, const std::string &fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string &key) const { return parse_int(get_string(key), key); }

std::int64_t Config::get_int(const std::string &key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint(const std::string &key) const {
    return parse_uint(get_string(key), key);
}

std::uint64_t Config::get_uint(const std::string &key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

double Config::get_double(const std::string &key) const {
    return parse_double(get_string(key), key);
}

double Config::get_double(const std::string &key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

bool Config::get_bool(const std::string &key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(describe(key, v) + " as a boolean");
}

std::vector<std::uint64_t> Config::get_uint_list(const std::string &key) const {
    std::vector<std::uint64_t> out;
    for (const auto &item : split_list(get_string(key))) out.push_back(parse_uint(item, key));
    return out;
}

std::vector<double> Config::get_double_list(const std::string &key) const {
    std::vector<double> out;
    for (const auto &item : split_list(get_string(key))) out.push_back(parse_double(item, key));
    return out;
}

std::vector<std::string> Config::get_string_list(const std::string &key) const {
    return split_list(get_string(key));
}

std::map<std::string, std::string> Config::with_prefix(const std::string &prefix) const {
    std::map<std::string, std::string> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out[it->first.substr(prefix.size())] = it->second;
    }
    return out;
}

std::string Config::to_text() const {
    std::string out;
    for (const auto &[k, v] : values_) out += k + " = " + v + '\n';
    return out;
}

}  // namespace qmean
