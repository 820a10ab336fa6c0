// Copyright 2026 The mipt-quan Authors
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

#ifndef MIPT_CLI_CONFIG_H
#define MIPT_CLI_CONFIG_H

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mipt/quan/train.h"

namespace mipt::cli {

/// Bad flags, config keys or values; the CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Strict scalar parsers; throw ValidationError naming `what`.
size_t parse_count(const std::string &text, const std::string &what);
double parse_number(const std::string &text, const std::string &what);
bool parse_flag(const std::string &text, const std::string &what);
/// Splits on commas and trims whitespace; empty items are rejected.
std::vector<std::string> split_list(const std::string &text, const std::string &what);
std::vector<double> parse_numbers(const std::string &text, const std::string &what);

/// Flat `key = value` configuration. `#` starts a comment.
class RunConfig {
   public:
    static const std::set<std::string> &known_keys();

    static RunConfig parse(const std::string &text);
    static RunConfig load(const std::string &path);

    bool has(const std::string &key) const { return entries_.count(key) > 0; }
    const std::string &str(const std::string &key) const;
    size_t count(const std::string &key) const;
    size_t count_or(const std::string &key, size_t fallback) const;
    double number(const std::string &key) const;
    double number_or(const std::string &key, double fallback) const;
    bool flag_or(const std::string &key, bool fallback) const;
    std::vector<std::string> list(const std::string &key) const;
    std::vector<double> numbers(const std::string &key) const;

    void set(const std::string &key, const std::string &value);
    const std::map<std::string, std::string> &entries() const { return entries_; }

    /// Model and optimizer settings with defaults for absent keys. L comes
    /// from the caller because it is usually read from the data.
    quan::TrainConfig train_config(size_t L) const;

   private:
    std::map<std::string, std::string> entries_;
};

}  // namespace mipt::cli

#endif
