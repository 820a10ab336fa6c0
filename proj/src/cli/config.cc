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

#include "mipt/cli/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mipt::cli {

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

size_t parse_count(const std::string &text, const std::string &what) {
    std::string t = trim(text);
    size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ValidationError(what + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

double parse_number(const std::string &text, const std::string &what) {
    std::string t = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ValidationError(what + ": expected a number, got '" + text + "'");
    }
    return v;
}

bool parse_flag(const std::string &text, const std::string &what) {
    std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ValidationError(what + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string &text, const std::string &what) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ValidationError(what + ": empty list item");
        }
        out.push_back(item);
    }
    if (out.empty()) {
        throw ValidationError(what + ": empty list");
    }
    return out;
}

std::vector<double> parse_numbers(const std::string &text, const std::string &what) {
    std::vector<double> out;
    for (const auto &s : split_list(text, what)) out.push_back(parse_number(s, what));
    return out;
}

const std::set<std::string> &RunConfig::known_keys() {
    static const std::set<std::string> keys = {
        // model and optimizer
        "N", "n_e", "d_h", "drop_rate", "use_intertraj", "use_attention", "learning_rate", "l2",
        "trajectories_per_batch", "max_epochs", "patience", "shuffle_period", "seed",
        // circuit and in-memory data generation
        "L", "task", "gammas", "labels", "M", "M_test", "eval_gammas", "eval_M", "noise_p1q", "noise_p2q",
        // dataset files and outputs
        "train", "test", "test_labels", "out_model", "out_losses"};
    return keys;
}

RunConfig RunConfig::parse(const std::string &text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(ss, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) {
            throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (cfg.entries_.count(key)) {
            throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        if (value.empty()) {
            throw ValidationError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const std::string &RunConfig::str(const std::string &key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ValidationError("missing config key '" + key + "'");
    }
    return it->second;
}

size_t RunConfig::count(const std::string &key) const { return parse_count(str(key), key); }

size_t RunConfig::count_or(const std::string &key, size_t fallback) const {
    return has(key) ? count(key) : fallback;
}

double RunConfig::number(const std::string &key) const { return parse_number(str(key), key); }

double RunConfig::number_or(const std::string &key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

bool RunConfig::flag_or(const std::string &key, bool fallback) const {
    return has(key) ? parse_flag(str(key), key) : fallback;
}

std::vector<std::string> RunConfig::list(const std::string &key) const { return split_list(str(key), key); }

std::vector<double> RunConfig::numbers(const std::string &key) const { return parse_numbers(str(key), key); }

void RunConfig::set(const std::string &key, const std::string &value) {
    if (!known_keys().count(key)) {
        throw ValidationError("unknown key '" + key + "'");
    }
    entries_[key] = value;
}

quan::TrainConfig RunConfig::train_config(size_t L) const {
    quan::TrainConfig c;
    c.model.L = L;
    c.model.N = count_or("N", c.model.N);
    c.model.n_e = count_or("n_e", c.model.n_e);
    c.model.d_h = count_or("d_h", c.model.d_h);
    c.model.drop_rate = number_or("drop_rate", c.model.drop_rate);
    c.model.use_intertraj = flag_or("use_intertraj", c.model.use_intertraj);
    c.model.use_attention = flag_or("use_attention", c.model.use_attention);
    c.learning_rate = number_or("learning_rate", c.learning_rate);
    c.l2 = number_or("l2", c.l2);
    c.trajectories_per_batch = count_or("trajectories_per_batch", c.trajectories_per_batch);
    c.max_epochs = count_or("max_epochs", c.max_epochs);
    c.patience = count_or("patience", c.patience);
    c.shuffle_period = count_or("shuffle_period", c.shuffle_period);
    c.seed = count_or("seed", c.seed);
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    return c;
}

}  // namespace mipt::cli
