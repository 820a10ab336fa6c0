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

#include "mipt/quan/checkpoint.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mipt::quan {

namespace {

constexpr const char *kFormat = "mipt-quan-checkpoint";
constexpr int kVersion = 1;

}  // namespace

std::string checkpoint_to_string(const ModelParams &params, const CheckpointMeta &meta) {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    const ModelConfig &c = params.config;
    doc["config"] = {{"L", c.L},
                     {"N", c.N},
                     {"n_e", c.n_e},
                     {"d_h", c.d_h},
                     {"drop_rate", c.drop_rate},
                     {"use_intertraj", c.use_intertraj},
                     {"use_attention", c.use_attention}};
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const Tensor *t : params.tensors()) {
        nlohmann::ordered_json entry;
        entry["name"] = t->name;
        entry["shape"] = {t->rows, t->cols};
        entry["values"] = t->values;
        tensors.push_back(std::move(entry));
    }
    doc["tensors"] = std::move(tensors);
    doc["metadata"] = {{"epoch", meta.epoch}, {"test_loss", meta.test_loss}, {"seed", meta.seed}};
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string &text) {
    try {
        auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
            throw std::runtime_error("not a supported checkpoint");
        }
        const auto &cj = doc.at("config");
        ModelConfig c;
        c.L = cj.at("L").get<size_t>();
        c.N = cj.at("N").get<size_t>();
        c.n_e = cj.at("n_e").get<size_t>();
        c.d_h = cj.at("d_h").get<size_t>();
        c.drop_rate = cj.at("drop_rate").get<double>();
        c.use_intertraj = cj.at("use_intertraj").get<bool>();
        c.use_attention = cj.at("use_attention").get<bool>();
        Checkpoint out{ModelParams(c), {}};
        auto targets = out.params.tensors();
        const auto &tj = doc.at("tensors");
        if (tj.size() != targets.size()) {
            throw std::runtime_error("checkpoint tensor count does not match the config");
        }
        for (size_t i = 0; i < targets.size(); i++) {
            const auto &e = tj.at(i);
            Tensor &t = *targets[i];
            auto shape = e.at("shape").get<std::vector<size_t>>();
            if (e.at("name").get<std::string>() != t.name || shape.size() != 2 || shape[0] != t.rows ||
                shape[1] != t.cols) {
                throw std::runtime_error("checkpoint tensor " + t.name + " has an unexpected name or shape");
            }
            auto values = e.at("values").get<std::vector<double>>();
            if (values.size() != t.size()) {
                throw std::runtime_error("checkpoint tensor " + t.name + " has the wrong value count");
            }
            t.values = std::move(values);
        }
        const auto &mj = doc.at("metadata");
        out.meta.epoch = mj.at("epoch").get<size_t>();
        out.meta.test_loss = mj.at("test_loss").get<double>();
        out.meta.seed = mj.at("seed").get<uint64_t>();
        return out;
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw std::runtime_error(std::string("invalid checkpoint config: ") + e.what());
    }
}

void save_checkpoint(const std::string &path, const ModelParams &params, const CheckpointMeta &meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << checkpoint_to_string(params, meta);
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_string(ss.str());
}

}  // namespace mipt::quan
