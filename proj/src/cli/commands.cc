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

#include "mipt/cli/commands.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "mipt/borndist.h"
#include "mipt/cli/config.h"
#include "mipt/correlations.h"
#include "mipt/dataset.h"
#include "mipt/decoder.h"
#include "mipt/orderparam.h"
#include "mipt/quan/checkpoint.h"
#include "mipt/quan/metrics.h"
#include "mipt/stats.h"

namespace mipt::cli {

namespace {

/// CSV destination: a file when a path is given, otherwise the command's stdout.
class CsvSink {
   public:
    CsvSink(const std::string &path, std::ostream &fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw std::runtime_error("cannot open " + path + " for writing");
            }
            stream_ = file_.get();
        }
        *stream_ << std::setprecision(17);
    }
    std::ostream &operator*() { return *stream_; }

   private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *stream_ = nullptr;
};

/// Shortest text that reads back as the same double; used for axis labels.
std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string na_or(const std::optional<double> &v) {
    if (!v) return "NA";
    std::ostringstream ss;
    ss << std::setprecision(17) << *v;
    return ss.str();
}

TaskKind task_from(const std::string &name) {
    try {
        return parse_task(name);
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
}

NoiseModel noise_from(const std::string &text) {
    NoiseModel noise;
    if (text.empty()) return noise;
    auto v = parse_numbers(text, "--noise");
    if (v.size() != 2) {
        throw ValidationError("--noise expects p1q,p2q");
    }
    noise.p1q = v[0];
    noise.p2q = v[1];
    try {
        noise.validate();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    return noise;
}

std::vector<uint8_t> labels_from(const std::vector<std::string> &items, const std::string &what) {
    std::vector<uint8_t> out;
    for (const auto &s : items) {
        size_t v = parse_count(s, what);
        if (v > 1) {
            throw ValidationError(what + ": labels must be 0 or 1");
        }
        out.push_back(static_cast<uint8_t>(v));
    }
    return out;
}

std::string gamma_tag(double gamma) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", gamma);
    return buf;
}

std::string dual_path(const std::string &bin_path) {
    std::filesystem::path p(bin_path);
    p.replace_extension(".dual.csv");
    return p.string();
}

/// Loads dual likelihoods from a trajectory file and its sidecar CSV.
std::vector<DualLikelihood> load_duals(const std::string &path, InitialState truth) {
    TrajectoryFile file = read_trajectories(path);
    std::ifstream in(dual_path(path));
    if (!in) {
        throw std::runtime_error("missing likelihood sidecar " + dual_path(path));
    }
    std::string line;
    std::getline(in, line);
    if (line != "index,trajectory_seed,logp_psi,logp_phi") {
        throw std::runtime_error("unexpected sidecar header in " + dual_path(path));
    }
    std::vector<DualLikelihood> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string idx, seed, lp, lf;
        std::getline(ss, idx, ',');
        std::getline(ss, seed, ',');
        std::getline(ss, lp, ',');
        std::getline(ss, lf, ',');
        size_t i = parse_count(idx, "sidecar index");
        if (i != out.size() || i >= file.records.size()) {
            throw std::runtime_error("sidecar rows do not match the trajectory file");
        }
        DualLikelihood d;
        d.record = file.records[i];
        d.logp_psi = lp == "-inf" ? -INFINITY : parse_number(lp, "logp_psi");
        d.logp_phi = lf == "-inf" ? -INFINITY : parse_number(lf, "logp_phi");
        d.true_state = truth;
        out.push_back(std::move(d));
    }
    if (out.size() != file.records.size()) {
        throw std::runtime_error("sidecar rows do not match the trajectory file");
    }
    return out;
}

std::vector<quan::GammaData> load_classes(const std::vector<std::string> &paths,
                                          const std::vector<uint8_t> *labels) {
    if (labels && labels->size() != paths.size()) {
        throw ValidationError("label list must match the file list");
    }
    std::vector<quan::GammaData> out;
    for (size_t i = 0; i < paths.size(); i++) {
        if (!std::filesystem::exists(paths[i])) {
            throw ValidationError("missing dataset " + paths[i]);
        }
        TrajectoryFile f = read_trajectories(paths[i]);
        quan::GammaData d;
        d.gamma = f.meta.gamma;
        d.label = labels ? (*labels)[i] : f.meta.label;
        d.records = std::move(f.records);
        out.push_back(std::move(d));
    }
    return out;
}

size_t common_L(const std::vector<quan::GammaData> &data) {
    size_t L = 0;
    for (const auto &d : data) {
        for (const auto &r : d.records) {
            if (L == 0) L = r.L;
            if (r.L != L) throw ValidationError("datasets disagree on L");
        }
    }
    if (L == 0) throw ValidationError("datasets are empty");
    return L;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string task, gamma, initial, noise, out;
    size_t L = 0, shots = 0;
    uint64_t seed = 0;
    bool dual = false;
};

int cmd_simulate(const SimulateArgs &a, bool initial_given, std::ostream &out) {
    TaskKind task = task_from(a.task);
    if (task != TaskKind::StateDistinguish && initial_given) {
        throw ValidationError("--initial applies to the distinguish task only");
    }
    if (a.dual && task != TaskKind::StateDistinguish) {
        throw ValidationError("--dual applies to the distinguish task only");
    }
    std::vector<InitialState> inits = {InitialState::Psi0};
    if (a.initial == "phi") {
        inits = {InitialState::Phi0};
    } else if (a.initial == "both") {
        inits = {InitialState::Psi0, InitialState::Phi0};
    } else if (a.initial != "psi") {
        throw ValidationError("--initial must be psi, phi or both");
    }
    NoiseModel noise = noise_from(a.noise);
    auto gammas = parse_numbers(a.gamma, "--gamma");
    std::filesystem::create_directories(a.out);
    for (double gamma : gammas) {
        for (InitialState init : inits) {
            CircuitConfig cfg;
            cfg.L = a.L;
            cfg.gamma = gamma;
            cfg.task = task;
            cfg.initial = init;
            cfg.noise = noise;
            cfg.master_seed = class_seed(a.seed, gamma, init);
            try {
                cfg.validate();
            } catch (const std::invalid_argument &e) {
                throw ValidationError(e.what());
            }
            std::string name = task_name(task) + "_L" + std::to_string(a.L) + "_g" + gamma_tag(gamma);
            if (task == TaskKind::StateDistinguish) {
                name += init == InitialState::Psi0 ? "_psi" : "_phi";
            }
            std::string path = (std::filesystem::path(a.out) / (name + ".bin")).string();
            TrajectorySampler sampler(cfg);
            std::vector<TrajectoryRecord> records;
            std::vector<DualLikelihood> duals;
            if (a.dual) {
                duals = sampler.sample_dual_many(0, a.shots);
                for (const auto &d : duals) records.push_back(d.record);
            } else {
                records = sampler.sample_many(0, a.shots);
            }
            DatasetMeta meta{a.L, gamma, task, default_label(task, init, gamma), noise, cfg.master_seed};
            write_trajectories(path, meta, records);
            write_manifest(path, meta, records.size());
            if (a.dual) {
                CsvSink sink(dual_path(path), out);
                *sink << "index,trajectory_seed,logp_psi,logp_phi\n";
                for (size_t i = 0; i < duals.size(); i++) {
                    *sink << i << ',' << duals[i].record.trajectory_seed << ',' << duals[i].logp_psi << ','
                          << duals[i].logp_phi << '\n';
                }
            }
            out << path << '\n';
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- probdist

int cmd_probdist(const std::string &in, size_t time, bool translate, const std::string &out_path,
                 std::ostream &out) {
    TrajectoryFile f = read_trajectories(in);
    size_t L = f.meta.L;
    if (time < 1 || time > 2 * L) {
        throw ValidationError("--time must lie in [1, 2L]");
    }
    BornEstimate est = empirical_born(f.records, time - 1, translate);
    ProbHistogram hist = prob_p_histogram(est, std::ldexp(1.0, static_cast<int>(L)));
    CsvSink sink(out_path, out);
    *sink << "p,density\n";
    for (const auto &[p, density] : hist.entries) {
        *sink << p << ',' << density << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
    std::string mode, probs_psi, probs_phi, N, model = "gamma1", in_psi, in_phi, out;
    double D = 0;
    size_t samples = 0;
    uint64_t seed = 0;
    bool alpha = false;
};

int cmd_decode(const DecodeArgs &a, const CLI::App &sub, std::ostream &out) {
    auto given = [&](const char *name) { return sub.count(name) > 0; };
    auto forbid = [&](std::initializer_list<const char *> names) {
        for (const char *n : names) {
            if (given(n)) throw ValidationError(std::string(n) + " is not valid with --mode " + a.mode);
        }
    };
    auto require = [&](std::initializer_list<const char *> names) {
        for (const char *n : names) {
            if (!given(n)) throw ValidationError(std::string(n) + " is required with --mode " + a.mode);
        }
    };
    CsvSink sink(a.out, out);
    *sink << "mode,N,estimate,stderr\n";
    if (a.mode == "exact") {
        require({"--probs-psi", "--probs-phi"});
        forbid({"--N", "--D", "--samples", "--seed", "--in-psi", "--in-phi", "--alpha", "--model"});
        auto psi = parse_numbers(a.probs_psi, "--probs-psi");
        auto phi = parse_numbers(a.probs_phi, "--probs-phi");
        double v;
        try {
            v = pcorr_exact(psi, phi);
        } catch (const std::invalid_argument &e) {
            throw ValidationError(e.what());
        }
        *sink << "exact,1," << v << ",0\n";
    } else if (a.mode == "mc") {
        require({"--N", "--D", "--samples", "--seed"});
        forbid({"--probs-psi", "--probs-phi", "--in-psi", "--in-phi"});
        BornModel model;
        if (a.model == "gamma1") {
            model = BornModel::Gamma1;
        } else if (a.model == "identical") {
            model = BornModel::Identical;
        } else {
            throw ValidationError("--model must be gamma1 or identical");
        }
        Rng rng(a.seed);
        for (const auto &n : split_list(a.N, "--N")) {
            size_t N = parse_count(n, "--N");
            Estimate e = pcorr_gamma1_mc(N, a.D, a.samples, rng, model);
            *sink << "mc," << N << ',' << e.value << ',' << e.error << '\n';
        }
        if (a.alpha) {
            Estimate e = accuracy_alpha_mc(a.D, a.samples, rng, model);
            *sink << "alpha,1," << e.value << ',' << e.error << '\n';
        }
    } else if (a.mode == "trajectory") {
        require({"--in-psi", "--in-phi", "--N", "--seed"});
        forbid({"--probs-psi", "--probs-phi", "--D", "--samples", "--alpha", "--model"});
        auto duals = load_duals(a.in_psi, InitialState::Psi0);
        auto phi = load_duals(a.in_phi, InitialState::Phi0);
        duals.insert(duals.end(), phi.begin(), phi.end());
        Rng rng(a.seed);
        for (const auto &n : split_list(a.N, "--N")) {
            size_t N = parse_count(n, "--N");
            Estimate e = pcorr_trajectory(duals, N, rng);
            *sink << "trajectory," << N << ',' << e.value << ',' << e.error << '\n';
        }
    } else {
        throw ValidationError("--mode must be exact, mc or trajectory");
    }
    return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const std::string &config_path, const std::optional<uint64_t> &seed, std::ostream &out) {
    RunConfig cfg = RunConfig::load(config_path);
    if (seed) {
        cfg.set("seed", std::to_string(*seed));
    }
    if (!cfg.has("seed")) {
        throw ValidationError("a seed is required (config key 'seed' or --seed)");
    }
    auto train_paths = cfg.list("train");
    auto test_paths = cfg.list("test");
    std::vector<uint8_t> labels, test_labels;
    if (cfg.has("labels")) labels = labels_from(cfg.list("labels"), "labels");
    if (cfg.has("test_labels")) test_labels = labels_from(cfg.list("test_labels"), "test_labels");
    auto train_data = load_classes(train_paths, cfg.has("labels") ? &labels : nullptr);
    auto test_data = load_classes(test_paths, cfg.has("test_labels") ? &test_labels : nullptr);
    size_t L = common_L(train_data);
    if (common_L(test_data) != L || (cfg.has("L") && cfg.count("L") != L)) {
        throw ValidationError("L disagrees between config, training and test data");
    }
    quan::TrainConfig tc = cfg.train_config(L);
    std::string model_path = cfg.str("out_model");
    std::string loss_path = cfg.has("out_losses") ? cfg.str("out_losses") : model_path + ".losses.csv";

    quan::TrainResult result;
    try {
        result = quan::train(train_data, test_data, tc);
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    quan::save_checkpoint(model_path, result.best, {result.best_epoch, result.best_test_loss, tc.seed});
    CsvSink sink(loss_path, out);
    *sink << "epoch,train_loss,test_loss\n";
    for (const auto &e : result.history) {
        *sink << e.epoch << ',' << e.train_loss << ',' << e.test_loss << '\n';
    }
    out << "best_epoch," << result.best_epoch << "\nbest_test_loss," << std::setprecision(17)
        << result.best_test_loss << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- eval

void write_eval(std::ostream &os, const quan::EvalMetrics &m) {
    os << "kind,gamma,mean_prediction,stderr,sets,gamma_star,sharpness,pcorr\n";
    for (const auto &row : m.per_gamma) {
        os << "gamma," << row.gamma << ',' << row.mean_prediction << ',' << row.error << ',' << row.sets
           << ",NA,NA,NA\n";
    }
    os << "summary,NA,NA,NA,NA," << na_or(m.gamma_star) << ',' << na_or(m.sharpness) << ',' << na_or(m.pcorr)
       << '\n';
}

int cmd_eval(const std::string &model_path, const std::vector<std::string> &inputs, const std::string &labels_s,
             uint64_t seed, const std::string &out_path, std::ostream &out) {
    quan::Checkpoint ck = quan::load_checkpoint(model_path);
    std::vector<std::string> paths;
    for (const auto &s : inputs) {
        for (const auto &p : split_list(s, "--in")) paths.push_back(p);
    }
    std::vector<uint8_t> labels;
    if (!labels_s.empty()) labels = labels_from(split_list(labels_s, "--labels"), "--labels");
    auto data = load_classes(paths, labels_s.empty() ? nullptr : &labels);
    if (labels_s.empty()) {
        for (auto &d : data) d.label.reset();
    }
    if (common_L(data) != ck.params.config.L) {
        throw ValidationError("data L does not match the model");
    }
    for (const auto &d : data) {
        if (d.records.size() < ck.params.config.N) {
            throw ValidationError("dataset has fewer records than the model's set size");
        }
    }
    auto metrics = quan::eval_metrics(ck.params, data, seed);
    CsvSink sink(out_path, out);
    write_eval(*sink, metrics);
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string axis, values, config, out, epsilon = "0.1", from_losses;
    size_t reps = 1;
    uint64_t seed = 0;
};

std::map<size_t, double> read_losses(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("M,loss", 0) != 0) {
        throw ValidationError("loss table must start with the header M,loss");
    }
    std::map<size_t, std::pair<double, size_t>> acc;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split_list(line, "loss table row");
        if (cols.size() < 2) throw ValidationError("loss table rows need M,loss");
        auto &cell = acc[parse_count(cols[0], "M")];
        cell.first += parse_number(cols[1], "loss");
        cell.second++;
    }
    std::map<size_t, double> out;
    for (const auto &[M, cell] : acc) out[M] = cell.first / static_cast<double>(cell.second);
    return out;
}

void write_mstar(std::ostream &os, const std::map<size_t, double> &losses, const std::vector<double> &eps) {
    for (double e : eps) {
        auto m = quan::minimal_sample_complexity(losses, e);
        os << "M,NA,NA,M_star@" << shortest(e) << ',' << (m ? std::to_string(*m) : std::string("NA")) << ",NA,"
           << (m ? 1 : 0) << '\n';
    }
}

struct CellStats {
    std::vector<double> values;
    size_t attempts = 0;
};

void write_cell(std::ostream &os, const std::string &axis, const std::string &value, size_t reps,
                const std::string &metric, const CellStats &s) {
    MeanError me = mean_error(s.values);
    os << axis << ',' << value << ',' << reps << ',' << metric << ',';
    if (s.values.empty()) {
        os << "NA,NA,0\n";
    } else {
        os << me.mean << ',' << me.error << ',' << s.values.size() << '\n';
    }
}

int cmd_sweep(const SweepArgs &a, std::ostream &out) {
    auto eps = parse_numbers(a.epsilon, "--epsilon");
    CsvSink sink(a.out, out);
    if (!a.from_losses.empty()) {
        *sink << "axis,value,reps,metric,mean,stderr,count\n";
        auto losses = read_losses(a.from_losses);
        for (const auto &[M, loss] : losses) {
            *sink << "M," << M << ",1,test_loss," << loss << ",NA,1\n";
        }
        write_mstar(*sink, losses, eps);
        return kExitOk;
    }
    if (a.axis != "M" && a.axis != "N" && a.axis != "L" && a.axis != "gamma") {
        throw ValidationError("--axis must be M, N, L or gamma");
    }
    if (a.values.empty() || a.config.empty()) {
        throw ValidationError("--values and --config are required unless --from-losses is given");
    }
    if (a.reps == 0) throw ValidationError("--reps must be positive");
    RunConfig base = RunConfig::load(a.config);
    TaskKind task = task_from(base.has("task") ? base.str("task") : "phase");
    auto gammas = base.numbers("gammas");
    std::vector<uint8_t> labels;
    if (task != TaskKind::StateDistinguish) {
        labels = labels_from(base.list("labels"), "labels");
        if (labels.size() != gammas.size()) throw ValidationError("labels must match gammas");
    }
    NoiseModel noise;
    noise.p1q = base.number_or("noise_p1q", 0.0);
    noise.p2q = base.number_or("noise_p2q", 0.0);
    std::vector<std::string> values = split_list(a.values, "--values");
    std::vector<double> eval_gammas;
    if (a.axis == "gamma") {
        eval_gammas = parse_numbers(a.values, "--values");
    } else if (base.has("eval_gammas")) {
        eval_gammas = base.numbers("eval_gammas");
    }
    if (!eval_gammas.empty() && task != TaskKind::PhaseRecognition) {
        throw ValidationError("gamma grids for crossing estimates need the phase task");
    }

    *sink << "axis,value,reps,metric,mean,stderr,count\n";
    std::map<size_t, double> loss_by_M;
    std::vector<double> loss_by_N;
    std::vector<std::string> cells = a.axis == "gamma" ? std::vector<std::string>{"all"} : values;
    std::vector<CellStats> gamma_preds(eval_gammas.size());
    for (const auto &v : cells) {
        RunConfig cfg = base;
        if (a.axis != "gamma") cfg.set(a.axis, v);
        size_t L = cfg.count("L");
        size_t M = cfg.count("M");
        size_t M_test = cfg.count_or("M_test", M / 2);
        size_t eval_M = cfg.count_or("eval_M", M_test);
        CellStats loss, gstar;
        for (size_t r = 0; r < a.reps; r++) {
            uint64_t rep_seed = hash64(a.seed, r);
            cfg.set("seed", std::to_string(rep_seed));
            quan::TrainConfig tc = cfg.train_config(L);
            auto train_data = generate_classes(task, L, gammas, labels, M, noise, hash64(rep_seed, 1));
            auto test_data = generate_classes(task, L, gammas, labels, M_test, noise, hash64(rep_seed, 2));
            quan::TrainResult res;
            try {
                res = quan::train(train_data, test_data, tc);
            } catch (const std::invalid_argument &e) {
                throw ValidationError(e.what());
            }
            loss.values.push_back(res.best_test_loss);
            if (!eval_gammas.empty()) {
                std::vector<uint8_t> none(eval_gammas.size(), 0);
                auto eval_data =
                    generate_classes(task, L, eval_gammas, none, eval_M, noise, hash64(rep_seed, 3));
                for (auto &d : eval_data) d.label.reset();
                auto m = quan::eval_metrics(res.best, eval_data, hash64(rep_seed, 4));
                if (m.gamma_star) gstar.values.push_back(*m.gamma_star);
                for (size_t i = 0; i < m.per_gamma.size() && i < gamma_preds.size(); i++) {
                    gamma_preds[i].values.push_back(m.per_gamma[i].mean_prediction);
                }
            }
        }
        write_cell(*sink, a.axis, v, a.reps, "test_loss", loss);
        if (!eval_gammas.empty()) {
            write_cell(*sink, a.axis, v, a.reps, "gamma_star", gstar);
        }
        double mean_loss = mean_error(loss.values).mean;
        if (a.axis == "M") loss_by_M[M] = mean_loss;
        if (a.axis == "N") loss_by_N.push_back(mean_loss);
    }
    if (a.axis == "gamma") {
        std::vector<double> sorted = eval_gammas;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); i++) {
            write_cell(*sink, "gamma", shortest(sorted[i]), a.reps, "mean_prediction", gamma_preds[i]);
        }
    }
    if (a.axis == "M") write_mstar(*sink, loss_by_M, eps);
    if (a.axis == "N") {
        bool monotone = std::is_sorted(loss_by_N.rbegin(), loss_by_N.rend());
        *sink << "N,NA,NA,loss_nonincreasing_in_N," << (monotone ? 1 : 0) << ",NA,1\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sq-sweep, corr

int cmd_sq_sweep(const std::string &Ls_s, const std::string &gammas_s, size_t M, uint64_t seed,
                 const std::string &noise_s, const std::string &out_path, std::ostream &out) {
    std::vector<size_t> Ls;
    for (const auto &s : split_list(Ls_s, "--L")) Ls.push_back(parse_count(s, "--L"));
    auto gammas = parse_numbers(gammas_s, "--gamma");
    SweepTable table;
    try {
        table = sq_sweep(Ls, gammas, M, noise_from(noise_s), seed);
    } catch (const std::invalid_argument &e) {
        throw ValidationError(e.what());
    }
    CsvSink sink(out_path, out);
    *sink << "L,gamma,mean_sq,stderr,M\n";
    for (const auto &row : table) {
        *sink << row.L << ',' << row.gamma << ',' << row.mean_sq << ',' << row.error << ',' << row.M << '\n';
    }
    for (size_t i = 0; i + 1 < Ls.size(); i++) {
        out << "crossing," << Ls[i] << ',' << Ls[i + 1] << ',';
        try {
            out << std::setprecision(17) << crossing_estimate(table, Ls[i], Ls[i + 1]) << '\n';
        } catch (const NoCrossing &) {
            out << "NA\n";
        }
    }
    return kExitOk;
}

int cmd_corr(const std::vector<std::string> &inputs, size_t dt, const std::string &out_path, std::ostream &out) {
    CsvSink sink(out_path, out);
    *sink << "gamma,dt,C,stderr,M\n";
    for (const auto &s : inputs) {
        for (const auto &path : split_list(s, "--in")) {
            TrajectoryFile f = read_trajectories(path);
            MeanError c;
            try {
                c = spatiotemporal_corr(f.records, dt);
            } catch (const std::invalid_argument &e) {
                throw ValidationError(e.what());
            }
            *sink << f.meta.gamma << ',' << dt << ',' << c.mean << ',' << c.error << ',' << f.records.size()
                  << '\n';
        }
    }
    return kExitOk;
}

}  // namespace

uint64_t class_seed(uint64_t seed, double gamma, InitialState initial) {
    return hash64(hash64(seed, std::bit_cast<uint64_t>(gamma)), static_cast<uint64_t>(initial));
}

std::vector<quan::GammaData> generate_classes(TaskKind task, size_t L, const std::vector<double> &gammas,
                                              const std::vector<uint8_t> &labels, size_t M,
                                              const NoiseModel &noise, uint64_t seed) {
    std::vector<quan::GammaData> out;
    for (size_t i = 0; i < gammas.size(); i++) {
        std::vector<InitialState> inits = {InitialState::Psi0};
        if (task == TaskKind::StateDistinguish) inits.push_back(InitialState::Phi0);
        for (InitialState init : inits) {
            CircuitConfig cfg;
            cfg.L = L;
            cfg.gamma = gammas[i];
            cfg.task = task;
            cfg.initial = init;
            cfg.noise = noise;
            cfg.master_seed = class_seed(seed, gammas[i], init);
            cfg.validate();
            quan::GammaData d;
            d.gamma = gammas[i];
            d.label = task == TaskKind::StateDistinguish ? static_cast<uint8_t>(init) : labels.at(i);
            d.records = TrajectorySampler(cfg).sample_many(0, M);
            out.push_back(std::move(d));
        }
    }
    return out;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Monitored-circuit simulation, Born statistics, decoding and set-attention training"};
    app.name(args.empty() ? "mipt" : args[0]);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "Sample measurement trajectories to binary files");
    simulate->add_option("--task", sim.task, "distinguish | phase | refqubit")->required();
    simulate->add_option("--L", sim.L, "System size (even, 4..24)")->required();
    simulate->add_option("--gamma", sim.gamma, "Measurement strength or comma list")->required();
    simulate->add_option("--shots", sim.shots, "Trajectories per file")->required();
    simulate->add_option("--seed", sim.seed, "Master seed")->required();
    auto *initial_opt = simulate->add_option("--initial", sim.initial, "psi | phi | both (distinguish only)");
    sim.initial = "psi";
    simulate->add_option("--noise", sim.noise, "Depolarizing rates p1q,p2q");
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_flag("--dual", sim.dual, "Also write per-trajectory likelihoods under both states");

    std::string pd_in, pd_out;
    size_t pd_time = 0;
    bool pd_translate = false;
    auto *probdist = app.add_subcommand("probdist", "Empirical Born-probability histogram of one time slice");
    probdist->add_option("--in", pd_in, "Trajectory file")->required();
    probdist->add_option("--time", pd_time, "Time step t in [1, 2L]")->required();
    probdist->add_flag("--translate", pd_translate, "Pool all cyclic translations");
    probdist->add_option("--out", pd_out, "Output CSV (default stdout)");

    DecodeArgs dec;
    auto *decode = app.add_subcommand("decode", "Optimal Bayesian decoding estimates");
    decode->add_option("--mode", dec.mode, "exact | mc | trajectory")->required();
    decode->add_option("--probs-psi", dec.probs_psi, "Outcome distribution under psi (exact)");
    decode->add_option("--probs-phi", dec.probs_phi, "Outcome distribution under phi (exact)");
    decode->add_option("--N", dec.N, "Set size or comma list");
    decode->add_option("--D", dec.D, "Hilbert-space dimension (mc)");
    decode->add_option("--samples", dec.samples, "Monte Carlo samples (mc)");
    decode->add_option("--model", dec.model, "gamma1 | identical (mc)");
    decode->add_flag("--alpha", dec.alpha, "Also estimate the single-shot accuracy (mc)");
    decode->add_option("--in-psi", dec.in_psi, "Dual trajectory file sampled from psi");
    decode->add_option("--in-phi", dec.in_phi, "Dual trajectory file sampled from phi");
    decode->add_option("--seed", dec.seed, "Seed (mc, trajectory)");
    decode->add_option("--out", dec.out, "Output CSV (default stdout)");

    std::string train_config;
    uint64_t train_seed = 0;
    auto *train = app.add_subcommand("train", "Train the set-attention classifier from a config file");
    train->add_option("--config", train_config, "key = value config")->required();
    auto *train_seed_opt = train->add_option("--seed", train_seed, "Overrides the config seed");

    std::string ev_model, ev_labels, ev_out;
    std::vector<std::string> ev_in;
    uint64_t ev_seed = 0;
    auto *eval = app.add_subcommand("eval", "Mean predictions per gamma, crossing point and sharpness");
    eval->add_option("--model", ev_model, "Checkpoint")->required();
    eval->add_option("--in", ev_in, "Trajectory files (repeat or comma list)")->required();
    eval->add_option("--labels", ev_labels, "Labels aligned with --in, enables P_corr");
    eval->add_option("--seed", ev_seed, "Seed for set formation")->required();
    eval->add_option("--out", ev_out, "Output CSV (default stdout)");

    SweepArgs sw;
    auto *sweep = app.add_subcommand("sweep", "Repeated trainings across M, N, L or gamma");
    sweep->add_option("--axis", sw.axis, "M | N | L | gamma");
    sweep->add_option("--values", sw.values, "Comma list of axis values");
    sweep->add_option("--config", sw.config, "Base config");
    sweep->add_option("--reps", sw.reps, "Repetitions per cell");
    auto *sweep_seed_opt = sweep->add_option("--seed", sw.seed, "Master seed");
    sweep->add_option("--epsilon", sw.epsilon, "Loss thresholds for M*");
    sweep->add_option("--from-losses", sw.from_losses, "CSV M,loss; skips training");
    sweep->add_option("--out", sw.out, "Output CSV (default stdout)");

    std::string sq_L, sq_gamma, sq_noise, sq_out;
    size_t sq_M = 0;
    uint64_t sq_seed = 0;
    auto *sqsweep = app.add_subcommand("sq-sweep", "Reference-qubit entropy across L and gamma");
    sqsweep->add_option("--L", sq_L, "Comma list of sizes")->required();
    sqsweep->add_option("--gamma", sq_gamma, "Comma list of strengths")->required();
    sqsweep->add_option("--M", sq_M, "Trajectories per cell (>= 100)")->required();
    sqsweep->add_option("--seed", sq_seed, "Master seed")->required();
    sqsweep->add_option("--noise", sq_noise, "Depolarizing rates p1q,p2q");
    sqsweep->add_option("--out", sq_out, "Output CSV (default stdout)");

    std::vector<std::string> co_in;
    size_t co_dt = 0;
    std::string co_out;
    auto *corr = app.add_subcommand("corr", "Equal-site temporal correlator");
    corr->add_option("--in", co_in, "Trajectory files")->required();
    corr->add_option("--dt", co_dt, "Time separation")->required();
    corr->add_option("--out", co_out, "Output CSV (default stdout)");

    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim, initial_opt->count() > 0, out);
        if (probdist->parsed()) return cmd_probdist(pd_in, pd_time, pd_translate, pd_out, out);
        if (decode->parsed()) return cmd_decode(dec, *decode, out);
        if (train->parsed()) {
            std::optional<uint64_t> seed;
            if (train_seed_opt->count() > 0) seed = train_seed;
            return cmd_train(train_config, seed, out);
        }
        if (eval->parsed()) return cmd_eval(ev_model, ev_in, ev_labels, ev_seed, ev_out, out);
        if (sweep->parsed()) {
            if (sw.from_losses.empty() && sweep_seed_opt->count() == 0) {
                throw ValidationError("--seed is required for training sweeps");
            }
            return cmd_sweep(sw, out);
        }
        if (sqsweep->parsed()) return cmd_sq_sweep(sq_L, sq_gamma, sq_M, sq_seed, sq_noise, sq_out, out);
        if (corr->parsed()) return cmd_corr(co_in, co_dt, co_out, out);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace mipt::cli
