// Copyright 2026 qresnet contributors
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
#include "qres/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "qres/parallel.hpp"

namespace qres {

std::pair<double, double> bce_loss(double logit, int label) {
    require(label == 0 || label == 1, "binary label must be 0 or 1");
    // log(1 + exp(-|z|)) + max(z, 0) - z*y, stable for large |z|.
    const double loss = std::log1p(std::exp(-std::abs(logit))) +
                        std::max(logit, 0.0) - logit * label;
    const double sigma = 1.0 / (1.0 + std::exp(-logit));
    return {loss, sigma - label};
}

std::vector<double> softmax(std::span<const double> logits) {
    require(!logits.empty(), "softmax needs at least one logit");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        z += p[i];
    }
    for (auto &v : p) {
        v /= z;
    }
    return p;
}

std::pair<double, std::vector<double>>
cross_entropy_loss(std::span<const double> logits, int label) {
    require(label >= 0 && label < static_cast<int>(logits.size()),
            "class label out of range");
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) {
        z += std::exp(v - mx);
    }
    const double loss = std::log(z) - (logits[label] - mx);
    std::vector<double> grad(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        grad[i] = std::exp(logits[i] - mx) / z;
    }
    grad[label] -= 1.0;
    return {loss, std::move(grad)};
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, const AdamConfig &config) {
    require(params.size() == grads.size() && params.size() == state.m.size() &&
                params.size() == state.v.size(),
            "Adam shapes do not match");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, state.step);
    const double bc2 = 1.0 - std::pow(config.beta2, state.step);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + config.weight_decay * params[i];
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
}

ParamPacking ParamPacking::of(const ResidualModel &model, BetaParam bp,
                              double bound) {
    require(bound > 0.0, "beta bound must be positive");
    return ParamPacking{model.n_data, model.backbone.depth, model.num_blocks(),
                        bp, bound};
}

std::size_t ParamPacking::size() const {
    return std::size_t(3) * n_data * (depth + n_blocks) + n_blocks;
}

std::vector<double> ParamPacking::pack(const ResidualModel &model) const {
    std::vector<double> flat;
    flat.reserve(size());
    for (const auto &layer : model.backbone.layers) {
        flat.insert(flat.end(), layer.angles.begin(), layer.angles.end());
    }
    for (const auto &block : model.blocks) {
        flat.insert(flat.end(), block.w_params.angles.begin(),
                    block.w_params.angles.end());
    }
    for (const auto &block : model.blocks) {
        if (beta_param == BetaParam::Free) {
            flat.push_back(block.beta);
        } else {
            const double r = std::clamp(block.beta / beta_bound,
                                        -1.0 + 1e-12, 1.0 - 1e-12);
            flat.push_back(std::atanh(r));
        }
    }
    require(flat.size() == size(), "parameter layout mismatch");
    return flat;
}

void ParamPacking::unpack(std::span<const double> flat,
                          ResidualModel &model) const {
    require(flat.size() == size(), "parameter layout mismatch");
    std::size_t k = 0;
    for (auto &layer : model.backbone.layers) {
        for (auto &a : layer.angles) {
            a = flat[k++];
        }
    }
    for (auto &block : model.blocks) {
        for (auto &a : block.w_params.angles) {
            a = flat[k++];
        }
    }
    for (auto &block : model.blocks) {
        const double raw = flat[k++];
        block.beta = beta_param == BetaParam::Free ? raw
                                                   : beta_bound * std::tanh(raw);
    }
}

std::vector<double>
ParamPacking::flatten_grad(const GradientVector &g,
                           std::span<const double> flat) const {
    std::vector<double> out;
    out.reserve(size());
    out.insert(out.end(), g.backbone.begin(), g.backbone.end());
    out.insert(out.end(), g.w_angles.begin(), g.w_angles.end());
    const std::size_t beta_off = size() - n_blocks;
    for (int l = 0; l < n_blocks; ++l) {
        double chain = 1.0;
        if (beta_param == BetaParam::Bounded) {
            const double t = std::tanh(flat[beta_off + l]);
            chain = beta_bound * (1.0 - t * t);
        }
        out.push_back(g.beta[l] * chain);
    }
    require(out.size() == size(), "gradient layout mismatch");
    return out;
}

std::pair<double, std::vector<double>>
task_loss(const ResidualModel &model, std::span<const double> logits,
          int label) {
    if (model.task == TaskKind::Binary) {
        auto [loss, dl] = bce_loss(logits[0], label);
        return {loss, std::vector<double>{dl}};
    }
    std::span<const double> used =
        logits.subspan(0, static_cast<std::size_t>(model.n_classes));
    auto [loss, dl] = cross_entropy_loss(used, label);
    dl.resize(logits.size(), 0.0); // gradient is zero on unused logits
    return {loss, std::move(dl)};
}

namespace {

int predict(const ResidualModel &model, std::span<const double> logits) {
    if (model.task == TaskKind::Binary) {
        // sigmoid(logit) > 0.5  <=>  logit > 0
        return logits[0] > 0.0 ? 1 : 0;
    }
    int best = 0;
    for (int i = 1; i < model.n_classes; ++i) {
        if (logits[i] > logits[best]) {
            best = i;
        }
    }
    return best;
}

} // namespace

EvalResult evaluate(const ResidualModel &model, const Dataset &dataset,
                    const PreprocessSpec &prep, int workers) {
    require(dataset.size() > 0, "cannot evaluate on an empty dataset");
    std::vector<double> losses(dataset.size());
    std::vector<int> correct(dataset.size());
    parallel_for(dataset.size(), workers, [&](std::size_t i) {
        const StateVector enc = amplitude_encode(dataset.sample(i), prep);
        const auto logits = forward(model, enc);
        losses[i] = task_loss(model, logits, dataset.labels[i]).first;
        correct[i] = predict(model, logits) == dataset.labels[i] ? 1 : 0;
    });
    EvalResult r;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        r.mean_loss += losses[i];
        r.accuracy += correct[i];
    }
    r.mean_loss /= static_cast<double>(dataset.size());
    r.accuracy /= static_cast<double>(dataset.size());
    return r;
}

TrainResult
train_with_callback(ResidualModel model, const Dataset &train_set,
                    const Dataset &test_set, const PreprocessSpec &prep,
                    const TrainingConfig &config,
                    const std::function<void(int, const ResidualModel &)> &cb) {
    require(train_set.size() > 0, "cannot train on an empty dataset");
    require(config.batch_size > 0 && config.epochs >= 0 &&
                config.learning_rate >= 0.0,
            "invalid training configuration");
    model.validate();

    const ParamPacking packing =
        ParamPacking::of(model, config.beta_param, config.beta_bound);
    std::vector<double> flat = packing.pack(model);
    packing.unpack(flat, model); // canonicalize beta through the packing
    AdamState opt = AdamState::zeros(flat.size());
    const AdamConfig adam{config.learning_rate, 0.9, 0.999, 1e-8,
                          config.weight_decay};

    TrainResult result;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::vector<double>> sample_grads;
    std::vector<double> sample_losses;
    int step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(derive_seed(config.seed, 77 + epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t epoch_count = 0;
        for (std::size_t start = 0; start < order.size();
             start += config.batch_size) {
            const std::size_t end =
                std::min(order.size(), start + config.batch_size);
            const std::size_t bsz = end - start;
            sample_grads.assign(bsz, {});
            sample_losses.assign(bsz, 0.0);

            parallel_for(bsz, config.workers, [&](std::size_t k) {
                const std::size_t idx = order[start + k];
                const StateVector enc =
                    amplitude_encode(train_set.sample(idx), prep);
                const auto logits = forward(model, enc);
                auto [loss, dl] =
                    task_loss(model, logits, train_set.labels[idx]);
                sample_losses[k] = loss;
                const AdjointResult ar = adjoint_gradient(model, enc, dl);
                sample_grads[k] = packing.flatten_grad(ar.grads, flat);
            });

            std::vector<double> grad(flat.size(), 0.0);
            for (std::size_t k = 0; k < bsz; ++k) {
                epoch_loss += sample_losses[k];
                for (std::size_t j = 0; j < grad.size(); ++j) {
                    grad[j] += sample_grads[k][j];
                }
            }
            epoch_count += bsz;
            const double inv = 1.0 / static_cast<double>(bsz);
            for (auto &gv : grad) {
                gv *= inv;
            }

            adam_step(flat, grad, opt, adam);
            packing.unpack(flat, model);
            ++step;
            if (cb) {
                cb(step, model);
            }
        }

        EpochMetrics m;
        m.epoch = epoch + 1;
        m.train_loss = epoch_loss / static_cast<double>(epoch_count);
        m.test_accuracy = test_set.size() > 0
                              ? evaluate(model, test_set, prep, config.workers)
                                    .accuracy
                              : 0.0;
        result.history.push_back(m);
    }

    result.model = std::move(model);
    result.flat_params = std::move(flat);
    result.opt = std::move(opt);
    result.epoch = config.epochs;
    return result;
}

TrainResult train(ResidualModel model, const Dataset &train_set,
                  const Dataset &test_set, const PreprocessSpec &prep,
                  const TrainingConfig &config) {
    return train_with_callback(std::move(model), train_set, test_set, prep,
                               config, nullptr);
}

namespace {

void write_doubles(std::ofstream &out, const std::string &name,
                   std::span<const double> values) {
    out << "[" << name << "] " << values.size() << "\n";
    char buf[64];
    for (double v : values) {
        std::snprintf(buf, sizeof(buf), "%a\n", v);
        out << buf;
    }
}

std::vector<double> read_doubles(std::ifstream &in, const std::string &name,
                                 const std::string &path) {
    std::string tag;
    std::size_t count = 0;
    in >> tag >> count;
    require(tag == "[" + name + "]", "checkpoint " + path +
                                         ": expected section " + name);
    std::vector<double> v(count);
    std::string tok;
    for (auto &x : v) {
        in >> tok;
        x = std::strtod(tok.c_str(), nullptr);
    }
    require(in.good() || in.eof(), "checkpoint " + path + ": truncated");
    return v;
}

} // namespace

void save_checkpoint(const std::string &path, const Checkpoint &ckpt) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    const auto &m = ckpt.model;
    out << "qresnet-checkpoint v1\n";
    out << "n_data " << m.n_data << "\n";
    out << "n_blocks " << m.num_blocks() << "\n";
    out << "backbone_depth " << m.backbone.depth << "\n";
    out << "task " << (m.task == TaskKind::Binary ? "binary" : "multiclass")
        << "\n";
    out << "n_classes " << m.n_classes << "\n";
    out << "beta_param "
        << (ckpt.beta_param == BetaParam::Bounded ? "bounded" : "free") << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", ckpt.beta_bound);
    out << "beta_bound " << buf << "\n";
    out << "epoch " << ckpt.epoch << "\n";
    out << "adam_step " << ckpt.opt.step << "\n";
    write_doubles(out, "params", ckpt.flat_params);
    write_doubles(out, "adam_m", ckpt.opt.m);
    write_doubles(out, "adam_v", ckpt.opt.v);
    out << "[metrics] " << ckpt.history.size() << "\n";
    for (const auto &h : ckpt.history) {
        std::snprintf(buf, sizeof(buf), "%a", h.train_loss);
        out << h.epoch << " " << buf;
        std::snprintf(buf, sizeof(buf), " %a\n", h.test_accuracy);
        out << buf;
    }
    out << "end\n";
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream in(path);
    require(in.good(), "cannot open checkpoint: " + path);
    std::string word, version;
    in >> word >> version;
    require(word == "qresnet-checkpoint" && version == "v1",
            "unrecognized checkpoint header in " + path);

    Checkpoint ckpt;
    int n_data = 0, n_blocks = 0, depth = 0, n_classes = 0;
    std::string task, beta_param, tok;
    auto expect_key = [&](const std::string &key) {
        in >> word;
        require(word == key, "checkpoint " + path + ": expected key " + key);
    };
    expect_key("n_data");
    in >> n_data;
    expect_key("n_blocks");
    in >> n_blocks;
    expect_key("backbone_depth");
    in >> depth;
    expect_key("task");
    in >> task;
    expect_key("n_classes");
    in >> n_classes;
    expect_key("beta_param");
    in >> beta_param;
    expect_key("beta_bound");
    in >> tok;
    ckpt.beta_bound = std::strtod(tok.c_str(), nullptr);
    expect_key("epoch");
    in >> ckpt.epoch;
    expect_key("adam_step");
    in >> ckpt.opt.step;

    ckpt.beta_param =
        beta_param == "free" ? BetaParam::Free : BetaParam::Bounded;
    ResidualModel model;
    model.n_data = n_data;
    model.task = task == "multiclass" ? TaskKind::Multiclass : TaskKind::Binary;
    model.n_classes = n_classes;
    model.backbone.depth = depth;
    model.backbone.layers.assign(depth, LayerParams::zeros(n_data));
    for (int l = 0; l < n_blocks; ++l) {
        ResidualBlock b;
        b.w_params = LayerParams::zeros(n_data);
        b.ancilla = n_data + l;
        model.blocks.push_back(std::move(b));
    }

    ckpt.flat_params = read_doubles(in, "params", path);
    ckpt.opt.m = read_doubles(in, "adam_m", path);
    ckpt.opt.v = read_doubles(in, "adam_v", path);

    in >> word;
    std::size_t n_metrics = 0;
    in >> n_metrics;
    require(word == "[metrics]", "checkpoint " + path + ": expected metrics");
    for (std::size_t i = 0; i < n_metrics; ++i) {
        EpochMetrics h;
        in >> h.epoch >> tok;
        h.train_loss = std::strtod(tok.c_str(), nullptr);
        in >> tok;
        h.test_accuracy = std::strtod(tok.c_str(), nullptr);
        ckpt.history.push_back(h);
    }
    in >> word;
    require(word == "end", "checkpoint " + path + ": missing end marker");

    const ParamPacking packing =
        ParamPacking::of(model, ckpt.beta_param, ckpt.beta_bound);
    require(ckpt.flat_params.size() == packing.size(),
            "checkpoint " + path + ": parameter count mismatch");
    packing.unpack(ckpt.flat_params, model);
    ckpt.model = std::move(model);
    return ckpt;
}

void write_metrics_csv(const std::string &path,
                       std::span<const EpochMetrics> history) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "epoch,train_loss,test_accuracy\n";
    char buf[96];
    for (const auto &h : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", h.epoch,
                      h.train_loss, h.test_accuracy);
        out << buf;
    }
}

} // namespace qres
