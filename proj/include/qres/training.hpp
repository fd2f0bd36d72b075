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
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qres/dataset.hpp"
#include "qres/gradients.hpp"
#include "qres/residual.hpp"

namespace qres {

enum class BetaParam { Bounded, Free };

struct TrainingConfig {
    double learning_rate = 5e-3;
    double weight_decay = 1e-4;
    int batch_size = 32;
    int epochs = 30;
    std::uint64_t seed = 0;
    BetaParam beta_param = BetaParam::Bounded;
    double beta_bound = 1.0;
    int workers = 0; // 0: hardware concurrency
};

/// Numerically stable binary cross-entropy on sigmoid(logit).
/// Returns (loss, d loss / d logit).
std::pair<double, double> bce_loss(double logit, int label);

/// Max-subtracted cross-entropy over the logit vector.
/// Returns (loss, d loss / d logit_i = softmax_i - onehot_i).
std::pair<double, std::vector<double>>
cross_entropy_loss(std::span<const double> logits, int label);

std::vector<double> softmax(std::span<const double> logits);

struct AdamConfig {
    double lr = 5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0; // coupled: added to the gradient
};

struct AdamState {
    std::vector<double> m, v;
    long step = 0;

    static AdamState zeros(std::size_t n) {
        return AdamState{std::vector<double>(n, 0.0),
                         std::vector<double>(n, 0.0), 0};
    }
};

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, const AdamConfig &config);

/// Mapping between a model and its flat trainable vector
/// [backbone | w_angles | beta_raw]. Under the bounded parameterization the
/// stored beta entry is b with beta = bound * tanh(b), keeping |beta| below
/// the bound at every step.
struct ParamPacking {
    int n_data = 0;
    int depth = 0;
    int n_blocks = 0;
    BetaParam beta_param = BetaParam::Bounded;
    double beta_bound = 1.0;

    static ParamPacking of(const ResidualModel &model, BetaParam bp,
                           double bound);
    std::size_t size() const;
    std::vector<double> pack(const ResidualModel &model) const;
    void unpack(std::span<const double> flat, ResidualModel &model) const;
    /// Flattens a model-space GradientVector, chaining d beta/d raw.
    std::vector<double> flatten_grad(const GradientVector &g,
                                     std::span<const double> flat) const;
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
};

struct EvalResult {
    double accuracy = 0.0;
    double mean_loss = 0.0;
};

struct TrainResult {
    ResidualModel model;
    std::vector<EpochMetrics> history;
    std::vector<double> flat_params;
    AdamState opt;
    int epoch = 0;
};

/// Per-sample loss and its logit gradient for the model's task.
std::pair<double, std::vector<double>>
task_loss(const ResidualModel &model, std::span<const double> logits,
          int label);

EvalResult evaluate(const ResidualModel &model, const Dataset &dataset,
                    const PreprocessSpec &prep, int workers = 0);

/// Epoch loop: seeded shuffle, mini-batches, mean batch gradient, Adam.
/// Per-sample gradients run in parallel; the reduction is an ordered sum,
/// so results do not depend on the worker count.
TrainResult train(ResidualModel model, const Dataset &train_set,
                  const Dataset &test_set, const PreprocessSpec &prep,
                  const TrainingConfig &config);

/// Callback variant used by the step-level diagnostics; called after every
/// optimizer step with the step index and the updated model.
TrainResult
train_with_callback(ResidualModel model, const Dataset &train_set,
                    const Dataset &test_set, const PreprocessSpec &prep,
                    const TrainingConfig &config,
                    const std::function<void(int, const ResidualModel &)> &cb);

struct Checkpoint {
    ResidualModel model;
    BetaParam beta_param = BetaParam::Bounded;
    double beta_bound = 1.0;
    std::vector<double> flat_params;
    AdamState opt;
    int epoch = 0;
    std::vector<EpochMetrics> history;
};

/// Text serialization with hexfloat values; round-trips bit-exactly.
void save_checkpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::string &path);

void write_metrics_csv(const std::string &path,
                       std::span<const EpochMetrics> history);

} // namespace qres
