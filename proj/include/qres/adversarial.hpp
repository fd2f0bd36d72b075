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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qres/dataset.hpp"
#include "qres/residual.hpp"
#include "qres/training.hpp"

namespace qres {

struct AttackConfig {
    std::vector<double> epsilons{0.0, 0.05, 0.1, 0.2, 0.3};
    double clip_lo = 0.0;
    double clip_hi = 1.0;
    int workers = 0;
};

/// One-hidden-layer rectifier MLP used as the classical transfer source.
/// Binary tasks use a single logit; multi-class uses one per class.
struct SurrogateMlp {
    int in_dim = 0;
    int hidden = 128;
    int n_out = 1;
    std::vector<double> w1, b1, w2, b2;

    static SurrogateMlp init(int in_dim, int hidden, int n_out,
                             std::uint64_t seed);
    std::vector<double> logits(std::span<const double> x) const;
    int predict(std::span<const double> x) const;
    /// d(task loss)/dx by backpropagation.
    std::vector<double> input_gradient(std::span<const double> x,
                                       int label) const;
};

/// Adam-trained surrogate on raw pixels. Throws if the final training
/// accuracy stays under 0.70 (non-convergence guard).
SurrogateMlp train_surrogate(const Dataset &dataset, int n_classes, int epochs,
                             std::uint64_t seed, int hidden = 128);

double surrogate_accuracy(const SurrogateMlp &mlp, const Dataset &dataset);

/// x + epsilon * sign(grad), clipped to [clip_lo, clip_hi].
std::vector<double> fgsm(std::span<const double> x,
                         std::span<const double> grad, double epsilon,
                         double clip_lo, double clip_hi);

struct AttackReport {
    struct Row {
        double epsilon = 0.0;
        std::string mode;
        double accuracy = 0.0;
        int n_samples = 0;
    };
    std::vector<Row> rows;
};

/// Shared driver: the perturbation direction comes from grad_fn(x, label);
/// accuracy of the quantum model is evaluated per epsilon.
AttackReport
run_attack(const ResidualModel &model, const Dataset &dataset,
           const PreprocessSpec &prep, const AttackConfig &config,
           const std::string &mode,
           const std::function<std::vector<double>(std::span<const double>,
                                                   int)> &grad_fn);

/// FGSM from the quantum model's own input-loss gradients.
AttackReport whitebox_attack(const ResidualModel &model, const Dataset &dataset,
                             const PreprocessSpec &prep,
                             const AttackConfig &config);

/// FGSM directions from the surrogate, evaluated on the quantum model.
AttackReport blackbox_attack(const ResidualModel &model,
                             const SurrogateMlp &surrogate,
                             const Dataset &dataset, const PreprocessSpec &prep,
                             const AttackConfig &config);

void write_attack_csv(const std::string &path,
                      std::span<const AttackReport::Row> rows);

} // namespace qres
