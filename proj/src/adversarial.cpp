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
#include "qres/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "qres/gradients.hpp"
#include "qres/parallel.hpp"

namespace qres {

SurrogateMlp SurrogateMlp::init(int in_dim, int hidden, int n_out,
                                std::uint64_t seed) {
    require(in_dim >= 1 && hidden >= 1 && n_out >= 1,
            "degenerate surrogate shape");
    SurrogateMlp mlp;
    mlp.in_dim = in_dim;
    mlp.hidden = hidden;
    mlp.n_out = n_out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s1 = std::sqrt(2.0 / in_dim);
    const double s2 = std::sqrt(1.0 / hidden);
    mlp.w1.resize(std::size_t(hidden) * in_dim);
    mlp.b1.assign(hidden, 0.0);
    mlp.w2.resize(std::size_t(n_out) * hidden);
    mlp.b2.assign(n_out, 0.0);
    for (auto &w : mlp.w1) {
        w = s1 * gauss(rng);
    }
    for (auto &w : mlp.w2) {
        w = s2 * gauss(rng);
    }
    return mlp;
}

std::vector<double> SurrogateMlp::logits(std::span<const double> x) const {
    require(x.size() == static_cast<std::size_t>(in_dim),
            "surrogate input size mismatch");
    std::vector<double> h(hidden);
    for (int i = 0; i < hidden; ++i) {
        double z = b1[i];
        const double *row = &w1[std::size_t(i) * in_dim];
        for (int j = 0; j < in_dim; ++j) {
            z += row[j] * x[j];
        }
        h[i] = std::max(z, 0.0);
    }
    std::vector<double> out(n_out);
    for (int i = 0; i < n_out; ++i) {
        double z = b2[i];
        const double *row = &w2[std::size_t(i) * hidden];
        for (int j = 0; j < hidden; ++j) {
            z += row[j] * h[j];
        }
        out[i] = z;
    }
    return out;
}

int SurrogateMlp::predict(std::span<const double> x) const {
    const auto z = logits(x);
    if (n_out == 1) {
        return z[0] > 0.0 ? 1 : 0;
    }
    return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

namespace {

struct MlpGrads {
    std::vector<double> w1, b1, w2, b2;
};

// Per-sample loss/backprop; fills dx when requested and accumulates into
// `acc` when given.
double mlp_backward(const SurrogateMlp &mlp, std::span<const double> x,
                    int label, MlpGrads *acc, std::vector<double> *dx) {
    std::vector<double> z1(mlp.hidden), h(mlp.hidden);
    for (int i = 0; i < mlp.hidden; ++i) {
        double z = mlp.b1[i];
        const double *row = &mlp.w1[std::size_t(i) * mlp.in_dim];
        for (int j = 0; j < mlp.in_dim; ++j) {
            z += row[j] * x[j];
        }
        z1[i] = z;
        h[i] = std::max(z, 0.0);
    }
    std::vector<double> out(mlp.n_out);
    for (int i = 0; i < mlp.n_out; ++i) {
        double z = mlp.b2[i];
        const double *row = &mlp.w2[std::size_t(i) * mlp.hidden];
        for (int j = 0; j < mlp.hidden; ++j) {
            z += row[j] * h[j];
        }
        out[i] = z;
    }

    double loss;
    std::vector<double> dz2;
    if (mlp.n_out == 1) {
        auto [l, d] = bce_loss(out[0], label);
        loss = l;
        dz2 = {d};
    } else {
        auto [l, d] = cross_entropy_loss(out, label);
        loss = l;
        dz2 = std::move(d);
    }

    std::vector<double> dh(mlp.hidden, 0.0);
    for (int i = 0; i < mlp.n_out; ++i) {
        const double *row = &mlp.w2[std::size_t(i) * mlp.hidden];
        for (int j = 0; j < mlp.hidden; ++j) {
            dh[j] += row[j] * dz2[i];
        }
        if (acc) {
            double *grow = &acc->w2[std::size_t(i) * mlp.hidden];
            for (int j = 0; j < mlp.hidden; ++j) {
                grow[j] += dz2[i] * h[j];
            }
            acc->b2[i] += dz2[i];
        }
    }
    std::vector<double> dz1(mlp.hidden);
    for (int i = 0; i < mlp.hidden; ++i) {
        dz1[i] = z1[i] > 0.0 ? dh[i] : 0.0;
    }
    if (acc) {
        for (int i = 0; i < mlp.hidden; ++i) {
            if (dz1[i] == 0.0) {
                continue;
            }
            double *grow = &acc->w1[std::size_t(i) * mlp.in_dim];
            for (int j = 0; j < mlp.in_dim; ++j) {
                grow[j] += dz1[i] * x[j];
            }
            acc->b1[i] += dz1[i];
        }
    }
    if (dx) {
        dx->assign(mlp.in_dim, 0.0);
        for (int i = 0; i < mlp.hidden; ++i) {
            if (dz1[i] == 0.0) {
                continue;
            }
            const double *row = &mlp.w1[std::size_t(i) * mlp.in_dim];
            for (int j = 0; j < mlp.in_dim; ++j) {
                (*dx)[j] += row[j] * dz1[i];
            }
        }
    }
    return loss;
}

} // namespace

std::vector<double> SurrogateMlp::input_gradient(std::span<const double> x,
                                                 int label) const {
    std::vector<double> dx;
    mlp_backward(*this, x, label, nullptr, &dx);
    return dx;
}

SurrogateMlp train_surrogate(const Dataset &dataset, int n_classes, int epochs,
                             std::uint64_t seed, int hidden) {
    require(dataset.size() > 0, "cannot train a surrogate on no data");
    require(n_classes >= 2, "need at least two classes");
    const int n_out = n_classes == 2 ? 1 : n_classes;
    SurrogateMlp mlp = SurrogateMlp::init(static_cast<int>(dataset.feature_dim),
                                          hidden, n_out, derive_seed(seed, 1));

    const std::size_t n_params =
        mlp.w1.size() + mlp.b1.size() + mlp.w2.size() + mlp.b2.size();
    AdamState opt = AdamState::zeros(n_params);
    const AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 0.0};
    const int batch = 32;

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    auto flatten = [&](std::vector<double> &flat, const SurrogateMlp &m) {
        flat.clear();
        flat.insert(flat.end(), m.w1.begin(), m.w1.end());
        flat.insert(flat.end(), m.b1.begin(), m.b1.end());
        flat.insert(flat.end(), m.w2.begin(), m.w2.end());
        flat.insert(flat.end(), m.b2.begin(), m.b2.end());
    };
    auto unflatten = [&](const std::vector<double> &flat, SurrogateMlp &m) {
        std::size_t k = 0;
        for (auto *vec : {&m.w1, &m.b1, &m.w2, &m.b2}) {
            for (auto &v : *vec) {
                v = flat[k++];
            }
        }
    };

    std::vector<double> flat;
    flatten(flat, mlp);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(seed, 100 + epoch));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end =
                std::min(order.size(), start + std::size_t(batch));
            MlpGrads acc{std::vector<double>(mlp.w1.size(), 0.0),
                         std::vector<double>(mlp.b1.size(), 0.0),
                         std::vector<double>(mlp.w2.size(), 0.0),
                         std::vector<double>(mlp.b2.size(), 0.0)};
            for (std::size_t k = start; k < end; ++k) {
                mlp_backward(mlp, dataset.sample(order[k]),
                             dataset.labels[order[k]], &acc, nullptr);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            std::vector<double> grad;
            grad.reserve(n_params);
            for (const auto *vec : {&acc.w1, &acc.b1, &acc.w2, &acc.b2}) {
                for (double v : *vec) {
                    grad.push_back(v * inv);
                }
            }
            adam_step(flat, grad, opt, adam);
            unflatten(flat, mlp);
        }
    }

    if (epochs > 0) {
        const double acc = surrogate_accuracy(mlp, dataset);
        if (acc < 0.70) {
            throw std::runtime_error(
                "surrogate failed to converge (train accuracy " +
                std::to_string(acc) + " < 0.70)");
        }
    }
    return mlp;
}

double surrogate_accuracy(const SurrogateMlp &mlp, const Dataset &dataset) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (mlp.predict(dataset.sample(i)) == dataset.labels[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

std::vector<double> fgsm(std::span<const double> x,
                         std::span<const double> grad, double epsilon,
                         double clip_lo, double clip_hi) {
    require(x.size() == grad.size(), "gradient shape must match the input");
    require(epsilon >= 0.0, "epsilon must be non-negative");
    std::vector<double> adv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sign = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
        adv[i] = std::clamp(x[i] + epsilon * sign, clip_lo, clip_hi);
    }
    return adv;
}

AttackReport
run_attack(const ResidualModel &model, const Dataset &dataset,
           const PreprocessSpec &prep, const AttackConfig &config,
           const std::string &mode,
           const std::function<std::vector<double>(std::span<const double>,
                                                   int)> &grad_fn) {
    require(dataset.size() > 0, "cannot attack an empty dataset");
    require(!config.epsilons.empty(), "need at least one epsilon");
    const std::size_t n_eps = config.epsilons.size();
    std::vector<std::vector<int>> correct(n_eps,
                                          std::vector<int>(dataset.size(), 0));

    parallel_for(dataset.size(), config.workers, [&](std::size_t i) {
        const auto x = dataset.sample(i);
        const int label = dataset.labels[i];
        const std::vector<double> gx = grad_fn(x, label);
        for (std::size_t e = 0; e < n_eps; ++e) {
            const auto adv =
                fgsm(x, gx, config.epsilons[e], config.clip_lo, config.clip_hi);
            const StateVector enc = amplitude_encode(adv, prep);
            const auto logits = forward(model, enc);
            int pred;
            if (model.task == TaskKind::Binary) {
                pred = logits[0] > 0.0 ? 1 : 0;
            } else {
                pred = 0;
                for (int c = 1; c < model.n_classes; ++c) {
                    if (logits[c] > logits[pred]) {
                        pred = c;
                    }
                }
            }
            correct[e][i] = pred == label ? 1 : 0;
        }
    });

    AttackReport report;
    for (std::size_t e = 0; e < n_eps; ++e) {
        const int n_ok =
            std::accumulate(correct[e].begin(), correct[e].end(), 0);
        report.rows.push_back(AttackReport::Row{
            config.epsilons[e], mode,
            static_cast<double>(n_ok) / static_cast<double>(dataset.size()),
            static_cast<int>(dataset.size())});
    }
    return report;
}

AttackReport whitebox_attack(const ResidualModel &model, const Dataset &dataset,
                             const PreprocessSpec &prep,
                             const AttackConfig &config) {
    return run_attack(
        model, dataset, prep, config, "whitebox",
        [&](std::span<const double> x, int label) {
            const StateVector enc = amplitude_encode(x, prep);
            const auto logits = forward(model, enc);
            const auto [loss, dl] = task_loss(model, logits, label);
            (void)loss;
            return input_gradient(model, x, prep.pad_to, dl);
        });
}

AttackReport blackbox_attack(const ResidualModel &model,
                             const SurrogateMlp &surrogate,
                             const Dataset &dataset, const PreprocessSpec &prep,
                             const AttackConfig &config) {
    return run_attack(model, dataset, prep, config, "blackbox",
                      [&](std::span<const double> x, int label) {
                          return surrogate.input_gradient(x, label);
                      });
}

void write_attack_csv(const std::string &path,
                      std::span<const AttackReport::Row> rows) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "epsilon,mode,accuracy,n_samples\n";
    char buf[128];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%d\n", r.epsilon,
                      r.mode.c_str(), r.accuracy, r.n_samples);
        out << buf;
    }
}

} // namespace qres
