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
#include "qres/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qres {

LayerParams LayerParams::zeros(int n_data) {
    require(n_data >= 1, "layer needs at least one qubit");
    return LayerParams{std::vector<double>(3 * n_data, 0.0)};
}

LayerParams LayerParams::random_uniform(int n_data, std::uint64_t seed) {
    require(n_data >= 1, "layer needs at least one qubit");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-std::numbers::pi,
                                                std::numbers::pi);
    LayerParams p;
    p.angles.resize(3 * static_cast<std::size_t>(n_data));
    for (auto &a : p.angles) {
        a = dist(rng);
    }
    return p;
}

QvcBackbone QvcBackbone::random_uniform(int n_data, int depth,
                                        std::uint64_t seed) {
    require(depth >= 0, "backbone depth must be non-negative");
    QvcBackbone b;
    b.depth = depth;
    b.layers.reserve(depth);
    for (int l = 0; l < depth; ++l) {
        b.layers.push_back(
            LayerParams::random_uniform(n_data, derive_seed(seed, l)));
    }
    return b;
}

int ring_cnot_count(int n_data) {
    if (n_data <= 1) {
        return 0;
    }
    if (n_data == 2) {
        return 1;
    }
    return n_data;
}

std::vector<GateOp> build_w_layer(const AnsatzSpec &spec,
                                  const LayerParams &params) {
    require(spec.n_data >= 1, "layer needs at least one qubit");
    require(params.angles.size() == 3 * static_cast<std::size_t>(spec.n_data),
            "layer parameter count must be 3 * n_data");
    for (double a : params.angles) {
        require(std::isfinite(a), "layer angle must be finite");
    }
    std::vector<GateOp> ops;
    ops.reserve(3 * spec.n_data + ring_cnot_count(spec.n_data));
    for (int j = 0; j < spec.n_data; ++j) {
        ops.push_back(GateOp::rz(j, params.angles[3 * j + 0]));
        ops.push_back(GateOp::ry(j, params.angles[3 * j + 1]));
        ops.push_back(GateOp::rz(j, params.angles[3 * j + 2]));
    }
    const int n_cnots = ring_cnot_count(spec.n_data);
    for (int j = 0; j < n_cnots; ++j) {
        ops.push_back(GateOp::cnot(j, (j + 1) % spec.n_data));
    }
    return ops;
}

std::vector<GateOp> build_qvc(const QvcBackbone &backbone,
                              const AnsatzSpec &spec) {
    require(backbone.layers.size() == static_cast<std::size_t>(backbone.depth),
            "backbone layer count must equal its depth");
    std::vector<GateOp> ops;
    for (const auto &layer : backbone.layers) {
        auto layer_ops = build_w_layer(spec, layer);
        ops.insert(ops.end(), layer_ops.begin(), layer_ops.end());
    }
    return ops;
}

GateCountReport count_gates(int n_data, int n_blocks, int backbone_depth) {
    require(n_data >= 1, "need at least one data qubit");
    require(n_blocks >= 0 && backbone_depth >= 0, "counts must be non-negative");
    const std::int64_t layers = n_blocks + backbone_depth;
    GateCountReport r;
    r.rotations = 3LL * n_data * layers;
    r.cnots = static_cast<std::int64_t>(ring_cnot_count(n_data)) * layers;
    return r;
}

} // namespace qres
