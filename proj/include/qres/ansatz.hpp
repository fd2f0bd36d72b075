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

#include <cstdint>
#include <vector>

#include "qres/statevector.hpp"

namespace qres {

/// ZYZ angles for one variational layer: per data qubit j the triple
/// (theta_j, phi_j, omega_j), stored as angles[3j + 0..2].
struct LayerParams {
    std::vector<double> angles;

    static LayerParams zeros(int n_data);
    static LayerParams random_uniform(int n_data, std::uint64_t seed);
};

/// Shape of a variational layer. Entanglement is a cyclic CNOT ring, qubit j
/// controlling (j+1) mod n_data; it degenerates to a single CNOT for
/// n_data = 2 and no entangler for n_data = 1.
struct AnsatzSpec {
    int n_data;
};

/// Stacked variational layers applied before the residual blocks
/// (multi-class backbone). depth == 0 means no backbone.
struct QvcBackbone {
    int depth = 0;
    std::vector<LayerParams> layers;

    static QvcBackbone random_uniform(int n_data, int depth,
                                      std::uint64_t seed);
};

struct GateCountReport {
    std::int64_t rotations = 0;
    std::int64_t cnots = 0;
    std::int64_t total() const { return rotations + cnots; }
};

/// Number of ring entangler CNOTs for a layer on n_data qubits.
int ring_cnot_count(int n_data);

/// One layer: RZ(theta_j) RY(phi_j) RZ(omega_j) on every qubit (0..n-1),
/// then the CNOT ring.
std::vector<GateOp> build_w_layer(const AnsatzSpec &spec,
                                  const LayerParams &params);

/// Concatenation of `depth` independent layers.
std::vector<GateOp> build_qvc(const QvcBackbone &backbone,
                              const AnsatzSpec &spec);

/// Data-register gate counts for a model with `n_blocks` residual blocks and
/// a backbone of `backbone_depth` layers. Residual-block layers are counted
/// uncontrolled; ancilla preparation/uncompute rotations are excluded.
GateCountReport count_gates(int n_data, int n_blocks, int backbone_depth);

} // namespace qres
