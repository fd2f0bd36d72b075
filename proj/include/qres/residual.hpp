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

#include <optional>
#include <string>
#include <vector>

#include "qres/ansatz.hpp"
#include "qres/statevector.hpp"

namespace qres {

/// One ancilla-controlled residual block: trainable strength beta, the
/// variational layer W(w_params) on the data register, and a dedicated
/// ancilla qubit. The circuit only ever sees |beta|; the sign lives in the
/// parameter store.
struct ResidualBlock {
    double beta = 0.5;
    LayerParams w_params;
    int ancilla = -1;
};

enum class TaskKind { Binary, Multiclass };

/// Full model: optional backbone, L residual blocks (one fresh ancilla
/// each), measurement of Z on one data qubit (binary) or all of them
/// (multi-class).
struct ResidualModel {
    int n_data = 1;
    std::vector<ResidualBlock> blocks;
    QvcBackbone backbone;
    TaskKind task = TaskKind::Binary;
    int n_classes = 2;

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int total_qubits() const { return n_data + num_blocks(); }
    int num_logits() const {
        return task == TaskKind::Binary ? 1 : n_data;
    }
    /// prod_l (1 + beta_l^2), the deterministic rescaling of the raw
    /// expectation values.
    double scale_factor() const;

    /// Seeded model with uniform [-pi, pi] angles, beta = beta_init in all
    /// blocks, ancillas n_data..n_data+L-1.
    static ResidualModel random(int n_data, int n_blocks, int backbone_depth,
                                std::uint64_t seed, TaskKind task,
                                double beta_init = 0.5, int n_classes = 2);

    void validate() const;
};

/// Ancilla preparation angle 2*arctan(|beta|) in [0, pi).
double ancilla_angle(double beta);

/// Tape entry for the assembled model circuit: a gate plus (optionally) the
/// ancilla subspace control and the binding to a trainable angle slot.
/// `slot_scale` is d(gate angle)/d(slot value), -1 for the ancilla
/// uncompute rotation.
struct CircuitOp {
    GateKind kind;
    int target;
    int control = -1;     // CNOT control
    int anc_control = -1; // residual-block ancilla, -1 outside blocks
    double angle = 0.0;
    int slot = -1;
    double slot_scale = 1.0;
};

/// The assembled circuit plus its angle-slot layout:
///   [0, 3*n*D)                backbone angles, layer-major
///   [3*n*D, 3*n*D + 3*n*L)    block W angles, block-major
///   [.., .. + L)              ancilla preparation angles theta_l
struct Circuit {
    int n_total = 0;
    int n_data = 0;
    std::vector<CircuitOp> ops;
    int backbone_slots = 0;
    int w_slots = 0;
    int theta_slots = 0;

    int num_slots() const { return backbone_slots + w_slots + theta_slots; }
    int theta_slot(int block) const { return backbone_slots + w_slots + block; }
    bool slot_is_controlled(int slot) const {
        return slot >= backbone_slots && slot < backbone_slots + w_slots;
    }
};

Circuit build_circuit(const ResidualModel &model);

/// Embeds a data-register state into the full register with all ancillas
/// in |0>.
StateVector embed_with_ancillas(const StateVector &x_encoded, int n_blocks);

/// Prepare/control/uncompute sequence of one block, in place. The data
/// register is qubits [0, n_data); block.ancilla must lie outside it.
void apply_residual_block(StateVector &state, const ResidualBlock &block,
                          int n_data);

/// Deterministic surrogate logits: prod(1+beta^2) * <Z_i> with ancillas
/// traced out. One logit (i = 0) for binary, n_data logits for multi-class.
std::vector<double> forward(const ResidualModel &model,
                            const StateVector &x_encoded);

/// Raw expectations <Z_i> of the evolved state (no rescaling); i ranges over
/// the logit qubits.
std::vector<double> forward_expectations(const ResidualModel &model,
                                         const StateVector &x_encoded);

/// (I + |beta|^2 W) / (1 + |beta|^2). Rejects non-unitary W.
Eigen::MatrixXcd effective_map(double beta, const Eigen::MatrixXcd &w_dense);

/// Probability of the ancilla-0 outcome for one block on a normalized input.
double success_probability(const Eigen::VectorXcd &psi_in, double beta,
                           const Eigen::MatrixXcd &w_dense);

struct MapPathResult {
    Eigen::VectorXcd state; // M_L ... M_1 |psi>, unnormalized
    std::vector<double> block_probs;
    double total_prob = 1.0;
};

/// Dense effective-map chain M_L...M_1 applied to the encoded state, with
/// the per-block success probabilities evaluated on the normalized state
/// entering each block. Backbone layers (if any) run before the chain.
MapPathResult map_path_forward(const ResidualModel &model,
                               const Eigen::VectorXcd &x_encoded);

/// Diagnostic comparing the unpostselected circuit value with the
/// effective-map prediction. f_map is prod(1+beta^2) times the Z_0
/// expectation of the (unnormalized) M-chain state, which equals the
/// all-ancillas-0 contribution to f_circuit; the gap between the two values
/// is exactly the rescaled Z_0 weight of the discarded ancilla branches,
/// reported as branch_z_contribution. branch_magnitudes holds the norm of
/// the ancilla-1 component c_l s_l (W_l - I)|psi_l> created by each block.
struct SemanticsReport {
    double f_circuit = 0.0;
    double f_map = 0.0;
    std::vector<double> branch_magnitudes;
    double branch_z_contribution = 0.0;
    double leakage_norm2 = 0.0; // total weight outside the all-zero branch
};

SemanticsReport compare_semantics(const ResidualModel &model,
                                  const StateVector &x_encoded);

/// One Bloch-sphere sample of the single-qubit demo.
struct BlochRow {
    double in_x, in_y, in_z;
    double out_x, out_y, out_z;
};

/// Pushes one pure qubit state through an unpostselected block (both
/// ancilla branches kept) and returns the input direction together with the
/// normalized Bloch direction of the reduced data-qubit state.
BlochRow bloch_push(const Eigen::Vector2cd &psi, const Eigen::Matrix2cd &w_dense,
                    double preparation_angle);

/// bloch_push over `grid_size` approximately even pure states (Fibonacci
/// sphere grid).
std::vector<BlochRow> bloch_demo(int grid_size, const Eigen::Matrix2cd &w_dense,
                                 double preparation_angle);

void write_bloch_csv(const std::string &path,
                     const std::vector<BlochRow> &rows);

} // namespace qres
