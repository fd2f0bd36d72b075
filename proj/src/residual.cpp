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
#include "qres/residual.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace qres {

double ResidualModel::scale_factor() const {
    double s = 1.0;
    for (const auto &b : blocks) {
        s *= 1.0 + b.beta * b.beta;
    }
    return s;
}

ResidualModel ResidualModel::random(int n_data, int n_blocks,
                                    int backbone_depth, std::uint64_t seed,
                                    TaskKind task, double beta_init,
                                    int n_classes) {
    require(n_data >= 1, "need at least one data qubit");
    require(n_blocks >= 0, "block count must be non-negative");
    ResidualModel m;
    m.n_data = n_data;
    m.task = task;
    m.n_classes = n_classes;
    m.backbone =
        QvcBackbone::random_uniform(n_data, backbone_depth, derive_seed(seed, 0));
    for (int l = 0; l < n_blocks; ++l) {
        ResidualBlock b;
        b.beta = beta_init;
        b.w_params =
            LayerParams::random_uniform(n_data, derive_seed(seed, 1000 + l));
        b.ancilla = n_data + l;
        m.blocks.push_back(std::move(b));
    }
    m.validate();
    return m;
}

void ResidualModel::validate() const {
    require(n_data >= 1, "need at least one data qubit");
    require(total_qubits() <= 24, "register too large for dense simulation");
    std::vector<bool> seen(total_qubits(), false);
    for (const auto &b : blocks) {
        require(std::isfinite(b.beta), "beta must be finite");
        require(b.ancilla >= n_data && b.ancilla < total_qubits(),
                "block ancilla must lie outside the data register");
        require(!seen[b.ancilla], "ancilla indices must be distinct");
        seen[b.ancilla] = true;
        require(b.w_params.angles.size() ==
                    3 * static_cast<std::size_t>(n_data),
                "block layer parameter count must be 3 * n_data");
    }
    if (task == TaskKind::Multiclass) {
        require(n_classes >= 2 && n_classes <= n_data,
                "multi-class needs one measured qubit per class");
    }
}

double ancilla_angle(double beta) {
    require(std::isfinite(beta), "beta must be finite");
    return 2.0 * std::atan(std::abs(beta));
}

Circuit build_circuit(const ResidualModel &model) {
    model.validate();
    Circuit c;
    c.n_data = model.n_data;
    c.n_total = model.total_qubits();
    const int n = model.n_data;
    const int depth = model.backbone.depth;
    const int n_blocks = model.num_blocks();
    c.backbone_slots = 3 * n * depth;
    c.w_slots = 3 * n * n_blocks;
    c.theta_slots = n_blocks;

    auto push_layer = [&](const LayerParams &params, int slot_base,
                          int anc_control) {
        for (int j = 0; j < n; ++j) {
            c.ops.push_back(CircuitOp{GateKind::RZ, j, -1, anc_control,
                                      params.angles[3 * j + 0],
                                      slot_base + 3 * j + 0, 1.0});
            c.ops.push_back(CircuitOp{GateKind::RY, j, -1, anc_control,
                                      params.angles[3 * j + 1],
                                      slot_base + 3 * j + 1, 1.0});
            c.ops.push_back(CircuitOp{GateKind::RZ, j, -1, anc_control,
                                      params.angles[3 * j + 2],
                                      slot_base + 3 * j + 2, 1.0});
        }
        const int n_cnots = ring_cnot_count(n);
        for (int j = 0; j < n_cnots; ++j) {
            c.ops.push_back(CircuitOp{GateKind::CNOT, (j + 1) % n, j,
                                      anc_control, 0.0, -1, 1.0});
        }
    };

    for (int l = 0; l < depth; ++l) {
        push_layer(model.backbone.layers[l], 3 * n * l, -1);
    }
    for (int l = 0; l < n_blocks; ++l) {
        const auto &block = model.blocks[l];
        const double theta = ancilla_angle(block.beta);
        const int theta_slot = c.theta_slot(l);
        c.ops.push_back(CircuitOp{GateKind::RY, block.ancilla, -1, -1, theta,
                                  theta_slot, 1.0});
        push_layer(block.w_params, c.backbone_slots + 3 * n * l,
                   block.ancilla);
        c.ops.push_back(CircuitOp{GateKind::RY, block.ancilla, -1, -1, -theta,
                                  theta_slot, -1.0});
    }
    return c;
}

namespace {

void apply_circuit_op(StateVector &state, const CircuitOp &op) {
    const std::uint64_t mask =
        op.anc_control >= 0 ? (std::uint64_t{1} << op.anc_control) : 0;
    GateOp g{op.kind, op.target, op.control, op.angle};
    state.apply(g, mask);
}

} // namespace

StateVector embed_with_ancillas(const StateVector &x_encoded, int n_blocks) {
    require(n_blocks >= 0, "block count must be non-negative");
    if (n_blocks == 0) {
        return x_encoded;
    }
    StateVector full(x_encoded.num_qubits() + n_blocks);
    auto amps = full.amplitudes();
    amps[0] = 0.0;
    const auto src = x_encoded.amplitudes();
    for (std::size_t i = 0; i < src.size(); ++i) {
        amps[i] = src[i];
    }
    return full;
}

void apply_residual_block(StateVector &state, const ResidualBlock &block,
                          int n_data) {
    require(block.ancilla >= n_data && block.ancilla < state.num_qubits(),
            "ancilla must lie outside the data register");
    const double theta = ancilla_angle(block.beta);
    state.apply(GateOp::ry(block.ancilla, theta));
    const auto w_ops = build_w_layer(AnsatzSpec{n_data}, block.w_params);
    state.apply_controlled(block.ancilla, w_ops);
    state.apply(GateOp::ry(block.ancilla, -theta));
}

static StateVector run_model_circuit(const ResidualModel &model,
                                     const StateVector &x_encoded) {
    require(x_encoded.num_qubits() == model.n_data,
            "encoded state size does not match the data register");
    StateVector state = embed_with_ancillas(x_encoded, model.num_blocks());
    const Circuit c = build_circuit(model);
    for (const auto &op : c.ops) {
        apply_circuit_op(state, op);
    }
    return state;
}

std::vector<double> forward_expectations(const ResidualModel &model,
                                         const StateVector &x_encoded) {
    const StateVector state = run_model_circuit(model, x_encoded);
    std::vector<double> z(model.num_logits());
    for (int i = 0; i < model.num_logits(); ++i) {
        z[i] = state.expectation_z(i);
    }
    return z;
}

std::vector<double> forward(const ResidualModel &model,
                            const StateVector &x_encoded) {
    std::vector<double> logits = forward_expectations(model, x_encoded);
    const double scale = model.scale_factor();
    for (auto &v : logits) {
        v *= scale;
    }
    return logits;
}

Eigen::MatrixXcd effective_map(double beta, const Eigen::MatrixXcd &w_dense) {
    require(w_dense.rows() == w_dense.cols(), "W must be square");
    const auto dev = (w_dense.adjoint() * w_dense -
                      Eigen::MatrixXcd::Identity(w_dense.rows(), w_dense.cols()))
                         .cwiseAbs()
                         .maxCoeff();
    require(dev <= 1e-8, "effective_map requires a unitary W");
    const double b2 = beta * beta;
    return (Eigen::MatrixXcd::Identity(w_dense.rows(), w_dense.cols()) +
            b2 * w_dense) /
           (1.0 + b2);
}

double success_probability(const Eigen::VectorXcd &psi_in, double beta,
                           const Eigen::MatrixXcd &w_dense) {
    require(std::abs(psi_in.norm() - 1.0) <= 1e-8,
            "success_probability requires a normalized state");
    const double b2 = beta * beta;
    const double overlap = (psi_in.adjoint() * (w_dense * psi_in))(0).real();
    return (1.0 + b2 * b2 + 2.0 * b2 * overlap) / ((1.0 + b2) * (1.0 + b2));
}

MapPathResult map_path_forward(const ResidualModel &model,
                               const Eigen::VectorXcd &x_encoded) {
    require(model.n_data <= 12, "dense map path limited to 12 data qubits");
    const auto dim = Eigen::Index{1} << model.n_data;
    require(x_encoded.size() == dim,
            "encoded state size does not match the data register");

    MapPathResult r;
    r.state = x_encoded;
    if (model.backbone.depth > 0) {
        const auto qvc_ops = build_qvc(model.backbone, AnsatzSpec{model.n_data});
        r.state = dense_unitary_of(qvc_ops, model.n_data) * r.state;
    }
    for (const auto &block : model.blocks) {
        const auto w_ops = build_w_layer(AnsatzSpec{model.n_data}, block.w_params);
        const Eigen::MatrixXcd w = dense_unitary_of(w_ops, model.n_data);
        const Eigen::VectorXcd entering = r.state / r.state.norm();
        const double p = success_probability(entering, block.beta, w);
        r.block_probs.push_back(p);
        r.total_prob *= p;
        r.state = effective_map(block.beta, w) * r.state;
    }
    return r;
}

SemanticsReport compare_semantics(const ResidualModel &model,
                                  const StateVector &x_encoded) {
    SemanticsReport rep;
    const double scale = model.scale_factor();
    const int n = model.n_data;
    const std::uint64_t data_mask = (std::uint64_t{1} << n) - 1;

    // Circuit path, recording the ancilla-1 weight created by each block.
    StateVector state = embed_with_ancillas(x_encoded, model.num_blocks());
    if (model.backbone.depth > 0) {
        const auto qvc_ops = build_qvc(model.backbone, AnsatzSpec{n});
        state.apply(qvc_ops);
    }
    for (const auto &block : model.blocks) {
        apply_residual_block(state, block, n);
        double w1 = 0.0;
        const std::uint64_t abit = std::uint64_t{1} << block.ancilla;
        for (std::size_t i = 0; i < state.dim(); ++i) {
            if (i & abit) {
                w1 += std::norm(state.amplitudes()[i]);
            }
        }
        rep.branch_magnitudes.push_back(std::sqrt(w1));
    }

    double z_all = 0.0, z_zero_branch = 0.0, leak = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amplitudes()[i]);
        const double sign = (i & 1) ? -1.0 : 1.0;
        z_all += sign * p;
        if ((i & ~data_mask) == 0) {
            z_zero_branch += sign * p;
        } else {
            leak += p;
        }
    }
    rep.f_circuit = scale * z_all;
    rep.branch_z_contribution = scale * (z_all - z_zero_branch);
    rep.leakage_norm2 = leak;

    // Map path. Its unnormalized <Z_0> equals the all-zero branch term.
    Eigen::VectorXcd x(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = x_encoded.amplitudes()[static_cast<std::size_t>(i)];
    }
    const MapPathResult mp = map_path_forward(model, x);
    double z_map = 0.0;
    for (Eigen::Index i = 0; i < mp.state.size(); ++i) {
        const double sign = (i & 1) ? -1.0 : 1.0;
        z_map += sign * std::norm(mp.state(i));
    }
    rep.f_map = scale * z_map;
    return rep;
}

BlochRow bloch_push(const Eigen::Vector2cd &psi,
                    const Eigen::Matrix2cd &w_dense,
                    double preparation_angle) {
    const auto dev =
        (w_dense.adjoint() * w_dense - Eigen::Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff();
    require(dev <= 1e-8, "bloch demo requires a unitary W");

    const double c = std::cos(preparation_angle / 2);
    const double s = std::sin(preparation_angle / 2);
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd m0 = c * c * id + s * s * w_dense; // ancilla-0
    const Eigen::Matrix2cd m1 = c * s * (w_dense - id);       // ancilla-1

    auto bloch_of = [](const Eigen::Matrix2cd &rho) {
        return std::array<double, 3>{2.0 * rho(0, 1).real(),
                                     -2.0 * rho(0, 1).imag(),
                                     rho(0, 0).real() - rho(1, 1).real()};
    };

    const Eigen::Vector2cd b0 = m0 * psi;
    const Eigen::Vector2cd b1 = m1 * psi;
    const Eigen::Matrix2cd rho = b0 * b0.adjoint() + b1 * b1.adjoint();

    const auto vin = bloch_of(psi * psi.adjoint());
    auto vout = bloch_of(rho);
    const double r =
        std::sqrt(vout[0] * vout[0] + vout[1] * vout[1] + vout[2] * vout[2]);
    if (r > 1e-15) {
        for (auto &v : vout) {
            v /= r;
        }
    }
    return BlochRow{vin[0], vin[1], vin[2], vout[0], vout[1], vout[2]};
}

std::vector<BlochRow> bloch_demo(int grid_size,
                                 const Eigen::Matrix2cd &w_dense,
                                 double preparation_angle) {
    require(grid_size >= 1, "grid size must be positive");
    std::vector<BlochRow> rows;
    rows.reserve(grid_size);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < grid_size; ++k) {
        // Fibonacci sphere: near-even cover for any grid size.
        const double z =
            grid_size == 1 ? 1.0 : 1.0 - 2.0 * (k + 0.5) / grid_size;
        const double polar = std::acos(std::clamp(z, -1.0, 1.0));
        const double azim = golden * k;
        Eigen::Vector2cd psi;
        psi << std::cos(polar / 2), std::polar(std::sin(polar / 2), azim);
        rows.push_back(bloch_push(psi, w_dense, preparation_angle));
    }
    return rows;
}

void write_bloch_csv(const std::string &path,
                     const std::vector<BlochRow> &rows) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "in_x,in_y,in_z,out_x,out_y,out_z\n";
    char buf[256];
    for (const auto &r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.in_x, r.in_y,
                      r.in_z, r.out_x, r.out_y, r.out_z);
        out << buf;
    }
}

} // namespace qres
