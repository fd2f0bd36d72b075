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
#include "qres/statevector.hpp"

#include <cmath>

namespace qres {

namespace testing {
bool ry_sign_flip = false;
} // namespace testing

GateOp GateOp::ry(int target, double angle) {
    require(std::isfinite(angle), "RY angle must be finite");
    return GateOp{GateKind::RY, target, -1, angle};
}

GateOp GateOp::rz(int target, double angle) {
    require(std::isfinite(angle), "RZ angle must be finite");
    return GateOp{GateKind::RZ, target, -1, angle};
}

GateOp GateOp::cnot(int control, int target) {
    require(control != target, "CNOT control must differ from target");
    return GateOp{GateKind::CNOT, target, control, 0.0};
}

Eigen::Matrix2cd gate_matrix(GateKind kind, double angle) {
    Eigen::Matrix2cd m;
    switch (kind) {
    case GateKind::RY: {
        const double c = std::cos(angle / 2);
        double s = std::sin(angle / 2);
        if (testing::ry_sign_flip) {
            s = -s;
        }
        m << c, -s, s, c;
        return m;
    }
    case GateKind::RZ: {
        const cplx p0 = std::polar(1.0, -angle / 2);
        const cplx p1 = std::polar(1.0, +angle / 2);
        m << p0, 0.0, 0.0, p1;
        return m;
    }
    case GateKind::CNOT:
        m << 0.0, 1.0, 1.0, 0.0; // X block; embedding handled by callers
        return m;
    }
    throw InvalidInput("unknown gate kind");
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    require(n_qubits >= 1 && n_qubits <= 30, "qubit count out of range");
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amps) {
    require(!amps.empty() && (amps.size() & (amps.size() - 1)) == 0,
            "amplitude count must be a power of two");
    StateVector sv(1);
    sv.amps_ = std::move(amps);
    sv.n_qubits_ = 0;
    for (std::size_t d = sv.amps_.size(); d > 1; d >>= 1) {
        ++sv.n_qubits_;
    }
    return sv;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

void StateVector::apply(const GateOp &gate, std::uint64_t control_mask) {
    require(gate.target >= 0 && gate.target < n_qubits_,
            "gate target out of range");
    require((control_mask >> n_qubits_) == 0, "control mask out of range");
    require((control_mask & (std::uint64_t{1} << gate.target)) == 0,
            "control qubit overlaps gate target");
    switch (gate.kind) {
    case GateKind::RY:
        apply_ry(gate.angle, gate.target, control_mask);
        return;
    case GateKind::RZ:
        apply_rz(gate.angle, gate.target, control_mask);
        return;
    case GateKind::CNOT:
        require(gate.control >= 0 && gate.control < n_qubits_,
                "CNOT control out of range");
        require((control_mask & (std::uint64_t{1} << gate.control)) == 0,
                "control qubit overlaps CNOT control");
        apply_cnot(gate.control, gate.target, control_mask);
        return;
    }
}

void StateVector::apply(std::span<const GateOp> gates) {
    for (const auto &g : gates) {
        apply(g);
    }
}

void StateVector::apply_controlled(int control, std::span<const GateOp> gates) {
    require(control >= 0 && control < n_qubits_, "control out of range");
    const std::uint64_t mask = std::uint64_t{1} << control;
    for (const auto &g : gates) {
        apply(g, mask);
    }
}

void StateVector::apply_2x2(const Eigen::Matrix2cd &m, int target,
                            std::uint64_t control_mask) {
    const std::size_t half = amps_.size() >> 1;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    for (std::size_t k = 0; k < half; ++k) {
        const std::uint64_t i0 = insert_zero_bit(k, target);
        if ((i0 & control_mask) != control_mask) {
            continue;
        }
        const std::uint64_t i1 = i0 | tbit;
        const cplx a0 = amps_[i0];
        const cplx a1 = amps_[i1];
        amps_[i0] = m00 * a0 + m01 * a1;
        amps_[i1] = m10 * a0 + m11 * a1;
    }
}

void StateVector::apply_ry(double angle, int target,
                           std::uint64_t control_mask) {
    const double c = std::cos(angle / 2);
    double s = std::sin(angle / 2);
    if (testing::ry_sign_flip) {
        s = -s;
    }
    const std::size_t half = amps_.size() >> 1;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    for (std::size_t k = 0; k < half; ++k) {
        const std::uint64_t i0 = insert_zero_bit(k, target);
        if ((i0 & control_mask) != control_mask) {
            continue;
        }
        const std::uint64_t i1 = i0 | tbit;
        const cplx a0 = amps_[i0];
        const cplx a1 = amps_[i1];
        amps_[i0] = c * a0 - s * a1;
        amps_[i1] = s * a0 + c * a1;
    }
}

void StateVector::apply_rz(double angle, int target,
                           std::uint64_t control_mask) {
    const cplx p0 = std::polar(1.0, -angle / 2);
    const cplx p1 = std::polar(1.0, +angle / 2);
    const std::uint64_t tbit = std::uint64_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & control_mask) != control_mask) {
            continue;
        }
        amps_[i] *= (i & tbit) ? p1 : p0;
    }
}

void StateVector::apply_cnot(int control, int target,
                             std::uint64_t control_mask) {
    const std::uint64_t full_mask =
        control_mask | (std::uint64_t{1} << control);
    const std::size_t half = amps_.size() >> 1;
    const std::uint64_t tbit = std::uint64_t{1} << target;
    for (std::size_t k = 0; k < half; ++k) {
        const std::uint64_t i0 = insert_zero_bit(k, target);
        if ((i0 & full_mask) != full_mask) {
            continue;
        }
        std::swap(amps_[i0], amps_[i0 | tbit]);
    }
}

double StateVector::expectation_z(int qubit) const {
    require(qubit >= 0 && qubit < n_qubits_, "observable qubit out of range");
    require(std::abs(norm() - 1.0) <= 1e-8,
            "expectation_z requires a normalized state");
    const std::uint64_t qbit = std::uint64_t{1} << qubit;
    double z = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        z += (i & qbit) ? -p : p;
    }
    return z;
}

double StateVector::expectation_z_weighted(
    std::span<const double> weights) const {
    require(static_cast<int>(weights.size()) <= n_qubits_,
            "more observable weights than qubits");
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        double w = 0.0;
        for (std::size_t q = 0; q < weights.size(); ++q) {
            w += (i >> q) & 1 ? -weights[q] : weights[q];
        }
        acc += w * p;
    }
    return acc;
}

Eigen::MatrixXcd dense_unitary_of(std::span<const GateOp> gates,
                                  int n_qubits) {
    require(n_qubits >= 1 && n_qubits <= 12,
            "dense unitary limited to 12 qubits");
    const std::size_t dim = std::size_t{1} << n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    // Column j = circuit applied to basis state |j>.
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<cplx> col(dim, cplx{0.0, 0.0});
        col[j] = 1.0;
        StateVector sv = StateVector::from_amplitudes(std::move(col));
        sv.apply(gates);
        for (std::size_t i = 0; i < dim; ++i) {
            u(i, j) = sv.amplitudes()[i];
        }
    }
    return u;
}

Eigen::MatrixXcd dense_controlled_unitary_of(std::span<const GateOp> gates,
                                             int n_qubits, int control) {
    require(n_qubits >= 1 && n_qubits <= 12,
            "dense unitary limited to 12 qubits");
    const std::size_t dim = std::size_t{1} << n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<cplx> col(dim, cplx{0.0, 0.0});
        col[j] = 1.0;
        StateVector sv = StateVector::from_amplitudes(std::move(col));
        sv.apply_controlled(control, gates);
        for (std::size_t i = 0; i < dim; ++i) {
            u(i, j) = sv.amplitudes()[i];
        }
    }
    return u;
}

} // namespace qres
