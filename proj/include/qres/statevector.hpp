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

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qres/common.hpp"

namespace qres {

/// Gate set needed by the residual circuits: RY/RZ rotations and CNOT.
enum class GateKind : std::uint8_t { RY, RZ, CNOT };

/// One gate acting on a register. Rotations use (target, angle); CNOT uses
/// (control, target). `control` is -1 when absent.
struct GateOp {
    GateKind kind;
    int target;
    int control = -1;
    double angle = 0.0;

    static GateOp ry(int target, double angle);
    static GateOp rz(int target, double angle);
    static GateOp cnot(int control, int target);
};

/// Z observable on a single qubit of the data register.
struct PauliZObservable {
    int qubit;
};

namespace testing {
/// Self-test hook: flips the sign of the RY sine entries so the `verify`
/// suite can prove it catches a broken kernel. Never set outside of that.
extern bool ry_sign_flip;
} // namespace testing

/// 2x2 matrix of a rotation gate. RY(t) = exp(-i t Y/2) (cos/sin real form),
/// RZ(t) = diag(exp(-i t/2), exp(+i t/2)).
Eigen::Matrix2cd gate_matrix(GateKind kind, double angle);

/// Dense complex statevector over `n_qubits` qubits, little-endian: qubit 0
/// is the least significant bit of the basis-state index. Gate application
/// mutates in place; copy first where a pure-value treatment is needed.
class StateVector {
  public:
    /// |0...0> on n_qubits.
    explicit StateVector(int n_qubits);

    /// Takes ownership of an amplitude vector whose length must be a power
    /// of two. No normalization is applied.
    static StateVector from_amplitudes(std::vector<cplx> amps);

    int num_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }

    double norm() const;

    /// Applies a gate, optionally restricted to the subspace where every
    /// qubit in `control_mask` is |1> (used for ancilla-controlled blocks).
    void apply(const GateOp &gate, std::uint64_t control_mask = 0);
    void apply(std::span<const GateOp> gates);

    /// Applies `gates` on the subspace where `control` is |1>; the
    /// control-0 subspace is untouched. Subspace iteration, no Toffoli
    /// decomposition.
    void apply_controlled(int control, std::span<const GateOp> gates);

    /// <Z_qubit> = sum_i (+-1)|a_i|^2, sign from bit `qubit` of i. Other
    /// qubits (ancillas included) are traced out implicitly. Rejects states
    /// whose norm deviates from 1 by more than 1e-8.
    double expectation_z(int qubit) const;

    /// <O> for O = sum_i weights[i] * Z_i without the norm check burden of
    /// calling expectation_z per term.
    double expectation_z_weighted(std::span<const double> weights) const;

  private:
    void apply_2x2(const Eigen::Matrix2cd &m, int target,
                   std::uint64_t control_mask);
    void apply_rz(double angle, int target, std::uint64_t control_mask);
    void apply_ry(double angle, int target, std::uint64_t control_mask);
    void apply_cnot(int control, int target, std::uint64_t control_mask);

    int n_qubits_;
    std::vector<cplx> amps_;
};

/// Exact dense matrix of a gate sequence on n qubits (memory guard n <= 12).
/// Oracle support for the tests; not a simulation path.
Eigen::MatrixXcd dense_unitary_of(std::span<const GateOp> gates, int n_qubits);

/// Dense matrix of the same sequence restricted to fire only where `control`
/// is |1>, i.e. I (+) W on the doubled space. Oracle for apply_controlled.
Eigen::MatrixXcd dense_controlled_unitary_of(std::span<const GateOp> gates,
                                             int n_qubits, int control);

/// Inserts a 0 bit at position `pos` of `i` (index helper for pair loops).
inline std::uint64_t insert_zero_bit(std::uint64_t i, int pos) {
    const std::uint64_t low = i & ((std::uint64_t{1} << pos) - 1);
    return ((i >> pos) << (pos + 1)) | low;
}

} // namespace qres
