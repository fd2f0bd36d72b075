#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "qres/residual.hpp"
#include "qres/statevector.hpp"

namespace qres::test {

// Independent dense oracle: embeds a 2x2 matrix on `target` of n qubits,
// little-endian (qubit 0 = LSB factor), via Kronecker products. Deliberately
// separate from the library's dense_unitary_of path.
inline Eigen::MatrixXcd embed_single(const Eigen::Matrix2cd &u, int target,
                                     int n_qubits) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = n_qubits - 1; q >= 0; --q) {
        const Eigen::MatrixXcd factor =
            q == target ? Eigen::MatrixXcd(u)
                        : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity());
        Eigen::MatrixXcd next(out.rows() * factor.rows(),
                              out.cols() * factor.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                next.block(i * factor.rows(), j * factor.cols(), factor.rows(),
                           factor.cols()) = out(i, j) * factor;
            }
        }
        out = std::move(next);
    }
    return out;
}

inline Eigen::MatrixXcd dense_cnot(int control, int target, int n_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::Index i = j;
        if ((j >> control) & 1) {
            i = j ^ (Eigen::Index{1} << target);
        }
        m(i, j) = 1.0;
    }
    return m;
}

inline Eigen::MatrixXcd dense_oracle(std::span<const GateOp> gates,
                                     int n_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto &g : gates) {
        Eigen::MatrixXcd step;
        if (g.kind == GateKind::CNOT) {
            step = dense_cnot(g.control, g.target, n_qubits);
        } else {
            step = embed_single(gate_matrix(g.kind, g.angle), g.target,
                                n_qubits);
        }
        u = step * u;
    }
    return u;
}

inline StateVector random_state(int n_qubits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> amps(std::size_t{1} << n_qubits);
    double norm2 = 0.0;
    for (auto &a : amps) {
        a = cplx{gauss(rng), gauss(rng)};
        norm2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto &a : amps) {
        a *= inv;
    }
    return StateVector::from_amplitudes(std::move(amps));
}

inline std::vector<GateOp> random_gates(int n_qubits, int count,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
    std::uniform_int_distribution<int> pick(0, n_qubits - 1);
    std::uniform_int_distribution<int> kind(0, 2);
    std::vector<GateOp> gates;
    for (int i = 0; i < count; ++i) {
        const int k = n_qubits >= 2 ? kind(rng) : kind(rng) % 2;
        if (k == 0) {
            gates.push_back(GateOp::ry(pick(rng), angle(rng)));
        } else if (k == 1) {
            gates.push_back(GateOp::rz(pick(rng), angle(rng)));
        } else {
            int c = pick(rng), t = pick(rng);
            while (t == c) {
                t = pick(rng);
            }
            gates.push_back(GateOp::cnot(c, t));
        }
    }
    return gates;
}

inline Eigen::VectorXcd to_eigen(const StateVector &sv) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(sv.dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = sv.amplitudes()[static_cast<std::size_t>(i)];
    }
    return v;
}

inline double max_amp_diff(const StateVector &a, const StateVector &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        m = std::max(m, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
    }
    return m;
}

// Relative agreement with an absolute floor of 1: suits gradients whose
// natural scale is O(1).
inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

} // namespace qres::test
