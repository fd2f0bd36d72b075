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
#include "qres/gradients.hpp"

#include <cmath>

namespace qres {

namespace {

void apply_op(StateVector &state, const CircuitOp &op, bool inverse) {
    const std::uint64_t mask =
        op.anc_control >= 0 ? (std::uint64_t{1} << op.anc_control) : 0;
    const double angle = inverse ? -op.angle : op.angle;
    state.apply(GateOp{op.kind, op.target, op.control, angle}, mask);
}

// <lambda| G |phi> for the generator G of exp(-i angle G): P/2 on the target,
// restricted to the ancilla-1 subspace for controlled rotations.
cplx generator_inner(const StateVector &lambda, const StateVector &phi,
                     const CircuitOp &op) {
    const std::uint64_t mask =
        op.anc_control >= 0 ? (std::uint64_t{1} << op.anc_control) : 0;
    const auto lam = lambda.amplitudes();
    const auto ph = phi.amplitudes();
    cplx acc{0.0, 0.0};
    if (op.kind == GateKind::RZ) {
        const std::uint64_t tbit = std::uint64_t{1} << op.target;
        for (std::size_t i = 0; i < ph.size(); ++i) {
            if ((i & mask) != mask) {
                continue;
            }
            const double half = (i & tbit) ? -0.5 : 0.5;
            acc += std::conj(lam[i]) * (half * ph[i]);
        }
        return acc;
    }
    // RY: (Y/2)|phi> maps (a0, a1) -> (-i a1, i a0)/2.
    const std::size_t half_dim = ph.size() >> 1;
    const std::uint64_t tbit = std::uint64_t{1} << op.target;
    const cplx ihalf{0.0, 0.5};
    for (std::size_t k = 0; k < half_dim; ++k) {
        const std::uint64_t i0 = insert_zero_bit(k, op.target);
        if ((i0 & mask) != mask) {
            continue;
        }
        const std::uint64_t i1 = i0 | tbit;
        acc += std::conj(lam[i0]) * (-ihalf * ph[i1]);
        acc += std::conj(lam[i1]) * (ihalf * ph[i0]);
    }
    return acc;
}

struct BackwardSweep {
    std::vector<double> raw_z;
    double weighted = 0.0;
    std::vector<double> slot_grads;
    StateVector lambda; // after the full rewind: C^dag O C |psi0>
};

BackwardSweep adjoint_backward(const Circuit &circuit,
                               const ResidualModel &model,
                               const StateVector &x_encoded,
                               std::span<const double> weights) {
    require(weights.size() ==
                static_cast<std::size_t>(model.num_logits()),
            "observable weight count must match the logit count");

    StateVector phi = embed_with_ancillas(x_encoded, model.num_blocks());
    for (const auto &op : circuit.ops) {
        apply_op(phi, op, false);
    }

    BackwardSweep out{std::vector<double>(model.num_logits(), 0.0), 0.0,
                      std::vector<double>(circuit.num_slots(), 0.0),
                      StateVector(1)};
    for (int i = 0; i < model.num_logits(); ++i) {
        out.raw_z[i] = phi.expectation_z(i);
        out.weighted += weights[i] * out.raw_z[i];
    }

    // lambda = O |psi>, O = sum_i w_i Z_i (diagonal).
    StateVector lambda = phi;
    {
        auto lam = lambda.amplitudes();
        for (std::size_t i = 0; i < lam.size(); ++i) {
            double w = 0.0;
            for (std::size_t q = 0; q < weights.size(); ++q) {
                w += (i >> q) & 1 ? -weights[q] : weights[q];
            }
            lam[i] *= w;
        }
    }

    for (auto it = circuit.ops.rbegin(); it != circuit.ops.rend(); ++it) {
        const CircuitOp &op = *it;
        if (op.slot >= 0) {
            const cplx inner = generator_inner(lambda, phi, op);
            out.slot_grads[op.slot] += op.slot_scale * 2.0 * inner.imag();
        }
        apply_op(phi, op, true);
        apply_op(lambda, op, true);
    }
    out.lambda = std::move(lambda);
    return out;
}

GradientVector assemble(const ResidualModel &model, const Circuit &circuit,
                        std::span<const double> slot_grads,
                        double weighted_expectation, bool include_theta_chain) {
    const double scale = model.scale_factor();
    GradientVector g;
    g.backbone.assign(slot_grads.begin(),
                      slot_grads.begin() + circuit.backbone_slots);
    g.w_angles.assign(slot_grads.begin() + circuit.backbone_slots,
                      slot_grads.begin() + circuit.backbone_slots +
                          circuit.w_slots);
    for (auto &v : g.backbone) {
        v *= scale;
    }
    for (auto &v : g.w_angles) {
        v *= scale;
    }
    g.beta.resize(model.num_blocks());
    for (int l = 0; l < model.num_blocks(); ++l) {
        const double beta = model.blocks[l].beta;
        double term = weighted_expectation * scale * 2.0 * beta /
                      (1.0 + beta * beta);
        if (include_theta_chain) {
            term += scale * slot_grads[circuit.theta_slot(l)] *
                    dtheta_dbeta(beta);
        }
        g.beta[l] = term;
    }
    return g;
}

} // namespace

double dtheta_dbeta(double beta) {
    if (beta == 0.0) {
        return 0.0;
    }
    const double sign = beta > 0.0 ? 1.0 : -1.0;
    return 2.0 * sign / (1.0 + beta * beta);
}

AdjointResult adjoint_gradient(const ResidualModel &model,
                               const StateVector &x_encoded,
                               std::span<const double> weights,
                               bool include_theta_chain) {
    const Circuit circuit = build_circuit(model);
    BackwardSweep sweep = adjoint_backward(circuit, model, x_encoded, weights);

    AdjointResult res;
    const double scale = model.scale_factor();
    res.logits = sweep.raw_z;
    for (auto &v : res.logits) {
        v *= scale;
    }
    res.value = scale * sweep.weighted;
    res.slot_grads = sweep.slot_grads;
    res.grads = assemble(model, circuit, sweep.slot_grads, sweep.weighted,
                         include_theta_chain);
    return res;
}

namespace {

double weighted_expectation_of(const Circuit &circuit,
                               const ResidualModel &model,
                               const StateVector &x_encoded,
                               std::span<const double> weights) {
    StateVector state = embed_with_ancillas(x_encoded, model.num_blocks());
    for (const auto &op : circuit.ops) {
        apply_op(state, op, false);
    }
    double acc = 0.0;
    for (int i = 0; i < model.num_logits(); ++i) {
        acc += weights[i] * state.expectation_z(i);
    }
    return acc;
}

double shifted_expectation(Circuit circuit, const ResidualModel &model,
                           const StateVector &x_encoded,
                           std::span<const double> weights, std::size_t op_idx,
                           double shift) {
    circuit.ops[op_idx].angle += shift;
    return weighted_expectation_of(circuit, model, x_encoded, weights);
}

} // namespace

double parameter_shift_slot(const ResidualModel &model,
                            const StateVector &x_encoded,
                            std::span<const double> weights, int slot) {
    const Circuit circuit = build_circuit(model);
    require(slot >= 0 && slot < circuit.num_slots(),
            "parameter shift applies to rotation-angle slots only");

    constexpr double half_pi = 1.5707963267948966;
    const double sqrt2 = std::sqrt(2.0);
    const double c1 = (sqrt2 + 1.0) / (4.0 * sqrt2);
    const double c2 = (sqrt2 - 1.0) / (4.0 * sqrt2);

    double grad = 0.0;
    for (std::size_t k = 0; k < circuit.ops.size(); ++k) {
        const CircuitOp &op = circuit.ops[k];
        if (op.slot != slot) {
            continue;
        }
        auto eval = [&](double shift) {
            return shifted_expectation(circuit, model, x_encoded, weights, k,
                                       shift);
        };
        double occurrence;
        if (op.anc_control >= 0) {
            // Generator eigenvalues {0, +-1/2}: exact four-term rule.
            occurrence = c1 * (eval(half_pi) - eval(-half_pi)) -
                         c2 * (eval(3 * half_pi) - eval(-3 * half_pi));
        } else {
            occurrence = 0.5 * (eval(half_pi) - eval(-half_pi));
        }
        grad += op.slot_scale * occurrence;
    }
    return grad;
}

AdjointResult parameter_shift_gradient(const ResidualModel &model,
                                       const StateVector &x_encoded,
                                       std::span<const double> weights,
                                       bool include_theta_chain) {
    const Circuit circuit = build_circuit(model);
    AdjointResult res;
    res.slot_grads.resize(circuit.num_slots());
    for (int s = 0; s < circuit.num_slots(); ++s) {
        res.slot_grads[s] = parameter_shift_slot(model, x_encoded, weights, s);
    }
    const double scale = model.scale_factor();
    double weighted = 0.0;
    const auto raw = forward_expectations(model, x_encoded);
    res.logits.resize(model.num_logits());
    for (int i = 0; i < model.num_logits(); ++i) {
        res.logits[i] = scale * raw[i];
        weighted += weights[i] * raw[i];
    }
    res.value = scale * weighted;
    res.grads =
        assemble(model, circuit, res.slot_grads, weighted, include_theta_chain);
    return res;
}

std::vector<double> grad_beta(const ResidualModel &model,
                              const StateVector &x_encoded,
                              std::span<const double> weights) {
    return adjoint_gradient(model, x_encoded, weights).grads.beta;
}

std::vector<double> input_gradient(const ResidualModel &model,
                                   std::span<const double> x_raw,
                                   std::size_t pad_to,
                                   std::span<const double> weights) {
    require(pad_to == (std::size_t{1} << model.n_data),
            "pad_to must match the data register dimension");
    require(x_raw.size() <= pad_to, "input longer than the padded register");

    double norm2 = 0.0;
    for (double v : x_raw) {
        norm2 += v * v;
    }
    require(norm2 > 0.0, "cannot encode the zero vector");
    const double nrm = std::sqrt(norm2);

    std::vector<cplx> amps(pad_to, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < x_raw.size(); ++i) {
        amps[i] = x_raw[i] / nrm;
    }
    const StateVector encoded = StateVector::from_amplitudes(std::move(amps));

    const Circuit circuit = build_circuit(model);
    BackwardSweep sweep = adjoint_backward(circuit, model, encoded, weights);

    // d<O>/d(amplitude_i) = 2 Re[(C^dag O C psi0)_i] on the anc=0 slice;
    // the encoded amplitudes are real so only the real direction matters.
    const auto lam = sweep.lambda.amplitudes();
    std::vector<double> d_amp(pad_to);
    double radial = 0.0; // (d_amp . xhat)
    for (std::size_t i = 0; i < pad_to; ++i) {
        d_amp[i] = 2.0 * lam[i].real();
        radial += d_amp[i] * encoded.amplitudes()[i].real();
    }

    const double scale = model.scale_factor();
    std::vector<double> grad(x_raw.size());
    for (std::size_t i = 0; i < x_raw.size(); ++i) {
        const double xhat = encoded.amplitudes()[i].real();
        grad[i] = scale * (d_amp[i] - radial * xhat) / nrm;
    }
    return grad;
}

std::vector<double>
finite_difference(const std::function<double(std::span<const double>)> &f,
                  std::span<const double> params, double step) {
    require(step >= 1e-7 && step <= 1e-3,
            "finite-difference step outside [1e-7, 1e-3]");
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> grad(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + step;
        const double hi = f(p);
        p[i] = orig - step;
        const double lo = f(p);
        p[i] = orig;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

} // namespace qres
