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
#include <vector>

#include "qres/residual.hpp"

namespace qres {

/// Gradient of a weighted logit combination with respect to every trainable
/// model parameter, in the model's parameter layout.
struct GradientVector {
    std::vector<double> backbone; // 3 * n_data * depth
    std::vector<double> w_angles; // 3 * n_data * L, block-major
    std::vector<double> beta;     // L
};

struct AdjointResult {
    std::vector<double> logits;     // scaled logits f_i
    double value = 0.0;             // sum_i weights[i] * f_i
    std::vector<double> slot_grads; // d<O>/d(angle slot), O = sum w_i Z_i
    GradientVector grads;
};

/// d(theta_l)/d(beta_l) for theta = 2 arctan(|beta|); sign(0) is taken as 0
/// so beta = 0 is a stationary point of the circuit term.
double dtheta_dbeta(double beta);

/// One forward plus one backward sweep. `weights` picks the observable
/// O = sum_i weights[i] Z_i over the logit qubits; the assembled gradients
/// are d(sum_i w_i f_i)/d(param), including the ancilla-angle chain into
/// beta. Setting include_theta_chain = false reproduces the
/// scaling-term-only beta gradient.
AdjointResult adjoint_gradient(const ResidualModel &model,
                               const StateVector &x_encoded,
                               std::span<const double> weights,
                               bool include_theta_chain = true);

/// d<O>/d(angle slot) by the parameter-shift rule: the two-term rule for
/// plain rotations and the exact four-term rule (shifts +-pi/2, +-3pi/2)
/// for ancilla-controlled ones, whose generator has eigenvalues {0, +-1/2}.
/// Slots bound to several gates (the ancilla angles) sum the per-occurrence
/// shifts. Rejects non-angle parameters; beta is handled by grad_beta.
double parameter_shift_slot(const ResidualModel &model,
                            const StateVector &x_encoded,
                            std::span<const double> weights, int slot);

/// Full gradient with every angle slot evaluated by parameter shift;
/// independent of the adjoint path except for the shared kernel.
AdjointResult parameter_shift_gradient(const ResidualModel &model,
                                       const StateVector &x_encoded,
                                       std::span<const double> weights,
                                       bool include_theta_chain = true);

/// d(sum_i w_i f_i)/d(beta_l). Convenience view over adjoint_gradient.
std::vector<double> grad_beta(const ResidualModel &model,
                              const StateVector &x_encoded,
                              std::span<const double> weights);

/// Gradient with respect to the raw input features. The preprocessing chain
/// zero-pads to `pad_to` and L2-normalizes; the returned vector chains
/// through the normalization Jacobian (I - xhat xhat^T)/||x|| and the
/// padding projection. Rejects all-zero inputs.
std::vector<double> input_gradient(const ResidualModel &model,
                                   std::span<const double> x_raw,
                                   std::size_t pad_to,
                                   std::span<const double> weights);

/// Central-difference oracle, step in [1e-7, 1e-3].
std::vector<double>
finite_difference(const std::function<double(std::span<const double>)> &f,
                  std::span<const double> params, double step);

} // namespace qres
