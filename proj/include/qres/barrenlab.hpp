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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qres/common.hpp"

namespace qres {

/// QR-based Haar draws from a complex Ginibre matrix with the phase-fixed
/// diagonal correction. Capped at d = 4096.
class HaarSampler {
  public:
    HaarSampler(int d, std::uint64_t seed);
    int dim() const { return d_; }
    Eigen::MatrixXcd unitary();
    /// Haar-random pure state (normalized complex Gaussian vector).
    Eigen::VectorXcd state();

  private:
    int d_;
    std::mt19937_64 rng_;
};

/// Z on qubit 0 embedded in d dimensions, as its diagonal.
Eigen::VectorXd z0_diagonal(int d);

/// Swap of the two tensor factors of C^d (x) C^d. F^2 = I, tr F = d.
Eigen::MatrixXcd flip_operator(int d);

/// rho = lambda |phi><phi| + (1-lambda) I/d with lambda chosen so that
/// tr(rho^2) equals `purity`; phi is Haar random.
Eigen::MatrixXcd rho_with_purity(int d, double purity, std::uint64_t seed);

double purity_of(const Eigen::MatrixXcd &rho);

/// max-norm of (1/N) sum U O U^dag - tr(O)/d I over N Haar draws.
double weingarten_first_moment_check(int d, const Eigen::MatrixXcd &O,
                                     int samples, std::uint64_t seed);

/// max-norm deviation of the empirical second moment from the two-term
/// identity/flip formula. O acts on the doubled space (d^2 x d^2); d <= 16.
double weingarten_second_moment_check(int d, const Eigen::MatrixXcd &O,
                                      int samples, std::uint64_t seed);

struct VarianceEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_variance = 0.0; // moment-based error of the variance
    double stderr_mean = 0.0;
    int samples = 0;
    int d = 0;
    std::string tag;
};

VarianceEstimate variance_of_samples(std::span<const double> g, int d,
                                     std::string tag);

/// Derivative estimator with respect to a residual strength:
/// 2 beta tr(U rho U^dag Z_0), beta ~ U[-beta_max, beta_max], U Haar.
/// rho defaults to a fresh Haar pure state per trial.
VarianceEstimate empirical_var_beta(int d, double beta_max, int samples,
                                    std::uint64_t seed,
                                    const Eigen::MatrixXcd *rho = nullptr,
                                    int workers = 0);

/// Derivative estimator with respect to an angle inside the block unitary:
/// beta^2 i tr(U_B rho U_B^dag [P, U_A^dag Z_0 U_A]) with P = Z_0 and
/// full-angle generators, matching the closed-form derivation.
VarianceEstimate empirical_var_theta(int d, double beta_max, int samples,
                                     std::uint64_t seed,
                                     const Eigen::MatrixXcd *rho = nullptr,
                                     int workers = 0);

/// Operator normalization of the plain-circuit estimators. The residual
/// closed forms use Pauli normalization (tr P^2 = tr Z^2 = d); the
/// published QVC curve corresponds to unit Frobenius norm for both the
/// generator and the observable, which scales the estimator by 1/d.
enum class OperatorScaling { Pauli, UnitFrobenius };

/// Same commutator estimator with the beta factor removed: the derivative
/// of the plain cost tr(V rho V^dag Z_0).
VarianceEstimate empirical_var_qvc(int d, int samples, std::uint64_t seed,
                                   OperatorScaling scaling,
                                   const Eigen::MatrixXcd *rho = nullptr,
                                   int workers = 0);

struct CombinedVariance {
    /// QVC term in unit-Frobenius scaling + residual term in Pauli scaling;
    /// the composition whose variance the published combined curve equals.
    VarianceEstimate mixed;
    /// Both terms in Pauli scaling (single-convention estimator).
    VarianceEstimate pauli;
    /// Empirical covariance of the two derivative terms (analytically 0).
    double cross_covariance = 0.0;
};

/// Derivative of f = tr(V rho V^dag Z) + beta^2 tr(UV rho V^dag U^dag Z)
/// with respect to an angle inside V; beta ~ U[-beta_max, beta_max].
CombinedVariance combined_qvc_resnet_var(int d, double beta_max, int samples,
                                         std::uint64_t seed, int workers = 0);

// Closed forms. `purity` is tr(rho^2).
double analytic_var_theta(double d, double beta_max, double purity);
double analytic_var_beta(double d, double beta_max, double purity);
double analytic_var_qvc(double d, double purity, OperatorScaling scaling);
double analytic_var_combined(double d, double purity, OperatorScaling scaling);

enum class BetaMaxRule { SqrtD, FourthRootD };

double beta_max_for(BetaMaxRule rule, double d);

struct CurvePoint {
    int n_qubits = 0;
    long d = 0;
    std::string curve;
    double analytic = 0.0;
    std::optional<double> empirical;
    std::optional<double> stderr_v;
    int samples = 0;
};

/// Evaluates every closed form over the qubit grid for pure-state purity.
std::vector<CurvePoint> analytic_curves(std::span<const int> qubit_grid,
                                        BetaMaxRule rule);

void write_curves_csv(const std::string &path,
                      std::span<const CurvePoint> points);

} // namespace qres
