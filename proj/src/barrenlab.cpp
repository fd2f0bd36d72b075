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
#include "qres/barrenlab.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qres/parallel.hpp"

namespace qres {

HaarSampler::HaarSampler(int d, std::uint64_t seed) : d_(d), rng_(seed) {
    require(d >= 2 && d <= 4096, "Haar sampler dimension out of range");
}

Eigen::MatrixXcd HaarSampler::unitary() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(d_, d_);
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            g(i, j) = cplx{gauss(rng_), gauss(rng_)} / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d_; ++j) {
        const cplx rjj = r(j, j);
        const double a = std::abs(rjj);
        const cplx phase = a > 0.0 ? rjj / a : cplx{1.0, 0.0};
        q.col(j) *= phase;
    }
    return q;
}

Eigen::VectorXcd HaarSampler::state() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXcd v(d_);
    for (int i = 0; i < d_; ++i) {
        v(i) = cplx{gauss(rng_), gauss(rng_)};
    }
    return v / v.norm();
}

Eigen::VectorXd z0_diagonal(int d) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) {
        z(i) = (i & 1) ? -1.0 : 1.0;
    }
    return z;
}

Eigen::MatrixXcd flip_operator(int d) {
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            f(i * d + j, j * d + i) = 1.0;
        }
    }
    return f;
}

Eigen::MatrixXcd rho_with_purity(int d, double purity, std::uint64_t seed) {
    require(purity >= 1.0 / d && purity <= 1.0,
            "purity must lie in [1/d, 1]");
    // tr(rho^2) = lambda^2 (1 - 1/d) + 1/d for the pure/maximally-mixed blend.
    const double lambda = std::sqrt((purity - 1.0 / d) / (1.0 - 1.0 / d));
    HaarSampler sampler(d, seed);
    const Eigen::VectorXcd phi = sampler.state();
    return lambda * (phi * phi.adjoint()) +
           (1.0 - lambda) / d * Eigen::MatrixXcd::Identity(d, d);
}

double purity_of(const Eigen::MatrixXcd &rho) {
    return (rho * rho).trace().real();
}

double weingarten_first_moment_check(int d, const Eigen::MatrixXcd &O,
                                     int samples, std::uint64_t seed) {
    require(O.rows() == d && O.cols() == d, "O must be d x d");
    require(samples > 0, "need at least one sample");
    HaarSampler sampler(d, seed);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
    for (int s = 0; s < samples; ++s) {
        const Eigen::MatrixXcd u = sampler.unitary();
        acc += u * O * u.adjoint();
    }
    acc /= samples;
    const Eigen::MatrixXcd expected =
        O.trace() / static_cast<double>(d) * Eigen::MatrixXcd::Identity(d, d);
    return (acc - expected).cwiseAbs().maxCoeff();
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

} // namespace

double weingarten_second_moment_check(int d, const Eigen::MatrixXcd &O,
                                      int samples, std::uint64_t seed) {
    require(d <= 16, "second-moment check limited to d <= 16");
    require(O.rows() == d * d && O.cols() == d * d, "O must be d^2 x d^2");
    require(samples > 0, "need at least one sample");
    HaarSampler sampler(d, seed);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int s = 0; s < samples; ++s) {
        const Eigen::MatrixXcd u = sampler.unitary();
        const Eigen::MatrixXcd u2 = kron(u, u);
        acc += u2 * O * u2.adjoint();
    }
    acc /= samples;

    const Eigen::MatrixXcd flip = flip_operator(d);
    const cplx tr_o = O.trace();
    const cplx tr_fo = (flip * O).trace();
    const double dd = d;
    const cplx c_id = (tr_o - tr_fo / dd) / (dd * dd - 1.0);
    const cplx c_flip = (tr_fo - tr_o / dd) / (dd * dd - 1.0);
    const Eigen::MatrixXcd expected =
        c_id * Eigen::MatrixXcd::Identity(d * d, d * d) + c_flip * flip;
    return (acc - expected).cwiseAbs().maxCoeff();
}

VarianceEstimate variance_of_samples(std::span<const double> g, int d,
                                     std::string tag) {
    const int n = static_cast<int>(g.size());
    require(n >= 2, "variance needs at least two samples");
    VarianceEstimate e;
    e.samples = n;
    e.d = d;
    e.tag = std::move(tag);
    double mean = 0.0;
    for (double v : g) {
        mean += v;
    }
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : g) {
        const double c = v - mean;
        m2 += c * c;
        m4 += c * c * c * c;
    }
    const double s2 = m2 / (n - 1);
    m2 /= n;
    m4 /= n;
    e.mean = mean;
    e.variance = s2;
    e.stderr_mean = std::sqrt(s2 / n);
    // Moment-based standard error of the sample variance.
    const double var_of_var =
        (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n;
    e.stderr_variance = std::sqrt(std::max(var_of_var, 0.0));
    return e;
}

namespace {

// -Im tr(B [P, A]) for B = w w^dag and diagonal P: the real value of
// i tr(B [P, A]).
double commutator_term(const Eigen::VectorXd &z, const Eigen::MatrixXcd &A,
                       const Eigen::VectorXcd &w) {
    const Eigen::VectorXcd aw = A * w;
    const Eigen::RowVectorXcd wa = w.adjoint() * A;
    cplx t{0.0, 0.0};
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        t += z(j) * (aw(j) * std::conj(w(j)) - w(j) * wa(j));
    }
    return -t.imag();
}

// Dense-rho variant: i tr(B [P, A]) with B = U rho U^dag.
double commutator_term_mixed(const Eigen::VectorXd &z,
                             const Eigen::MatrixXcd &A,
                             const Eigen::MatrixXcd &B) {
    const Eigen::MatrixXcd ab = A * B;
    const Eigen::MatrixXcd ba = B * A;
    cplx t{0.0, 0.0};
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        t += z(j) * (ab(j, j) - ba(j, j));
    }
    return -t.imag();
}

} // namespace

VarianceEstimate empirical_var_beta(int d, double beta_max, int samples,
                                    std::uint64_t seed,
                                    const Eigen::MatrixXcd *rho, int workers) {
    require((d & (d - 1)) == 0 && d >= 2, "d must be a power of two");
    require(beta_max >= 0.0, "beta_max must be non-negative");
    const Eigen::VectorXd z = z0_diagonal(d);
    std::vector<double> g(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        HaarSampler sampler(d, derive_seed(seed, s));
        std::uniform_real_distribution<double> unif(-beta_max, beta_max);
        std::mt19937_64 beta_rng(derive_seed(seed, 500000 + s));
        const double beta = beta_max > 0.0 ? unif(beta_rng) : 0.0;
        double tr;
        if (rho == nullptr) {
            const Eigen::VectorXcd w = sampler.state(); // U applied to pure rho
            tr = (z.array() * w.cwiseAbs2().array()).sum();
        } else {
            const Eigen::MatrixXcd u = sampler.unitary();
            const Eigen::MatrixXcd b = u * (*rho) * u.adjoint();
            cplx acc{0.0, 0.0};
            for (int j = 0; j < d; ++j) {
                acc += z(j) * b(j, j);
            }
            tr = acc.real();
        }
        g[s] = 2.0 * beta * tr;
    });
    return variance_of_samples(g, d, "beta");
}

VarianceEstimate empirical_var_theta(int d, double beta_max, int samples,
                                     std::uint64_t seed,
                                     const Eigen::MatrixXcd *rho,
                                     int workers) {
    require((d & (d - 1)) == 0 && d >= 2, "d must be a power of two");
    const Eigen::VectorXd z = z0_diagonal(d);
    const Eigen::MatrixXcd zmat = z.asDiagonal().toDenseMatrix().cast<cplx>();
    std::vector<double> g(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        HaarSampler sampler(d, derive_seed(seed, s));
        std::uniform_real_distribution<double> unif(-beta_max, beta_max);
        std::mt19937_64 beta_rng(derive_seed(seed, 500000 + s));
        const double beta = beta_max > 0.0 ? unif(beta_rng) : 0.0;
        const Eigen::MatrixXcd ua = sampler.unitary();
        const Eigen::MatrixXcd a = ua.adjoint() * zmat * ua;
        double x;
        if (rho == nullptr) {
            x = commutator_term(z, a, sampler.state());
        } else {
            const Eigen::MatrixXcd ub = sampler.unitary();
            x = commutator_term_mixed(z, a, ub * (*rho) * ub.adjoint());
        }
        g[s] = beta * beta * x;
    });
    return variance_of_samples(g, d, "theta");
}

VarianceEstimate empirical_var_qvc(int d, int samples, std::uint64_t seed,
                                   OperatorScaling scaling,
                                   const Eigen::MatrixXcd *rho, int workers) {
    require((d & (d - 1)) == 0 && d >= 2, "d must be a power of two");
    const Eigen::VectorXd z = z0_diagonal(d);
    const Eigen::MatrixXcd zmat = z.asDiagonal().toDenseMatrix().cast<cplx>();
    const double scale = scaling == OperatorScaling::UnitFrobenius
                             ? 1.0 / static_cast<double>(d)
                             : 1.0;
    std::vector<double> g(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        HaarSampler sampler(d, derive_seed(seed, s));
        const Eigen::MatrixXcd ua = sampler.unitary();
        const Eigen::MatrixXcd a = ua.adjoint() * zmat * ua;
        double x;
        if (rho == nullptr) {
            x = commutator_term(z, a, sampler.state());
        } else {
            const Eigen::MatrixXcd ub = sampler.unitary();
            x = commutator_term_mixed(z, a, ub * (*rho) * ub.adjoint());
        }
        g[s] = scale * x;
    });
    return variance_of_samples(g, d, "qvc");
}

CombinedVariance combined_qvc_resnet_var(int d, double beta_max, int samples,
                                         std::uint64_t seed, int workers) {
    require((d & (d - 1)) == 0 && d >= 2 && d <= 256,
            "combined estimator limited to d <= 256");
    const Eigen::VectorXd z = z0_diagonal(d);
    const Eigen::MatrixXcd zmat = z.asDiagonal().toDenseMatrix().cast<cplx>();
    std::vector<double> qvc_term(samples), res_term(samples);
    parallel_for(samples, workers, [&](std::size_t s) {
        HaarSampler sampler(d, derive_seed(seed, s));
        std::uniform_real_distribution<double> unif(-beta_max, beta_max);
        std::mt19937_64 beta_rng(derive_seed(seed, 500000 + s));
        const double beta = beta_max > 0.0 ? unif(beta_rng) : 0.0;
        const Eigen::MatrixXcd va = sampler.unitary();
        const Eigen::MatrixXcd u = sampler.unitary();
        const Eigen::VectorXcd w = sampler.state();
        const Eigen::MatrixXcd a1 = va.adjoint() * zmat * va;
        const Eigen::MatrixXcd zp = u.adjoint() * zmat * u;
        const Eigen::MatrixXcd a2 = va.adjoint() * zp * va;
        qvc_term[s] = commutator_term(z, a1, w);
        res_term[s] = beta * beta * commutator_term(z, a2, w);
    });

    std::vector<double> mixed(samples), pauli(samples);
    for (int s = 0; s < samples; ++s) {
        mixed[s] = qvc_term[s] / d + res_term[s];
        pauli[s] = qvc_term[s] + res_term[s];
    }
    CombinedVariance out;
    out.mixed = variance_of_samples(mixed, d, "combined");
    out.pauli = variance_of_samples(pauli, d, "combined_pauli");

    double mean_q = 0.0, mean_r = 0.0;
    for (int s = 0; s < samples; ++s) {
        mean_q += qvc_term[s];
        mean_r += res_term[s];
    }
    mean_q /= samples;
    mean_r /= samples;
    double cov = 0.0;
    for (int s = 0; s < samples; ++s) {
        cov += (qvc_term[s] - mean_q) * (res_term[s] - mean_r);
    }
    out.cross_covariance = cov / (samples - 1);
    return out;
}

double analytic_var_theta(double d, double beta_max, double purity) {
    const double bm4 = beta_max * beta_max * beta_max * beta_max;
    return 0.4 * bm4 * d * d * d / ((d * d - 1.0) * (d * d - 1.0)) *
           (purity - 1.0 / d);
}

double analytic_var_beta(double d, double beta_max, double purity) {
    return 4.0 / 3.0 * beta_max * beta_max * (d * purity - 1.0) /
           (d * d - 1.0);
}

double analytic_var_qvc(double d, double purity, OperatorScaling scaling) {
    const double base =
        2.0 * d / ((d * d - 1.0) * (d * d - 1.0)) * (purity - 1.0 / d);
    return scaling == OperatorScaling::UnitFrobenius ? base : base * d * d;
}

double analytic_var_combined(double d, double purity,
                             OperatorScaling scaling) {
    const double denom = d * d * d * d - 2.0 * d * d + 1.0;
    const double d5 = d * d * d * d * d;
    const double qvc_part = scaling == OperatorScaling::UnitFrobenius
                                ? 5.0 * d
                                : 5.0 * d * d * d;
    return 0.4 * (d5 + qvc_part) / denom * (purity - 1.0 / d);
}

double beta_max_for(BetaMaxRule rule, double d) {
    return rule == BetaMaxRule::SqrtD ? std::sqrt(d)
                                      : std::pow(d, 0.25);
}

std::vector<CurvePoint> analytic_curves(std::span<const int> qubit_grid,
                                        BetaMaxRule rule) {
    std::vector<CurvePoint> points;
    for (int n : qubit_grid) {
        require(n >= 1 && n <= 12, "analytic grid limited to 1..12 qubits");
        const double d = std::pow(2.0, n);
        const double purity = 1.0; // pure input state
        const double bm = beta_max_for(rule, d);
        auto push = [&](const std::string &curve, double value) {
            CurvePoint p;
            p.n_qubits = n;
            p.d = static_cast<long>(d);
            p.curve = curve;
            p.analytic = value;
            points.push_back(std::move(p));
        };
        push("qres_theta", analytic_var_theta(d, bm, purity));
        push("qres_beta", analytic_var_beta(d, bm, purity));
        push("qvc", analytic_var_qvc(d, purity, OperatorScaling::UnitFrobenius));
        push("qvc_pauli", analytic_var_qvc(d, purity, OperatorScaling::Pauli));
        push("combined",
             analytic_var_combined(d, purity, OperatorScaling::UnitFrobenius));
        push("combined_pauli",
             analytic_var_combined(d, purity, OperatorScaling::Pauli));
    }
    return points;
}

void write_curves_csv(const std::string &path,
                      std::span<const CurvePoint> points) {
    std::ofstream out(path);
    require(out.good(), "cannot open " + path + " for writing");
    out << "n_qubits,d,curve,analytic,empirical,stderr,samples\n";
    char buf[128];
    for (const auto &p : points) {
        std::snprintf(buf, sizeof(buf), "%d,%ld,%s,%.17g,", p.n_qubits, p.d,
                      p.curve.c_str(), p.analytic);
        out << buf;
        if (p.empirical) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", *p.empirical,
                          p.stderr_v.value_or(0.0), p.samples);
            out << buf;
        } else {
            out << ",,0\n";
        }
    }
}

} // namespace qres
