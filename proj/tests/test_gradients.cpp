#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "qres/dataset.hpp"
#include "qres/gradients.hpp"

using namespace qres;
using qres::test::close_rel;
using qres::test::random_state;

namespace {

constexpr double pi = std::numbers::pi;

// f(params) as a plain function of the flat angle+beta vector, for the
// finite-difference oracle. Layout: [backbone | w | beta].
struct FlatModel {
    ResidualModel base;

    std::size_t size() const {
        return 3 * static_cast<std::size_t>(base.n_data) *
                   (base.backbone.depth + base.num_blocks()) +
               base.num_blocks();
    }

    ResidualModel with(std::span<const double> flat) const {
        ResidualModel m = base;
        std::size_t k = 0;
        for (auto &layer : m.backbone.layers) {
            for (auto &a : layer.angles) {
                a = flat[k++];
            }
        }
        for (auto &b : m.blocks) {
            for (auto &a : b.w_params.angles) {
                a = flat[k++];
            }
        }
        for (auto &b : m.blocks) {
            b.beta = flat[k++];
        }
        return m;
    }

    std::vector<double> flat() const {
        std::vector<double> out;
        for (const auto &layer : base.backbone.layers) {
            out.insert(out.end(), layer.angles.begin(), layer.angles.end());
        }
        for (const auto &b : base.blocks) {
            out.insert(out.end(), b.w_params.angles.begin(),
                       b.w_params.angles.end());
        }
        for (const auto &b : base.blocks) {
            out.push_back(b.beta);
        }
        return out;
    }
};

std::vector<double> gradient_as_flat(const GradientVector &g) {
    std::vector<double> out;
    out.insert(out.end(), g.backbone.begin(), g.backbone.end());
    out.insert(out.end(), g.w_angles.begin(), g.w_angles.end());
    out.insert(out.end(), g.beta.begin(), g.beta.end());
    return out;
}

} // namespace

TEST_SUITE_BEGIN("gradients");

TEST_CASE("single-qubit RY: d<Z>/dtheta = -sin(theta)") {
    // Model: one block with W containing only the RY angle; beta = 0 turns
    // the block off, so instead use a pure backbone rotation.
    ResidualModel m;
    m.n_data = 1;
    m.backbone.depth = 1;
    m.backbone.layers = {LayerParams{{0.0, pi / 2, 0.0}}};
    ResidualBlock b;
    b.beta = 0.0;
    b.w_params = LayerParams::zeros(1);
    b.ancilla = 1;
    m.blocks.push_back(b);

    const std::vector<double> w{1.0};
    const auto res = adjoint_gradient(m, StateVector(1), w);
    CHECK(res.logits[0] == doctest::Approx(std::cos(pi / 2)));
    // slot 1 of the backbone triple is the RY angle
    CHECK(res.grads.backbone[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("all-beta-zero model: block angle gradients vanish exactly") {
    ResidualModel m =
        ResidualModel::random(3, 2, 1, 42, TaskKind::Binary, 0.0);
    StateVector in = random_state(3, 43);
    const std::vector<double> w{1.0};
    const auto res = adjoint_gradient(m, in, w);
    for (double g : res.grads.w_angles) {
        CHECK(g == 0.0);
    }
    for (double g : res.grads.beta) {
        CHECK(g == 0.0); // sign(0) convention makes beta = 0 stationary
    }
    // backbone gradients are generally nonzero
    double mx = 0.0;
    for (double g : res.grads.backbone) {
        mx = std::max(mx, std::abs(g));
    }
    CHECK(mx > 1e-6);
}

TEST_CASE("grad_beta: L=1, beta=1, W=Z gives df/dbeta = 2") {
    ResidualModel m;
    m.n_data = 1;
    ResidualBlock b;
    b.beta = 1.0;
    b.w_params = LayerParams{{pi, 0.0, 0.0}}; // RZ(pi): Z up to phase
    b.ancilla = 1;
    m.blocks.push_back(b);
    const std::vector<double> w{1.0};
    const auto g = grad_beta(m, StateVector(1), w);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("adjoint matches parameter shift to 1e-10 and FD to 1e-6") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const int n_data = 2 + static_cast<int>(seed % 3);
        const int n_blocks = 1 + static_cast<int>(seed % 2);
        const int depth = (seed % 4 == 0) ? 2 : 0;
        ResidualModel m = ResidualModel::random(n_data, n_blocks, depth,
                                                1000 + seed, TaskKind::Binary,
                                                0.6);
        m.blocks[0].beta = 0.9;
        if (n_blocks > 1) {
            m.blocks[1].beta = -0.5; // negative beta exercises the sign chain
        }
        StateVector in = random_state(n_data, 2000 + seed);
        const std::vector<double> w{1.0};

        const auto adj = adjoint_gradient(m, in, w);
        const auto shift = parameter_shift_gradient(m, in, w);
        const auto ga = gradient_as_flat(adj.grads);
        const auto gs = gradient_as_flat(shift.grads);
        REQUIRE(ga.size() == gs.size());
        for (std::size_t i = 0; i < ga.size(); ++i) {
            CHECK(close_rel(ga[i], gs[i], 1e-10));
        }

        const FlatModel fm{m};
        auto f = [&](std::span<const double> p) {
            return forward(fm.with(p), in)[0];
        };
        const auto flat = fm.flat();
        const auto fd = finite_difference(f, flat, 1e-5);
        for (std::size_t i = 0; i < fd.size(); ++i) {
            CHECK(close_rel(ga[i], fd[i], 1e-6));
        }
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("multiclass weighted-observable gradients match FD") {
    ResidualModel m =
        ResidualModel::random(3, 2, 1, 77, TaskKind::Multiclass, 0.7, 3);
    StateVector in = random_state(3, 78);
    const std::vector<double> w{0.3, -1.2, 0.5};

    const auto adj = adjoint_gradient(m, in, w);
    const FlatModel fm{m};
    auto f = [&](std::span<const double> p) {
        const auto logits = forward(fm.with(p), in);
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i] * logits[i];
        }
        return acc;
    };
    const auto fd = finite_difference(f, fm.flat(), 1e-5);
    const auto ga = gradient_as_flat(adj.grads);
    for (std::size_t i = 0; i < ga.size(); ++i) {
        CHECK(close_rel(ga[i], fd[i], 1e-6));
    }
}

TEST_CASE("parameter shift trivial identities") {
    // RY at theta=0 on |0>: extremum of cos, derivative 0.
    ResidualModel m;
    m.n_data = 1;
    m.backbone.depth = 1;
    m.backbone.layers = {LayerParams{{0.0, 0.0, 0.0}}};
    ResidualBlock b;
    b.beta = 0.0;
    b.w_params = LayerParams::zeros(1);
    b.ancilla = 1;
    m.blocks.push_back(b);
    const std::vector<double> w{1.0};
    CHECK(parameter_shift_slot(m, StateVector(1), w, 1) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // RZ on |0>: phase invisible to Z.
    CHECK(parameter_shift_slot(m, StateVector(1), w, 0) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // Out-of-range slot (beta is not an angle slot).
    CHECK_THROWS_AS(parameter_shift_slot(m, StateVector(1), w, 6),
                    InvalidInput);
}

TEST_CASE("scaling-term-only variant drops the theta chain") {
    ResidualModel m =
        ResidualModel::random(2, 2, 0, 5, TaskKind::Binary, 0.8);
    StateVector in = random_state(2, 6);
    const std::vector<double> w{1.0};
    const auto full = adjoint_gradient(m, in, w, true);
    const auto bare = adjoint_gradient(m, in, w, false);
    for (int l = 0; l < m.num_blocks(); ++l) {
        const double beta = m.blocks[l].beta;
        const double scaling_term =
            full.value * 2.0 * beta / (1.0 + beta * beta);
        CHECK(bare.grads.beta[l] == doctest::Approx(scaling_term));
        // full = scaling term + theta chain; theta slots start at 12 here
        // (no backbone, 2 blocks of 6 W angles each).
        const double chain = full.grads.beta[l] - bare.grads.beta[l];
        CHECK(chain == doctest::Approx(m.scale_factor() *
                                       full.slot_grads[12 + l] *
                                       dtheta_dbeta(beta))
                           .epsilon(1e-9));
    }
}

TEST_CASE("gradient smooth in beta away from 0") {
    ResidualModel m =
        ResidualModel::random(2, 1, 0, 9, TaskKind::Binary, 0.5);
    StateVector in = random_state(2, 10);
    const std::vector<double> w{1.0};
    for (double beta = -3.0; beta <= 3.0; beta += 0.25) {
        if (beta == 0.0) {
            continue;
        }
        m.blocks[0].beta = beta;
        const auto g = grad_beta(m, in, w);
        CHECK(std::isfinite(g[0]));
    }
}

TEST_CASE("Eq-10 structure: scaling gradient term per coordinate") {
    ResidualModel m =
        ResidualModel::random(2, 3, 0, 12, TaskKind::Binary, 0.0);
    m.blocks[0].beta = 0.4;
    m.blocks[1].beta = -1.2;
    m.blocks[2].beta = 0.9;
    StateVector in = random_state(2, 13);
    const std::vector<double> w{1.0};
    const auto bare = adjoint_gradient(m, in, w, false);
    const double f = bare.value;
    for (int l = 0; l < 3; ++l) {
        const double beta = m.blocks[l].beta;
        CHECK(bare.grads.beta[l] ==
              doctest::Approx(f * 2.0 * beta / (1.0 + beta * beta))
                  .epsilon(1e-12));
    }
}

TEST_CASE("input gradient: radial direction is annihilated") {
    ResidualModel m =
        ResidualModel::random(2, 1, 0, 20, TaskKind::Binary, 0.7);
    std::vector<double> x{0.3, 0.8, 0.1, 0.5};
    const std::vector<double> w{1.0};
    const auto g = input_gradient(m, x, 4, w);
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += g[i] * x[i];
    }
    CHECK(std::abs(dot) < 1e-12);
}

TEST_CASE("input gradient matches per-pixel finite differences") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        ResidualModel m = ResidualModel::random(
            4, 2, 0, 300 + seed, TaskKind::Binary, 0.8);
        std::mt19937_64 rng(400 + seed);
        std::uniform_real_distribution<double> unif(0.05, 1.0);
        std::vector<double> x(16);
        for (auto &v : x) {
            v = unif(rng);
        }
        const std::vector<double> w{1.0};
        const auto g = input_gradient(m, x, 16, w);

        auto f = [&](std::span<const double> p) {
            const PreprocessSpec prep{16};
            return forward(m, amplitude_encode(p, prep))[0];
        };
        const auto fd = finite_difference(f, x, 1e-5);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(close_rel(g[i], fd[i], 1e-5));
        }
    }
}

TEST_CASE("input gradient closed form for the identity circuit") {
    // beta = 0, no backbone: f = <Z_0> = sum_i s_i xhat_i^2 with s_i the
    // sign of bit 0; df/dx_k = 2 x_k (s_k - f) / ||x||^2.
    ResidualModel m =
        ResidualModel::random(3, 1, 0, 31, TaskKind::Binary, 0.0);
    std::vector<double> x{0.9, 0.2, 0.4, 0.7, 0.1, 0.6, 0.3, 0.5};
    const std::vector<double> w{1.0};
    const auto g = input_gradient(m, x, 8, w);

    double norm2 = 0.0, f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        norm2 += x[i] * x[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = (i & 1) ? -1.0 : 1.0;
        f += s * x[i] * x[i] / norm2;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = (k & 1) ? -1.0 : 1.0;
        CHECK(g[k] == doctest::Approx(2.0 * x[k] * (s - f) / norm2)
                          .epsilon(1e-10));
    }
}

TEST_CASE("input gradient rejects the zero vector") {
    ResidualModel m =
        ResidualModel::random(2, 1, 0, 1, TaskKind::Binary, 0.5);
    std::vector<double> x(4, 0.0);
    const std::vector<double> w{1.0};
    CHECK_THROWS_AS(input_gradient(m, x, 4, w), InvalidInput);
}

TEST_CASE("finite difference oracle sanity") {
    auto cosf = [](std::span<const double> p) { return std::cos(p[0]); };
    std::vector<double> at{0.0};
    const auto g0 = finite_difference(cosf, at, 1e-4);
    CHECK(std::abs(g0[0]) < 1e-7);

    auto poly = [](std::span<const double> p) {
        return 1.0 + p[0] * p[0];
    };
    std::vector<double> at2{2.0};
    const auto g2 = finite_difference(poly, at2, 1e-5);
    CHECK(g2[0] == doctest::Approx(4.0).epsilon(1e-8));

    CHECK_THROWS_AS(finite_difference(poly, at2, 1e-2), InvalidInput);
}

TEST_SUITE_END();
