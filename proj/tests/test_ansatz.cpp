#include <doctest.h>

#include "helpers.hpp"
#include "qres/ansatz.hpp"

using namespace qres;

TEST_SUITE_BEGIN("ansatz");

TEST_CASE("layer gate layout: rotations then ring CNOTs") {
    const AnsatzSpec spec{10};
    const auto layer = build_w_layer(spec, LayerParams::zeros(10));
    CHECK(layer.size() == 40); // 30 rotations + 10 CNOTs
    for (int j = 0; j < 10; ++j) {
        CHECK(layer[3 * j + 0].kind == GateKind::RZ);
        CHECK(layer[3 * j + 1].kind == GateKind::RY);
        CHECK(layer[3 * j + 2].kind == GateKind::RZ);
        CHECK(layer[3 * j].target == j);
    }
    for (int j = 0; j < 10; ++j) {
        const auto &cnot = layer[30 + j];
        CHECK(cnot.kind == GateKind::CNOT);
        CHECK(cnot.control == j);
        CHECK(cnot.target == (j + 1) % 10);
    }
}

TEST_CASE("ring degenerates: one CNOT at n=2, none at n=1") {
    CHECK(build_w_layer(AnsatzSpec{1}, LayerParams::zeros(1)).size() == 3);
    const auto two = build_w_layer(AnsatzSpec{2}, LayerParams::zeros(2));
    CHECK(two.size() == 7); // 6 rotations + 1 CNOT
    CHECK(two.back().kind == GateKind::CNOT);
}

TEST_CASE("zero angles reduce the layer to the entangler product") {
    const AnsatzSpec spec{3};
    const auto layer = build_w_layer(spec, LayerParams::zeros(3));
    std::vector<GateOp> ring{GateOp::cnot(0, 1), GateOp::cnot(1, 2),
                             GateOp::cnot(2, 0)};
    const auto u = qres::test::dense_oracle(layer, 3);
    const auto v = qres::test::dense_oracle(ring, 3);
    CHECK((u - v).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("layer unitarity via dense oracle") {
    for (int n : {1, 2, 4, 6}) {
        const auto layer =
            build_w_layer(AnsatzSpec{n}, LayerParams::random_uniform(n, 5 + n));
        const auto u = dense_unitary_of(layer, n);
        const Eigen::Index dim = Eigen::Index{1} << n;
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("parameter count mismatch is rejected") {
    CHECK_THROWS_AS(build_w_layer(AnsatzSpec{3}, LayerParams::zeros(2)),
                    InvalidInput);
}

TEST_CASE("backbone concatenation sizes") {
    const AnsatzSpec spec{10};
    CHECK(build_qvc(QvcBackbone{}, spec).empty());

    const auto b30 = QvcBackbone::random_uniform(10, 30, 42);
    CHECK(build_qvc(b30, spec).size() == 1200);
    const auto b200 = QvcBackbone::random_uniform(10, 200, 42);
    CHECK(build_qvc(b200, spec).size() == 8000);
}

TEST_CASE("published gate totals") {
    CHECK(count_gates(10, 5, 0).total() == 200);
    CHECK(count_gates(10, 5, 0).rotations == 150);
    CHECK(count_gates(10, 5, 0).cnots == 50);
    CHECK(count_gates(10, 0, 30).total() == 1200);
    CHECK(count_gates(10, 5, 30).total() == 1400);
    CHECK(count_gates(10, 0, 200).total() == 8000);
    CHECK(count_gates(1, 1, 0).total() == 3);
}

TEST_CASE("every angle maps to exactly one gate") {
    const int n = 4;
    const auto params = LayerParams::random_uniform(n, 99);
    const auto layer = build_w_layer(AnsatzSpec{n}, params);
    std::vector<int> used(params.angles.size(), 0);
    for (const auto &g : layer) {
        if (g.kind == GateKind::CNOT) {
            continue;
        }
        for (std::size_t k = 0; k < params.angles.size(); ++k) {
            if (g.angle == params.angles[k]) {
                ++used[k];
            }
        }
    }
    for (int u : used) {
        CHECK(u == 1);
    }
}

TEST_SUITE_END();
