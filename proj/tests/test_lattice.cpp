#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cnav/lattice.hpp"
#include "cnav/rng.hpp"
#include "support/brute_force.hpp"

using namespace cnav;

namespace {

long expected_edges(int im, int jm) {
    return static_cast<long>(im) * (jm - 1) + static_cast<long>(jm) * (im - 1) +
           2L * (im - 1) * (jm - 1);
}

}  // namespace

TEST_CASE("lattice construction") {
    CHECK_THROWS_AS(LatticeGraph({1, 5}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGraph({0, 0}), std::invalid_argument);

    const LatticeGraph g22({2, 2});
    CHECK(g22.vertex_count() == 4);
    CHECK(g22.edge_count() == 6);
    int horiz = 0, vert = 0, diag = 0;
    for (const auto& e : g22.edges()) {
        const GridPoint a = g22.point(e.a), b = g22.point(e.b);
        if (a.j == b.j) ++horiz;
        else if (a.i == b.i) ++vert;
        else ++diag;
        CHECK(e.len == (a.i != b.i && a.j != b.j ? std::sqrt(2.0) : 1.0));
    }
    CHECK(horiz == 2);
    CHECK(vert == 2);
    CHECK(diag == 2);

    CHECK(LatticeGraph({22, 14}).vertex_count() == 308);
    const LatticeGraph big({100, 100});
    CHECK(big.vertex_count() == 10000);
    CHECK(big.edge_count() == 39402);

    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
        const int im = 2 + static_cast<int>(rng.uniform_int(7));
        const int jm = 2 + static_cast<int>(rng.uniform_int(7));
        CHECK(LatticeGraph({im, jm}).edge_count() == expected_edges(im, jm));
    }
}

TEST_CASE("shortest_walk basics on a 3x3 lattice") {
    const LatticeGraph g({3, 3});
    WeightMap wm(g);
    auto r = shortest_walk(g, wm, {1, 1}, {3, 3});
    REQUIRE(r.reachable);
    CHECK(r.path.total_weight == Catch::Approx(2.0 * std::sqrt(2.0)));

    // Block every edge incident to the center vertex.
    WeightMap blocked(g);
    const int center = g.vertex_id({2, 2});
    for (int e = 0; e < g.edge_count(); ++e)
        if (g.edges()[e].a == center || g.edges()[e].b == center) blocked.blocked[e] = 1;
    r = shortest_walk(g, blocked, {1, 1}, {3, 3});
    REQUIRE(r.reachable);
    CHECK(r.path.total_weight == Catch::Approx(2.0 + std::sqrt(2.0)));

    r = shortest_walk(g, wm, {2, 2}, {2, 2});
    REQUIRE(r.reachable);
    CHECK(r.path.total_weight == 0.0);
    CHECK(r.path.vertices.size() == 1);
}

TEST_CASE("unreachable target is reported, not faked") {
    const LatticeGraph g({3, 3});
    WeightMap wm(g);
    const int t = g.vertex_id({3, 3});
    for (int e = 0; e < g.edge_count(); ++e)
        if (g.edges()[e].a == t || g.edges()[e].b == t) wm.blocked[e] = 1;
    const auto r = shortest_walk(g, wm, {1, 1}, {3, 3});
    CHECK_FALSE(r.reachable);
}

TEST_CASE("shortest_walk matches exhaustive enumeration on random lattices") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int im = 2 + static_cast<int>(rng.uniform_int(4));
        const int jm = 2 + static_cast<int>(rng.uniform_int(4));
        const LatticeGraph g({im, jm});
        WeightMap wm(g);
        for (int e = 0; e < g.edge_count(); ++e) {
            wm.weight[e] = rng.uniform(0.1, 10.0);
            if (rng.uniform() < 0.1) wm.blocked[e] = 1;
        }
        const GridPoint s{1, 1}, t{im, jm};
        const double oracle = testsup::brute_force_shortest(g, wm, s, t);
        const auto r = shortest_walk(g, wm, s, t);
        if (std::isinf(oracle)) {
            CHECK_FALSE(r.reachable);
        } else {
            REQUIRE(r.reachable);
            CHECK(r.path.total_weight == Catch::Approx(oracle).margin(1e-12));
        }
    }
}

TEST_CASE("raising one edge weight never shortens the optimum") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const LatticeGraph g({4, 4});
        WeightMap wm(g);
        for (int e = 0; e < g.edge_count(); ++e) wm.weight[e] = rng.uniform(0.5, 5.0);
        const auto before = shortest_walk(g, wm, {1, 1}, {4, 4});
        WeightMap bumped = wm;
        const int e = static_cast<int>(rng.uniform_int(g.edge_count()));
        bumped.weight[e] += rng.uniform(0.0, 5.0);
        const auto after = shortest_walk(g, bumped, {1, 1}, {4, 4});
        CHECK(after.path.total_weight >= before.path.total_weight - 1e-12);
    }
}

TEST_CASE("shortest_walk totals are symmetric in s and t") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const LatticeGraph g({5, 4});
        WeightMap wm(g);
        for (int e = 0; e < g.edge_count(); ++e) wm.weight[e] = rng.uniform(0.5, 5.0);
        const GridPoint s{1 + static_cast<int>(rng.uniform_int(5)),
                          1 + static_cast<int>(rng.uniform_int(4))};
        const GridPoint t{1 + static_cast<int>(rng.uniform_int(5)),
                          1 + static_cast<int>(rng.uniform_int(4))};
        const auto fwd = shortest_walk(g, wm, s, t);
        const auto bwd = shortest_walk(g, wm, t, s);
        CHECK(fwd.path.total_weight == Catch::Approx(bwd.path.total_weight).margin(1e-12));
    }
}

TEST_CASE("ties break toward the lexicographically smallest vertex sequence") {
    // With every edge costing 1, (1,1)->(3,1) has two-step optima through
    // (2,1) and through (2,2); the reconstruction must take the smaller
    // vertex id, (2,1).
    const LatticeGraph g({3, 2});
    WeightMap wm(g);
    for (auto& w : wm.weight) w = 1.0;
    const auto r = shortest_walk(g, wm, {1, 1}, {3, 1});
    REQUIRE(r.reachable);
    CHECK(r.path.total_weight == Catch::Approx(2.0));
    REQUIRE(r.path.vertices.size() == 3);
    CHECK(g.point(r.path.vertices[1]) == GridPoint{2, 1});
}
