#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "starbm/rng.hpp"
#include "starbm/skorokhod.hpp"

using namespace starbm;

namespace {

// Random driver without negative jumps: linear wiggles plus occasional
// upward jumps at nodes.
CadlagPath random_driver(RngStream& r, std::size_t n, double dt) {
    std::vector<double> v(n);
    v[0] = (r.uniform() < 0.5) ? 0.0 : r.uniform();
    std::vector<std::pair<std::size_t, double>> jumps;
    for (std::size_t i = 1; i < n; ++i) {
        double next = v[i - 1] + std::sqrt(dt) * r.normal();
        if (r.uniform() < 0.02) {
            jumps.emplace_back(i, next);
            next += r.uniform();
        }
        v[i] = next;
    }
    CadlagPath w = CadlagPath::from_values(dt, std::move(v));
    for (auto [node, left] : jumps) w.add_jump(node, left);
    return w;
}

} // namespace

TEST_CASE("reflection of a zigzag, by hand", "[skorokhod]") {
    const CadlagPath w = CadlagPath::from_values(1.0, {0.0, -1.0, 1.0, -2.0});
    const ReflectResult r = reflect(w);
    CHECK(r.pushed == std::vector<double>{0.0, 1.0, 1.0, 2.0});
    CHECK(r.reflected.v == std::vector<double>{0.0, 0.0, 2.0, 0.0});
    CHECK(flux_integral(r, 1e-12) == 0.0);
}

TEST_CASE("upward jumps pass through reflection", "[skorokhod]") {
    CadlagPath w = CadlagPath::from_values(1.0, {0.0, -2.0, -1.0});
    w.add_jump(1, -3.0); // drifts to -3, jumps up to -2
    const ReflectResult r = reflect(w);
    CHECK(r.pushed_left[1] == 3.0);
    CHECK(r.pushed[1] == 3.0);
    CHECK(r.reflected.v[1] == 1.0);
    CHECK(r.reflected.left_value(1) == 0.0); // at the bottom when the jump fires
    CHECK(r.reflected.v[2] == 2.0);
    CHECK(flux_integral(r, 1e-12) == 0.0);
}

TEST_CASE("reflected path is nonnegative with exact flux identity", "[skorokhod]") {
    RngStream r({77}, "skorokhod-flux");
    for (int rep = 0; rep < 200; ++rep) {
        const CadlagPath w = random_driver(r, 400, 0.01);
        const ReflectResult res = reflect(w);
        double min_v = 0.0;
        for (double x : res.reflected.v) min_v = std::min(min_v, x);
        REQUIRE(min_v >= 0.0);
        REQUIRE(flux_integral(res, 1e-12) == 0.0);
        // pushing term only moves when the path is at the boundary
        for (std::size_t i = 1; i < w.nodes(); ++i)
            REQUIRE(res.pushed[i] >= res.pushed[i - 1]);
    }
}

TEST_CASE("generalized reflection with identity clock matches plain reflection", "[skorokhod]") {
    RngStream r({78}, "skorokhod-identity");
    const CadlagPath w = random_driver(r, 300, 0.01);
    const ReflectResult a = reflect(w);
    const ReflectResult b = generalized_reflect(w, MonotonePath::identity());
    for (std::size_t i = 0; i < w.nodes(); ++i) {
        REQUIRE(b.reflected.v[i] == a.reflected.v[i]);
        REQUIRE(b.pushed[i] == a.pushed[i]);
    }
}

TEST_CASE("a clock jump lifts the path off the boundary", "[skorokhod]") {
    // psi : slope 1, jump from 1 to 3 at clock-time 1
    MonotonePath psi;
    psi.t = {0.0, 1.0};
    psi.lv = {0.0, 1.0};
    psi.rv = {0.0, 3.0};
    psi.end_slope = 1.0;

    const CadlagPath w = CadlagPath::from_values(1.0, {0.0, -1.0, -2.0, -3.0, -4.0});
    const ReflectResult r = generalized_reflect(w, psi);
    CHECK(r.pushed == std::vector<double>{0.0, 1.0, 1.0, 1.0, 2.0});
    CHECK(r.reflected.v == std::vector<double>{0.0, 2.0, 1.0, 0.0, 0.0});
    // the psi jump is crossed while climbing into node 1: path jumps 0 -> 2
    REQUIRE(r.reflected.jump_node == std::vector<std::size_t>{1});
    CHECK(r.reflected.jump_left[0] == 0.0);
}

TEST_CASE("clock must start at zero", "[skorokhod]") {
    MonotonePath psi;
    psi.t = {0.0};
    psi.lv = {1.0};
    psi.rv = {1.0};
    psi.end_slope = 1.0;
    const CadlagPath w = CadlagPath::from_values(1.0, {0.0, -1.0});
    CHECK_THROWS_AS(generalized_reflect(w, psi), std::invalid_argument);
}
