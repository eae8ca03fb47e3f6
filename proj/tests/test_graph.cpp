#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "starbm/graph.hpp"
#include "starbm/rng.hpp"

using namespace starbm;

namespace {

BoundaryParams walsh_params(std::vector<double> beta) {
    BoundaryParams p;
    p.beta = std::move(beta);
    p.measure = JumpMeasure::zero(static_cast<int>(p.beta.size()));
    return p;
}

JumpMeasure finite_measure_2(double mass0, double mass1) {
    JumpMeasure m = JumpMeasure::zero(2);
    if (mass0 > 0.0) m.edges[0].parts.push_back(TailComponent::exponential(mass0, 1.0));
    if (mass1 > 0.0) m.edges[1].parts.push_back(TailComponent::pareto(mass1, 2.0));
    return m;
}

} // namespace

TEST_CASE("graph points normalize the center", "[graph]") {
    CHECK(GraphPoint::edge_at(1, 0.0) == GraphPoint::center());
    CHECK(GraphPoint::edge_at(0, 0.5).kind == GraphPoint::Kind::Edge);
    CHECK_THROWS_AS(GraphPoint::edge_at(0, -1.0), std::invalid_argument);
    CHECK(std::isinf(GraphPoint::infinity(2).x));
    CHECK_THROWS_AS(StarGraph(0), std::invalid_argument);
}

TEST_CASE("validation statuses", "[graph]") {
    SECTION("Walsh-type parameters are ok") {
        const auto r = validate_params(walsh_params({0.5, 0.5}));
        CHECK(r.status == ParamStatus::Ok);
        CHECK(r.transient_edges.empty());
    }
    SECTION("zero alpha and beta with finite nonzero measure: analytic only") {
        BoundaryParams p = walsh_params({0.0, 0.0});
        p.gamma = 1.0;
        p.measure = finite_measure_2(0.6, 0.4);
        const auto r = validate_params(p);
        CHECK(r.status == ParamStatus::AnalyticOnly);
    }
    SECTION("no boundary terms at all: invalid") {
        const auto r = validate_params(walsh_params({0.0, 0.0}));
        CHECK(r.status == ParamStatus::Invalid);
    }
    SECTION("negative parameters: invalid") {
        BoundaryParams p = walsh_params({0.5, -0.5});
        CHECK(validate_params(p).status == ParamStatus::Invalid);
        BoundaryParams q = walsh_params({0.5, 0.5});
        q.alpha = -1.0;
        CHECK(validate_params(q).status == ParamStatus::Invalid);
    }
    SECTION("zero-weight edge with finite mass is flagged transient") {
        BoundaryParams p = walsh_params({1.0, 0.0});
        p.measure = finite_measure_2(0.0, 0.3);
        const auto r = validate_params(p);
        CHECK(r.status == ParamStatus::Ok);
        CHECK(r.transient_edges == std::vector<int>{1});
    }
    SECTION("zero-weight edge with infinite mass is fully recurrent") {
        BoundaryParams p = walsh_params({1.0, 0.0});
        p.measure.edges[1].parts.push_back(TailComponent::stable_like(0.5, 0.5));
        const auto r = validate_params(p);
        CHECK(r.status == ParamStatus::Ok);
        CHECK(r.transient_edges.empty());
    }
    SECTION("pure-jump boundary with infinite measure is admissible") {
        BoundaryParams p = walsh_params({0.0, 0.0});
        p.measure.edges[0].parts.push_back(TailComponent::stable_like(0.5, 0.5));
        p.measure.edges[1].parts.push_back(TailComponent::stable_like(0.5, 0.5));
        CHECK(validate_params(p).status == ParamStatus::Ok);
    }
}

TEST_CASE("normalization scales every parameter by the weight sum", "[graph]") {
    BoundaryParams p;
    p.alpha = 2.0;
    p.beta = {1.0, 1.0};
    p.gamma = 4.0;
    p.measure = finite_measure_2(1.2, 0.8); // total mass 2

    const BoundaryParams q = normalize_params(p);
    CHECK(q.alpha == 1.0);
    CHECK(q.beta == std::vector<double>{0.5, 0.5});
    CHECK(q.gamma == 2.0);
    CHECK(q.measure.total() == Catch::Approx(1.0).epsilon(1e-14));

    // idempotence
    const BoundaryParams qq = normalize_params(q);
    CHECK(qq.alpha == q.alpha);
    CHECK(qq.beta == q.beta);
    CHECK(qq.gamma == q.gamma);

    BoundaryParams already = walsh_params({0.3, 0.7});
    const BoundaryParams same = normalize_params(already);
    CHECK(same.beta == already.beta);

    CHECK_THROWS_AS(normalize_params(walsh_params({0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("lumping sums weights and concatenates measures", "[graph]") {
    BoundaryParams p = walsh_params({0.2, 0.3, 0.5});
    p.alpha = 0.7;
    p.gamma = 0.1;
    const BoundaryParams q = lump_map(p, {0, 0, 1}, 2);
    CHECK(q.beta == std::vector<double>{0.5, 0.5});
    CHECK(q.alpha == 0.7);
    CHECK(q.gamma == 0.1);

    const BoundaryParams same = lump_map(p, {0, 1, 2}, 3);
    CHECK(same.beta == p.beta);

    CHECK_THROWS_AS(lump_map(p, {0, 0, 0}, 2), std::invalid_argument); // not surjective
}

TEST_CASE("lumping composes and preserves image-measure tails", "[graph]") {
    BoundaryParams p = walsh_params({0.1, 0.2, 0.3, 0.4});
    p.measure.edges[0].parts.push_back(TailComponent::exponential(0.4, 1.0));
    p.measure.edges[1].parts.push_back(TailComponent::pareto(0.6, 1.5));
    p.measure.edges[2].parts.push_back(TailComponent::exponential(0.5, 2.0));

    const BoundaryParams one_step = lump_map(p, {0, 0, 1, 1}, 2);
    const BoundaryParams two_step = lump_map(lump_map(p, {0, 0, 1, 2}, 3), {0, 1, 1}, 2);
    CHECK(one_step.beta == two_step.beta);
    for (int e = 0; e < 2; ++e) {
        for (double x : {0.01, 0.3, 1.0, 4.0}) {
            const double a = one_step.measure.edges[static_cast<std::size_t>(e)].value(x);
            const double b = two_step.measure.edges[static_cast<std::size_t>(e)].value(x);
            REQUIRE(a == b);
        }
    }

    // image tail equals the sum of the source tails, checked pointwise and
    // through the near-zero integral
    const auto& lumped = one_step.measure.edges[0];
    const auto& s0 = p.measure.edges[0];
    const auto& s1 = p.measure.edges[1];
    for (double x : {0.05, 0.5, 2.0}) REQUIRE(lumped.value(x) == s0.value(x) + s1.value(x));
    CHECK(lumped.integral_01() == Catch::Approx(s0.integral_01() + s1.integral_01()).epsilon(1e-14));
}

TEST_CASE("tail kinds: values, inverses, certificates", "[graph]") {
    const auto exp_tail = TailComponent::exponential(2.0, 3.0);
    CHECK(exp_tail.value(0.5) == Catch::Approx(2.0 * std::exp(-1.5)));
    CHECK(exp_tail.inverse(1.0) == Catch::Approx(std::log(2.0) / 3.0));
    CHECK(exp_tail.integral_01() == Catch::Approx(2.0 * (1.0 - std::exp(-3.0)) / 3.0));
    CHECK(exp_tail.finite());

    const auto par = TailComponent::pareto(1.0, 2.0);
    CHECK(par.value(1.0) == Catch::Approx(0.25));
    CHECK(par.inverse(0.25) == Catch::Approx(1.0));
    CHECK(par.integral_01() == Catch::Approx(0.5)); // ∫₀¹(1+x)⁻² = 1/2

    const auto stab = TailComponent::stable_like(0.25, 0.3);
    CHECK_FALSE(stab.finite());
    CHECK(std::isinf(stab.total()));
    for (double x : {1.0, 0.1, 0.01, 0.001}) CHECK(std::isfinite(stab.value(x)));
    CHECK(stab.integral_01() == Catch::Approx(0.25 / 0.7));
    CHECK(stab.inverse(stab.value(0.37)) == Catch::Approx(0.37));
    CHECK_THROWS_AS(TailComponent::stable_like(1.0, 1.2), std::invalid_argument);
}

TEST_CASE("tabulated tails carry atoms", "[graph]") {
    // single atom of mass 0.8 at x = 1.5
    const auto atom = TailComponent::tabulated({1.5}, {0.8}, {0.0});
    CHECK(atom.value(1.0) == 0.8);
    CHECK(atom.value(1.5) == 0.0);
    CHECK(atom.value(2.0) == 0.0);
    CHECK(atom.total() == 0.8);
    CHECK(atom.integral_01() == Catch::Approx(0.8));
    // every sampling level inside the atom maps to the atom location
    CHECK(atom.inverse(0.1) == 1.5);
    CHECK(atom.inverse(0.79) == 1.5);
    CHECK(atom.inverse(0.9) == 0.0);

    // atom at 0.5 plus a linear ramp to zero at 2
    const auto mixed = TailComponent::tabulated({0.5, 2.0}, {1.0, 0.0}, {0.6, 0.0});
    CHECK(mixed.value(0.25) == 1.0);
    CHECK(mixed.value(0.5) == 0.6);
    CHECK(mixed.value(1.25) == Catch::Approx(0.3));
    CHECK(mixed.inverse(0.3) == Catch::Approx(1.25));
    CHECK(mixed.inverse(0.8) == 0.5);
    CHECK(mixed.integral_01() == Catch::Approx(0.75));

    CHECK_THROWS_AS(TailComponent::tabulated({1.0}, {0.5}, {0.1}), std::invalid_argument);
}

TEST_CASE("mixture inverse brackets the exact level", "[graph]") {
    EdgeTail mix;
    mix.parts.push_back(TailComponent::exponential(1.0, 2.0));
    mix.parts.push_back(TailComponent::pareto(0.5, 1.5));
    RngStream r({5}, "mixture-inverse");
    for (int i = 0; i < 200; ++i) {
        const double n = r.uniform() * mix.total();
        const double x = mix.inverse(n);
        REQUIRE(mix.value(x) <= n * (1.0 + 1e-10) + 1e-14);
        if (x > 1e-12) REQUIRE(mix.value(x * (1.0 - 1e-9)) >= n * (1.0 - 1e-10));
    }
}
