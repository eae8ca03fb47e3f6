#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "starbm/rng.hpp"

using namespace starbm;

TEST_CASE("philox known-answer vectors", "[rng]") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(detail::philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(detail::philox4x32(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             A2{0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(detail::philox4x32(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             A2{0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are pure functions of their coordinates", "[rng]") {
    RngStream a({42}, "brownian", 7), b({42}, "brownian", 7);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    RngStream c({42}, "brownian", 8), d({42}, "jumps", 7), e({43}, "brownian", 7);
    RngStream ref({42}, "brownian", 7);
    bool all_same_c = true, all_same_d = true, all_same_e = true;
    for (int i = 0; i < 8; ++i) {
        const auto r = ref.next_u64();
        all_same_c &= (c.next_u64() == r);
        all_same_d &= (d.next_u64() == r);
        all_same_e &= (e.next_u64() == r);
    }
    CHECK_FALSE(all_same_c);
    CHECK_FALSE(all_same_d);
    CHECK_FALSE(all_same_e);
}

TEST_CASE("uniforms live strictly inside (0,1)", "[rng]") {
    RngStream s({1}, "uniform-range");
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal moments", "[rng]") {
    RngStream s({7}, "normal-moments");
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 0.01);
    CHECK(std::abs(m2 - 1.0) < 0.02);
    CHECK(std::abs(m4 - 3.0) < 0.12);
}

TEST_CASE("exponential with zero rate never fires", "[rng]") {
    RngStream s({3}, "exp");
    CHECK(std::isinf(s.exponential(0.0)));
    CHECK(std::isinf(s.exponential(-1.0)));
    double mean = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) mean += s.exponential(2.0);
    CHECK(std::abs(mean / n - 0.5) < 0.01);
}
