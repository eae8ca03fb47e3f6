#include <catch2/catch_amalgamated.hpp>

#include <starbm/stats.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace starbm;

TEST_CASE("normal cdf reference values", "[stats]") {
    CHECK(normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    // Phi(1.96), Phi(-1.0): classical table values to full double precision.
    CHECK(normal_cdf(1.96) == Catch::Approx(0.9750021048517795).epsilon(1e-13));
    CHECK(normal_cdf(-1.0) == Catch::Approx(0.15865525393145705).epsilon(1e-13));
    CHECK(normal_cdf(6.0) > 0.999999999);
    CHECK(normal_cdf(-6.0) < 1e-9);
}

TEST_CASE("chi-square survival function against known quantiles", "[stats]") {
    // 95% quantiles: chi2(0.95; 1) = 3.841458820694124, chi2(0.95; 5) = 11.070497693516351
    CHECK(chi2_sf(3.841458820694124, 1) == Catch::Approx(0.05).epsilon(1e-10));
    CHECK(chi2_sf(11.070497693516351, 5) == Catch::Approx(0.05).epsilon(1e-10));
    // chi2_sf(k, k) is around 1/2 for moderate k and decreasing in x.
    CHECK(chi2_sf(2.0, 2) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(chi2_sf(10.0, 2) < chi2_sf(2.0, 2));
}

TEST_CASE("kolmogorov tail and two-sample distance", "[stats]") {
    // Q(t) for the Kolmogorov distribution: Q(0.5) ~ 0.9639452436648751,
    // Q(1.0) ~ 0.26999967167735456, Q(2.0) ~ 0.0006709252557797441.
    CHECK(kolmogorov_q(0.5) == Catch::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_q(1.0) == Catch::Approx(0.26999967167735456).epsilon(1e-12));
    CHECK(kolmogorov_q(2.0) == Catch::Approx(0.0006709252557797441).epsilon(1e-9));

    // Identical samples: D = 0, p = 1.
    std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    auto same = ks_two_sample(a, a);
    CHECK(same.d == 0.0);
    CHECK(same.p == 1.0);

    // Disjoint supports: D = 1.
    std::vector<double> b{10.0, 11.0, 12.0};
    CHECK(ks_two_sample(a, b).d == 1.0);

    // Same-law samples should rarely reject; different-law should.
    std::mt19937_64 gen(7);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> x(2000), y(2000), z(2000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = n01(gen);
        y[i] = n01(gen);
        z[i] = n01(gen) + 0.3;
    }
    CHECK(ks_two_sample(x, y).p > 0.01);
    CHECK(ks_two_sample(x, z).p < 1e-4);

    auto one = ks_one_sample(x, [](double v) { return normal_cdf(v); });
    CHECK(one.p > 0.01);
}

TEST_CASE("chi-square goodness of fit on counts", "[stats]") {
    // Fair die, 600 rolls, observed counts close to 100 each.
    std::vector<double> obs{95, 108, 92, 112, 99, 94};
    std::vector<double> expected(6, 100.0);
    double p = chi2_test(obs, expected);
    CHECK(p > 0.5);

    std::vector<double> skew{160, 60, 95, 105, 90, 90};
    CHECK(chi2_test(skew, expected) < 1e-6);
}

TEST_CASE("pairwise sum and moments", "[stats]") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
    double s = pairwise_sum(v);
    double ref = 0.0;
    for (double t : v) ref += t;
    CHECK(s == Catch::Approx(ref).epsilon(1e-13));

    std::vector<double> w{1.0, 2.0, 3.0, 4.0, 5.0};
    auto m = moments(w);
    CHECK(m.n == 5);
    CHECK(m.mean == Catch::Approx(3.0).epsilon(1e-15));
    CHECK(m.var == Catch::Approx(2.5).epsilon(1e-15));  // unbiased sample variance
    CHECK(m.se() == Catch::Approx(std::sqrt(2.5 / 5.0)).epsilon(1e-15));
}
