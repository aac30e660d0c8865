#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mscv/random_inputs.hpp"

using namespace mscv;

TEST_SUITE("random_inputs") {

TEST_CASE("same stream gives identical draws") {
    const auto a = draw_uniform({7, 3}, 3);
    const auto b = draw_uniform({7, 3}, 3);
    CHECK(a.values == b.values);
    CHECK(a.kind == SampleKind::iid);
    CHECK(a.weights.empty());
}

TEST_CASE("draws lie in [0,1) and have the uniform mean") {
    const auto s = draw_uniform({42, 0}, 10000);
    double m = 0;
    for (double z : s.values) {
        CHECK(z >= 0.0);
        CHECK(z < 1.0);
        m += z;
    }
    m /= 1e4;
    CHECK(std::abs(m - 0.5) < 3.0 / std::sqrt(12.0) * 1e-2);
}

TEST_CASE("distinct streams are uncorrelated") {
    const auto a = draw_uniform({42, stream_label(1, 0)}, 10000).values;
    const auto b = draw_uniform({42, stream_label(1, 1)}, 10000).values;
    double ma = 0, mb = 0;
    for (int i = 0; i < 10000; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= 1e4;
    mb /= 1e4;
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 10000; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.03);
    CHECK(a != b);
}

TEST_CASE("master seed changes the sequence") {
    CHECK(draw_uniform({1, 0}, 4).values != draw_uniform({2, 0}, 4).values);
}

TEST_CASE("empty request rejected") {
    CHECK_THROWS_WITH(draw_uniform({42, 0}, 0), "empty sample request");
}

TEST_CASE("one-node rule is the midpoint") {
    const auto q = gauss_legendre(1);
    REQUIRE(q.size() == 1);
    CHECK(q.values[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q.kind == SampleKind::quadrature);
}

TEST_CASE("two-node rule nodes and weights") {
    const auto q = gauss_legendre(2);
    const double d = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(std::abs(q.values[0] - (0.5 - d)) < 1e-15);
    CHECK(std::abs(q.values[1] - (0.5 + d)) < 1e-15);
    CHECK(std::abs(q.weights[0] - 0.5) < 1e-15);
    CHECK(std::abs(q.weights[1] - 0.5) < 1e-15);
    const double i2 = q.weights[0] * q.values[0] * q.values[0] + q.weights[1] * q.values[1] * q.values[1];
    CHECK(std::abs(i2 - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("n-node rule integrates monomials up to degree 2n-1") {
    for (int n : {1, 3, 8, 16, 32, 64}) {
        const auto q = gauss_legendre(n);
        CHECK(std::abs(std::accumulate(q.weights.begin(), q.weights.end(), 0.0) - 1.0) < 1e-12);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0;
            for (int k = 0; k < n; ++k) s += q.weights[k] * std::pow(q.values[k], d);
            CHECK(std::abs(s * (d + 1) - 1.0) < 1e-12);
        }
        for (int k = 0; k < n; ++k) {
            CHECK(q.values[k] > 0.0);
            CHECK(q.values[k] < 1.0);
            if (k > 0) CHECK(q.values[k] > q.values[k - 1]);
        }
    }
}

TEST_CASE("unsupported orders rejected") {
    CHECK_THROWS_WITH(gauss_legendre(0), "unsupported quadrature order");
    CHECK_THROWS_WITH(gauss_legendre(65), "unsupported quadrature order");
}

}  // TEST_SUITE
