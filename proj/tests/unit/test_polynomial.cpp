#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "egfl/error.hpp"
#include "egfl/polynomial.hpp"

using namespace egfl;

TEST_CASE("roots of the line characteristic polynomial") {
    // oracle: quadratic formula for s^2 + 2*l*s + l^2 + w0^2, l = 1, w0 = 376.991
    double l = 1.0, w0 = 376.991;
    Polynomial p{l * l + w0 * w0, 2.0 * l, 1.0};
    auto r = poly_roots(p);
    REQUIRE(r.size() == 2);
    double disc = l * l - (l * l + w0 * w0);  // = -w0^2
    Complex expect(-l, std::sqrt(-disc));
    CHECK(std::abs(r[1] - expect) < 1e-9 * std::abs(expect));
    CHECK(std::abs(r[0] - std::conj(expect)) < 1e-9 * std::abs(expect));
}

TEST_CASE("monomial root") {
    auto r = poly_roots(Polynomial::s());
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0]) == 0.0);
}

TEST_CASE("constructed factorization (s+1)(s+2)(s+3)") {
    Polynomial p = Polynomial::linear(1.0) * Polynomial::linear(2.0) * Polynomial::linear(3.0);
    auto r = poly_roots(p);
    REQUIRE(r.size() == 3);
    CHECK(r[0].real() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(r[1].real() == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(r[2].real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zero polynomial has undefined roots") {
    CHECK_THROWS_AS(poly_roots(Polynomial{}), Error);
}

TEST_CASE("root round-trip up to degree 8") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(0.2, 50.0), ang(0.1, M_PI - 0.1);
    for (int trial = 0; trial < 40; ++trial) {
        int pairs = 1 + int(rng() % 4);  // degree 2..8
        Polynomial p{1.0};
        std::vector<Complex> expect;
        for (int k = 0; k < pairs; ++k) {
            double m = mag(rng), a = ang(rng);
            Complex root(-m * std::cos(a), m * std::sin(a));
            p = p * Polynomial{std::norm(root), -2.0 * root.real(), 1.0};
            expect.push_back(root);
        }
        auto got = poly_roots(p);
        // reconstruct the monic polynomial from the returned roots
        Polynomial q{1.0};
        for (size_t i = 0; i < got.size(); ++i) {
            if (got[i].imag() > 0.0) q = q * Polynomial{std::norm(got[i]), -2.0 * got[i].real(), 1.0};
        }
        REQUIRE(q.degree() == p.degree());
        for (int k = 0; k <= p.degree(); ++k) {
            CHECK(q[k] == doctest::Approx(p[k]).epsilon(1e-7));
        }
    }
}

TEST_CASE("origin root counting is exact") {
    Polynomial p = Polynomial::s() * Polynomial::s() * Polynomial::linear(3.0);
    CHECK(p.origin_root_count() == 2);
    CHECK(Polynomial{5.0}.origin_root_count() == 0);
}
