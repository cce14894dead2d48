#include <doctest.h>

#include <cmath>
#include <random>

#include "egfl/error.hpp"
#include "egfl/ratfun.hpp"

using namespace egfl;

namespace {

RatFun random_stable(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.3, 30.0);
    RatFun r = RatFun::constant(u(rng));
    int nz = int(rng() % 2), np = 1 + int(rng() % 2);
    for (int i = 0; i < nz; ++i) r = r * RatFun(Polynomial::linear(u(rng)), Polynomial{1.0});
    for (int i = 0; i < np; ++i) r = r * RatFun(Polynomial{1.0}, Polynomial::linear(u(rng)));
    return r;
}

}  // namespace

TEST_CASE("additive inverse collapses to zero") {
    RatFun a(Polynomial{1.0, 2.0}, Polynomial{3.0, 1.0, 1.0});
    RatFun z = a + a.scaled(-1.0);
    CHECK(z.is_zero());
}

TEST_CASE("multiplicative inverse collapses to one") {
    RatFun a(Polynomial{1.0, 2.0}, Polynomial{3.0, 1.0, 1.0});
    RatFun one = a * a.inverse();
    CHECK(one.num().degree() == 0);
    CHECK(one.den().degree() == 0);
    CHECK(one.num()[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sensitivity of zero gain is one") {
    RatFun gl(Polynomial{1.0, 1.0}, Polynomial{2.0, 1.0, 1.0});
    RatFun s = (RatFun::one() + gl * RatFun()).inverse();
    CHECK(s.num().degree() == 0);
    CHECK(s.den().degree() == 0);
    CHECK(s.num()[0] == doctest::Approx(1.0));
}

TEST_CASE("S + T stays exactly one through the shared-factor path") {
    RatFun gl(Polynomial{1.0, 1.0}, Polynomial{142123.0, 2.0, 1.0});
    RatFun k = RatFun::from_factors(55.0, {Polynomial::linear(10.0)},
                                    {Polynomial::s(), Polynomial::linear(400.0)});
    RatFun l = gl * k;
    RatFun s = (RatFun::one() + l).inverse();
    RatFun t = l * s;
    RatFun sum = s + t;
    REQUIRE(sum.num().degree() == 0);
    REQUIRE(sum.den().degree() == 0);
    CHECK(sum.num()[0] == 1.0);  // exact by construction
}

TEST_CASE("freq_eval basics") {
    CHECK(std::abs(freq_eval(RatFun::one(), 123.0) - Complex(1.0, 0.0)) == 0.0);
    RatFun integrator(Polynomial{1.0}, Polynomial::s());
    Complex v = freq_eval(integrator, 2.0);
    CHECK(std::abs(v - Complex(0.0, -0.5)) < 1e-15);
    CHECK_THROWS_AS(freq_eval(integrator, 0.0), Error);  // on-axis pole
}

TEST_CASE("freq_eval respects the arithmetic homomorphism") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        RatFun a = random_stable(rng), b = random_stable(rng);
        RatFun ab = a * b;
        std::uniform_real_distribution<double> logw(-1.0, 5.0);
        for (int i = 0; i < 20; ++i) {
            double w = std::pow(10.0, logw(rng));
            Complex lhs = freq_eval(ab, w);
            Complex rhs = freq_eval(a, w) * freq_eval(b, w);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
        }
    }
}

TEST_CASE("hurwitz classification") {
    RatFun stable(Polynomial{1.0}, Polynomial::linear(2.0));
    CHECK(is_hurwitz(stable).hurwitz);
    RatFun rhp(Polynomial{1.0}, Polynomial{-1.0, 1.0});  // 1/(s-1)
    CHECK_FALSE(is_hurwitz(rhp).hurwitz);
    RatFun marginal(Polynomial{1.0}, Polynomial::s());  // 1/s
    CHECK_FALSE(is_hurwitz(marginal).hurwitz);
}

TEST_CASE("hurwitz of a product without cancellation") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        RatFun a = random_stable(rng), b = random_stable(rng);
        bool lhs = is_hurwitz(a * b).hurwitz;
        bool rhs = is_hurwitz(a).hurwitz && is_hurwitz(b).hurwitz;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("division by zero rational throws") {
    RatFun a(Polynomial{1.0}, Polynomial::linear(1.0));
    CHECK_THROWS_AS(a / RatFun(), Error);
}

TEST_CASE("sigma_max closed form") {
    Mat2 id = Mat2::identity();
    CHECK(sigma_max(id) == doctest::Approx(1.0));

    Mat2 diag;
    diag.e[0][0] = Complex(3.0, 0.0);
    diag.e[1][1] = Complex(0.0, 4.0);
    CHECK(sigma_max(diag) == doctest::Approx(4.0));

    // scaled-rotation form [[a, b], [-b, a]] with real a, b
    Mat2 rot;
    rot.e[0][0] = rot.e[1][1] = Complex(2.0, 0.0);
    rot.e[0][1] = Complex(1.5, 0.0);
    rot.e[1][0] = Complex(-1.5, 0.0);
    CHECK(sigma_max(rot) == doctest::Approx(std::hypot(2.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("sigma_max dominates random unit vectors") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat2 m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) m.e[r][c] = Complex(g(rng), g(rng));
    double smax = sigma_max(m);
    double best = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Complex x0(g(rng), g(rng)), x1(g(rng), g(rng));
        double n = std::sqrt(std::norm(x0) + std::norm(x1));
        x0 /= n;
        x1 /= n;
        Complex y0 = m.e[0][0] * x0 + m.e[0][1] * x1;
        Complex y1 = m.e[1][0] * x0 + m.e[1][1] * x1;
        best = std::max(best, std::sqrt(std::norm(y0) + std::norm(y1)));
    }
    CHECK(best <= smax + 1e-9);
    CHECK(best > 0.95 * smax);  // the sample should come close
}

TEST_CASE("default grid shape") {
    FreqGrid g = FreqGrid::standard();
    CHECK(g.size() == 2000);
    CHECK(g[0] == doctest::Approx(1e-1));
    CHECK(g[g.size() - 1] == doctest::Approx(1e6));
    CHECK_THROWS_AS(FreqGrid({2.0, 1.0}), Error);
}
