#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "singheat/nonlinearity.hpp"
#include "singheat/quadrature.hpp"

using namespace singheat;

TEST_CASE("cutoff profile") {
    CHECK(chi(0.3) == 1.0);
    CHECK(chi(-1.0) == 1.0);
    CHECK(chi(2.0) == 0.0);
    CHECK(chi(-3.7) == 0.0);
    CHECK(chi(1.5) == doctest::Approx(0.5).epsilon(1e-15)); // midpoint of the bridge
    // evenness
    for (double t : {0.2, 1.1, 1.5, 1.9, 2.5}) CHECK(chi(t) == chi(-t));
    // t * chi'(t) <= 0
    for (double t = -2.5; t <= 2.5; t += 0.01) CHECK(t * chi_prime(t) <= 0.0);
    // chi' consistent with finite differences on the bridge
    for (double t : {1.2, 1.5, 1.8}) {
        const double fd = (chi(t + 1e-6) - chi(t - 1e-6)) / 2e-6;
        CHECK(chi_prime(t) == doctest::Approx(fd).epsilon(1e-8));
    }
    // C^1 joins
    CHECK(chi_prime(1.0) == 0.0);
    CHECK(chi_prime(2.0) == 0.0);
    CHECK(chi(1.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cutoff moment closed form vs quadrature") {
    CHECK(chi_moment(2.0) == doctest::Approx(8.0 / 7.0).epsilon(1e-15));
    CHECK(chi_moment(10.0) == doctest::Approx(8.0 / 7.0).epsilon(1e-15));
    for (double u : {0.4, 1.0, 1.3, 1.7, 1.95}) {
        auto q = integrate_adaptive([](double s) { return chi(s) * s; }, 0.0, u, 1e-14, 1e-13);
        CHECK(q.converged);
        CHECK(chi_moment(u) == doctest::Approx(q.value).epsilon(1e-12));
    }
}

TEST_CASE("f_m limits and values") {
    Nonlinearity n(3.0);
    // large-argument limit f_m(u) / (u(e^{u^2}-1)) -> 1
    CHECK(n.f(5.0) / (5.0 * std::expm1(25.0)) == doctest::Approx(1.0).epsilon(1e-9));
    // small-argument limit f_m(u) / (m u) -> -1
    CHECK(n.f(1e-5) / (3.0 * 1e-5) == doctest::Approx(-1.0).epsilon(1e-9));
    // stability for tiny s: s(e^{s^2}-1) ~ s^3
    CHECK(Nonlinearity::f0(1e-8) == doctest::Approx(1e-24).epsilon(1e-10));
    CHECK_THROWS_AS((void)Nonlinearity::f0(27.0), overflow_error);
}

TEST_CASE("potential F_m") {
    // F_m(2) = (e^4 - 5)/2 - m * 8/7
    for (double m : {0.0, 1.0, 7.5}) {
        Nonlinearity n(m);
        CHECK(n.F(2.0) ==
              doctest::Approx(24.7990750165721195 - m * 8.0 / 7.0).epsilon(1e-14));
        // F' = f (quadrature oracle)
        auto q = integrate_adaptive([&n](double s) { return n.f(s); }, 0.0, 1.7, 1e-14, 1e-13);
        CHECK(n.F(1.7) == doctest::Approx(q.value).epsilon(1e-11));
    }
}

TEST_CASE("G_m two routes agree and vanish only at zero") {
    for (double m : {0.0, 0.5, 4.0}) {
        Nonlinearity n(m);
        for (double u : {1e-3, 0.1, 0.5, 1.2, 1.7, 2.5, 4.0}) {
            const double a = n.G(u), b = n.G_series(u);
            CHECK(a == doctest::Approx(b).epsilon(1e-9));
            CHECK(b > 0.0); // G_m(u) = 0 iff u = 0
        }
        CHECK(n.G(0.0) == 0.0);
    }
    // G_0(0.1) ~ u^4/2 within 2%
    Nonlinearity n0(0.0);
    CHECK(n0.G(0.1) == doctest::Approx(5e-5).epsilon(0.02));
    CHECK(n0.G_series(0.1) == doctest::Approx(5.03345866736230e-5).epsilon(1e-12));
}

TEST_CASE("stable helpers") {
    CHECK(expm1m(1e-8) == doctest::Approx(5e-17).epsilon(1e-7));
    CHECK(expm1m(0.5) == doctest::Approx(std::exp(0.5) - 1.5).epsilon(1e-14));
    CHECK_THROWS_AS((void)expm1_sq(30.0), overflow_error);
}
