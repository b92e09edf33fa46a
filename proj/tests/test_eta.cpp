#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "singheat/errors.hpp"
#include "singheat/eta.hpp"
#include "singheat/nonlinearity.hpp"

using namespace singheat;

TEST_CASE("leading profile and kernel spot values") {
    CHECK(phi_leading(100.0) == doctest::Approx(9.52836080488264347).epsilon(1e-14));
    const double e2 = std::exp(2.0);
    CHECK(phi_leading(e2) == doctest::Approx(1.84093891776198002).epsilon(1e-14));
    // derivative vs finite differences
    for (double rho : {20.0, 100.0, 1000.0}) {
        const double fd = (phi_leading(rho + 1e-5) - phi_leading(rho - 1e-5)) / 2e-5;
        CHECK(phi_leading_deriv(rho) == doctest::Approx(fd).epsilon(1e-8));
        const double fd2 = (phi_leading_deriv(rho + 1e-4) - phi_leading_deriv(rho - 1e-4)) / 2e-4;
        CHECK(phi_leading_dd(rho) == doctest::Approx(fd2).epsilon(1e-6));
    }
    CHECK(eq_kernel(100.0, 200.0) == doctest::Approx(4.90682483014491764).epsilon(1e-13));
    CHECK(eq_kernel(150.0, 150.0) == 0.0);
}

TEST_CASE("forcing asymptotics") {
    // f(rho) * rho^{5/2} / log rho -> -1 + 2/log rho; spot value at 1e6
    const double rho = 1e6;
    const double scaled = forcing(rho) * std::pow(rho, 2.5) / std::log(rho);
    CHECK(scaled == doctest::Approx(-0.855258876840036).epsilon(1e-10));
    CHECK(std::fabs(scaled - (-1.0 + 2.0 / std::log(rho))) < 1e-4);
    // |f| <= 3 rho^{-5/2} log rho on a sweep
    for (double r = 50.0; r < 1e7; r *= 3.0)
        CHECK(std::fabs(forcing(r)) <= 3.0 * std::pow(r, -2.5) * std::log(r));
    // leading coefficient of phi^{-3} - rho^{-3/2} is 3 (within 10% at 1e6)
    const double p = phi_leading(rho);
    const double lead = (std::pow(p, -3.0) - std::pow(rho, -1.5)) * std::pow(rho, 2.5) / std::log(rho);
    CHECK(lead == doctest::Approx(3.0).epsilon(0.10));
}

TEST_CASE("g-term Lipschitz envelopes") {
    // |g_i(rho, eta1) - g_i(rho, eta2)| <= c * env_i(rho) * |eta1 - eta2|
    // env: g1,g7 ~ rho^-2; g2,g4,g6 ~ rho^-2 log rho; g3,g5 ~ rho^-3 log rho
    const double c = 3.0;
    for (double rho : {1e3, 1e4}) {
        const double ball = 2.0 * 0.5 * std::pow(rho, -1.5) * std::log(rho); // ~2C* envelope
        const double l2 = std::pow(rho, -2.0), l2l = l2 * std::log(rho),
                     l3l = std::pow(rho, -3.0) * std::log(rho);
        const double envs[7] = {l2, l2l, l3l, l2l, l3l, l2l, l2};
        for (double e1 : {-ball, -0.3 * ball, 0.2 * ball, ball}) {
            const double e2 = 0.45 * ball;
            auto ga = g_terms(rho, e1, true), gb = g_terms(rho, e2, true);
            for (int i = 0; i < 7; ++i)
                CHECK(std::fabs(ga[i] - gb[i]) <= c * envs[i] * std::fabs(e1 - e2));
        }
    }
}

TEST_CASE("eta equation algebraic identity") {
    // For arbitrary (rho, eta), eta'' := -(1/(2rho)+3/(16rho^2)) eta - F(rho,eta)
    // must reproduce the Emden-Fowler equation -y'' = e^{-rho}/4 y (e^{y^2}-1).
    for (auto [rho, e] : std::vector<std::pair<double, double>>{
             {30.0, 0.01}, {100.0, -0.003}, {300.0, 0.3}, {1000.0, 1e-4}}) {
        const double y = phi_leading(rho) + e;
        const double edd = -(0.5 / rho + 3.0 / (16.0 * rho * rho)) * e - rhs_total(rho, e);
        const double w = (2.0 * phi_leading(rho) + e) * e;
        const double nl = 0.25 * y * (std::exp(w) / (rho * rho) - std::exp(-rho));
        const double res = phi_leading_dd(rho) + edd + nl;
        CHECK(std::fabs(res) < 1e-6 * std::pow(rho, -2.5) * std::log(rho));
    }
}

TEST_CASE("oscillatory model integral (lem-sin)") {
    for (double sigma : {1.5, 2.0, 2.5}) {
        auto r = oracle_lem_sin(sigma, 1e4, true);
        CHECK(r.numeric / r.leading == doctest::Approx(1.0).epsilon(0.05));
        auto r0 = oracle_lem_sin(sigma, 1e4, false);
        CHECK(r0.numeric / r0.leading == doctest::Approx(1.0).epsilon(0.05));
    }
}

namespace {
EtaSolution& default_solution() {
    static EtaSolution sol = solve_eta(EtaConfig{});
    return sol;
}
} // namespace

TEST_CASE("fixed point: contraction, ball, residual") {
    const EtaSolution& sol = default_solution();
    CHECK(sol.contraction_factor <= 0.5);
    CHECK(sol.contraction_bound <= 0.5);
    CHECK(sol.weighted_norm <= 2.0 * sol.cstar);
    CHECK(sol.tail_budget < sol.cfg.fp_tol / 10.0);

    // decay envelope |eta| <= 2 C* rho^{-3/2} log rho on the whole grid
    for (size_t i = 0; i < sol.rho.size(); ++i)
        CHECK(std::fabs(sol.eta[i]) <=
              2.0 * sol.cstar * std::pow(sol.rho[i], -1.5) * std::log(sol.rho[i]));

    // Emden-Fowler residual on [2 lambda, 10 lambda] with eta'' from the
    // differentiated integral equation
    for (double rho = 2.0 * sol.cfg.lambda; rho <= 10.0 * sol.cfg.lambda; rho *= 1.17) {
        const double e = sol.eta_at(rho);
        const double edd = -(0.5 / rho + 3.0 / (16.0 * rho * rho)) * e - rhs_total(rho, e);
        const double y = phi_leading(rho) + e;
        const double w = (2.0 * phi_leading(rho) + e) * e;
        const double res =
            phi_leading_dd(rho) + edd + 0.25 * y * (std::exp(w) / (rho * rho) - std::exp(-rho));
        CHECK(std::fabs(res) <= 1e-6 * std::pow(rho, -2.5) * std::log(rho));
    }
}

TEST_CASE("fixed point satisfies integral equation (independent second derivative)") {
    // finite-difference eta'' from the solved table vs the analytic relation;
    // validates the kernel/quadrature, not just the algebra
    const EtaSolution& sol = default_solution();
    for (double rho : {150.0, 300.0, 700.0}) {
        const double h = 0.5;
        const double fd =
            (sol.eta_at(rho + h) - 2.0 * sol.eta_at(rho) + sol.eta_at(rho - h)) / (h * h);
        const double an =
            -(0.5 / rho + 3.0 / (16.0 * rho * rho)) * sol.eta_at(rho) - rhs_total(rho, sol.eta_at(rho));
        CHECK(fd == doctest::Approx(an).epsilon(5e-3));
    }
    // derivative table vs finite differences of the value table
    for (double rho : {150.0, 300.0, 700.0}) {
        const double h = 0.5;
        const double fd = (sol.eta_at(rho + h) - sol.eta_at(rho - h)) / (2.0 * h);
        CHECK(sol.deta_at(rho) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("operator contraction on ball pairs") {
    const EtaSolution& sol = default_solution();
    const EtaConfig& cfg = sol.cfg;
    auto env = [&](double rho) { return std::pow(rho, -1.5) * std::log(rho); };
    auto e1 = [&](double rho) { return 1.6 * sol.cstar * env(rho); };
    auto e2 = [&](double rho) { return -1.2 * sol.cstar * env(rho); };
    auto t1 = apply_T(cfg, sol.rho, e1);
    auto t2 = apply_T(cfg, sol.rho, e2);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < sol.rho.size(); ++i) {
        const double w = eta_weight(sol.rho[i]);
        num = std::max(num, std::fabs(t1[i] - t2[i]) * w);
        den = std::max(den, std::fabs(e1(sol.rho[i]) - e2(sol.rho[i])) * w);
    }
    CHECK(num <= 0.5 * den);
}

TEST_CASE("stability under refinement and lambda overlap") {
    const EtaSolution& sol = default_solution();

    EtaConfig denser = sol.cfg;
    denser.grid_nodes *= 2;
    const EtaSolution sol2 = solve_eta(denser);
    CHECK(sol2.weighted_norm == doctest::Approx(sol.weighted_norm).epsilon(1e-3));

    EtaConfig finer_quad = sol.cfg;
    finer_quad.quad_order = 24;
    const EtaSolution sol3 = solve_eta(finer_quad);
    CHECK(sol3.weighted_norm == doctest::Approx(sol.weighted_norm).epsilon(1e-3));

    EtaConfig shifted = sol.cfg;
    shifted.lambda = 200.0;
    const EtaSolution sol4 = solve_eta(shifted);
    for (double rho = 200.0; rho <= 10.0 * sol.cfg.lambda; rho *= 1.31)
        CHECK(sol4.eta_at(rho) == doctest::Approx(sol.eta_at(rho)).epsilon(1e-3));
}

TEST_CASE("inner profile") {
    const EtaSolution& sol = default_solution();
    const double r = std::exp(-60.0);
    auto [u, du] = inner_profile(r, sol);
    CHECK(u == doctest::Approx(phi_leading(120.0)).epsilon(5e-4));
    CHECK(du < 0.0);
    CHECK_THROWS_AS(inner_profile(1e-3, sol), config_error); // outside inner region
}

TEST_CASE("negative control: tiny lambda fails numerically") {
    EtaConfig bad;
    bad.lambda = 5.0;
    bad.grid_max = 400.0;
    bad.rho_max = 4e5;
    CHECK_THROWS_AS((void)solve_eta(bad), numerical_error);
}
