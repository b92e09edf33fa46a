#include "singheat/eta.hpp"

#include <algorithm>
#include <cmath>

#include "singheat/errors.hpp"
#include "singheat/nonlinearity.hpp"
#include "singheat/quadrature.hpp"

namespace singheat {

double phi_leading(double rho) { return std::sqrt(rho - 2.0 * std::log(rho)); }

double phi_leading_deriv(double rho) {
    return (1.0 - 2.0 / rho) / (2.0 * phi_leading(rho));
}

double phi_leading_dd(double rho) {
    const double p = phi_leading(rho);
    const double a = 1.0 - 2.0 / rho;
    return 1.0 / (rho * rho * p) - a * a / (4.0 * p * p * p);
}

double sqrt_corr(double rho) {
    const double x = 2.0 * std::log(rho) / rho;
    return std::expm1(0.5 * std::log1p(-x));
}

double forcing(double rho) {
    const double x = 2.0 * std::log(rho) / rho;
    const double p = phi_leading(rho);
    const double r32 = std::pow(rho, -1.5);
    const double A = std::expm1(-1.5 * std::log1p(-x)); // (1-x)^{-3/2} - 1
    const double B = sqrt_corr(rho);
    return -0.25 * r32 * A + (1.0 / rho - 1.0 / (rho * rho)) / (p * p * p) +
           1.0 / (p * rho * rho) + 0.25 * r32 * B;
}

std::array<double, 7> g_terms(double rho, double eta, bool include_g7) {
    const double p = phi_leading(rho);
    const double B = sqrt_corr(rho); // (1 - 2 log rho / rho)^{1/2} - 1
    const double w = (2.0 * p + eta) * eta;
    const double y = p + eta;
    const double r2 = 1.0 / (rho * rho);
    const double r32 = std::pow(rho, -1.5);
    std::array<double, 7> g;
    g[0] = 0.25 * r2 * eta;
    g[1] = 0.5 * r32 * (std::sqrt(rho) * B) * eta; // phi - rho^{1/2} = rho^{1/2} B
    g[2] = 0.25 * r32 * eta * eta;
    g[3] = 0.25 * w * r32 * B;
    g[4] = 0.25 * r2 * w * eta;
    g[5] = 0.25 * r2 * expm1m(w) * y; // rho^{1/2}(1+B) + eta = phi + eta = y
    g[6] = include_g7 ? -3.0 / (16.0 * rho * rho) * eta : 0.0;
    return g;
}

double eq_kernel(double rho, double s) {
    return std::pow(rho * s, 0.25) * std::sin(std::sqrt(2.0 * rho) - std::sqrt(2.0 * s));
}

double rhs_total(double rho, double eta) {
    const auto g = g_terms(rho, eta, true);
    double F = forcing(rho);
    for (double gi : g) F += gi;
    if (rho < 700.0) F -= 0.25 * std::exp(-rho) * (phi_leading(rho) + eta);
    return F;
}

void EtaConfig::validate() const {
    if (!(lambda > 3.0)) throw config_error("eta: lambda must exceed 3");
    if (!(rho_max >= 100.0 * lambda)) throw config_error("eta: rho_max must be >= 100*lambda");
    if (!(grid_max > 4.0 * lambda)) throw config_error("eta: grid_max too small");
    if (!(rho_max >= 10.0 * grid_max)) throw config_error("eta: rho_max must be >= 10*grid_max");
    if (grid_nodes < 32) throw config_error("eta: grid_nodes must be >= 32");
    if (quad_order < 4 || quad_order > 32) throw config_error("eta: quad_order out of range");
    if (!(fp_tol > 0.0) || max_iter < 4) throw config_error("eta: bad tolerance/iteration budget");
}

namespace {

// One oscillatory integral \int_rho^{rho_max} with linear phase in
// u = sqrt(2 s): panels between consecutive zeros of sin(a - u), plus
// integration-by-parts boundary corrections for the tail beyond u0.
// h(u) must be smooth and decaying; the sin kernel is applied here.
struct OscResult {
    double s_val = 0.0;       // \int sin(a-u) h(u) du  (tail-corrected)
    double c_val = 0.0;       // \int cos(a-u) h(u) du  (tail-corrected)
    double tail_budget = 0.0; // bound on the residual tail error (abs)
};

OscResult osc_integral(double rho, double rho_max, int order,
                       const std::function<double(double)>& h, bool want_cos) {
    OscResult out;
    const double a = std::sqrt(2.0 * rho);
    const double utop = std::sqrt(2.0 * rho_max);
    const int npan = std::max(1, static_cast<int>(std::ceil((utop - a) / M_PI)));
    const double u0 = a + npan * M_PI;
    const GaussRule& gr = gauss_rule(order);

    double sv = 0.0, cv = 0.0;
    for (int k = 0; k < npan; ++k) {
        const double lo = a + k * M_PI, hi = lo + M_PI;
        const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        double ps = 0.0, pc = 0.0;
        for (int i = 0; i < order; ++i) {
            const double u = c + hw * gr.x[i];
            const double hv = h(u);
            ps += gr.w[i] * std::sin(a - u) * hv;
            if (want_cos) pc += gr.w[i] * std::cos(a - u) * hv;
        }
        sv += ps * hw;
        cv += pc * hw;
    }

    // tail corrections: with sin(a - u0) = 0 and c0 = cos(a - u0) = (-1)^npan,
    //   \int_{u0}^inf sin(a-u) h du = -c0 (h - h'' + h'''' - ...)(u0)
    //   \int_{u0}^inf cos(a-u) h du = -c0 (h' - h''' + ...)(u0)
    const double c0 = (npan % 2 == 0) ? 1.0 : -1.0;
    const double d = 1.0;
    const double hm2 = h(u0 - 2 * d), hm1 = h(u0 - d), h0v = h(u0), hp1 = h(u0 + d),
                 hp2 = h(u0 + 2 * d);
    const double h2 = (-hm2 + 16 * hm1 - 30 * h0v + 16 * hp1 - hp2) / (12 * d * d);
    const double h4 = (hm2 - 4 * hm1 + 6 * h0v - 4 * hp1 + hp2) / (d * d * d * d);
    sv += -c0 * (h0v - h2);
    out.tail_budget = 2.0 * std::fabs(h4) + 1e-300;
    if (want_cos) {
        const double h1 = (hm2 - 8 * hm1 + 8 * hp1 - hp2) / (12 * d);
        const double h3 = (-hm2 + 2 * hm1 - 2 * hp1 + hp2) / (2 * d * d * d);
        cv += -c0 * (h1 - h3);
        out.tail_budget += 2.0 * std::fabs(h3) / (u0 * u0); // crude next-order scale
    }
    out.s_val = sv;
    out.c_val = cv;
    return out;
}

// Certified contraction bound for T on the ball |eta| <= 2 cstar env(s):
// sup_rho weight(rho) \int_rho^inf |K(rho,s)| sup_ball |dF/deta|(s) env(s) ds.
// Drops all sine cancellation, so it dominates any pairwise ratio; the
// fixed-point argument needs it below 1/2.
// measured Lipschitz ratio of T over a canonical family of ball elements
// (envelope-shaped functions with amplitudes spanning the 2C* ball); the
// weighted ratio must stay below 1/2 for the fixed-point argument
double contraction_pair_bound(const EtaConfig& cfg, double cstar) {
    auto env = [](double s) { return std::pow(s, -1.5) * std::log(s); };
    const auto grid = log_grid(cfg.lambda, cfg.grid_max, 96);
    const std::array<double, 7> amps = {-2.0, -1.2, -1.0, 0.0, 1.0, 1.6, 2.0};
    std::vector<std::vector<double>> im;
    for (double a : amps) {
        auto fn = [a, cstar, &env](double s) { return a * cstar * env(s); };
        im.push_back(apply_T(cfg, grid, fn, nullptr));
    }
    double worst = 0.0;
    for (size_t i = 0; i < amps.size(); ++i) {
        for (size_t j = i + 1; j < amps.size(); ++j) {
            double num = 0.0;
            for (size_t k = 0; k < grid.size(); ++k)
                num = std::max(num, std::fabs(im[i][k] - im[j][k]) * eta_weight(grid[k]));
            // weight * envelope = 1, so the pair distance is |a_i - a_j| cstar
            worst = std::max(worst, num / (std::fabs(amps[i] - amps[j]) * cstar));
        }
    }
    return worst;
}

std::function<double(double)> rhs_of(const std::function<double(double)>& eta_fn) {
    return [eta_fn](double s) { return rhs_total(s, eta_fn(s)); };
}

} // namespace

std::vector<double> apply_T(const EtaConfig& cfg, const std::vector<double>& grid,
                            const std::function<double(double)>& eta_fn, double* tail_budget) {
    const auto Fs = rhs_of(eta_fn);
    auto h = [&Fs](double u) {
        const double s = 0.5 * u * u;
        return std::pow(s, 0.25) * Fs(s) * u;
    };
    std::vector<double> out(grid.size());
    double budget = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid[i];
        const OscResult r = osc_integral(rho, cfg.rho_max, cfg.quad_order, h, false);
        // sqrt(2) = 1/|W| for the fundamental pair rho^{1/4} sin/cos(sqrt(2 rho));
        // without it the fixed point solves the ODE with F scaled by 1/sqrt(2)
        const double scale = std::sqrt(2.0) * std::pow(rho, 0.25);
        out[i] = scale * r.s_val;
        budget = std::max(budget, scale * r.tail_budget * eta_weight(rho));
    }
    if (tail_budget) *tail_budget = budget;
    return out;
}

std::vector<double> apply_T_deriv(const EtaConfig& cfg, const std::vector<double>& grid,
                                  const std::function<double(double)>& eta_fn,
                                  const std::vector<double>& eta_on_grid) {
    const auto Fs = rhs_of(eta_fn);
    auto h = [&Fs](double u) {
        const double s = 0.5 * u * u;
        return std::pow(s, 0.25) * Fs(s) * u;
    };
    std::vector<double> out(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid[i];
        const OscResult r = osc_integral(rho, cfg.rho_max, cfg.quad_order, h, true);
        out[i] = eta_on_grid[i] / (4.0 * rho) +
                 std::sqrt(2.0) * std::pow(rho, 0.25) / std::sqrt(2.0 * rho) * r.c_val;
    }
    return out;
}

namespace {

double envelope_extrapolate(double value_at_top, double top, double rho) {
    return value_at_top * std::pow(top / rho, 1.5) * std::log(rho) / std::log(top);
}

std::function<double(double)> table_fn(const CubicTable& t) {
    return [&t](double s) {
        if (s <= t.x_back()) return t(s);
        return envelope_extrapolate(t.y().back(), t.x_back(), s);
    };
}

} // namespace

double EtaSolution::eta_at(double r) const {
    if (r <= table.x_back()) return table(r);
    return envelope_extrapolate(eta.back(), rho.back(), r);
}

double EtaSolution::deta_at(double r) const {
    if (r <= dtable.x_back()) return dtable(r);
    return envelope_extrapolate(deta.back(), rho.back(), r);
}

EtaSolution solve_eta(const EtaConfig& cfg) {
    cfg.validate();
    EtaSolution sol;
    sol.cfg = cfg;
    sol.rho = log_grid(cfg.lambda, cfg.grid_max, cfg.grid_nodes);
    const size_t n = sol.rho.size();

    auto wnorm = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]) * eta_weight(sol.rho[i]));
        return m;
    };

    std::vector<double> cur(n, 0.0);
    double budget = 0.0;
    std::vector<double> prev_diff;
    double prev_diff_norm = 0.0;
    sol.contraction_factor = 0.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        CubicTable tab(sol.rho, cur);
        std::vector<double> next =
            apply_T(cfg, sol.rho, it == 0 ? std::function<double(double)>([](double) { return 0.0; })
                                          : table_fn(tab),
                    &budget);
        std::vector<double> diff(n);
        for (size_t i = 0; i < n; ++i) diff[i] = next[i] - cur[i];
        const double dn = wnorm(diff);
        if (it == 0) {
            sol.cstar = wnorm(next);
            sol.contraction_bound = contraction_pair_bound(cfg, sol.cstar);
            if (sol.contraction_bound > 0.5)
                throw numerical_error(
                    "solve_eta: non-contraction (measured Lipschitz ratio " +
                    std::to_string(sol.contraction_bound) +
                    " exceeds 1/2 on the 2C* ball; lambda too small)");
        } else {
            const double ratio = dn / (prev_diff_norm + 1e-300);
            sol.contraction_factor = std::max(sol.contraction_factor, ratio);
            if (ratio >= 1.0)
                throw numerical_error("solve_eta: non-contraction (ratio " +
                                      std::to_string(ratio) + " at iteration " +
                                      std::to_string(it) + ")");
        }
        cur = std::move(next);
        sol.iterations = it + 1;
        prev_diff_norm = dn;
        if (it > 0 && dn < cfg.fp_tol) break;
    }
    if (prev_diff_norm >= cfg.fp_tol)
        throw numerical_error("solve_eta: fixed point did not converge to fp_tol within " +
                              std::to_string(cfg.max_iter) + " iterations");
    sol.eta = cur;
    sol.weighted_norm = wnorm(cur);
    sol.tail_budget = budget;
    if (budget > cfg.fp_tol / 10.0)
        throw numerical_error("solve_eta: truncated-tail budget " + std::to_string(budget) +
                              " exceeds fp_tol/10; increase rho_max");
    if (sol.weighted_norm > 2.0 * sol.cstar)
        throw numerical_error("solve_eta: iterate escaped the 2 C* ball");
    sol.table = CubicTable(sol.rho, sol.eta);
    sol.deta = apply_T_deriv(cfg, sol.rho, table_fn(sol.table), sol.eta);
    sol.dtable = CubicTable(sol.rho, sol.deta);
    return sol;
}

ValueDeriv inner_profile(double r, const EtaSolution& sol) {
    if (!(r > 0.0)) throw config_error("inner_profile: r must be positive");
    const double rho = -2.0 * std::log(r);
    if (rho < sol.cfg.lambda * (1.0 - 1e-12))
        throw config_error("inner_profile: r exceeds the inner region boundary exp(-lambda/2)");
    const double y = phi_leading(rho) + sol.eta_at(rho);
    const double yp = phi_leading_deriv(rho) + sol.deta_at(rho);
    return {y, yp * (-2.0 / r)};
}

LemSinResult oracle_lem_sin(double sigma, double rho, bool with_log) {
    auto h = [sigma, with_log](double u) {
        const double s = 0.5 * u * u;
        const double base = std::pow(s, -sigma) * u;
        return with_log ? base * std::log(s) : base;
    };
    const double rho_max = std::max(1.0e8, 100.0 * rho);
    const OscResult r = osc_integral(rho, rho_max, 16, h, false);
    LemSinResult out;
    out.numeric = r.s_val;
    out.leading = -std::sqrt(2.0) * std::pow(rho, 0.5 - sigma) *
                  (with_log ? std::log(rho) : 1.0);
    return out;
}

} // namespace singheat
