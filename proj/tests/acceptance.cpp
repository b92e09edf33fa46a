// Acceptance gate: runs every acceptance criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the number of failed
// criteria.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "singheat/errors.hpp"
#include "singheat/eta.hpp"
#include "singheat/heat.hpp"
#include "singheat/io.hpp"
#include "singheat/shooting.hpp"

using namespace singheat;

namespace {

struct Criterion {
    bool pass = true;
    std::string notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes += (notes.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& s) { notes += (notes.empty() ? "" : "; ") + s; }
};

int report(int idx, const char* title, const Criterion& c) {
    std::printf("%s criterion %d: %s%s%s\n", c.pass ? "PASS" : "FAIL", idx, title,
                c.notes.empty() ? "" : " -- ", c.notes.c_str());
    std::fflush(stdout);
    return c.pass ? 0 : 1;
}

// shared pipeline state
const EtaSolution& eta_solution() {
    static EtaSolution sol = solve_eta(EtaConfig{});
    return sol;
}
const MstarResult& mstar() {
    static MstarResult ms = find_mstar(eta_solution(), 1e-6, OdeOptions{});
    return ms;
}
const SolitonProfile& phistar() {
    static SolitonProfile prof =
        assemble_phistar(eta_solution(), mstar(), OdeOptions{});
    return prof;
}
const Evolution& evolution() {
    static Evolution ev(default_heat_config(phistar()), phistar());
    return ev;
}

// --- criterion 1: inner fixed point ----------------------------------------

Criterion criterion_inner_fixed_point() {
    Criterion c;
    const EtaSolution& sol = eta_solution();
    c.require(sol.contraction_bound <= 0.5,
              "pair Lipschitz " + g17(sol.contraction_bound) + " > 1/2");
    c.require(sol.contraction_factor <= 0.5,
              "iterate ratio " + g17(sol.contraction_factor) + " > 1/2");
    c.note("contraction=" + g17(sol.contraction_bound));

    // weighted norm stable to 1e-3 under grid and quadrature doubling
    EtaConfig denser = sol.cfg;
    denser.grid_nodes *= 2;
    const double n_grid = solve_eta(denser).weighted_norm;
    EtaConfig finer = sol.cfg;
    finer.quad_order = 32;
    const double n_quad = solve_eta(finer).weighted_norm;
    c.require(std::fabs(n_grid / sol.weighted_norm - 1.0) < 1e-3, "grid doubling drift");
    c.require(std::fabs(n_quad / sol.weighted_norm - 1.0) < 1e-3, "quadrature doubling drift");

    // ODE residual of phi+eta on [2L, 10L]: the defect d = T[eta]-eta carries
    // the whole residual, d'' + (1/(2rho)+3/(16rho^2)) d (the algebraic part
    // of the equation is an identity)
    auto eta_fn = [&sol](double r) { return sol.eta_at(r); };
    double worst_ratio = 0.0;
    for (double rho = 2.0 * sol.cfg.lambda; rho <= 10.0 * sol.cfg.lambda; rho *= 1.26) {
        const double h = 2.0;
        const std::vector<double> t = apply_T(sol.cfg, {rho - h, rho, rho + h}, eta_fn);
        const double d0 = t[0] - sol.eta_at(rho - h);
        const double d1 = t[1] - sol.eta_at(rho);
        const double d2 = t[2] - sol.eta_at(rho + h);
        const double res = (d0 - 2.0 * d1 + d2) / (h * h) +
                           (0.5 / rho + 3.0 / (16.0 * rho * rho)) * d1;
        const double bound = 1e-6 * std::pow(rho, -2.5) * std::log(rho);
        worst_ratio = std::max(worst_ratio, std::fabs(res) / bound);
    }
    c.require(worst_ratio <= 1.0, "ODE residual exceeds 1e-6 rho^-5/2 log rho");
    c.note("residual/bound=" + g17(worst_ratio));
    return c;
}

// --- criterion 2: lemma oracles ---------------------------------------------

Criterion criterion_lemma_oracles() {
    Criterion c;
    for (double sigma : {1.5, 2.0, 2.5}) {
        const LemSinResult r = oracle_lem_sin(sigma, 1e4, false);
        const double ratio = r.numeric / r.leading;
        c.require(std::fabs(ratio - 1.0) <= 0.05,
                  "oscillatory integral ratio off at sigma=" + g17(sigma));
    }
    const double rho = 1e6;
    const double coeff = (std::pow(phi_leading(rho), -3.0) - std::pow(rho, -1.5)) *
                         std::pow(rho, 2.5) / std::log(rho);
    c.require(std::fabs(coeff / 3.0 - 1.0) <= 0.10, "cubic-expansion coefficient not 3");
    c.note("coefficient=" + g17(coeff));

    // sampled Lipschitz ratios of the remainder terms under their envelopes
    double cmax = 0.0;
    for (double r : {1e3, 1e4}) {
        const double ball = std::pow(r, -1.5) * std::log(r);
        const double l2 = std::pow(r, -2.0), l2l = l2 * std::log(r),
                     l3l = std::pow(r, -3.0) * std::log(r);
        const double envs[7] = {l2, l2l, l3l, l2l, l3l, l2l, l2};
        for (double e1 : {-ball, -0.3 * ball, 0.2 * ball, ball}) {
            const double e2 = 0.45 * ball;
            const auto ga = g_terms(r, e1, true), gb = g_terms(r, e2, true);
            for (int i = 0; i < 7; ++i)
                cmax = std::max(cmax, std::fabs(ga[i] - gb[i]) /
                                          (envs[i] * std::fabs(e1 - e2)));
        }
    }
    c.require(cmax <= 3.0, "Lipschitz envelope constant " + g17(cmax) + " > 3");
    c.note("lipschitz_const=" + g17(cmax));
    return c;
}

// --- criterion 3: soliton construction --------------------------------------

Criterion criterion_soliton() {
    Criterion c;
    const MstarResult& ms = mstar();
    const ShootOutcome zero = classify(0.0, ms.start, OdeOptions{});
    c.require(zero.kind == ShootKind::HasZero, "m=0 not HasZero");
    c.require(ms.start.R < ms.start.R_inf, "R >= R_inf");
    c.require(ms.m_hi - ms.m_lo < 1e-6, "bracket too wide");

    OdeOptions fine;
    fine.tol = 0.5e-12;
    const MstarResult ms2 = find_mstar(eta_solution(), 0.5e-6, fine);
    c.require(std::fabs(ms2.m_star - ms.m_star) < 1e-6, "m_star not reproducible");
    c.note("m_star=" + g17(ms.m_star));

    const SolitonProfile& prof = phistar();
    bool shape = true, energy_ok = true;
    for (size_t i = 0; i < prof.u.size(); ++i) {
        shape = shape && prof.u[i] > 0.0 && prof.du[i] < 0.0;
        if (i > 0) shape = shape && prof.u[i] < prof.u[i - 1];
        if (i > 0)
            energy_ok = energy_ok &&
                        prof.E[i] <= prof.E[i - 1] + 1e-8 * (std::fabs(prof.E[i - 1]) + 1.0);
    }
    c.require(shape, "not positive strictly decreasing");
    c.require(energy_ok, "energy increases along the trajectory");

    for (double rg : {prof.r_start, prof.r_tail}) {
        const double eps = 1e-9 * rg;
        const double vj = prof.value(rg + eps) - prof.value(rg - eps);
        const double dj = prof.derivative(rg + eps) - prof.derivative(rg - eps);
        c.require(std::fabs(vj) / prof.value(rg) < 1e-6, "glue value jump");
        c.require(std::fabs(dj) / std::fabs(prof.derivative(rg)) < 1e-6, "glue slope jump");
    }

    const double r2 = 2.0 * prof.r_tail;
    const double slope = prof.derivative(r2) / prof.value(r2);
    c.require(slope <= -std::sqrt(0.9 * prof.m), "log-decay slope too shallow");

    AssembleOptions dense;
    dense.grid_nodes = 4800;
    const SolitonProfile prof2 = assemble_phistar(eta_solution(), ms, OdeOptions{}, dense);
    for (double p : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double a = lp_norm(prof, p), b = lp_norm(prof2, p);
        c.require(std::isfinite(a) && a > 0.0, "L^p norm not finite");
        c.require(std::fabs(a - b) / a < 1e-4, "L^p norm grid-unstable at p=" + g17(p));
    }

    double prev_gap = 1.0;
    for (double r_min : {1e-30, 1e-35, 1e-40}) {
        const double ratio = prof.value(r_min) / std::sqrt(-2.0 * std::log(r_min));
        c.require(std::fabs(ratio - 1.0) < 0.05, "sup divergence ratio off");
        c.require(std::fabs(ratio - 1.0) <= prev_gap, "sup divergence not improving");
        prev_gap = std::fabs(ratio - 1.0);
    }
    return c;
}

// --- criterion 4: heat semigroup ---------------------------------------------

Criterion criterion_heat() {
    Criterion c;
    for (double a : {0.05, 0.3}) {
        HeatProfile g;
        g.value = [a](double q) { return std::exp(-q * q / (4.0 * a)); };
        for (double t : {0.01, 0.7}) {
            for (double r : {0.0, 0.2, 1.0, 4.0}) {
                const double want = a / (a + t) * std::exp(-r * r / (4.0 * (a + t)));
                c.require(std::fabs(heat_point(t, g, r) / want - 1.0) < 1e-8,
                          "Gaussian closed form off");
            }
        }
    }
    {
        const double a = 0.2, t1 = 0.05, t2 = 0.15;
        HeatProfile gmid;
        gmid.value = [a, t1](double q) {
            return a / (a + t1) * std::exp(-q * q / (4.0 * (a + t1)));
        };
        for (double r : {0.0, 0.3, 1.0, 3.0}) {
            const double want = a / (a + t1 + t2) * std::exp(-r * r / (4.0 * (a + t1 + t2)));
            c.require(std::fabs(heat_point(t2, gmid, r) / want - 1.0) < 1e-8,
                      "semigroup composition off");
        }
    }
    {
        HeatProfile phi = phistar_heat_profile(phistar());
        std::vector<double> radii;
        for (double q = 1e-8; q < 20.0; q *= 2.4) radii.push_back(q);
        const MonotonicityReport rep = monotonicity_check(phi, {1e-10, 1e-7, 1e-4}, radii);
        c.require(rep.ok, "evolved slice not radially decreasing");
    }
    const Evolution& ev = evolution();
    {
        double lo = 1e9, hi = -1e9;
        for (double t : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) {
            const double l = ell_of(t);
            const double k =
                (ev.u0_origin(t) - std::sqrt(l - 2.0 * std::log(l))) * std::sqrt(l);
            lo = std::min(lo, k);
            hi = std::max(hi, k);
        }
        c.require(std::fabs(lo) < 1.0 && std::fabs(hi) < 1.0, "origin correction unbounded");
        c.require(hi / lo > 0.7, "origin correction not t-stable");
        c.note("origin_coeff=[" + g17(lo) + "," + g17(hi) + "]");
    }
    {
        const EnvelopeOracle env{ev.config().epsilon};
        double cF = 0.0, cFp = 0.0;
        for (double t : {1e-12, 1e-9, 1e-6, 1e-4}) {
            const std::vector<double>& u0 = ev.u0_values(t);
            cF = std::max(cF, u0[0] * std::expm1(u0[0] * u0[0]) / env.F0(t, 0.0));
            cFp = std::max(cFp, u0[0] * u0[0] * std::exp(u0[0] * u0[0]) / env.F0_prime(t, 0.0));
            for (size_t j = 0; j < ev.config().radial_grid.size(); ++j) {
                const double r = ev.config().radial_grid[j], u = u0[j + 1];
                cF = std::max(cF, u * std::expm1(u * u) / env.F0(t, r));
                cFp = std::max(cFp, u * u * std::exp(u * u) / env.F0_prime(t, r));
            }
        }
        c.require(cF < 2.0 && cFp < 2.0, "envelope constant not uniform");
        c.note("envelope_const=" + g17(cF));
    }
    for (double alpha : {1.0, 1.5}) {
        double smin = 1e300, smax = 0.0, fmin = 1e300, fmax = 0.0;
        for (double t : {1e-8, 1e-6, 1e-4}) {
            const IntegralFormulaResult r =
                oracle_integral_formula(ev.config().epsilon, alpha, t);
            smin = std::min(smin, r.cstar_sharp);
            smax = std::max(smax, r.cstar_sharp);
            fmin = std::min(fmin, r.cstar_flat);
            fmax = std::max(fmax, r.cstar_flat);
        }
        c.require(smax / smin < 1.2 && fmax / fmin < 1.2,
                  "time-integral constant drifts beyond 20% at alpha=" + g17(alpha));
    }
    return c;
}

// --- criterion 5: Picard / non-uniqueness ------------------------------------

Criterion criterion_picard(const Evolution::PicardResult& pr) {
    Criterion c;
    const Evolution& ev = evolution();
    for (double t : {1e-12, 1e-9, 1e-6, 1e-4}) {
        const std::vector<double> d = ev.duhamel(t, nullptr, Evolution::Part::Full);
        double sup = 0.0;
        for (double x : d) sup = std::max(sup, std::fabs(x));
        const double w = sup * std::pow(ell_of(t), 1.5);
        c.require(w < 1.0, "weighted source norm unbounded");
    }
    c.require(pr.converged, "iteration did not converge");
    c.require(pr.iterations <= 20, "more than 20 iterations");
    c.require(pr.defects.back() < 1e-10, "final weighted defect above 1e-10");
    for (double r : pr.ratios) c.require(r < 1.0, "defect not geometric");
    c.require(pr.x_half <= 1.0, "iterate leaves the weighted unit ball");
    c.require(pr.x_three_half < 2.0, "no uniform stronger-weight bound");
    c.note("iters=" + std::to_string(pr.iterations) + " x_half=" + g17(pr.x_half));

    const NonuniquenessReport rep = nonuniqueness_report(ev, pr);
    const double tol2 = 1e-6 * (1.0 + lp_norm(phistar(), 2.0));
    const double tol4 = 1e-6 * (1.0 + lp_norm(phistar(), 4.0));
    const double rtol = 10.0 * ev.config().picard_tol;
    c.require(rep.resS_L2 < tol2 && rep.resS_L2_q < tol2, "stationary L2 residual too large");
    c.require(rep.resS_L4 < tol4 && rep.resS_L4_q < tol4, "stationary L4 residual too large");
    c.require(rep.resR_L2 < rtol && rep.resR_L2_q < rtol, "regular L2 residual too large");
    c.require(rep.resR_L4 < rtol && rep.resR_L4_q < rtol, "regular L4 residual too large");
    c.require(rep.sep_L2 > 1e3 * tol2, "solutions not separated");
    c.note("resS_L2=" + g17(rep.resS_L2) + " sep_L2=" + g17(rep.sep_L2));
    return c;
}

// --- criterion 6: negative controls ------------------------------------------

Criterion criterion_negative_controls() {
    Criterion c;
    bool threw = false;
    try {
        EtaConfig small;
        small.lambda = 5.0;
        small.grid_max = 400.0;
        solve_eta(small);
    } catch (const numerical_error&) {
        threw = true;
    }
    c.require(threw, "small-domain run did not fail with non-contraction");

    HeatProfile inc;
    inc.value = [](double q) { return q < 1.0 ? q : std::exp(-(q - 1.0)); };
    std::vector<double> radii;
    for (double q = 1e-8; q < 20.0; q *= 2.4) radii.push_back(q);
    c.require(!monotonicity_check(inc, {1e-4}, radii).ok,
              "increasing profile passed the monotonicity check");

    const ShootOutcome zero = classify(0.0, mstar().start, OdeOptions{});
    c.require(zero.kind == ShootKind::HasZero, "m=0 classification not HasZero");
    return c;
}

} // namespace

int main() {
    int failures = 0;
    failures += report(1, "inner fixed point (contraction, stability, ODE residual)",
                       criterion_inner_fixed_point());
    failures += report(2, "lemma oracles (oscillatory integral, expansion, envelopes)",
                       criterion_lemma_oracles());
    failures += report(3, "soliton construction (classification, bracket, profile, norms)",
                       criterion_soliton());
    failures += report(4, "heat semigroup (closed forms, monotonicity, envelopes)",
                       criterion_heat());
    const Evolution::PicardResult pr = evolution().picard_solve();
    failures += report(5, "fixed-point evolution and non-uniqueness", criterion_picard(pr));
    failures += report(6, "negative controls", criterion_negative_controls());
    return failures;
}
