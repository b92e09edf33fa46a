#include "singheat/shooting.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <deque>
#include <gsl/gsl_sf_bessel.h>

#include "singheat/errors.hpp"
#include "singheat/quadrature.hpp"

namespace singheat {

namespace {

using State = std::array<double, 2>; // (u, w = r u')
namespace ode = boost::numeric::odeint;

// radial equation in tau = log r:  u_tt = -e^{2 tau} f_m(u)
struct RadialSystem {
    const Nonlinearity* n;
    void operator()(const State& y, State& dydt, double tau) const {
        dydt[0] = y[1];
        dydt[1] = -std::exp(2.0 * tau) * n->f(y[0]);
    }
};

using Stepper = ode::runge_kutta_dopri5<State>;
using DenseStepper =
    ode::dense_output_runge_kutta<ode::controlled_runge_kutta<Stepper>>;

DenseStepper make_stepper(const OdeOptions& opt) {
    return ode::make_dense_output(opt.tol, opt.tol, Stepper());
}

// locate zero of g(state, tau) inside the last step by bisection on the
// dense output; g must change sign across [t0, t1]
template <typename G>
double locate(DenseStepper& st, double t0, double t1, const G& g) {
    double a = t0, b = t1;
    State s;
    st.calc_state(a, s);
    double ga = g(s, a);
    for (int i = 0; i < 200 && (b - a) > 1e-13; ++i) {
        const double m = 0.5 * (a + b);
        st.calc_state(m, s);
        const double gm = g(s, m);
        if ((ga <= 0.0) == (gm <= 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

void OdeOptions::validate() const {
    if (!(tol > 0.0) || tol > 1e-6) throw config_error("ode: tol must be in (0, 1e-6]");
    if (!(r_max >= 8.0)) throw config_error("ode: r_max too small");
}

double energy(const Nonlinearity& n, const OdeState& s) {
    return 0.5 * s.du * s.du + n.F(s.u);
}

OdeState match_inner(const EtaSolution& inner) {
    const double lambda = inner.cfg.lambda;
    const double r = std::exp(-0.5 * lambda);
    const double y = phi_leading(lambda) + inner.eta_at(lambda);
    const double yp = phi_leading_deriv(lambda) + inner.deta_at(lambda);
    return {r, y, -2.0 * yp / r};
}

RRinfResult find_R_and_Rinf(const EtaSolution& inner, const OdeOptions& opt) {
    opt.validate();
    const Nonlinearity n(0.0);
    RadialSystem sys{&n};
    const OdeState h = match_inner(inner);
    double tau = std::log(h.r);
    State y = {h.u, h.du * h.r};
    auto st = make_stepper(opt);
    st.initialize(y, tau, 0.05);

    RRinfResult out;
    bool have_R = false;
    while (true) {
        st.do_step(sys);
        const double t0 = st.current_time() - st.current_time_step();
        const double t1 = st.current_time();
        const State& cur = st.current_state();
        if (!have_R && cur[0] <= 2.0) {
            const double tr = locate(st, t0, t1, [](const State& s, double) { return s[0] - 2.0; });
            State s;
            st.calc_state(tr, s);
            out.R = std::exp(tr);
            out.du_R = s[1] / out.R;
            have_R = true;
        }
        if (cur[0] <= 0.0) {
            const double tz = locate(st, t0, t1, [](const State& s, double) { return s[0]; });
            out.R_inf = std::exp(tz);
            break;
        }
        if (cur[1] > 0.0)
            throw numerical_error("find_R_and_Rinf: m=0 trajectory turned upward before its zero");
        if (std::exp(t1) > opt.r_max)
            throw numerical_error("find_R_and_Rinf: no zero before r_max");
    }
    if (!have_R || !(out.R < out.R_inf))
        throw numerical_error("find_R_and_Rinf: event ordering violated");
    return out;
}

ShootOutcome classify(double m, const RRinfResult& start, const OdeOptions& opt) {
    opt.validate();
    const Nonlinearity n(m);
    RadialSystem sys{&n};
    const double sm = std::sqrt(std::max(m, 0.0));
    double tau = std::log(start.R);
    State y = {2.0, start.du_R * start.R};
    auto st = make_stepper(opt);
    st.initialize(y, tau, 0.01);

    // decay-certificate tracking: log Q = sqrt(m) r + log(sqrt(m) u - u')
    bool in_regime = false;
    double regime_r0 = 0.0, prev_logq = 0.0;

    while (true) {
        st.do_step(sys);
        const double t0 = st.current_time() - st.current_time_step();
        const double t1 = st.current_time();
        const State& cur = st.current_state();
        const double r = std::exp(t1);
        const double u = cur[0], up = cur[1] / r;

        if (u <= 0.0) {
            const double tz = locate(st, t0, t1, [](const State& s, double) { return s[0]; });
            return {ShootKind::HasZero, std::exp(tz), "zero-crossing"};
        }
        const double E = energy(n, {r, u, up});
        if (E < 0.0) return {ShootKind::StaysPositive, r, "negative-energy"};

        if (m > 0.0 && u < 1.0 && up < 0.0) {
            const double q = sm * u - up; // positive here
            const double logq = sm * r + std::log(q);
            if (!in_regime) {
                in_regime = true;
                regime_r0 = r;
            } else if (logq > prev_logq + 1e-12) {
                regime_r0 = r; // restart the monotone window
            } else if (r >= 10.0 * regime_r0 && u < 1e-10) {
                // the u < 1e-10 guard keeps the certificate sound: a decade of
                // monotone log Q alone also holds on subcritical trajectories
                // that hug the decaying solution before crashing to zero, but
                // those deviate from it long before u reaches 1e-10
                return {ShootKind::StaysPositive, r, "decay"};
            }
            prev_logq = logq;
        } else {
            in_regime = false;
        }

        if (r > opt.r_max) return {ShootKind::Inconclusive, r, "r_max"};
    }
}

MstarResult find_mstar(const EtaSolution& inner, double bracket_tol, const OdeOptions& opt) {
    if (!(bracket_tol > 0.0) || bracket_tol > 1e-2)
        throw config_error("find_mstar: bracket_tol out of range");
    MstarResult out;
    out.start = find_R_and_Rinf(inner, opt);

    auto classify_robust = [&](double m) {
        OdeOptions o = opt;
        for (int k = 0; k < 4; ++k) {
            const ShootOutcome s = classify(m, out.start, o);
            if (s.kind != ShootKind::Inconclusive) return s;
            o.r_max *= 2.0;
        }
        throw numerical_error("find_mstar: classification inconclusive at m = " +
                              std::to_string(m) + " after r_max escalation");
    };

    // m = 0 must produce a zero (the Merle-Peletier singular branch)
    if (classify_robust(0.0).kind != ShootKind::HasZero)
        throw numerical_error("find_mstar: m=0 did not produce a zero crossing");
    out.history.emplace_back(0.0, static_cast<int>(ShootKind::HasZero));

    // E_m(R) = du_R^2/2 + (e^4-5)/2 - m * 8/7 = 0, then 5% headroom
    double m_hi =
        1.05 * (0.5 * out.start.du_R * out.start.du_R + 0.5 * (std::exp(4.0) - 5.0)) /
        kChiMomentTotal;
    if (classify_robust(m_hi).kind != ShootKind::StaysPositive)
        throw numerical_error("find_mstar: upper endpoint is not positivity-preserving");
    out.history.emplace_back(m_hi, static_cast<int>(ShootKind::StaysPositive));

    double m_lo = 0.0;
    while (m_hi - m_lo > bracket_tol) {
        const double mid = 0.5 * (m_lo + m_hi);
        const ShootOutcome s = classify_robust(mid);
        out.history.emplace_back(mid, static_cast<int>(s.kind));
        if (s.kind == ShootKind::HasZero)
            m_lo = mid;
        else
            m_hi = mid;
    }
    out.m_lo = m_lo;
    out.m_hi = m_hi;
    out.m_star = 0.5 * (m_lo + m_hi);
    return out;
}

namespace {

// integrate the m-trajectory from the handoff down to u = u_cut, sampling on
// a log-spaced radial grid; returns false if positivity/monotonicity breaks
bool shoot_profile(double m, const EtaSolution& inner, const OdeOptions& opt,
                   const AssembleOptions& aopt, SolitonProfile& prof) {
    const Nonlinearity n(m);
    RadialSystem sys{&n};
    const OdeState h = match_inner(inner);
    double tau = std::log(h.r);
    State y = {h.u, h.du * h.r};
    auto st = make_stepper(opt);
    st.initialize(y, tau, 0.05);

    std::vector<double> taus, us, dus, Es;
    taus.push_back(tau);
    us.push_back(h.u);
    dus.push_back(h.du);
    Es.push_back(energy(n, h));

    double t_cut = 0.0;
    while (true) {
        st.do_step(sys);
        const State& cur = st.current_state();
        const double t0 = st.current_time() - st.current_time_step();
        const double t1 = st.current_time();
        if (cur[0] <= aopt.u_cut) {
            t_cut = locate(st, t0, t1,
                           [&](const State& s, double) { return s[0] - aopt.u_cut; });
            State sc;
            st.calc_state(t_cut, sc);
            const double rc = std::exp(t_cut);
            taus.push_back(t_cut);
            us.push_back(sc[0]);
            dus.push_back(sc[1] / rc);
            Es.push_back(energy(n, {rc, sc[0], sc[1] / rc}));
            break;
        }
        if (cur[0] <= 0.0 || cur[1] >= 0.0) return false; // lost positivity/monotone decay
        if (std::exp(t1) > opt.r_max) return false;
        taus.push_back(t1);
        const double r = std::exp(t1);
        us.push_back(cur[0]);
        dus.push_back(cur[1] / r);
        Es.push_back(energy(n, {r, cur[0], cur[1] / r}));
        // sanity: the raw samples must decrease
        if (us.size() >= 2 && us.back() >= us[us.size() - 2]) return false;
    }

    // resample onto the output grid by re-integration (cheap) via cubic tables
    CubicTable ut(taus, us), dut(taus, dus), Et(taus, Es);
    prof.m = m;
    prof.r_start = h.r;
    prof.r_tail = std::exp(t_cut);
    prof.r = log_grid(h.r, prof.r_tail, aopt.grid_nodes);
    prof.u.resize(prof.r.size());
    prof.du.resize(prof.r.size());
    prof.E.resize(prof.r.size());
    for (size_t i = 0; i < prof.r.size(); ++i) {
        const double t = std::log(prof.r[i]);
        prof.u[i] = ut(t);
        prof.du[i] = dut(t);
        prof.E[i] = Et(t);
    }
    prof.u.front() = h.u;
    prof.du.front() = h.du;
    prof.u.back() = us.back();
    prof.du.back() = dus.back();

    // match amp * K0(kappa r) to (u, u') at r_tail: kappa K1(kappa r)/K0(kappa r)
    // equals -u'/u there; the left side increases from 0 to above kappa, so a
    // root sits in (0, -u'/u)
    const double rt = prof.r_tail;
    const double target = -dus.back() / us.back();
    if (!(target > 0.0)) return false;
    auto mismatch = [&](double k) {
        return k * gsl_sf_bessel_K1_scaled(k * rt) / gsl_sf_bessel_K0_scaled(k * rt) - target;
    };
    double ka = 1e-8, kb = target;
    if (!(mismatch(ka) < 0.0) || !(mismatch(kb) > 0.0)) return false;
    for (int i = 0; i < 200 && kb - ka > 1e-15 * kb; ++i) {
        const double km = 0.5 * (ka + kb);
        (mismatch(km) < 0.0 ? ka : kb) = km;
    }
    prof.decay_rate = 0.5 * (ka + kb);
    prof.tail_amp = us.back() / gsl_sf_bessel_K0(prof.decay_rate * rt);

    std::vector<double> logr(prof.r.size());
    for (size_t i = 0; i < prof.r.size(); ++i) logr[i] = std::log(prof.r[i]);
    prof.logr_u = CubicTable(logr, prof.u);
    prof.logr_du = CubicTable(logr, prof.du);
    return true;
}

} // namespace

SolitonProfile assemble_phistar(const EtaSolution& inner, const MstarResult& ms,
                                const OdeOptions& opt, const AssembleOptions& aopt) {
    SolitonProfile prof;
    prof.inner = &inner;
    prof.R = ms.start.R;
    prof.R_inf = ms.start.R_inf;

    auto classify_robust = [&](double m) {
        OdeOptions o = opt;
        for (int k = 0; k < 4; ++k) {
            const ShootOutcome s = classify(m, ms.start, o);
            if (s.kind != ShootKind::Inconclusive) return s.kind;
            o.r_max *= 2.0;
        }
        throw numerical_error("assemble_phistar: classification inconclusive at m = " +
                              std::to_string(m));
    };

    double m_lo = ms.m_lo, m_hi = ms.m_hi;
    const double width_tol = 1e-13 * std::max(1.0, m_hi);
    for (int i = 0; i < 64 && m_hi - m_lo > width_tol; ++i) {
        const double mid = 0.5 * (m_lo + m_hi);
        (classify_robust(mid) == ShootKind::HasZero ? m_lo : m_hi) = mid;
    }

    if (!shoot_profile(0.5 * (m_lo + m_hi), inner, opt, aopt, prof) &&
        !shoot_profile(m_hi, inner, opt, aopt, prof))
        throw numerical_error("assemble_phistar: trajectory lost positivity for both bracket "
                              "endpoints; tighten bracket_tol");
    return prof;
}

double SolitonProfile::value(double rr) const {
    if (rr <= 0.0) throw config_error("SolitonProfile::value: r must be positive");
    if (rr < r_start) return inner_profile(rr, *inner).value;
    if (rr <= r_tail) return logr_u(std::log(rr));
    // scaled Bessel form avoids underflow in K0 itself until exp(-k r) itself
    // flushes to zero, which is the right answer there
    const double k = decay_rate;
    return u.back() * (gsl_sf_bessel_K0_scaled(k * rr) / gsl_sf_bessel_K0_scaled(k * r_tail)) *
           std::exp(-k * (rr - r_tail));
}

double SolitonProfile::derivative(double rr) const {
    if (rr <= 0.0) throw config_error("SolitonProfile::derivative: r must be positive");
    if (rr < r_start) return inner_profile(rr, *inner).deriv;
    if (rr <= r_tail) return logr_du(std::log(rr));
    const double k = decay_rate;
    return -k * u.back() *
           (gsl_sf_bessel_K1_scaled(k * rr) / gsl_sf_bessel_K0_scaled(k * r_tail)) *
           std::exp(-k * (rr - r_tail));
}

double lp_norm(const SolitonProfile& prof, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw config_error("lp_norm: p must be finite, >= 1");
    // inner analytic piece in rho coordinates: 2pi * (1/2) int y^p e^{-rho} drho
    const double lambda = prof.inner->cfg.lambda;
    auto inner_f = [&](double rho) {
        return std::pow(phi_leading(rho) + prof.inner->eta_at(rho), p) * std::exp(-rho);
    };
    const double inner_part = M_PI * integrate_adaptive(inner_f, lambda, lambda + 80.0,
                                                        1e-300, 1e-10)
                                  .value;
    // table piece in tau = log r
    auto main_f = [&](double t) {
        return std::pow(prof.logr_u(t), p) * std::exp(2.0 * t);
    };
    std::vector<double> breaks;
    for (double t = std::log(prof.r_start); t < std::log(prof.r_tail); t += 5.0)
        breaks.push_back(t);
    const auto main_q = integrate_adaptive(main_f, std::log(prof.r_start),
                                           std::log(prof.r_tail), 1e-300, 1e-10, breaks);
    if (!main_q.converged)
        throw numerical_error("lp_norm: radial quadrature did not converge");
    // Bessel tail, integrated numerically over ~35 e-foldings of its decay
    auto tail_f = [&](double rr) { return std::pow(prof.value(rr), p) * rr; };
    const double r_up = prof.r_tail + 80.0 / prof.decay_rate;
    const double tail = integrate_adaptive(tail_f, prof.r_tail, r_up, 1e-300, 1e-10).value;
    return std::pow(inner_part + 2.0 * M_PI * (main_q.value + tail), 1.0 / p);
}

} // namespace singheat
