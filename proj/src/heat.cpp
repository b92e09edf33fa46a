#include "singheat/heat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include <gsl/gsl_sf_bessel.h>

#include "singheat/errors.hpp"
#include "singheat/quadrature.hpp"

namespace singheat {

namespace {

constexpr double kWindowSigmas = 12.0; // kernel window half-width in units of sqrt(4t)
constexpr double kHeadFactor = 3e-6;   // kernel is flat to ~1e-11 below this * scale
constexpr double kDuhamelSpan = 46.0;  // log-time span of the Duhamel quadrature
constexpr double kSigmaStop = 1e-38;   // analytic continuation point of the
                                       // stationary-residual time integral

// 4-point Lagrange interpolation on a sorted abscissa vector
double lagrange4(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                 size_t stride = 1, size_t offset = 0) {
    const size_t n = xs.size();
    if (n == 1) return ys[offset];
    size_t hi = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
    if (hi == 0) hi = 1;
    if (hi >= n) hi = n - 1;
    size_t i0 = (hi >= 2) ? hi - 2 : 0;
    if (i0 + 4 > n) i0 = n - std::min<size_t>(4, n);
    const size_t m = std::min<size_t>(4, n);
    double acc = 0.0;
    for (size_t a = 0; a < m; ++a) {
        double w = 1.0;
        for (size_t b = 0; b < m; ++b) {
            if (a == b) continue;
            w *= (x - xs[i0 + b]) / (xs[i0 + a] - xs[i0 + b]);
        }
        acc += w * ys[offset + (i0 + a) * stride];
    }
    return acc;
}

// Gauss-Legendre panel sum of f on [a, b]
template <class F>
double gl_panel(const F& f, double a, double b, const GaussRule& g) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t k = 0; k < g.x.size(); ++k) acc += g.w[k] * f(mid + half * g.x[k]);
    return acc * half;
}

struct Kernel {
    double r, t, inv2t;
    Kernel(double r_, double t_) : r(r_), t(t_), inv2t(0.5 / t_) {}
    // exp(-(r-q)^2/4t) i0e(rq/2t) q / (2t); integrates against phi(q) dq
    double operator()(double q) const {
        const double d = r - q;
        return std::exp(-d * d * inv2t * 0.5) * gsl_sf_bessel_I0_scaled(r * q * inv2t) * q *
               inv2t;
    }
};

std::vector<double> make_log_nodes(double a, double b, int per_decade) {
    std::vector<double> out;
    const double step = std::log(10.0) / per_decade;
    for (double x = std::log(a); x < std::log(b) + 0.5 * step; x += step)
        out.push_back(std::exp(x));
    out.back() = b;
    return out;
}

} // namespace

double heat_point(double t, const HeatProfile& phi, double r, double rel_tol) {
    if (!(t > 0.0)) throw config_error("heat_point: t must be > 0");
    const double w = std::sqrt(4.0 * t);
    const double W = kWindowSigmas * w;
    const double a = std::max(0.0, r - W);
    const double b = r + W;
    const Kernel K(r, t);

    double head = 0.0;
    double lo = a;
    if (a == 0.0 && phi.head_mass) {
        double s_head = std::min(kHeadFactor * w, kHeadFactor * 4.0 * t / std::max(r, w));
        s_head = std::min(s_head, phi.head_limit);
        if (s_head > 0.0) {
            head = std::exp(-r * r / (4.0 * t)) * (0.5 / t) * phi.head_mass(s_head);
            lo = s_head;
        }
    }

    if (a > 0.0) {
        // the window excludes the origin; integrate in x = (q - r)/w so that
        // quadrature node placement is exact even when w << ulp scale of r
        auto fx = [&](double x) {
            const double q = r + x * w;
            return std::exp(-x * x) * gsl_sf_bessel_I0_scaled(r * q * K.inv2t) * q * K.inv2t *
                   w * phi.value(q);
        };
        std::vector<double> xbreaks = {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0};
        for (double h : phi.scale_hints)
            if (h > a && h < b) xbreaks.push_back((h - r) / w);
        double probe = 0.0;
        for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0})
            probe = std::max(probe, std::fabs(fx(x)) * 4.0);
        const double abs_tol = std::max(1e-300, 1e-3 * rel_tol * probe);
        QuadResult qr = integrate_adaptive(fx, -kWindowSigmas, kWindowSigmas, abs_tol, rel_tol,
                                           xbreaks, 8000);
        if (!qr.converged)
            throw numerical_error("heat_point: kernel quadrature did not converge");
        return qr.value;
    }

    std::set<double> bset;
    for (double m : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
        const double q = r + m * w;
        if (q > lo && q < b) bset.insert(q);
    }
    // geometric chain from the lower end: resolves log-type integrands
    for (double q = lo * 10.0; q < b && q > 0.0; q *= 10.0) bset.insert(q);
    for (double h : phi.scale_hints) {
        for (double m : {0.25, 1.0, 4.0}) {
            const double q = h * m;
            if (q > lo && q < b) bset.insert(q);
        }
        for (double q = h * 10.0; q < b; q *= 10.0) bset.insert(q);
    }
    std::vector<double> breaks(bset.begin(), bset.end());

    auto f = [&](double q) { return K(q) * phi.value(q); };
    // absolute floor from a coarse scale probe so exact cancellations converge
    double probe = std::fabs(head);
    for (double m : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double q = std::min(b, std::max(lo * (1.0 + 1e-12), r + m * w));
        if (q > 0.0) probe = std::max(probe, std::fabs(f(q)) * 4.0 * w);
    }
    const double abs_tol = std::max(1e-300, 1e-3 * rel_tol * probe);
    QuadResult qr = integrate_adaptive(f, lo, b, abs_tol, rel_tol, breaks, 8000);
    if (!qr.converged)
        throw numerical_error("heat_point: kernel quadrature did not converge");
    return head + qr.value;
}

std::vector<double> heat_apply(double t, const HeatProfile& phi,
                               const std::vector<double>& radii, double rel_tol) {
    std::vector<double> out(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) out[i] = heat_point(t, phi, radii[i], rel_tol);
    return out;
}

HeatProfile table_profile(std::vector<double> r, std::vector<double> u, double origin) {
    if (r.size() != u.size() || r.size() < 4)
        throw config_error("table_profile: need matching tables, >= 4 points");
    std::vector<double> lnr(r.size());
    for (size_t i = 0; i < r.size(); ++i) lnr[i] = std::log(r[i]);
    auto rr = std::make_shared<std::vector<double>>(std::move(lnr));
    auto uu = std::make_shared<std::vector<double>>(std::move(u));
    const double r0 = r.front(), rn = r.back();
    HeatProfile p;
    p.value = [rr, uu, r0, rn, origin](double q) -> double {
        if (q >= rn) return 0.0;
        if (q <= r0) {
            const double f = (q / r0) * (q / r0);
            return origin + ((*uu)[0] - origin) * f;
        }
        return lagrange4(*rr, *uu, std::log(q));
    };
    return p;
}

// --- phi* and f_{m*}(phi*) as convolution profiles ---

namespace {

// cumulative mass table: M(s) = seed + int_{s_lo}^{s} f(q) q dq on a log grid,
// returned as a profile-ready interpolant of log M vs log s
std::function<double(double)> cumulative_mass(const std::function<double(double)>& f,
                                              double s_lo, double s_hi, double seed) {
    const std::vector<double> s = make_log_nodes(s_lo, s_hi, 8);
    const GaussRule& g = gauss_rule(12);
    auto lns = std::make_shared<std::vector<double>>();
    auto lnM = std::make_shared<std::vector<double>>();
    double M = seed;
    lns->push_back(std::log(s[0]));
    lnM->push_back(std::log(std::max(M, 1e-300)));
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        M += gl_panel([&](double q) { return f(q) * q; }, s[k], s[k + 1], g);
        lns->push_back(std::log(s[k + 1]));
        lnM->push_back(std::log(std::max(M, 1e-300)));
    }
    return [lns, lnM](double q) { return std::exp(lagrange4(*lns, *lnM, std::log(q))); };
}

} // namespace

HeatProfile phistar_heat_profile(const SolitonProfile& prof) {
    const SolitonProfile* p = &prof;
    HeatProfile hp;
    hp.value = [p](double q) { return p->value(q); };
    // the seed mass below s = 1e-26 is (1/2) int_rho^inf y e^{-rho} drho ~ e^{-120}: negligible
    hp.head_mass = cumulative_mass(hp.value, 1e-26, 1e-3, 0.0);
    hp.head_limit = 1e-3;
    return hp;
}

HeatProfile fm_phistar_heat_profile(const SolitonProfile& prof) {
    const SolitonProfile* p = &prof;
    const double m = prof.m;
    HeatProfile hp;
    hp.value = [p, m](double q) { return Nonlinearity(m).f(p->value(q)); };

    // Seed: M(s0) = (1/2) int_{rho0}^inf y e^{y^2 - rho} drho at rho0 = -2 log s0,
    // with e^{y^2-rho} = rho^{-2} e^{2 phi eta + eta^2} (y = phi_leading + eta), which
    // decays only like rho^{-3/2}: integrate on the eta table, then on its fitted
    // large-rho form A rho^{-3/2} log rho + B rho^{-3/2}, then a closed-form remainder.
    const EtaSolution& sol = *prof.inner;
    const double s0 = 1e-26;
    const double rho0 = -2.0 * std::log(s0);
    const double gm = sol.rho.back();

    // least-squares fit of eta on the top octave of the table
    double S11 = 0, S12 = 0, S22 = 0, b1 = 0, b2 = 0;
    for (size_t i = 0; i < sol.rho.size(); ++i) {
        const double rho = sol.rho[i];
        if (rho < 0.5 * gm) continue;
        const double f1 = std::pow(rho, -1.5) * std::log(rho), f2 = std::pow(rho, -1.5);
        S11 += f1 * f1;
        S12 += f1 * f2;
        S22 += f2 * f2;
        b1 += f1 * sol.eta[i];
        b2 += f2 * sol.eta[i];
    }
    const double det = S11 * S22 - S12 * S12;
    const double fitA = (b1 * S22 - b2 * S12) / det;
    const double fitB = (S11 * b2 - S12 * b1) / det;

    auto g_of = [&sol, fitA, fitB, gm, m](double rho) {
        const double eta = (rho <= gm)
                               ? sol.eta_at(rho)
                               : std::pow(rho, -1.5) * (fitA * std::log(rho) + fitB);
        const double ph = phi_leading(rho);
        const double y = ph + eta;
        double g = y * std::exp(2.0 * ph * eta + eta * eta) / (rho * rho);
        if (rho < 80.0) {
            const double e = std::exp(-rho);
            g -= y * e * (1.0 + m * chi(y));
        }
        return g;
    };
    const GaussRule& g12 = gauss_rule(12);
    const double rho_end = 3e10;
    double seed = 0.0;
    {
        const std::vector<double> nodes = make_log_nodes(rho0, rho_end, 4);
        for (size_t k = 0; k + 1 < nodes.size(); ++k)
            seed += gl_panel(g_of, nodes[k], nodes[k + 1], g12);
        // remaining tail with g ~ c rho^{-3/2}: int_E^inf g drho = 2 g(E) E
        seed += 2.0 * g_of(rho_end) * rho_end;
        seed *= 0.5;
    }
    hp.head_mass = cumulative_mass(hp.value, s0, 1e-7, seed);
    hp.head_limit = 1e-7;
    return hp;
}

double epsilon_scale(const SolitonProfile& prof) {
    auto cond = [&prof](double r) {
        const double rho = -2.0 * std::log(r);
        const double u = prof.value(r);
        return u * u - (rho - 2.0 * std::log(rho) - 5.0);
    };
    const std::vector<double> rs = make_log_nodes(1e-4, 0.995, 64);
    double lo = 0.0, hi = 0.0;
    for (size_t i = rs.size(); i-- > 0;) {
        if (cond(rs[i]) >= 0.0) {
            lo = rs[i];
            hi = (i + 1 < rs.size()) ? rs[i + 1] : rs[i];
            break;
        }
    }
    if (lo == 0.0) throw numerical_error("epsilon_scale: asymptotic region not found");
    if (hi == lo) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cond(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void HeatConfig::validate() const {
    if (!(T > 0.0)) throw config_error("HeatConfig: T must be > 0");
    if (epsilon > 0.0 && !(T < epsilon * epsilon))
        throw config_error("HeatConfig: T must be < epsilon^2");
    if (time_nodes.empty() || radial_grid.empty())
        throw config_error("HeatConfig: empty grids");
    for (size_t i = 0; i < time_nodes.size(); ++i) {
        if (!(time_nodes[i] > 0.0) || time_nodes[i] > T * (1.0 + 1e-12))
            throw config_error("HeatConfig: time nodes must lie in (0, T]");
        if (i > 0 && time_nodes[i] <= time_nodes[i - 1])
            throw config_error("HeatConfig: time nodes must increase");
    }
    for (size_t i = 0; i < radial_grid.size(); ++i) {
        if (!(radial_grid[i] > 0.0) || (i > 0 && radial_grid[i] <= radial_grid[i - 1]))
            throw config_error("HeatConfig: radial grid must be positive increasing");
    }
    if (!(picard_tol > 0.0)) throw config_error("HeatConfig: picard_tol must be > 0");
    if (duhamel_nodes < 32) throw config_error("HeatConfig: duhamel_nodes too small");
    if (conv_quad_order < 6 || conv_quad_order > 13)
        throw config_error("HeatConfig: conv_quad_order out of range");
    if (picard_max_iter < 1) throw config_error("HeatConfig: picard_max_iter must be >= 1");
}

namespace {

std::vector<double> make_time_nodes(double T) {
    std::vector<double> t;
    for (double x = 1e-12; x < T * (1.0 - 1e-9); x *= std::pow(10.0, 1.0 / 3.0))
        t.push_back(x);
    t.push_back(T);
    t.push_back(0.25 * T);
    t.push_back(0.5 * T);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-9 * b; }),
            t.end());
    return t;
}

} // namespace

HeatConfig default_heat_config(const SolitonProfile& prof) {
    HeatConfig cfg;
    cfg.epsilon = epsilon_scale(prof);
    cfg.T = std::min(1e-4, cfg.epsilon * cfg.epsilon / 10.0);
    cfg.time_nodes = make_time_nodes(cfg.T);
    cfg.radial_grid = make_log_nodes(1e-17, 50.0, 7);
    return cfg;
}

double EnvelopeOracle::F0(double t, double r) const {
    const double z = t + r * r;
    const double lg = std::fabs(std::log(std::min(z, epsilon * epsilon)));
    return (1.0 / z + 1.0 / (epsilon * epsilon)) * std::pow(lg, -1.5);
}

double EnvelopeOracle::F0_prime(double t, double r) const {
    const double z = t + r * r;
    const double lg = std::fabs(std::log(std::min(z, epsilon * epsilon)));
    return (1.0 / z + 1.0 / (epsilon * epsilon)) / lg;
}

// --- RadialField ---

std::vector<double> RadialField::slice(double t) const {
    std::vector<double> out(radii.size());
    std::vector<double> lnt(times.size());
    for (size_t i = 0; i < times.size(); ++i) lnt[i] = std::log(times[i]);
    double x = std::log(t);
    double scale = 1.0;
    if (t < times.front()) {
        if (ell32_extrapolate) scale = std::pow(ell_of(times.front()) / ell_of(t), 1.5);
        x = lnt.front();
    } else if (t > times.back()) {
        x = lnt.back();
    }
    // column-wise interpolation in log t over the flattened [time][radius] array
    std::vector<double> col(times.size());
    for (size_t j = 0; j < radii.size(); ++j) {
        for (size_t i = 0; i < times.size(); ++i) col[i] = values[i][j];
        out[j] = scale * lagrange4(lnt, col, x);
    }
    return out;
}

double RadialField::origin(double t) const {
    std::vector<double> lnt(times.size());
    for (size_t i = 0; i < times.size(); ++i) lnt[i] = std::log(times[i]);
    double x = std::log(t);
    double scale = 1.0;
    if (t < times.front()) {
        if (ell32_extrapolate) scale = std::pow(ell_of(times.front()) / ell_of(t), 1.5);
        x = lnt.front();
    } else if (t > times.back()) {
        x = lnt.back();
    }
    return scale * lagrange4(lnt, at_origin, x);
}

double RadialField::sup(size_t i) const {
    double m = std::fabs(at_origin[i]);
    for (double v : values[i]) m = std::max(m, std::fabs(v));
    return m;
}

MonotonicityReport monotonicity_check(const HeatProfile& phi, const std::vector<double>& t_list,
                                      const std::vector<double>& radii, double rel_tol) {
    MonotonicityReport rep;
    std::vector<double> all;
    all.push_back(0.0);
    all.insert(all.end(), radii.begin(), radii.end());
    for (double t : t_list) {
        const std::vector<double> u = heat_apply(t, phi, all, rel_tol);
        for (size_t i = 0; i + 1 < u.size(); ++i) {
            const double scale = std::max(std::fabs(u[i]), std::fabs(u[i + 1]));
            const double gap = u[i + 1] - u[i] - 1e-10 * scale;
            if (gap > rep.worst_gap) {
                rep.worst_gap = gap;
                rep.worst_r = all[i + 1];
                rep.worst_t = t;
                rep.ok = false;
            }
        }
    }
    return rep;
}

IntegralFormulaResult oracle_integral_formula(double eps, double alpha, double t,
                                              int duhamel_nodes) {
    if (!(t > 0.0 && t < eps * eps))
        throw config_error("oracle_integral_formula: need 0 < t < eps^2");
    std::vector<double> radii = make_log_nodes(1e-8, 1.0, 2);
    radii.insert(radii.begin(), 0.0);
    const int npan = std::max(4, duhamel_nodes / 8);
    const GaussRule& g8 = gauss_rule(8);
    std::vector<double> sharp(radii.size(), 0.0), flat(radii.size(), 0.0);
    for (int p = 0; p < npan; ++p) {
        const double wlo = kDuhamelSpan * p / npan, whi = kDuhamelSpan * (p + 1) / npan;
        const double mid = 0.5 * (wlo + whi), half = 0.5 * (whi - wlo);
        for (size_t k = 0; k < g8.x.size(); ++k) {
            const double w = mid + half * g8.x[k];
            const double s = t * std::exp(-w);
            const double tau = -t * std::expm1(-w);
            HeatProfile sharp_p, flat_p;
            sharp_p.value = [s, eps, alpha](double q) {
                const double z = s + q * q;
                return std::pow(std::fabs(std::log(std::min(z, eps * eps))), -alpha) / z;
            };
            flat_p.value = [s, eps, alpha](double q) {
                const double z = s + q * q;
                return std::pow(std::fabs(std::log(std::min(z, eps * eps))), -alpha);
            };
            sharp_p.scale_hints = {std::sqrt(s)};
            flat_p.scale_hints = {std::sqrt(s)};
            for (size_t j = 0; j < radii.size(); ++j) {
                sharp[j] += g8.w[k] * half * s * heat_point(tau, sharp_p, radii[j], 1e-8);
                flat[j] += g8.w[k] * half * s * heat_point(tau, flat_p, radii[j], 1e-8);
            }
        }
    }
    IntegralFormulaResult res;
    // the bound is pointwise in r with the same log weight as the integrand
    for (size_t j = 0; j < radii.size(); ++j) {
        const double z = std::min(t + radii[j] * radii[j], eps * eps);
        const double la = std::pow(std::fabs(std::log(z)), alpha);
        res.cstar_sharp = std::max(res.cstar_sharp, sharp[j] * la);
        res.cstar_flat = std::max(res.cstar_flat, flat[j] * la / t);
    }
    return res;
}

// --- Evolution ---

Evolution::Evolution(HeatConfig cfg, const SolitonProfile& prof)
    : cfg_(std::move(cfg)), prof_(&prof) {
    cfg_.validate();
    phi_ = phistar_heat_profile(prof);
    psi_ = fm_phistar_heat_profile(prof);
    kernel_tol_ = std::pow(10.0, -cfg_.conv_quad_order);
    lnr_.resize(cfg_.radial_grid.size());
    for (size_t i = 0; i < lnr_.size(); ++i) lnr_[i] = std::log(cfg_.radial_grid[i]);
}

const std::vector<double>& Evolution::u0_values(double t) const {
    auto it = u0_cache_.find(t);
    if (it != u0_cache_.end()) return it->second;
    std::vector<double> all;
    all.push_back(0.0);
    all.insert(all.end(), cfg_.radial_grid.begin(), cfg_.radial_grid.end());
    return u0_cache_.emplace(t, heat_apply(t, phi_, all, kernel_tol_)).first->second;
}

double Evolution::u0_origin(double t) const { return u0_values(t)[0]; }

RadialField Evolution::u0_field() const {
    RadialField f;
    f.times = cfg_.time_nodes;
    f.radii = cfg_.radial_grid;
    for (double t : f.times) {
        const std::vector<double>& u = u0_values(t);
        f.at_origin.push_back(u[0]);
        f.values.emplace_back(u.begin() + 1, u.end());
    }
    return f;
}

void Evolution::build_u0_table() const {
    if (!u0_lns_.empty()) return;
    const double lo = std::log(1e-33), hi = std::log(cfg_.T);
    const int per_decade = 6;
    const int n = static_cast<int>(std::ceil((hi - lo) / (std::log(10.0) / per_decade))) + 1;
    const double h = (hi - lo) / (n - 1);
    std::vector<double> all;
    all.push_back(0.0);
    all.insert(all.end(), cfg_.radial_grid.begin(), cfg_.radial_grid.end());
    for (int i = 0; i < n; ++i) {
        const double s = std::exp(lo + i * h);
        u0_lns_.push_back(lo + i * h);
        u0_tab_.push_back(heat_apply(s, phi_, all, kernel_tol_));
    }
}

std::vector<double> Evolution::u0_table_slice(double s) const {
    build_u0_table();
    const double x = std::log(s);
    std::vector<double> out(cfg_.radial_grid.size() + 1);
    std::vector<double> col(u0_lns_.size());
    for (size_t j = 0; j < out.size(); ++j) {
        for (size_t i = 0; i < u0_lns_.size(); ++i) col[i] = u0_tab_[i][j];
        out[j] = lagrange4(u0_lns_, col, x);
    }
    return out;
}

std::vector<double> Evolution::field_slice(const RadialField* v, double s) const {
    std::vector<double> out(cfg_.radial_grid.size() + 1, 0.0);
    if (!v) return out;
    out[0] = v->origin(s);
    const std::vector<double> sl = v->slice(s);
    std::copy(sl.begin(), sl.end(), out.begin() + 1);
    return out;
}

// interpolate a slice given on {0} U grid at radius q
double Evolution::slice_point(double /*tau*/, const std::vector<double>& sv, double q) const {
    const std::vector<double>& r = cfg_.radial_grid;
    if (q >= r.back()) return 0.0;
    if (q <= r.front()) {
        const double f = (q / r.front()) * (q / r.front());
        return sv[0] + (sv[1] - sv[0]) * f;
    }
    return lagrange4(lnr_, sv, std::log(q), 1, 1);
}

namespace {

// deterministic composite convolution rule: panels depend only on (tau, r, q_floor),
// never on the integrand, so the Picard map stays a fixed smooth map
template <class G>
double fixed_conv(double tau, const G& g, double r, double q_floor) {
    const double w = std::sqrt(4.0 * tau);
    const double W = kWindowSigmas * w;
    const double a = std::max(0.0, r - W);
    const double b = r + W;
    const Kernel K(r, tau);
    const GaussRule& g8 = gauss_rule(8);
    auto f = [&](double q) { return K(q) * g(q); };
    double acc = 0.0;
    if (a > 0.0) {
        // mass below the window is damped by at least e^{-144}: window only.
        // Integrate in x = (q - r)/w so node placement stays exact when w is
        // far below the ulp scale of r.
        auto fx = [&](double x) {
            const double q = r + x * w;
            return std::exp(-x * x) * gsl_sf_bessel_I0_scaled(r * q * K.inv2t) * q * K.inv2t *
                   w * g(q);
        };
        const int n = 12;
        for (int i = 0; i < n; ++i)
            acc += gl_panel(fx, -kWindowSigmas + 2.0 * kWindowSigmas * i / n,
                            -kWindowSigmas + 2.0 * kWindowSigmas * (i + 1) / n, g8);
        return acc;
    }
    const double qg = std::max(q_floor * 1.0001, b / 16.0);
    // geometric panels resolve the log-type inner region, then width ~ w panels
    // across the kernel window
    const double ratio = std::sqrt(10.0);
    std::vector<double> edges;
    for (double q = qg; q > q_floor * 1.001; q /= ratio) edges.push_back(q);
    edges.push_back(q_floor);
    std::reverse(edges.begin(), edges.end());
    const int n = std::min(64, static_cast<int>(std::ceil((b - qg) / w)));
    for (int i = 0; i < n; ++i)
        edges.push_back(qg + (b - qg) * (i + 1.0) / n);
    for (size_t i = 0; i + 1 < edges.size(); ++i)
        acc += gl_panel(f, edges[i], edges[i + 1], g8);
    return acc;
}

} // namespace

std::vector<double> Evolution::duhamel(double t, const RadialField* v, Part part,
                                       int nodes_override) const {
    const int nodes = nodes_override > 0 ? nodes_override : cfg_.duhamel_nodes;
    const int npan = std::max(4, nodes / 8);
    const GaussRule& g8 = gauss_rule(8);
    const double m = prof_->m;
    std::vector<double> out(cfg_.radial_grid.size() + 1, 0.0);
    const double q_floor = cfg_.radial_grid.front();
    for (int p = 0; p < npan; ++p) {
        const double wlo = kDuhamelSpan * p / npan, whi = kDuhamelSpan * (p + 1) / npan;
        const double mid = 0.5 * (wlo + whi), half = 0.5 * (whi - wlo);
        for (size_t k = 0; k < g8.x.size(); ++k) {
            const double wx = mid + half * g8.x[k];
            const double s = t * std::exp(-wx);
            const double tau = -t * std::expm1(-wx);
            std::vector<double> us = u0_table_slice(s);
            if (v) {
                const std::vector<double> vs = field_slice(v, s);
                for (size_t j = 0; j < us.size(); ++j) us[j] += vs[j];
            }
            auto G = [&](double q) -> double {
                const double u = slice_point(tau, us, q);
                switch (part) {
                    case Part::Exponential: return Nonlinearity::f0(u);
                    case Part::Linear: return m * chi(u) * u;
                    default: return Nonlinearity::f0(u) - m * chi(u) * u;
                }
            };
            const double wt = g8.w[k] * half * s; // ds = s dw
            out[0] += wt * fixed_conv(tau, G, 0.0, q_floor);
            for (size_t j = 0; j < cfg_.radial_grid.size(); ++j)
                out[j + 1] += wt * fixed_conv(tau, G, cfg_.radial_grid[j], q_floor);
        }
    }
    return out;
}

Evolution::PicardResult Evolution::picard_solve() const {
    const int shrink_cap = 6;
    PicardResult res;
    double T = cfg_.T;
    std::vector<double> times = cfg_.time_nodes;
    for (int shrink = 0; shrink <= shrink_cap; ++shrink, T *= 0.25, times = make_time_nodes(T)) {
        RadialField v;
        v.times = times;
        v.radii = cfg_.radial_grid;
        v.values.assign(times.size(), std::vector<double>(cfg_.radial_grid.size(), 0.0));
        v.at_origin.assign(times.size(), 0.0);
        v.ell32_extrapolate = true;
        res.defects.clear();
        res.ratios.clear();
        res.converged = false;
        for (int it = 1; it <= cfg_.picard_max_iter; ++it) {
            double defect = 0.0;
            RadialField next = v;
            for (size_t i = 0; i < times.size(); ++i) {
                const std::vector<double> ivals = duhamel(times[i], &v, Part::Full);
                double dmax = std::fabs(ivals[0] - v.at_origin[i]);
                next.at_origin[i] = ivals[0];
                for (size_t j = 0; j < cfg_.radial_grid.size(); ++j) {
                    dmax = std::max(dmax, std::fabs(ivals[j + 1] - v.values[i][j]));
                    next.values[i][j] = ivals[j + 1];
                }
                defect = std::max(defect, std::sqrt(ell_of(times[i])) * dmax);
            }
            v = std::move(next);
            if (!res.defects.empty())
                res.ratios.push_back(defect / res.defects.back());
            res.defects.push_back(defect);
            if (it == 1) res.first_norm = defect;
            res.iterations = it;
            if (defect < cfg_.picard_tol) {
                res.converged = true;
                break;
            }
        }
        bool contracting = res.converged;
        for (double r : res.ratios)
            if (!(r < 1.0)) contracting = false;
        if (contracting) {
            res.v = std::move(v);
            res.T_used = T;
            res.shrinks = shrink;
            res.x_half = 0.0;
            res.x_three_half = 0.0;
            for (size_t i = 0; i < res.v.times.size(); ++i) {
                const double l = ell_of(res.v.times[i]);
                res.x_half = std::max(res.x_half, std::sqrt(l) * res.v.sup(i));
                res.x_three_half = std::max(res.x_three_half, std::pow(l, 1.5) * res.v.sup(i));
            }
            return res;
        }
    }
    throw numerical_error("picard_solve: no contraction after the T-shrink cap");
}

double Evolution::stationary_residual(double t, double p) const {
    static thread_local std::map<const Evolution*, std::map<double, std::vector<double>>> qcache;
    std::vector<double>& Q = qcache[this][t];
    const std::vector<double>& grid = cfg_.radial_grid;
    if (Q.empty()) {
        Q.assign(grid.size(), 0.0);
        const double WQ = std::log(t / kSigmaStop);
        const int npan = static_cast<int>(std::ceil(WQ / 2.0));
        const GaussRule& g8 = gauss_rule(8);
        for (int pa = 0; pa < npan; ++pa) {
            const double wlo = WQ * pa / npan, whi = WQ * (pa + 1) / npan;
            const double mid = 0.5 * (wlo + whi), half = 0.5 * (whi - wlo);
            for (size_t k = 0; k < g8.x.size(); ++k) {
                const double w = mid + half * g8.x[k];
                const double sg = t * std::exp(-w);
                const std::vector<double> sl = heat_apply(sg, psi_, grid, kernel_tol_);
                for (size_t j = 0; j < grid.size(); ++j)
                    Q[j] += g8.w[k] * half * sg * sl[j];
            }
        }
        // below sigma = kSigmaStop the semigroup is the identity to O(sigma^2/r^4)
        for (size_t j = 0; j < grid.size(); ++j) Q[j] += kSigmaStop * psi_.value(grid[j]);
    }
    const std::vector<double>& u0 = u0_values(t);
    std::vector<double> res(grid.size() + 1, 0.0);
    for (size_t j = 0; j < grid.size(); ++j)
        res[j + 1] = prof_->value(grid[j]) - u0[j + 1] - Q[j];
    return lp_on_grid(res, p);
}

double Evolution::regular_residual(const RadialField& v, double t, double p) const {
    const std::vector<double> ivals = duhamel(t, &v, Part::Full);
    std::vector<double> res(cfg_.radial_grid.size() + 1);
    res[0] = v.origin(t) - ivals[0];
    const std::vector<double> sl = v.slice(t);
    for (size_t j = 0; j < sl.size(); ++j) res[j + 1] = sl[j] - ivals[j + 1];
    return lp_on_grid(res, p);
}

double Evolution::lp_on_grid(const std::vector<double>& vals, double p) const {
    const std::vector<double>& r = cfg_.radial_grid;
    double acc = std::pow(std::fabs(vals[0]), p) * M_PI * r.front() * r.front();
    for (size_t j = 0; j + 1 < r.size(); ++j) {
        const double ga = std::pow(std::fabs(vals[j + 1]), p) * r[j] * r[j];
        const double gb = std::pow(std::fabs(vals[j + 2]), p) * r[j + 1] * r[j + 1];
        acc += M_PI * (ga + gb) * (lnr_[j + 1] - lnr_[j]);
    }
    return std::pow(acc, 1.0 / p);
}

double Evolution::sup_L() const {
    double m = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double u = 2.0 * i / 2000.0;
        m = std::max(m, chi(u) * u);
    }
    return prof_->m * m;
}

double Evolution::lip_L() const {
    double m = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double u = 2.0 * i / 2000.0;
        m = std::max(m, std::fabs(chi(u) + u * chi_prime(u)));
    }
    return prof_->m * m;
}

NonuniquenessReport nonuniqueness_report(const Evolution& ev,
                                         const Evolution::PicardResult& pr) {
    NonuniquenessReport rep;
    const SolitonProfile& prof = ev.profile();
    rep.T = pr.T_used;
    rep.epsilon = ev.config().epsilon;
    rep.m = prof.m;
    for (double t : pr.v.times) {
        if (t < 1e-10) continue;
        const std::vector<double>& u0 = ev.u0_values(t);
        const std::vector<double> vs = pr.v.slice(t);
        double sup = std::fabs(u0[0] + pr.v.origin(t));
        for (size_t j = 0; j < vs.size(); ++j)
            sup = std::max(sup, std::fabs(u0[j + 1] + vs[j]));
        rep.times.push_back(t);
        rep.uR_sup.push_back(sup);
        rep.uR_over_phistar.push_back(sup / prof.value(std::sqrt(t)));
    }
    rep.rmin_decades = {1e-26, 1e-24, 1e-22};
    for (double rm : rep.rmin_decades)
        rep.uS_sup_ratio.push_back(prof.value(rm) / std::sqrt(-2.0 * std::log(rm)));

    const double Th = 0.5 * rep.T, Tq = 0.25 * rep.T;
    const std::vector<double>& grid = ev.config().radial_grid;
    const std::vector<double>& u0h = ev.u0_values(Th);
    const std::vector<double> vh = pr.v.slice(Th);
    std::vector<double> diff(grid.size() + 1, 0.0);
    for (size_t j = 0; j < grid.size(); ++j)
        diff[j + 1] = u0h[j + 1] + vh[j] - prof.value(grid[j]);
    rep.sep_L2 = ev.lp_on_grid(diff, 2.0);
    rep.sep_L4 = ev.lp_on_grid(diff, 4.0);
    rep.resS_L2 = ev.stationary_residual(Th, 2.0);
    rep.resS_L4 = ev.stationary_residual(Th, 4.0);
    rep.resS_L2_q = ev.stationary_residual(Tq, 2.0);
    rep.resS_L4_q = ev.stationary_residual(Tq, 4.0);
    rep.resR_L2 = ev.regular_residual(pr.v, Th, 2.0);
    rep.resR_L4 = ev.regular_residual(pr.v, Th, 4.0);
    rep.resR_L2_q = ev.regular_residual(pr.v, Tq, 2.0);
    rep.resR_L4_q = ev.regular_residual(pr.v, Tq, 4.0);
    return rep;
}

} // namespace singheat
