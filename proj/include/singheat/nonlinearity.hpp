#pragma once

#include <cmath>

#include "singheat/errors.hpp"

namespace singheat {

// Largest u*u fed to exp(); beyond this f(u) has no finite double value.
inline constexpr double kMaxSquaredArg = 700.0;

// e^{s^2} - 1 without cancellation for small s. Throws on overflow.
double expm1_sq(double s);

// e^w - 1 - w, stable near w = 0.
double expm1m(double w);

// Smooth radial cutoff: chi(t) = 1 for |t| <= 1, 0 for |t| >= 2, quintic
// smoothstep bridge in between. Even, C^2, t*chi'(t) <= 0.
double chi(double t);
double chi_prime(double t);

// M(u) = \int_0^u chi(s) s ds, piecewise closed form. M(u >= 2) = 8/7.
double chi_moment(double u);
inline constexpr double kChiMomentTotal = 8.0 / 7.0; // \int_0^2 chi(s) s ds

// The one-parameter nonlinearity family f_m and its potential.
class Nonlinearity {
  public:
    explicit Nonlinearity(double m) : m_(m) {
        if (!(m >= 0.0)) throw config_error("Nonlinearity: m must be >= 0");
    }

    double m() const { return m_; }

    // f_m(s) = s(e^{s^2} - 1) - m chi(s) s
    double f(double s) const { return f0(s) - m_ * chi(s) * s; }

    // pure exponential part, s(e^{s^2} - 1)
    static double f0(double s) { return s * expm1_sq(s); }

    // F_m(u) = (e^{u^2} - 1 - u^2)/2 - m \int_0^u chi(s) s ds
    double F(double u) const { return 0.5 * expm1m(u * u) - m_ * chi_moment(u); }

    // G_m(u) = u f_m(u) - 2 F_m(u), direct route.
    double G(double u) const { return u * f(u) - 2.0 * F(u); }

    // G_m via the series/moment route:
    //   sum_{k>=2} ((k-1)/k!) u^{2k} + 2m [ \int_0^u chi(s)s ds - chi(u) u^2/2 ]
    double G_series(double u) const;

    double m_;
};

} // namespace singheat
