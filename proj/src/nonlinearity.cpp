#include "singheat/nonlinearity.hpp"

#include <string>

namespace singheat {

double expm1_sq(double s) {
    const double q = s * s;
    if (q > kMaxSquaredArg)
        throw overflow_error("expm1_sq: u^2 = " + std::to_string(q) + " exceeds exp() range");
    return std::expm1(q);
}

double expm1m(double w) {
    if (w > kMaxSquaredArg)
        throw overflow_error("expm1m: argument " + std::to_string(w) + " exceeds exp() range");
    if (std::fabs(w) > 1e-3) return std::expm1(w) - w;
    // series w^2/2 (1 + w/3 + w^2/12 + w^3/60)
    return 0.5 * w * w * (1.0 + w / 3.0 * (1.0 + w / 4.0 * (1.0 + w / 5.0)));
}

namespace {

// smoothstep on [0,1]
inline double sstep(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
inline double sstep_prime(double x) { return 30.0 * x * x * (1.0 - x) * (1.0 - x); }

} // namespace

double chi(double t) {
    const double a = std::fabs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 1.0 - sstep(a - 1.0);
}

double chi_prime(double t) {
    const double a = std::fabs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double d = -sstep_prime(a - 1.0);
    return t >= 0.0 ? d : -d;
}

double chi_moment(double u) {
    const double a = std::fabs(u);
    if (a <= 1.0) return 0.5 * a * a;
    if (a >= 2.0) return kChiMomentTotal;
    // \int_1^a (1 - sstep(s-1)) s ds, with x = s - 1:
    //   \int_0^{a-1} (1 - 10x^3 + 15x^4 - 6x^5)(x + 1) dx
    // term-by-term antiderivative in x:
    // integrand expands to 1 + s - 10 s^3 + 5 s^4 + 9 s^5 - 6 s^6
    const double x = a - 1.0;
    const double x2 = x * x;
    const double poly =
        x * (1.0 + x * (0.5 + x2 * (-2.5 + x * (1.0 + x * (1.5 + x * (-6.0 / 7.0))))));
    return 0.5 + poly;
}

double Nonlinearity::G_series(double u) const {
    const double q = u * u;
    if (q > kMaxSquaredArg)
        throw overflow_error("G_series: u^2 exceeds exp() range");
    // sum_{k>=2} ((k-1)/k!) q^k
    double sum = 0.0;
    double term = q * q / 2.0; // k = 2: (1/2!) q^2
    for (int k = 2; k < 400; ++k) {
        sum += term * (k - 1);
        term *= q / (k + 1);
        if (term * (k + 1) < 1e-18 * (sum + 1e-300) && k > 4) break;
    }
    return sum + 2.0 * m_ * (chi_moment(u) - chi(u) * 0.5 * u * u);
}

} // namespace singheat
