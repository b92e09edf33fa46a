#pragma once

#include <functional>
#include <vector>

namespace singheat {

// Gauss-Legendre nodes/weights on [-1,1] for n in {8, 12, 16, 24, 32}.
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_rule(int n);

// \int_a^b f dx with a single Gauss rule of order n.
double gauss_panel(const std::function<double(double)>& f, double a, double b, int n);

// Globally adaptive Gauss-Kronrod 7-15 integrator. Splits the worst panel
// until the summed error estimate drops below abs_tol + rel_tol*|I|.
// `breaks` (optional, sorted, inside [a,b]) seeds the initial subdivision.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evals = 0;
    bool converged = false;
};
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol,
                              const std::vector<double>& breaks = {},
                              int max_panels = 4000);

} // namespace singheat
