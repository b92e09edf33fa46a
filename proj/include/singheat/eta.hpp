#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "singheat/interp.hpp"

namespace singheat {

// --- leading inner profile (Emden-Fowler coordinates, rho = 2|log r|) ---

double phi_leading(double rho);       // (rho - 2 log rho)^{1/2}
double phi_leading_deriv(double rho); // d/drho
double phi_leading_dd(double rho);    // d^2/drho^2

// (1 - 2 log rho / rho)^{1/2} - 1, stable for large rho
double sqrt_corr(double rho);

// inhomogeneous forcing of the correction equation
double forcing(double rho);

// the seven nonlinear/linear remainder terms; g7 re-absorbs the 3/(16 rho^2)
// potential shift and can be excluded
std::array<double, 7> g_terms(double rho, double eta, bool include_g7 = true);

// oscillatory kernel (rho s)^{1/4} sin(sqrt(2 rho) - sqrt(2 s))
double eq_kernel(double rho, double s);

// full right-hand side F(rho, eta) = forcing + sum g_i - e^{-rho} y / 4
double rhs_total(double rho, double eta);

// --- fixed point solver ---

struct EtaConfig {
    double lambda = 100.0;   // domain starts at rho = lambda
    double rho_max = 4.0e5;  // truncation of the oscillatory integrals
    double grid_max = 2400.0; // top of the stored table
    int grid_nodes = 560;
    int quad_order = 16;   // Gauss order per half-period panel
    double fp_tol = 1e-8;  // weighted-norm stopping tolerance
    int max_iter = 48;
    void validate() const;
};

struct EtaSolution {
    EtaConfig cfg;
    std::vector<double> rho;  // grid, [lambda, grid_max]
    std::vector<double> eta;  // fixed point values
    std::vector<double> deta; // derivative from the differentiated kernel
    double weighted_norm = 0.0;      // sup rho^{3/2} |eta| / log rho over grid
    double cstar = 0.0;              // weighted norm of the first iterate T[0]
    double contraction_factor = 0.0; // max ratio of successive differences
    double contraction_bound = 0.0;  // measured Lipschitz ratio of T over
                                     // canonical ball pairs; must be <= 1/2
    double tail_budget = 0.0;        // weighted bound on the truncated tail
    int iterations = 0;

    double eta_at(double rho) const;  // table + decay-envelope extrapolation
    double deta_at(double rho) const; // derivative, same convention
    CubicTable table, dtable;
};

// weight used for all eta-space norms
inline double eta_weight(double rho) { return std::pow(rho, 1.5) / std::log(rho); }

// One application of the integral operator T to `eta_fn`, evaluated on
// `grid`. Returns values; *tail_budget (optional) receives the weighted
// bound on the neglected tail beyond cfg.rho_max.
std::vector<double> apply_T(const EtaConfig& cfg, const std::vector<double>& grid,
                            const std::function<double(double)>& eta_fn,
                            double* tail_budget = nullptr);

// Derivative of T[eta] via the rho-differentiated kernel.
std::vector<double> apply_T_deriv(const EtaConfig& cfg, const std::vector<double>& grid,
                                  const std::function<double(double)>& eta_fn,
                                  const std::vector<double>& eta_on_grid);

EtaSolution solve_eta(const EtaConfig& cfg);

// value and d/dr of the inner profile u(r) = phi(rho) + eta(rho), rho = -2 log r
struct ValueDeriv {
    double value, deriv;
};
ValueDeriv inner_profile(double r, const EtaSolution& sol);

// numeric vs leading-order value of the oscillatory model integral
//   \int_rho^inf sin(sqrt(2 rho) - sqrt(2 s)) s^{-sigma} (log s)^q ds,  q in {0,1}
struct LemSinResult {
    double numeric, leading;
};
LemSinResult oracle_lem_sin(double sigma, double rho, bool with_log);

} // namespace singheat
