#pragma once

#include <string>
#include <vector>

#include "singheat/eta.hpp"
#include "singheat/interp.hpp"
#include "singheat/nonlinearity.hpp"

namespace singheat {

struct OdeState {
    double r = 0.0;
    double u = 0.0;
    double du = 0.0; // du/dr
};

// E_m(r) = (u')^2/2 + F_m(u); non-increasing along radial trajectories
double energy(const Nonlinearity& n, const OdeState& s);

struct OdeOptions {
    double tol = 1e-12;     // relative/absolute local error control
    double r_max = 2048.0;  // give-up radius for classification
    void validate() const;
};

// Dense radial trajectory (integrated in tau = log r)
struct Trajectory {
    std::vector<double> r, u, du, E;
};

enum class ShootKind { HasZero, StaysPositive, Inconclusive };

struct ShootOutcome {
    ShootKind kind = ShootKind::Inconclusive;
    double where = 0.0;        // event radius
    std::string certificate;   // "zero-crossing", "negative-energy", "decay"
};

// state at the asymptotic/ODE handoff radius r = exp(-lambda/2)
OdeState match_inner(const EtaSolution& inner);

struct RRinfResult {
    double R = 0.0, du_R = 0.0, R_inf = 0.0;
};
// m = 0 run from the handoff: first crossing of u=2 (R) and of u=0 (R_inf)
RRinfResult find_R_and_Rinf(const EtaSolution& inner, const OdeOptions& opt);

// classify the trajectory started at (R, 2, du_R) under f_m
ShootOutcome classify(double m, const RRinfResult& start, const OdeOptions& opt);

struct MstarResult {
    double m_lo = 0.0, m_hi = 0.0;     // final bracket
    double m_star = 0.0;               // midpoint
    RRinfResult start;
    std::vector<std::pair<double, int>> history; // (m, kind) per bisection step
};
MstarResult find_mstar(const EtaSolution& inner, double bracket_tol, const OdeOptions& opt);

// assembled singular stationary profile
struct SolitonProfile {
    double m = 0.0;            // cutoff mass used for the tail
    double r_start = 0.0;      // inner handoff
    double r_tail = 0.0;       // start of the Bessel tail model
    // tail: u(r) = amp * K0(kappa r); (amp, kappa) matched to value and
    // derivative at r_tail, so both glue residuals vanish there and the tail
    // solves the linearised far-field equation (kappa = sqrt(m) + O(u_cut^2))
    double decay_rate = 0.0;   // kappa
    double tail_amp = 0.0;     // amp
    double R = 0.0, R_inf = 0.0;
    std::vector<double> r, u, du, E; // log-spaced table on [r_start, r_tail]
    const EtaSolution* inner = nullptr;

    double value(double r) const;
    double derivative(double r) const;
    CubicTable logr_u, logr_du; // tables in log r
};

struct AssembleOptions {
    int grid_nodes = 2400;
    double u_cut = 1e-2; // tail handoff value
};

// Refines the bracket internally to ~1e-13 before shooting: the midpoint
// trajectory drifts off the critical manifold with sensitivity du/dm ~ 1e5,
// so a 1e-6 bracket is only trustworthy down to u ~ 0.05.
SolitonProfile assemble_phistar(const EtaSolution& inner, const MstarResult& ms,
                                const OdeOptions& opt, const AssembleOptions& aopt = {});

// L^p norm (2 pi int u^p r dr)^{1/p}; p = inf -> sup over grid down to r_min
double lp_norm(const SolitonProfile& prof, double p);

} // namespace singheat
