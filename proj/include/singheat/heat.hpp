#pragma once

#include <functional>
#include <map>
#include <vector>

#include "singheat/shooting.hpp"

namespace singheat {

// ell(t) = |log t|, the weight of all time-weighted norms
inline double ell_of(double t) { return std::fabs(std::log(t)); }

// A radial profile fed to the heat-kernel convolution. value(s) must be
// defined for every s > 0. head_mass (optional) supplies M(s) = int_0^s
// value(q) q dq in semi-analytic form for s <= head_limit; it is required
// when value has a log-type singularity at the origin whose mass converges
// too slowly in s for direct quadrature (phi* and f_{m*}(phi*)).
struct HeatProfile {
    std::function<double(double)> value;
    std::function<double(double)> head_mass;
    double head_limit = 0.0;
    std::vector<double> scale_hints; // interior length scales, seed quadrature breaks
};

// (e^{t Delta} phi)(r) = (1/2t) int_0^inf exp(-(r-s)^2/4t) i0e(rs/2t) phi(s) s ds
// with i0e the exponentially scaled modified Bessel I0 (no overflow for t << r^2).
double heat_point(double t, const HeatProfile& phi, double r, double rel_tol = 1e-10);
std::vector<double> heat_apply(double t, const HeatProfile& phi,
                               const std::vector<double>& radii, double rel_tol = 1e-10);

// wrap a tabulated slice: cubic in log r on [r.front(), r.back()], quadratic
// blend to `origin` below the table, zero beyond it
HeatProfile table_profile(std::vector<double> r, std::vector<double> u, double origin);

// phi* and f_{m*}(phi*) as convolution-ready profiles (analytic head mass
// accumulated in rho = -2 log s coordinates, where the integrand is stable)
HeatProfile phistar_heat_profile(const SolitonProfile& prof);
HeatProfile fm_phistar_heat_profile(const SolitonProfile& prof);

// largest r with phi*(r)^2 >= |log r^2| - 2 log |log r^2| - 5: the radius up
// to which the profile follows its small-r asymptote with O(1) slack
double epsilon_scale(const SolitonProfile& prof);

struct HeatConfig {
    double T = 0.0;                  // time horizon
    double epsilon = 0.0;            // validity scale recorded from the profile
    std::vector<double> time_nodes;  // increasing evaluation times in (0, T]
    std::vector<double> radial_grid; // log-spaced radii (excludes r = 0)
    int conv_quad_order = 10;        // kernel quadrature rel tol = 10^{-order}
    int duhamel_nodes = 96;          // nodes of the Duhamel time quadrature
    double picard_tol = 1e-10;       // weighted sup-norm stopping tolerance
    int picard_max_iter = 20;
    void validate() const;
};
HeatConfig default_heat_config(const SolitonProfile& prof);

// closed-form envelopes for u0 e^{u0^2} (F0) and u0^2 e^{u0^2} (F0_prime)
struct EnvelopeOracle {
    double epsilon = 0.0;
    double F0(double t, double r) const;
    double F0_prime(double t, double r) const;
};

// time-indexed family of radial slices; values are stored on `radii`, the
// origin value separately. Interpolation in log t per radial column; below
// times.front(), columns are scaled by (ell_0/ell)^{3/2} when
// ell32_extrapolate is set (the decay class of the Picard correction).
struct RadialField {
    std::vector<double> times;
    std::vector<double> radii;
    std::vector<std::vector<double>> values; // [time][radius]
    std::vector<double> at_origin;
    bool ell32_extrapolate = false;

    std::vector<double> slice(double t) const;
    double origin(double t) const;
    double sup(size_t i) const; // max over {0} U radii at times[i]
};

struct MonotonicityReport {
    bool ok = true;
    double worst_gap = 0.0; // most positive increase found (scaled slack applied)
    double worst_r = 0.0;
    double worst_t = 0.0;
};
// applies heat_apply at each t in t_list and checks each output slice is
// radially non-increasing on {0} U radii with slack 1e-10 * local scale
MonotonicityReport monotonicity_check(const HeatProfile& phi, const std::vector<double>& t_list,
                                      const std::vector<double>& radii, double rel_tol = 1e-10);

// measured constants of the smoothing estimate
//   int_0^t e^{(t-s)Delta} (s+r^2)^{-1} |log min(s+r^2, eps^2)|^{-alpha} ds <= C* ell^{-alpha}
// (cstar_sharp) and the same without the (s+r^2)^{-1} factor, bound C* t ell^{-alpha}
// (cstar_flat)
struct IntegralFormulaResult {
    double cstar_sharp = 0.0;
    double cstar_flat = 0.0;
};
IntegralFormulaResult oracle_integral_formula(double eps, double alpha, double t,
                                              int duhamel_nodes = 96);

class Evolution {
  public:
    Evolution(HeatConfig cfg, const SolitonProfile& prof);

    const HeatConfig& config() const { return cfg_; }
    const SolitonProfile& profile() const { return *prof_; }
    double kernel_tol() const { return kernel_tol_; }
    const HeatProfile& phistar() const { return phi_; }

    // u0 = e^{t Delta} phi* on {0} U radial_grid, cached per time
    const std::vector<double>& u0_values(double t) const;
    double u0_origin(double t) const;
    RadialField u0_field() const; // at cfg.time_nodes

    // Duhamel integrals int_0^t e^{(t-s)Delta} g((u0+v)(s)) ds on {0} U grid,
    // g = f0 (Exponential), L = m* chi(u) u (Linear), or f_{m*} = f0 - L (Full).
    // v == nullptr means v == 0. Deterministic composite quadrature (fixed
    // panels, independent of v) so the Picard map is a fixed smooth map.
    enum class Part { Exponential, Linear, Full };
    std::vector<double> duhamel(double t, const RadialField* v, Part part,
                                int nodes_override = 0) const;

    struct PicardResult {
        RadialField v;
        std::vector<double> defects; // weighted sup change per iterate
        std::vector<double> ratios;  // successive defect ratios
        double first_norm = 0.0;     // X^{1/2} norm of the first iterate
        double x_half = 0.0;         // sup ell^{1/2} ||v||_inf over nodes
        double x_three_half = 0.0;   // sup ell^{3/2} ||v||_inf over nodes
        double T_used = 0.0;
        int shrinks = 0;
        int iterations = 0;
        bool converged = false;
    };
    // iterate v <- D[v] - E[v] from v = 0; auto-shrinks T when the measured
    // ratio does not contract. Throws numerical_error after the shrink cap.
    PicardResult picard_solve() const;

    // Duhamel-identity defect of the stationary solution u_S = phi*:
    // || phi* - e^{t Delta} phi* - int_0^t e^{sigma Delta} f_{m*}(phi*) dsigma ||_{L^p}
    double stationary_residual(double t, double p) const;
    // same defect for u_R = u0 + v, evaluated with the same quadrature stack
    double regular_residual(const RadialField& v, double t, double p) const;

    // L^p norm over {0} U grid (2 pi int |f|^p r dr)^{1/p}
    double lp_on_grid(const std::vector<double>& vals_with_origin, double p) const;

    double sup_L() const;   // sup_u |m* chi(u) u|
    double lip_L() const;   // Lipschitz constant of u -> m* chi(u) u

  private:
    std::vector<double> duhamel_times(double T) const;
    void build_u0_table() const;
    std::vector<double> u0_table_slice(double s) const;            // on {0} U grid
    std::vector<double> field_slice(const RadialField* v, double s) const;
    double slice_point(double tau, const std::vector<double>& slice_vals, double r) const;

    HeatConfig cfg_;
    const SolitonProfile* prof_;
    HeatProfile phi_;   // phi* profile
    HeatProfile psi_;   // f_{m*}(phi*) profile
    double kernel_tol_ = 1e-10;
    std::vector<double> lnr_;            // log of radial grid
    mutable std::map<double, std::vector<double>> u0_cache_;
    mutable std::vector<double> u0_lns_; // uniform log-s grid of the dense table
    mutable std::vector<std::vector<double>> u0_tab_; // [s][{0} U grid]
};

struct NonuniquenessReport {
    double T = 0.0, epsilon = 0.0, m = 0.0;
    std::vector<double> times;               // evaluation times
    std::vector<double> uR_sup;              // ||u_R(t)||_inf
    std::vector<double> uR_over_phistar;     // ||u_R(t)||_inf / phi*(sqrt(t))
    std::vector<double> rmin_decades;        // r_min of the divergence diagnostic
    std::vector<double> uS_sup_ratio;        // sup phi* / sqrt(-2 log r_min)
    double sep_L2 = 0.0, sep_L4 = 0.0;       // ||u_R - u_S||_{L^p} at T/2
    double resS_L2 = 0.0, resS_L4 = 0.0;     // stationary residuals at T/2
    double resS_L2_q = 0.0, resS_L4_q = 0.0; // and at T/4
    double resR_L2 = 0.0, resR_L4 = 0.0;     // regular residuals at T/2
    double resR_L2_q = 0.0, resR_L4_q = 0.0; // and at T/4
};
NonuniquenessReport nonuniqueness_report(const Evolution& ev,
                                         const Evolution::PicardResult& pr);

} // namespace singheat
