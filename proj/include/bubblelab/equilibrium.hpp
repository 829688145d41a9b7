#pragma once
//
// Spherically symmetric equilibria of the bubble-in-bounded-liquid model.
//
// For a mass-volume pair (M,V) the equilibrium radius R* is the unique
// positive root of the ninth-degree polynomial
//
//   P(x) = (b^3+1)x^9 - 3I x^7 + Vb x^6 + 3I^2 x^5 - 3I Vb x^4
//          - I^3 x^3 + 3I^2 Vb x^2 - I^3 Vb,
//
// with I = 3*R_spec*T_inf*M/(8*pi*sigma), b = sigma_bar/sigma and
// Vb = 3V/(4*pi); it lies in the open bracket (sqrt(I)/sqrt(1+b), sqrt(I)).
// The density follows from rho* = 3M/(4*pi*R*^3) = (2/(R_spec*T_inf))
// (sigma/R* + sigma_bar/Rbar*), and the map (M,V) <-> (rho*,R*) is a
// bijection.
//
#include <array>
#include <vector>

#include "bubblelab/params.hpp"

namespace bubblelab {

struct EquilibriumState {
    PhysicalParams params;
    double M = 0.0, V = 0.0, V_bar = 0.0;
    double R_star = 0.0;     // equilibrium bubble radius
    double rho_star = 0.0;   // equilibrium gas density
    double Rbar_star = 0.0;  // external radius (R*^3 + Vb)^(1/3)
    double I_scale = 0.0;    // 3*R_spec*T_inf*M/(8*pi*sigma)
    double beta = 0.0;       // sigma_bar/sigma
    double kappa_bar = 0.0;  // kappa/(R*^2 rho* gamma c_g), modal diffusivity
    double R_tilde = 0.0;    // R* - R*^2/Rbar*, effective inertia length
    double residual = 0.0;   // max relative residual of the two identities
    double bracket_lo = 0.0, bracket_hi = 0.0;

    double pi2_kappa_bar() const { return 9.869604401089358 * kappa_bar; }
};

// Ascending coefficients c[0..9] of P(x). Passing I=1 and V_bar scaled by
// I^(-3/2) yields the scale-free polynomial in w = x/sqrt(I).
std::array<double, 10> poly_coeffs(double I, double beta, double V_bar);

double poly_eval(const std::array<double, 10>& c, double x);

// Solves for the equilibrium; beta == 0 and V == inf short-circuit to the
// closed forms. Residual certificate and derived constants are filled in.
EquilibriumState solve_radius(double M, double V, const PhysicalParams& p);

// Mean of the two algebraic expressions for rho*; throws NumericalError if
// they disagree beyond 1e-10 relative (a bad root).
double equilibrium_density(double R_star, const PhysicalParams& p, double M,
                           double V);

// Inverse of the equilibrium map: recovers (M,V) from (rho*,R*). Requires
// R_spec*T_inf*rho*R* - 2*sigma > 0, i.e. the state lies on the manifold
// with a finite external radius.
MassVolumePair inverse_map(double rho_star, double R_star,
                           const PhysicalParams& p);

// Constants of the linearized problem:
//   A = 2 sigma/R*^2 + 2 sigma_bar R*^2/Rbar*^4   (surface-tension stiffness)
//   B = 4 mu_l Vb / (R*(R*^3+Vb))                 (viscous damping)
//   C = rho_l R_tilde                             (inertia)
//   K = 2 R_spec T_inf rho* Rbar* / (rho_l R*^2 (Rbar*-R*))  (pressure coupling)
// They satisfy 2 R_spec T_inf rho*/R* < K*C + A < 3 R_spec T_inf rho*/R*.
struct DecayConstants {
    double A = 0.0, B = 0.0, C = 0.0, K = 0.0;
};
DecayConstants derived_constants(const EquilibriumState& eq);

// Dense sign scan of the scale-free polynomial over the closed bracket
// [1/sqrt(1+beta), 1]; returns the number of strict sign changes. The
// parallel version splits the grid into chunks and sums per-chunk counts,
// so the result is order-independent.
int scan_sign_changes(double I, double beta, double V_bar, int n_points);
int scan_sign_changes_serial(double I, double beta, double V_bar, int n_points);

// Batch solve over (M,V) pairs; parallel with a serial reference twin.
std::vector<EquilibriumState> solve_batch(
    const std::vector<std::pair<double, double>>& mv, const PhysicalParams& p);
std::vector<EquilibriumState> solve_batch_serial(
    const std::vector<std::pair<double, double>>& mv, const PhysicalParams& p);

// Solves with V chosen so that V_bar/R*^3 lands on the given ratio
// (fixed-point iteration on V; used for the small-volume regime).
EquilibriumState solve_with_volume_ratio(double M, double vbar_over_R3,
                                         const PhysicalParams& p);

}  // namespace bubblelab
