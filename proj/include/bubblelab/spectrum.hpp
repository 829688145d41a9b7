#pragma once
//
// Spectrum of the linearized operator. Away from lambda = 0 the spectrum
// coincides with the zero set of the meromorphic function
//
//   M(lambda) = (pi/(R_spec T_inf gamma)) (4/3 + sum_k 8(gamma-1)kb/(pi^2 kb k^2 + lambda))
//               * (C lambda^2 + B lambda - A) + 4 pi rho*/R*,
//
// with simple poles at -pi^2 kb k^2. The series is evaluated in closed form
// through S(mu) = sum 1/(k^2+mu) = (pi sqrt(mu) coth(pi sqrt(mu)) - 1)/(2 mu)
// (even in sqrt(mu), hence branch-free). Real roots come from a bracketed
// scan of each pole gap; complex roots from argument-principle counting on
// adaptively subdivided rectangles in the upper half-window (which contains
// no poles), each zero polished by safeguarded Newton and mirrored to its
// conjugate.
//
#include <complex>
#include <vector>

#include "bubblelab/dynamics.hpp"

namespace bubblelab {

using Complex = std::complex<double>;

// S(mu) = sum_{k>=1} 1/(k^2+mu) and its derivative; series near mu=0.
Complex sum_inv_k2(Complex mu);
Complex sum_inv_k2_deriv(Complex mu);

// Throws NumericalError within 1e-8*pi^2*kb of a pole.
Complex eval_M(Complex lambda, const EquilibriumState& eq);
Complex eval_M_deriv(Complex lambda, const EquilibriumState& eq);
// Magnitude scale of M at lambda, for residual normalization.
double eval_M_scale(Complex lambda, const EquilibriumState& eq);

struct Window {
    double re_lo = 0.0, re_hi = 0.0, im_max = 0.0;
    static Window default_for(const EquilibriumState& eq);
};

struct RootInfo {
    Complex lambda;
    double residual = 0.0;  // |M(root)| / local scale
};

struct GapReport {
    double lo = 0.0, hi = 0.0;  // certified interval (-pi^2 kb, -2 varpi)
    bool certified = false;
};

struct DecayBounds {
    double Theta1 = 0.0, Theta2 = 0.0, varpi = 0.0;
    bool subcritical = false;  // B^2 <= 4KC^2
};

struct SpectrumReport {
    std::vector<RootInfo> roots;  // sorted by descending real part
    std::vector<Complex> unresolved;  // cell centers that failed to resolve
    double abscissa = 0.0;        // max Re over found roots
    double predicted_rate = 0.0;  // -abscissa
    double empirical_theta0 = 0.0;
    DecayConstants constants;
    DecayBounds bounds;
    GapReport gap;
    std::vector<Complex> matrix_eigs;  // eigenvalues of L_N inside the window
};

std::vector<RootInfo> find_roots(const EquilibriumState& eq,
                                 const Window& window, int max_subdiv = 12);

DecayBounds decay_bounds(const EquilibriumState& eq);
// varpi from explicit constants, for case-boundary studies on synthetic data.
double varpi_from_constants(double A, double B, double C, double K,
                            double Theta1, double Theta2, double pi2kb);

// Full report: roots, bound constants, gap certification, and the dense
// eigenvalues of the N-mode Galerkin matrix inside the window.
SpectrumReport spectrum_report(const EquilibriumState& eq,
                               const Window& window, int matrix_N = 128,
                               int max_subdiv = 12);

struct RateRow {
    double axis_value = 0.0;
    double R_star = 0.0, rho_star = 0.0, kappa_bar = 0.0;
    double pi2_kappa_bar = 0.0;
    double abscissa = 0.0, varpi = 0.0;
};

// Abscissa and bound constants along a family of equilibria.
std::vector<RateRow> rate_table(const std::vector<EquilibriumState>& family,
                                const std::vector<double>& axis_values);

}  // namespace bubblelab
