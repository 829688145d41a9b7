#pragma once
//
// Independent method-of-lines discretization of the fixed-domain system:
// second-order central differences for rho(y,t) on a uniform grid, with
// (R, dR/dt) carried as states and d2R/dt2 obtained algebraically from the
// dynamic boundary relation. p_dot/p is eliminated through the radius
// equation evaluated with the one-sided boundary flux; the PDE trace closure
// is linearly unstable (it admits spurious growing modes), so the radius
// equation is the one used here. Cross-validates the Galerkin solver.
//
#include "bubblelab/dynamics.hpp"

namespace bubblelab {

struct FdOptions {
    SimOptions sim;
    int grid = 512;         // intervals; must be even (Simpson mass)
    int report_modes = 8;   // modal projections carried in the output states
};

// Simulates from the same initial-condition profile as the Galerkin solver.
// Output states use the Galerkin layout (rho2, dR, vR, theta_1..m) with the
// theta entries obtained by projecting the grid density onto the basis.
Trajectory fd_simulate(const EquilibriumState& eq, const IcProfile& profile,
                       const FdOptions& opts);

// Same, rescaling the profile so the projected initial state matches the
// Galerkin-normalized amplitude.
Trajectory fd_simulate_with_norm(const EquilibriumState& eq,
                                 const IcProfile& direction,
                                 double target_norm, const FdOptions& opts);

}  // namespace bubblelab
