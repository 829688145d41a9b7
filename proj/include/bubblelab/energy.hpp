#pragma once
//
// Physical energy of a spherically symmetric state, the dissipation rate of
// the reduced model, and the local-minimizer quadratic lower bound around an
// equilibrium. The energy of a state (rho(y), R, dR/dt) is
//
//   E = (4pi c_g T_inf/3) rho(1) R^3 - c_g T_inf M[rho,R] log(R_spec T_inf rho(1))
//     + c_g gamma T_inf R^3 int_{B1} rho log rho dx
//     + 2 pi rho_l R^3 (dR/dt)^2 (1 - R/Rbar) + 4 pi (sigma R^2 + sigma_bar Rbar^2),
//
// and the dissipation rate is
//
//   D = kappa T_inf 4 pi R int_0^1 (d_y rho)^2 / rho^2 y^2 dy
//     + 16 pi mu_l V_bar R (dR/dt)^2 / (R^3 + V_bar).
//
#include <Eigen/Dense>
#include <vector>

#include "bubblelab/modal.hpp"

namespace bubblelab {

class GalerkinSystem;
struct Trajectory;

// Energy of the equilibrium itself (kinetic part zero).
double equilibrium_energy(const EquilibriumState& eq);

// Energy of a modal state; optional out-params split the Helmholtz part E1
// from the kinetic+surface part E2. Throws on nonpositive density.
double total_energy(const EquilibriumState& eq, const ModalBasis& basis,
                    const Eigen::VectorXd& z, double* E1 = nullptr,
                    double* E2 = nullptr);

// Dissipation rate (positive magnitude); optional split into the thermal
// and viscous summands.
double dissipation_rate(const EquilibriumState& eq, const ModalBasis& basis,
                        const Eigen::VectorXd& z, double* thermal = nullptr,
                        double* viscous = nullptr);

struct MinimizerCheck {
    double lhs_gap = 0.0;        // E - E_dagger
    double rhs_quadratic = 0.0;  // quarter-scaled quadratic form
    double condition = 0.0;      // measured |(rho-rho*)/rho*|(1+|log rho*|)
    bool inside_region = false;  // condition <= delta0
};

// Evaluates both sides of the minimizer inequality for a mass-projected
// state. rho_dot_integral is int_{B1} d_t rho dx (0 for static checks).
// Throws ValidationError when the state is outside the certified region or
// not mass-projected.
MinimizerCheck minimizer_gap(const EquilibriumState& eq,
                             const ModalBasis& basis, const Eigen::VectorXd& z,
                             double rho_dot_integral, double delta0 = 0.05);

struct TrajectoryAudit {
    std::vector<double> t, E, D, dEdt, residual, gap, quad_form;
    bool monotone = false;
    double max_residual = 0.0;
    bool coercivity_ok = false;
};

// Audits a simulated trajectory against the dissipation law and the
// minimizer bound. dE/dt uses 4th-order differences of the sampled energy
// (one-sided at the ends); the monotonicity tolerance is 10*rtol*|E|.
TrajectoryAudit audit_trajectory(const GalerkinSystem& system,
                                 const Trajectory& traj, double rtol);

// 4th-order finite-difference derivative of uniformly sampled values.
std::vector<double> fd_derivative4(const std::vector<double>& t,
                                   const std::vector<double>& f);

}  // namespace bubblelab
