#pragma once
//
// Truncated Galerkin dynamics of the reduced bubble problem,
//
//   dz/dt = L z + N1(z) dz/dt + N0(z),
//
// for the state z = (rho2, dR, vR, theta_1..theta_N): interface density
// perturbation, radius perturbation, radius velocity, and the modal
// coefficients of the interior density perturbation. L is the (N+3) dense
// linear operator; the nonlinear terms are assembled from the closed-form
// pieces Pi, Phi, Psi split into parts multiplying dz/dt (N1) and parts
// depending on z only (N0).
//
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bubblelab/integrate.hpp"
#include "bubblelab/modal.hpp"

namespace bubblelab {

// State vector layout offsets.
inline constexpr int kRho2 = 0;   // interface density perturbation
inline constexpr int kDR = 1;     // radius perturbation
inline constexpr int kVR = 2;     // radius velocity
inline constexpr int kTheta = 3;  // first modal coefficient

struct IcProfile {
    double eps = 0.0;    // relative amplitude of the interior density shape
    double delta = 0.0;  // relative radius perturbation
    double dR0 = 0.0;    // initial radius velocity
    std::string shape = "parabolic";  // "parabolic" or "mode-k"
    int mode_k = 1;
};

struct SimOptions {
    double t_end = 1.0;
    double output_dt = 0.0;  // 0: t_end/400
    double rtol = 1e-8;
    double atol = 1e-13;
    std::string stepper = "trbdf2";  // or "rk45" (explicit, capped step)
    double validity_floor = 0.1;     // halt when rho < floor*rho* or R < floor*R*
    long max_steps = 5'000'000;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> z;  // Galerkin layout (or projected, for fd)
    std::vector<double> mass, energy, dissipation, zdot_norm;
    double mass0 = 0.0;
    std::string status;  // "done", "validity region exit", ...
    long steps = 0;

    double mass_drift(std::size_t i) const {
        return (mass[i] - mass0) / mass0;
    }
    double max_mass_drift() const;
};

Eigen::MatrixXd assemble_linear(const EquilibriumState& eq,
                                const ModalBasis& basis);

class GalerkinSystem {
  public:
    GalerkinSystem(const EquilibriumState& eq, int N, int Q = -1);

    const EquilibriumState& equilibrium() const { return eq_; }
    const ModalBasis& basis() const { return basis_; }
    const Eigen::MatrixXd& linear() const { return L_; }
    int dim() const { return basis_.size() + 3; }

    // N0(z) and N1(z); N1 is returned dense (its only nonzero entries sit
    // in columns kRho2 and kVR).
    void nonlinear_terms(const Eigen::VectorXd& z, Eigen::VectorXd& N0,
                         Eigen::MatrixXd& N1) const;

    // Solves (I - N1(z)) zdot = L z + N0(z) by dense LU.
    Eigen::VectorXd rhs(const Eigen::VectorXd& z) const;

    // Mass of the reconstructed state, (R*+dR)^3 (4pi/3 (rho*+rho2) + m.theta).
    double mass(const Eigen::VectorXd& z) const;

    // Reconstructed density at the quadrature nodes.
    Eigen::VectorXd density_at_nodes(const Eigen::VectorXd& z) const;

    bool in_validity_region(const Eigen::VectorXd& z, double floor) const;

    // Initial state: rho0(R0 y) = rho*(1 + eps*shape(y)), R0 = R*(1+delta),
    // scaled by the unique constant making the truncated mass equal M.
    Eigen::VectorXd make_initial(const IcProfile& profile) const;
    // Same, with (eps,delta,dR0) rescaled together so |z0| hits the target.
    Eigen::VectorXd make_initial_with_norm(const IcProfile& direction,
                                           double target_norm) const;

    Trajectory simulate(const Eigen::VectorXd& z0, const SimOptions& opts) const;

  private:
    EquilibriumState eq_;
    ModalBasis basis_;
    Eigen::MatrixXd L_;
    double coupling_ = 0.0;  // 3*gamma*rho*/R*
};

// Exponential rate fitted to sample-to-sample increments |z_{k+1} - z_k| on
// the window [lo,hi] (fractions of the final time); increments cancel the
// equilibrium offset, so no reference state is needed.
double fit_decay_rate(const Trajectory& traj, double frac_lo = 0.25,
                      double frac_hi = 0.9);

}  // namespace bubblelab
