#include "bubblelab/energy.hpp"

#include <cmath>
#include <numbers>

#include "bubblelab/dynamics.hpp"

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;
using Eigen::VectorXd;

void check_finite_volume(const EquilibriumState& eq) {
    if (std::isinf(eq.V))
        throw ValidationError("energy functional needs a finite liquid volume");
}
}  // namespace

double equilibrium_energy(const EquilibriumState& eq) {
    check_finite_volume(eq);
    const PhysicalParams& p = eq.params;
    const double R3 = std::pow(eq.R_star, 3);
    const double helmholtz =
        4.0 * kPi * p.c_g * p.T_inf / 3.0 * eq.rho_star * R3 -
        p.c_g * p.T_inf * eq.M * std::log(p.R_spec * p.T_inf * eq.rho_star) +
        p.c_g * p.gamma * p.T_inf * R3 * (4.0 * kPi / 3.0) * eq.rho_star *
            std::log(eq.rho_star);
    const double surface = 4.0 * kPi * (p.sigma * eq.R_star * eq.R_star +
                                        p.sigma_bar * eq.Rbar_star * eq.Rbar_star);
    return helmholtz + surface;
}

double total_energy(const EquilibriumState& eq, const ModalBasis& basis,
                    const VectorXd& z, double* E1_out, double* E2_out) {
    check_finite_volume(eq);
    const PhysicalParams& p = eq.params;
    const int N = basis.size();
    const double R = eq.R_star + z[kDR];
    const double vR = z[kVR];
    const double rho1 = eq.rho_star + z[kRho2];  // density at the interface
    if (!(rho1 > 0.0))
        throw NumericalError("nonpositive interface density in energy");
    const double Rb = std::cbrt(R * R * R + eq.V_bar);
    const double R3 = R * R * R;

    const QuadratureRule& quad = basis.quadrature();
    const VectorXd u1 = basis.table() * z.segment(kTheta, N);
    double rho_log_rho = 0.0;
    for (int q = 0; q < quad.order; ++q) {
        const double y = quad.nodes[q];
        const double rho = rho1 + u1[q];
        if (!(rho > 0.0))
            throw NumericalError("nonpositive density under the log");
        rho_log_rho += quad.weights[q] * y * y * rho * std::log(rho);
    }
    rho_log_rho *= 4.0 * kPi;

    const double mass = R3 * (4.0 * kPi / 3.0 * rho1 +
                              basis.mass_moments().dot(z.segment(kTheta, N)));
    const double E1 =
        4.0 * kPi * p.c_g * p.T_inf / 3.0 * rho1 * R3 -
        p.c_g * p.T_inf * mass * std::log(p.R_spec * p.T_inf * rho1) +
        p.c_g * p.gamma * p.T_inf * R3 * rho_log_rho;
    const double E2 = 2.0 * kPi * p.rho_l * R3 * vR * vR * (1.0 - R / Rb) +
                      4.0 * kPi * (p.sigma * R * R + p.sigma_bar * Rb * Rb);
    if (E1_out) *E1_out = E1;
    if (E2_out) *E2_out = E2;
    return E1 + E2;
}

double dissipation_rate(const EquilibriumState& eq, const ModalBasis& basis,
                        const VectorXd& z, double* thermal_out,
                        double* viscous_out) {
    check_finite_volume(eq);
    const PhysicalParams& p = eq.params;
    const int N = basis.size();
    const double R = eq.R_star + z[kDR];
    const double vR = z[kVR];
    const double rho1 = eq.rho_star + z[kRho2];

    const QuadratureRule& quad = basis.quadrature();
    const VectorXd u1 = basis.table() * z.segment(kTheta, N);
    const VectorXd du1 = basis.table_deriv() * z.segment(kTheta, N);
    double grad_term = 0.0;
    for (int q = 0; q < quad.order; ++q) {
        const double y = quad.nodes[q];
        const double rho = rho1 + u1[q];
        grad_term += quad.weights[q] * y * y * du1[q] * du1[q] / (rho * rho);
    }
    const double thermal = p.kappa * p.T_inf * 4.0 * kPi * R * grad_term;
    const double viscous =
        16.0 * kPi * p.mu_l * eq.V_bar * R * vR * vR / (R * R * R + eq.V_bar);
    if (thermal_out) *thermal_out = thermal;
    if (viscous_out) *viscous_out = viscous;
    return thermal + viscous;
}

MinimizerCheck minimizer_gap(const EquilibriumState& eq,
                             const ModalBasis& basis, const VectorXd& z,
                             double rho_dot_integral, double delta0) {
    const PhysicalParams& p = eq.params;
    const int N = basis.size();
    const double rhos = eq.rho_star;
    const QuadratureRule& quad = basis.quadrature();
    const VectorXd u1 = basis.table() * z.segment(kTheta, N);

    MinimizerCheck out;
    const double log_weight = 1.0 + std::abs(std::log(rhos));
    double worst = std::abs(z[kRho2]);  // |u| at the interface (Xi_j(1)=0)
    for (int q = 0; q < quad.order; ++q)
        worst = std::max(worst, std::abs(z[kRho2] + u1[q]));
    out.condition = worst / rhos * log_weight;
    out.inside_region = out.condition <= delta0;
    if (!out.inside_region)
        throw ValidationError("state outside certified region, condition = " +
                              std::to_string(out.condition));

    // The bound assumes a mass-preserving state.
    const double R = eq.R_star + z[kDR];
    const double mass =
        R * R * R * (4.0 * kPi / 3.0 * (rhos + z[kRho2]) +
                     basis.mass_moments().dot(z.segment(kTheta, N)));
    if (std::abs(mass - eq.M) > 1e-6 * eq.M)
        throw ValidationError("state is not mass-projected");

    double int_u = 4.0 * kPi / 3.0 * z[kRho2] +
                   basis.mass_moments().dot(z.segment(kTheta, N));
    double int_u2 = 0.0;
    for (int q = 0; q < quad.order; ++q) {
        const double y = quad.nodes[q];
        const double u = z[kRho2] + u1[q];
        int_u2 += quad.weights[q] * y * y * u * u;
    }
    int_u2 *= 4.0 * kPi;

    const double u_at_1 = z[kRho2];
    const double R3 = std::pow(eq.R_star, 3);
    const double term_interface =
        eq.M * p.c_g * p.T_inf *
        std::pow(u_at_1 / rhos - 3.0 / (4.0 * kPi * rhos) * int_u, 2);
    const double term_rhodot = p.rho_l * std::pow(eq.R_star, 5) /
                               (4.0 * kPi * rhos * rhos) *
                               (1.0 - eq.R_star / eq.Rbar_star) *
                               rho_dot_integral * rho_dot_integral;
    const double term_l2 = p.R_spec * p.T_inf * R3 / (3.0 * rhos) * int_u2;
    const double term_mean =
        R3 / (kPi * rhos * rhos) *
        (p.sigma / (2.0 * eq.R_star) +
         p.sigma_bar / eq.Rbar_star *
             (1.0 - R3 / (2.0 * std::pow(eq.Rbar_star, 3)))) *
        int_u * int_u;

    out.rhs_quadratic =
        0.25 * (term_interface + term_rhodot + term_l2 + term_mean);
    out.lhs_gap = total_energy(eq, basis, z) - equilibrium_energy(eq);
    return out;
}

std::vector<double> fd_derivative4(const std::vector<double>& t,
                                   const std::vector<double>& f) {
    const std::size_t n = f.size();
    if (n < 5) throw NumericalError("need at least 5 samples for 4th-order fd");
    const double h = t[1] - t[0];
    std::vector<double> d(n);
    auto stencil = [&](std::size_t base, const double (&w)[5]) {
        double acc = 0.0;
        for (int i = 0; i < 5; ++i) acc += w[i] * f[base + i];
        return acc / (12.0 * h);
    };
    const double fwd0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
    const double fwd1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
    const double bwd1[5] = {-1.0, 6.0, -18.0, 10.0, 3.0};
    const double bwd0[5] = {3.0, -16.0, 36.0, -48.0, 25.0};
    d[0] = stencil(0, fwd0);
    d[1] = stencil(0, fwd1);
    for (std::size_t k = 2; k + 2 < n; ++k)
        d[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) /
               (12.0 * h);
    d[n - 2] = stencil(n - 5, bwd1);
    d[n - 1] = stencil(n - 5, bwd0);
    return d;
}

TrajectoryAudit audit_trajectory(const GalerkinSystem& system,
                                 const Trajectory& traj, double rtol) {
    const EquilibriumState& eq = system.equilibrium();
    const ModalBasis& basis = system.basis();
    TrajectoryAudit audit;
    audit.t = traj.t;
    audit.E = traj.energy;
    audit.D = traj.dissipation;
    audit.dEdt = fd_derivative4(traj.t, traj.energy);
    const double E_dagger = equilibrium_energy(eq);

    audit.monotone = true;
    audit.coercivity_ok = true;
    const int N = basis.size();
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        audit.residual.push_back(audit.dEdt[k] + audit.D[k]);
        audit.max_residual =
            std::max(audit.max_residual, std::abs(audit.residual.back()));
        audit.gap.push_back(traj.energy[k] - E_dagger);
        const VectorXd zdot = system.rhs(traj.z[k]);
        const double rho_dot_int =
            4.0 * kPi / 3.0 * zdot[kRho2] +
            basis.mass_moments().dot(zdot.segment(kTheta, N));
        double quad = 0.0;
        try {
            quad = minimizer_gap(eq, basis, traj.z[k], rho_dot_int).rhs_quadratic;
            if (audit.gap.back() < quad - 1e-12 * std::abs(E_dagger))
                audit.coercivity_ok = false;
        } catch (const ValidationError&) {
            quad = std::numeric_limits<double>::quiet_NaN();
        }
        audit.quad_form.push_back(quad);
        if (k > 0) {
            const double tol = 10.0 * rtol * std::abs(traj.energy[k]);
            if (traj.energy[k] > traj.energy[k - 1] + tol)
                audit.monotone = false;
        }
    }
    return audit;
}

}  // namespace bubblelab
