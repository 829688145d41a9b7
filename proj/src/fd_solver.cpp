#include "bubblelab/fd_solver.hpp"

#include <cmath>
#include <numbers>

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;
using Eigen::VectorXd;

// Grid state layout: [rho_0 .. rho_G, R, dR/dt], dimension G+3.
struct FdSystem {
    const EquilibriumState& eq;
    int G;
    double h;
    VectorXd y;       // grid nodes
    VectorXd simpson; // Simpson weights on [0,1]

    explicit FdSystem(const EquilibriumState& e, int grid) : eq(e), G(grid) {
        if (G < 64) throw ValidationError("fd grid must have at least 64 cells");
        if (G % 2 != 0) throw ValidationError("fd grid size must be even");
        h = 1.0 / G;
        y.resize(G + 1);
        simpson.resize(G + 1);
        for (int i = 0; i <= G; ++i) {
            y[i] = i * h;
            simpson[i] = (i == 0 || i == G) ? h / 3.0
                         : (i % 2 == 1)     ? 4.0 * h / 3.0
                                            : 2.0 * h / 3.0;
        }
    }

    double mass(const VectorXd& u) const {
        const double R = u[G + 1];
        double acc = 0.0;
        for (int i = 0; i <= G; ++i) acc += simpson[i] * y[i] * y[i] * u[i];
        return 4.0 * kPi * R * R * R * acc;
    }

    double boundary_slope(const VectorXd& u) const {
        return (3.0 * u[G] - 4.0 * u[G - 1] + u[G - 2]) / (2.0 * h);
    }

    VectorXd rhs(const VectorXd& u) const {
        const PhysicalParams& p = eq.params;
        const double gamma = p.gamma;
        const double R = u[G + 1], vR = u[G + 2];
        if (!(R > 0.0)) throw NumericalError("bubble radius collapsed");
        const double Rb = std::cbrt(R * R * R + eq.V_bar);
        const double diffus = p.kappa / (gamma * p.c_g * R * R);

        VectorXd logr(G + 1);
        for (int i = 0; i <= G; ++i) {
            if (!(u[i] > 0.0))
                throw NumericalError("state left validity region (density <= 0)");
            logr[i] = std::log(u[i]);
        }
        VectorXd lap(G + 1), drho(G + 1);
        lap[0] = 6.0 * (logr[1] - logr[0]) / (h * h);
        drho[0] = 0.0;
        for (int i = 1; i < G; ++i) {
            lap[i] = (logr[i + 1] - 2.0 * logr[i] + logr[i - 1]) / (h * h) +
                     (logr[i + 1] - logr[i - 1]) / (h * y[i]);
            drho[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        lap[G] = (2.0 * logr[G] - 5.0 * logr[G - 1] + 4.0 * logr[G - 2] -
                  logr[G - 3]) /
                     (h * h) +
                 (3.0 * logr[G] - 4.0 * logr[G - 1] + logr[G - 2]) / h;
        drho[G] = boundary_slope(u);

        // p_dot/p from the radius equation (index reduction through the
        // boundary flux).
        const double pdot_over_p =
            -(3.0 * gamma / R) *
            (vR + p.kappa / (gamma * p.c_g) * drho[G] / (R * u[G] * u[G]));

        VectorXd du(G + 3);
        for (int i = 0; i < G; ++i)
            du[i] = diffus * lap[i] +
                    (pdot_over_p / gamma) * (y[i] / 3.0 * drho[i] + u[i]);
        du[G] = pdot_over_p * u[G];  // consistent with p = R_spec T_inf rho(1)

        du[G + 1] = vR;
        const double Rb_dot = R * R * vR / (Rb * Rb);
        const double num =
            p.R_spec * p.T_inf * u[G] -
            4.0 * p.mu_l * (vR / R - Rb_dot / Rb) - 2.0 * p.sigma / R -
            2.0 * p.sigma_bar / Rb -
            p.rho_l *
                (1.5 - 2.0 * R / Rb +
                 std::pow(R, 4) / (2.0 * std::pow(Rb, 4))) *
                vR * vR;
        du[G + 2] = num * Rb / (p.rho_l * (Rb - R) * R);
        return du;
    }
};

double fd_shape_value(const IcProfile& profile, double y) {
    if (profile.shape == "parabolic") return 1.0 - y * y;
    if (profile.shape == "mode-k")
        return ModalBasis::eigenfunction(profile.mode_k, y) /
               (profile.mode_k * std::sqrt(kPi / 2.0));
    throw ValidationError("unknown ic shape: " + profile.shape);
}

VectorXd fd_initial(const FdSystem& sys, const IcProfile& profile) {
    const EquilibriumState& eq = sys.eq;
    const int G = sys.G;
    VectorXd u(G + 3);
    const double R0 = eq.R_star * (1.0 + profile.delta);
    for (int i = 0; i <= G; ++i)
        u[i] = eq.rho_star * (1.0 + profile.eps * fd_shape_value(profile, sys.y[i]));
    u[G + 1] = R0;
    u[G + 2] = profile.dR0;
    const double k_mass = eq.M / sys.mass(u);
    for (int i = 0; i <= G; ++i) u[i] *= k_mass;
    if (!(u.head(G + 1).minCoeff() > 0.0))
        throw ValidationError("initial density not positive");
    return u;
}

// Galerkin-layout view of a grid state: (rho(1)-rho*, R-R*, vR, theta_1..m).
VectorXd project_state(const FdSystem& sys, const ModalBasis& basis,
                       const VectorXd& u, int modes) {
    const int G = sys.G;
    VectorXd z = VectorXd::Zero(modes + 3);
    z[kRho2] = u[G] - sys.eq.rho_star;
    z[kDR] = u[G + 1] - sys.eq.R_star;
    z[kVR] = u[G + 2];
    for (int j = 1; j <= modes; ++j) {
        double acc = 0.0;
        for (int i = 0; i <= G; ++i)
            acc += sys.simpson[i] * sys.y[i] * sys.y[i] * (u[i] - u[G]) *
                   ModalBasis::eigenfunction(j, sys.y[i]);
        z[kTheta + j - 1] = 4.0 * kPi * acc;
    }
    return z;
}

double fd_energy(const FdSystem& sys, const VectorXd& u) {
    const EquilibriumState& eq = sys.eq;
    const PhysicalParams& p = eq.params;
    const int G = sys.G;
    const double R = u[G + 1], vR = u[G + 2];
    const double Rb = std::cbrt(R * R * R + eq.V_bar);
    double rho_log_rho = 0.0;
    for (int i = 0; i <= G; ++i)
        rho_log_rho += sys.simpson[i] * sys.y[i] * sys.y[i] * u[i] *
                       std::log(u[i]);
    rho_log_rho *= 4.0 * kPi;
    const double mass = sys.mass(u);
    const double R3 = R * R * R;
    return 4.0 * kPi * p.c_g * p.T_inf / 3.0 * u[G] * R3 -
           p.c_g * p.T_inf * mass * std::log(p.R_spec * p.T_inf * u[G]) +
           p.c_g * p.gamma * p.T_inf * R3 * rho_log_rho +
           2.0 * kPi * p.rho_l * R3 * vR * vR * (1.0 - R / Rb) +
           4.0 * kPi * (p.sigma * R * R + p.sigma_bar * Rb * Rb);
}

double fd_dissipation(const FdSystem& sys, const VectorXd& u) {
    const EquilibriumState& eq = sys.eq;
    const PhysicalParams& p = eq.params;
    const int G = sys.G;
    const double R = u[G + 1], vR = u[G + 2];
    double grad = 0.0;
    for (int i = 0; i <= G; ++i) {
        double d;
        if (i == 0)
            d = 0.0;
        else if (i == G)
            d = sys.boundary_slope(u);
        else
            d = (u[i + 1] - u[i - 1]) / (2.0 * sys.h);
        grad += sys.simpson[i] * sys.y[i] * sys.y[i] * d * d / (u[i] * u[i]);
    }
    return p.kappa * p.T_inf * 4.0 * kPi * R * grad +
           16.0 * kPi * p.mu_l * eq.V_bar * R * vR * vR /
               (R * R * R + eq.V_bar);
}

Trajectory run_fd(const FdSystem& sys, const VectorXd& u0,
                  const FdOptions& opts) {
    const SimOptions& so = opts.sim;
    const double dt = so.output_dt > 0.0 ? so.output_dt : so.t_end / 400.0;
    ModalBasis basis(sys.eq, opts.report_modes, 4 * opts.report_modes);

    Trajectory traj;
    traj.mass0 = sys.mass(u0);
    bool left_validity = false;
    SampleFn on_sample = [&](double t, const VectorXd& u) {
        if (u.head(sys.G + 1).minCoeff() <
                so.validity_floor * sys.eq.rho_star ||
            u[sys.G + 1] < so.validity_floor * sys.eq.R_star) {
            left_validity = true;
            return false;
        }
        traj.t.push_back(t);
        traj.z.push_back(project_state(sys, basis, u, opts.report_modes));
        traj.mass.push_back(sys.mass(u));
        traj.energy.push_back(fd_energy(sys, u));
        traj.dissipation.push_back(fd_dissipation(sys, u));
        traj.zdot_norm.push_back(sys.rhs(u).norm());
        return true;
    };

    OdeOptions ode;
    ode.rtol = so.rtol;
    ode.atol = so.atol;
    ode.max_steps = so.max_steps;
    RhsFn f = [&sys](const VectorXd& u) { return sys.rhs(u); };
    const OdeOutcome out =
        integrate_trbdf2(f, u0, so.t_end, dt, ode, on_sample);
    traj.status = left_validity ? "validity region exit" : out.status;
    traj.steps = out.steps;
    return traj;
}

}  // namespace

Trajectory fd_simulate(const EquilibriumState& eq, const IcProfile& profile,
                       const FdOptions& opts) {
    FdSystem sys(eq, opts.grid);
    return run_fd(sys, fd_initial(sys, profile), opts);
}

Trajectory fd_simulate_with_norm(const EquilibriumState& eq,
                                 const IcProfile& direction,
                                 double target_norm, const FdOptions& opts) {
    FdSystem sys(eq, opts.grid);
    ModalBasis basis(eq, opts.report_modes, 4 * opts.report_modes);
    double s = 1.0;
    VectorXd u0;
    for (int it = 0; it < 24; ++it) {
        IcProfile scaled = direction;
        scaled.eps *= s;
        scaled.delta *= s;
        scaled.dR0 *= s;
        u0 = fd_initial(sys, scaled);
        const double norm =
            project_state(sys, basis, u0, opts.report_modes).norm();
        if (std::abs(norm - target_norm) <= 1e-10 * target_norm) break;
        s *= target_norm / norm;
    }
    return run_fd(sys, u0, opts);
}

}  // namespace bubblelab
