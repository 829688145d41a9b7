#include "bubblelab/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "bubblelab/energy.hpp"

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;
using Eigen::MatrixXd;
using Eigen::VectorXd;
}  // namespace

double Trajectory::max_mass_drift() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
        worst = std::max(worst, std::abs(mass_drift(i)));
    return worst;
}

MatrixXd assemble_linear(const EquilibriumState& eq, const ModalBasis& basis) {
    const PhysicalParams& p = eq.params;
    const int N = basis.size();
    const int n = N + 3;
    const double g = 3.0 * p.gamma * eq.rho_star / eq.R_star;
    const double inertia = p.rho_l * eq.R_tilde;
    MatrixXd L = MatrixXd::Zero(n, n);

    L(kRho2, kVR) = -g;
    for (int j = 1; j <= N; ++j) L(kRho2, kTheta + j - 1) = basis.omega(j) * g;

    L(kDR, kVR) = 1.0;

    const double R = eq.R_star, Rb = eq.Rbar_star;
    L(kVR, kRho2) = p.R_spec * p.T_inf / inertia;
    L(kVR, kDR) = (2.0 * p.sigma * std::pow(Rb, 4) +
                   2.0 * p.sigma_bar * std::pow(R, 4)) /
                  (inertia * R * R * std::pow(Rb, 4));
    L(kVR, kVR) =
        -4.0 * p.mu_l * eq.V_bar / (inertia * R * (R * R * R + eq.V_bar));

    for (int k = 1; k <= N; ++k) {
        const int row = kTheta + k - 1;
        L(row, kVR) = basis.c(k) * g;
        for (int j = 1; j <= N; ++j)
            L(row, kTheta + j - 1) = -basis.c(k) * basis.omega(j) * g;
        L(row, kTheta + k - 1) -= eq.kappa_bar * basis.lambda(k);
    }
    return L;
}

GalerkinSystem::GalerkinSystem(const EquilibriumState& eq, int N, int Q)
    : eq_(eq), basis_(eq, N, Q) {
    L_ = assemble_linear(eq_, basis_);
    coupling_ = 3.0 * eq_.params.gamma * eq_.rho_star / eq_.R_star;
}

VectorXd GalerkinSystem::density_at_nodes(const VectorXd& z) const {
    const int N = basis_.size();
    VectorXd rho = basis_.table() * z.segment(kTheta, N);
    rho.array() += eq_.rho_star + z[kRho2];
    return rho;
}

bool GalerkinSystem::in_validity_region(const VectorXd& z,
                                        double floor) const {
    if (eq_.R_star + z[kDR] < floor * eq_.R_star) return false;
    const VectorXd rho = density_at_nodes(z);
    return (rho.array() >= floor * eq_.rho_star).all();
}

void GalerkinSystem::nonlinear_terms(const VectorXd& z, VectorXd& N0,
                                     MatrixXd& N1) const {
    const PhysicalParams& p = eq_.params;
    const int N = basis_.size();
    const int n = N + 3;
    const double gamma = p.gamma;
    const double rho2 = z[kRho2], dR = z[kDR], vR = z[kVR];
    const auto theta = z.segment(kTheta, N);

    const double Rs = eq_.R_star, Rbs = eq_.Rbar_star, rhos = eq_.rho_star;
    const double R = Rs + dR;
    const double Rb = std::cbrt(R * R * R + eq_.V_bar);
    const double diffus = p.kappa / (gamma * p.c_g);
    const QuadratureRule& quad = basis_.quadrature();
    const int Q = quad.order;

    const VectorXd u1 = basis_.table() * theta;
    const VectorXd du1 = basis_.table_deriv() * theta;
    const VectorXd lap =
        -(basis_.table() * basis_.lambdas().cwiseProduct(theta).eval());

    // Pi = Pi1 * zdot + Pi0, evaluated pointwise at the quadrature nodes.
    VectorXd pi0_nodes(Q), pi1_nodes(Q);
    for (int q = 0; q < Q; ++q) {
        const double y = quad.nodes[q];
        const double rho_full = rhos + rho2 + u1[q];
        if (!(rho_full > 0.0))
            throw NumericalError("state left validity region (density <= 0)");
        pi0_nodes[q] =
            diffus * ((1.0 / (R * R * rho_full) - 1.0 / (Rs * Rs * rhos)) *
                          lap[q] -
                      du1[q] * du1[q] / (R * R * rho_full * rho_full));
        pi1_nodes[q] = (y / 3.0 * du1[q] + u1[q]) / (gamma * (rhos + rho2));
    }
    VectorXd weighted0(Q), weighted1(Q);
    for (int q = 0; q < Q; ++q) {
        const double y = quad.nodes[q];
        const double w = 4.0 * kPi * quad.weights[q] * y * y;
        weighted0[q] = w * pi0_nodes[q];
        weighted1[q] = w * pi1_nodes[q];
    }
    const VectorXd Pi0 = basis_.table().transpose() * weighted0;
    const VectorXd Pi1 = basis_.table().transpose() * weighted1;

    const double flux = basis_.boundary_flux(theta);
    const double Phi0 = -diffus *
                        (1.0 / (R * (rhos + rho2) * (rhos + rho2)) -
                         1.0 / (Rs * rhos * rhos)) *
                        flux;
    const double phi1 = -dR / (3.0 * gamma * (rhos + rho2)) +
                        Rs * rho2 / (3.0 * gamma * rhos * (rhos + rho2));

    const double RT = p.R_spec * p.T_inf;
    const double Psi0 =
        (4.0 * p.mu_l * eq_.V_bar *
             (1.0 / (R * (R * R * R + eq_.V_bar)) -
              1.0 / (Rs * (Rs * Rs * Rs + eq_.V_bar))) *
             vR +
         (2.0 * p.sigma / (Rs * Rs) * dR + 2.0 * p.sigma / R -
          2.0 * p.sigma / Rs) +
         (2.0 * p.sigma_bar * Rs * Rs / std::pow(Rbs, 4) * dR +
          2.0 * p.sigma_bar / Rb - 2.0 * p.sigma_bar / Rbs)) /
            RT +
        p.rho_l / RT *
            (1.5 - 2.0 * R / Rb + std::pow(R, 4) / (2.0 * std::pow(Rb, 4))) *
            vR * vR;
    const double psi1 = p.rho_l / RT * (dR + Rs * Rs / Rbs - R * R / Rb);

    const double inertia_inv = RT / (p.rho_l * eq_.R_tilde);
    N0 = VectorXd::Zero(n);
    N0[kRho2] = coupling_ * Phi0;
    N0[kVR] = -inertia_inv * Psi0;
    N0.segment(kTheta, N) = Pi0 - coupling_ * Phi0 * basis_.cs();

    N1 = MatrixXd::Zero(n, n);
    N1(kRho2, kRho2) = coupling_ * phi1;
    N1(kVR, kVR) = -inertia_inv * psi1;
    N1.block(kTheta, kRho2, N, 1) = Pi1 - coupling_ * phi1 * basis_.cs();
}

VectorXd GalerkinSystem::rhs(const VectorXd& z) const {
    VectorXd N0;
    MatrixXd N1;
    nonlinear_terms(z, N0, N1);
    const VectorXd b = L_ * z + N0;
    MatrixXd A = MatrixXd::Identity(dim(), dim()) - N1;
    Eigen::PartialPivLU<MatrixXd> lu(A);
    VectorXd zdot = lu.solve(b);
    if (!zdot.allFinite()) {
        Eigen::JacobiSVD<MatrixXd> svd(A);
        const double cond = svd.singularValues()(0) /
                            svd.singularValues()(svd.singularValues().size() - 1);
        throw NumericalError("implicit mass-matrix solve singular, cond = " +
                             std::to_string(cond));
    }
    return zdot;
}

double GalerkinSystem::mass(const VectorXd& z) const {
    const int N = basis_.size();
    const double R = eq_.R_star + z[kDR];
    const double bulk = 4.0 * kPi / 3.0 * (eq_.rho_star + z[kRho2]);
    const double modal = basis_.mass_moments().dot(z.segment(kTheta, N));
    return R * R * R * (bulk + modal);
}

namespace {
double shape_value(const IcProfile& profile, double y) {
    if (profile.shape == "parabolic") return 1.0 - y * y;
    if (profile.shape == "mode-k")
        return ModalBasis::eigenfunction(profile.mode_k, y) /
               (profile.mode_k * std::sqrt(kPi / 2.0));
    throw ValidationError("unknown ic shape: " + profile.shape);
}
}  // namespace

VectorXd GalerkinSystem::make_initial(const IcProfile& profile) const {
    const int N = basis_.size();
    const double rhos = eq_.rho_star;
    const VectorXd shape_modes = basis_.project(
        [&](double y) { return shape_value(profile, y); });
    const double shape_mass = shape_modes.dot(basis_.mass_moments());
    const double R0 = eq_.R_star * (1.0 + profile.delta);
    if (!(R0 > 0.0)) throw ValidationError("initial radius must be positive");
    // Unique multiplicative constant making the truncated mass equal M.
    const double denom =
        R0 * R0 * R0 * rhos * (4.0 * kPi / 3.0 + profile.eps * shape_mass);
    const double k_mass = eq_.M / denom;

    VectorXd z = VectorXd::Zero(N + 3);
    z[kRho2] = k_mass * rhos - rhos;
    z[kDR] = R0 - eq_.R_star;
    z[kVR] = profile.dR0;
    z.segment(kTheta, N) = k_mass * rhos * profile.eps * shape_modes;
    const VectorXd rho = density_at_nodes(z);
    if (!(rho.array() > 0.0).all())
        throw ValidationError("initial density not positive");
    return z;
}

VectorXd GalerkinSystem::make_initial_with_norm(const IcProfile& direction,
                                                double target_norm) const {
    double s = 1.0;
    VectorXd z;
    for (int it = 0; it < 24; ++it) {
        IcProfile scaled = direction;
        scaled.eps *= s;
        scaled.delta *= s;
        scaled.dR0 *= s;
        z = make_initial(scaled);
        const double norm = z.norm();
        if (std::abs(norm - target_norm) <= 1e-12 * target_norm) return z;
        s *= target_norm / norm;
    }
    return z;
}

Trajectory GalerkinSystem::simulate(const VectorXd& z0,
                                    const SimOptions& opts) const {
    Trajectory traj;
    const double dt = opts.output_dt > 0.0 ? opts.output_dt : opts.t_end / 400.0;
    traj.mass0 = mass(z0);

    RhsFn f = [this](const VectorXd& z) { return rhs(z); };
    bool left_validity = false;
    SampleFn on_sample = [&](double t, const VectorXd& z) {
        if (!in_validity_region(z, opts.validity_floor)) {
            left_validity = true;
            return false;
        }
        traj.t.push_back(t);
        traj.z.push_back(z);
        traj.mass.push_back(mass(z));
        traj.energy.push_back(total_energy(eq_, basis_, z));
        traj.dissipation.push_back(dissipation_rate(eq_, basis_, z));
        traj.zdot_norm.push_back(rhs(z).norm());
        return true;
    };

    OdeOptions ode;
    ode.rtol = opts.rtol;
    ode.atol = opts.atol;
    ode.max_steps = opts.max_steps;
    OdeOutcome out;
    if (opts.stepper == "rk45") {
        // Explicit stepping needs the stiff modal block resolved.
        ode.h_max = 1.0 / (eq_.kappa_bar * basis_.lambda(basis_.size()));
        out = integrate_rk45(f, z0, opts.t_end, dt, ode, on_sample);
    } else if (opts.stepper == "trbdf2") {
        out = integrate_trbdf2(f, z0, opts.t_end, dt, ode, on_sample);
    } else {
        throw ValidationError("unknown stepper: " + opts.stepper);
    }
    traj.status = left_validity ? "validity region exit" : out.status;
    traj.steps = out.steps;
    return traj;
}

double fit_decay_rate(const Trajectory& traj, double frac_lo, double frac_hi) {
    if (traj.t.size() < 6) throw NumericalError("trajectory too short to fit");
    const double t_end = traj.t.back();
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k + 1 < traj.t.size(); ++k) {
        const double tm = 0.5 * (traj.t[k] + traj.t[k + 1]);
        if (tm < frac_lo * t_end || tm > frac_hi * t_end) continue;
        const double inc = (traj.z[k + 1] - traj.z[k]).norm();
        if (inc <= 1e3 * std::numeric_limits<double>::epsilon() *
                       traj.z[k].norm())
            continue;
        ts.push_back(tm);
        ys.push_back(std::log(inc));
    }
    if (ts.size() < 4)
        throw NumericalError("not enough decaying samples in fit window");
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double n = double(ts.size());
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

}  // namespace bubblelab
