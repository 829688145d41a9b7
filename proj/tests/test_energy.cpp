#include "doctest.h"

#include <numbers>
#include <random>

#include "bubblelab/energy.hpp"
#include "bubblelab/dynamics.hpp"
#include "oracles.hpp"

using namespace bubblelab;

namespace {
constexpr double kPi = std::numbers::pi;

const EquilibriumState& generic_eq() {
    static EquilibriumState eq = solve_radius(1.0, 1.0, PhysicalParams{});
    return eq;
}

// Random interface + interior density perturbation, scaled so the measured
// condition value lands at `fraction` of the working radius, then
// mass-projected by adjusting the bubble radius.
Eigen::VectorXd random_admissible_state(const EquilibriumState& eq,
                                        const ModalBasis& basis,
                                        std::mt19937_64& rng,
                                        double fraction, double delta0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int N = basis.size();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(N + 3);
    z[kRho2] = gauss(rng);
    for (int j = 0; j < std::min(8, N); ++j)
        z[kTheta + j] = gauss(rng) / (1.0 + j);

    // measure the sup of |u| on the nodes and scale to the target condition
    const Eigen::VectorXd u1 = basis.table() * z.segment(kTheta, N);
    double sup = std::abs(z[kRho2]);
    for (int q = 0; q < basis.quadrature().order; ++q)
        sup = std::max(sup, std::abs(z[kRho2] + u1[q]));
    const double target =
        fraction * delta0 * eq.rho_star / (1.0 + std::abs(std::log(eq.rho_star)));
    z *= target / sup;

    // mass projection: R^3 * int rho = M
    const double integral = 4.0 * kPi / 3.0 * (eq.rho_star + z[kRho2]) +
                            basis.mass_moments().dot(z.segment(kTheta, N));
    const double R = std::cbrt(eq.M / integral);
    z[kDR] = R - eq.R_star;
    return z;
}
}  // namespace

TEST_CASE("gap vanishes at the equilibrium") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 16);
    const double E_dagger = equilibrium_energy(eq);
    const double E = total_energy(eq, basis, Eigen::VectorXd::Zero(19));
    CHECK(std::abs(E - E_dagger) <= 1e-12 * std::abs(E_dagger));
}

TEST_CASE("pure kinetic perturbation has the closed-form gap") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 16);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(19);
    z[kVR] = 3e-2;
    const double gap = total_energy(eq, basis, z) - equilibrium_energy(eq);
    const double want = 2.0 * kPi * eq.params.rho_l *
                        std::pow(eq.R_star, 3) * z[kVR] * z[kVR] *
                        (1.0 - eq.R_star / eq.Rbar_star);
    CHECK(gap == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("static density perturbations raise the energy") {
    const auto& eq = generic_eq();
    GalerkinSystem sys(eq, 16);
    IcProfile ic;
    ic.eps = 1e-3;
    const Eigen::VectorXd z = sys.make_initial(ic);
    CHECK(total_energy(eq, sys.basis(), z) - equilibrium_energy(eq) > 0.0);
}

TEST_CASE("dissipation splits into thermal and viscous parts") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 16);
    double th = 0.0, vi = 0.0;
    CHECK(dissipation_rate(eq, basis, Eigen::VectorXd::Zero(19)) == 0.0);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(19);
    z[kVR] = 2e-2;  // uniform density, moving radius
    const double D = dissipation_rate(eq, basis, z, &th, &vi);
    CHECK(th == 0.0);
    const double want = 16.0 * kPi * eq.params.mu_l * eq.V_bar * eq.R_star *
                        z[kVR] * z[kVR] /
                        (std::pow(eq.R_star, 3) + eq.V_bar);
    CHECK(D == doctest::Approx(want).epsilon(1e-12));

    z[kTheta + 2] = 1e-3;  // add a gradient: thermal part turns on
    dissipation_rate(eq, basis, z, &th, &vi);
    CHECK(th > 0.0);
}

TEST_CASE("4th-order derivative is exact on cubics") {
    std::vector<double> t, f;
    for (int k = 0; k <= 12; ++k) {
        const double x = 0.1 * k;
        t.push_back(x);
        f.push_back(1.0 + x - 2.0 * x * x + 0.5 * x * x * x);
    }
    const auto d = fd_derivative4(t, f);
    for (int k = 0; k <= 12; ++k) {
        const double x = 0.1 * k;
        CHECK(d[k] == doctest::Approx(1.0 - 4.0 * x + 1.5 * x * x)
                          .epsilon(1e-10));
    }
}

TEST_CASE("trajectory audit: monotone energy, small residual") {
    const auto& eq = generic_eq();
    GalerkinSystem sys(eq, 16);
    SimOptions opts;
    opts.t_end = 2.0 / eq.pi2_kappa_bar();
    opts.rtol = 1e-9;
    opts.atol = 1e-14;
    const Eigen::VectorXd z0 = sys.make_initial_with_norm(
        IcProfile{1.0, 0.5, 0.0, "parabolic", 1}, 1e-3);
    const Trajectory traj = sys.simulate(z0, opts);
    REQUIRE(traj.status == "done");
    const TrajectoryAudit audit = audit_trajectory(sys, traj, opts.rtol);
    CHECK(audit.monotone);
    CHECK(audit.coercivity_ok);
    CHECK(traj.energy.back() < traj.energy.front());
    // residual is small compared to the dissipation scale
    double d_scale = 0.0;
    for (double d : traj.dissipation) d_scale = std::max(d_scale, d);
    CHECK(audit.max_residual <= 0.05 * d_scale);
}

TEST_CASE("minimizer inequality at the equilibrium and on random states") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 32);
    const auto at_eq =
        minimizer_gap(eq, basis, Eigen::VectorXd::Zero(35), 0.0);
    CHECK(std::abs(at_eq.lhs_gap) <= 1e-12 * equilibrium_energy(eq));
    CHECK(at_eq.rhs_quadratic == 0.0);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const Eigen::VectorXd z =
            random_admissible_state(eq, basis, rng, u(rng), 0.05);
        const auto check = minimizer_gap(eq, basis, z, 0.0);
        CHECK(check.inside_region);
        CHECK(check.rhs_quadratic >= 0.0);
        CHECK(check.lhs_gap >= check.rhs_quadratic);
    }
}

TEST_CASE("both sides of the minimizer bound are quadratic in epsilon") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 32);
    std::mt19937_64 rng(7);
    const Eigen::VectorXd base =
        random_admissible_state(eq, basis, rng, 1.0, 0.05);
    std::vector<double> scales, lhs, rhs;
    for (double s : {1.0, 0.5, 0.25, 0.125}) {
        Eigen::VectorXd z = base;
        z.head(1) *= s;
        z.segment(kTheta, 32) *= s;
        // re-project the mass at the new amplitude
        const double integral =
            4.0 * kPi / 3.0 * (eq.rho_star + z[kRho2]) +
            basis.mass_moments().dot(z.segment(kTheta, 32));
        z[kDR] = std::cbrt(eq.M / integral) - eq.R_star;
        const auto check = minimizer_gap(eq, basis, z, 0.0);
        scales.push_back(s);
        lhs.push_back(check.lhs_gap);
        rhs.push_back(check.rhs_quadratic);
    }
    const double p_lhs = oracles::loglog_slope(scales, lhs);
    const double p_rhs = oracles::loglog_slope(scales, rhs);
    CHECK(p_lhs >= 1.9);
    CHECK(p_lhs <= 2.1);
    CHECK(p_rhs >= 1.9);
    CHECK(p_rhs <= 2.1);
}

TEST_CASE("minimizer_gap refuses states outside the certified region") {
    const auto& eq = generic_eq();
    ModalBasis basis(eq, 8);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(11);
    z[kRho2] = 0.5 * eq.rho_star;  // condition far above 0.05
    CHECK_THROWS_AS(minimizer_gap(eq, basis, z, 0.0), ValidationError);
}

TEST_CASE("energy functional rejects the infinite-volume sentinel") {
    const auto inf = solve_radius(1.0, std::numeric_limits<double>::infinity(),
                                  PhysicalParams{});
    CHECK_THROWS_AS(equilibrium_energy(inf), ValidationError);
}
