#include "doctest.h"

#include <numbers>
#include <random>

#include "bubblelab/spectrum.hpp"
#include "oracles.hpp"

using namespace bubblelab;

namespace {
constexpr double kPi = std::numbers::pi;

const EquilibriumState& generic_eq() {
    static EquilibriumState eq = solve_radius(1.0, 1.0, PhysicalParams{});
    return eq;
}

const EquilibriumState& small_v_eq() {
    static EquilibriumState eq =
        solve_with_volume_ratio(1.0, 1e-3, PhysicalParams{});
    return eq;
}

// Truncated characteristic function: the sum cut at N terms. The nonzero
// eigenvalues of the N-mode matrix are exactly its roots.
Complex eval_M_truncated(Complex lambda, const EquilibriumState& eq, int N) {
    const PhysicalParams& p = eq.params;
    const DecayConstants c = derived_constants(eq);
    const double pi2kb = eq.pi2_kappa_bar();
    Complex sum(0.0, 0.0);
    for (int k = N; k >= 1; --k)
        sum += 8.0 * (p.gamma - 1.0) * eq.kappa_bar /
               (pi2kb * double(k) * double(k) + lambda);
    const Complex quad = c.C * lambda * lambda + c.B * lambda - c.A;
    return kPi / (p.R_spec * p.T_inf * p.gamma) * (4.0 / 3.0 + sum) * quad +
           4.0 * kPi * eq.rho_star / eq.R_star;
}
}  // namespace

TEST_CASE("M(0) matches the analytic expression and is positive") {
    const auto& eq = generic_eq();
    const PhysicalParams& p = eq.params;
    const Complex got = eval_M(Complex(0.0, 0.0), eq);
    const double want =
        4.0 * kPi / (3.0 * p.R_spec * p.T_inf) *
        (4.0 * p.sigma / (eq.R_star * eq.R_star) +
         6.0 * p.sigma_bar / (eq.R_star * eq.Rbar_star) -
         2.0 * p.sigma_bar * eq.R_star * eq.R_star /
             std::pow(eq.Rbar_star, 4));
    CHECK(got.real() == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(got.imag()) <= 1e-14 * want);
    CHECK(got.real() > 0.0);
}

TEST_CASE("M(0) > 0 on randomized equilibria") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> logu(-1.5, 1.5);
    for (int rep = 0; rep < 50; ++rep) {
        PhysicalParams p;
        p.sigma = std::pow(10.0, logu(rng));
        p.sigma_bar = std::pow(10.0, logu(rng));
        p.T_inf = std::pow(10.0, logu(rng));
        p = with_derived_gamma(p);
        const auto eq = solve_radius(std::pow(10.0, logu(rng)),
                                     std::pow(10.0, logu(rng)), p);
        CHECK(eval_M(Complex(0.0, 0.0), eq).real() > 0.0);
    }
}

TEST_CASE("closed-form series agrees with the brute-force oracle") {
    const auto& eq = generic_eq();
    const double pi2kb = eq.pi2_kappa_bar();
    const PhysicalParams& p = eq.params;
    const double series_c = 8.0 * (p.gamma - 1.0) / (kPi * kPi);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(-12.0, -1e-6), ui(-10.0, 10.0);
    int tested = 0;
    while (tested < 100) {
        const Complex lambda(ur(rng) * pi2kb, ui(rng) * pi2kb);
        const Complex mu = lambda / pi2kb;
        // stay clear of poles (the oracle diverges there too)
        const double r = std::sqrt(std::max(0.0, -mu.real()));
        const int k0 = int(std::lround(r));
        bool near_pole = false;
        for (int k = std::max(1, k0 - 1); k <= k0 + 1; ++k)
            if (std::abs(mu + Complex(double(k) * k, 0.0)) < 1e-3)
                near_pole = true;
        if (near_pole) continue;
        ++tested;
        const Complex closed = eval_M(lambda, eq);
        const Complex sum = oracles::series_sum_oracle(mu, 1'000'000);
        const DecayConstants c = derived_constants(eq);
        const Complex brute =
            kPi / (p.R_spec * p.T_inf * p.gamma) * (4.0 / 3.0 + series_c * sum) *
                (c.C * lambda * lambda + c.B * lambda - c.A) +
            4.0 * kPi * eq.rho_star / eq.R_star;
        CHECK(std::abs(closed - brute) <= 1e-10 * std::abs(brute));
    }
}

TEST_CASE("series evaluation is continuous across the small-mu switch") {
    for (double arg : {0.0, 1.1, 2.5, -2.0}) {
        const Complex dir = std::polar(1.0, arg);
        const Complex below = sum_inv_k2(0.0299 * dir);
        const Complex above = sum_inv_k2(0.0301 * dir);
        CHECK(std::abs(below - above) <= 1e-4 * std::abs(below));
        const Complex db = sum_inv_k2_deriv(0.0299 * dir);
        const Complex da = sum_inv_k2_deriv(0.0301 * dir);
        CHECK(std::abs(db - da) <= 1e-3 * std::abs(db));
    }
    // S(0) = pi^2/6
    CHECK(sum_inv_k2(Complex(0, 0)).real() ==
          doctest::Approx(kPi * kPi / 6.0).epsilon(1e-14));
}

TEST_CASE("M diverges to -inf approaching the first pole from the right") {
    const auto& eq = generic_eq();
    const double pi2kb = eq.pi2_kappa_bar();
    const double m4 = eval_M(Complex(-pi2kb + 1e-4 * pi2kb, 0.0), eq).real();
    const double m5 = eval_M(Complex(-pi2kb + 1e-5 * pi2kb, 0.0), eq).real();
    CHECK(m4 < 0.0);
    CHECK(m5 < 10.0 * m4 * 0.5);  // roughly 1/d growth
    CHECK_THROWS_AS(eval_M(Complex(-pi2kb + 1e-10 * pi2kb, 0.0), eq),
                    NumericalError);
}

TEST_CASE("conjugate symmetry of M") {
    const auto& eq = generic_eq();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, -0.1), v(0.1, 8.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Complex lambda(u(rng), v(rng));
        const Complex a = eval_M(lambda, eq);
        const Complex b = eval_M(std::conj(lambda), eq);
        CHECK(std::abs(std::conj(a) - b) <= 1e-13 * std::abs(a));
    }
}

TEST_CASE("analytic derivative of M matches finite differences") {
    const auto& eq = generic_eq();
    const double pi2kb = eq.pi2_kappa_bar();
    for (Complex lambda : {Complex(-0.4 * pi2kb, 0.2 * pi2kb),
                           Complex(-2.2 * pi2kb, 1.3 * pi2kb),
                           Complex(-6.5 * pi2kb, 0.0)}) {
        const Complex h(1e-6 * pi2kb, 0.0);
        const Complex fd =
            (eval_M(lambda + h, eq) - eval_M(lambda - h, eq)) / (2.0 * h);
        const Complex an = eval_M_deriv(lambda, eq);
        CHECK(std::abs(fd - an) <= 1e-7 * std::abs(an));
    }
}

TEST_CASE("root finder: residuals, conjugate pairs, matrix cross-check") {
    const auto& eq = generic_eq();
    const double pi2kb = eq.pi2_kappa_bar();
    const Window win = Window::default_for(eq);
    const auto roots = find_roots(eq, win);
    REQUIRE(!roots.empty());
    bool real_in_gap = false;
    for (const auto& r : roots) {
        CHECK(r.residual <= 1e-10);
        CHECK(r.lambda.real() < 0.0);
        if (r.lambda.imag() == 0.0 && r.lambda.real() > -pi2kb)
            real_in_gap = true;
        if (r.lambda.imag() != 0.0) {
            bool has_conj = false;
            for (const auto& s : roots)
                if (std::abs(s.lambda - std::conj(r.lambda)) < 1e-8 * pi2kb)
                    has_conj = true;
            CHECK(has_conj);
        }
    }
    CHECK(real_in_gap);

    // matrix eigenvalues are exactly the roots of the truncated function
    const SpectrumReport rep = spectrum_report(eq, win, 64);
    REQUIRE(!rep.matrix_eigs.empty());
    for (const Complex ev : rep.matrix_eigs) {
        if (std::abs(ev) < 1e-8) continue;  // kernel eigenvalue
        CHECK(std::abs(eval_M_truncated(ev, eq, 64)) <=
              1e-7 * eval_M_scale(ev, eq));
    }
}

TEST_CASE("truncated-matrix eigenvalues approach the M-roots at order 1/N") {
    const auto& eq = generic_eq();
    const Window win = Window::default_for(eq);
    const auto roots = find_roots(eq, win);
    // slowest root
    const Complex slow = roots.front().lambda;
    std::vector<double> inv_n, dist;
    for (int N : {32, 64, 128}) {
        const SpectrumReport rep = spectrum_report(
            eq, Window{slow.real() - 1.0, -1e-10, 1.0}, N, 6);
        double best = 1e300;
        for (const Complex ev : rep.matrix_eigs)
            best = std::min(best, std::abs(ev - slow));
        inv_n.push_back(1.0 / N);
        dist.push_back(best);
    }
    CHECK(oracles::loglog_slope(inv_n, dist) >= 0.9);
}

TEST_CASE("decay bounds on the generic instance") {
    const auto& eq = generic_eq();
    const auto b = decay_bounds(eq);
    CHECK(b.Theta1 > 0.0);
    CHECK(b.Theta1 <= b.Theta2);
    CHECK(b.Theta2 < 1.0);
    const auto roots = find_roots(eq, Window::default_for(eq));
    for (const auto& r : roots)
        CHECK(r.lambda.real() < -2.0 * b.varpi);
}

TEST_CASE("varpi formula is continuous across the case boundary") {
    const double A = 3.0, C = 0.2, K = 50.0, pi2kb = 2.0;
    const double Theta1 = 0.1, Theta2 = 0.3;
    const double B_crit = 2.0 * std::sqrt(K) * C;
    const double below = varpi_from_constants(A, B_crit * (1.0 - 1e-9), C, K,
                                              Theta1, Theta2, pi2kb);
    const double above = varpi_from_constants(A, B_crit * (1.0 + 1e-9), C, K,
                                              Theta1, Theta2, pi2kb);
    CHECK(std::abs(below - above) <= 1e-7 * below);
}

TEST_CASE("small-volume instance: certified spectral gap") {
    const auto& eq = small_v_eq();
    const double pi2kb = eq.pi2_kappa_bar();
    const auto k = derived_constants(eq);
    CHECK(k.B * k.B < 4.0 * k.K * k.C * k.C);  // subcritical damping
    const SpectrumReport rep =
        spectrum_report(eq, Window::default_for(eq), 64);
    CHECK(rep.bounds.subcritical);
    CHECK(rep.gap.certified);
    CHECK(rep.abscissa > -pi2kb);
    CHECK(rep.abscissa < 0.0);
    CHECK(rep.empirical_theta0 > 0.0);
    CHECK(rep.empirical_theta0 < 1.0);
    CHECK(rep.abscissa < -2.0 * rep.bounds.varpi);
}

TEST_CASE("rate scaling: quarter mass or 4x temperature doubles pi^2 kb") {
    PhysicalParams p;
    const auto base = solve_with_volume_ratio(1.0, 1e-3, p);
    const auto quarter = solve_with_volume_ratio(0.25, 1e-3, p);
    CHECK(quarter.pi2_kappa_bar() / base.pi2_kappa_bar() ==
          doctest::Approx(2.0).epsilon(0.05));
    PhysicalParams hot = p;
    hot.T_inf = 4.0;
    const auto hot_eq = solve_with_volume_ratio(1.0, 1e-3, hot);
    CHECK(hot_eq.pi2_kappa_bar() / base.pi2_kappa_bar() ==
          doctest::Approx(2.0).epsilon(0.05));

    const auto rows = rate_table({quarter, base}, {0.25, 1.0});
    CHECK(std::abs(rows[0].abscissa) > std::abs(rows[1].abscissa));
    for (const auto& row : rows) {
        CHECK(row.abscissa > -row.pi2_kappa_bar);
        CHECK(row.abscissa < 0.0);
    }
}
