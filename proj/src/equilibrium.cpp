#include "bubblelab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bubblelab/parallel.hpp"

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;

double poly_eval_deriv(const std::array<double, 10>& c, double x) {
    double acc = 0.0;
    for (int k = 9; k >= 1; --k) acc = acc * x + k * c[k];
    return acc;
}

double poly_abs_scale(const std::array<double, 10>& c, double x) {
    double acc = 0.0;
    const double ax = std::abs(x);
    for (int k = 9; k >= 0; --k) acc = acc * ax + std::abs(c[k]);
    return std::max(acc, 1e-300);
}

// Root of the scale-free polynomial in w = R/sqrt(I) on (1/sqrt(1+beta), 1).
// The polynomial is negative at the left endpoint and +beta^3 at w=1, with a
// single crossing in between. Bisection to width 1e-6, then safeguarded
// Newton polished to |p|/scale <= 1e-14.
double solve_scaled_root(double beta, double v_tilde) {
    const auto c = poly_coeffs(1.0, beta, v_tilde);
    double lo = 1.0 / std::sqrt(1.0 + beta);
    double hi = 1.0;
    double flo = poly_eval(c, lo);
    double fhi = poly_eval(c, hi);
    if (flo == 0.0) return lo;
    if (!(flo < 0.0 && fhi > 0.0))
        throw NumericalError(
            "equilibrium bracket has no sign change; parameters corrupted");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double fm = poly_eval(c, mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        const double f = poly_eval(c, w);
        if (std::abs(f) <= 1e-14 * poly_abs_scale(c, w)) break;
        if (f < 0.0)
            lo = w;
        else
            hi = w;
        const double df = poly_eval_deriv(c, w);
        double next = w - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == w) break;
        w = next;
    }
    return w;
}
}  // namespace

std::array<double, 10> poly_coeffs(double I, double beta, double V_bar) {
    if (!(I > 0.0)) throw ValidationError("I must be positive");
    if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
    if (!(V_bar >= 0.0)) throw ValidationError("V_bar must be nonnegative");
    std::array<double, 10> c{};
    c[9] = beta * beta * beta + 1.0;
    c[7] = -3.0 * I;
    c[6] = V_bar;
    c[5] = 3.0 * I * I;
    c[4] = -3.0 * I * V_bar;
    c[3] = -I * I * I;
    c[2] = 3.0 * I * I * V_bar;
    c[0] = -I * I * I * V_bar;
    return c;
}

double poly_eval(const std::array<double, 10>& c, double x) {
    double acc = 0.0;
    for (int k = 9; k >= 0; --k) acc = acc * x + c[k];
    return acc;
}

double equilibrium_density(double R_star, const PhysicalParams& p, double M,
                           double V) {
    const auto mv = MassVolumePair::from_mass_volume(M, V);
    const double from_mass = 3.0 * M / (4.0 * kPi * R_star * R_star * R_star);
    const double Rbar =
        mv.infinite_volume()
            ? std::numeric_limits<double>::infinity()
            : std::cbrt(R_star * R_star * R_star + mv.V_bar);
    const double from_pressure =
        2.0 / (p.R_spec * p.T_inf) *
        (p.sigma / R_star + (std::isinf(Rbar) ? 0.0 : p.sigma_bar / Rbar));
    if (std::abs(from_mass - from_pressure) > 1e-10 * from_mass)
        throw NumericalError("equilibrium density expressions disagree; bad root");
    return 0.5 * (from_mass + from_pressure);
}

EquilibriumState solve_radius(double M, double V, const PhysicalParams& p) {
    validate_params(p);
    const auto mv = MassVolumePair::from_mass_volume(M, V);
    EquilibriumState eq;
    eq.params = p;
    eq.M = M;
    eq.V = V;
    eq.V_bar = mv.V_bar;
    eq.beta = p.beta();
    eq.I_scale = 3.0 * p.R_spec * p.T_inf * M / (8.0 * kPi * p.sigma);
    const double sqrtI = std::sqrt(eq.I_scale);
    eq.bracket_lo = sqrtI / std::sqrt(1.0 + eq.beta);
    eq.bracket_hi = sqrtI;

    if (eq.beta == 0.0 || mv.infinite_volume()) {
        // sigma_bar = 0: quadratic case, R* = sqrt(I) exactly.
        // V = inf: the external curvature term vanishes in the limit.
        eq.R_star = sqrtI;
    } else {
        const double v_tilde = eq.V_bar / (eq.I_scale * sqrtI);
        eq.R_star = solve_scaled_root(eq.beta, v_tilde) * sqrtI;
    }

    eq.Rbar_star = mv.infinite_volume()
                       ? std::numeric_limits<double>::infinity()
                       : std::cbrt(eq.R_star * eq.R_star * eq.R_star + eq.V_bar);
    eq.rho_star = equilibrium_density(eq.R_star, p, M, V);
    eq.kappa_bar =
        p.kappa / (eq.R_star * eq.R_star * eq.rho_star * p.gamma * p.c_g);
    eq.R_tilde = mv.infinite_volume()
                     ? eq.R_star
                     : eq.R_star - eq.R_star * eq.R_star / eq.Rbar_star;

    const double r_mass =
        std::abs(4.0 * kPi / 3.0 * eq.rho_star * std::pow(eq.R_star, 3) - M) / M;
    const double lhs = eq.rho_star * p.R_spec * p.T_inf;
    const double rhs =
        2.0 * (p.sigma / eq.R_star +
               (std::isinf(eq.Rbar_star) ? 0.0 : p.sigma_bar / eq.Rbar_star));
    eq.residual = std::max(r_mass, std::abs(lhs - rhs) / lhs);
    return eq;
}

MassVolumePair inverse_map(double rho_star, double R_star,
                           const PhysicalParams& p) {
    const double excess = p.R_spec * p.T_inf * rho_star * R_star - 2.0 * p.sigma;
    if (!(excess > 0.0))
        throw ValidationError("state not on equilibrium manifold");
    const double M = 4.0 * kPi / 3.0 * rho_star * std::pow(R_star, 3);
    // From the pressure identity, Rbar*/R* = 2*sigma_bar/excess.
    const double ratio = 2.0 * p.sigma_bar / excess;
    if (!(ratio > 1.0))
        throw ValidationError("state not on equilibrium manifold");
    const double V =
        4.0 * kPi / 3.0 * std::pow(R_star, 3) * (ratio * ratio * ratio - 1.0);
    return MassVolumePair::from_mass_volume(M, V);
}

DecayConstants derived_constants(const EquilibriumState& eq) {
    const PhysicalParams& p = eq.params;
    DecayConstants k;
    const double R = eq.R_star, Rb = eq.Rbar_star;
    if (std::isinf(Rb)) {
        k.A = 2.0 * p.sigma / (R * R);
        k.B = 4.0 * p.mu_l / R;
        k.C = p.rho_l * eq.R_tilde;
        k.K = 2.0 * p.R_spec * p.T_inf * eq.rho_star / (p.rho_l * R * R);
        return k;
    }
    k.A = 2.0 * p.sigma / (R * R) + 2.0 * p.sigma_bar * R * R / std::pow(Rb, 4);
    k.B = 4.0 * p.mu_l * eq.V_bar / (R * (R * R * R + eq.V_bar));
    k.C = p.rho_l * eq.R_tilde;
    k.K = 2.0 * p.R_spec * p.T_inf * eq.rho_star * Rb /
          (p.rho_l * R * R * (Rb - R));
    return k;
}

namespace {
int count_changes(const std::array<double, 10>& c, double lo, double hi,
                  std::ptrdiff_t begin, std::ptrdiff_t end, std::ptrdiff_t n) {
    int changes = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (std::ptrdiff_t i = begin; i < end; ++i) {
        const double w = lo + (hi - lo) * double(i) / double(n - 1);
        const double f = poly_eval(c, w);
        if (f == 0.0) continue;
        if (have_prev && std::signbit(f) != std::signbit(prev)) ++changes;
        prev = f;
        have_prev = true;
    }
    return changes;
}
}  // namespace

int scan_sign_changes_serial(double I, double beta, double V_bar,
                             int n_points) {
    const double sqrtI = std::sqrt(I);
    const double v_tilde = V_bar / (I * sqrtI);
    const auto c = poly_coeffs(1.0, beta, v_tilde);
    const double lo = 1.0 / std::sqrt(1.0 + beta);
    return count_changes(c, lo, 1.0, 0, n_points, n_points);
}

int scan_sign_changes(double I, double beta, double V_bar, int n_points) {
    if (!detail::use_parallel() || n_points < 4096)
        return scan_sign_changes_serial(I, beta, V_bar, n_points);
    const double sqrtI = std::sqrt(I);
    const double v_tilde = V_bar / (I * sqrtI);
    const auto c = poly_coeffs(1.0, beta, v_tilde);
    const double lo = 1.0 / std::sqrt(1.0 + beta);
    const int chunks = std::min(64, n_points / 1024);
    std::vector<int> per_chunk(chunks, 0);
    // Chunks overlap by one point so boundary sign changes are not lost.
    parallel_for(chunks, [&](std::ptrdiff_t ci) {
        const std::ptrdiff_t a = ci * n_points / chunks;
        const std::ptrdiff_t b =
            std::min<std::ptrdiff_t>(n_points, (ci + 1) * n_points / chunks + 1);
        per_chunk[ci] = count_changes(c, lo, 1.0, a, b, n_points);
    });
    int total = 0;
    for (int v : per_chunk) total += v;
    return total;
}

std::vector<EquilibriumState> solve_batch_serial(
    const std::vector<std::pair<double, double>>& mv, const PhysicalParams& p) {
    std::vector<EquilibriumState> out;
    out.reserve(mv.size());
    for (const auto& [M, V] : mv) out.push_back(solve_radius(M, V, p));
    return out;
}

std::vector<EquilibriumState> solve_batch(
    const std::vector<std::pair<double, double>>& mv, const PhysicalParams& p) {
    std::vector<EquilibriumState> out(mv.size());
    parallel_for(static_cast<std::ptrdiff_t>(mv.size()), [&](std::ptrdiff_t i) {
        out[i] = solve_radius(mv[i].first, mv[i].second, p);
    });
    return out;
}

EquilibriumState solve_with_volume_ratio(double M, double vbar_over_R3,
                                         const PhysicalParams& p) {
    if (!(vbar_over_R3 > 0.0))
        throw ValidationError("volume ratio must be positive");
    double R_guess = std::sqrt(3.0 * p.R_spec * p.T_inf * M /
                               (8.0 * kPi * p.sigma) / (1.0 + p.beta()));
    EquilibriumState eq;
    for (int it = 0; it < 12; ++it) {
        const double V = 4.0 * kPi / 3.0 * vbar_over_R3 * std::pow(R_guess, 3);
        eq = solve_radius(M, V, p);
        if (std::abs(eq.V_bar / std::pow(eq.R_star, 3) - vbar_over_R3) <=
            1e-12 * vbar_over_R3)
            break;
        R_guess = eq.R_star;
    }
    return eq;
}

}  // namespace bubblelab
