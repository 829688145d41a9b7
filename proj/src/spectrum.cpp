#include "bubblelab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;

// zeta(2j+2), j = 0..11
constexpr double kZetaEven[] = {
    1.6449340668482264365, 1.0823232337111381916, 1.0173430619844491397,
    1.0040773561979443394, 1.0009945751278180853, 1.0002460865533080483,
    1.0000612481350587048, 1.0000152822594086519, 1.0000038172932649998,
    1.0000009539620338728, 1.0000002384505027277, 1.0000000596081890513};

Complex coth(Complex w) {
    // stable for Re w >= 0; coth is odd.
    if (w.real() < 0.0) return -coth(-w);
    const Complex e = std::exp(-2.0 * w);
    return (1.0 + e) / (1.0 - e);
}
}  // namespace

Complex sum_inv_k2(Complex mu) {
    if (std::abs(mu) < 0.03) {
        Complex acc(0.0, 0.0), pw(1.0, 0.0);
        for (int j = 0; j < 12; ++j) {
            acc += (j % 2 == 0 ? kZetaEven[j] : -kZetaEven[j]) * pw;
            pw *= mu;
        }
        return acc;
    }
    const Complex x = std::sqrt(mu);  // even in x, branch irrelevant
    const Complex w = kPi * x;
    return (w * coth(w) - 1.0) / (2.0 * mu);
}

Complex sum_inv_k2_deriv(Complex mu) {
    if (std::abs(mu) < 0.03) {
        Complex acc(0.0, 0.0), pw(1.0, 0.0);
        for (int j = 1; j < 12; ++j) {
            const double coeff = double(j) * kZetaEven[j];
            acc += (j % 2 == 0 ? coeff : -coeff) * pw;
            pw *= mu;
        }
        return acc;
    }
    const Complex x = std::sqrt(mu);
    const Complex w = kPi * x;
    const Complex sh = std::sinh(w);
    return (2.0 - w * coth(w)) / (4.0 * mu * mu) -
           kPi * kPi / (4.0 * mu * sh * sh);
}

namespace {
struct MParts {
    double pref;      // pi/(R_spec T_inf gamma)
    double series_c;  // 8 (gamma-1) / pi^2
    double A, B, C;
    double pi2kb;
    double tail;  // 4 pi rho*/R*
};

MParts m_parts(const EquilibriumState& eq) {
    const PhysicalParams& p = eq.params;
    const DecayConstants c = derived_constants(eq);
    MParts parts;
    parts.pref = kPi / (p.R_spec * p.T_inf * p.gamma);
    parts.series_c = 8.0 * (p.gamma - 1.0) / (kPi * kPi);
    parts.A = c.A;
    parts.B = c.B;
    parts.C = c.C;
    parts.pi2kb = eq.pi2_kappa_bar();
    parts.tail = 4.0 * kPi * eq.rho_star / eq.R_star;
    return parts;
}

void check_pole_distance(Complex mu, double pi2kb) {
    const double r = std::sqrt(std::max(0.0, -mu.real()));
    const int k0 = int(std::lround(r));
    for (int k = std::max(1, k0 - 1); k <= k0 + 1; ++k) {
        if (std::abs(mu + Complex(double(k) * k, 0.0)) * pi2kb <
            1e-8 * pi2kb)
            throw NumericalError("lambda within guard radius of a pole");
    }
}
}  // namespace

Complex eval_M(Complex lambda, const EquilibriumState& eq) {
    const MParts m = m_parts(eq);
    const Complex mu = lambda / m.pi2kb;
    check_pole_distance(mu, m.pi2kb);
    const Complex bracket = 4.0 / 3.0 + m.series_c * sum_inv_k2(mu);
    const Complex quad = m.C * lambda * lambda + m.B * lambda - m.A;
    return m.pref * bracket * quad + m.tail;
}

Complex eval_M_deriv(Complex lambda, const EquilibriumState& eq) {
    const MParts m = m_parts(eq);
    const Complex mu = lambda / m.pi2kb;
    check_pole_distance(mu, m.pi2kb);
    const Complex bracket = 4.0 / 3.0 + m.series_c * sum_inv_k2(mu);
    const Complex dbracket = m.series_c * sum_inv_k2_deriv(mu) / m.pi2kb;
    const Complex quad = m.C * lambda * lambda + m.B * lambda - m.A;
    const Complex dquad = 2.0 * m.C * lambda + m.B;
    return m.pref * (dbracket * quad + bracket * dquad);
}

double eval_M_scale(Complex lambda, const EquilibriumState& eq) {
    const MParts m = m_parts(eq);
    const Complex mu = lambda / m.pi2kb;
    const double bracket =
        4.0 / 3.0 + std::abs(m.series_c * sum_inv_k2(mu));
    const double quad = m.C * std::norm(lambda) + m.B * std::abs(lambda) + m.A;
    return m.pref * bracket * quad + m.tail;
}

Window Window::default_for(const EquilibriumState& eq) {
    // covers the first few pole intervals where the low-lying zeros live
    const double pi2kb = eq.pi2_kappa_bar();
    return Window{-12.0 * pi2kb, -1e-12, 10.0 * pi2kb};
}

namespace {

// Newton polish with secant fallback; returns true when the residual meets
// the acceptance bound.
bool polish_root(const EquilibriumState& eq, Complex& lambda, double radius) {
    const Complex start = lambda;
    Complex prev = lambda + Complex(radius * 1e-3 + 1e-14, 0.0);
    Complex f_prev;
    try {
        f_prev = eval_M(prev, eq);
    } catch (const NumericalError&) {
        f_prev = Complex(1e300, 0.0);
    }
    for (int it = 0; it < 80; ++it) {
        Complex f, df;
        try {
            f = eval_M(lambda, eq);
            df = eval_M_deriv(lambda, eq);
        } catch (const NumericalError&) {
            return false;  // wandered into a pole guard
        }
        if (std::abs(f) <= 1e-12 * eval_M_scale(lambda, eq)) return true;
        Complex step;
        if (std::abs(df) > 1e-300) {
            step = -f / df;
        } else if (std::abs(f - f_prev) > 1e-300) {
            step = -f * (lambda - prev) / (f - f_prev);
        } else {
            return false;
        }
        prev = lambda;
        f_prev = f;
        lambda += step;
        if (std::abs(lambda - start) > 4.0 * radius + 1e-12) return false;
    }
    try {
        return std::abs(eval_M(lambda, eq)) <=
               1e-10 * eval_M_scale(lambda, eq);
    } catch (const NumericalError&) {
        return false;
    }
}

// Real roots: bracketed scan of each pole gap intersected with the window.
void real_roots(const EquilibriumState& eq, const Window& win,
                std::vector<RootInfo>& out) {
    const double pi2kb = eq.pi2_kappa_bar();
    const double guard = 1e-6 * pi2kb;
    auto m_real = [&](double x) { return eval_M(Complex(x, 0.0), eq).real(); };

    for (int k = 0;; ++k) {
        const double hi_pole = -pi2kb * double(k) * double(k);
        const double lo_pole = -pi2kb * double(k + 1) * double(k + 1);
        if (hi_pole - guard <= win.re_lo) break;     // deeper gaps only go left
        if (lo_pole + guard >= win.re_hi) continue;  // gap right of the window
        const double a = std::max(win.re_lo, lo_pole + guard);
        const double b =
            std::min(win.re_hi, (k == 0 ? win.re_hi : hi_pole - guard));
        if (a >= b) continue;
        const int n = 2000;
        double prev_x = a, prev_f = m_real(a);
        for (int i = 1; i <= n; ++i) {
            const double x = a + (b - a) * double(i) / n;
            const double f = m_real(x);
            if (prev_f != 0.0 && f != 0.0 &&
                std::signbit(prev_f) != std::signbit(f)) {
                double lo = prev_x, hi = x, flo = prev_f;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = m_real(mid);
                    if (fm != 0.0 && std::signbit(fm) == std::signbit(flo)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                Complex root(0.5 * (lo + hi), 0.0);
                if (polish_root(eq, root, (b - a) / n)) {
                    root.imag(0.0);  // the real scan yields real roots
                    out.push_back({root, std::abs(eval_M(root, eq)) /
                                             eval_M_scale(root, eq)});
                }
            }
            prev_x = x;
            prev_f = f;
        }
    }
}

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;
    double diag() const { return std::hypot(re_hi - re_lo, im_hi - im_lo); }
    Complex center() const {
        return Complex(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi));
    }
};

// Accumulated argument change of M along the segment [a,b], refined until
// each sub-step turns by less than pi/2. Returns false if M nearly
// vanishes on the contour.
bool edge_arg_change(const EquilibriumState& eq, Complex a, Complex b,
                     Complex fa, Complex fb, double& total, int depth) {
    const double scale = eval_M_scale(a, eq);
    if (std::abs(fa) < 1e-13 * scale || std::abs(fb) < 1e-13 * scale)
        return false;
    const double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 * kPi || depth > 48) {
        total += d;
        return true;
    }
    const Complex mid = 0.5 * (a + b);
    const Complex fm = eval_M(mid, eq);
    return edge_arg_change(eq, a, mid, fa, fm, total, depth + 1) &&
           edge_arg_change(eq, mid, b, fm, fb, total, depth + 1);
}

// Winding number of M around the rectangle (no poles off the real axis, so
// this counts zeros). Returns false when a contour point sits on a zero.
bool winding(const EquilibriumState& eq, const Rect& r, int& count) {
    const Complex c1(r.re_lo, r.im_lo), c2(r.re_hi, r.im_lo),
        c3(r.re_hi, r.im_hi), c4(r.re_lo, r.im_hi);
    const Complex f1 = eval_M(c1, eq), f2 = eval_M(c2, eq),
        f3 = eval_M(c3, eq), f4 = eval_M(c4, eq);
    double total = 0.0;
    if (!edge_arg_change(eq, c1, c2, f1, f2, total, 0)) return false;
    if (!edge_arg_change(eq, c2, c3, f2, f3, total, 0)) return false;
    if (!edge_arg_change(eq, c3, c4, f3, f4, total, 0)) return false;
    if (!edge_arg_change(eq, c4, c1, f4, f1, total, 0)) return false;
    count = int(std::lround(total / (2.0 * kPi)));
    return true;
}

void complex_roots(const EquilibriumState& eq, const Window& win,
                   int max_subdiv, std::vector<RootInfo>& out,
                   std::vector<Complex>& unresolved) {
    const double pi2kb = eq.pi2_kappa_bar();
    const double im_lo = 1e-6 * pi2kb;  // keeps real-axis roots out
    if (win.im_max <= im_lo) return;
    std::vector<std::pair<Rect, int>> stack;
    stack.push_back({Rect{win.re_lo, win.re_hi, im_lo, win.im_max}, 0});
    const double small = 1e-5 * pi2kb;
    while (!stack.empty()) {
        auto [r, depth] = stack.back();
        stack.pop_back();
        int w = 0;
        bool ok = winding(eq, r, w);
        if (!ok) {
            // a zero sits (numerically) on the contour: nudge the box
            Rect r2 = r;
            const double dx = 1e-3 * (r.re_hi - r.re_lo) + 1e-12;
            r2.re_lo -= dx;
            r2.re_hi += dx;
            r2.im_hi += dx;
            r2.im_lo = std::max(im_lo * 0.3, r.im_lo - dx);
            ok = winding(eq, r2, w);
            if (ok) r = r2;
        }
        if (!ok || w == 0) {
            if (!ok && depth >= max_subdiv) unresolved.push_back(r.center());
            if (!ok && depth < max_subdiv) {
                // split and retry
                const double rm = 0.5 * (r.re_lo + r.re_hi);
                const double im = 0.5 * (r.im_lo + r.im_hi);
                stack.push_back({Rect{r.re_lo, rm, r.im_lo, im}, depth + 1});
                stack.push_back({Rect{rm, r.re_hi, r.im_lo, im}, depth + 1});
                stack.push_back({Rect{r.re_lo, rm, im, r.im_hi}, depth + 1});
                stack.push_back({Rect{rm, r.re_hi, im, r.im_hi}, depth + 1});
            }
            continue;
        }
        if ((w == 1 && r.diag() < small) || depth >= max_subdiv) {
            Complex root = r.center();
            if (polish_root(eq, root, r.diag())) {
                out.push_back({root, std::abs(eval_M(root, eq)) /
                                         eval_M_scale(root, eq)});
            } else {
                unresolved.push_back(r.center());
            }
            continue;
        }
        const double rm = 0.5 * (r.re_lo + r.re_hi);
        const double im = 0.5 * (r.im_lo + r.im_hi);
        stack.push_back({Rect{r.re_lo, rm, r.im_lo, im}, depth + 1});
        stack.push_back({Rect{rm, r.re_hi, r.im_lo, im}, depth + 1});
        stack.push_back({Rect{r.re_lo, rm, im, r.im_hi}, depth + 1});
        stack.push_back({Rect{rm, r.re_hi, im, r.im_hi}, depth + 1});
    }
}

void dedup_sort(std::vector<RootInfo>& roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](const RootInfo& a,
                                             const RootInfo& b) {
        if (a.lambda.real() != b.lambda.real())
            return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    std::vector<RootInfo> unique;
    for (const auto& r : roots) {
        bool dup = false;
        for (const auto& u : unique)
            if (std::abs(r.lambda - u.lambda) < tol) dup = true;
        if (!dup) unique.push_back(r);
    }
    roots = std::move(unique);
}

}  // namespace

std::vector<RootInfo> find_roots(const EquilibriumState& eq,
                                 const Window& win, int max_subdiv) {
    if (!(win.re_lo < win.re_hi) || win.re_hi > 0.0)
        throw ValidationError("window must lie in the open left half-plane");
    std::vector<RootInfo> roots;
    std::vector<Complex> unresolved;
    real_roots(eq, win, roots);
    complex_roots(eq, win, max_subdiv, roots, unresolved);
    // conjugate symmetry: M(conj) = conj(M)
    const std::size_t found = roots.size();
    for (std::size_t i = 0; i < found; ++i)
        if (roots[i].lambda.imag() > 0.0)
            roots.push_back({std::conj(roots[i].lambda), roots[i].residual});
    dedup_sort(roots, 1e-8 * eq.pi2_kappa_bar());
    return roots;
}

DecayBounds decay_bounds(const EquilibriumState& eq) {
    const PhysicalParams& p = eq.params;
    const DecayConstants c = derived_constants(eq);
    const double ratio = 3.0 * p.R_spec * p.T_inf * p.gamma * eq.rho_star /
                         (eq.R_star * (c.K * c.C + c.A));
    const double q = (p.gamma - 1.0) / (ratio - 1.0);
    if (!(q > 0.0 && q < 1.0))
        throw NumericalError(
            "Theta ratio outside (0,1); contradicts the KC+A bounds");
    DecayBounds b;
    b.Theta1 = 1.0 - std::sqrt(q);
    b.Theta2 = 1.0 - q;
    b.subcritical = c.B * c.B <= 4.0 * c.K * c.C * c.C;
    b.varpi = varpi_from_constants(c.A, c.B, c.C, c.K, b.Theta1, b.Theta2,
                                   eq.pi2_kappa_bar());
    return b;
}

double varpi_from_constants(double A, double B, double C, double K,
                            double Theta1, double Theta2, double pi2kb) {
    (void)A;
    const double disc = B * B - 4.0 * K * C * C;
    if (disc <= 0.0)
        return 0.5 * std::min(Theta2 * pi2kb,
                              std::max(B / (2.0 * C),
                                       std::min(Theta1 * pi2kb,
                                                std::sqrt(K / 2.0))));
    return 0.5 *
           std::min(Theta2 * pi2kb, (B - std::sqrt(disc)) / (2.0 * C));
}

SpectrumReport spectrum_report(const EquilibriumState& eq, const Window& win,
                               int matrix_N, int max_subdiv) {
    SpectrumReport rep;
    rep.constants = derived_constants(eq);
    rep.bounds = decay_bounds(eq);

    std::vector<Complex> unresolved;
    {
        std::vector<RootInfo> roots;
        real_roots(eq, win, roots);
        complex_roots(eq, win, max_subdiv, roots, unresolved);
        const std::size_t found = roots.size();
        for (std::size_t i = 0; i < found; ++i)
            if (roots[i].lambda.imag() > 0.0)
                roots.push_back(
                    {std::conj(roots[i].lambda), roots[i].residual});
        dedup_sort(roots, 1e-8 * eq.pi2_kappa_bar());
        rep.roots = std::move(roots);
    }
    rep.unresolved = std::move(unresolved);

    const double pi2kb = eq.pi2_kappa_bar();
    rep.abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& r : rep.roots)
        rep.abscissa = std::max(rep.abscissa, r.lambda.real());
    rep.predicted_rate = -rep.abscissa;
    rep.empirical_theta0 = -rep.abscissa / pi2kb;

    bool real_root_in_gap = false;
    for (const auto& r : rep.roots)
        if (r.lambda.imag() == 0.0 && r.lambda.real() > -pi2kb &&
            r.lambda.real() < 0.0)
            real_root_in_gap = true;
    bool below_bound = true;
    for (const auto& r : rep.roots)
        if (r.lambda.real() > -2.0 * rep.bounds.varpi + 1e-12 * pi2kb)
            below_bound = false;
    rep.gap.lo = -pi2kb;
    rep.gap.hi = -2.0 * rep.bounds.varpi;
    rep.gap.certified = real_root_in_gap && below_bound &&
                        rep.bounds.Theta1 > 0.0 &&
                        rep.bounds.Theta1 <= rep.bounds.Theta2 &&
                        rep.bounds.Theta2 < 1.0 && rep.unresolved.empty();

    if (matrix_N > 0) {
        ModalBasis basis(eq, matrix_N, 2);  // tables unused for the matrix
        const Eigen::MatrixXd L = assemble_linear(eq, basis);
        Eigen::EigenSolver<Eigen::MatrixXd> es(L, /*computeEigenvectors=*/false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const Complex ev = es.eigenvalues()[i];
            if (ev.real() >= win.re_lo && ev.real() <= win.re_hi &&
                std::abs(ev.imag()) <= win.im_max)
                rep.matrix_eigs.push_back(ev);
        }
        std::sort(rep.matrix_eigs.begin(), rep.matrix_eigs.end(),
                  [](Complex a, Complex b) {
                      if (a.real() != b.real()) return a.real() > b.real();
                      return a.imag() < b.imag();
                  });
    }
    return rep;
}

std::vector<RateRow> rate_table(const std::vector<EquilibriumState>& family,
                                const std::vector<double>& axis_values) {
    std::vector<RateRow> rows;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const EquilibriumState& eq = family[i];
        const SpectrumReport rep =
            spectrum_report(eq, Window::default_for(eq), /*matrix_N=*/0);
        RateRow row;
        row.axis_value = i < axis_values.size() ? axis_values[i] : double(i);
        row.R_star = eq.R_star;
        row.rho_star = eq.rho_star;
        row.kappa_bar = eq.kappa_bar;
        row.pi2_kappa_bar = eq.pi2_kappa_bar();
        row.abscissa = rep.abscissa;
        row.varpi = rep.bounds.varpi;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace bubblelab
