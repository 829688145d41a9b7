#include "bubblelab/modal.hpp"

#include <cmath>
#include <numbers>

#include "bubblelab/parallel.hpp"

namespace bubblelab {

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);
}  // namespace

double inv_square_tail(int N) {
    // trigamma(N+1): push the argument above 24 by the recurrence
    // psi'(x) = psi'(x+1) + 1/x^2, then use the asymptotic expansion.
    double x = N + 1.0;
    double acc = 0.0;
    while (x < 24.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    // 1/x + 1/(2x^2) + 1/(6x^3) - 1/(30x^5) + 1/(42x^7) - 1/(30x^9)
    double tail = inv * (1.0 + inv * (0.5 + inv * (1.0 / 6.0 +
                  inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 - inv2 / 30.0)))));
    return acc + tail;
}

double ModalBasis::eigenfunction(int j, double y) {
    const double a = j * kPi;
    const double u = a * y;
    if (u < 0.35) {
        const double u2 = u * u;
        // sin(u)/u expanded; removable singularity at y=0.
        const double s = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 *
                         (1.0 - u2 / 72.0)));
        return a * s * kInvSqrt2Pi;
    }
    return std::sin(u) / y * kInvSqrt2Pi;
}

double ModalBasis::eigenfunction_deriv(int j, double y) {
    const double a = j * kPi;
    const double u = a * y;
    if (u < 0.35) {
        const double u2 = u * u;
        // d/dy [sin(ay)/y] = a^3 y (-1/3 + u^2/30 - u^4/840 + u^6/45360)
        const double s = -1.0 / 3.0 + u2 * (1.0 / 30.0 + u2 * (-1.0 / 840.0 +
                         u2 / 45360.0));
        return a * a * a * y * s * kInvSqrt2Pi;
    }
    return (u * std::cos(u) - std::sin(u)) / (y * y) * kInvSqrt2Pi;
}

ModalBasis::ModalBasis(const EquilibriumState& eq, int N, int Q)
    : eq_(eq), N_(N) {
    if (N < 1) throw ValidationError("basis size must be at least 1");
    if (Q < 0) Q = 4 * N;
    quad_ = gauss_quadrature(Q);

    lambda_.resize(N);
    c_.resize(N);
    omega_.resize(N);
    m_.resize(N);
    const double gamma = eq.params.gamma;
    const double c_scale = std::pow(2.0, 1.5) * (gamma - 1.0) /
                           (std::sqrt(kPi) * gamma);
    const double omega_scale =
        eq.R_star * eq.kappa_bar / eq.rho_star * std::sqrt(kPi / 2.0);
    const double m_scale = std::pow(2.0, 1.5) / std::sqrt(kPi);
    for (int j = 1; j <= N; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^j
        lambda_[j - 1] = (j * kPi) * (j * kPi);
        c_[j - 1] = -sign * c_scale / j;       // (-1)^(j-1) = -(-1)^j
        omega_[j - 1] = -omega_scale * sign * j;
        m_[j - 1] = -sign * m_scale / j;
    }

    Xi_.resize(Q, N);
    dXi_.resize(Q, N);
    for (int q = 0; q < Q; ++q) {
        const double y = quad_.nodes[q];
        for (int j = 1; j <= N; ++j) {
            Xi_(q, j - 1) = eigenfunction(j, y);
            dXi_(q, j - 1) = eigenfunction_deriv(j, y);
        }
    }
}

Eigen::VectorXd ModalBasis::project(
    const std::function<double(double)>& f) const {
    Eigen::VectorXd samples(quad_.order);
    for (int q = 0; q < quad_.order; ++q) samples[q] = f(quad_.nodes[q]);
    return project_sampled(samples);
}

Eigen::VectorXd ModalBasis::project_sampled(
    const Eigen::VectorXd& f_at_nodes) const {
    if (quad_.order < 2 * N_)
        throw ValidationError(
            "quadrature order below 2N would alias the projection");
    Eigen::VectorXd weighted(quad_.order);
    for (int q = 0; q < quad_.order; ++q) {
        const double y = quad_.nodes[q];
        weighted[q] = 4.0 * kPi * quad_.weights[q] * y * y * f_at_nodes[q];
    }
    return Xi_.transpose() * weighted;
}

double ModalBasis::reconstruct(const Eigen::VectorXd& theta, double y) const {
    double acc = 0.0;
    for (int j = 1; j <= theta.size(); ++j)
        acc += theta[j - 1] * eigenfunction(j, y);
    return acc;
}

double ModalBasis::boundary_flux(const Eigen::VectorXd& theta,
                                 bool damped) const {
    const double scale = std::sqrt(kPi / 2.0);
    const int n = static_cast<int>(theta.size());
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        const double w = damped ? 1.0 - double(j) / double(n + 1) : 1.0;
        acc += w * theta[j - 1] * scale * sign * j;
    }
    return acc;
}

Eigen::MatrixXd ModalBasis::gram_serial() const {
    Eigen::MatrixXd G(N_, N_);
    for (int i = 0; i < N_; ++i)
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int q = 0; q < quad_.order; ++q) {
                const double y = quad_.nodes[q];
                acc += quad_.weights[q] * y * y * Xi_(q, i) * Xi_(q, j);
            }
            G(i, j) = G(j, i) = 4.0 * kPi * acc;
        }
    return G;
}

Eigen::MatrixXd ModalBasis::gram() const {
    Eigen::MatrixXd G(N_, N_);
    parallel_for(N_, [&](std::ptrdiff_t i) {
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int q = 0; q < quad_.order; ++q) {
                const double y = quad_.nodes[q];
                acc += quad_.weights[q] * y * y * Xi_(q, i) * Xi_(q, j);
            }
            G(i, j) = G(j, i) = 4.0 * kPi * acc;
        }
    });
    return G;
}

double ModalBasis::sum_c_squared_limit() const {
    const double gamma = eq_.params.gamma;
    return 4.0 * (gamma - 1.0) * (gamma - 1.0) * kPi / (3.0 * gamma * gamma);
}

double ModalBasis::sum_c_squared_tail() const {
    const double gamma = eq_.params.gamma;
    return 8.0 * (gamma - 1.0) * (gamma - 1.0) / (kPi * gamma * gamma) *
           inv_square_tail(N_);
}

}  // namespace bubblelab
