#pragma once
//
// Radial Dirichlet eigenfunction basis on the unit ball,
//
//   Xi_j(y) = sin(j*pi*y) / (sqrt(2*pi)*y),   -Lap Xi_j = (j*pi)^2 Xi_j,
//   Xi_j(1) = 0,  int_{B1} Xi_j^2 dx = 1,
//
// together with the fixed coefficient sequences of the Galerkin system:
//   c_k     = (-1)^(k-1) 2^(3/2) (gamma-1) / (sqrt(pi) gamma k)
//   omega_j = -(R* kappa_bar / rho*) sqrt(pi/2) (-1)^j j
//   m_j     = int_{B1} Xi_j dx = 2^(3/2) (-1)^(j+1) / (sqrt(pi) j)
//
#include <Eigen/Dense>
#include <functional>

#include "bubblelab/equilibrium.hpp"
#include "bubblelab/quadrature.hpp"

namespace bubblelab {

class ModalBasis {
  public:
    // Q defaults to 4N; products of two eigenfunctions and smooth factors
    // need ~2N resolution, the extra factor is the safety margin.
    ModalBasis(const EquilibriumState& eq, int N, int Q = -1);

    int size() const { return N_; }
    const QuadratureRule& quadrature() const { return quad_; }

    double lambda(int j) const { return lambda_[j - 1]; }  // (j*pi)^2
    double c(int k) const { return c_[k - 1]; }
    double omega(int j) const { return omega_[j - 1]; }
    double mass_moment(int j) const { return m_[j - 1]; }  // int_{B1} Xi_j dx

    const Eigen::VectorXd& lambdas() const { return lambda_; }
    const Eigen::VectorXd& cs() const { return c_; }
    const Eigen::VectorXd& omegas() const { return omega_; }
    const Eigen::VectorXd& mass_moments() const { return m_; }

    // Tables of Xi_j and Xi_j' at the quadrature nodes, (Q x N).
    const Eigen::MatrixXd& table() const { return Xi_; }
    const Eigen::MatrixXd& table_deriv() const { return dXi_; }

    // Pointwise eigenfunction values; continuous through y=0.
    static double eigenfunction(int j, double y);
    static double eigenfunction_deriv(int j, double y);

    // theta_j = int_{B1} f Xi_j dx by quadrature. Refuses Q < 2N (aliasing).
    Eigen::VectorXd project(const std::function<double(double)>& f) const;
    Eigen::VectorXd project_sampled(const Eigen::VectorXd& f_at_nodes) const;

    // sum_j theta_j Xi_j(y)
    double reconstruct(const Eigen::VectorXd& theta, double y) const;

    // d_y rho1(1) = sum_j theta_j sqrt(pi/2) (-1)^j j. The damped option
    // applies Fejer weights (1 - j/(N+1)) for slowly decaying theta.
    double boundary_flux(const Eigen::VectorXd& theta,
                         bool damped = false) const;

    // Gram matrix G_ij = int Xi_i Xi_j dx by quadrature (identity check).
    Eigen::MatrixXd gram() const;
    Eigen::MatrixXd gram_serial() const;

    // sum_{k<=N} c_k^2; the analytic limit is 4*(gamma-1)^2*pi/(3*gamma^2),
    // the tail is (8*(gamma-1)^2/(pi*gamma^2)) * sum_{k>N} k^-2.
    double sum_c_squared() const { return c_.squaredNorm(); }
    double sum_c_squared_limit() const;
    double sum_c_squared_tail() const;

    const EquilibriumState& equilibrium() const { return eq_; }

  private:
    EquilibriumState eq_;
    int N_;
    QuadratureRule quad_;
    Eigen::VectorXd lambda_, c_, omega_, m_;
    Eigen::MatrixXd Xi_, dXi_;
};

// sum_{k>N} 1/k^2 via the trigamma recurrence + asymptotic series,
// accurate to machine precision for N >= 1.
double inv_square_tail(int N);

}  // namespace bubblelab
