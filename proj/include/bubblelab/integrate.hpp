#pragma once
//
// Adaptive time steppers shared by the Galerkin and finite-difference
// solvers:
//
//  * trbdf2 — one-step L-stable TR-BDF2 (trapezoid + BDF2 with
//    gamma = 2-sqrt(2); both stages share the iteration matrix I - d*h*J).
//    Error control by step doubling, modified Newton with a cached
//    finite-difference Jacobian.
//  * rk45   — Dormand-Prince 5(4), for nonstiff use and cross-checks;
//    callers supply a hard step cap when the problem is stiff.
//
#include <Eigen/Dense>
#include <functional>
#include <string>

#include "bubblelab/params.hpp"

namespace bubblelab {

using RhsFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-13;
    double h_init = 0.0;   // 0: pick from the first sample interval
    double h_max = 0.0;    // 0: no cap
    long max_steps = 5'000'000;
};

// Called at every output time; return false to stop the integration early
// (the driver records status "stopped").
using SampleFn = std::function<bool(double t, const Eigen::VectorXd& z)>;

struct OdeOutcome {
    Eigen::VectorXd z_final;
    double t_final = 0.0;
    std::string status;  // "done", "stopped", or failure reason
    long steps = 0, rejected = 0, rhs_evals = 0, jacobians = 0;
};

// Integrates dz/dt = f(z) from t=0 to t_end, sampling at multiples of
// sample_dt (t=0 and t=t_end included). Throws NumericalError only on
// unrecoverable misuse; solver breakdowns are reported via status.
OdeOutcome integrate_trbdf2(const RhsFn& f, const Eigen::VectorXd& z0,
                            double t_end, double sample_dt,
                            const OdeOptions& opts, const SampleFn& on_sample);

OdeOutcome integrate_rk45(const RhsFn& f, const Eigen::VectorXd& z0,
                          double t_end, double sample_dt,
                          const OdeOptions& opts, const SampleFn& on_sample);

}  // namespace bubblelab
