#include "bubblelab/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace bubblelab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double error_norm(const VectorXd& diff, const VectorXd& za, const VectorXd& zb,
                  double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(za[i]), std::abs(zb[i]));
        const double r = diff[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / double(diff.size()));
}

class TrBdf2 {
  public:
    TrBdf2(const RhsFn& f, const OdeOptions& opts, Eigen::Index dim)
        : f_(f), opts_(opts), dim_(dim), jac_(dim, dim) {}

    long rhs_evals = 0, jacobians = 0;

    VectorXd rhs(const VectorXd& z) {
        ++rhs_evals;
        return f_(z);
    }

    void refresh_jacobian(const VectorXd& z, const VectorXd& fz) {
        VectorXd zp = z;
        for (Eigen::Index i = 0; i < dim_; ++i) {
            const double eps = 1e-7 * std::abs(z[i]) + 1e-9;
            zp[i] = z[i] + eps;
            jac_.col(i) = (rhs(zp) - fz) / eps;
            zp[i] = z[i];
        }
        ++jacobians;
        have_jac_ = true;
        lu_c_[0] = lu_c_[1] = -1.0;
        steps_since_jac_ = 0;
    }

    // Solve x - c*f(x) = b by modified Newton. Both TR-BDF2 stages use the
    // same c = d*h, and step doubling alternates between c(h) and c(h/2),
    // so factorizations of (I - c*J) are kept in a two-slot cache.
    bool solve_stage(double c, const VectorXd& b, VectorXd& x) {
        int slot = -1;
        for (int s = 0; s < 2; ++s)
            if (lu_c_[s] == c) slot = s;
        if (slot < 0) {
            slot = next_slot_;
            next_slot_ = 1 - next_slot_;
            lu_[slot].compute(MatrixXd::Identity(dim_, dim_) - c * jac_);
            lu_c_[slot] = c;
        }
        for (int it = 0; it < 12; ++it) {
            const VectorXd g = x - c * rhs(x) - b;
            const VectorXd dx = lu_[slot].solve(-g);
            x += dx;
            if (error_norm(dx, x, x, opts_.rtol, opts_.atol) < 3e-2) return true;
        }
        return false;
    }

    // One TR-BDF2 step of size h. Returns false if Newton failed even after
    // a Jacobian refresh.
    bool step(const VectorXd& z, double h, VectorXd& out) {
        static const double g2 = 2.0 - std::sqrt(2.0);
        const double d = 0.5 * g2;  // shared diagonal coefficient
        const VectorXd f0 = rhs(z);
        if (!have_jac_ || steps_since_jac_ > 25) refresh_jacobian(z, f0);

        for (int attempt = 0; attempt < 2; ++attempt) {
            VectorXd zg = z + g2 * h * f0;  // predictor
            if (solve_stage(d * h, z + d * h * f0, zg)) {
                const double a1 = 1.0 / (g2 * (2.0 - g2));
                const double a2 = (1.0 - g2) * (1.0 - g2) * a1;
                VectorXd b = a1 * zg - a2 * z;
                VectorXd znew = zg + d * h * (rhs(zg) - f0);  // predictor
                if (solve_stage(d * h, b, znew)) {
                    out = znew;
                    ++steps_since_jac_;
                    return true;
                }
            }
            refresh_jacobian(z, f0);
        }
        return false;
    }

  private:
    const RhsFn& f_;
    OdeOptions opts_;
    Eigen::Index dim_;
    MatrixXd jac_;
    Eigen::PartialPivLU<MatrixXd> lu_[2];
    double lu_c_[2] = {-1.0, -1.0};
    int next_slot_ = 0;
    bool have_jac_ = false;
    int steps_since_jac_ = 0;
};

}  // namespace

OdeOutcome integrate_trbdf2(const RhsFn& f, const Eigen::VectorXd& z0,
                            double t_end, double sample_dt,
                            const OdeOptions& opts, const SampleFn& on_sample) {
    OdeOutcome res;
    res.status = "done";
    VectorXd z = z0;
    double t = 0.0;
    TrBdf2 stepper(f, opts, z.size());

    if (!on_sample(0.0, z)) {
        res.status = "stopped";
        res.z_final = z;
        return res;
    }
    if (t_end <= 0.0) {
        res.z_final = z;
        return res;
    }

    double h = opts.h_init > 0.0 ? opts.h_init : sample_dt / 8.0;
    if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
    const double h_floor = 1e-14 * t_end;
    double next_sample = std::min(sample_dt, t_end);

    while (t < t_end) {
        h = std::min(h, next_sample - t);
        VectorXd z_big, z_mid, z_fine;
        bool ok = stepper.step(z, h, z_big) &&
                  stepper.step(z, 0.5 * h, z_mid) &&
                  stepper.step(z_mid, 0.5 * h, z_fine);
        double err = 2.0;
        if (ok)
            err = error_norm((z_big - z_fine) / 3.0, z, z_fine, opts.rtol,
                             opts.atol);
        if (ok && err <= 1.0) {
            t += h;
            z = z_fine;
            ++res.steps;
            const double grow = 0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0);
            h *= std::clamp(grow, 0.2, 5.0);
            if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
            if (t >= next_sample - 1e-12 * t_end) {
                if (!on_sample(t, z)) {
                    res.status = "stopped";
                    break;
                }
                next_sample = std::min(next_sample + sample_dt, t_end);
                if (next_sample <= t) next_sample = t_end;
            }
        } else {
            ++res.rejected;
            h *= ok ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.1, 0.5)
                    : 0.25;
        }
        if (h < h_floor) {
            res.status = "step size underflow";
            break;
        }
        if (res.steps + res.rejected > opts.max_steps) {
            res.status = "max step count exceeded";
            break;
        }
    }
    res.z_final = z;
    res.t_final = t;
    res.rhs_evals = stepper.rhs_evals;
    res.jacobians = stepper.jacobians;
    return res;
}

OdeOutcome integrate_rk45(const RhsFn& f, const Eigen::VectorXd& z0,
                          double t_end, double sample_dt,
                          const OdeOptions& opts, const SampleFn& on_sample) {
    // Dormand-Prince 5(4) with FSAL.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2;
    (void)c3;
    (void)c4;
    (void)c5;

    OdeOutcome res;
    res.status = "done";
    VectorXd z = z0;
    double t = 0.0;
    if (!on_sample(0.0, z)) {
        res.status = "stopped";
        res.z_final = z;
        return res;
    }
    if (t_end <= 0.0) {
        res.z_final = z;
        return res;
    }
    double h = opts.h_init > 0.0 ? opts.h_init : sample_dt / 16.0;
    if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
    const double h_floor = 1e-14 * t_end;
    double next_sample = std::min(sample_dt, t_end);
    VectorXd k1 = f(z);
    res.rhs_evals = 1;

    while (t < t_end) {
        h = std::min(h, next_sample - t);
        const VectorXd k2 = f(z + h * (a21 * k1));
        const VectorXd k3 = f(z + h * (a31 * k1 + a32 * k2));
        const VectorXd k4 = f(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const VectorXd k5 =
            f(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const VectorXd k6 = f(z + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                       a64 * k4 + a65 * k5));
        const VectorXd znew =
            z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const VectorXd k7 = f(znew);
        res.rhs_evals += 6;
        const VectorXd errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                   e6 * k6 + e7 * k7);
        const double err = error_norm(errv, z, znew, opts.rtol, opts.atol);
        if (err <= 1.0) {
            t += h;
            z = znew;
            k1 = k7;
            ++res.steps;
            h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2,
                            5.0);
            if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
            if (t >= next_sample - 1e-12 * t_end) {
                if (!on_sample(t, z)) {
                    res.status = "stopped";
                    break;
                }
                next_sample = std::min(next_sample + sample_dt, t_end);
                if (next_sample <= t) next_sample = t_end;
            }
        } else {
            ++res.rejected;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
        }
        if (h < h_floor) {
            res.status = "step size underflow";
            break;
        }
        if (res.steps + res.rejected > opts.max_steps) {
            res.status = "max step count exceeded";
            break;
        }
    }
    res.z_final = z;
    res.t_final = t;
    return res;
}

}  // namespace bubblelab
