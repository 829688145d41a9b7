#include "bubblelab/params.hpp"

#include <numbers>

namespace bubblelab {

namespace {
void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}
}  // namespace

PhysicalParams validate_params(const PhysicalParams& p) {
    require(p.sigma > 0.0, "sigma must be positive");
    require(p.sigma_bar >= 0.0, "sigma_bar must be nonnegative");
    require(p.mu_l > 0.0, "mu_l must be positive");
    require(p.rho_l > 0.0, "rho_l must be positive");
    require(p.kappa > 0.0, "kappa must be positive");
    require(p.c_g > 0.0, "c_g must be positive");
    require(p.R_spec > 0.0, "R_spec must be positive");
    require(p.T_inf > 0.0, "T_inf must be positive");
    const double gamma_rel = 1.0 + p.R_spec / p.c_g;
    require(std::abs(p.gamma - gamma_rel) <=
                8.0 * std::numeric_limits<double>::epsilon() * gamma_rel,
            "gamma must equal 1 + R_spec/c_g");
    return p;
}

PhysicalParams with_derived_gamma(PhysicalParams p) {
    p.gamma = 1.0 + p.R_spec / p.c_g;
    return p;
}

MassVolumePair MassVolumePair::from_mass_volume(double M, double V) {
    if (!(M > 0.0)) throw ValidationError("M must be positive");
    if (!(V > 0.0)) throw ValidationError("V must be positive");
    MassVolumePair mv;
    mv.M = M;
    mv.V = V;
    mv.V_bar = std::isinf(V) ? V : 3.0 * V / (4.0 * std::numbers::pi);
    return mv;
}

}  // namespace bubblelab
