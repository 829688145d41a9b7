#pragma once
//
// Material and thermodynamic constants of the gas-liquid model, plus the
// mass/volume problem data. All quantities are SI-consistent; validation is
// sign/relational only.
//
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bubblelab {

// Config or input data violates a precondition. CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver failed (no bracket, singular system, ...). CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PhysicalParams {
    double sigma = 1.0;      // surface tension, gas-liquid interface (>0)
    double sigma_bar = 1.0;  // surface tension, external free surface (>=0)
    double mu_l = 1.0;       // liquid dynamic viscosity (>0)
    double rho_l = 1.0;      // liquid density (>0)
    double kappa = 1.0;      // gas thermal conductivity (>0)
    double c_g = 3.0;        // gas specific heat (>0)
    double R_spec = 2.0;     // gas constant / molar mass (>0)
    double T_inf = 1.0;      // external temperature (>0)
    double gamma = 5.0 / 3.0;  // adiabatic constant, == 1 + R_spec/c_g

    double beta() const { return sigma_bar / sigma; }
};

// Returns p unchanged if all invariants hold, otherwise throws
// ValidationError naming the first violated field.
PhysicalParams validate_params(const PhysicalParams& p);

// Fills gamma from 1 + R_spec/c_g (used when the config omits it).
PhysicalParams with_derived_gamma(PhysicalParams p);

struct MassVolumePair {
    double M = 1.0;     // total gas mass (>0)
    double V = 1.0;     // liquid volume (>0, +inf sentinel for limit checks)
    double V_bar = 0.0; // modified volume 3V/(4*pi)

    static MassVolumePair from_mass_volume(double M, double V);
    bool infinite_volume() const { return std::isinf(V); }
};

}  // namespace bubblelab
