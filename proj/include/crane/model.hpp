#pragma once

#include <cmath>

#include "crane/numerics.hpp"

// The plant: a trolley of mass m on a rail, carrying a point load of mass
// M on a rigid massless rod of length l. One horizontal force F acts on
// the trolley. State ordering is [x, theta, x_dot, theta_dot], with theta
// measured from the downward vertical; under this convention a positive
// force from rest gives theta_ddot < 0 (the load trails the trolley).

namespace crane {

struct CraneParams {
    double trolley_mass{0.0};  // m (kg)
    double load_mass{0.0};     // M (kg)
    double rod_length{0.0};    // l (m)
    double gravity{9.8};       // g (m/s^2)

    // Throws DomainError unless all four fields are strictly positive.
    // The effective-mass denominator D(theta) = m + M sin^2(theta) is then
    // >= m > 0 for every angle, so the dynamics have no singularity.
    void validate() const;
};

struct ExtendedCraneParams {
    CraneParams base;
    double trolley_viscous{0.0};     // c1 (N s/m)
    double rod_viscous{0.0};         // c2 (N m s)
    double coulomb_force{0.0};       // f_s (N)
    double coulomb_smoothing{1e-3};  // velocity scale of the smoothed sign (m/s)

    void validate() const;
    bool frictionless() const {
        return trolley_viscous == 0.0 && rod_viscous == 0.0 && coulomb_force == 0.0;
    }
};

// Lifts basic parameters into the friction-extended model with all
// dissipation terms zero; the dynamics then coincide bit for bit.
ExtendedCraneParams without_friction(const CraneParams& p);

struct CraneState {
    double x{0.0};
    double theta{0.0};      // not wrapped; keeps energy accounting continuous
    double x_dot{0.0};
    double theta_dot{0.0};

    num::Vec to_vec() const { return {x, theta, x_dot, theta_dot}; }
    static CraneState from_vec(const num::Vec& v) { return {v[0], v[1], v[2], v[3]}; }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(theta) && std::isfinite(x_dot) &&
               std::isfinite(theta_dot);
    }
};

struct Accelerations {
    double x_ddot{0.0};
    double theta_ddot{0.0};
};

// Templated right-hand side in control-affine form: xdot = f(x) + g(x) u.
// T is double in the simulation paths and a truncated Taylor jet in the
// feedback-linearization machinery; both share this single definition.
template <class T>
struct AffineFields {
    T f[4];
    T g[4];
};

template <class T>
AffineFields<T> extended_fields(const ExtendedCraneParams& p, const T x[4]) {
    using std::cos;
    using std::sin;
    using std::tanh;
    const double m = p.base.trolley_mass;
    const double M = p.base.load_mass;
    const double l = p.base.rod_length;
    const double g = p.base.gravity;

    const T s = sin(x[1]);
    const T c = cos(x[1]);
    const T denom = (m + M) - M * c * c;
    const T sigma = tanh(x[2] * (1.0 / p.coulomb_smoothing));

    // trolley: D*xdd = F - c1*v - fs*sigma(v) + M l w^2 s + M g s c + (c2/l) w c
    const T f3 = (M * l * (x[3] * x[3]) * s + M * g * s * c + (p.rod_viscous / l) * x[3] * c -
                  p.trolley_viscous * x[2] - p.coulomb_force * sigma) /
                 denom;
    const T g3 = 1.0 / denom;
    // rod: l*tdd = -(xdd c + g s + c2 w / (M l))
    const T f4 = (f3 * c + g * s + (p.rod_viscous / (M * l)) * x[3]) * (-1.0 / l);
    const T g4 = c * (-1.0 / l) * g3;

    AffineFields<T> out;
    out.f[0] = x[2];
    out.f[1] = x[3];
    out.f[2] = f3;
    out.f[3] = f4;
    out.g[0] = T(0.0);
    out.g[1] = T(0.0);
    out.g[2] = g3;
    out.g[3] = g4;
    return out;
}

// Closed-form Jacobians of f and g (rows d(component)/d(state)). Validated
// against finite differences in the test suite.
void extended_jacobians(const ExtendedCraneParams& p, const num::Vec& x, num::Matrix& jf,
                        num::Matrix& jg);

// Accelerations (x_ddot, theta_ddot) of the frictionless model. Both
// values substituted back into the two Lagrange equations give residuals
// below 1e-9. Throws DomainError on non-finite input.
Accelerations accelerations(const CraneState& state, double force, const CraneParams& p);

// State derivative [x_dot, theta_dot, x_ddot, theta_ddot].
num::Vec derivative(const CraneState& state, double force, const CraneParams& p);

// Friction-extended state derivative; equals `derivative` exactly when all
// dissipation constants are zero (same code path).
num::Vec extended_derivative(const CraneState& state, double force, const ExtendedCraneParams& p);

// Kinetic plus potential energy; zero at rest, nonnegative everywhere.
double total_energy(const CraneState& state, const CraneParams& p);

struct LinearModel {
    num::Matrix a;  // 4x4
    num::Vec b;     // 4
    num::Matrix c;  // p x 4
    num::Vec d;     // p (identically zero)
};

// Small-angle linearization about the hanging equilibrium. The output
// matrix selects trolley position; pass full_state_output to expose all
// four states instead.
LinearModel linearize(const CraneParams& p, bool full_state_output = false);

struct TransferFunction {
    num::Polynomial numerator;
    num::Polynomial denominator;  // monic after normalization
};

// Force-to-position and force-to-angle transfer functions of the
// linearized model, denominator normalized monic. Both share the
// characteristic polynomial of the A matrix.
struct CraneTransferFunctions {
    TransferFunction position;  // X(s)/F(s)
    TransferFunction angle;     // theta(s)/F(s)
};

CraneTransferFunctions transfer_functions(const CraneParams& p);

} // namespace crane
