#include "crane/model.hpp"

namespace crane {

using num::Matrix;
using num::Vec;

void CraneParams::validate() const {
    const bool positive = trolley_mass > 0.0 && load_mass > 0.0 && rod_length > 0.0 && gravity > 0.0;
    const bool fin = std::isfinite(trolley_mass) && std::isfinite(load_mass) &&
                     std::isfinite(rod_length) && std::isfinite(gravity);
    if (!positive || !fin)
        throw DomainError("CraneParams: masses, rod length and gravity must be positive and finite");
}

void ExtendedCraneParams::validate() const {
    base.validate();
    const bool ok = trolley_viscous >= 0.0 && rod_viscous >= 0.0 && coulomb_force >= 0.0 &&
                    coulomb_smoothing > 0.0 && std::isfinite(trolley_viscous) &&
                    std::isfinite(rod_viscous) && std::isfinite(coulomb_force) &&
                    std::isfinite(coulomb_smoothing);
    if (!ok)
        throw DomainError(
            "ExtendedCraneParams: friction constants must be nonnegative and the Coulomb "
            "smoothing scale positive");
}

ExtendedCraneParams without_friction(const CraneParams& p) {
    ExtendedCraneParams e;
    e.base = p;
    return e;
}

void extended_jacobians(const ExtendedCraneParams& p, const Vec& x, Matrix& jf, Matrix& jg) {
    const double m = p.base.trolley_mass;
    const double M = p.base.load_mass;
    const double l = p.base.rod_length;
    const double g = p.base.gravity;
    const double c1 = p.trolley_viscous;
    const double c2 = p.rod_viscous;
    const double fs = p.coulomb_force;
    const double eps = p.coulomb_smoothing;

    const double s = std::sin(x[1]);
    const double c = std::cos(x[1]);
    const double v = x[2];
    const double w = x[3];
    const double denom = (m + M) - M * c * c;
    const double ddenom = 2.0 * M * s * c;

    const double sigma = std::tanh(v / eps);
    const double dsigma = (1.0 - sigma * sigma) / eps;

    const double n3 = M * l * w * w * s + M * g * s * c + (c2 / l) * w * c - c1 * v - fs * sigma;
    const double f3 = n3 / denom;
    const double f3_th =
        (M * l * w * w * c + M * g * (c * c - s * s) - (c2 / l) * w * s) / denom -
        n3 * ddenom / (denom * denom);
    const double f3_v = (-c1 - fs * dsigma) / denom;
    const double f3_w = (2.0 * M * l * w * s + (c2 / l) * c) / denom;

    jf = Matrix(4, 4);
    jf(0, 2) = 1.0;
    jf(1, 3) = 1.0;
    jf(2, 1) = f3_th;
    jf(2, 2) = f3_v;
    jf(2, 3) = f3_w;
    jf(3, 1) = -(f3_th * c - f3 * s + g * c) / l;
    jf(3, 2) = -(f3_v * c) / l;
    jf(3, 3) = -(f3_w * c + c2 / (M * l)) / l;

    jg = Matrix(4, 4);
    jg(2, 1) = -ddenom / (denom * denom);
    jg(3, 1) = s * (denom + 2.0 * M * c * c) / (l * denom * denom);
}

namespace {

void check_inputs(const CraneState& state, double force) {
    if (!state.finite() || !std::isfinite(force))
        throw DomainError("crane dynamics: non-finite state or force");
}

} // namespace

Accelerations accelerations(const CraneState& state, double force, const CraneParams& p) {
    p.validate();
    check_inputs(state, force);
    const ExtendedCraneParams e = without_friction(p);
    const double xv[4] = {state.x, state.theta, state.x_dot, state.theta_dot};
    const auto fields = extended_fields<double>(e, xv);
    return {fields.f[2] + fields.g[2] * force, fields.f[3] + fields.g[3] * force};
}

Vec derivative(const CraneState& state, double force, const CraneParams& p) {
    return extended_derivative(state, force, without_friction(p));
}

Vec extended_derivative(const CraneState& state, double force, const ExtendedCraneParams& p) {
    p.validate();
    check_inputs(state, force);
    const double xv[4] = {state.x, state.theta, state.x_dot, state.theta_dot};
    const auto fields = extended_fields<double>(p, xv);
    return {fields.f[0] + fields.g[0] * force, fields.f[1] + fields.g[1] * force,
            fields.f[2] + fields.g[2] * force, fields.f[3] + fields.g[3] * force};
}

double total_energy(const CraneState& state, const CraneParams& p) {
    p.validate();
    if (!state.finite()) throw DomainError("total_energy: non-finite state");
    const double m = p.trolley_mass;
    const double M = p.load_mass;
    const double l = p.rod_length;
    const double v = state.x_dot;
    const double w = state.theta_dot;
    const double kinetic =
        0.5 * m * v * v +
        0.5 * M * (v * v + w * w * l * l + 2.0 * v * w * l * std::cos(state.theta));
    const double potential = M * p.gravity * l * (1.0 - std::cos(state.theta));
    return kinetic + potential;
}

LinearModel linearize(const CraneParams& p, bool full_state_output) {
    p.validate();
    const double m = p.trolley_mass;
    const double M = p.load_mass;
    const double l = p.rod_length;
    const double g = p.gravity;

    LinearModel lm;
    lm.a = Matrix(4, 4);
    lm.a(0, 2) = 1.0;
    lm.a(1, 3) = 1.0;
    lm.a(2, 1) = M * g / m;
    lm.a(3, 1) = -(M + m) * g / (m * l);
    lm.b = {0.0, 0.0, 1.0 / m, -1.0 / (m * l)};
    if (full_state_output) {
        lm.c = Matrix::identity(4);
        lm.d = Vec(4, 0.0);
    } else {
        lm.c = Matrix(1, 4);
        lm.c(0, 0) = 1.0;
        lm.d = Vec(1, 0.0);
    }
    return lm;
}

CraneTransferFunctions transfer_functions(const CraneParams& p) {
    p.validate();
    const double m = p.trolley_mass;
    const double M = p.load_mass;
    const double l = p.rod_length;
    const double g = p.gravity;

    // eliminate theta from the linearized pair:
    //   X/F     = (l s^2 + g) / (m l s^4 + (M+m) g s^2)
    //   theta/F = -s^2        / (m l s^4 + (M+m) g s^2)
    const double ml = m * l;
    CraneTransferFunctions tf;
    tf.position.numerator.coeffs = {1.0 / m, 0.0, g / ml};
    tf.position.denominator.coeffs = {1.0, 0.0, (M + m) * g / ml, 0.0, 0.0};
    tf.angle.numerator.coeffs = {-1.0 / ml, 0.0, 0.0};
    tf.angle.denominator.coeffs = tf.position.denominator.coeffs;
    return tf;
}

} // namespace crane
