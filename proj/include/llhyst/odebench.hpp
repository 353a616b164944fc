// Damped second-order exemplar systems
//
//   y'' + c y' + k y        = u(t)   (linear spring)
//   y'' + c y' + k (y - y^3) = u(t)  (cubic spring)
//
// with k = 0 giving the integrator chain. Includes closed-form solutions for
// harmonic forcing u = sin(omega t), equilibrium enumeration and eigenvalues
// of the linearization.
#pragma once

#include "llhyst/core.hpp"

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace llhyst::ode {

struct SecondOrderParams {
    double c = 15.0;
    double k = 1.0;
    bool cubic = false;
};

/// First-order state (y, y').
struct SecondOrderState {
    double y = 0.0;
    double ydot = 0.0;

    friend bool operator==(const SecondOrderState&, const SecondOrderState&) = default;
};

/// (y', y'') at the given state and input value.
SecondOrderState rhs(const SecondOrderParams& p, const SecondOrderState& s, double u);

/// Fixed-step RK4 from t = 0. Samples y every `stride` steps (and at the
/// final step); the input column records u(t) or 0 when unforced.
///
/// Throws PreconditionError if dt <= 0 or, for harmonic input, dt exceeds a
/// 200th of the forcing period. Throws SimulationError when the state stops
/// being finite.
Trajectory integrate(const SecondOrderParams& p, const std::optional<HarmonicInput>& input,
                     SecondOrderState s0, double t_end, double dt, std::size_t stride = 1);

/// Same, driven by an explicit step plan.
Trajectory integrate(const SecondOrderParams& p, const std::optional<HarmonicInput>& input,
                     SecondOrderState s0, const StepPlan& plan);

/// Exact y(t) of the linear spring with u = sin(omega t), y(0) = y0,
/// y'(0) = y1. Modal form: particular solution A sin + B cos plus the two
/// exponential modes fitted to the initial data. Rejects c^2 == 4k.
double closed_form_linear(double c, double k, double omega, double y0, double y1, double t);

/// Exact y(t) for k = 0 (integrator chain) with u = sin(omega t).
double closed_form_k0(double c, double omega, double y0, double y1, double t);

enum class EquilibriumKind { Single, Finite, Continuum };

std::string to_string(EquilibriumKind kind);

struct Equilibria {
    EquilibriumKind kind = EquilibriumKind::Single;
    /// Isolated points; for a continuum, the representative (0, 0) only.
    std::vector<SecondOrderState> points;
};

Equilibria equilibria(const SecondOrderParams& p);

/// Roots of lambda^2 + c lambda + k_eff = 0 where k_eff = k, or k(1 - 3y^2)
/// for the cubic spring. Throws PreconditionError if `at` is not an
/// equilibrium.
std::array<std::complex<double>, 2> linearized_eigenvalues(const SecondOrderParams& p,
                                                           const SecondOrderState& at);

/// Effective stiffness of the linearization at position y.
double effective_stiffness(const SecondOrderParams& p, double y);

}  // namespace llhyst::ode
