#include "llhyst/odebench.hpp"

#include "llhyst/rk4.hpp"

#include <algorithm>
#include <cmath>

namespace llhyst::ode {

SecondOrderState rhs(const SecondOrderParams& p, const SecondOrderState& s, double u) {
    double restoring = p.cubic ? p.k * (s.y - s.y * s.y * s.y) : p.k * s.y;
    return {s.ydot, -p.c * s.ydot - restoring + u};
}

Trajectory integrate(const SecondOrderParams& p, const std::optional<HarmonicInput>& input,
                     SecondOrderState s0, double t_end, double dt, std::size_t stride) {
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(t_end > 0.0)) throw PreconditionError("t_end must be positive");
    double period = input ? input->period() : 0.0;
    StepPlan plan = plan_fixed(dt, t_end, period, 0);
    plan.stride = std::max<std::size_t>(stride, 1);
    return integrate(p, input, s0, plan);
}

Trajectory integrate(const SecondOrderParams& p, const std::optional<HarmonicInput>& input,
                     SecondOrderState s0, const StepPlan& plan) {
    if (!(plan.dt > 0.0) || plan.steps == 0) throw PreconditionError("empty step plan");
    if (input) {
        input->validate();
        if (plan.dt > input->period() / 200.0) {
            throw PreconditionError("dt exceeds 1/200 of the forcing period");
        }
    }
    auto forcing = [&](double t) { return input ? (*input)(t) : 0.0; };

    const std::size_t stride = std::max<std::size_t>(plan.stride, 1);
    const std::size_t samples = plan.steps / stride + 2;
    std::vector<double> times, ys, us;
    times.reserve(samples);
    ys.reserve(samples);
    us.reserve(samples);

    std::array<double, 2> x{s0.y, s0.ydot};
    times.push_back(0.0);
    ys.push_back(x[0]);
    us.push_back(forcing(0.0));

    Rk4<double> rk(2);
    auto f = [&](double t, std::span<const double> s, std::span<double> d) {
        auto r = rhs(p, {s[0], s[1]}, forcing(t));
        d[0] = r.y;
        d[1] = r.ydot;
    };
    for (std::size_t n = 1; n <= plan.steps; ++n) {
        double t0 = static_cast<double>(n - 1) * plan.dt;
        rk.step(std::span<double>(x), t0, plan.dt, f);
        double t = static_cast<double>(n) * plan.dt;
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            throw SimulationError("second-order state became non-finite", t);
        }
        if (n % stride == 0 || n == plan.steps) {
            times.push_back(t);
            ys.push_back(x[0]);
            us.push_back(forcing(t));
        }
    }
    return Trajectory(std::move(times), std::move(ys), std::move(us));
}

double closed_form_linear(double c, double k, double omega, double y0, double y1, double t) {
    if (!(omega > 0.0)) throw PreconditionError("omega must be positive");
    double disc = c * c - 4.0 * k;
    if (std::abs(disc) <= 1e-12 * std::max({c * c, std::abs(4.0 * k), 1.0})) {
        throw PreconditionError("repeated eigenvalue (c^2 == 4k) has no modal closed form");
    }
    using cd = std::complex<double>;
    cd root = std::sqrt(cd(disc, 0.0));
    cd l1 = 0.5 * (-c + root);
    cd l2 = 0.5 * (-c - root);

    // Particular solution A sin(wt) + B cos(wt).
    double kw = k - omega * omega;
    double d = kw * kw + c * c * omega * omega;
    double a = kw / d;
    double b = -c * omega / d;

    // Homogeneous part C1 e^{l1 t} + C2 e^{l2 t} absorbs the initial data.
    cd r0 = y0 - b;
    cd r1 = y1 - a * omega;
    cd c1 = (r1 - l2 * r0) / (l1 - l2);
    cd c2 = (l1 * r0 - r1) / (l1 - l2);
    cd hom = c1 * std::exp(l1 * t) + c2 * std::exp(l2 * t);
    return hom.real() + a * std::sin(omega * t) + b * std::cos(omega * t);
}

double closed_form_k0(double c, double omega, double y0, double y1, double t) {
    if (!(c > 0.0) || !(omega > 0.0)) throw PreconditionError("c and omega must be positive");
    double w2 = omega * omega;
    double c2 = c * c;
    double decay = std::exp(-c * t);
    return y0 + (y1 / c) * (1.0 - decay) - std::sin(omega * t) / (w2 + c2) +
           (w2 + c2 - c2 * std::cos(omega * t) - w2 * decay) / (omega * c * (w2 + c2));
}

std::string to_string(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::Single: return "one";
        case EquilibriumKind::Finite: return "finite-many";
        case EquilibriumKind::Continuum: return "continuum";
    }
    return "unknown";
}

Equilibria equilibria(const SecondOrderParams& p) {
    if (p.k == 0.0) return {EquilibriumKind::Continuum, {{0.0, 0.0}}};
    if (!p.cubic) return {EquilibriumKind::Single, {{0.0, 0.0}}};
    return {EquilibriumKind::Finite, {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}};
}

double effective_stiffness(const SecondOrderParams& p, double y) {
    return p.cubic ? p.k * (1.0 - 3.0 * y * y) : p.k;
}

std::array<std::complex<double>, 2> linearized_eigenvalues(const SecondOrderParams& p,
                                                           const SecondOrderState& at) {
    auto r = rhs(p, at, 0.0);
    double scale = 1.0 + std::abs(p.k) + std::abs(p.c);
    if (std::abs(r.y) > 1e-12 * scale || std::abs(r.ydot) > 1e-12 * scale) {
        throw PreconditionError("linearization point is not an equilibrium");
    }
    double keff = effective_stiffness(p, at.y);
    using cd = std::complex<double>;
    cd root = std::sqrt(cd(p.c * p.c - 4.0 * keff, 0.0));
    return {0.5 * (-p.c + root), 0.5 * (-p.c - root)};
}

}  // namespace llhyst::ode
