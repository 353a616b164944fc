#include "llhyst/llpde.hpp"

#include "llhyst/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace llhyst::ll {

void LLParams::validate() const {
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw PreconditionError("nu must be >= 0 and finite");
}

ResolvedProbe resolve(const ProbeSpec& probe, const SpatialGrid& grid) {
    if (probe.channel < 1 || probe.channel > 3) {
        throw PreconditionError("probe channel must be 1, 2 or 3");
    }
    ResolvedProbe r;
    r.node = grid.nearest_node(probe.x);
    r.channel = probe.channel;
    r.x_requested = probe.x;
    r.x_node = grid.node(r.node);
    r.snap_distance = std::abs(r.x_node - probe.x);
    return r;
}

namespace kernel {

void laplacian(std::span<const Vec3> f, double inv_h2, std::span<Vec3> out) {
    const std::size_t n = f.size();
    out[0] = (2.0 * inv_h2) * (f[1] - f[0]);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        out[j] = inv_h2 * (f[j - 1] - 2.0 * f[j] + f[j + 1]);
    }
    out[n - 1] = (2.0 * inv_h2) * (f[n - 2] - f[n - 1]);
}

namespace {

inline Vec3 second_difference(std::span<const Vec3> f, std::size_t j, double inv_h2) {
    const std::size_t n = f.size();
    if (j == 0) return (2.0 * inv_h2) * (f[1] - f[0]);
    if (j == n - 1) return (2.0 * inv_h2) * (f[n - 2] - f[n - 1]);
    return inv_h2 * (f[j - 1] - 2.0 * f[j] + f[j + 1]);
}

inline Vec3 first_difference(std::span<const Vec3> f, std::size_t j, double h) {
    const std::size_t n = f.size();
    const double inv_2h = 0.5 / h;
    if (j == 0) return inv_2h * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
    if (j == n - 1) return inv_2h * (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]);
    return inv_2h * (f[j + 1] - f[j - 1]);
}

}  // namespace

void cross_form(std::span<const Vec3> m, double nu, double inv_h2, std::span<Vec3> out) {
    for (std::size_t j = 0; j < m.size(); ++j) {
        Vec3 lap = second_difference(m, j, inv_h2);
        Vec3 prec = cross(m[j], lap);
        out[j] = prec - nu * cross(m[j], prec);
    }
}

void semilinear_form(std::span<const Vec3> m, double nu, double h, std::span<Vec3> out) {
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t j = 0; j < m.size(); ++j) {
        Vec3 lap = second_difference(m, j, inv_h2);
        Vec3 grad = first_difference(m, j, h);
        out[j] = nu * lap + cross(m[j], lap) + (nu * dot(grad, grad)) * m[j];
    }
}

}  // namespace kernel

namespace {

void require_on_constraint(const MagnetizationField& f) {
    double dev = f.max_norm_deviation();
    if (dev > kLooseNormTolerance) {
        throw ConstraintViolation("field is off the unit sphere by " + std::to_string(dev));
    }
}

void add_uniform(std::vector<Vec3>& v, const Vec3& u) {
    for (auto& x : v) x += u;
}

}  // namespace

MagnetizationField laplacian_neumann(const MagnetizationField& f) {
    const auto& g = f.grid();
    std::vector<Vec3> out(g.nodes());
    kernel::laplacian(f.values(), 1.0 / (g.spacing() * g.spacing()), out);
    return MagnetizationField(g, std::move(out));
}

MagnetizationField gradient(const MagnetizationField& f) {
    const auto& g = f.grid();
    const double inv_2h = 0.5 / g.spacing();
    auto m = f.values();
    const std::size_t n = m.size();
    std::vector<Vec3> out(n);
    out[0] = inv_2h * (-3.0 * m[0] + 4.0 * m[1] - m[2]);
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = inv_2h * (m[j + 1] - m[j - 1]);
    out[n - 1] = inv_2h * (3.0 * m[n - 1] - 4.0 * m[n - 2] + m[n - 3]);
    return MagnetizationField(g, std::move(out));
}

MagnetizationField ll_rhs(const MagnetizationField& f, const LLParams& p, const Vec3& u) {
    p.validate();
    require_on_constraint(f);
    const double h = f.grid().spacing();
    std::vector<Vec3> out(f.size());
    kernel::cross_form(f.values(), p.nu, 1.0 / (h * h), out);
    add_uniform(out, u);
    return MagnetizationField(f.grid(), std::move(out));
}

MagnetizationField ll_rhs_semilinear(const MagnetizationField& f, const LLParams& p, const Vec3& u) {
    p.validate();
    require_on_constraint(f);
    std::vector<Vec3> out(f.size());
    kernel::semilinear_form(f.values(), p.nu, f.grid().spacing(), out);
    add_uniform(out, u);
    return MagnetizationField(f.grid(), std::move(out));
}

double semilinear_residual(const MagnetizationField& f, const LLParams& p) {
    auto a = ll_rhs(f, p, {});
    auto b = ll_rhs_semilinear(f, p, {});
    double r = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        Vec3 d = a[j] - b[j];
        r = std::max({r, std::abs(d.x1), std::abs(d.x2), std::abs(d.x3)});
    }
    return r;
}

std::string to_string(RhsForm form) {
    return form == RhsForm::CrossProduct ? "cross" : "semilinear";
}

std::string to_string(ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::Project: return "project";
        case ConstraintMode::ProjectRaw: return "project-raw";
        case ConstraintMode::Free: return "free";
    }
    return "project";
}

double stability_bound(const LLParams& p) {
    double h = p.grid.spacing();
    return h * h / (4.0 * p.nu + 2.0);
}

double default_dt(const LLParams& p, std::optional<double> period) {
    double dt = stability_bound(p);
    if (period) dt = std::min(dt, *period / 1000.0);
    return dt;
}

LLRun integrate_ll(const MagnetizationField& f0, const LLParams& p,
                   const std::optional<HarmonicInput>& input, const StepPlan& plan,
                   const ProbeSpec& probe, const LLOptions& opts) {
    p.validate();
    if (!(f0.grid() == p.grid)) throw PreconditionError("initial field grid differs from parameters");
    if (!(plan.dt > 0.0) || plan.steps == 0) throw PreconditionError("empty step plan");
    const double bound = stability_bound(p);
    if (plan.dt > bound * (1.0 + 1e-12)) {
        throw StabilityError("dt " + std::to_string(plan.dt) + " exceeds the explicit bound " +
                                 std::to_string(bound),
                             plan.dt, bound);
    }
    if (input) {
        input->validate();
        if (!input->channel) throw PreconditionError("Landau-Lifshitz input needs a channel");
    }
    const bool project = opts.constraint != ConstraintMode::Free;
    const bool tangent = opts.constraint == ConstraintMode::Project;
    if (project) require_on_constraint(f0);

    LLRun run{{}, {}, resolve(probe, p.grid), f0, {}, {}};
    const std::size_t node = run.probe.node;
    const int comp = run.probe.channel - 1;
    const double h = p.grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double nu = p.nu;

    auto forcing = [&](double t) { return input ? input->vector_at(t) : Vec3{}; };
    auto scalar_input = [&](double t) { return input ? (*input)(t) : 0.0; };

    auto rhs = [&](double t, std::span<const Vec3> m, std::span<Vec3> out) {
        if (opts.form == RhsForm::CrossProduct) {
            kernel::cross_form(m, nu, inv_h2, out);
        } else {
            kernel::semilinear_form(m, nu, h, out);
        }
        if (!input) return;
        Vec3 u = forcing(t);
        if (tangent) {
            // Only the part of u tangent to m keeps the exact flow on the sphere.
            for (std::size_t j = 0; j < m.size(); ++j) {
                double mm = dot(m[j], m[j]);
                out[j] += u - (dot(m[j], u) / mm) * m[j];
            }
        } else {
            for (auto& o : out) o += u;
        }
    };

    std::vector<Vec3> m(f0.values().begin(), f0.values().end());
    const std::size_t stride = std::max<std::size_t>(plan.stride, 1);
    std::vector<double> times, ys, us;
    const std::size_t samples = plan.steps / stride + 2;
    times.reserve(samples);
    ys.reserve(samples);
    us.reserve(samples);

    auto record = [&](double t) {
        times.push_back(t);
        ys.push_back(m[node][comp]);
        us.push_back(scalar_input(t));
    };
    auto norm_deviation = [&]() {
        double dev = 0.0;
        for (const auto& v : m) dev = std::max(dev, std::abs(norm(v) - 1.0));
        return dev;
    };
    auto snapshot = [&](double t) {
        run.snapshot_times.push_back(t);
        run.snapshots.emplace_back(p.grid, m);
    };

    record(0.0);
    if (opts.snapshot_stride > 0) snapshot(0.0);
    run.drift.max_post_projection = norm_deviation();

    Rk4<Vec3> rk(m.size());
    for (std::size_t n = 1; n <= plan.steps; ++n) {
        const double t0 = static_cast<double>(n - 1) * plan.dt;
        const double t = static_cast<double>(n) * plan.dt;
        rk.step(std::span<Vec3>(m), t0, plan.dt, rhs);

        double dev = 0.0;
        for (auto& v : m) {
            if (!is_finite(v)) throw SimulationError("Landau-Lifshitz field became non-finite", t);
            double len = norm(v);
            dev = std::max(dev, std::abs(len - 1.0));
            if (project) v *= 1.0 / len;
        }
        run.drift.max_pre_projection = std::max(run.drift.max_pre_projection, dev);
        run.drift.max_post_projection =
            std::max(run.drift.max_post_projection, project ? norm_deviation() : dev);

        if (n % stride == 0 || n == plan.steps) record(t);
        if (opts.snapshot_stride > 0 && n % opts.snapshot_stride == 0) snapshot(t);
    }
    run.trajectory = Trajectory(std::move(times), std::move(ys), std::move(us));
    run.final_state = MagnetizationField(p.grid, std::move(m));
    return run;
}

LLRun integrate_ll(const MagnetizationField& f0, const LLParams& p,
                   const std::optional<HarmonicInput>& input, double t_end, double dt,
                   const ProbeSpec& probe, const LLOptions& opts, std::size_t stride) {
    StepPlan plan = plan_fixed(dt, t_end, 0.0, 0);
    plan.stride = std::max<std::size_t>(stride, 1);
    return integrate_ll(f0, p, input, plan, probe, opts);
}

MagnetizationField great_circle_profile(const SpatialGrid& grid, double theta0, int mode) {
    const double k = mode * std::numbers::pi / grid.length();
    return MagnetizationField::sample(grid, [&](double x) {
        double th = theta0 * std::cos(k * x);
        return Vec3{std::cos(th), std::sin(th), 0.0};
    });
}

MagnetizationField tilted_profile(const SpatialGrid& grid, double eps) {
    const double k = std::numbers::pi / grid.length();
    return MagnetizationField::sample(grid, [&](double x) {
               return Vec3{1.0, eps * std::cos(k * x), 0.5 * eps * std::cos(2.0 * k * x)};
           })
        .normalized();
}

}  // namespace llhyst::ll
