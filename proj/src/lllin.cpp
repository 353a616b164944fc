#include "llhyst/lllin.hpp"

#include "llhyst/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace llhyst::lin {

LinearizationPoint::LinearizationPoint(const Vec3& a) : a_(a) {
    if (!is_finite(a) || std::abs(norm(a) - 1.0) > 1e-12) {
        throw PreconditionError("linearization point must be a unit vector");
    }
}

namespace {

// nu L + a x L per node, where L is the Neumann second difference.
void apply_kernel(std::span<const Vec3> z, const Vec3& a, double nu, double inv_h2,
                  std::span<Vec3> out) {
    ll::kernel::laplacian(z, inv_h2, out);
    for (auto& l : out) l = nu * l + cross(a, l);
}

}  // namespace

MagnetizationField apply_A(const MagnetizationField& z, const LLParams& p, const LinearizationPoint& at) {
    p.validate();
    const double h = z.grid().spacing();
    std::vector<Vec3> out(z.size());
    apply_kernel(z.values(), at.a(), p.nu, 1.0 / (h * h), out);
    return MagnetizationField(z.grid(), std::move(out));
}

std::vector<SpectrumEntry> analytic_spectrum(const LLParams& p, std::size_t max_mode) {
    p.validate();
    const double L = p.grid.length();
    std::vector<SpectrumEntry> out;
    out.reserve(max_mode + 1);
    out.push_back({0, {{0.0, 0.0}}});
    for (std::size_t m = 1; m <= max_mode; ++m) {
        double md = static_cast<double>(m);
        double mu = md * md * std::numbers::pi * std::numbers::pi / (L * L);
        double re = -mu * p.nu;
        out.push_back({m, {{re, 0.0}, {re, mu}, {re, -mu}}});
    }
    return out;
}

Eigen::MatrixXd discretize_A(const LLParams& p, const LinearizationPoint& at) {
    p.validate();
    const std::size_t n = p.grid.nodes();
    const double h = p.grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const Vec3& a = at.a();

    // Block B = nu I + [a]x, with [a]x v = a x v.
    Eigen::Matrix3d b;
    b << p.nu, -a.x3, a.x2,
         a.x3, p.nu, -a.x1,
         -a.x2, a.x1, p.nu;

    const auto dim = static_cast<Eigen::Index>(3 * n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    auto put = [&](std::size_t row, std::size_t col, double w) {
        m.block<3, 3>(static_cast<Eigen::Index>(3 * row), static_cast<Eigen::Index>(3 * col)) += w * b;
    };
    put(0, 0, -2.0 * inv_h2);
    put(0, 1, 2.0 * inv_h2);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        put(j, j - 1, inv_h2);
        put(j, j, -2.0 * inv_h2);
        put(j, j + 1, inv_h2);
    }
    put(n - 1, n - 2, 2.0 * inv_h2);
    put(n - 1, n - 1, -2.0 * inv_h2);
    return m;
}

std::vector<std::complex<double>> numeric_spectrum(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw PreconditionError("spectrum needs a square matrix");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() < y.imag();
    });
    return out;
}

std::vector<ModeMatch> match_spectrum(const std::vector<SpectrumEntry>& analytic,
                                      const std::vector<std::complex<double>>& numeric) {
    std::vector<ModeMatch> wanted;
    for (const auto& e : analytic) {
        for (const auto& v : e.values) wanted.push_back({e.mode, v, {}, 0.0});
    }
    std::stable_sort(wanted.begin(), wanted.end(),
                     [](const ModeMatch& x, const ModeMatch& y) { return std::abs(x.analytic) < std::abs(y.analytic); });
    if (wanted.size() > numeric.size()) throw PreconditionError("more analytic values than numeric ones");

    std::vector<bool> used(numeric.size(), false);
    for (auto& w : wanted) {
        std::size_t best = numeric.size();
        double best_d = 0.0;
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            if (used[i]) continue;
            double d = std::abs(numeric[i] - w.analytic);
            if (best == numeric.size() || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        used[best] = true;
        w.numeric = numeric[best];
        w.abs_error = best_d;
    }
    std::stable_sort(wanted.begin(), wanted.end(), [](const ModeMatch& x, const ModeMatch& y) {
        if (x.mode != y.mode) return x.mode < y.mode;
        return x.analytic.imag() < y.analytic.imag();
    });
    return wanted;
}

double max_real_part(const std::vector<std::complex<double>>& values) {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& v : values) r = std::max(r, v.real());
    return r;
}

std::size_t kernel_dimension(const std::vector<std::complex<double>>& values, double tol) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [tol](const auto& v) { return std::abs(v) <= tol; }));
}

double stability_bound(const LLParams& p) {
    double h = p.grid.spacing();
    double rho = 4.0 / (h * h) * std::sqrt(1.0 + p.nu * p.nu);
    return 2.0 / rho;
}

LinearRun integrate_linear(const MagnetizationField& z0, const LLParams& p,
                           const LinearizationPoint& at, const std::optional<HarmonicInput>& input,
                           const StepPlan& plan, const ProbeSpec& probe) {
    p.validate();
    if (!(z0.grid() == p.grid)) throw PreconditionError("initial field grid differs from parameters");
    if (!(plan.dt > 0.0) || plan.steps == 0) throw PreconditionError("empty step plan");
    const double bound = lin::stability_bound(p);
    if (plan.dt > bound * (1.0 + 1e-12)) {
        throw StabilityError("dt " + std::to_string(plan.dt) + " exceeds the explicit bound " +
                                 std::to_string(bound),
                             plan.dt, bound);
    }
    if (input) {
        input->validate();
        if (!input->channel) throw PreconditionError("linearized input needs a channel");
    }

    LinearRun run{{}, ll::resolve(probe, p.grid), z0};
    const std::size_t node = run.probe.node;
    const int comp = run.probe.channel - 1;
    const double h = p.grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const Vec3 a = at.a();
    const double nu = p.nu;

    auto rhs = [&](double t, std::span<const Vec3> z, std::span<Vec3> out) {
        apply_kernel(z, a, nu, inv_h2, out);
        if (input) {
            Vec3 u = input->vector_at(t);
            for (auto& o : out) o += u;
        }
    };
    auto scalar_input = [&](double t) { return input ? (*input)(t) : 0.0; };

    std::vector<Vec3> z(z0.values().begin(), z0.values().end());
    const std::size_t stride = std::max<std::size_t>(plan.stride, 1);
    std::vector<double> times, ys, us;
    const std::size_t samples = plan.steps / stride + 2;
    times.reserve(samples);
    ys.reserve(samples);
    us.reserve(samples);
    times.push_back(0.0);
    ys.push_back(z[node][comp]);
    us.push_back(scalar_input(0.0));

    Rk4<Vec3> rk(z.size());
    for (std::size_t n = 1; n <= plan.steps; ++n) {
        const double t0 = static_cast<double>(n - 1) * plan.dt;
        const double t = static_cast<double>(n) * plan.dt;
        rk.step(std::span<Vec3>(z), t0, plan.dt, rhs);
        if (!is_finite(z[node])) throw SimulationError("linearized field became non-finite", t);
        if (n % stride == 0 || n == plan.steps) {
            times.push_back(t);
            ys.push_back(z[node][comp]);
            us.push_back(scalar_input(t));
        }
    }
    for (const auto& v : z) {
        if (!is_finite(v)) throw SimulationError("linearized field became non-finite", plan.dt * plan.steps);
    }
    run.trajectory = Trajectory(std::move(times), std::move(ys), std::move(us));
    run.final_state = MagnetizationField(p.grid, std::move(z));
    return run;
}

LinearRun integrate_linear(const MagnetizationField& z0, const LLParams& p,
                           const LinearizationPoint& at, const std::optional<HarmonicInput>& input,
                           double t_end, double dt, const ProbeSpec& probe, std::size_t stride) {
    StepPlan plan = plan_fixed(dt, t_end, 0.0, 0);
    plan.stride = std::max<std::size_t>(stride, 1);
    return integrate_linear(z0, p, at, input, plan, probe);
}

}  // namespace llhyst::lin
