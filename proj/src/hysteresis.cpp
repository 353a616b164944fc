#include "llhyst/hysteresis.hpp"

#include "llhyst/lllin.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace llhyst::hyst {

IOCurve extract_cycle(const Trajectory& traj, double omega, std::size_t discard_periods) {
    if (!(omega > 0.0)) throw PreconditionError("omega must be positive");
    if (traj.empty()) throw PreconditionError("empty trajectory");
    const double period = 2.0 * std::numbers::pi / omega;
    const double needed = static_cast<double>(discard_periods + 1) * period;
    const double slack = 1e-9 * needed;
    if (traj.duration() + slack < needed) {
        throw PreconditionError("trajectory covers " + std::to_string(traj.duration() / period) +
                                " periods, need " + std::to_string(discard_periods + 1));
    }
    auto times = traj.times();
    const double start = times.back() - period - slack;
    auto first = std::lower_bound(times.begin(), times.end(), start);
    auto offset = static_cast<std::size_t>(first - times.begin());

    IOCurve curve;
    curve.omega = omega;
    curve.points.reserve(traj.size() - offset);
    for (std::size_t i = offset; i < traj.size(); ++i) {
        curve.points.push_back({traj.inputs()[i], traj.samples()[i]});
    }
    if (curve.points.size() < kMinCyclePoints) {
        throw PreconditionError("extracted period has " + std::to_string(curve.points.size()) +
                                " samples, need at least " + std::to_string(kMinCyclePoints));
    }
    const auto& a = curve.points.front();
    const auto& b = curve.points.back();
    curve.closure_gap = std::hypot(a.u - b.u, a.y - b.y);

    auto metrics = loop_metrics(curve);
    curve.degenerate = metrics.degenerate;
    return curve;
}

double loop_area(const IOCurve& curve) {
    const auto& p = curve.points;
    const std::size_t n = p.size();
    if (n < 3) throw PreconditionError("loop area needs at least 3 points");
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % n];
        twice += (b.u - a.u) * (b.y + a.y);
    }
    return -0.5 * twice;
}

LoopMetrics loop_metrics(const IOCurve& curve) {
    LoopMetrics m;
    if (curve.points.empty()) throw PreconditionError("empty curve");
    auto [umin, umax] = std::minmax_element(curve.points.begin(), curve.points.end(),
                                            [](const IOPoint& a, const IOPoint& b) { return a.u < b.u; });
    auto [ymin, ymax] = std::minmax_element(curve.points.begin(), curve.points.end(),
                                            [](const IOPoint& a, const IOPoint& b) { return a.y < b.y; });
    m.width = umax->u - umin->u;
    m.height = ymax->y - ymin->y;
    m.closure_gap = std::hypot(curve.points.front().u - curve.points.back().u,
                               curve.points.front().y - curve.points.back().y);
    // Relative to the coordinate magnitude so an equilibrium at y = 1 with
    // round-off jitter still counts as flat.
    const double yscale = std::max({1e-300, std::abs(ymin->y), std::abs(ymax->y)});
    const double uscale = std::max({1e-300, std::abs(umin->u), std::abs(umax->u)});
    m.degenerate = m.width <= 1e-12 * uscale || m.height <= 1e-12 * yscale;
    m.area = curve.points.size() >= 3 ? loop_area(curve) : 0.0;
    m.normalized_area = m.degenerate ? 0.0 : std::abs(m.area) / (m.width * m.height);
    return m;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::LoopPersists: return "loop-persists";
        case Verdict::LoopVanishes: return "loop-vanishes";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict classify(const std::vector<SweepEntry>& entries, const SweepOptions& opts) {
    if (entries.size() < 2) return Verdict::Inconclusive;
    const auto& hi = entries.front().metrics;
    const auto& lo = entries.back().metrics;
    if (lo.normalized_area >= opts.persistence_threshold &&
        std::abs(lo.area) >= opts.vanish_ratio * std::abs(hi.area)) {
        return Verdict::LoopPersists;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (!(entries[i].metrics.normalized_area < entries[i - 1].metrics.normalized_area)) {
            decreasing = false;
            break;
        }
    }
    if (decreasing && lo.normalized_area < opts.vanish_threshold) return Verdict::LoopVanishes;
    return Verdict::Inconclusive;
}

SweepResult sweep(const SystemRunner& run, const std::vector<double>& omegas, const SweepOptions& opts) {
    if (omegas.size() < 3) throw PreconditionError("a sweep needs at least 3 frequencies");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] > 0.0)) throw PreconditionError("sweep frequencies must be positive");
        if (i > 0 && !(omegas[i] < omegas[i - 1])) {
            throw PreconditionError("sweep frequencies must be strictly decreasing");
        }
    }

    auto one = [&](double omega) -> SweepEntry {
        try {
            Trajectory traj = run(omega);
            SweepEntry e;
            e.omega = omega;
            e.curve = extract_cycle(traj, omega, opts.discard_periods);
            e.metrics = loop_metrics(e.curve);
            return e;
        } catch (const SweepError&) {
            throw;
        } catch (const std::exception& ex) {
            throw SweepError(omega, ex.what());
        }
    };

    SweepResult result;
    result.entries.resize(omegas.size());
    const std::size_t jobs = std::max<std::size_t>(opts.jobs, 1);
    for (std::size_t begin = 0; begin < omegas.size(); begin += jobs) {
        std::size_t end = std::min(omegas.size(), begin + jobs);
        if (jobs == 1) {
            result.entries[begin] = one(omegas[begin]);
            continue;
        }
        std::vector<std::future<SweepEntry>> pending;
        for (std::size_t i = begin; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, one, omegas[i]));
        }
        for (std::size_t i = begin; i < end; ++i) result.entries[i] = pending[i - begin].get();
    }
    result.verdict = classify(result.entries, opts);
    return result;
}

namespace {

double point_segment_distance(const IOPoint& p, const IOPoint& a, const IOPoint& b) {
    const double du = b.u - a.u;
    const double dy = b.y - a.y;
    const double len2 = du * du + dy * dy;
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(((p.u - a.u) * du + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return std::hypot(p.u - (a.u + s * du), p.y - (a.y + s * dy));
}

// max over vertices of `from` of the distance to the polyline `to`.
double directed_to_polyline(const std::vector<IOPoint>& from, const std::vector<IOPoint>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < to.size(); ++i) {
            best = std::min(best, point_segment_distance(p, to[i], to[i + 1]));
            if (best <= worst) break;  // cannot raise the max any more
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double directed_to_points(const std::vector<IOPoint>& from, const std::vector<IOPoint>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to) {
            best = std::min(best, std::hypot(p.u - q.u, p.y - q.y));
            if (best <= worst) break;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double rate_independence(const IOCurve& a, const IOCurve& b) {
    auto ma = loop_metrics(a);
    auto mb = loop_metrics(b);
    if (ma.degenerate || mb.degenerate) throw PreconditionError("rate independence needs non-degenerate curves");
    double d = std::max(directed_to_polyline(a.points, b.points), directed_to_polyline(b.points, a.points));
    return d / std::max(ma.height, mb.height);
}

double hausdorff_points(const IOCurve& a, const IOCurve& b) {
    if (a.points.empty() || b.points.empty()) throw PreconditionError("empty curve");
    return std::max(directed_to_points(a.points, b.points), directed_to_points(b.points, a.points));
}

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::LinearSpring: return "linear-spring";
        case SystemKind::NonlinearSpring: return "nonlinear-spring";
        case SystemKind::IntegratorChain: return "integrator-chain";
        case SystemKind::LLNonlinear: return "ll-nonlinear";
        case SystemKind::LLLinear: return "ll-linear";
    }
    throw PreconditionError("unknown system");
}

SystemKind parse_system_kind(const std::string& name) {
    for (auto k : {SystemKind::LinearSpring, SystemKind::NonlinearSpring, SystemKind::IntegratorChain,
                   SystemKind::LLNonlinear, SystemKind::LLLinear}) {
        if (to_string(k) == name) return k;
    }
    throw PreconditionError("unknown system '" + name + "'");
}

namespace {

Census ode_census(const ode::SecondOrderParams& p) {
    Census c;
    auto eq = ode::equilibria(p);
    c.count = eq.kind;
    for (const auto& pt : eq.points) {
        auto lam = ode::linearized_eigenvalues(p, pt);
        double re = std::max(lam[0].real(), lam[1].real());
        bool stable = re <= 0.0;
        c.notes.push_back("(" + std::to_string(pt.y) + ", 0): eigenvalues " +
                          std::to_string(lam[0].real()) + ", " + std::to_string(lam[1].real()) +
                          (stable ? " -> stable" : " -> unstable"));
        if (eq.kind == ode::EquilibriumKind::Continuum) {
            // Linearization is the same at every (a, 0).
            c.continuum_stable = stable;
        } else if (stable) {
            ++c.stable_points;
        }
    }
    c.multiple_stable = c.continuum_stable || c.stable_points > 1;
    return c;
}

}  // namespace

Census equilibrium_census(const SystemDescriptor& system) {
    switch (system.kind) {
        case SystemKind::LinearSpring:
        case SystemKind::NonlinearSpring:
        case SystemKind::IntegratorChain: {
            ode::SecondOrderParams p = system.ode;
            if (system.kind == SystemKind::IntegratorChain) p.k = 0.0;
            if (system.kind == SystemKind::NonlinearSpring) p.cubic = true;
            if (system.kind == SystemKind::LinearSpring) p.cubic = false;
            return ode_census(p);
        }
        case SystemKind::LLNonlinear: {
            system.ll.validate();
            Census c;
            c.count = ode::EquilibriumKind::Continuum;
            c.continuum_stable = system.ll.nu >= 0.0;
            c.multiple_stable = c.continuum_stable;
            c.notes.push_back("equilibria: every constant unit vector m(x) = a, |a| = 1");
            c.notes.push_back("each constant unit vector is stable in the L2 norm");
            return c;
        }
        case SystemKind::LLLinear: {
            system.ll.validate();
            Census c;
            c.count = ode::EquilibriumKind::Continuum;
            auto spec = lin::analytic_spectrum(system.ll, 8);
            double re = -std::numeric_limits<double>::infinity();
            for (const auto& e : spec) {
                for (const auto& v : e.values) re = std::max(re, v.real());
            }
            c.continuum_stable = re <= 0.0;
            c.multiple_stable = c.continuum_stable;
            c.notes.push_back("equilibria: every constant vector z(x) = c");
            c.notes.push_back("largest real part over modes 0..8: " + std::to_string(re));
            return c;
        }
    }
    throw PreconditionError("unknown system");
}

}  // namespace llhyst::hyst
