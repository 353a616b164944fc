#include "llhyst/experiment.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#ifndef LLHYST_VERSION
#define LLHYST_VERSION "0.0.0"
#endif
#ifndef LLHYST_PRESET_DIR_DEFAULT
#define LLHYST_PRESET_DIR_DEFAULT "presets"
#endif

namespace llhyst::exp {

using json = nlohmann::ordered_json;

std::string version() { return LLHYST_VERSION; }

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Uniform: return "uniform";
        case ProfileKind::GreatCircle: return "great-circle";
        case ProfileKind::Tilted: return "tilted";
    }
    return "uniform";
}

// =============================================================================
// Validation
// =============================================================================

void ExperimentSpec::validate() const {
    auto fail = [](const std::string& what) { throw SpecError(what); };
    if (sweep.empty()) fail("sweep must list at least one frequency");
    for (double w : sweep) {
        if (!(w > 0.0) || !std::isfinite(w)) fail("sweep frequencies must be positive");
    }
    if (!(input.amplitude >= 0.0) || !std::isfinite(input.amplitude)) fail("input amplitude must be >= 0");
    if (input.channel < 1 || input.channel > 3) fail("input channel must be 1, 2 or 3");
    if (integrator.dt && !(*integrator.dt > 0.0)) fail("integrator dt must be positive");
    if (integrator.periods < integrator.discard_periods + 1) {
        fail("integrator periods must exceed discard_periods");
    }
    if (integrator.samples_per_period < hyst::kMinCyclePoints) {
        fail("samples_per_period must be at least " + std::to_string(hyst::kMinCyclePoints));
    }
    if (!std::isfinite(ode.c) || !std::isfinite(ode.k)) fail("c and k must be finite");
    if (is_pde()) {
        if (!(ll.nu >= 0.0) || !std::isfinite(ll.nu)) fail("nu must be >= 0");
        if (probe.channel < 1 || probe.channel > 3) fail("probe channel must be 1, 2 or 3");
        if (!(probe.x >= 0.0 && probe.x <= ll.grid.length())) fail("probe x must lie in [0, L]");
        if (system == hyst::SystemKind::LLLinear && std::abs(norm(a) - 1.0) > 1e-12) {
            fail("linearization point a must be a unit vector");
        }
        if (system == hyst::SystemKind::LLNonlinear && initial.profile == ProfileKind::Uniform &&
            integrator.constraint != ll::ConstraintMode::Free && std::abs(norm(initial.m0) - 1.0) > 1e-9) {
            fail("initial m0 must be a unit vector");
        }
        if (initial.mode < 0) fail("initial profile mode must be >= 0");
    }
}

// =============================================================================
// YAML
// =============================================================================

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) throw SpecError("'" + where + "' must be a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        if (!ok.count(key)) throw SpecError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    if (!node[key]) return;
    try {
        out = node[key].as<T>();
    } catch (const YAML::Exception&) {
        throw SpecError("bad value for '" + std::string(key) + "' in " + where);
    }
}

Vec3 read_vec3(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence() || node.size() != 3) throw SpecError(where + " must be a list of 3 numbers");
    try {
        return {node[0].as<double>(), node[1].as<double>(), node[2].as<double>()};
    } catch (const YAML::Exception&) {
        throw SpecError(where + " must be a list of 3 numbers");
    }
}

Waveform parse_shape(const std::string& s) {
    if (s == "sine") return Waveform::Sine;
    if (s == "cosine") return Waveform::Cosine;
    throw SpecError("input shape must be sine or cosine");
}

ProfileKind parse_profile(const std::string& s) {
    for (auto k : {ProfileKind::Uniform, ProfileKind::GreatCircle, ProfileKind::Tilted}) {
        if (to_string(k) == s) return k;
    }
    throw SpecError("unknown initial profile '" + s + "'");
}

std::string num(double v) { return format_number(v); }

std::string vec(const Vec3& v) { return "[" + num(v.x1) + ", " + num(v.x2) + ", " + num(v.x3) + "]"; }

ExperimentSpec parse_root(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw SpecError(std::string("YAML: ") + e.what());
    }
    if (!root.IsMap()) throw SpecError("spec must be a mapping");
    check_keys(root, "spec",
               {"name", "system", "params", "input", "initial", "sweep", "probe", "integrator", "spectrum",
                "outputs"});

    ExperimentSpec s;
    read(root, "name", s.name, "spec");
    if (!root["system"]) throw SpecError("missing 'system'");
    try {
        s.system = hyst::parse_system_kind(root["system"].as<std::string>());
    } catch (const PreconditionError& e) {
        throw SpecError(e.what());
    }
    // Family defaults before explicit params.
    if (s.system == hyst::SystemKind::NonlinearSpring) {
        s.ode.k = -1.0;
        s.ode.cubic = true;
    } else if (s.system == hyst::SystemKind::IntegratorChain) {
        s.ode.k = 0.0;
    }
    if (s.is_pde()) {
        s.input.amplitude = 0.001;
        s.input.shape = Waveform::Cosine;
    }

    if (auto p = root["params"]) {
        check_keys(p, "params", {"c", "k", "nu", "L", "n", "a"});
        read(p, "c", s.ode.c, "params");
        read(p, "k", s.ode.k, "params");
        read(p, "nu", s.ll.nu, "params");
        double L = s.ll.grid.length();
        std::size_t n = s.ll.grid.nodes();
        read(p, "L", L, "params");
        read(p, "n", n, "params");
        try {
            s.ll.grid = SpatialGrid(L, n);
        } catch (const PreconditionError& e) {
            throw SpecError(e.what());
        }
        if (p["a"]) s.a = read_vec3(p["a"], "params.a");
    }
    if (s.system == hyst::SystemKind::IntegratorChain && s.ode.k != 0.0) {
        throw SpecError("integrator-chain requires k = 0");
    }
    if (auto in = root["input"]) {
        check_keys(in, "input", {"amplitude", "shape", "channel"});
        read(in, "amplitude", s.input.amplitude, "input");
        if (in["shape"]) s.input.shape = parse_shape(in["shape"].as<std::string>());
        read(in, "channel", s.input.channel, "input");
    }
    if (auto ic = root["initial"]) {
        check_keys(ic, "initial", {"y0", "y1", "profile", "m0", "theta0", "mode", "eps"});
        read(ic, "y0", s.initial.y0, "initial");
        read(ic, "y1", s.initial.y1, "initial");
        if (ic["profile"]) s.initial.profile = parse_profile(ic["profile"].as<std::string>());
        if (ic["m0"]) s.initial.m0 = read_vec3(ic["m0"], "initial.m0");
        read(ic, "theta0", s.initial.theta0, "initial");
        read(ic, "mode", s.initial.mode, "initial");
        read(ic, "eps", s.initial.eps, "initial");
    }
    if (auto sw = root["sweep"]) {
        if (!sw.IsSequence()) throw SpecError("sweep must be a list of frequencies");
        s.sweep.clear();
        for (const auto& w : sw) {
            try {
                s.sweep.push_back(w.as<double>());
            } catch (const YAML::Exception&) {
                throw SpecError("sweep must be a list of frequencies");
            }
        }
    }
    if (auto pr = root["probe"]) {
        check_keys(pr, "probe", {"x", "channel"});
        read(pr, "x", s.probe.x, "probe");
        read(pr, "channel", s.probe.channel, "probe");
    }
    if (auto ig = root["integrator"]) {
        check_keys(ig, "integrator",
                   {"dt", "periods", "discard_periods", "samples_per_period", "constraint", "rhs_form"});
        if (auto dt = ig["dt"]) {
            auto txt = dt.as<std::string>();
            if (txt == "auto") {
                s.integrator.dt.reset();
            } else {
                double v = 0.0;
                read(ig, "dt", v, "integrator");
                s.integrator.dt = v;
            }
        }
        read(ig, "periods", s.integrator.periods, "integrator");
        read(ig, "discard_periods", s.integrator.discard_periods, "integrator");
        read(ig, "samples_per_period", s.integrator.samples_per_period, "integrator");
        if (auto c = ig["constraint"]) {
            auto v = c.as<std::string>();
            if (v == "project") s.integrator.constraint = ll::ConstraintMode::Project;
            else if (v == "project-raw") s.integrator.constraint = ll::ConstraintMode::ProjectRaw;
            else if (v == "free") s.integrator.constraint = ll::ConstraintMode::Free;
            else throw SpecError("integrator constraint must be project, project-raw or free");
        }
        if (auto f = ig["rhs_form"]) {
            auto v = f.as<std::string>();
            if (v == "cross") s.integrator.rhs_form = ll::RhsForm::CrossProduct;
            else if (v == "semilinear") s.integrator.rhs_form = ll::RhsForm::Semilinear;
            else throw SpecError("integrator rhs_form must be cross or semilinear");
        }
    }
    if (auto sp = root["spectrum"]) {
        check_keys(sp, "spectrum", {"max_mode"});
        read(sp, "max_mode", s.max_mode, "spectrum");
    }
    if (auto o = root["outputs"]) {
        check_keys(o, "outputs", {"trajectory", "loops", "plot", "record"});
        read(o, "trajectory", s.outputs.trajectory, "outputs");
        read(o, "loops", s.outputs.loops, "outputs");
        read(o, "plot", s.outputs.plot, "outputs");
        read(o, "record", s.outputs.record, "outputs");
    }
    s.validate();
    return s;
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
    try {
        return parse_root(text);
    } catch (const YAML::Exception& e) {
        throw SpecError(std::string("YAML: ") + e.what());
    }
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read spec file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

std::string serialize_spec(const ExperimentSpec& s) {
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::ostringstream os;
    os << "name: " << s.name << "\n";
    os << "system: " << hyst::to_string(s.system) << "\n";
    os << "params:\n";
    os << "  c: " << num(s.ode.c) << "\n";
    os << "  k: " << num(s.ode.k) << "\n";
    os << "  nu: " << num(s.ll.nu) << "\n";
    os << "  L: " << num(s.ll.grid.length()) << "\n";
    os << "  n: " << s.ll.grid.nodes() << "\n";
    os << "  a: " << vec(s.a) << "\n";
    os << "input:\n";
    os << "  amplitude: " << num(s.input.amplitude) << "\n";
    os << "  shape: " << (s.input.shape == Waveform::Sine ? "sine" : "cosine") << "\n";
    os << "  channel: " << s.input.channel << "\n";
    os << "initial:\n";
    os << "  y0: " << num(s.initial.y0) << "\n";
    os << "  y1: " << num(s.initial.y1) << "\n";
    os << "  profile: " << to_string(s.initial.profile) << "\n";
    os << "  m0: " << vec(s.initial.m0) << "\n";
    os << "  theta0: " << num(s.initial.theta0) << "\n";
    os << "  mode: " << s.initial.mode << "\n";
    os << "  eps: " << num(s.initial.eps) << "\n";
    os << "sweep: [";
    for (std::size_t i = 0; i < s.sweep.size(); ++i) os << (i ? ", " : "") << num(s.sweep[i]);
    os << "]\n";
    os << "probe:\n";
    os << "  x: " << num(s.probe.x) << "\n";
    os << "  channel: " << s.probe.channel << "\n";
    os << "integrator:\n";
    os << "  dt: " << (s.integrator.dt ? num(*s.integrator.dt) : "auto") << "\n";
    os << "  periods: " << s.integrator.periods << "\n";
    os << "  discard_periods: " << s.integrator.discard_periods << "\n";
    os << "  samples_per_period: " << s.integrator.samples_per_period << "\n";
    os << "  constraint: " << ll::to_string(s.integrator.constraint) << "\n";
    os << "  rhs_form: " << ll::to_string(s.integrator.rhs_form) << "\n";
    os << "spectrum:\n";
    os << "  max_mode: " << s.max_mode << "\n";
    os << "outputs:\n";
    os << "  trajectory: " << b(s.outputs.trajectory) << "\n";
    os << "  loops: " << b(s.outputs.loops) << "\n";
    os << "  plot: " << b(s.outputs.plot) << "\n";
    os << "  record: " << b(s.outputs.record) << "\n";
    return os.str();
}

// =============================================================================
// Runners
// =============================================================================

namespace {

// Largest ODE step of the automatic policy.
constexpr double kOdeDtMax = 0.01;

StepPlan make_plan(const ExperimentSpec& spec, double period, double dt_auto) {
    const auto& ig = spec.integrator;
    if (ig.dt) {
        return plan_fixed(*ig.dt, period * static_cast<double>(ig.periods), period, ig.samples_per_period);
    }
    return plan_periodic(period, ig.periods, dt_auto, ig.samples_per_period);
}

MagnetizationField initial_field(const ExperimentSpec& spec) {
    const auto& ic = spec.initial;
    switch (ic.profile) {
        case ProfileKind::Uniform: return MagnetizationField::uniform(spec.ll.grid, ic.m0);
        case ProfileKind::GreatCircle: return ll::great_circle_profile(spec.ll.grid, ic.theta0, ic.mode);
        case ProfileKind::Tilted: return ll::tilted_profile(spec.ll.grid, ic.eps);
    }
    throw SpecError("unknown initial profile");
}

ode::SecondOrderParams ode_params(const ExperimentSpec& spec) {
    ode::SecondOrderParams p = spec.ode;
    p.cubic = spec.system == hyst::SystemKind::NonlinearSpring;
    if (spec.system == hyst::SystemKind::IntegratorChain) p.k = 0.0;
    return p;
}

}  // namespace

SimulationOutput simulate_at(const ExperimentSpec& spec, double omega) {
    HarmonicInput input{spec.input.amplitude, omega, spec.input.shape, std::nullopt};
    input.validate();
    const double period = input.period();
    SimulationOutput out;
    auto& d = out.diagnostics;
    d.omega = omega;

    if (!spec.is_pde()) {
        StepPlan plan = make_plan(spec, period, kOdeDtMax);
        d.dt = plan.dt;
        d.steps = plan.steps;
        d.stride = plan.stride;
        out.trajectory = ode::integrate(ode_params(spec), input, {spec.initial.y0, spec.initial.y1}, plan);
        return out;
    }

    input.channel = spec.input.channel;
    StepPlan plan = make_plan(spec, period, ll::default_dt(spec.ll, period));
    d.dt = plan.dt;
    d.steps = plan.steps;
    d.stride = plan.stride;
    auto f0 = initial_field(spec);
    if (spec.system == hyst::SystemKind::LLNonlinear) {
        d.stability_bound = ll::stability_bound(spec.ll);
        ll::LLOptions opts;
        opts.form = spec.integrator.rhs_form;
        opts.constraint = spec.integrator.constraint;
        auto run = ll::integrate_ll(f0, spec.ll, input, plan, spec.probe, opts);
        d.drift = run.drift;
        d.probe = run.probe;
        out.trajectory = std::move(run.trajectory);
    } else {
        d.stability_bound = lin::stability_bound(spec.ll);
        auto run = lin::integrate_linear(f0, spec.ll, lin::LinearizationPoint(spec.a), input, plan, spec.probe);
        d.probe = run.probe;
        out.trajectory = std::move(run.trajectory);
    }
    return out;
}

SimulationOutput run_simulate(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.sweep.size() != 1) throw SpecError("simulate needs exactly one frequency in 'sweep'");
    return simulate_at(spec, spec.sweep.front());
}

SweepOutput run_sweep(const ExperimentSpec& spec, std::size_t jobs) {
    spec.validate();
    if (spec.sweep.size() < 3) throw SpecError("sweep needs at least 3 frequencies");
    for (std::size_t i = 1; i < spec.sweep.size(); ++i) {
        if (!(spec.sweep[i] < spec.sweep[i - 1])) throw SpecError("sweep frequencies must be strictly decreasing");
    }
    SweepOutput out;
    out.diagnostics.resize(spec.sweep.size());
    std::mutex guard;
    hyst::SweepOptions opts;
    opts.discard_periods = spec.integrator.discard_periods;
    opts.jobs = jobs;
    out.result = hyst::sweep(
        [&](double omega) {
            auto sim = simulate_at(spec, omega);
            auto it = std::find(spec.sweep.begin(), spec.sweep.end(), omega);
            std::lock_guard<std::mutex> lock(guard);
            out.diagnostics[static_cast<std::size_t>(it - spec.sweep.begin())] = sim.diagnostics;
            return std::move(sim.trajectory);
        },
        spec.sweep, opts);
    return out;
}

SpectrumOutput run_spectrum(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.system != hyst::SystemKind::LLLinear) throw SpecError("spectrum needs the ll-linear system");
    lin::LinearizationPoint at(spec.a);
    auto numeric = lin::numeric_spectrum(lin::discretize_A(spec.ll, at));
    SpectrumOutput out;
    out.matches = lin::match_spectrum(lin::analytic_spectrum(spec.ll, spec.max_mode), numeric);
    out.max_real_part = lin::max_real_part(numeric);
    out.kernel_dimension = lin::kernel_dimension(numeric, 1e-10);
    return out;
}

// =============================================================================
// Verify
// =============================================================================

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

// Max deviation from the closed form over `periods` periods at the planned
// step divided by `refine`.
double ode_error(double c, double k, double omega, std::size_t refine, std::size_t periods) {
    ode::SecondOrderParams p{c, k, false};
    HarmonicInput in{1.0, omega, Waveform::Sine, std::nullopt};
    StepPlan plan = plan_periodic(in.period(), periods, kOdeDtMax, 2000);
    plan.dt /= static_cast<double>(refine);
    plan.steps *= refine;
    plan.stride *= refine;
    auto traj = ode::integrate(p, in, {0.0, 0.0}, plan);
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double t = traj.times()[i];
        double exact = k == 0.0 ? ode::closed_form_k0(c, omega, 0.0, 0.0, t)
                                : ode::closed_form_linear(c, k, omega, 0.0, 0.0, t);
        err = std::max(err, std::abs(traj.samples()[i] - exact));
    }
    return err;
}

CheckResult check_closed_form() {
    CheckResult r{"ode closed form", true, ""};
    for (double k : {1.0, 0.0}) {
        for (double w : {1.0, 0.1}) {
            double e1 = ode_error(15.0, k, w, 1, 3);
            double e2 = ode_error(15.0, k, w, 2, 3);
            double ratio = e1 / e2;
            bool ok = e1 <= 1e-6 && ratio >= 8.0 && ratio <= 32.0;
            r.passed = r.passed && ok;
            r.detail += "k=" + format_number(k) + " w=" + format_number(w) + " err " + sci(e1) + " ratio " +
                        sci(ratio) + "; ";
        }
    }
    return r;
}

CheckResult check_semilinear() {
    CheckResult r{"semilinear refinement", true, ""};
    double prev = 0.0;
    for (std::size_t n : {21u, 41u, 81u}) {
        ll::LLParams p{0.02, SpatialGrid(1.0, n)};
        double res = ll::semilinear_residual(ll::tilted_profile(p.grid, 0.5), p);
        if (prev > 0.0) {
            double ratio = prev / res;
            r.passed = r.passed && ratio >= 3.2 && ratio <= 5.0;
            r.detail += "ratio " + sci(ratio) + "; ";
        }
        prev = res;
    }
    return r;
}

CheckResult check_spectrum(double nu_scale) {
    CheckResult r{"spectral convergence", true, ""};
    const std::size_t max_mode = 3;
    std::vector<std::vector<lin::ModeMatch>> runs;
    lin::LinearizationPoint at({1.0, 0.0, 0.0});
    for (std::size_t n : {41u, 81u}) {
        ll::LLParams p{0.02, SpatialGrid(1.0, n)};
        ll::LLParams analytic_p = p;
        analytic_p.nu *= nu_scale;
        auto numeric = lin::numeric_spectrum(lin::discretize_A(p, at));
        if (lin::max_real_part(numeric) > 1e-10) {
            r.passed = false;
            r.detail += "positive real part at n=" + std::to_string(n) + "; ";
        }
        if (lin::kernel_dimension(numeric, 1e-10) != 3) {
            r.passed = false;
            r.detail += "kernel dimension != 3 at n=" + std::to_string(n) + "; ";
        }
        runs.push_back(lin::match_spectrum(lin::analytic_spectrum(analytic_p, max_mode), numeric));
    }
    double worst_lo = 1e300;
    double worst_hi = 0.0;
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
        const auto& a = runs[0][i];
        const auto& b = runs[1][i];
        if (a.mode == 0) {
            if (a.abs_error >= 1e-10 || b.abs_error >= 1e-10) r.passed = false;
            continue;
        }
        double ratio = a.abs_error / b.abs_error;
        worst_lo = std::min(worst_lo, ratio);
        worst_hi = std::max(worst_hi, ratio);
        if (!(ratio >= 3.2 && ratio <= 5.0)) r.passed = false;
    }
    r.detail += "n=41->81 error ratio over modes 1-3 in [" + sci(worst_lo) + ", " + sci(worst_hi) + "]";
    return r;
}

CheckResult check_ellipse() {
    CheckResult r{"loop area ellipse", true, ""};
    hyst::IOCurve curve;
    const double a = 2.0;
    const double b = 0.5;
    const std::size_t n = 2000;
    for (std::size_t i = 0; i <= n; ++i) {
        double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        curve.points.push_back({a * std::cos(th), b * std::sin(th)});
    }
    auto m = hyst::loop_metrics(curve);
    // Inscribed polygon: area = (n/2) a b sin(2 pi / n).
    double exact = std::numbers::pi * a * b;
    double rel = std::abs(m.area - exact) / exact;
    double nz = std::abs(m.normalized_area - std::numbers::pi / 4.0);
    r.passed = m.area > 0.0 && rel < 1e-5 && nz < 1e-5;
    r.detail = "area " + sci(m.area) + " rel err " + sci(rel) + " normalized " + sci(m.normalized_area);
    return r;
}

CheckResult check_census() {
    CheckResult r{"equilibrium census", true, ""};
    struct Case {
        hyst::SystemKind kind;
        bool multiple;
    };
    for (auto c : {Case{hyst::SystemKind::LinearSpring, false}, Case{hyst::SystemKind::NonlinearSpring, true},
                   Case{hyst::SystemKind::IntegratorChain, true}, Case{hyst::SystemKind::LLNonlinear, true},
                   Case{hyst::SystemKind::LLLinear, true}}) {
        hyst::SystemDescriptor d;
        d.kind = c.kind;
        if (c.kind == hyst::SystemKind::NonlinearSpring) d.ode.k = -1.0;
        auto census = hyst::equilibrium_census(d);
        bool ok = census.multiple_stable == c.multiple;
        if (c.kind == hyst::SystemKind::LinearSpring) {
            ok = ok && census.count == ode::EquilibriumKind::Single && census.stable_points == 1;
        }
        r.passed = r.passed && ok;
        r.detail += hyst::to_string(c.kind) + "=" + ode::to_string(census.count) + (ok ? "" : "(!)") + " ";
    }
    return r;
}

CheckResult check_constant_fields() {
    CheckResult r{"constant equilibria", true, ""};
    ll::LLParams p;
    double worst = 0.0;
    for (Vec3 a : {Vec3{1, 0, 0}, Vec3{0, 0, 1}, Vec3{0.6, 0.8, 0.0}}) {
        auto f = MagnetizationField::uniform(p.grid, a);
        worst = std::max(worst, ll::ll_rhs(f, p, {}).max_abs());
        worst = std::max(worst, lin::apply_A(f, p, lin::LinearizationPoint(a)).max_abs());
    }
    r.passed = worst == 0.0;
    r.detail = "max |rhs| " + sci(worst);
    return r;
}

CheckResult check_constraint() {
    CheckResult r{"constraint preservation", true, ""};
    ll::LLParams p;
    HarmonicInput in{0.001, 1.0, Waveform::Cosine, 1};
    auto f0 = ll::great_circle_profile(p.grid, 1.0, 3);
    StepPlan plan = plan_periodic(in.period(), 1, ll::default_dt(p, in.period()), 2000);
    auto run = ll::integrate_ll(f0, p, in, plan, {}, {});
    r.passed = run.drift.max_post_projection <= 1e-12 && run.drift.max_pre_projection <= 1e-8;
    r.detail = "pre " + sci(run.drift.max_pre_projection) + " post " + sci(run.drift.max_post_projection);
    return r;
}

CheckResult check_guard(double factor) {
    CheckResult r{"stability guard", false, ""};
    ll::LLParams p;
    const double dt = factor * ll::stability_bound(p);
    try {
        ll::integrate_ll(MagnetizationField::uniform(p.grid, {1, 0, 0}), p, std::nullopt, 100 * dt, dt, {}, {});
        r.detail = "dt " + sci(dt) + " accepted";
        r.passed = factor <= 1.0;
    } catch (const StabilityError& e) {
        r.detail = "guard fired at dt " + sci(e.dt()) + " > " + sci(e.bound());
        r.passed = factor > 1.0;
    }
    return r;
}

}  // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
    std::vector<CheckResult> out;
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("error: ") + e.what()});
        }
    };
    guarded("ode closed form", check_closed_form);
    guarded("semilinear refinement", check_semilinear);
    guarded("spectral convergence", [&] { return check_spectrum(opts.analytic_nu_scale); });
    guarded("loop area ellipse", check_ellipse);
    guarded("equilibrium census", check_census);
    guarded("constant equilibria", check_constant_fields);
    guarded("constraint preservation", check_constraint);
    guarded("stability guard", [&] { return check_guard(opts.guard_dt_factor); });
    return out;
}

void print_verify_table(std::ostream& os, const std::vector<CheckResult>& checks) {
    std::size_t width = 5;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    os << std::left << std::setw(static_cast<int>(width)) << "check" << "  result  detail\n";
    for (const auto& c : checks) {
        os << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << (c.passed ? "PASS  " : "FAIL  ")
           << "  " << c.detail << "\n";
    }
}

// =============================================================================
// Writers
// =============================================================================

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,u,y\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_number(traj.times()[i]) << ',' << format_number(traj.inputs()[i]) << ','
           << format_number(traj.samples()[i]) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const hyst::SweepResult& sweep) {
    os << "omega,area,normalized_area,width,height,closure_gap\n";
    for (const auto& e : sweep.entries) {
        const auto& m = e.metrics;
        os << format_number(e.omega) << ',' << format_number(m.area) << ',' << format_number(m.normalized_area) << ','
           << format_number(m.width) << ',' << format_number(m.height) << ',' << format_number(m.closure_gap)
           << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const SpectrumOutput& spectrum) {
    os << "mode,re_analytic,im_analytic,re_numeric,im_numeric,abs_error\n";
    for (const auto& m : spectrum.matches) {
        os << m.mode << ',' << format_number(m.analytic.real()) << ',' << format_number(m.analytic.imag()) << ','
           << format_number(m.numeric.real()) << ',' << format_number(m.numeric.imag()) << ','
           << format_number(m.abs_error) << '\n';
    }
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[32];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string loop_svg(const hyst::IOCurve& curve, const std::string& caption) {
    constexpr double W = 480, H = 400, left = 70, right = 20, top = 20, bottom = 70;
    if (curve.points.empty()) throw PreconditionError("empty curve");
    auto [umin_it, umax_it] = std::minmax_element(curve.points.begin(), curve.points.end(),
                                                  [](const auto& a, const auto& b) { return a.u < b.u; });
    auto [ymin_it, ymax_it] = std::minmax_element(curve.points.begin(), curve.points.end(),
                                                  [](const auto& a, const auto& b) { return a.y < b.y; });
    double umin = umin_it->u, umax = umax_it->u, ymin = ymin_it->y, ymax = ymax_it->y;
    auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        double m = span > 0.0 ? 0.05 * span : std::max(1e-12, 0.05 * std::abs(lo));
        lo -= m;
        hi += m;
    };
    pad(umin, umax);
    pad(ymin, ymax);
    const double pw = W - left - right;
    const double ph = H - top - bottom;
    auto px = [&](double u) { return left + (u - umin) / (umax - umin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        os << (i ? " " : "") << fmt(px(curve.points[i].u)) << ',' << fmt(py(curve.points[i].y));
    }
    os << "\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<text x=\"" << left << "\" y=\"" << top + ph + 14 << "\">" << fmt(umin, "%.4g") << "</text>\n";
    os << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 14 << "\" text-anchor=\"end\">" << fmt(umax, "%.4g")
       << "</text>\n";
    os << "<text x=\"" << left - 4 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << fmt(ymin, "%.6g")
       << "</text>\n";
    os << "<text x=\"" << left - 4 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << fmt(ymax, "%.6g")
       << "</text>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << top + ph + 30 << "\" text-anchor=\"middle\" font-size=\"13\">u</text>\n";
    os << "<text x=\"" << left - 50 << "\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\">y</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(caption)
       << "</text>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string run_record(const ExperimentSpec& spec, const std::string& command,
                       const std::vector<RunDiagnostics>& diagnostics, const std::string& result_json,
                       double wall_seconds) {
    json rec;
    rec["toolkit"] = "llhyst";
    rec["version"] = version();
    rec["command"] = command;
    rec["spec"] = serialize_spec(spec);
    json runs = json::array();
    for (const auto& d : diagnostics) {
        json r;
        r["omega"] = d.omega;
        r["dt"] = d.dt;
        r["steps"] = d.steps;
        r["stride"] = d.stride;
        if (d.stability_bound) r["stability_bound"] = *d.stability_bound;
        if (d.drift) {
            r["drift"] = {{"max_pre_projection", d.drift->max_pre_projection},
                          {"max_post_projection", d.drift->max_post_projection}};
        }
        if (d.probe) {
            r["probe"] = {{"node", d.probe->node},
                          {"channel", d.probe->channel},
                          {"x_requested", d.probe->x_requested},
                          {"x_node", d.probe->x_node}};
        }
        runs.push_back(std::move(r));
    }
    rec["runs"] = std::move(runs);
    rec["result"] = result_json.empty() ? json::object() : json::parse(result_json);
    rec["wall_clock_seconds"] = wall_seconds;
    return rec.dump(2) + "\n";
}

std::string sweep_summary_json(const SweepOutput& sweep) {
    json r;
    r["verdict"] = hyst::to_string(sweep.result.verdict);
    json rows = json::array();
    for (const auto& e : sweep.result.entries) {
        rows.push_back({{"omega", e.omega},
                        {"area", e.metrics.area},
                        {"normalized_area", e.metrics.normalized_area},
                        {"width", e.metrics.width},
                        {"height", e.metrics.height},
                        {"closure_gap", e.metrics.closure_gap},
                        {"degenerate", e.metrics.degenerate}});
    }
    r["loops"] = std::move(rows);
    return r.dump();
}

std::string spectrum_summary_json(const SpectrumOutput& spectrum) {
    json r;
    r["max_real_part"] = spectrum.max_real_part;
    r["kernel_dimension"] = spectrum.kernel_dimension;
    double worst = 0.0;
    for (const auto& m : spectrum.matches) worst = std::max(worst, m.abs_error);
    r["max_abs_error"] = worst;
    return r.dump();
}

// =============================================================================
// Presets
// =============================================================================

std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("LLHYST_PRESET_DIR"); env && *env) return env;
    return LLHYST_PRESET_DIR_DEFAULT;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    auto dir = preset_dir();
    if (!std::filesystem::is_directory(dir)) return names;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".yaml") names.push_back(e.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::string preset_text(const std::string& name) {
    auto path = preset_dir() / (name + ".yaml");
    std::ifstream in(path);
    if (!in) throw SpecError("unknown preset '" + name + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace llhyst::exp
