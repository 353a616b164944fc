// llhyst command-line experiment runner.
#include "llhyst/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace llhyst;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kSpecError = 2, kRuntimeError = 3 };

struct Common {
    std::string out = ".";
    std::size_t jobs = 1;
    bool plot = false;
    std::optional<double> dt;
    std::optional<std::size_t> discard;
};

// A path to a YAML file, or the name of a preset.
exp::ExperimentSpec resolve_spec(const std::string& arg, const Common& c) {
    const bool looks_like_path = arg.find('/') != std::string::npos || fs::path(arg).has_extension();
    exp::ExperimentSpec spec = fs::is_regular_file(arg) || looks_like_path ? exp::load_spec(arg)
                                                                           : exp::parse_spec(exp::preset_text(arg));
    if (c.dt) spec.integrator.dt = *c.dt;
    if (c.discard) {
        spec.integrator.discard_periods = *c.discard;
        spec.integrator.periods = std::max(spec.integrator.periods, *c.discard + 1);
    }
    if (c.plot) spec.outputs.plot = true;
    spec.validate();
    return spec;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::string plot_name(const std::string& name, double omega) {
    return name + "_w" + exp::format_number(omega) + ".svg";
}

std::string caption(const exp::ExperimentSpec& spec, double omega) {
    return spec.name + ": " + hyst::to_string(spec.system) + ", w = " + exp::format_number(omega);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const std::string& arg, const Common& c) {
    auto spec = resolve_spec(arg, c);
    auto t0 = std::chrono::steady_clock::now();
    exp::SimulationOutput sim;
    try {
        sim = exp::run_simulate(spec);
    } catch (const exp::SpecError&) {
        throw;
    } catch (const StabilityError&) {
        throw;
    } catch (const PreconditionError&) {
        throw;
    } catch (const std::exception& e) {
        std::cerr << "simulate failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    double wall = seconds_since(t0);
    auto dir = prepare_out(c.out);
    std::ostringstream csv;
    exp::write_trajectory_csv(csv, sim.trajectory);
    write_file(dir / (spec.name + "_trajectory.csv"), csv.str());
    if (spec.outputs.plot) {
        try {
            auto curve = hyst::extract_cycle(sim.trajectory, sim.diagnostics.omega, spec.integrator.discard_periods);
            write_file(dir / plot_name(spec.name, sim.diagnostics.omega),
                       exp::loop_svg(curve, caption(spec, sim.diagnostics.omega)));
        } catch (const PreconditionError& e) {
            std::cerr << "plot skipped: " << e.what() << "\n";
        }
    }
    if (spec.outputs.record) {
        write_file(dir / (spec.name + "_simulate.run.json"),
                   exp::run_record(spec, "simulate", {sim.diagnostics}, "", wall));
    }
    std::cout << "wrote " << (dir / (spec.name + "_trajectory.csv")).string() << " (" << sim.trajectory.size()
              << " samples)\n";
    return kOk;
}

int cmd_sweep(const std::string& arg, const Common& c) {
    auto spec = resolve_spec(arg, c);
    auto t0 = std::chrono::steady_clock::now();
    exp::SweepOutput out;
    try {
        out = exp::run_sweep(spec, c.jobs);
    } catch (const exp::SpecError&) {
        throw;
    } catch (const hyst::SweepError& e) {
        std::cerr << "sweep failed " << e.what() << "\n";
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    double wall = seconds_since(t0);
    auto dir = prepare_out(c.out);
    std::ostringstream csv;
    exp::write_sweep_csv(csv, out.result);
    write_file(dir / (spec.name + "_loops.csv"), csv.str());
    if (spec.outputs.plot) {
        for (const auto& e : out.result.entries) {
            write_file(dir / plot_name(spec.name, e.omega), exp::loop_svg(e.curve, caption(spec, e.omega)));
        }
    }
    if (spec.outputs.record) {
        write_file(dir / (spec.name + "_sweep.run.json"),
                   exp::run_record(spec, "sweep", out.diagnostics, exp::sweep_summary_json(out), wall));
    }
    std::cout << "verdict: " << hyst::to_string(out.result.verdict) << "\n";
    return kOk;
}

int cmd_spectrum(const std::string& arg, const Common& c) {
    auto spec = resolve_spec(arg, c);
    auto t0 = std::chrono::steady_clock::now();
    exp::SpectrumOutput out;
    try {
        out = exp::run_spectrum(spec);
    } catch (const exp::SpecError&) {
        throw;
    } catch (const std::exception& e) {
        std::cerr << "spectrum failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    double wall = seconds_since(t0);
    auto dir = prepare_out(c.out);
    std::ostringstream csv;
    exp::write_spectrum_csv(csv, out);
    write_file(dir / (spec.name + "_spectrum.csv"), csv.str());
    if (spec.outputs.record) {
        write_file(dir / (spec.name + "_spectrum.run.json"),
                   exp::run_record(spec, "spectrum", {}, exp::spectrum_summary_json(out), wall));
    }
    std::cout << "max real part " << exp::format_number(out.max_real_part) << ", kernel dimension "
              << out.kernel_dimension << "\n";
    return kOk;
}

int cmd_verify(const exp::VerifyOptions& opts) {
    auto checks = exp::run_verify(opts);
    exp::print_verify_table(std::cout, checks);
    bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    for (const auto& c : checks) {
        if (!c.passed) std::cerr << "failed check: " << c.name << "\n";
    }
    return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hysteresis experiments for Landau-Lifshitz and spring systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", exp::version());

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Output directory")->capture_default_str();
        sub->add_option("--jobs", common.jobs, "Parallel sweep workers")->check(CLI::PositiveNumber);
        sub->add_flag("--plot", common.plot, "Write SVG loop plots");
        sub->add_option("--dt", common.dt, "Fixed time step override")->check(CLI::PositiveNumber);
        sub->add_option("--discard-periods", common.discard, "Periods dropped before the analysed one");
    };

    std::string spec_arg;
    auto* sim = app.add_subcommand("simulate", "Run one frequency and write t,u,y");
    sim->add_option("spec", spec_arg, "Spec file or preset name")->required();
    add_common(sim);

    auto* swp = app.add_subcommand("sweep", "Frequency sweep with loop metrics and verdict");
    swp->add_option("spec", spec_arg, "Spec file or preset name")->required();
    add_common(swp);

    auto* spc = app.add_subcommand("spectrum", "Analytic versus numeric spectrum of the linearized operator");
    spc->add_option("spec", spec_arg, "Spec file or preset name")->required();
    add_common(spc);

    exp::VerifyOptions vopts;
    auto* ver = app.add_subcommand("verify", "Run the oracle checks");
    ver->add_option("--analytic-nu-scale", vopts.analytic_nu_scale, "Scale nu in the analytic eigenvalues");
    ver->add_option("--guard-dt-factor", vopts.guard_dt_factor, "dt of the guard check over the bound");

    auto* pre = app.add_subcommand("preset", "Bundled experiment presets");
    pre->require_subcommand(1);
    auto* pre_list = pre->add_subcommand("list", "List preset names");
    std::string preset_name;
    auto* pre_show = pre->add_subcommand("show", "Print the fully expanded preset");
    pre_show->add_option("name", preset_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kSpecError;
    }

    try {
        if (*sim) return cmd_simulate(spec_arg, common);
        if (*swp) return cmd_sweep(spec_arg, common);
        if (*spc) return cmd_spectrum(spec_arg, common);
        if (*ver) return cmd_verify(vopts);
        if (*pre_list) {
            for (const auto& n : exp::preset_names()) std::cout << n << "\n";
            return kOk;
        }
        if (*pre_show) {
            std::cout << exp::serialize_spec(exp::parse_spec(exp::preset_text(preset_name)));
            return kOk;
        }
    } catch (const exp::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kSpecError;
    } catch (const StabilityError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kSpecError;
    } catch (const PreconditionError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kSpecError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}
