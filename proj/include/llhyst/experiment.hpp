// Declarative experiments: YAML specs, the runners behind the CLI
// subcommands, CSV/SVG writers and the run record sidecar.
#pragma once

#include "llhyst/core.hpp"
#include "llhyst/hysteresis.hpp"
#include "llhyst/lllin.hpp"
#include "llhyst/llpde.hpp"
#include "llhyst/odebench.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace llhyst::exp {

/// Malformed or inconsistent experiment spec.
class SpecError : public Error {
public:
    using Error::Error;
};

struct InputSpec {
    double amplitude = 1.0;
    Waveform shape = Waveform::Sine;
    int channel = 1;
};

enum class ProfileKind { Uniform, GreatCircle, Tilted };

std::string to_string(ProfileKind kind);

struct InitialSpec {
    // ODE systems
    double y0 = 0.0;
    double y1 = 0.0;
    // PDE systems
    ProfileKind profile = ProfileKind::Uniform;
    Vec3 m0{1.0, 0.0, 0.0};
    double theta0 = 0.0;
    int mode = 1;
    double eps = 0.0;
};

struct IntegratorSpec {
    /// Fixed step; empty means the automatic policy.
    std::optional<double> dt;
    std::size_t periods = 3;
    std::size_t discard_periods = 2;
    std::size_t samples_per_period = 2000;
    ll::ConstraintMode constraint = ll::ConstraintMode::Project;
    ll::RhsForm rhs_form = ll::RhsForm::CrossProduct;
};

struct OutputSpec {
    bool trajectory = true;
    bool loops = true;
    bool plot = false;
    bool record = true;
};

struct ExperimentSpec {
    std::string name = "experiment";
    hyst::SystemKind system = hyst::SystemKind::LinearSpring;
    ode::SecondOrderParams ode;
    ll::LLParams ll;
    Vec3 a{1.0, 0.0, 0.0};
    InputSpec input;
    InitialSpec initial;
    std::vector<double> sweep{1.0};
    ll::ProbeSpec probe;
    IntegratorSpec integrator;
    std::size_t max_mode = 5;
    OutputSpec outputs;

    bool is_pde() const {
        return system == hyst::SystemKind::LLNonlinear || system == hyst::SystemKind::LLLinear;
    }
    /// Throws SpecError on inconsistent values.
    void validate() const;
};

/// Parses a YAML document. Missing keys take the defaults above; unknown
/// keys are rejected. Throws SpecError.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Fully explicit YAML: every field is written.
std::string serialize_spec(const ExperimentSpec& spec);

// =============================================================================
// Runners
// =============================================================================

struct RunDiagnostics {
    double omega = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t stride = 1;
    std::optional<double> stability_bound;
    std::optional<ll::DriftReport> drift;
    std::optional<ll::ResolvedProbe> probe;
};

struct SimulationOutput {
    Trajectory trajectory;
    RunDiagnostics diagnostics;
};

/// One forced run of the spec's system at frequency omega.
SimulationOutput simulate_at(const ExperimentSpec& spec, double omega);

/// simulate_at for the single sweep frequency. Throws SpecError unless the
/// sweep holds exactly one value.
SimulationOutput run_simulate(const ExperimentSpec& spec);

struct SweepOutput {
    hyst::SweepResult result;
    std::vector<RunDiagnostics> diagnostics;
};

SweepOutput run_sweep(const ExperimentSpec& spec, std::size_t jobs = 1);

struct SpectrumOutput {
    std::vector<lin::ModeMatch> matches;
    double max_real_part = 0.0;
    std::size_t kernel_dimension = 0;
};

/// Analytic versus numeric eigenvalues of the linearized operator for modes
/// 0..max_mode. Requires the ll-linear system.
SpectrumOutput run_spectrum(const ExperimentSpec& spec);

struct VerifyOptions {
    /// Multiplies nu in the analytic eigenvalue formula only.
    double analytic_nu_scale = 1.0;
    /// dt used for the stability-guard check, in units of the bound.
    double guard_dt_factor = 2.0;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

void print_verify_table(std::ostream& os, const std::vector<CheckResult>& checks);

// =============================================================================
// Output
// =============================================================================

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_sweep_csv(std::ostream& os, const hyst::SweepResult& sweep);
/// One row per analytic eigenvalue; the mode column repeats.
void write_spectrum_csv(std::ostream& os, const SpectrumOutput& spectrum);

/// Standalone SVG of one loop with u and y axes and a caption.
std::string loop_svg(const hyst::IOCurve& curve, const std::string& caption);

/// JSON sidecar describing a run. `result` carries the command specific
/// part (metrics, verdict, spectrum summary).
std::string run_record(const ExperimentSpec& spec, const std::string& command,
                       const std::vector<RunDiagnostics>& diagnostics, const std::string& result_json,
                       double wall_seconds);

/// Command specific result blocks for run_record.
std::string sweep_summary_json(const SweepOutput& sweep);
std::string spectrum_summary_json(const SpectrumOutput& spectrum);

/// Library version string.
std::string version();

// =============================================================================
// Presets
// =============================================================================

/// Directory holding the preset YAML files: $LLHYST_PRESET_DIR if set,
/// otherwise the install-time default.
std::filesystem::path preset_dir();

/// Sorted preset names (file stems).
std::vector<std::string> preset_names();

/// Text of a preset file. Throws SpecError for unknown names.
std::string preset_text(const std::string& name);

}  // namespace llhyst::exp
