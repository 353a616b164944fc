// One-dimensional Landau-Lifshitz equation on [0, L] with homogeneous Neumann
// ends, discretized by the method of lines:
//
//   dm/dt = m x m_xx - nu m x (m x m_xx) + u(t)
//
// Second-order central differences with mirror ghost nodes; time stepping by
// RK4 followed (optionally) by per-node renormalization onto |m| = 1.
#pragma once

#include "llhyst/core.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace llhyst::ll {

struct LLParams {
    double nu = 0.02;
    SpatialGrid grid{1.0, 41};

    void validate() const;
};

struct ProbeSpec {
    double x = 0.6;
    int channel = 1;
};

/// A probe snapped to its nearest grid node.
struct ResolvedProbe {
    std::size_t node = 0;
    int channel = 1;
    double x_requested = 0.0;
    double x_node = 0.0;
    double snap_distance = 0.0;
};

ResolvedProbe resolve(const ProbeSpec& probe, const SpatialGrid& grid);

/// Per-node second difference with mirror ghosts f_{-1} = f_1, f_n = f_{n-2}.
MagnetizationField laplacian_neumann(const MagnetizationField& f);

/// Per-node first difference: central inside, one-sided second order at the
/// two ends.
MagnetizationField gradient(const MagnetizationField& f);

/// Tolerance on |‖m_j‖ - 1| accepted by the right-hand sides.
inline constexpr double kLooseNormTolerance = 1e-6;

/// m x m_xx - nu m x (m x m_xx) + u at every node. Throws ConstraintViolation
/// when f is off the unit sphere by more than kLooseNormTolerance.
MagnetizationField ll_rhs(const MagnetizationField& f, const LLParams& p, const Vec3& u);

/// nu m_xx + m x m_xx + nu |m_x|^2 m + u at every node.
MagnetizationField ll_rhs_semilinear(const MagnetizationField& f, const LLParams& p, const Vec3& u);

/// Max-norm difference between the two unforced right-hand sides.
double semilinear_residual(const MagnetizationField& f, const LLParams& p);

// Raw kernels used by the integrators (no validation, no allocation).
namespace kernel {
void laplacian(std::span<const Vec3> f, double inv_h2, std::span<Vec3> out);
void cross_form(std::span<const Vec3> m, double nu, double inv_h2, std::span<Vec3> out);
void semilinear_form(std::span<const Vec3> m, double nu, double h, std::span<Vec3> out);
}  // namespace kernel

enum class RhsForm { CrossProduct, Semilinear };

/// How the unit-norm constraint is treated while integrating.
///   Project: the applied field enters through its component tangent to m,
///            and every node is renormalized after each RK4 step.
///   ProjectRaw: u is added unchanged and every node is renormalized after
///            each RK4 step.
///   Free:    the forced equation is integrated as written, u added to every
///            node unchanged, no renormalization; |m| drifts with the input.
enum class ConstraintMode { Project, ProjectRaw, Free };

std::string to_string(RhsForm form);
std::string to_string(ConstraintMode mode);

struct LLOptions {
    RhsForm form = RhsForm::CrossProduct;
    ConstraintMode constraint = ConstraintMode::Project;
    /// Keep a full-field snapshot every this many steps (0 = none).
    std::size_t snapshot_stride = 0;
};

struct DriftReport {
    /// Largest per-step |‖m_j‖ - 1| right before renormalization (Project*) or
    /// over the whole run (Free).
    double max_pre_projection = 0.0;
    /// Largest |‖m_j‖ - 1| of any recorded state.
    double max_post_projection = 0.0;
};

struct LLRun {
    Trajectory trajectory;
    DriftReport drift;
    ResolvedProbe probe;
    MagnetizationField final_state;
    std::vector<double> snapshot_times;
    std::vector<MagnetizationField> snapshots;
};

/// Explicit-step bound h^2 / (4 nu + 2).
double stability_bound(const LLParams& p);

/// min(stability_bound, T/1000) for a forcing period T (bound alone if none).
double default_dt(const LLParams& p, std::optional<double> period);

/// Runs the plan. The input, when present, needs a channel. Throws
/// StabilityError when plan.dt exceeds stability_bound, SimulationError on a
/// non-finite field.
LLRun integrate_ll(const MagnetizationField& f0, const LLParams& p,
                   const std::optional<HarmonicInput>& input, const StepPlan& plan,
                   const ProbeSpec& probe, const LLOptions& opts = {});

/// Convenience form: fixed dt up to t_end, recording every `stride` steps.
LLRun integrate_ll(const MagnetizationField& f0, const LLParams& p,
                   const std::optional<HarmonicInput>& input, double t_end, double dt,
                   const ProbeSpec& probe, const LLOptions& opts = {}, std::size_t stride = 1);

/// Great-circle profile (cos theta(x), sin theta(x), 0) with
/// theta(x) = theta0 cos(mode pi x / L); exactly unit length, zero slope at
/// both ends.
MagnetizationField great_circle_profile(const SpatialGrid& grid, double theta0, int mode = 1);

/// (1, eps cos(pi x/L), eps cos(2 pi x/L) / 2) renormalized per node.
MagnetizationField tilted_profile(const SpatialGrid& grid, double eps);

}  // namespace llhyst::ll
