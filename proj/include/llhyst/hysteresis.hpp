// Input-output loop analysis: cycle extraction, loop metrics, frequency
// sweeps with a persistence verdict, rate-independence distance, and the
// equilibrium census of the built-in systems.
#pragma once

#include "llhyst/core.hpp"
#include "llhyst/llpde.hpp"
#include "llhyst/odebench.hpp"

#include <functional>
#include <string>
#include <vector>

namespace llhyst::hyst {

struct IOPoint {
    double u = 0.0;
    double y = 0.0;
};

/// One input period of (u, y) samples, both ends included.
struct IOCurve {
    std::vector<IOPoint> points;
    double omega = 0.0;
    double closure_gap = 0.0;
    /// Zero width or zero height: the curve has empty interior.
    bool degenerate = false;
};

/// Minimum samples an extracted period must carry.
inline constexpr std::size_t kMinCyclePoints = 100;

/// The last full period [t_end - T, t_end] of a trajectory that spans at
/// least discard_periods + 1 periods. Throws PreconditionError otherwise or
/// when the period holds fewer than kMinCyclePoints samples.
IOCurve extract_cycle(const Trajectory& traj, double omega, std::size_t discard_periods);

/// Signed shoelace area of the polygon closed by joining the last point to
/// the first: -1/2 sum (u_{i+1} - u_i)(y_{i+1} + y_i). Positive for
/// counterclockwise traversal in the (u, y) plane.
double loop_area(const IOCurve& curve);

struct LoopMetrics {
    double area = 0.0;
    double width = 0.0;
    double height = 0.0;
    double normalized_area = 0.0;
    double closure_gap = 0.0;
    bool degenerate = false;
};

LoopMetrics loop_metrics(const IOCurve& curve);

enum class Verdict { LoopPersists, LoopVanishes, Inconclusive };

std::string to_string(Verdict v);

struct SweepOptions {
    double persistence_threshold = 0.05;
    double vanish_threshold = 0.01;
    /// Persistence also needs |area(w_min)| >= vanish_ratio * |area(w_max)|.
    double vanish_ratio = 0.1;
    std::size_t discard_periods = 2;
    /// Worker threads for the per-frequency runs.
    std::size_t jobs = 1;
};

struct SweepEntry {
    double omega = 0.0;
    LoopMetrics metrics;
    IOCurve curve;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    Verdict verdict = Verdict::Inconclusive;
};

/// Simulation failure at one sweep frequency.
class SweepError : public Error {
public:
    SweepError(double omega, const std::string& what)
        : Error("at omega=" + std::to_string(omega) + ": " + what), omega_(omega) {}
    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

/// Produces the trajectory of a system forced at frequency omega.
using SystemRunner = std::function<Trajectory(double omega)>;

/// Verdict from per-frequency entries ordered by decreasing omega:
///   persists  if normalized_area(w_min) >= persistence_threshold and
///             |area(w_min)| >= vanish_ratio * |area(w_max)|;
///   vanishes  if normalized_area strictly decreases along the sweep and
///             normalized_area(w_min) < vanish_threshold;
///   otherwise inconclusive.
Verdict classify(const std::vector<SweepEntry>& entries, const SweepOptions& opts);

/// Runs every omega (strictly decreasing, at least three), extracts the last
/// period and classifies. Errors from the runner come back as SweepError.
SweepResult sweep(const SystemRunner& run, const std::vector<double>& omegas, const SweepOptions& opts = {});

/// Symmetric Hausdorff distance between two curves, each taken as the
/// polyline through its samples, divided by the larger loop height.
double rate_independence(const IOCurve& a, const IOCurve& b);

/// Plain symmetric Hausdorff distance between the two sample sets.
double hausdorff_points(const IOCurve& a, const IOCurve& b);

// =============================================================================
// Equilibrium census
// =============================================================================

enum class SystemKind { LinearSpring, NonlinearSpring, IntegratorChain, LLNonlinear, LLLinear };

std::string to_string(SystemKind kind);
/// Inverse of to_string; throws PreconditionError for unknown names.
SystemKind parse_system_kind(const std::string& name);

struct SystemDescriptor {
    SystemKind kind = SystemKind::LinearSpring;
    ode::SecondOrderParams ode;
    ll::LLParams ll;
};

struct Census {
    ode::EquilibriumKind count = ode::EquilibriumKind::Single;
    /// Number of stable isolated equilibria (0 for a continuum).
    std::size_t stable_points = 0;
    /// Every member of the equilibrium continuum is stable.
    bool continuum_stable = false;
    /// More than one stable equilibrium (a stable continuum counts).
    bool multiple_stable = false;
    std::vector<std::string> notes;
};

Census equilibrium_census(const SystemDescriptor& system);

}  // namespace llhyst::hyst
