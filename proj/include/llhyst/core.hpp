// Shared numeric types: 3-vectors, 1-D grids, magnetization fields,
// harmonic inputs and sampled trajectories.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace llhyst {

// =============================================================================
// Errors
// =============================================================================

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A field that should lie on the unit sphere does not.
class ConstraintViolation : public Error {
public:
    using Error::Error;
};

/// Requested step size exceeds an explicit-scheme stability bound.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double dt, double bound)
        : Error(what), dt_(dt), bound_(bound) {}
    double dt() const noexcept { return dt_; }
    double bound() const noexcept { return bound_; }

private:
    double dt_;
    double bound_;
};

/// Integration produced a non-finite state.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, double time)
        : Error(what + " (t=" + std::to_string(time) + ")"), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// =============================================================================
// Vec3
// =============================================================================

struct Vec3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
    constexpr double& operator[](int i) { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

    constexpr Vec3& operator+=(const Vec3& o) {
        x1 += o.x1; x2 += o.x2; x3 += o.x3;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        x1 -= o.x1; x2 -= o.x2; x3 -= o.x3;
        return *this;
    }
    constexpr Vec3& operator*=(double s) {
        x1 *= s; x2 *= s; x3 *= s;
        return *this;
    }

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x1, -a.x2, -a.x3}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

/// Right-handed cross product, written out component by component.
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.x2 * b.x3 - a.x3 * b.x2,
            -a.x1 * b.x3 + a.x3 * b.x1,
            a.x1 * b.x2 - a.x2 * b.x1};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(const Vec3& a) {
    return std::isfinite(a.x1) && std::isfinite(a.x2) && std::isfinite(a.x3);
}

/// Unit basis vector for a 1-based channel index.
Vec3 basis(int channel);

// =============================================================================
// Spatial grid and fields
// =============================================================================

/// Uniform grid on [0, L] with nodes at x_j = j*h, h = L/(n-1).
class SpatialGrid {
public:
    SpatialGrid(double length, std::size_t nodes);

    double length() const noexcept { return length_; }
    std::size_t nodes() const noexcept { return nodes_; }
    double spacing() const noexcept { return spacing_; }
    double node(std::size_t j) const noexcept { return static_cast<double>(j) * spacing_; }

    /// Index of the node closest to x (ties go to the lower index).
    std::size_t nearest_node(double x) const;

    friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

private:
    double length_;
    std::size_t nodes_;
    double spacing_;
};

/// Default tolerance for accepting a field as lying on the unit sphere.
inline constexpr double kNormTolerance = 1e-9;

/// Vec3 samples on a SpatialGrid. Immutable once built.
class MagnetizationField {
public:
    MagnetizationField(SpatialGrid grid, std::vector<Vec3> values);

    static MagnetizationField uniform(const SpatialGrid& grid, const Vec3& value);

    template <typename F>
    static MagnetizationField sample(const SpatialGrid& grid, F&& profile) {
        std::vector<Vec3> v(grid.nodes());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = profile(grid.node(j));
        return MagnetizationField(grid, std::move(v));
    }

    const SpatialGrid& grid() const noexcept { return grid_; }
    std::span<const Vec3> values() const noexcept { return values_; }
    const Vec3& operator[](std::size_t j) const { return values_[j]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Largest |‖m_j‖ - 1| over all nodes.
    double max_norm_deviation() const;
    bool on_constraint(double tol = kNormTolerance) const { return max_norm_deviation() <= tol; }

    /// Same field with every node scaled to unit length.
    MagnetizationField normalized() const;

    /// Max-norm over nodes and components.
    double max_abs() const;

private:
    SpatialGrid grid_;
    std::vector<Vec3> values_;
};

// =============================================================================
// Inputs and trajectories
// =============================================================================

enum class Waveform { Sine, Cosine };

/// amplitude * sin(omega t) or amplitude * cos(omega t), optionally routed to
/// one component (1..3) of a vector system.
struct HarmonicInput {
    double amplitude = 1.0;
    double omega = 1.0;
    Waveform shape = Waveform::Sine;
    std::optional<int> channel;

    /// Throws PreconditionError when omega <= 0, amplitude is non-finite or
    /// the channel is outside 1..3.
    void validate() const;

    double period() const { return 2.0 * std::numbers::pi / omega; }
    double operator()(double t) const;
    /// Vector-valued form; requires a channel.
    Vec3 vector_at(double t) const;
};

double evaluate_input(const HarmonicInput& sig, double t);

/// Probe samples against time together with the scalar input driving them.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<double> samples, std::vector<double> inputs);

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> samples() const noexcept { return samples_; }
    std::span<const double> inputs() const noexcept { return inputs_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    double duration() const { return empty() ? 0.0 : times_.back() - times_.front(); }

private:
    std::vector<double> times_;
    std::vector<double> samples_;
    std::vector<double> inputs_;
};

/// Step plan for a fixed-step run that lands exactly on period boundaries.
struct StepPlan {
    double dt = 0.0;
    std::size_t steps = 0;   ///< total steps
    std::size_t stride = 1;  ///< record every `stride` steps
};

/// Chooses dt <= dt_max with an integer number of steps per period that is a
/// multiple of samples_per_period, so recorded samples hit t = k*T exactly.
StepPlan plan_periodic(double period, std::size_t periods, double dt_max, std::size_t samples_per_period);

/// Plan for a caller-fixed dt: steps = ceil(t_end/dt), stride chosen to give
/// roughly samples_per_period samples each period (at least 1).
StepPlan plan_fixed(double dt, double t_end, double period, std::size_t samples_per_period);

}  // namespace llhyst
