#include "llhyst/core.hpp"

#include <algorithm>

namespace llhyst {

Vec3 basis(int channel) {
    if (channel < 1 || channel > 3) {
        throw PreconditionError("channel must be 1, 2 or 3, got " + std::to_string(channel));
    }
    Vec3 e;
    e[channel - 1] = 1.0;
    return e;
}

SpatialGrid::SpatialGrid(double length, std::size_t nodes)
    : length_(length), nodes_(nodes), spacing_(0.0) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw PreconditionError("grid length must be positive and finite");
    }
    if (nodes < 3) {
        throw PreconditionError("grid needs at least 3 nodes, got " + std::to_string(nodes));
    }
    spacing_ = length / static_cast<double>(nodes - 1);
}

std::size_t SpatialGrid::nearest_node(double x) const {
    if (!(x >= 0.0 && x <= length_)) {
        throw PreconditionError("probe location outside [0, L]");
    }
    // Round half down so ties resolve to the lower index.
    double r = x / spacing_;
    auto j = static_cast<std::size_t>(std::floor(r));
    if (r - static_cast<double>(j) > 0.5) ++j;
    return std::min(j, nodes_ - 1);
}

MagnetizationField::MagnetizationField(SpatialGrid grid, std::vector<Vec3> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.nodes()) {
        throw PreconditionError("field has " + std::to_string(values_.size()) + " values for " +
                                std::to_string(grid_.nodes()) + " nodes");
    }
    for (const auto& v : values_) {
        if (!is_finite(v)) throw PreconditionError("field contains non-finite values");
    }
}

MagnetizationField MagnetizationField::uniform(const SpatialGrid& grid, const Vec3& value) {
    return MagnetizationField(grid, std::vector<Vec3>(grid.nodes(), value));
}

double MagnetizationField::max_norm_deviation() const {
    double dev = 0.0;
    for (const auto& v : values_) dev = std::max(dev, std::abs(norm(v) - 1.0));
    return dev;
}

MagnetizationField MagnetizationField::normalized() const {
    std::vector<Vec3> out(values_);
    for (auto& v : out) {
        double n = norm(v);
        if (n == 0.0) throw PreconditionError("cannot normalize a zero vector");
        v *= 1.0 / n;
    }
    return MagnetizationField(grid_, std::move(out));
}

double MagnetizationField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) {
        m = std::max({m, std::abs(v.x1), std::abs(v.x2), std::abs(v.x3)});
    }
    return m;
}

void HarmonicInput::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw PreconditionError("input frequency must be positive and finite");
    }
    if (!std::isfinite(amplitude)) throw PreconditionError("input amplitude must be finite");
    if (channel && (*channel < 1 || *channel > 3)) {
        throw PreconditionError("input channel must be 1, 2 or 3");
    }
}

double HarmonicInput::operator()(double t) const {
    double phase = omega * t;
    return amplitude * (shape == Waveform::Sine ? std::sin(phase) : std::cos(phase));
}

Vec3 HarmonicInput::vector_at(double t) const {
    if (!channel) throw PreconditionError("vector input needs a channel");
    return (*this)(t) * basis(*channel);
}

double evaluate_input(const HarmonicInput& sig, double t) { return sig(t); }

Trajectory::Trajectory(std::vector<double> times, std::vector<double> samples,
                       std::vector<double> inputs)
    : times_(std::move(times)), samples_(std::move(samples)), inputs_(std::move(inputs)) {
    if (times_.size() != samples_.size() || times_.size() != inputs_.size()) {
        throw PreconditionError("trajectory arrays differ in length");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw PreconditionError("trajectory times must be strictly increasing");
        }
    }
}

StepPlan plan_periodic(double period, std::size_t periods, double dt_max,
                       std::size_t samples_per_period) {
    if (!(period > 0.0) || !(dt_max > 0.0) || samples_per_period == 0 || periods == 0) {
        throw PreconditionError("invalid step plan request");
    }
    double blocks = std::ceil(period / (dt_max * static_cast<double>(samples_per_period)));
    auto stride = static_cast<std::size_t>(std::max(1.0, blocks));
    std::size_t per_period = stride * samples_per_period;
    return {period / static_cast<double>(per_period), per_period * periods, stride};
}

StepPlan plan_fixed(double dt, double t_end, double period, std::size_t samples_per_period) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw PreconditionError("invalid step plan request");
    auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    std::size_t stride = 1;
    if (period > 0.0 && samples_per_period > 0) {
        stride = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(period / dt / static_cast<double>(samples_per_period))));
    }
    return {dt, steps, stride};
}

}  // namespace llhyst
