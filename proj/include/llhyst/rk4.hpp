// Classical fixed-step fourth-order Runge-Kutta over a flat state array.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace llhyst {

/// Owns the stage buffers for repeated RK4 steps on a state of fixed size.
/// T is double or Vec3; anything closed under + and scalar * works.
template <typename T>
class Rk4 {
public:
    explicit Rk4(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    /// Advances y from t to t+dt. `rhs(t, y, dydt)` fills dydt.
    template <typename Rhs>
    void step(std::span<T> y, double t, double dt, Rhs&& rhs) {
        const std::size_t n = y.size();
        const double half = 0.5 * dt;

        rhs(t, std::span<const T>(y), std::span<T>(k1_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k1_[i];
        rhs(t + half, std::span<const T>(tmp_), std::span<T>(k2_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k2_[i];
        rhs(t + half, std::span<const T>(tmp_), std::span<T>(k3_));
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
        rhs(t + dt, std::span<const T>(tmp_), std::span<T>(k4_));

        const double sixth = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    std::vector<T> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace llhyst
