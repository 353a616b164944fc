#include "llhyst/odebench.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace llhyst;
using namespace llhyst::ode;
using Catch::Approx;

namespace {

// Residual of y'' + c y' + k y - sin(w t) by central differences.
template <typename Y>
double ode_residual(Y&& y, double c, double k, double w, double t) {
    const double h = 1e-3;
    double yp = (y(t + h) - y(t - h)) / (2 * h);
    double ypp = (y(t + h) - 2 * y(t) + y(t - h)) / (h * h);
    return ypp + c * yp + k * y(t) - std::sin(w * t);
}

double max_error(const Trajectory& traj, double c, double k, double w, double y0, double y1) {
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double t = traj.times()[i];
        double exact = k == 0.0 ? closed_form_k0(c, w, y0, y1, t) : closed_form_linear(c, k, w, y0, y1, t);
        err = std::max(err, std::abs(traj.samples()[i] - exact));
    }
    return err;
}

}  // namespace

TEST_CASE("rhs examples", "[odebench]") {
    CHECK(rhs({15, 1, false}, {0, 0}, 0.0) == SecondOrderState{0, 0});
    CHECK(rhs({15, -1, true}, {1, 0}, 0.0) == SecondOrderState{0, 0});
    CHECK(rhs({15, -1, true}, {-1, 0}, 0.0) == SecondOrderState{0, 0});
    for (double a : {-3.0, 0.0, 0.25, 7.0}) CHECK(rhs({15, 0, false}, {a, 0}, 0.0) == SecondOrderState{0, 0});
    auto d = rhs({2, 3, false}, {1, 4}, 5);
    CHECK(d.y == 4.0);
    CHECK(d.ydot == -2.0 * 4 - 3.0 * 1 + 5);
    auto e = rhs({2, 3, true}, {2, 0}, 0);
    CHECK(e.ydot == -3.0 * (2 - 8));
}

TEST_CASE("closed forms satisfy the differential equation", "[odebench][oracle]") {
    for (auto [c, k] : {std::pair{15.0, 1.0}, {15.0, 0.0}, {3.0, 2.0}, {0.5, 4.0}}) {
        for (double w : {1.0, 0.1, 2.5}) {
            double y0 = 0.3, y1 = -0.7;
            auto y = [&](double t) {
                return k == 0.0 ? closed_form_k0(c, w, y0, y1, t) : closed_form_linear(c, k, w, y0, y1, t);
            };
            CHECK(y(0.0) == Approx(y0).margin(1e-12));
            CHECK((y(1e-6) - y(-1e-6)) / 2e-6 == Approx(y1).margin(1e-6));
            for (double t : {0.5, 1.7, 4.0, 11.3}) {
                CHECK(std::abs(ode_residual(y, c, k, w, t)) < 1e-4);
            }
        }
    }
}

TEST_CASE("closed form examples", "[odebench]") {
    CHECK(closed_form_linear(15, 1, 1, 0, 0, 0) == Approx(0).margin(1e-14));
    CHECK(closed_form_k0(15, 1, 0, 0, 0) == Approx(0).margin(1e-14));
    // Steady state of the linear spring vanishes as w -> 0 and t -> oo.
    CHECK(std::abs(closed_form_linear(15, 1, 1e-6, 0.4, 0.2, 1000.0)) < 1e-3);
    // k = 0: the limit is y0 + y1 / c.
    double limit = closed_form_k0(15, 1e-9, 1.0, 2.0, 100.0);
    CHECK(limit == Approx(1.0 + 2.0 / 15.0).margin(1e-6));
    CHECK_THROWS_AS(closed_form_linear(4, 4, 1, 0, 0, 1), PreconditionError);
}

TEST_CASE("closed form agrees with fine-step integration", "[odebench][oracle]") {
    HarmonicInput in{1.0, 1.0, Waveform::Sine, std::nullopt};
    auto traj = integrate({15, 1, false}, in, {0, 0}, 5.0, 1e-4, 50000);
    CHECK(traj.times().back() == Approx(5.0));
    CHECK(std::abs(traj.samples().back() - closed_form_linear(15, 1, 1, 0, 0, 5.0)) < 1e-8);

    HarmonicInput slow{1.0, 0.1, Waveform::Sine, std::nullopt};
    auto t2 = integrate({15, 0, false}, slow, {1, 2}, 3.0, 1e-5, 300000);
    CHECK(std::abs(t2.samples().back() - closed_form_k0(15, 0.1, 1, 2, 3.0)) < 1e-7);
}

TEST_CASE("integrator error scales as dt^4", "[odebench][property]") {
    for (auto [k, w] : {std::pair{1.0, 1.0}, {1.0, 0.1}, {0.0, 1.0}, {0.0, 0.1}}) {
        HarmonicInput in{1.0, w, Waveform::Sine, std::nullopt};
        StepPlan plan = plan_periodic(in.period(), 3, 0.01, 2000);
        double e1 = max_error(integrate({15, k, false}, in, {0, 0}, plan), 15, k, w, 0, 0);
        plan.dt /= 2;
        plan.steps *= 2;
        plan.stride *= 2;
        double e2 = max_error(integrate({15, k, false}, in, {0, 0}, plan), 15, k, w, 0, 0);
        CHECK(e1 <= 1e-6);
        CHECK(e1 / e2 >= 8.0);
        CHECK(e1 / e2 <= 32.0);
    }
}

TEST_CASE("integrate examples", "[odebench]") {
    auto rest = integrate({15, 1, false}, std::nullopt, {0, 0}, 50.0, 0.01, 10);
    for (double y : rest.samples()) CHECK(y == 0.0);

    auto k0 = integrate({15, 0, false}, std::nullopt, {0.3, 0.6}, 5.0, 0.001, 100);
    CHECK(k0.samples().back() == Approx(0.3 + 0.6 / 15.0).margin(1e-12));
    for (std::size_t i = 0; i < k0.size(); ++i) {
        double t = k0.times()[i];
        CHECK(k0.samples()[i] == Approx(0.3 + 0.6 / 15.0 * (1 - std::exp(-15 * t))).margin(1e-9));
    }

    // Slowest rate near y = 1 is (-15 + sqrt(217)) / 2, about -0.134.
    auto basin = integrate({15, -1, true}, std::nullopt, {0.5, 0}, 200.0, 0.01, 1000);
    auto basin_half = integrate({15, -1, true}, std::nullopt, {0.5, 0}, 200.0, 0.005, 2000);
    CHECK(std::abs(basin.samples().back() - 1.0) < 1e-6);
    CHECK(std::abs(basin.samples().back() - basin_half.samples().back()) < 1e-9);
}

TEST_CASE("integrate preconditions and failures", "[odebench]") {
    HarmonicInput in{1.0, 1.0, Waveform::Sine, std::nullopt};
    CHECK_THROWS_AS(integrate({15, 1, false}, in, {0, 0}, 10.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(integrate({15, 1, false}, in, {0, 0}, 10.0, 0.0), PreconditionError);
    // Unstable explicit step on a stiff system blows up.
    CHECK_THROWS_AS(integrate({1000, 1, false}, std::nullopt, {1, 0}, 10.0, 0.01), SimulationError);
}

TEST_CASE("samples land on the stride and the last step", "[odebench]") {
    auto t = integrate({15, 1, false}, std::nullopt, {1, 0}, 1.0, 0.01, 30);
    CHECK(t.times()[1] == Approx(0.3));
    CHECK(t.times().back() == Approx(1.0));
    CHECK(t.size() == 5);
}

TEST_CASE("unforced linear spring decays", "[odebench][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-0.7, 0.7);
    for (int i = 0; i < 10; ++i) {
        SecondOrderState s0{d(rng), d(rng)};
        auto t = integrate({15, 1, false}, std::nullopt, s0, 400.0, 0.01, 20000);
        CHECK(std::abs(t.samples().back()) < 1e-6);
    }
}

TEST_CASE("equilibria", "[odebench]") {
    auto lin = equilibria({15, 1, false});
    CHECK(lin.kind == EquilibriumKind::Single);
    REQUIRE(lin.points.size() == 1);
    CHECK(lin.points[0] == SecondOrderState{0, 0});

    CHECK(equilibria({15, 0, false}).kind == EquilibriumKind::Continuum);

    auto cub = equilibria({15, -1, true});
    CHECK(cub.kind == EquilibriumKind::Finite);
    CHECK(cub.points.size() == 3);
    CHECK(to_string(EquilibriumKind::Single) == "one");
    CHECK(to_string(EquilibriumKind::Finite) == "finite-many");
    CHECK(to_string(EquilibriumKind::Continuum) == "continuum");
}

TEST_CASE("equilibria are rest points", "[odebench][property]") {
    for (SecondOrderParams p : {SecondOrderParams{15, 1, false}, {15, 0, false}, {15, -1, true}, {3, 2, true}}) {
        for (const auto& e : equilibria(p).points) CHECK(rhs(p, e, 0.0) == SecondOrderState{0, 0});
    }
}

TEST_CASE("linearized eigenvalues", "[odebench]") {
    auto k0 = linearized_eigenvalues({15, 0, false}, {0.4, 0});
    CHECK(std::max(k0[0].real(), k0[1].real()) == Approx(0).margin(1e-15));
    CHECK(std::min(k0[0].real(), k0[1].real()) == Approx(-15));

    auto k1 = linearized_eigenvalues({15, 1, false}, {0, 0});
    double r = std::sqrt(221.0);
    CHECK(std::max(k1[0].real(), k1[1].real()) == Approx((-15 + r) / 2));
    CHECK(std::min(k1[0].real(), k1[1].real()) == Approx((-15 - r) / 2));
    CHECK((-15 + r) / 2 == Approx(-0.06697).margin(1e-5));

    auto cub = linearized_eigenvalues({15, -1, true}, {1, 0});
    CHECK(cub[0].real() < 0);
    CHECK(cub[1].real() < 0);
    CHECK(effective_stiffness({15, -1, true}, 1.0) == 2.0);
    auto origin = linearized_eigenvalues({15, -1, true}, {0, 0});
    CHECK(std::max(origin[0].real(), origin[1].real()) > 0);

    CHECK_THROWS_AS(linearized_eigenvalues({15, 1, false}, {0.5, 0}), PreconditionError);
}

TEST_CASE("eigenvalues solve the characteristic polynomial", "[odebench][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> cd(0.1, 20), kd(-5, 5);
    for (int i = 0; i < 200; ++i) {
        SecondOrderParams p{cd(rng), kd(rng), i % 2 == 0};
        for (const auto& e : equilibria(p).points) {
            double keff = effective_stiffness(p, e.y);
            for (auto l : linearized_eigenvalues(p, e)) {
                auto res = l * l + p.c * l + keff;
                double scale = std::abs(l * l) + std::abs(p.c * l) + std::abs(keff) + 1e-300;
                CHECK(std::abs(res) <= 1e-12 * scale);
            }
        }
    }
}
