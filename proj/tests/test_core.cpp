#include "llhyst/core.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace llhyst;
using Catch::Approx;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double scale = 10.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng), d(rng)};
}

}  // namespace

TEST_CASE("cross product examples", "[core]") {
    CHECK(cross({1, 0, 0}, {0, 1, 0}) == Vec3{0, 0, 1});
    CHECK(cross({1, 2, 3}, {4, 5, 6}) == Vec3{-3, 6, -3});
    Vec3 a{0.3, -1.7, 2.5};
    CHECK(cross(a, a) == Vec3{0, 0, 0});
}

TEST_CASE("cross product is antisymmetric and orthogonal", "[core][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        Vec3 a = random_vec(rng);
        Vec3 b = random_vec(rng);
        Vec3 ab = cross(a, b);
        CHECK(ab == -cross(b, a));
        double scale = norm(a) * norm(a) * norm(b) + 1e-300;
        CHECK(std::abs(dot(ab, a)) <= 1e-14 * scale);
        CHECK(std::abs(dot(ab, b)) <= 1e-14 * norm(a) * norm(b) * norm(b));
    }
}

TEST_CASE("vector helpers", "[core]") {
    Vec3 v{3, 4, 12};
    CHECK(norm(v) == 13.0);
    CHECK(v[0] == 3.0);
    CHECK(v[2] == 12.0);
    CHECK(basis(2) == Vec3{0, 1, 0});
    CHECK_THROWS_AS(basis(4), PreconditionError);
    CHECK_FALSE(is_finite(Vec3{1, std::nan(""), 0}));
}

TEST_CASE("evaluate_input examples", "[core]") {
    CHECK(evaluate_input({1.0, 1.0, Waveform::Sine, std::nullopt}, 0.0) == 0.0);
    CHECK(evaluate_input({0.001, 1.0, Waveform::Cosine, 1}, 0.0) == 0.001);
    CHECK(evaluate_input({1.0, 2.0, Waveform::Sine, std::nullopt}, std::numbers::pi / 4.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate_input is periodic", "[core][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> w(1e-3, 10.0), t(0.0, 100.0);
    for (int i = 0; i < 500; ++i) {
        HarmonicInput in{1.0, w(rng), i % 2 ? Waveform::Sine : Waveform::Cosine, std::nullopt};
        double ti = t(rng);
        double tp = ti + in.period();
        CHECK(std::abs(in(ti) - in(tp)) <= 1e-12 * std::max(1.0, tp * in.omega));
    }
}

TEST_CASE("harmonic input validation and vector form", "[core]") {
    CHECK_THROWS_AS((HarmonicInput{1.0, 0.0, Waveform::Sine, std::nullopt}.validate()), PreconditionError);
    CHECK_THROWS_AS((HarmonicInput{1.0, 1.0, Waveform::Sine, 4}.validate()), PreconditionError);
    HarmonicInput in{2.0, 1.0, Waveform::Cosine, 3};
    CHECK(in.vector_at(0.0) == Vec3{0, 0, 2.0});
}

TEST_CASE("spatial grid", "[core]") {
    SpatialGrid g(1.0, 41);
    CHECK(g.spacing() == Approx(0.025));
    CHECK(g.node(40) == Approx(1.0));
    CHECK(g.nearest_node(0.6) == 24);
    CHECK(g.nearest_node(0.0125) == 0);
    CHECK_THROWS_AS(g.nearest_node(-1.0), PreconditionError);
    CHECK_THROWS_AS(g.nearest_node(5.0), PreconditionError);
    CHECK_THROWS_AS(SpatialGrid(1.0, 2), PreconditionError);
    CHECK_THROWS_AS(SpatialGrid(0.0, 10), PreconditionError);
}

TEST_CASE("nearest node is within half a spacing", "[core][property]") {
    SpatialGrid g(2.5, 17);
    for (int i = 0; i <= 1000; ++i) {
        double x = 2.5 * i / 1000.0;
        CHECK(std::abs(g.node(g.nearest_node(x)) - x) <= 0.5 * g.spacing() + 1e-15);
    }
}

TEST_CASE("magnetization field", "[core]") {
    SpatialGrid g(1.0, 5);
    auto f = MagnetizationField::uniform(g, {1, 0, 0});
    CHECK(f.on_constraint());
    CHECK(f.max_norm_deviation() == 0.0);
    MagnetizationField h(g, std::vector<Vec3>(5, Vec3{2, 0, 0}));
    CHECK_FALSE(h.on_constraint());
    CHECK(h.normalized().on_constraint());
    CHECK(h.max_abs() == 2.0);
    CHECK_THROWS_AS(MagnetizationField(g, std::vector<Vec3>(4)), PreconditionError);
    std::vector<Vec3> bad(5, Vec3{1, 0, 0});
    bad[2].x2 = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(MagnetizationField(g, bad), PreconditionError);
}

TEST_CASE("trajectory invariants", "[core]") {
    CHECK_NOTHROW(Trajectory({0, 1, 2}, {0, 0, 0}, {0, 0, 0}));
    CHECK_THROWS_AS(Trajectory({0, 1, 1}, {0, 0, 0}, {0, 0, 0}), PreconditionError);
    CHECK_THROWS_AS(Trajectory({0, 1}, {0, 0, 0}, {0, 0}), PreconditionError);
    Trajectory t({0.5, 1.0, 3.0}, {1, 2, 3}, {0, 0, 0});
    CHECK(t.duration() == 2.5);
}

TEST_CASE("periodic step plans land on period boundaries", "[core][property]") {
    for (double period : {6.283185307179586, 62.83185307179586, 6283.185307179586, 0.7}) {
        for (double dt_max : {0.01, 3e-4}) {
            StepPlan p = plan_periodic(period, 3, dt_max, 2000);
            CHECK(p.dt <= dt_max);
            CHECK(p.steps % p.stride == 0);
            CHECK(p.steps / p.stride == 3 * 2000);
            CHECK(static_cast<double>(p.steps) * p.dt == Approx(3.0 * period).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(plan_periodic(1.0, 0, 0.1, 10), PreconditionError);
}
