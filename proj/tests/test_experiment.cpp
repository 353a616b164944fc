#include "llhyst/experiment.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace llhyst;
using namespace llhyst::exp;
using Catch::Approx;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<double> csv_row(const std::string& line) {
    std::vector<double> v;
    std::istringstream is(line);
    for (std::string cell; std::getline(is, cell, ',');) v.push_back(std::stod(cell));
    return v;
}

ExperimentSpec small_sweep() {
    auto s = parse_spec(preset_text("fig3"));
    s.sweep = {1.0, 0.5, 0.25};
    return s;
}

}  // namespace

TEST_CASE("every preset parses and round-trips", "[experiment]") {
    auto names = preset_names();
    REQUIRE(names.size() >= 26);
    for (const auto& n : names) {
        INFO(n);
        auto spec = parse_spec(preset_text(n));
        auto text = serialize_spec(spec);
        CHECK(serialize_spec(parse_spec(text)) == text);
    }
    CHECK_THROWS_AS(preset_text("no-such-preset"), SpecError);
}

TEST_CASE("random specs round-trip through YAML", "[experiment][property]") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pos(1e-4, 50.0), any(-10.0, 10.0);
    std::uniform_int_distribution<int> pick(0, 4), ch(1, 3);
    for (int i = 0; i < 100; ++i) {
        ExperimentSpec s;
        s.name = "rand" + std::to_string(i);
        s.system = static_cast<hyst::SystemKind>(pick(rng));
        s.ode.c = pos(rng);
        s.ode.k = s.system == hyst::SystemKind::IntegratorChain ? 0.0 : any(rng);
        s.ode.cubic = s.system == hyst::SystemKind::NonlinearSpring;
        s.ll.nu = pos(rng);
        s.input.amplitude = pos(rng);
        s.input.channel = ch(rng);
        s.initial.y0 = any(rng);
        s.initial.theta0 = any(rng);
        s.probe.channel = ch(rng);
        s.probe.x = 0.3;
        double w = pos(rng);
        s.sweep = {w, w / 3.0, w / 7.0};
        if (i % 2) s.integrator.dt = pos(rng) * 1e-4;
        s.integrator.constraint = static_cast<ll::ConstraintMode>(i % 3);
        auto text = serialize_spec(s);
        INFO(text);
        auto back = parse_spec(text);
        CHECK(serialize_spec(back) == text);
        CHECK(back.ode.c == s.ode.c);
        CHECK(back.ll.nu == s.ll.nu);
        CHECK(back.sweep == s.sweep);
        CHECK(back.integrator.dt == s.integrator.dt);
    }
}

TEST_CASE("spec errors", "[experiment]") {
    CHECK_THROWS_AS(parse_spec("system: linear-spring\nbogus: 1\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: linear-spring\nparams: {c: 15, kk: 1}\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: duffing\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: linear-spring\nsweep: [1, -1]\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: integrator-chain\nparams: {k: 1}\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: [unclosed\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: linear-spring\nintegrator: {periods: 2, discard_periods: 2}\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: ll-linear\nparams: {a: [1, 1, 0]}\n"), SpecError);
    CHECK_THROWS_AS(parse_spec("system: ll-nonlinear\nprobe: {x: 2}\n"), SpecError);
    auto chain = parse_spec("system: integrator-chain\n");
    CHECK(chain.ode.k == 0.0);
    auto cubic = parse_spec("system: nonlinear-spring\n");
    CHECK(cubic.ode.k == -1.0);
    CHECK(cubic.ode.cubic);
}

TEST_CASE("format_number reads back exactly", "[experiment][property]") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-2.5e-7) == "-2.5e-07");
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        double v = std::ldexp(mant(rng), ex(rng) / 3);
        CHECK(std::stod(format_number(v)) == v);
    }
}

TEST_CASE("trajectory CSV", "[experiment]") {
    auto s = parse_spec(preset_text("fig3a"));
    auto out = run_simulate(s);
    std::ostringstream os;
    write_trajectory_csv(os, out.trajectory);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == out.trajectory.size() + 1);
    CHECK(lines[0] == "t,u,y");
    auto row = csv_row(lines[1]);
    REQUIRE(row.size() == 3);
    CHECK(row[0] == 0.0);

    s.input.amplitude = 0.0;
    std::ostringstream zero;
    write_trajectory_csv(zero, run_simulate(s).trajectory);
    auto zl = split_lines(zero.str());
    for (std::size_t i = 1; i < zl.size(); ++i) CHECK(csv_row(zl[i])[2] == 0.0);

    s.sweep = {1.0, 0.5};
    CHECK_THROWS_AS(run_simulate(s), SpecError);
}

TEST_CASE("sweep output is deterministic and independent of jobs", "[experiment]") {
    auto s = small_sweep();
    auto render = [&](std::size_t jobs) {
        std::ostringstream os;
        write_sweep_csv(os, run_sweep(s, jobs).result);
        return os.str();
    };
    auto one = render(1);
    CHECK(render(1) == one);
    CHECK(render(2) == one);
    auto lines = split_lines(one);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "omega,area,normalized_area,width,height,closure_gap");
    CHECK(csv_row(lines[1])[0] == 1.0);
    CHECK(csv_row(lines[3])[0] == 0.25);
}

TEST_CASE("run record", "[experiment]") {
    auto s = small_sweep();
    auto sw = run_sweep(s);
    auto rec = run_record(s, "sweep", sw.diagnostics, sweep_summary_json(sw), 0.5);
    CHECK(rec.find("\"command\": \"sweep\"") != std::string::npos);
    CHECK(rec.find("\"verdict\"") != std::string::npos);
    CHECK(rec.find(version()) != std::string::npos);
    CHECK(rec.find("linear-spring") != std::string::npos);
}

TEST_CASE("spectrum CSV", "[experiment][oracle]") {
    auto s = parse_spec(preset_text("fig6"));
    auto sp = run_spectrum(s);
    std::ostringstream os;
    write_spectrum_csv(os, sp);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 1 + 1 + 3 * 5);
    CHECK(lines[0] == "mode,re_analytic,im_analytic,re_numeric,im_numeric,abs_error");
    auto m0 = csv_row(lines[1]);
    CHECK(m0[0] == 0.0);
    CHECK(m0[5] < 1e-10);
    bool found = false;
    for (std::size_t i = 2; i < 5; ++i) {
        auto r = csv_row(lines[i]);
        CHECK(r[0] == 1.0);
        if (r[2] > 0) {
            found = true;
            CHECK(r[1] == Approx(-0.19739).margin(1e-5));
            CHECK(r[2] == Approx(9.8696).margin(1e-4));
        }
    }
    CHECK(found);
    CHECK(sp.max_real_part <= 1e-10);
    CHECK(sp.kernel_dimension == 3);

    auto fine = s;
    fine.ll.grid = SpatialGrid(1.0, 81);
    auto sf = run_spectrum(fine);
    for (std::size_t i = 1; i < sp.matches.size(); ++i) {
        CHECK(sp.matches[i].abs_error / sf.matches[i].abs_error == Approx(4.0).margin(0.8));
    }

    auto ode_spec = parse_spec(preset_text("fig3"));
    CHECK_THROWS_AS(run_spectrum(ode_spec), SpecError);
}

TEST_CASE("verify passes and detects a wrong analytic formula", "[experiment]") {
    auto checks = run_verify();
    REQUIRE(!checks.empty());
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    auto bad = run_verify(VerifyOptions{1.01, 2.0});
    bool any_failed = false;
    for (const auto& c : bad) any_failed = any_failed || !c.passed;
    CHECK(any_failed);
}

TEST_CASE("loop SVG", "[experiment]") {
    auto s = parse_spec(preset_text("fig3a"));
    auto c = hyst::extract_cycle(run_simulate(s).trajectory, 1.0, 2);
    auto svg = loop_svg(c, "w=1 <linear>");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find(">u</text>") != std::string::npos);
    CHECK(svg.find(">y</text>") != std::string::npos);
    CHECK(svg.find("&lt;linear&gt;") != std::string::npos);
}
