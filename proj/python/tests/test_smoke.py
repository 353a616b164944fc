import math

import numpy as np
import pytest

import llhyst


def test_presets_round_trip():
    names = llhyst.preset_names()
    assert "fig3" in names and "fig6" in names
    spec = llhyst.Spec.preset("fig3")
    assert spec.system == "linear-spring"
    again = llhyst.Spec.from_yaml(spec.to_yaml())
    assert again.to_yaml() == spec.to_yaml()


def test_unknown_key_is_a_spec_error():
    with pytest.raises(llhyst.SpecError):
        llhyst.Spec.from_yaml("system: linear-spring\nbogus: 1\n")
    with pytest.raises(ValueError):
        llhyst.Spec.from_yaml("system: duffing\n")


def test_simulate_matches_steady_state_phase():
    spec = llhyst.Spec.preset("fig3a")
    out = llhyst.simulate(spec)
    assert set(out) == {"t", "u", "y"}
    assert out["t"][0] == 0.0
    assert np.all(np.diff(out["t"]) > 0)
    assert np.allclose(out["u"], np.sin(out["t"]), atol=1e-12)


def test_sweep_rows_and_verdict():
    spec = llhyst.Spec.preset("fig7")
    spec.sweep = [1.0, 0.5, 0.25]
    res = llhyst.sweep(spec, jobs=2)
    assert res["verdict"] == "loop-persists"
    assert [r["omega"] for r in res["rows"]] == [1.0, 0.5, 0.25]


def test_spectrum_mode_one():
    res = llhyst.spectrum(llhyst.Spec.preset("fig6"))
    assert res["kernel_dimension"] == 3
    assert res["max_real_part"] <= 1e-10
    upper = [r for r in res["rows"] if r["mode"] == 1 and r["analytic"].imag > 0]
    assert upper and upper[0]["analytic"] == pytest.approx(complex(-0.02 * math.pi**2, math.pi**2))


def test_loop_area_orientation():
    assert llhyst.loop_area([0, 1, 1, 0], [0, 0, 1, 1]) == pytest.approx(1.0)
    assert llhyst.loop_area([0, 0, 1, 1], [0, 1, 1, 0]) == pytest.approx(-1.0)
    th = np.linspace(0, 2 * np.pi, 1000, endpoint=False)
    m = llhyst.loop_metrics(np.sin(th), np.cos(th))
    assert m["normalized_area"] == pytest.approx(math.pi / 4, rel=1e-4)


def test_census_and_verify():
    assert llhyst.census("linear-spring")["count"] == "one"
    assert llhyst.census("ll-nonlinear")["multiple_stable"]
    checks = llhyst.verify()
    assert all(passed for _, passed, _ in checks)


def test_stability_guard_raises():
    spec = llhyst.Spec.preset("fig5a")
    spec.dt = 0.01
    with pytest.raises(llhyst.StabilityError):
        llhyst.simulate(spec)


def test_format_number_round_trips():
    for v in [0.1, 1 / 3, 1e-300, -2.5e7]:
        assert float(llhyst.format_number(v)) == v
