import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from decotrace import (
    ConfigurationError,
    Scenario,
    ScenarioError,
    critical_length,
    interaction_number,
    number_density,
    recoil_variance_from_energy,
    sweep,
    threshold_check,
)
from decotrace.scenario import ELECTRON_VOLT, NO_ENTANGLEMENT, TORR, recoil_momentum


def argon(**kw):
    base = dict(pressure=5 * TORR, temperature=300.0, cross_section=1e-22, path_length=0.1,
                photoelectron_energy=1.0 * ELECTRON_VOLT, sigma_p=1e8, sigma_c=1e7,
                label="argon")
    base.update(kw)
    return Scenario(**base)


def rayleigh(**kw):
    base = dict(pressure=5 * TORR, cross_section=1e-30, path_length=0.1, recoil_sigma_q2=1e8,
                interaction_number=1e-5, sigma_p=1e8, sigma_c=1e7)
    base.update(kw)
    return Scenario(**base)


def test_number_density():
    assert number_density(666.61, 300.0) == pytest.approx(666.61 / (1.380649e-23 * 300.0), rel=1e-15)
    assert number_density(666.61, 300.0) == pytest.approx(1.609e23, rel=1e-3)
    assert number_density(0.01 * TORR, 300.0) == pytest.approx(3.22e20, rel=1e-3)
    assert number_density(0.0, 300.0) == 0.0


def test_interaction_number():
    assert interaction_number(1.609e23, 1e-22, 0.1) == pytest.approx(1.609, rel=1e-12)
    assert interaction_number(1.609e23, 1e-22, 0.1) == pytest.approx(1.6, rel=0.05)
    assert interaction_number(1.609e23, 1e-22, 0.0) == 0.0
    assert interaction_number(1.609e23, 1e-30, 0.1) == pytest.approx(1.609e-8, rel=1e-12)


def test_recoil_from_photoelectron_energy():
    assert recoil_momentum(ELECTRON_VOLT) == pytest.approx(5.1e9, rel=0.01)
    assert recoil_momentum(ELECTRON_VOLT) == pytest.approx(5.12e9, rel=1e-3)
    assert recoil_variance_from_energy(ELECTRON_VOLT) == pytest.approx(1.3e19, rel=0.01)
    assert recoil_variance_from_energy(ELECTRON_VOLT) == pytest.approx(1.31e19, rel=2e-3)
    assert recoil_variance_from_energy(0.0) == 0.0


def test_argon_verdict():
    v = threshold_check(argon())
    assert v.N == pytest.approx(1.6, rel=0.05)
    assert v.lhs == pytest.approx(2.1e19, rel=0.10)
    assert v.rhs == pytest.approx(0.99e16, rel=1e-12)
    assert v.survives is False
    assert v.lhs == v.N * v.sigma_q2


def test_rayleigh_verdict():
    v = threshold_check(rayleigh())
    assert v.lhs == pytest.approx(1e3, rel=1e-12)
    assert v.survives is True
    # the ideal-gas estimate alone is far smaller than the stated N
    assert rayleigh().derived_N == pytest.approx(1.609e-8, rel=1e-3)


def test_zero_interactions_survive_with_full_margin():
    v = threshold_check(argon(interaction_number=0.0))
    assert v.survives is True
    assert v.margin == 1.0


def test_initially_separable_flagged():
    v = threshold_check(argon(sigma_c=1e8))
    assert v.survives is False
    assert v.reason == NO_ENTANGLEMENT
    assert threshold_check(argon(sigma_c=2e8, interaction_number=0.0)).survives is False


def test_boundary_counts_as_decohered():
    s = rayleigh(recoil_sigma_q2=1.0, interaction_number=1e16 - 1e14, sigma_p=1e8, sigma_c=1e7)
    v = threshold_check(s)
    assert v.lhs == v.rhs
    assert v.survives is False


def test_critical_length_examples():
    s = argon()
    lstar = critical_length(s)
    assert lstar == pytest.approx(0.1 * 0.99e16 / threshold_check(s).lhs, rel=1e-12)
    assert lstar == pytest.approx(4.7e-5, rel=0.02)
    assert critical_length(argon(pressure=10 * TORR)) == pytest.approx(lstar / 2, rel=1e-12)
    assert critical_length(argon(sigma_c=1e8 * (1 - 1e-9))) < 1e-8 * lstar
    with pytest.raises(ConfigurationError):
        critical_length(argon(sigma_c=1e8))


@pytest.mark.parametrize("factory", [argon, lambda: argon(pressure=0.01 * TORR),
                                     lambda: rayleigh(interaction_number=None)])
def test_critical_length_brackets_threshold(factory):
    s = factory()
    lstar = critical_length(s)
    assert threshold_check(s.replace(path_length=0.999 * lstar, interaction_number=None)).survives
    assert not threshold_check(s.replace(path_length=1.001 * lstar, interaction_number=None)).survives


def test_pressure_sweep_all_decohered():
    res = sweep(argon(), "pressure", [p * TORR for p in (0.01, 0.1, 1, 5)])
    assert [v.survives for v in res] == [False] * 4
    assert res.crossing is None


def test_length_sweep_rayleigh_all_survive():
    lengths = [0.01, 0.1, 1.0, 10.0]
    base = rayleigh(interaction_number=None)
    res = sweep(base, "length", lengths)
    for length, v in zip(lengths, res):
        assert v == threshold_check(base.replace(path_length=length))
        assert v.survives


def test_single_point_sweep_matches_threshold_check():
    res = sweep(argon(), "energy", [2 * ELECTRON_VOLT])
    assert len(res) == 1
    assert res[0] == threshold_check(argon(photoelectron_energy=2 * ELECTRON_VOLT))


def test_sweep_detects_crossing():
    s = argon()
    lstar = critical_length(s)
    res = sweep(s, "length", [lstar * f for f in (0.1, 0.5, 0.9, 1.1, 2.0)])
    assert res.crossings == [3]


def test_sweep_energy_switches_direct_mode():
    res = sweep(rayleigh(), "energy", [ELECTRON_VOLT])
    assert res[0].sigma_q2 == pytest.approx(recoil_variance_from_energy(ELECTRON_VOLT))


@pytest.mark.parametrize("values", [[], [1.0, 1.0], [2.0, 1.0]])
def test_sweep_rejects_bad_values(values):
    with pytest.raises(ConfigurationError):
        sweep(argon(), "pressure", values)


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ConfigurationError):
        sweep(argon(), "temperature", [1.0])


@pytest.mark.parametrize("field,value", [("pressure", -1.0), ("path_length", 0.0),
                                         ("sigma_p", math.nan), ("cross_section", math.inf)])
def test_scenario_rejects_nonpositive(field, value):
    with pytest.raises(ScenarioError) as exc:
        argon(**{field: value})
    assert exc.value.field == field


def test_scenario_needs_exactly_one_recoil_source():
    with pytest.raises(ScenarioError):
        argon(recoil_sigma_q2=1e8)
    with pytest.raises(ScenarioError):
        argon(photoelectron_energy=None)


positive = st.floats(1e-3, 1e3)


@settings(max_examples=200)
@given(positive, positive, positive, positive, positive,
       st.sampled_from(["pressure", "path_length", "cross_section", "photoelectron_energy"]),
       st.floats(1.0, 100.0))
def test_threshold_monotone(p, sig, length, energy, bw, field, factor):
    s = argon(pressure=p * TORR, cross_section=sig * 1e-22, path_length=length * 1e-3,
              photoelectron_energy=energy * 1e-3 * ELECTRON_VOLT, sigma_p=bw * 1e8)
    before = threshold_check(s)
    after = threshold_check(s.replace(**{field: getattr(s, field) * factor}))
    assert not (not before.survives and after.survives)


@settings(max_examples=200)
@given(positive, positive, positive, st.floats(0.01, 0.99))
def test_critical_length_bracketing_property(p, sig, q2, c_ratio):
    s = rayleigh(interaction_number=None, pressure=p, cross_section=sig * 1e-24,
                 recoil_sigma_q2=q2 * 1e10, sigma_c=c_ratio * 1e8)
    lstar = critical_length(s)
    assume(1e-300 < lstar < 1e300)
    assert threshold_check(s.replace(path_length=0.999 * lstar)).survives
    assert not threshold_check(s.replace(path_length=1.001 * lstar)).survives
