"""Parameter validation, derived constants and occupation factors."""

import math

import mpmath as mp
import numpy as np
import pytest

from qbrownian.errors import DomainError, RegimeError
from qbrownian.params import (
    OccupationModel,
    PhysicalParams,
    coupling_kappa,
    derived_constants,
    kernel_denominator,
    occupation_factor,
)

from conftest import random_valid_params


def test_model_from_string_roundtrip():
    for m in OccupationModel:
        assert OccupationModel.from_string(m.value) is m
    assert OccupationModel.from_string("  High_T ") is OccupationModel.HIGH_T
    with pytest.raises(DomainError):
        OccupationModel.from_string("classical")


def test_defaults_are_valid():
    p = PhysicalParams()
    assert (p.m, p.omega, p.gamma, p.alpha, p.T) == (1.0, 1.0, 0.1, 10.0, 100.0)
    d = derived_constants(p)
    assert d.kappa == pytest.approx(2.0 * 0.1 * (9.9**2 - 1.0) / 100.0, rel=1e-15)
    assert d.kernel_denom == pytest.approx((10.0 - 0.3) ** 2 + 1.0, rel=1e-15)


@pytest.mark.parametrize("field,value", [
    ("m", 0.0), ("m", -1.0), ("omega", 0.0), ("alpha", math.inf),
    ("hbar", 0.0), ("k", -2.0), ("T", -1.0), ("T", math.nan),
])
def test_invalid_fields_rejected(field, value):
    with pytest.raises(DomainError):
        PhysicalParams(**{field: value})


def test_regime_guards():
    # damping too strong relative to the cutoff
    with pytest.raises(RegimeError):
        PhysicalParams(gamma=4.0, alpha=10.0)
    # oscillator too fast: kappa would be negative
    with pytest.raises(RegimeError):
        PhysicalParams(omega=9.95, gamma=0.1, alpha=10.0)


def test_kappa_formula_and_positivity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = random_valid_params(rng)
        kap = coupling_kappa(p.alpha, p.gamma, p.omega)
        assert kap > 0.0
        expect = 2.0 * p.gamma * ((p.alpha - p.gamma) ** 2 - p.omega**2) / p.alpha**2
        assert kap == expect
        assert kernel_denominator(p.alpha, p.gamma, p.omega) > 0.0


def test_occupation_against_mpmath():
    p = PhysicalParams(T=3.7, hbar=0.9, k=1.3)
    x = p.k * p.T / p.hbar
    for w in [1e-8, 1e-5, 1e-3, 0.1, 1.0, 17.0, 1e4]:
        got = occupation_factor(w, OccupationModel.EXACT, p)
        want = float(0.5 * mp.coth(p.hbar * w / (2.0 * p.k * p.T)))
        assert got == pytest.approx(want, rel=1e-12)
        assert occupation_factor(w, OccupationModel.HIGH_T, p) == pytest.approx(
            x / w, rel=1e-15)
        assert occupation_factor(w, OccupationModel.UNIFORM, p) == pytest.approx(
            x / w + 0.5, rel=1e-15)


def test_occupation_model_ordering():
    # pointwise: high_t <= exact <= uniform for every omega > 0
    p = PhysicalParams()
    w = np.geomspace(1e-6, 1e6, 400)
    ex = occupation_factor(w, OccupationModel.EXACT, p)
    ht = occupation_factor(w, OccupationModel.HIGH_T, p)
    un = occupation_factor(w, OccupationModel.UNIFORM, p)
    assert np.all(ht <= ex) and np.all(ex <= un)


def test_occupation_series_branch_is_continuous():
    # the coth evaluation switches form at x = 1e-4; both sides must agree
    p = PhysicalParams(T=1.0)
    for x in [1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)]:
        w = x * p.k * p.T / p.hbar
        got = occupation_factor(w, OccupationModel.EXACT, p)
        want = float(0.5 * mp.coth(mp.mpf(x) / 2))
        assert got == pytest.approx(want, rel=1e-11)


def test_occupation_at_zero_temperature():
    p = PhysicalParams(T=0.0)
    assert occupation_factor(2.0, OccupationModel.EXACT, p) == 0.5
    assert occupation_factor(2.0, OccupationModel.UNIFORM, p) == 0.5
    with pytest.raises(DomainError):
        occupation_factor(2.0, OccupationModel.HIGH_T, p)


def test_occupation_rejects_bad_frequency():
    p = PhysicalParams()
    for bad in [0.0, -1.0, math.inf, math.nan]:
        with pytest.raises(DomainError):
            occupation_factor(bad, OccupationModel.EXACT, p)
