from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullstate.params import (KNOWN_CURVE_MODELS, KacIndex, SleKappa, central_charge, kac_weight,
                              one_leg_weight, phase_of, potts_q, s_leg_weight, summary)
from nullstate.specfun import DomainError, ParameterError


@pytest.mark.parametrize("k,c", [(F(6), 0), (F(2), -2), (F(16, 3), F(1, 2))])
def test_central_charge_examples(k, c):
    assert central_charge(k) == c


@pytest.mark.parametrize("k,w", [(F(6), 0), (F(4), F(1, 4)), (F(8, 3), F(5, 8))])
def test_one_leg_weight_examples(k, w):
    assert one_leg_weight(k) == w


def test_s_leg_examples():
    assert s_leg_weight(2, F(6)) == F(1, 3)
    assert s_leg_weight(0, F(5)) == 0
    for k in (F(1, 2), F(3), F(22, 5)):
        assert s_leg_weight(1, k) == one_leg_weight(k)
    with pytest.raises(ParameterError):
        s_leg_weight(-1, 3)


def test_kac_examples():
    assert kac_weight((1, 2), F(6)) == 0 == one_leg_weight(F(6))
    assert kac_weight((2, 1), F(3)) == F(1, 2) == one_leg_weight(F(3))
    assert kac_weight((1, 3), F(6)) == F(1, 3) == s_leg_weight(2, F(6))


def test_potts_examples():
    assert potts_q(3, "dilute") == pytest.approx(2, abs=1e-14)
    assert potts_q(F(16, 3), "dense") == pytest.approx(2, abs=1e-14)
    assert potts_q(4, "dense") == pytest.approx(4, abs=1e-14)
    assert potts_q(4, "dilute") == pytest.approx(4, abs=1e-14)
    with pytest.raises(DomainError):
        potts_q(3, "dense")
    with pytest.raises(DomainError):
        potts_q(6, "dilute")
    with pytest.raises(ParameterError):
        potts_q(6, "critical")


def test_domain_guards():
    for bad in (0, 8, -1, 9.5):
        with pytest.raises(DomainError):
            SleKappa(bad)
    for bad in ((0, 1), (1, -2), (1.5, 1)):
        with pytest.raises(ParameterError):
            KacIndex(*bad)


KGRID = np.linspace(0.01, 7.99, 1000)


def test_weight_identities_on_grid():
    for k in KGRID:
        k = float(k)
        one = one_leg_weight(k)
        if k > 4:
            assert abs(kac_weight((1, 2), k) - one) <= 1e-14 * max(1, abs(one))
            for s in range(5):
                assert abs(kac_weight((1, s + 1), k) - s_leg_weight(s, k)) <= 1e-14 * max(1, abs(s_leg_weight(s, k)))
        else:
            assert abs(kac_weight((2, 1), k) - one) <= 1e-14 * max(1, abs(one))
            for s in range(5):
                assert abs(kac_weight((s + 1, 1), k) - s_leg_weight(s, k)) <= 1e-14 * max(1, abs(s_leg_weight(s, k)))


@given(st.fractions(min_value=F(2), max_value=F(4)).filter(lambda k: k > 2))
def test_central_charge_duality(k):
    assert central_charge(k) == central_charge(16 / k)


@given(st.fractions(min_value=F(1, 100), max_value=F(799, 100)))
def test_exact_arithmetic_stays_exact(k):
    assert isinstance(central_charge(k), F)
    assert isinstance(kac_weight((2, 3), k), F)


def test_known_models_reproduced_exactly():
    for name, k, c in KNOWN_CURVE_MODELS:
        if k < 8:
            assert central_charge(k) == c, name
        else:
            with pytest.raises(DomainError):
                central_charge(k)
    assert len({(k, c) for _, k, c in KNOWN_CURVE_MODELS if k < 8}) == 8


def test_summary_fields():
    s = summary(F(6))
    assert s["central_charge"] == 0 and s["phase"] == "dense"
    assert set(s["kac_weights"]) == {f"{r},{t}" for r in range(1, 4) for t in range(1, 4)}
    assert "dilute" not in s["potts_q"] and s["potts_q"]["dense"] == pytest.approx(1)
    assert phase_of(4) == "dilute"
