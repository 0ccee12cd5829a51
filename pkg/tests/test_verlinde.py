import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from n2char.errors import DomainError
from n2char.fixtures import tolerance
from n2char.spectra import AtypicalLabel, LevelPair
from n2char.verlinde import (
    DELTA_SHIFTS_3_2,
    delta_shift,
    denominator_floor,
    predicted_pairing,
    verlinde_integrand,
    verlinde_pairing,
)

L32 = LevelPair(3, 2)
LABELS = list(DELTA_SHIFTS_3_2)


def test_delta_shift_table():
    assert delta_shift(L32, (1, 0, 0)) == 0
    assert delta_shift(L32, (2, 0, 0)) == 1
    with pytest.raises(DomainError):
        delta_shift(LevelPair(5, 2), (1, 0, 0))


@pytest.mark.parametrize("label", LABELS, ids=str)
def test_pairing_matches_shifted_delta(label):
    got = verlinde_pairing(L32, label, (1, 1), 0.3, (1, 1), 0.0, 0.5)
    assert abs(got - predicted_pairing(L32, label, 0.3, 0.0, 0.5)) <= tolerance("verlinde")


def test_vacuum_pairing_is_plain_gaussian():
    got = verlinde_pairing(L32, (1, 0, 0), (1, 1), 0.3, (1, 1), 0.3, 0.5)
    assert abs(got - 1 / (0.5 * np.sqrt(2 * np.pi))) <= tolerance("verlinde")


@pytest.mark.parametrize("label", LABELS, ids=str)
def test_pairing_vanishes_far_from_support(label):
    assert abs(verlinde_pairing(L32, label, (1, 1), 0.3, (1, 1), 0.3 + 10 * 0.5, 0.5)) <= 1e-6


@pytest.mark.parametrize("label", LABELS, ids=str)
def test_integrand_is_a_plain_exponential(label):
    # 2a e^{-4 pi i a x'(x1 - i eps/2 - x2)}; the 2a is the Jacobian of y = 2a x'
    eps = DELTA_SHIFTS_3_2[label]
    a = 2 / 3
    xp = np.linspace(-2.5, 2.5, 41)
    x1, x2 = 0.3, -0.15
    got = verlinde_integrand(L32, label, (1, 1), x1, (1, 1), x2, xp)
    want = 2 * a * np.exp(-4j * np.pi * a * xp * (x1 - 0.5j * eps - x2))
    assert np.max(np.abs(got - want) / np.abs(want)) <= 1e-10


@settings(max_examples=8, deadline=None)
@given(st.sampled_from(LABELS), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_pairing_is_linear_in_the_test_function(label, c1, c2):
    sigma, x1 = 0.6, 0.2
    together = verlinde_pairing(L32, label, (1, 1), x1, (1, 1), c1, sigma) + verlinde_pairing(
        L32, label, (1, 1), x1, (1, 1), c2, sigma
    )
    expected = predicted_pairing(L32, label, x1, c1, sigma) + predicted_pairing(L32, label, x1, c2, sigma)
    assert abs(together - expected) <= 2 * tolerance("verlinde")


def test_denominator_floor_positive_at_3_2():
    assert denominator_floor(L32, (1, 1)) > 0.1


def test_domain_errors():
    with pytest.raises(DomainError):
        verlinde_pairing(L32, (1, 0, 0), (1, 1), 0.3, (1, 1), 0.0, 0.0)
    with pytest.raises(DomainError):
        verlinde_pairing(L32, (1, 1, 0), (1, 1), 0.3, (1, 1), 0.0, 0.5)  # not in the discrete spectra
    with pytest.raises(DomainError):
        verlinde_integrand(LevelPair(3, 1), AtypicalLabel(1, 0, 0), (1, 1), 0.3, (1, 1), 0.0, [0.0])
