from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from n2char.bpz import kac_table
from n2char.characters import typical_char_qseries
from n2char.errors import DomainError, NotInvertibleError
from n2char.oracle import (
    ALPHA0,
    BETA1,
    BETA2,
    DELTA,
    AffineTypicalLabel,
    affine_numerator_series,
    oracle_compare,
    ramond_denominator_series,
    reduced_prefactor,
    reduced_typical_qseries,
    specialize,
)
from n2char.qseries import QSeries, series_invert
from n2char.spectra import LevelPair, delta_rs, is_typical, lambda_rs

F = Fraction
L32 = LevelPair(3, 2)


def test_specialization_images():
    assert specialize(DELTA) == (-1, 0)
    assert specialize(BETA1) == (F(-1, 2), -1)
    assert specialize(BETA2) == (F(-1, 2), 1)
    # y = e^{alpha_0} collapses to 1
    assert specialize(ALPHA0) == (0, 0)


@pytest.mark.parametrize("pq", [(3, 2), (5, 2), (4, 3), (5, 3)], ids=str)
@pytest.mark.parametrize("lam", [F(1, 5), F(2, 7)], ids=str)
def test_oracle_agrees_exactly(pq, lam):
    level = LevelPair(*pq)
    r, s = kac_table(level)[0]
    assert is_typical(level, (r, s), lam)
    assert oracle_compare(AffineTypicalLabel(level, r, s, lam), 10) == 0


def test_oracle_order_twelve_and_all_kac_labels():
    assert oracle_compare(AffineTypicalLabel(L32, 1, 1, F(1, 5)), 12) == 0
    level = LevelPair(5, 3)
    for r, s in kac_table(level):
        assert oracle_compare(AffineTypicalLabel(level, r, s, F(1, 7)), 8) == 0


def test_oracle_order_one():
    assert oracle_compare(AffineTypicalLabel(LevelPair(4, 3), 1, 1, F(1, 5)), 1) == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(-9, 9), st.integers(2, 13))
def test_oracle_for_random_typical_lambda(num, den):
    lam = F(num, den)
    assume(is_typical(L32, (1, 1), lam))
    assert oracle_compare(AffineTypicalLabel(L32, 1, 1, lam), 6) == 0


def test_prefactors_agree_as_rationals():
    for level in (L32, LevelPair(5, 2), LevelPair(4, 3)):
        for r, s in kac_table(level):
            label = AffineTypicalLabel(level, r, s, F(2, 7))
            direct = typical_char_qseries(level, (r, s), F(2, 7), 2)
            assert reduced_prefactor(label) == (direct.q_shift, direct.z_power, direct.w_power)
            assert reduced_typical_qseries(label, 2).series.coefficient(F(0), 0) == 1


def test_lowest_weight():
    label = AffineTypicalLabel(LevelPair(5, 2), 2, 1, F(1, 5))
    lrs = lambda_rs(label.level, 2, 1)
    assert label.h_lambda == label.level.a * (lrs**2 - F(1, 25))
    # Delta = a lrs (lrs + 1), so h_Lambda and Delta - a lam^2 differ by a lambda_{r,s}
    assert label.h_lambda == delta_rs(label.level, 2, 1) - label.level.a * F(1, 25) - label.level.a * lrs
    assert label.affine_level == F(-3, 5)


# -- the numerator


def numerator_double_loop(level, r, s, order):
    """Transcription of the two sums with y = 1, over a generous index window."""
    p, pp = level.p, level.pp
    acc = defaultdict(Fraction)
    for l in range(-40, 41):
        first = (p * pp * l + r * pp - s * p) * l
        second = (p * l - r) * (pp * l - s)
        if first < order:
            acc[(F(first), 0)] += 1
        if second < order:
            acc[(F(second), 0)] -= 1
    return QSeries(acc, order)


@pytest.mark.parametrize("pq,rs", [((3, 2), (1, 1)), ((5, 2), (2, 1)), ((4, 3), (2, 1)), ((7, 4), (3, 2))], ids=str)
def test_numerator_matches_double_loop(pq, rs):
    level = LevelPair(*pq)
    label = AffineTypicalLabel(level, *rs, F(1, 5))
    assert affine_numerator_series(label, 12) == numerator_double_loop(level, *rs, 12)


def test_numerator_leading_terms():
    label = AffineTypicalLabel(LevelPair(5, 3), 2, 1, F(1, 5))
    num = affine_numerator_series(label, 6)
    # l = 0: 1 - q^{rs}
    assert num.coefficient(F(0), 0) == 1
    assert num.coefficient(F(2), 0) == -1


# -- the Ramond denominator


def test_ramond_denominator_vanishes_literally():
    for order in (3, 8):
        assert ramond_denominator_series(order).is_zero()
    with pytest.raises(NotInvertibleError):
        series_invert(ramond_denominator_series(6))


def test_regularized_ramond_denominator_inverts():
    reg = ramond_denominator_series(8, regularize=True)
    assert not reg.is_zero()
    assert (reg * series_invert(reg)).agrees_with(QSeries.one(8))


# -- label validation


def test_label_errors():
    with pytest.raises(DomainError):
        AffineTypicalLabel(L32, 1, 1, F(-3, 4))
    with pytest.raises(DomainError):
        AffineTypicalLabel(L32, 2, 1, F(1, 5))
    with pytest.raises(DomainError):
        AffineTypicalLabel(L32, 1, 0, F(1, 5))
