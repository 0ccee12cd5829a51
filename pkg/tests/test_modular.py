import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import n2char.modular as modular
from n2char.bpz import kac_table
from n2char.errors import DomainError
from n2char.fixtures import appell_sample, atypical_point, standard_points, tolerance
from n2char.modular import (
    check_aa_symmetry_unitarity,
    check_example_3_2,
    check_p1_closure,
    check_sine_sum_lemma,
    check_tt_distributional,
    gaussian_test,
    s_aa,
    s_at,
    s_at_denominator_floor,
    s_at_kernel,
    s_atypical_sides,
    s_tt,
    sine_sum,
    t_atypical_phase,
    t_typical_phase,
    theta_m,
    tt_smeared,
    verify_appell_s,
    verify_proof_identities,
    verify_s_atypical,
    verify_s_typical,
    verify_t_atypical,
    verify_t_typical,
)
from n2char.specfun import ModularPoint, SectorPair, expo
from n2char.spectra import LevelPair, discrete_spectra, lambda_rs

L32 = LevelPair(3, 2)
SECTORS = SectorPair.all()
POINTS = standard_points()


# -- typical S and T


@pytest.mark.parametrize("point", POINTS, ids=lambda p: f"{p.tau}/{p.u}")
@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_s_typical_standard_points(sector, point):
    assert verify_s_typical(L32, sector, (1, 1), 0.2, point) <= tolerance("s-typical")


def test_s_typical_other_levels():
    point = POINTS[0]
    for level in (LevelPair(5, 2), LevelPair(4, 3)):
        for kac in kac_table(level):
            assert verify_s_typical(level, (0, 0), kac, 0.2, point) <= tolerance("s-typical")


def test_s_typical_odd_odd_at_origin():
    assert verify_s_typical(L32, (1, 1), (1, 1), 0.2, ModularPoint(1j, 0)) <= 1e-12


@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_t_typical(sector):
    for point in POINTS:
        assert verify_t_typical(L32, sector, (1, 1), 0.2, point) <= tolerance("t-typical")


def test_t_typical_phase_at_zero_parameter():
    lattice = (2 - 3) ** 2 / 24
    assert abs(t_typical_phase(L32, (0, 0), (1, 1), 0) - cmath.exp(2j * math.pi * (lattice - 1 / 8))) < 1e-15


def test_s_tt_swap_symmetry():
    for e, ep in SECTORS:
        a = s_tt(L32, (e, ep), (1, 1), 0.3, (1, 1), -0.7)
        b = s_tt(L32, (ep, e), (1, 1), -0.7, (1, 1), 0.3)
        assert abs(a - b) <= 1e-14 * abs(a)


# -- atypical S and T


@pytest.mark.parametrize("point", POINTS, ids=lambda p: f"{p.tau}/{p.u}")
@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_s_atypical_standard_points(sector, point):
    for label in discrete_spectra(L32):
        assert verify_s_atypical(L32, sector, label, point) <= tolerance("s-atypical")


def test_s_atypical_larger_level():
    assert verify_s_atypical(LevelPair(5, 2), (0, 0), (1, 0, 0), atypical_point()) <= 1e-4


@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_s_atypical_continuous_part_enters_negatively(sector):
    # the opposite sign on the S^{at} integral leaves an O(1) residual
    point = atypical_point()
    assert verify_s_atypical(L32, sector, (1, 0, 0), point) <= tolerance("s-atypical")
    assert verify_s_atypical(L32, sector, (1, 0, 0), point, continuous_sign=1) > 0.1


@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_example_3_2_coefficients(sector):
    assert check_example_3_2(sector) <= tolerance("s-atypical-coefficients")


def test_example_3_2_discrete_values_at_ns():
    c = 1 / math.sqrt(3)
    values = [s_aa(L32, (0, 0), (1, 0, 0), lab) for lab in [(1, 0, 0), (1, 1, -1), (2, 0, 0)]]
    assert np.allclose(values, [c, -c, -c], atol=1e-15)


def test_literal_product_index_is_the_one_that_closes(monkeypatch):
    """(1,1;-1) has s = 1, where lambda_{r',(1+s)s'} and lambda_{r',s'} differ at (3,2)."""
    point, label = atypical_point(), (1, 1, -1)
    assert verify_s_atypical(L32, (0, 0), label, point) <= tolerance("s-atypical")
    assert lambda_rs(L32, 1, 2) != lambda_rs(L32, 1, 1)

    def plain_index_kernel(level, s, kac2, x):
        r2, s2 = kac2
        x = np.asarray(x, dtype=float)
        lin = math.sin(math.pi * s * s2 * level.p / level.pp)
        const = math.sin(2 * math.pi * float(lambda_rs(level, r2, s2)))
        cos_l = math.cos(2 * math.pi * float(lambda_rs(level, r2, s2)))
        return (lin * np.exp(2 * np.pi * x) + const) / (np.cosh(2 * np.pi * x) - cos_l)

    x = np.linspace(-2, 2, 9)
    assert np.max(np.abs(plain_index_kernel(L32, 0, (1, 1), x) - s_at_kernel(L32, 0, (1, 1), x))) < 1e-12
    monkeypatch.setattr(modular, "s_at_kernel", plain_index_kernel)
    assert verify_s_atypical(L32, (0, 0), label, point) > 0.01


@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_t_atypical(sector):
    for point in POINTS:
        for label in discrete_spectra(L32):
            assert verify_t_atypical(L32, sector, label, point) <= tolerance("t-atypical")


def test_t_atypical_phase_trivial_exponent():
    # theta = 0, eps = 1: the exponent vanishes
    assert t_atypical_phase(L32, (1, 0), (1, 0, 0)) == 1


def test_s_aa_symmetry_and_unitarity():
    for level, bound in ((L32, 1e-13), (LevelPair(5, 2), 1e-12), (LevelPair(4, 3), 1e-12)):
        for sector in SECTORS:
            sym, uni = check_aa_symmetry_unitarity(level, sector)
            assert sym <= bound and uni <= bound


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([LevelPair(p, pp) for p in range(2, 9) for pp in range(1, 8) if math.gcd(p, pp) == 1]), st.sampled_from(SECTORS))
def test_s_aa_unitarity_property(level, sector):
    sym, uni = check_aa_symmetry_unitarity(level, sector)
    assert max(sym, uni) <= tolerance("unitarity") * 100


def test_s_at_denominator_floor_positive():
    for level in (L32, LevelPair(5, 2), LevelPair(4, 3), LevelPair(7, 5)):
        x = np.linspace(-10, 10, 4001)
        for r2, s2 in kac_table(level):
            floor = s_at_denominator_floor(level, (r2, s2))
            assert floor > 0
            den = np.cosh(2 * np.pi * x) - math.cos(2 * math.pi * float(lambda_rs(level, r2, s2)))
            assert np.min(den) >= floor - 1e-12


def test_s_at_is_finite_far_out():
    # the kernel is rescaled by e^{-2 pi |x|}, so only the exponential factor grows
    values = s_at(L32, (1, 1), (2, 0, 0), (1, 1), np.array([-100.0, 100.0]))
    assert np.all(np.isfinite(values))
    assert abs(values[1]) < 1e-300 < abs(values[0])


# -- finite sums


def test_sine_sum_examples():
    lv = LevelPair(5, 2)
    assert abs(sine_sum(lv, 2, 2) - 2.5) < 1e-13
    assert abs(sine_sum(lv, 1, 3)) < 1e-13
    assert abs(sine_sum(lv, 2, 2, half_range=True) - 1.25) < 1e-13


def test_sine_sum_needs_nonzero_index():
    # at r = r' = 0 every term vanishes, so the p/2 value only holds from r = 1 on
    assert sine_sum(LevelPair(5, 2), 0, 0) == 0


@pytest.mark.parametrize("level", [LevelPair(p, pp) for p in range(2, 9) for pp in range(1, 8) if math.gcd(p, pp) == 1], ids=str)
def test_sine_sum_lemma(level):
    assert check_sine_sum_lemma(level) <= tolerance("sine-sum") * 10


# -- smeared double S^{tt}


@pytest.mark.parametrize("sector", SECTORS, ids=str)
def test_tt_distributional(sector):
    assert check_tt_distributional(L32, sector, (1, 1), 0.3, 0.5) <= tolerance("tt-distributional")


def test_tt_off_diagonal_vanishes():
    assert check_tt_distributional(LevelPair(4, 3), (0, 0), (1, 1), 0.3, 0.5, kac_out=(1, 2)) <= 1e-6


def test_tt_wide_test_function():
    assert check_tt_distributional(L32, (1, 0), (1, 1), 0.3, 5.0) <= 1e-6
    expected = gaussian_test(-0.3 + 1j, 5.0)
    assert abs(tt_smeared(L32, (1, 0), (1, 1), 0.3, 5.0) - expected) <= 1e-6


def test_tt_rejects_bad_width():
    with pytest.raises(DomainError):
        tt_smeared(L32, (0, 0), (1, 1), 0.3, 0.0)


# -- Appell-Lerch S-transform


def test_appell_s_transform():
    u, v, tau = appell_sample()
    assert verify_appell_s(4, u, v, tau, 3) <= tolerance("appell-s")
    assert verify_appell_s(2, u, v, tau, 2) <= tolerance("appell-s")


def test_appell_s_correction_sign():
    u, v, tau = appell_sample()
    assert verify_appell_s(4, u, v, tau, 3, correction_sign=1) > 0.1


def test_appell_s_level_checks():
    with pytest.raises(DomainError):
        verify_appell_s(3, 0.1, 0.05, 1j, 2)
    with pytest.raises(DomainError):
        verify_appell_s(4, 0.1, 0.05, 1j, 2)


# -- identities behind the proof


@pytest.mark.parametrize("level", [L32, LevelPair(5, 2), LevelPair(4, 1)], ids=str)
def test_proof_identities(level):
    report = verify_proof_identities(level, POINTS[1])
    bad = {k: v for k, v in report.items() if v > tolerance("proof-identities")}
    assert not bad


def test_theta_m_vanishes_at_unit_pp():
    level = LevelPair(4, 1)
    for m in (0, 1):
        for r in range(1, 4):
            assert abs(theta_m(level, r, 0, m, 0.1 + 0.9j)) <= tolerance("theta-m-vanishing")


# -- closure at p' = 1


def test_p1_closure_examples():
    point = atypical_point()
    assert check_p1_closure(LevelPair(3, 1), (0, 0), (1, 0, 0), point) <= 1e-8
    assert check_p1_closure(LevelPair(2, 1), (0, 0), (1, 0, 0), point) <= 1e-9
    level = LevelPair(4, 1)
    assert max(check_p1_closure(level, s, lab, point) for s in SECTORS for lab in discrete_spectra(level)) <= tolerance("p1-closure")


def test_p1_has_no_continuous_part():
    sides = s_atypical_sides(LevelPair(5, 1), (0, 1), (1, 0, 0), atypical_point())
    assert sides.continuous == 0


def test_p1_closure_requires_unit_pp():
    with pytest.raises(DomainError):
        check_p1_closure(L32, (0, 0), (1, 0, 0), atypical_point())
