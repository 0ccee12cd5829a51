import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from n2char.characters import (
    atypical_char,
    atypical_char_al,
    atypical_char_from_series,
    character,
    psi,
    ramond_denominator_product,
    ramond_denominator_residual,
    ramond_denominator_sum,
    ramond_from_ns,
    spectral_flow_char_identity,
    trivial_level_residual,
    typical_char,
    typical_char_qseries,
)
from n2char.errors import DomainError, PoleError
from n2char.fixtures import denominator_points, random_points
from n2char.specfun import ModularPoint, SectorPair, expo
from n2char.spectra import KacLabel, LevelPair, TypicalLabel, discrete_spectra

F = Fraction
L32, L52, L21 = LevelPair(3, 2), LevelPair(5, 2), LevelPair(2, 1)
PT = ModularPoint(0.1 + 0.9j, 0.13 + 0.04j, 0.05)

points = st.builds(
    ModularPoint,
    st.builds(complex, st.floats(-0.3, 0.3), st.floats(0.6, 1.2)),
    st.builds(complex, st.floats(-0.2, 0.2), st.floats(-0.2, 0.2)),
)


def prefactor(ns, point):
    return expo(point.tau * float(ns.q_shift) + point.u * float(ns.z_power) + point.t * float(ns.w_power))


# -- typical characters


@pytest.mark.parametrize("lam", [F(1, 5), F(2, 7), F(-1, 3)])
def test_typical_matches_its_formal_series(lam):
    ns = typical_char_qseries(L32, (1, 1), lam, 10)
    from_series = prefactor(ns, PT) * ns.series.evaluate(PT.u, PT.tau)
    direct = typical_char(L32, (0, 0), (1, 1), -1j * float(lam), PT)
    assert abs(from_series - direct) < 1e-9


def test_typical_series_normalization_and_symmetry():
    ns = typical_char_qseries(L32, (1, 1), F(1, 5), 8)
    assert ns.series.leading_qexp() == 0
    assert ns.series.coefficient(F(0), 0) == 1
    assert ns.w_power == -1 and ns.z_power == 2 * L32.a * F(1, 5)
    mirrored = {(qe, -ze): c for (qe, ze), c in ns.series.terms.items()}
    assert mirrored == dict(ns.series.terms)


def test_typical_series_rejects_atypical_lambda():
    with pytest.raises(DomainError):
        typical_char_qseries(L32, (1, 1), F(-3, 4), 6)
    with pytest.raises(DomainError):
        typical_char_qseries(L32, (1, 1), F(5, 4), 6)


def test_w_dependence_at_central_charge_minus_one():
    base = typical_char(L32, (0, 1), (1, 1), 0.4, PT)
    assert abs(typical_char(L32, (0, 1), (1, 1), 0.4, ModularPoint(PT.tau, PT.u, PT.t + 1)) - base) < 1e-12 * abs(base)
    half = typical_char(L32, (0, 1), (1, 1), 0.4, ModularPoint(PT.tau, PT.u, PT.t + 0.5))
    assert abs(half - cmath.exp(-1j * math.pi) * base) < 1e-12 * abs(base)


def test_odd_odd_sector_vanishes_at_origin():
    origin = ModularPoint(1j, 0)
    assert abs(typical_char(L32, (1, 1), (1, 1), 0.3, origin)) < 1e-15
    # (1,1;-1) keeps the shifted argument off the divisor at u = 0
    assert abs(atypical_char(L32, (1, 1), (1, 1, -1), origin)) < 1e-15
    assert abs(atypical_char_al(L32, (1, 1), (1, 1, -1), origin)) < 1e-15


# -- Psi and the atypical routes


def test_psi_pole_guard():
    with pytest.raises(PoleError):
        psi(L32, 1, 1, 0.0, 1j)
    with pytest.raises(PoleError):
        psi(L32, 1, 0, 1j, 1j)  # z q^{-1} = 1 hits the second family at n = 0


@pytest.mark.parametrize("level", [L32, L52], ids=str)
def test_two_routes_agree_on_random_points(level):
    worst = 0.0
    for point in random_points(10, seed=11):
        for sector in SectorPair.all():
            for label in discrete_spectra(level):
                worst = max(worst, abs(atypical_char(level, sector, label, point) - atypical_char_al(level, sector, label, point)))
    assert worst <= 1e-10


@settings(max_examples=30, deadline=None)
@given(points, st.sampled_from(SectorPair.all()), st.sampled_from([(L32, lab) for lab in discrete_spectra(L32)] + [(L52, lab) for lab in discrete_spectra(L52)]))
def test_two_routes_agree_property(point, sector, level_label):
    level, label = level_label
    a = atypical_char(level, sector, label, point)
    b = atypical_char_al(level, sector, label, point)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_removable_point_on_the_psi_divisor():
    # Ramond (1,0;0) at u = 0: theta_{11} kills the Psi pole, both routes stay finite
    origin = ModularPoint(1j, 0j)
    a = atypical_char(L32, (1, 1), (1, 0, 0), origin)
    b = atypical_char_al(L32, (1, 1), (1, 0, 0), origin)
    assert abs(a - b) < 1e-12
    near = [atypical_char(L32, (1, 1), (1, 0, 0), ModularPoint(1j, complex(d))) for d in (1e-4, -1e-4)]
    assert abs(a - sum(near) / 2) < 1e-7
    assert abs(atypical_char(L21, (1, 1), (1, 0, 0), origin) - 1) < 1e-11


def test_atypical_matches_series_inside_annulus():
    point = ModularPoint(0.05 + 1j, 0.1 + 0.3j)
    for sector in ((1, 0), (1, 1)):
        for label in ((1, 0, 0), (2, 0, 0)):
            series = atypical_char_from_series(L32, sector, label, point, order=8)
            assert abs(series - atypical_char(L32, sector, label, point)) < 1e-8


def test_series_route_refuses_points_outside_annulus():
    with pytest.raises(DomainError):
        atypical_char_from_series(L32, (1, 0), (1, 0, 0), ModularPoint(1j, 0.1 - 0.2j), order=8)


def test_trivial_level_vacuum_is_one():
    # c = 0 at (2,1): the atypical (1,0;0) Ramond character is the constant 1
    for point in random_points(3, seed=5):
        assert abs(atypical_char(L21, (1, 1), (1, 0, 0), point) - 1) < 1e-11


# -- the level (2,1) identities


@pytest.mark.parametrize("sector", SectorPair.all(), ids=str)
@pytest.mark.parametrize("theta", [-2, -1, 0, 1, 2])
def test_trivial_level_eta_cube_over_theta(sector, theta):
    assert trivial_level_residual(sector, theta, PT) < 1e-9


@pytest.mark.parametrize("theta", [-1, 1])
def test_trivial_level_needs_flow_parity(theta):
    # without (-1)^{theta epsp} the odd-flow rows of the epsp = 1 sectors are off by an overall sign
    for sector in ((0, 1), (1, 1)):
        assert trivial_level_residual(sector, theta, PT, parity=False) > 0.1
    for sector in ((0, 0), (1, 0)):
        assert trivial_level_residual(sector, theta, PT, parity=False) < 1e-9


@pytest.mark.parametrize("u,tau", denominator_points())
def test_ramond_denominator_identity(u, tau):
    assert ramond_denominator_residual(u, tau) < 1e-9
    # the meromorphic sum at level (2,1) is q^{1/8} times the same Appell-Lerch series
    assert abs(expo(-tau / 8) * psi(L21, 1, 0, u, tau) - ramond_denominator_product(u, tau)) < 1e-9


def test_ramond_denominator_product_from_zero_vanishes():
    u, tau = denominator_points()[0]
    assert ramond_denominator_product(u, tau, first_index=0) == 0
    assert abs(ramond_denominator_sum(u, tau)) > 0.1


def test_ramond_denominator_domain():
    with pytest.raises(DomainError):
        ramond_denominator_residual(0.1 - 0.05j, 1j)  # |z| > 1
    with pytest.raises(DomainError):
        ramond_denominator_residual(0.1 + 1.2j, 1j)  # |z| < |q|


# -- sector conversion and spectral flow


@pytest.mark.parametrize("epsp", [0, 1])
def test_ramond_from_ns_matches_direct_sector(epsp):
    typ = TypicalLabel(KacLabel(1, 1), 0.3)
    for point in random_points(5, seed=3):
        assert abs(ramond_from_ns(L32, epsp, (1, 0, 0), point) - atypical_char(L32, (1, epsp), (1, 0, 0), point)) <= 1e-9
        assert abs(ramond_from_ns(L32, epsp, typ, point) - typical_char(L32, (1, epsp), (1, 1), 0.3, point)) <= 1e-9


def test_ramond_from_ns_prefactor_size():
    point = ModularPoint(1j, 0.1)
    label = (1, 0, 0)
    moved = point.with_u(point.u - point.tau / 2)
    ratio = ramond_from_ns(L32, 0, label, point) / character(L32, (0, 0), label, moved)
    assert abs(abs(ratio) - math.exp(math.pi / 12)) < 1e-12


@pytest.mark.parametrize("epsp", [0, 1])
def test_spectral_flow_identity(epsp):
    assert spectral_flow_char_identity(L32, epsp, (1, 0, 0), 1, PT) <= 1e-9
    assert spectral_flow_char_identity(L32, epsp, (1, 0, 0), 0, PT) == 0
    assert spectral_flow_char_identity(L32, epsp, TypicalLabel(KacLabel(1, 1), 0.2), 1, PT) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(points, st.integers(0, 1), st.sampled_from(discrete_spectra(L52)), st.integers(-2, 2))
def test_spectral_flow_identity_property(point, epsp, label, shift):
    lhs_size = abs(character(L52, (0, epsp), label._replace(theta=label.theta + shift), point))
    assert spectral_flow_char_identity(L52, epsp, label, shift, point) <= 1e-9 * max(1.0, lhs_size)
