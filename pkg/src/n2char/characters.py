"""Typical and atypical character functions in the four sectors.

Typical character (Kac label (r,s), parameter x, module parameter lam = i x):

    T = (-1)^{eps epsp} q^{a(x - i eps/2)^2} z^{2ia(x - i eps/2)} w^c theta_{eps,epsp}(u) eta^{-2} chi_{r,s}

Atypical character of L(r,s)^theta, with L = lambda_{r,s} - theta + eps/2:

    A = (-1)^{eps epsp} q^{-a L^2} z^{2aL} w^c theta_{eps,epsp}(u) eta^{-3} Psi(u_{eps,epsp} + theta tau)

where u_{eps,epsp} = u + (1-eps) tau/2 + (1-epsp)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bpz import lattice_exponents, minimal_character, minimal_numerator
from .errors import DomainError, PoleError
from .qseries import QSeries, euler_product, phi_expansion
from .specfun import (
    DEFAULT_TRUNC,
    POLE_GUARD,
    Evaluation,
    ModularPoint,
    SectorPair,
    TruncationSpec,
    _geometric_terms,
    appell_lerch,
    dedekind_eta,
    expo,
    gaussian_cutoff,
    jacobi_theta,
    pole_distance,
    pole_free_index,
)
from .spectra import AtypicalLabel, KacLabel, LevelPair, TypicalLabel, check_atypical, is_typical, lambda_rs


def _combine_bound(parts: list[Evaluation], powers: list[int]) -> float:
    """First-order error bound for prod parts[i]^powers[i]."""
    value = 1.0
    rel = 0.0
    for part, power in zip(parts, powers):
        mag = abs(part.value)
        value *= mag ** power
        if part.tail_bound:
            rel += abs(power) * part.tail_bound / mag if mag else math.inf
    if math.isinf(rel):
        return math.inf
    return value * rel


# ---------------------------------------------------------------------------
# typical characters


def typical_envelope(level: LevelPair, sector, point: ModularPoint) -> tuple[float, float]:
    """(curv, lin) with |T(x)| = |T(0)| exp(-curv x^2 + lin x) for real x."""
    e, _ = SectorPair.coerce(sector)
    a = float(level.a)
    tau, u = point.tau, point.u
    curv = 2 * math.pi * a * tau.imag
    lin = 2 * math.pi * a * e * tau.real - 4 * math.pi * a * u.real
    return curv, lin


def typical_char(
    level: LevelPair,
    sector,
    kac,
    x,
    point: ModularPoint,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    return_bound: bool = False,
):
    """Typical character function; ``x`` may be a numpy array."""
    sector = SectorPair.coerce(sector)
    e, ep = sector
    a = float(level.a)
    tau, u, t = point.tau, point.u, point.t
    theta = jacobi_theta(sector, u, tau, trunc, return_bound=True)
    eta = dedekind_eta(tau, trunc, return_bound=True)
    chi = minimal_character(level, kac, tau, trunc, return_bound=True)
    base = theta.value * chi.value / eta.value**2
    shifted = (np.asarray(x, dtype=complex) if isinstance(x, np.ndarray) else complex(x)) - 0.5j * e
    pref = sector.sign * expo(tau * a * shifted**2 + u * 2j * a * shifted + t * float(level.c))
    value = pref * base
    if not return_bound:
        return value
    bound = np.abs(pref) * _combine_bound([theta, eta, chi], [1, -2, 1])
    if isinstance(value, np.ndarray):
        return value, bound
    return Evaluation(complex(value), float(bound))


# ---------------------------------------------------------------------------
# the meromorphic sum and atypical characters


def psi(
    level: LevelPair,
    r: int,
    s: int,
    u: complex,
    tau: complex,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    return_bound: bool = False,
):
    """sum_n q^{pp'(n+alpha)^2}/(1 - z q^{pn}) - q^{pp'(n+beta)^2}/(1 - z q^{pn-r})."""
    p = level.p
    N = p * level.pp
    u, tau = complex(u), complex(tau)
    y = tau.imag
    alpha, beta = lattice_exponents(level, r, s)
    n_min = pole_free_index(abs(u.imag) + r * y, p * y)
    n_max, bound = gaussian_cutoff(
        2 * math.pi * N * y,
        4 * math.pi * N * y * max(abs(alpha), abs(beta)),
        2 * math.log(2.0),
        trunc,
        n_min=n_min,
        what="Psi",
    )
    n = np.arange(-n_max, n_max + 1)
    pole_a = 2j * np.pi * (u + p * n * tau)
    pole_b = 2j * np.pi * (u + (p * n - r) * tau)
    dist = min(pole_distance(pole_a), pole_distance(pole_b))
    if dist < POLE_GUARD:
        raise PoleError("Psi evaluated on its divisor", dist)
    first = _geometric_terms(2j * np.pi * tau * N * (n + alpha) ** 2, pole_a)
    second = _geometric_terms(2j * np.pi * tau * N * (n + beta) ** 2, pole_b)
    value = complex(np.sum(first) - np.sum(second))
    return Evaluation(value, bound) if return_bound else value


def shifted_argument(sector, label: AtypicalLabel, point: ModularPoint) -> complex:
    """u_{eps,epsp} + theta tau."""
    e, ep = SectorPair.coerce(sector)
    return point.u + (1 - e) * point.tau / 2 + (1 - ep) / 2 + label.theta * point.tau


def _atypical_prefactor(level: LevelPair, sector: SectorPair, label: AtypicalLabel, point: ModularPoint) -> complex:
    a = level.a
    shift = lambda_rs(level, label.r, label.s) - label.theta + Fraction(sector.eps, 2)
    return sector.sign * expo(
        point.tau * float(-a * shift * shift) + point.u * float(2 * a * shift) + point.t * float(level.c)
    )


# removable points: theta(u) vanishes where Psi has a pole
REMOVABLE_RADIUS = 1e-3
REMOVABLE_NODES = 32


def _across_removable(evaluate, point: ModularPoint):
    """Evaluate, falling back to the mean over a small u-circle on a removable divisor point.

    The contour residue decides: a genuine pole keeps its PoleError.
    """
    try:
        return evaluate(point)
    except PoleError as err:
        steps = REMOVABLE_RADIUS * np.exp(2j * np.pi * (np.arange(REMOVABLE_NODES) + 0.5) / REMOVABLE_NODES)
        ring = [evaluate(point.with_u(point.u + d)) for d in steps]
        values = np.array([complex(getattr(v, "value", v)) for v in ring])
        residue = np.mean(values * steps)
        if abs(residue) > 1e-6 * REMOVABLE_RADIUS * np.max(np.abs(values)):
            raise err
        centre = complex(np.mean(values))
        if isinstance(ring[0], Evaluation):
            return Evaluation(centre, max(v.tail_bound for v in ring))
        return centre


def atypical_char(
    level: LevelPair,
    sector,
    label,
    point: ModularPoint,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    return_bound: bool = False,
):
    """Atypical character function of L(r,s)^theta via the meromorphic sum Psi."""
    sector = SectorPair.coerce(sector)
    label = check_atypical(level, label)
    return _across_removable(lambda pt: _atypical_psi_route(level, sector, label, pt, trunc, return_bound), point)


def _atypical_psi_route(level, sector, label, point, trunc, return_bound):
    theta = jacobi_theta(sector, point.u, point.tau, trunc, return_bound=True)
    eta = dedekind_eta(point.tau, trunc, return_bound=True)
    mero = psi(level, label.r, label.s, shifted_argument(sector, label, point), point.tau, trunc, return_bound=True)
    pref = _atypical_prefactor(level, sector, label, point)
    value = pref * theta.value * mero.value / eta.value**3
    if not return_bound:
        return value
    return Evaluation(value, abs(pref) * _combine_bound([theta, eta, mero], [1, -3, 1]))


def atypical_char_al(
    level: LevelPair,
    sector,
    label,
    point: ModularPoint,
    trunc: TruncationSpec = DEFAULT_TRUNC,
):
    """Atypical character assembled from two level-2p' Appell-Lerch sums at p tau."""
    sector = SectorPair.coerce(sector)
    label = check_atypical(level, label)
    return _across_removable(lambda pt: _atypical_al_route(level, sector, label, pt, trunc), point)


def _atypical_al_route(level, sector, label, point, trunc):
    e, ep = sector
    r, s, th = label
    p, pp, a = level.p, level.pp, level.a
    tau, u = point.tau, point.u
    flow = Fraction(2 * th + 1 - e, 2)
    slope = a * r - s - pp
    sign = -1 if (e * ep + (1 - ep) * pp) % 2 else 1
    pref = sign * expo(
        tau * float(slope * flow - a * flow * flow) + u * float(slope - 2 * a * flow) + point.t * float(level.c)
    )
    arg = shifted_argument(sector, AtypicalLabel(r, s, th), point)
    bracket = appell_lerch(2 * pp, arg, (r * pp - s * p - p * pp) * tau, p * tau, trunc) - expo(
        tau * r * (s + pp)
    ) * appell_lerch(2 * pp, arg - r * tau, (-r * pp - s * p - p * pp) * tau, p * tau, trunc)
    theta = jacobi_theta(sector, u, tau, trunc)
    eta = dedekind_eta(tau, trunc)
    return theta / eta**3 * pref * bracket


def character(level: LevelPair, sector, label, point: ModularPoint, trunc: TruncationSpec = DEFAULT_TRUNC) -> complex:
    """Dispatch on the label type."""
    if isinstance(label, TypicalLabel):
        return typical_char(level, sector, label.kac, label.x, point, trunc)
    return atypical_char(level, sector, label, point, trunc)


def ramond_from_ns(
    level: LevelPair, epsp: int, label, point: ModularPoint, trunc: TruncationSpec = DEFAULT_TRUNC
) -> complex:
    """Twisted character q^{c/24} z^{-c/6} ch^{0,epsp}(q, z q^{-1/2}, w), evaluated at u - tau/2."""
    c = float(level.c)
    moved = point.with_u(point.u - point.tau / 2)
    return expo(point.tau * c / 24 - point.u * c / 6) * character(level, (0, epsp), label, moved, trunc)


def spectral_flow_char_identity(
    level: LevelPair,
    epsp: int,
    label,
    theta_shift: int,
    point: ModularPoint,
    trunc: TruncationSpec = DEFAULT_TRUNC,
) -> float:
    """|ch(M^theta) - (-1)^{theta epsp} q^{c theta^2/6} z^{c theta/3} ch(M)(q, z q^theta, w)|.

    For an atypical label (r,s;theta0), M^theta is (r,s;theta0+theta).  For a
    typical label ((r,s), x) the flowed module has lam - theta, i.e. x + i theta.
    The sign (-1)^{theta epsp} is the parity of the flowed highest-weight vector
    relative to the normalization of the character functions.
    """
    c = float(level.c)
    th = int(theta_shift)
    sector = (0, epsp)
    if isinstance(label, TypicalLabel):
        flowed = TypicalLabel(KacLabel(*label.kac), complex(label.x) + 1j * th)
    else:
        label = check_atypical(level, label)
        flowed = label._replace(theta=label.theta + th)
    lhs = character(level, sector, flowed, point, trunc)
    moved = point.with_u(point.u + th * point.tau)
    parity = -1 if (th * epsp) % 2 else 1
    rhs = parity * expo(point.tau * c * th * th / 6 + point.u * c * th / 3) * character(level, sector, label, moved, trunc)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# formal series


@dataclass(frozen=True)
class NormalizedSeries:
    """character = q^{q_shift} z^{z_power} w^{w_power} * series."""

    series: QSeries
    q_shift: Fraction
    z_power: Fraction
    w_power: Fraction


def _theta00_series(order: Fraction) -> QSeries:
    terms = {}
    n = 0
    while Fraction(n * n, 2) < order:
        terms[(Fraction(n * n, 2), n)] = 1
        terms[(Fraction(n * n, 2), -n)] = 1
        n += 1
    return QSeries(terms, order)


def _lattice_series(level: LevelPair, r: int, s: int, order: Fraction) -> QSeries:
    """q^{-pp' alpha^2} (eta chi_{r,s}): exponents pp'n^2 + (rp'-sp)n and pp'n^2 - (rp'+sp)n + rs."""
    p, pp = level.p, level.pp
    N = p * pp
    terms: dict = {}
    span = int(math.isqrt(int(order) // N + 1)) + 2 + (r * pp + s * p) // N
    for n in range(-span - 1, span + 2):
        for qe, coeff in ((N * n * n + (r * pp - s * p) * n, 1), (N * n * n - (r * pp + s * p) * n + r * s, -1)):
            if qe < order:
                key = (Fraction(qe), 0)
                terms[key] = terms.get(key, 0) + coeff
    return QSeries(terms, order)


def typical_char_qseries(level: LevelPair, kac, lam, order) -> NormalizedSeries:
    """theta_{0,0} eta^{-2} chi_{r,s} as an exact series with the prefactor split off.

    The full NS character of L_{r,s;lam} is q^{q_shift} z^{2a lam} w^{c} times the
    returned series, whose leading term is 1 at q^0 z^0.
    """
    r, s = KacLabel(*kac)
    lam = Fraction(lam)
    if not is_typical(level, (r, s), lam):
        raise DomainError(f"lambda={lam} is atypical for Kac label {(r, s)}")
    order = Fraction(order)
    a = level.a
    N = level.p * level.pp
    lattice_shift = Fraction((r * level.pp - s * level.p) ** 2, 4 * N)
    series = _theta00_series(order) * _lattice_series(level, r, s, order) * euler_product(order, -3)
    return NormalizedSeries(series.truncate(order), -a * lam * lam + lattice_shift - Fraction(1, 8), 2 * a * lam, level.c)


def atypical_char_from_series(
    level: LevelPair,
    sector,
    label,
    point: ModularPoint,
    order,
    zmax: int = 60,
    trunc: TruncationSpec = DEFAULT_TRUNC,
) -> complex:
    """Atypical character with Psi replaced by its truncated annulus expansion.

    Agrees with atypical_char where |q| < |z| |q|^{theta + (1-eps)/2} < 1.
    """
    sector = SectorPair.coerce(sector)
    label = check_atypical(level, label)
    arg = shifted_argument(sector, label, point)
    zabs = abs(expo(arg))
    if not abs(point.q) < zabs < 1:
        raise DomainError("point lies outside the annulus of the formal expansion")
    phi = phi_expansion(level.p, level.pp, label.r, label.s, order, zmax)
    theta = jacobi_theta(sector, point.u, point.tau, trunc)
    eta = dedekind_eta(point.tau, trunc)
    return _atypical_prefactor(level, sector, label, point) * theta / eta**3 * phi.evaluate(arg, point.tau)


# ---------------------------------------------------------------------------
# the level (2,1) case: Ramond denominator identity of gl(1|1)


def ramond_denominator_product(
    u: complex, tau: complex, first_index: int = 1, trunc: TruncationSpec = DEFAULT_TRUNC
) -> complex:
    """prod_{i >= first_index} (1-q^i)^2 / ((1 - z q^{i-1})(1 - z^{-1} q^i)).

    With first_index = 0 the factor (1 - q^0)^2 makes the product vanish.
    """
    u, tau = complex(u), complex(tau)
    q = expo(tau)
    aq = abs(q)
    scale = 1 + abs(expo(u)) + 1 / abs(expo(u))
    n = first_index
    value = 1 + 0j
    while True:
        value *= (1 - q**n) ** 2 / ((1 - expo(u + (n - 1) * tau)) * (1 - expo(-u + n * tau)))
        n += 1
        if value == 0 or scale * aq ** (n - 1) / (1 - aq) < trunc.tail_tol * 1e-3:
            return value
        if n > trunc.max_index:
            raise DomainError("denominator product did not converge")


def ramond_denominator_sum(u: complex, tau: complex, trunc: TruncationSpec = DEFAULT_TRUNC) -> complex:
    """sum_n (-1)^n q^{n(n+1)/2} / (1 - z q^n), i.e. z^{-1/2} A_1(u, 0; tau)."""
    return expo(-complex(u) / 2) * appell_lerch(1, u, 0, tau, trunc)


def ramond_denominator_residual(u: complex, tau: complex, trunc: TruncationSpec = DEFAULT_TRUNC) -> float:
    """|product - sum| for the gl(1|1) Ramond denominator identity (valid for |q| < |z| < 1)."""
    zabs = abs(expo(u))
    if not abs(expo(tau)) < zabs < 1:
        raise DomainError("the denominator identity is stated for |q| < |z| < 1")
    return abs(ramond_denominator_product(u, tau, 1, trunc) - ramond_denominator_sum(u, tau, trunc))


def trivial_level_residual(
    sector, theta: int, point: ModularPoint, parity: bool = True, trunc: TruncationSpec = DEFAULT_TRUNC
) -> float:
    """|eta^3/theta_{e,e'} - (-1)^{e e'} q^{-(e/2 - theta)^2/2} z^{e/2 - theta} Psi_{2,1;1,0}(u_{e,e'} + theta tau)|.

    For e' = 1 and odd theta the right side picks up (-1)^{theta e'} from the
    half-period in u_{e,e'}; ``parity=False`` leaves it out.
    """
    sector = SectorPair.coerce(sector)
    level = LevelPair(2, 1)
    e = sector.eps
    shift = e / 2 - theta
    lhs = dedekind_eta(point.tau, trunc) ** 3 / jacobi_theta(sector, point.u, point.tau, trunc)
    arg = shifted_argument(sector, AtypicalLabel(1, 0, theta), point)
    rhs = sector.sign * expo(-point.tau * shift * shift / 2 + point.u * shift) * psi(level, 1, 0, arg, point.tau, trunc)
    if parity and (theta * sector.epsp) % 2:
        rhs = -rhs
    return abs(lhs - rhs)
