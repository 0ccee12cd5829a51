"""Atypical-typical-typical Verlinde coefficients, smeared against Gaussian tests.

The coefficient N^{(mu2;x2)}_{lam,(mu1;x1)} is a distribution in x2.  We only
compute its pairing with g_{sigma,c}(x2) = exp(-(x2-c)^2/2 sigma^2)/(sigma sqrt(2 pi)):

    int dx2 g(x2) sum_{mu'} int dx' S^{at}_{lam,(mu';x')} S^{tt}_{(mu1;x1),(mu';x')}
                                     S^{tt}_{(mu2;-x2),(mu';x')} / S^{at}_{(1,0;0),(mu';x')}

with all S-data in sector (0,0).
"""
from __future__ import annotations

import math

import numpy as np

from .bpz import kac_table, virasoro_s
from .errors import DomainError
from .modular import gaussian_test, s_at, s_tt
from .specfun import DEFAULT_QUAD, QuadratureSpec, integrate_line
from .spectra import AtypicalLabel, KacLabel, LevelPair, check_atypical, discrete_spectra, lambda_rs

NS = (0, 0)
VACUUM = AtypicalLabel(1, 0, 0)
DENOMINATOR_GUARD = 1e-12

# For (p,p') = (3,2) the coefficient is delta(x1 - i eps/2 - x2) with this eps per label.
DELTA_SHIFTS_3_2 = {AtypicalLabel(1, 0, 0): 0, AtypicalLabel(2, 0, 0): 1, AtypicalLabel(1, 1, -1): -1}


def _check_level(level: LevelPair, label) -> AtypicalLabel:
    if level.pp < 2:
        raise DomainError("Verlinde coefficients need p' >= 2 (the Kac table is empty otherwise)")
    label = check_atypical(level, label)
    if label not in discrete_spectra(level):
        raise DomainError(f"{label} is not in the discrete spectra of {level}")
    return label


def denominator_floor(level: LevelPair, kac) -> float:
    """Lower bound of |S^{at}_{(1,0;0),(mu';x')}| over real x' (up to the exponential factor, which is 1 here).

    With s = 0 the kernel is sin(2 pi lambda_{r',s'}) / (cosh(2 pi x') - cos(2 pi lambda_{r',s'})),
    which decays but never vanishes; the guard is on its constant prefactor.
    """
    r2, s2 = kac
    return abs(
        (2 / level.p) * math.sin(math.pi * float(level.a) * r2) * math.sin(2 * math.pi * float(lambda_rs(level, r2, s2)))
    )


def verlinde_integrand(level: LevelPair, label, kac1, x1: complex, kac2, x2: complex, xp) -> np.ndarray:
    """sum over mu' of the three-S ratio at x' (array), before any x2 pairing."""
    label = _check_level(level, label)
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    total = np.zeros(xp.shape, dtype=complex)
    for mid in kac_table(level):
        if denominator_floor(level, mid) < DENOMINATOR_GUARD:
            raise DomainError(f"S^at denominator vanishes for {tuple(mid)}")
        ratio = s_at(level, NS, label, mid, xp) / s_at(level, NS, VACUUM, mid, xp)
        total += ratio * s_tt(level, NS, kac1, x1, mid, xp.astype(complex)) * s_tt(level, NS, kac2, -x2, mid, xp.astype(complex))
    return total


def _growth_rate(level: LevelPair, label: AtypicalLabel, x1: complex) -> float:
    """Linear coefficient of log|integrand| in x' from the exponential factors."""
    a = float(level.a)
    shift = float(lambda_rs(level, label.r, label.s)) - label.theta
    return -4 * math.pi * a * (shift - float(lambda_rs(level, 1, 0))) + 4 * math.pi * a * complex(x1).imag


def verlinde_pairing(
    level: LevelPair,
    atypical,
    kac1,
    x1: complex,
    kac2,
    center: float,
    sigma: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> complex:
    """int dx2 g_{sigma,center}(x2) N^{(kac2;x2)}_{atypical,(kac1;x1)}.

    The x2 pairing is done first, for each x'.  Its integrand is entire in x2,
    so it is evaluated on the line through its saddle, x2 = center + y + 4 pi i a sigma^2 x',
    where it is a plain Gaussian and a fixed trapezoid grid is exponentially
    accurate.  The x' integral stays on the real line (the S^{at} kernels have
    poles off it) and uses the adaptive rule.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    label = _check_level(level, atypical)
    kac1, kac2 = KacLabel(*kac1), KacLabel(*kac2)
    a = float(level.a)
    root = math.sqrt(2 * a)
    step = sigma / 3
    grid = step * np.arange(-36, 37)
    norm = 1 / (sigma * math.sqrt(2 * math.pi))

    def integrand(xs):
        xs = np.asarray(xs, dtype=float)
        total = np.zeros(xs.shape, dtype=complex)
        nodes = center + grid[None, :] + 4j * np.pi * a * sigma * sigma * xs[:, None]
        # int dx2 g(x2) exp(4 pi i a x2 x'), the x2-dependence of S^{tt}_{(mu2;-x2),(mu';x')}
        log_terms = 4j * np.pi * a * nodes * xs[:, None] - (nodes - center) ** 2 / (2 * sigma * sigma)
        smeared = step * norm * np.sum(np.exp(log_terms), axis=1)
        for mid in kac_table(level):
            if denominator_floor(level, mid) < DENOMINATOR_GUARD:
                raise DomainError(f"S^at denominator vanishes for {tuple(mid)}")
            ratio = s_at(level, NS, label, mid, xs) / s_at(level, NS, VACUUM, mid, xs)
            first = s_tt(level, NS, kac1, x1, mid, xs.astype(complex))
            total += ratio * first * virasoro_s(level, kac2, mid) * root * smeared
        return total

    curv = 8 * math.pi**2 * a * a * sigma * sigma
    peak = _growth_rate(level, label, x1) / (2 * curv)
    return integrate_line(integrand, peak, curv, quad).value


def delta_shift(level: LevelPair, label) -> int:
    """The eps with N = delta(x1 - i eps/2 - x2); only known in closed form at (3,2)."""
    if (level.p, level.pp) != (3, 2):
        raise DomainError("the closed form of the Verlinde coefficient is only available at (p,p') = (3,2)")
    return DELTA_SHIFTS_3_2[AtypicalLabel(*label)]


def predicted_pairing(level: LevelPair, label, x1: complex, center: float, sigma: float) -> complex:
    """g_{sigma,center}(x1 - i eps/2): the pairing predicted by N = delta(x1 - i eps/2 - x2)."""
    eps = delta_shift(level, label)
    return complex(gaussian_test(complex(x1) - 0.5j * eps, sigma, center))
