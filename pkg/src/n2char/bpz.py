"""Kac table, normalized minimal-series characters and their modular S-matrix."""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .specfun import DEFAULT_TRUNC, Evaluation, TruncationSpec, _check_tau, dedekind_eta, gaussian_cutoff
from .spectra import KacLabel, LevelPair


def kac_table(level: LevelPair) -> list[KacLabel]:
    """{(m,n): 1<=m<=p-1, 1<=n<=p'-1, m p' + n p <= p p'} in lexicographic order."""
    p, pp = level.p, level.pp
    return [
        KacLabel(m, n)
        for m in range(1, p)
        for n in range(1, pp)
        if m * pp + n * p <= p * pp
    ]


def _check_kac(level: LevelPair, label) -> KacLabel:
    label = KacLabel(*label)
    if label not in kac_table(level):
        raise DomainError(f"{tuple(label)} is not in the Kac table of {level}")
    return label


def lattice_exponents(level: LevelPair, r: int, s: int) -> tuple[float, float]:
    """The two shifts (rp'-sp)/2pp' and (-rp'-sp)/2pp' of the theta-difference."""
    n = 2 * level.p * level.pp
    return (r * level.pp - s * level.p) / n, (-r * level.pp - s * level.p) / n


def minimal_numerator(level: LevelPair, r: int, s: int, tau: complex, trunc: TruncationSpec = DEFAULT_TRUNC) -> Evaluation:
    """eta(tau) chi_{r,s}(tau): difference of two shifted lattice sums."""
    tau = _check_tau(tau)
    N = level.p * level.pp
    alpha, beta = lattice_exponents(level, r, s)
    curv = 2 * math.pi * N * tau.imag
    lin = 4 * math.pi * N * tau.imag * max(abs(alpha), abs(beta))
    n_max, bound = gaussian_cutoff(curv, lin, math.log(2.0), trunc, what="minimal character")
    n = np.arange(-n_max, n_max + 1)
    terms = np.exp(2j * np.pi * tau * N * (n + alpha) ** 2) - np.exp(2j * np.pi * tau * N * (n + beta) ** 2)
    return Evaluation(complex(terms.sum()), bound)


def minimal_character(
    level: LevelPair, label, tau: complex, trunc: TruncationSpec = DEFAULT_TRUNC, return_bound: bool = False
):
    """chi_{r,s}(tau) = eta^{-1} sum_n (q^{pp'(n+alpha)^2} - q^{pp'(n+beta)^2})."""
    r, s = label
    num = minimal_numerator(level, r, s, tau, trunc)
    eta = dedekind_eta(tau, trunc, return_bound=True)
    value = num.value / eta.value
    if not return_bound:
        return value
    bound = (num.tail_bound + abs(value) * eta.tail_bound) / (abs(eta.value) - eta.tail_bound)
    return Evaluation(value, bound)


def virasoro_s(level: LevelPair, first, second) -> float:
    """sqrt(8/pp') (-1)^{(r+s)(r'+s')} sin(pi(p-p') r r'/p) sin(pi(p-p') s s'/p')."""
    r, s = _check_kac(level, first)
    r2, s2 = _check_kac(level, second)
    p, pp = level.p, level.pp
    sign = -1 if ((r + s) * (r2 + s2)) % 2 else 1
    # integer numerators reduced mod 2p, 2p' keep the table exactly symmetric
    first = ((p - pp) * r * r2) % (2 * p)
    second = ((p - pp) * s * s2) % (2 * pp)
    return math.sqrt(8 / (p * pp)) * sign * math.sin(math.pi * first / p) * math.sin(math.pi * second / pp)


def virasoro_s_matrix(level: LevelPair) -> np.ndarray:
    table = kac_table(level)
    return np.array([[virasoro_s(level, a, b) for b in table] for a in table])


def check_virasoro_unitarity(level: LevelPair) -> float:
    """max |sum_c S_{a,c} S_{c,b} - delta_{a,b}|."""
    mat = virasoro_s_matrix(level)
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(mat @ mat - np.eye(len(mat)))))
