"""Level constants, module labels, typicality and the discrete spectra.

A level is a coprime pair (p, p') with p >= 2; a = p'/p and c = 3(1 - 2a).
Atypical modules are labelled (r, s; theta): the spectral flow by theta of the
module with label (r, s).  Typical modules carry a Kac label and a parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DomainError


@dataclass(frozen=True)
class LevelPair:
    p: int
    pp: int

    def __post_init__(self):
        if self.p < 2 or self.pp < 1:
            raise DomainError(f"need p >= 2 and p' >= 1, got ({self.p},{self.pp})")
        if math.gcd(self.p, self.pp) != 1:
            raise DomainError(f"p and p' must be coprime, got ({self.p},{self.pp})")

    @property
    def a(self) -> Fraction:
        return Fraction(self.pp, self.p)

    @property
    def c(self) -> Fraction:
        return 3 * (1 - 2 * self.a)

    @property
    def k(self) -> int:
        return (self.pp - self.ell) // self.p

    @property
    def ell(self) -> int:
        """The residue of p' mod p, taken in 1..p-1."""
        return self.pp % self.p

    def __str__(self):
        return f"({self.p},{self.pp})"


class KacLabel(NamedTuple):
    r: int
    s: int


class AtypicalLabel(NamedTuple):
    r: int
    s: int
    theta: int

    def __str__(self):
        return f"({self.r},{self.s};{self.theta})"


class TypicalLabel(NamedTuple):
    kac: KacLabel
    x: complex


class HighestWeight(NamedTuple):
    h: Fraction | complex
    j: Fraction | complex
    c: Fraction


Label = Union[AtypicalLabel, TypicalLabel]


def lambda_rs(level: LevelPair, r: int, s: int) -> Fraction:
    """(r-1)/2 - s p/(2 p')."""
    return Fraction(r - 1, 2) - Fraction(s * level.p, 2 * level.pp)


def delta_rs(level: LevelPair, r: int, s: int) -> Fraction:
    """Delta_{r,s} = ((ar - s)^2 - a^2)/(4a), written over the common denominator 4pp'."""
    p, pp = level.p, level.pp
    return Fraction((r * pp - s * p) ** 2 - pp * pp, 4 * p * pp)


def check_atypical(level: LevelPair, label) -> AtypicalLabel:
    label = AtypicalLabel(*label)
    if not (1 <= label.r <= level.p - 1 and 0 <= label.s <= level.pp - 1):
        raise DomainError(f"atypical label {label} out of range for level {level}")
    return label


# ---------------------------------------------------------------------------
# discrete spectra


def spectral_class_index(level: LevelPair, label: AtypicalLabel) -> int | None:
    """The m in 0..p-1 with 2m + 2p' - p = 2(r - 2 theta)p' - (2s+1)p, if any."""
    r, s, th = label
    twice = 2 * (r - 2 * th) * level.pp - (2 * s + 1) * level.p - 2 * level.pp + level.p
    if twice % 2:
        return None
    m = twice // 2
    return m if 0 <= m <= level.p - 1 else None


def residue_pair(level: LevelPair, m: int) -> tuple[int, int]:
    """(r_m, s_m) with 0 <= r_m <= p-1, 0 <= s_m <= ell-1 and m = ell r_m - p s_m."""
    p, ell = level.p, level.ell
    for r_m in range(p):
        num = ell * r_m - m
        if num % p == 0 and 0 <= num // p <= ell - 1:
            return r_m, num // p
    raise DomainError(f"no residue pair for m={m} at level {level}")


def discrete_spectra_by_class(level: LevelPair) -> dict[int, list[AtypicalLabel]]:
    out: dict[int, list[AtypicalLabel]] = {}
    for m in range(level.p):
        r_m, s_m = residue_pair(level, m)
        out[m] = [
            AtypicalLabel(2 * th + 1 + r_m, level.k * r_m + s_m, th)
            for th in range(-(r_m // 2), (level.p - r_m) // 2)
        ]
    return out


def discrete_spectra(level: LevelPair) -> list[AtypicalLabel]:
    """All labels of the discrete spectra, ordered by (m, theta)."""
    return [lab for labs in discrete_spectra_by_class(level).values() for lab in labs]


# ---------------------------------------------------------------------------
# spectral flow canonical forms


class CanonicalForm(NamedTuple):
    """Either an unflowed atypical module (kind 'atypical', label (r,s;0)) or the
    highest-weight form L_{r,s;lam} (kind 'highest_weight', kac=(r,s), lam)."""

    kind: str
    r: int
    s: int
    lam: Fraction | None
    case: str


def canonical_atypical(level: LevelPair, label) -> CanonicalForm:
    """Identify the flowed module L(r,s)^theta as L(r',s') or L_{r,s';lam}.

    The six-case table covers -p+r <= theta <= r for the boundary values of s.
    Outside it we compose flows: L(r,0)^r = L(p-r,p'-1) and
    L(r,p'-1)^{-p+r} = L(p-r,0), which for p' = 1 gives period p in theta.
    """
    r, s, th = check_atypical(level, label)
    p, pp = level.p, level.pp
    if pp == 1:
        # L(r,0)^p = L(r,0): the negative-flow rows would need s+1 = p'
        th %= p
    if th == 0:
        return CanonicalForm("atypical", r, s, None, "identity")
    top = pp - 1
    if s != top and th < 0:
        return CanonicalForm("highest_weight", r, s + 1, lambda_rs(level, r, s + 1) - th, "negative-flow")
    if s == top and th < 0:
        if th == -p + r:
            return CanonicalForm("atypical", p - r, 0, None, "negative-flow-boundary")
        if th > -p + r:
            return CanonicalForm(
                "highest_weight", r, s + 1, lambda_rs(level, r, s + 1) - th, "negative-flow-top"
            )
        inner = canonical_atypical(level, (p - r, 0, th + p - r))
        return inner._replace(case="composed:" + inner.case)
    if s == 0 and th > 0:
        if th < r:
            return CanonicalForm("highest_weight", r, 0, lambda_rs(level, r, 0) - th, "positive-flow-bottom")
        if th == r:
            return CanonicalForm("atypical", p - r, top, None, "positive-flow-boundary")
        inner = canonical_atypical(level, (p - r, top, th - r))
        return inner._replace(case="composed:" + inner.case)
    # s != 0 and theta > 0
    return CanonicalForm("highest_weight", r, s, lambda_rs(level, r, s) - th, "positive-flow")


def is_typical(level: LevelPair, kac, lam: complex | Fraction, tol: float = 1e-12) -> bool:
    """True iff lam avoids {lambda_{r,s}, lambda_{p-r,p'-s}} + Z."""
    r, s = kac
    if isinstance(lam, (Fraction, int)):
        for base in (lambda_rs(level, r, s), lambda_rs(level, level.p - r, level.pp - s)):
            if (Fraction(lam) - base).denominator == 1:
                return False
        return True
    lam = complex(lam)
    if abs(lam.imag) > tol:
        return True
    for base in (lambda_rs(level, r, s), lambda_rs(level, level.p - r, level.pp - s)):
        diff = lam.real - float(base)
        if abs(diff - round(diff)) < tol:
            return False
    return True


def highest_weight_of(level: LevelPair, label: Label) -> HighestWeight:
    """(h, j, c) of a typical module (lam = i x) or of a flowed atypical module."""
    a, c = level.a, level.c
    if isinstance(label, TypicalLabel):
        r, s = label.kac
        lam = 1j * complex(label.x)
        return HighestWeight(float(delta_rs(level, r, s)) - float(a) * lam * lam, 2 * float(a) * lam, c)
    form = canonical_atypical(level, label)
    if form.kind == "atypical":
        lam = lambda_rs(level, form.r, form.s)
        return HighestWeight(a * lam, 2 * a * lam, c)
    return HighestWeight(delta_rs(level, form.r, form.s) - a * form.lam**2, 2 * a * form.lam, c)
