"""Typical NS characters from the affine sl(2|1) character formula and its reduction.

An independent route to the q,z-expansion of typical characters: the
Weyl-group alternating sum for L(Lambda_{r,s;lam}) is specialized to two
variables and divided by the gl(1|1) denominator R.  Weights of the affine
algebra are carried as coefficient vectors over (Lambda_0, delta, beta_1, beta_2)
and mapped to monomials q^A z^B by

    e^{Lambda_0} -> 1,  e^{delta} -> q^{-1},  e^{beta_1} -> z^{-1} q^{-1/2},  e^{beta_2} -> z q^{-1/2}.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .characters import NormalizedSeries, typical_char_qseries
from .errors import DomainError, NotInvertibleError
from .qseries import QSeries, as_fraction, max_abs_difference, series_invert
from .spectra import KacLabel, LevelPair, is_typical, lambda_rs


class Weight(NamedTuple):
    """Coefficients of Lambda_0, delta, beta_1, beta_2."""

    lambda0: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    beta1: Fraction = Fraction(0)
    beta2: Fraction = Fraction(0)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(*(x + y for x, y in zip(self, other)))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(*(x - y for x, y in zip(self, other)))

    def scale(self, c) -> "Weight":
        c = as_fraction(c)
        return Weight(*(c * x for x in self))


DELTA = Weight(delta=Fraction(1))
BETA1 = Weight(beta1=Fraction(1))
BETA2 = Weight(beta2=Fraction(1))
ALPHA0 = DELTA - BETA1 - BETA2

# images of e^{delta}, e^{beta_1}, e^{beta_2} as (q-exponent, z-exponent)
_IMAGES = {"delta": (Fraction(-1), Fraction(0)), "beta1": (Fraction(-1, 2), Fraction(-1)), "beta2": (Fraction(-1, 2), Fraction(1))}


def specialize(weight: Weight) -> tuple[Fraction, Fraction]:
    """(A, B) with e^{weight} -> q^A z^B; the Lambda_0 component is dropped (e^{Lambda_0} = 1)."""
    qe = zq = Fraction(0)
    for name, (dq, dz) in _IMAGES.items():
        c = getattr(weight, name)
        qe += c * dq
        zq += c * dz
    return qe, zq


@dataclass(frozen=True)
class AffineTypicalLabel:
    level: LevelPair
    r: int
    s: int
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        p, pp = self.level.p, self.level.pp
        if not (1 <= self.r <= p - 1 and 1 <= self.s <= pp - 1 and self.r * pp + self.s * p <= p * pp):
            raise DomainError(f"({self.r},{self.s}) is not in the Kac table of {self.level}")
        if not is_typical(self.level, (self.r, self.s), self.lam):
            raise DomainError(f"lambda={self.lam} is atypical for {(self.r, self.s)}")

    @property
    def affine_level(self) -> Fraction:
        return -1 + self.level.a

    @property
    def lambda_rs(self) -> Fraction:
        return lambda_rs(self.level, self.r, self.s)

    @property
    def h_lambda(self) -> Fraction:
        """Lowest conformal weight a(lambda_{r,s}^2 - lam^2)."""
        return self.level.a * (self.lambda_rs**2 - self.lam**2)

    @property
    def highest_weight(self) -> Weight:
        a, lrs, lam = self.level.a, self.lambda_rs, self.lam
        return Weight(self.affine_level, Fraction(0), a * (-lrs - lam), a * (-lrs + lam))


def _monomial(qe: Fraction, ze: Fraction, coeff, order) -> QSeries:
    if ze.denominator != 1:
        raise DomainError("specialization produced a fractional power of z")
    return QSeries.monomial(qe, int(ze), coeff, order)


def affine_numerator_series(label: AffineTypicalLabel, order) -> QSeries:
    """sum_l q^{(pp'l + rp' - sp) l} y^{p'l} - q^{(pl - r)(p'l - s)} y^{-p'l + s}, specialized.

    q here is e^{-delta} and y = e^{alpha_0}; the extra e^{Lambda} is not included.
    """
    order = as_fraction(order)
    p, pp, r, s = label.level.p, label.level.pp, label.r, label.s
    y_q, y_z = specialize(ALPHA0)
    if y_z.denominator != 1:
        raise DomainError("y does not specialize to an integral z-power")
    acc: dict = defaultdict(Fraction)
    # both exponents are N l^2 + b l + c with |b| <= lin and |c| <= const
    N = p * pp
    lin = float(r * pp + s * p + abs(y_q) * pp)
    const = float(r * s + abs(y_q) * s)
    span = int((lin + math.sqrt(lin * lin + 4 * N * (float(order) + const))) / (2 * N)) + 2
    for l in range(-span, span + 1):
        for qe, ypow, coeff in (
            ((p * pp * l + r * pp - s * p) * l, pp * l, 1),
            ((p * l - r) * (pp * l - s), -pp * l + s, -1),
        ):
            qtot = qe + ypow * y_q
            if qtot < order:
                acc[(Fraction(qtot), int(ypow * y_z))] += coeff
    return QSeries(acc, order)


def ramond_denominator_series(order, regularize: bool = False) -> QSeries:
    """The sl(2|1) Ramond denominator R~ specialized to (q, z), as a product series.

    With z_1 z_2 = q^{-1} the n = 1 factor (1 - q z_1 z_2) is identically zero, so
    the literal product vanishes.  ``regularize`` drops that single factor.
    """
    order = as_fraction(order)
    q1 = specialize(BETA1)
    q2 = specialize(BETA2)
    z12 = specialize(BETA1 + BETA2)
    out = QSeries.one(order)
    n_max = math.ceil(order) + 1
    for n in range(1, n_max + 1):
        numer = [
            (Fraction(n), Fraction(0)),
            (Fraction(n), Fraction(0)),
            (n + z12[0], z12[1]),
            (n - 1 - z12[0], -z12[1]),
        ]
        denom = [(n + q1[0], q1[1]), (n - 1 - q1[0], -q1[1]), (n + q2[0], q2[1]), (n - 1 - q2[0], -q2[1])]
        for qe, ze in numer:
            if regularize and qe == 0 and ze == 0:
                continue
            out = out * (QSeries.one(order) - _monomial(qe, ze, 1, order))
        for qe, ze in denom:
            factor = QSeries.one(order) + _monomial(qe, ze, 1, order)
            out = out * series_invert(factor)
    return out.truncate(order)


def ns_denominator_series(order) -> QSeries:
    """R = prod (1-q^n)^2 / ((1 + z q^{n-1/2})(1 + z^{-1} q^{n-1/2}))."""
    order = as_fraction(order)
    out = QSeries.one(order)
    half = Fraction(1, 2)
    for n in range(1, math.ceil(order) + 2):
        out = out * (QSeries.one(order) - QSeries.monomial(n, 0, 1, order)) ** 2
        for ze in (1, -1):
            out = out * series_invert(QSeries.one(order) + QSeries.monomial(n - half, ze, 1, order))
    return out.truncate(order)


def reduced_prefactor(label: AffineTypicalLabel) -> tuple[Fraction, Fraction, Fraction]:
    """(q, z, w) exponents of q^{h_Lambda - (1-2a)/8} w^{3(1-2a)} e^{Lambda} after specialization."""
    a = label.level.a
    lam_q, lam_z = specialize(label.highest_weight)
    return label.h_lambda - (1 - 2 * a) / 8 + lam_q, lam_z, 3 * (1 - 2 * a)


def reduced_typical_qseries(label: AffineTypicalLabel, order) -> NormalizedSeries:
    """ch^{0,0}(L_{r,s;lam}) = prefactor * numerator / R, normalized like typical_char_qseries."""
    order = as_fraction(order)
    numerator = affine_numerator_series(label, order)
    try:
        inverse = series_invert(ns_denominator_series(order))
    except NotInvertibleError as exc:  # R has leading term 1
        raise RuntimeError("NS denominator failed to invert") from exc
    q_shift, z_power, w_power = reduced_prefactor(label)
    return NormalizedSeries((numerator * inverse).truncate(order), q_shift, z_power, w_power)


def oracle_compare(label: AffineTypicalLabel, order) -> Fraction:
    """max |coefficient difference| between the reduced affine series and the direct one.

    Prefactor exponents must agree exactly; a mismatch is reported as an infinite
    difference via ValueError.
    """
    mine = reduced_typical_qseries(label, order)
    theirs = typical_char_qseries(label.level, KacLabel(label.r, label.s), label.lam, order)
    if (mine.q_shift, mine.z_power, mine.w_power) != (theirs.q_shift, theirs.z_power, theirs.w_power):
        raise ValueError(
            f"prefactor mismatch: {(mine.q_shift, mine.z_power, mine.w_power)} vs "
            f"{(theirs.q_shift, theirs.z_power, theirs.w_power)}"
        )
    return max_abs_difference(mine.series, theirs.series, order)
