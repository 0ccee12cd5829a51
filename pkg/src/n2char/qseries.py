"""Truncated formal series in q (rational exponents) and z (integer exponents).

Coefficients are exact rationals.  A series knows its q-cutoff ``order``
(terms with q-exponent >= order are unknown; None means exact) and optionally a
z-cutoff ``zmax`` for expansions that are infinite in z at fixed q-order.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, NotInvertibleError

Key = tuple[Fraction, int]


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _min_order(*orders):
    known = [o for o in orders if o is not None]
    return min(known) if known else None


@dataclass(frozen=True)
class QSeries:
    terms: Mapping[Key, Fraction] = field(default_factory=dict)
    order: Fraction | None = None
    zmax: int | None = None

    def __post_init__(self):
        order = None if self.order is None else as_fraction(self.order)
        clean: dict[Key, Fraction] = {}
        for (qe, ze), c in self.terms.items():
            qe, c = as_fraction(qe), as_fraction(c)
            if c == 0 or (order is not None and qe >= order):
                continue
            if self.zmax is not None and abs(ze) > self.zmax:
                continue
            clean[(qe, int(ze))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "order", order)

    # -- constructors
    @classmethod
    def monomial(cls, qexp=0, zexp: int = 0, coeff=1, order=None) -> "QSeries":
        return cls({(as_fraction(qexp), zexp): as_fraction(coeff)}, order)

    @classmethod
    def one(cls, order=None) -> "QSeries":
        return cls.monomial(0, 0, 1, order)

    @classmethod
    def zero(cls, order=None) -> "QSeries":
        return cls({}, order)

    # -- basic data
    @property
    def denom(self) -> int:
        """Least common denominator of the stored q-exponents (and of the order)."""
        d = 1
        for qe, _ in self.terms:
            d = math.lcm(d, qe.denominator)
        if self.order is not None:
            d = math.lcm(d, self.order.denominator)
        return d

    def coefficient(self, qexp, zexp: int = 0) -> Fraction:
        return self.terms.get((as_fraction(qexp), zexp), Fraction(0))

    def leading_qexp(self) -> Fraction | None:
        return min((qe for qe, _ in self.terms), default=None)

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, order) -> "QSeries":
        return QSeries(self.terms, _min_order(self.order, as_fraction(order)), self.zmax)

    def items(self) -> list[tuple[Key, Fraction]]:
        return sorted(self.terms.items())

    def __len__(self):
        return len(self.terms)

    # -- arithmetic
    def __add__(self, other: "QSeries") -> "QSeries":
        acc: dict[Key, Fraction] = defaultdict(Fraction, self.terms)
        for k, c in other.terms.items():
            acc[k] += c
        return QSeries(acc, _min_order(self.order, other.order), _min_order(self.zmax, other.zmax))

    def __neg__(self) -> "QSeries":
        return QSeries({k: -c for k, c in self.terms.items()}, self.order, self.zmax)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, coeff) -> "QSeries":
        coeff = as_fraction(coeff)
        return QSeries({k: coeff * c for k, c in self.terms.items()}, self.order, self.zmax)

    def shift(self, qexp=0, zexp: int = 0) -> "QSeries":
        """Multiply by the monomial q^qexp z^zexp."""
        qexp = as_fraction(qexp)
        order = None if self.order is None else self.order + qexp
        return QSeries({(qe + qexp, ze + zexp): c for (qe, ze), c in self.terms.items()}, order, self.zmax)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        # a zero series with cutoff o is O(q^o): its valuation is o
        a_val = self.leading_qexp() if self.terms else self.order
        b_val = other.leading_qexp() if other.terms else other.order
        cand = []
        if self.order is not None and b_val is not None:
            cand.append(self.order + b_val)
        if other.order is not None and a_val is not None:
            cand.append(other.order + a_val)
        order = min(cand) if cand else None
        if not self.terms or not other.terms:
            return QSeries({}, order, _min_order(self.zmax, other.zmax))
        b_items = sorted(other.terms.items())
        acc: dict[Key, Fraction] = defaultdict(Fraction)
        for (qa, za), ca in sorted(self.terms.items()):
            for (qb, zb), cb in b_items:
                qe = qa + qb
                if order is not None and qe >= order:
                    break
                acc[(qe, za + zb)] += ca * cb
        return QSeries(acc, order, _min_order(self.zmax, other.zmax))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return series_invert(self) ** (-n)
        out = QSeries.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.terms == other.terms and self.order == other.order

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.order))

    def agrees_with(self, other: "QSeries", order=None) -> bool:
        """Coefficient equality below the common (or given) cutoff."""
        return max_abs_difference(self, other, order) == 0

    # -- numerics and serialization
    def evaluate(self, u: complex, tau: complex) -> complex:
        """Numeric value at z = e^{2 pi i u}, q = e^{2 pi i tau}."""
        if not self.terms:
            return 0j
        keys = list(self.terms)
        qe = np.array([float(k[0]) for k in keys])
        ze = np.array([k[1] for k in keys], dtype=float)
        c = np.array([float(self.terms[k]) for k in keys])
        return complex(np.sum(c * np.exp(2j * np.pi * (qe * tau + ze * u))))

    def to_records(self) -> list[dict]:
        return [
            {"qexp": str(qe), "zexp": ze, "re": str(c), "im": "0"}
            for (qe, ze), c in self.items()
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], order=None) -> "QSeries":
        terms: dict[Key, Fraction] = {}
        for rec in records:
            if Fraction(rec.get("im", "0")) != 0:
                raise DomainError("only real rational coefficients are supported")
            terms[(Fraction(rec["qexp"]), int(rec["zexp"]))] = Fraction(rec["re"])
        return cls(terms, order)


def max_abs_difference(a: QSeries, b: QSeries, order=None) -> Fraction:
    """max |a_k - b_k| over keys below the common cutoff."""
    cut = _min_order(a.order, b.order, None if order is None else as_fraction(order))
    keys = set(a.terms) | set(b.terms)
    worst = Fraction(0)
    for k in keys:
        if cut is not None and k[0] >= cut:
            continue
        worst = max(worst, abs(a.coefficient(*k) - b.coefficient(*k)))
    return worst


def series_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def series_invert(a: QSeries) -> QSeries:
    """Inverse of a series whose lowest q-power is a single nonzero monomial."""
    lead = a.leading_qexp()
    if lead is None:
        raise NotInvertibleError("cannot invert the zero series")
    lead_terms = [(k, c) for k, c in a.terms.items() if k[0] == lead]
    if len(lead_terms) != 1:
        raise NotInvertibleError("leading q-coefficient is not a monomial in z")
    (qe, ze), c = lead_terms[0]
    if a.order is None:
        raise NotInvertibleError("inversion needs a finite cutoff order")
    # a = c q^qe z^ze (1 + rest), rest has strictly positive q-exponents
    rest = a.shift(-qe, -ze).scale(1 / c) - QSeries.one()
    order = a.order - qe
    rest = rest.truncate(order)
    inv = QSeries.one(order)
    power = QSeries.one(order)
    step = rest.leading_qexp()
    if step is not None:
        for k in range(1, int(order / step) + 2):
            power = (power * rest).scale(-1).truncate(order)
            if power.is_zero():
                break
            inv = inv + power
    inv = inv.truncate(order)
    return inv.shift(-qe, -ze).scale(1 / c)


def euler_product(order, power: int = 1) -> QSeries:
    """prod_{n>=1} (1 - q^n)^power to the given q-order (power may be negative)."""
    order = as_fraction(order)
    base = QSeries.one(order)
    for n in range(1, math.ceil(order) + 1):
        base = base * QSeries({(Fraction(0), 0): 1, (Fraction(n), 0): -1}, order)
    if power >= 0:
        return base ** power if power else QSeries.one(order)
    return series_invert(base) ** (-power)


def phi_expansion(p: int, pp: int, r: int, s: int, order, zmax: int = 60) -> QSeries:
    """Expansion in the annulus |q| < |z| < 1 of the meromorphic sum Psi_{p,p';r,s}.

    Sum over n, m >= 0 of z^m phi^{n,m} minus the sum over n, m < 0, with
    phi^{n,m} = q^{pp'(n+(rp'-sp)/2pp')^2 + pnm} - q^{pp'(n+((p-r)p'+(p'-s)p)/2pp')^2 + (pn+p-r)m}.
    The n=0 part of the first family is infinite in z at fixed q-order, so the
    series is cut at |m| <= zmax.
    """
    if not (1 <= r <= p - 1 and 0 <= s <= pp - 1):
        raise DomainError(f"label (r,s)=({r},{s}) out of range for (p,p')=({p},{pp})")
    order = as_fraction(order)
    N = p * pp
    shift_a = Fraction(r * pp - s * p, 2 * N)
    shift_b = Fraction((p - r) * pp + (pp - s) * p, 2 * N)
    acc: dict[Key, Fraction] = defaultdict(Fraction)

    def add(qe: Fraction, m: int, c: int):
        if qe < order and abs(m) <= zmax:
            acc[(qe, m)] += c

    # n range: pp'(n+shift)^2 < order + (possible negative pnm) -- pnm >= 0 in both families
    n_span = int(math.isqrt(int(order / N) + 1)) + 3
    for sign, n_range, m_range in (
        (1, range(0, n_span + 1), range(0, zmax + 1)),
        (-1, range(-n_span - 1, 0), range(-1, -zmax - 1, -1)),
    ):
        for n in n_range:
            base_a = N * (n + shift_a) ** 2
            base_b = N * (n + shift_b) ** 2
            for m in m_range:
                qa = base_a + p * n * m
                qb = base_b + (p * n + p - r) * m
                if qa >= order and qb >= order and (n != 0 or sign < 0):
                    break
                add(qa, m, sign)
                add(qb, m, -sign)
    return QSeries(acc, order, zmax)
