"""Eta, Jacobi theta, Appell-Lerch sums and the Mordell integral.

All fractional powers of q, z, w are evaluated as exp(2*pi*i * exponent * argument)
with the exponent attached to tau, u or t, so every formula is single valued.
Series are truncated symmetrically with analytic tail bounds; integrals over the
real line use a vectorized adaptive Simpson rule on a window sized from the
Gaussian decay of the integrand.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

POLE_GUARD = 1e-8
_LN2_OVER_2PI = math.log(2.0) / (2 * math.pi)


def expo(x):
    """Return e^{2 pi i x}; works elementwise on numpy arrays."""
    if isinstance(x, np.ndarray):
        return np.exp(2j * np.pi * x)
    return cmath.exp(2j * math.pi * x)


# ---------------------------------------------------------------------------
# configuration records


@dataclass(frozen=True)
class ModularPoint:
    """A point (tau, u, t) with tau in the upper half plane."""

    tau: complex
    u: complex = 0j
    t: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "u", complex(self.u))
        object.__setattr__(self, "t", complex(self.t))
        if not self.tau.imag > 0:
            raise DomainError(f"tau must lie in the upper half plane, got {self.tau}")

    @property
    def q(self) -> complex:
        return expo(self.tau)

    @property
    def z(self) -> complex:
        return expo(self.u)

    @property
    def w(self) -> complex:
        return expo(self.t)

    def s_image(self) -> "ModularPoint":
        """(-1/tau, u/tau, t - u^2/(6 tau))."""
        tau, u = self.tau, self.u
        return ModularPoint(-1 / tau, u / tau, self.t - u * u / (6 * tau))

    def t_image(self) -> "ModularPoint":
        return ModularPoint(self.tau + 1, self.u, self.t)

    def with_u(self, u: complex) -> "ModularPoint":
        return ModularPoint(self.tau, u, self.t)

    def as_dict(self) -> dict:
        return {
            "tau": [self.tau.real, self.tau.imag],
            "u": [self.u.real, self.u.imag],
            "t": [self.t.real, self.t.imag],
        }


@dataclass(frozen=True)
class SectorPair:
    """(eps, epsp): eps=0 Neveu-Schwarz, eps=1 Ramond; epsp=1 selects the supercharacter."""

    eps: int
    epsp: int

    def __post_init__(self):
        if self.eps not in (0, 1) or self.epsp not in (0, 1):
            raise DomainError(f"sector components must be 0 or 1, got {(self.eps, self.epsp)}")

    @classmethod
    def coerce(cls, sector) -> "SectorPair":
        if isinstance(sector, SectorPair):
            return sector
        eps, epsp = sector
        return cls(int(eps), int(epsp))

    @classmethod
    def all(cls) -> list["SectorPair"]:
        return [cls(e, ep) for e in (0, 1) for ep in (0, 1)]

    def swapped(self) -> "SectorPair":
        return SectorPair(self.epsp, self.eps)

    def t_image(self) -> "SectorPair":
        """Sector reached by tau -> tau+1."""
        e, ep = self.eps, self.epsp
        return SectorPair(e, e * ep + (1 - e) * (1 - ep))

    @property
    def sign(self) -> int:
        """(-1)^{eps*epsp}."""
        return -1 if self.eps * self.epsp else 1

    @property
    def phase(self) -> complex:
        """i^{-eps*epsp} on the principal branch."""
        return cmath.exp(-0.5j * math.pi * self.eps * self.epsp)

    def __iter__(self):
        return iter((self.eps, self.epsp))

    def __str__(self):
        return f"({self.eps},{self.epsp})"


@dataclass(frozen=True)
class TruncationSpec:
    """Series cutoff control.

    With ``adaptive`` the cutoff N is the smallest index whose analytic tail bound
    is below ``tail_tol`` (never above ``max_index``).  Without it N = max_index
    and the bound is only reported.
    """

    max_index: int = 2000
    tail_tol: float = 1e-13
    adaptive: bool = True

    def __post_init__(self):
        if self.max_index < 1 or not self.tail_tol > 0:
            raise DomainError("max_index must be positive and tail_tol > 0")


@dataclass(frozen=True)
class QuadratureSpec:
    """Real-line quadrature control.

    half_width=None sizes the window [c-X, c+X] from the Gaussian tail bound;
    a number forces X.  max_half_width caps the automatic choice.
    """

    half_width: float | None = None
    abs_tol: float = 1e-10
    max_refinements: int = 50
    max_half_width: float = 80.0

    def __post_init__(self):
        if not self.abs_tol > 0 or self.max_refinements < 1:
            raise DomainError("abs_tol must be positive and max_refinements >= 1")
        if self.half_width is not None and not self.half_width > 0:
            raise DomainError("half_width must be positive")


DEFAULT_TRUNC = TruncationSpec()
DEFAULT_QUAD = QuadratureSpec()


class Evaluation(NamedTuple):
    value: complex
    tail_bound: float


class QuadResult(NamedTuple):
    value: complex
    error: float
    evaluations: int


def _check_tau(tau) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"tau must lie in the upper half plane, got {tau}")
    return tau


# ---------------------------------------------------------------------------
# tail bounds


def gaussian_tail(curv: float, lin: float, log_scale: float, n: int) -> float:
    """Bound for sum_{|k|>n} exp(log_scale - curv k^2 + lin |k|)."""
    m = n + 1
    ratio_log = -curv * (2 * m + 1) + lin
    if ratio_log >= 0:
        return math.inf
    head = log_scale - curv * m * m + lin * m
    if head < -745:
        return 0.0
    return 2 * math.exp(head) / (-math.expm1(ratio_log))


def gaussian_cutoff(
    curv: float, lin: float, log_scale: float, trunc: TruncationSpec, n_min: int = 0, what: str = "series"
) -> tuple[int, float]:
    """Cutoff N and tail bound for a two-sided series with Gaussian envelope."""
    if not curv > 0:
        raise DomainError(f"{what}: non-decaying envelope")
    if not trunc.adaptive:
        return trunc.max_index, gaussian_tail(curv, lin, log_scale, trunc.max_index)
    excess = max(0.0, log_scale - math.log(trunc.tail_tol))
    guess = (lin + math.sqrt(lin * lin + 4 * curv * excess)) / (2 * curv)
    n = max(int(n_min), int(guess) - 2, 0)
    while True:
        bound = gaussian_tail(curv, lin, log_scale, n)
        if bound <= trunc.tail_tol:
            return n, bound
        n += 1
        if n > trunc.max_index:
            raise ConvergenceError(f"{what}: cutoff exceeds max_index={trunc.max_index}", bound)


def product_cutoff(abs_q: float, weight: float, scale: float, trunc: TruncationSpec, what: str) -> int:
    """Smallest N with scale * expm1(weight |q|^{N+1}/(1-|q|)) <= tail_tol."""
    if not trunc.adaptive:
        return trunc.max_index
    if abs_q == 0:
        return 1
    n = 1
    while scale * math.expm1(weight * abs_q ** (n + 1) / (1 - abs_q)) > trunc.tail_tol:
        n += 1
        if n > trunc.max_index:
            raise ConvergenceError(f"{what}: product cutoff exceeds max_index", scale)
    return n


def _product_bound(partial_abs: float, abs_q: float, weight: float, n: int) -> float:
    return partial_abs * math.expm1(weight * abs_q ** (n + 1) / (1 - abs_q))


def _maybe(value: complex, bound: float, return_bound: bool):
    return Evaluation(complex(value), float(bound)) if return_bound else complex(value)


# ---------------------------------------------------------------------------
# eta and theta


def dedekind_eta(tau: complex, trunc: TruncationSpec = DEFAULT_TRUNC, return_bound: bool = False):
    """q^{1/24} prod_{n>=1} (1 - q^n)."""
    tau = _check_tau(tau)
    q = expo(tau)
    aq = abs(q)
    pref = expo(tau / 24)
    scale = abs(pref) * math.exp(aq / (1 - aq))
    n_max = product_cutoff(aq, 1.0, scale, trunc, "eta")
    n = np.arange(1, n_max + 1)
    value = pref * np.prod(1 - expo(tau * n))
    return _maybe(value, _product_bound(abs(value), aq, 1.0, n_max), return_bound)


def jacobi_theta(
    sector,
    u: complex,
    tau: complex,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    mode: str = "sum",
    return_bound: bool = False,
):
    """theta_{eps,epsp}(u; tau) in product or lattice-sum form."""
    e, ep = SectorPair.coerce(sector)
    tau = _check_tau(tau)
    u = complex(u)
    if mode == "sum":
        y, iu = tau.imag, abs(u.imag)
        n_max, bound = gaussian_cutoff(
            math.pi * y, math.pi * y + 2 * math.pi * iu, math.pi * iu, trunc, what="theta"
        )
        m = np.arange(-n_max, n_max + 1) + e / 2
        terms = np.exp(1j * np.pi * tau * m * m + 2j * np.pi * (u + ep / 2) * m)
        value = cmath.exp(-0.5j * math.pi * e * ep) * terms.sum()
        return _maybe(value, bound, return_bound)
    if mode != "product":
        raise DomainError(f"unknown theta mode {mode!r}")
    q = expo(tau)
    aq, az = abs(q), abs(expo(u))
    weight = 1 + az * aq ** (-(1 - e) / 2) + aq ** (-(1 + e) / 2) / az
    pref = expo(e * u / 2) * expo(e * tau / 8)
    scale = abs(pref) * math.exp(weight * aq / (1 - aq)) * (1 + weight)
    n_max = product_cutoff(aq, weight, scale, trunc, "theta")
    n = np.arange(1, n_max + 1)
    sign = -1 if ep else 1
    factors = (
        (1 - expo(tau * n))
        * (1 + sign * expo(u + tau * (n - (1 - e) / 2)))
        * (1 + sign * expo(-u + tau * (n - (1 + e) / 2)))
    )
    value = pref * np.prod(factors)
    return _maybe(value, _product_bound(abs(value), aq, weight, n_max), return_bound)


# ---------------------------------------------------------------------------
# Appell-Lerch sums


def _geometric_terms(log_num: np.ndarray, log_pole: np.ndarray) -> np.ndarray:
    """exp(log_num)/(1 - exp(log_pole)) evaluated without overflow."""
    big = log_pole.real > 0
    out = np.empty(log_num.shape, dtype=complex)
    out[~big] = np.exp(log_num[~big]) / (1 - np.exp(log_pole[~big]))
    out[big] = -np.exp(log_num[big] - log_pole[big]) / (1 - np.exp(-log_pole[big]))
    return out


def pole_distance(log_pole: np.ndarray) -> float:
    """min |1 - exp(log_pole)| over the array, computed stably."""
    big = log_pole.real > 0
    dist = np.empty(log_pole.shape)
    dist[~big] = np.abs(1 - np.exp(log_pole[~big]))
    dist[big] = np.abs(np.exp(log_pole[big])) * np.abs(1 - np.exp(-log_pole[big]))
    return float(dist.min()) if dist.size else math.inf


def pole_free_index(im_u: float, step: float) -> int:
    """Index beyond which |z q^{step n}| stays outside [1/2, 2]."""
    return int(math.ceil((abs(im_u) + _LN2_OVER_2PI) / step)) + 1


def appell_lerch(
    K: int,
    u: complex,
    v: complex,
    tau: complex,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    return_bound: bool = False,
):
    """A_K(u, v; tau) = z^{K/2} sum_n (-1)^{Kn} y^n q^{K n(n+1)/2} / (1 - z q^n)."""
    if K < 1:
        raise DomainError("Appell-Lerch level must be a positive integer")
    tau = _check_tau(tau)
    u, v = complex(u), complex(v)
    y = tau.imag
    n_max, bound = gaussian_cutoff(
        math.pi * K * y,
        math.pi * K * y + 2 * math.pi * abs(v.imag),
        math.log(2.0) - math.pi * K * u.imag,
        trunc,
        n_min=pole_free_index(u.imag, y),
        what="Appell-Lerch",
    )
    n = np.arange(-n_max, n_max + 1)
    log_pole = 2j * np.pi * (u + n * tau)
    dist = pole_distance(log_pole)
    if dist < POLE_GUARD:
        raise PoleError("Appell-Lerch sum evaluated on its divisor", dist)
    log_num = 2j * np.pi * (v * n + tau * K * n * (n + 1) / 2)
    sign = np.where((K * n) % 2 == 1, -1.0, 1.0)
    value = expo(K * u / 2) * np.sum(sign * _geometric_terms(log_num, log_pole))
    return _maybe(value, bound, return_bound)


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-10,
    max_depth: int = 50,
    initial_panels: int = 32,
    max_panels: int = 4_000_000,
) -> QuadResult:
    """Adaptive Simpson rule, refining all unconverged panels in one vectorized batch.

    ``f`` maps a float array to a (complex) array of the same shape.  The local
    tolerance of a panel is proportional to its width, so the accepted error
    estimates sum to at most ``abs_tol``.
    """
    if not b > a:
        return QuadResult(0j, 0.0, 0)
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    vals = np.asarray(f(np.concatenate([lo, mid, hi])), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("integrand is not finite on the quadrature grid", math.inf)
    f_lo, f_mid, f_hi = np.split(vals, 3)
    whole = (hi - lo) / 6 * (f_lo + 4 * f_mid + f_hi)
    tol = np.full(lo.size, abs_tol / initial_panels)
    evaluations = vals.size
    total, err = 0j, 0.0
    depth = 0
    eps = np.finfo(float).eps
    while lo.size:
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        new = np.asarray(f(np.concatenate([lm, rm])), dtype=complex)
        evaluations += new.size
        if not np.all(np.isfinite(new)):
            raise ConvergenceError("integrand is not finite on the quadrature grid", math.inf)
        f_lm, f_rm = np.split(new, 2)
        left = (mid - lo) / 6 * (f_lo + 4 * f_lm + f_mid)
        right = (hi - mid) / 6 * (f_mid + 4 * f_rm + f_hi)
        delta = left + right - whole
        roundoff = 64 * eps * (np.abs(left) + np.abs(right))
        ok = (np.abs(delta) <= 15 * tol) | (np.abs(delta) <= roundoff)
        total += np.sum((left + right + delta / 15)[ok])
        err += float(np.sum(np.abs(delta[ok]))) / 15
        todo = ~ok
        if not todo.any():
            break
        depth += 1
        if depth > max_depth or 2 * int(todo.sum()) > max_panels:
            residual = err + float(np.sum(np.abs(delta[todo]))) / 15
            raise ConvergenceError("adaptive Simpson refinement budget exceeded", residual)
        lo, mid, hi = lo[todo], mid[todo], hi[todo]
        f_lo, f_mid, f_hi = f_lo[todo], f_mid[todo], f_hi[todo]
        f_lm, f_rm, lm, rm = f_lm[todo], f_rm[todo], lm[todo], rm[todo]
        left, right, half_tol = left[todo], right[todo], tol[todo] / 2
        lo, mid, hi = np.concatenate([lo, mid]), np.concatenate([lm, rm]), np.concatenate([mid, hi])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo, f_mid]),
            np.concatenate([f_lm, f_rm]),
            np.concatenate([f_mid, f_hi]),
        )
        whole = np.concatenate([left, right])
        tol = np.concatenate([half_tol, half_tol])
    return QuadResult(complex(total), err, evaluations)


def gaussian_window(curvature: float, peak: float, abs_tol: float, max_half_width: float) -> float:
    """Half-width X with 2 * int_X^inf peak*exp(-curvature x^2) dx <= abs_tol/2."""
    if not curvature > 0:
        raise DomainError("Gaussian window needs positive curvature")
    if peak <= 0:
        return 1.0
    x = max(1.0, math.sqrt(max(math.log(4 * peak / abs_tol), 1.0) / curvature))
    while peak * math.exp(-curvature * x * x) / (curvature * x) > abs_tol / 4:
        x *= 1.1
        if x > max_half_width:
            raise ConvergenceError("integration window exceeds max_half_width", peak)
    return x


def integrate_line(
    f: Callable[[np.ndarray], np.ndarray],
    center: float,
    curvature: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> QuadResult:
    """Integrate over the real line an integrand bounded by peak*exp(-curvature (x-center)^2).

    The peak is estimated on a coarse grid around ``center``.
    """
    if quad.half_width is not None:
        half = quad.half_width
    else:
        probe = center + np.linspace(-3, 3, 61) / math.sqrt(curvature)
        peak = float(np.max(np.abs(f(probe)))) * 4
        half = gaussian_window(curvature, peak, quad.abs_tol, quad.max_half_width)
    return adaptive_simpson(f, center - half, center + half, quad.abs_tol / 2, quad.max_refinements)


# ---------------------------------------------------------------------------
# Mordell integral


def _mordell_half_width(u: complex, tau: complex, abs_tol: float) -> float:
    y = tau.imag
    growth = 2 * math.pi * abs(u.real)
    log_target = math.log(abs_tol / 2)
    x = (growth + math.sqrt(growth * growth - 4 * math.pi * y * log_target)) / (2 * math.pi * y)
    slope = growth - math.pi
    while True:
        decay = 2 * math.pi * y * x - slope
        if decay > 0 and 2 * math.exp(-math.pi * y * x * x + slope * x) / decay <= abs_tol / 4:
            return x
        x *= 1.05


def mordell_h(
    u: complex,
    tau: complex,
    quad: QuadratureSpec = DEFAULT_QUAD,
    return_bound: bool = False,
):
    """h(u; tau) = int_R exp(pi i tau x^2 - 2 pi u x) / cosh(pi x) dx."""
    tau = _check_tau(tau)
    u = complex(u)
    half = quad.half_width if quad.half_width is not None else _mordell_half_width(u, tau, quad.abs_tol)

    def integrand(x):
        ax = np.abs(x)
        return 2 * np.exp(1j * np.pi * tau * x * x - 2 * np.pi * u * x - np.pi * ax) / (1 + np.exp(-2 * np.pi * ax))

    res = adaptive_simpson(integrand, -half, half, quad.abs_tol / 2, quad.max_refinements)
    return _maybe(res.value, res.error + quad.abs_tol / 2, return_bound)
