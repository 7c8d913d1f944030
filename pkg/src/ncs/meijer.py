"""Meijer-G weight functions ``G^{q,0}_{p,q}`` solving the Stieltjes moment problems.

A weight is stored by its parameter lists: the Mellin transform is

    int_0^inf x^(s-1) G(beta x) dx = beta^(-s) prod Gamma(bottom_j + s) / prod Gamma(top_i + s).

Values are produced by a small registry of closed forms when the parameter
lists allow it, and otherwise by numerical Mellin-Barnes inversion along a
vertical line placed at the saddle point of ``|x^(-s) M(s)|`` (this keeps the
integrand free of cancellation, so the result has a small *relative* error even
where the weight is exponentially small).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import digamma, gammaln, kv, loggamma

from .errors import NegativeWeightError, NonConvergentError
from .hyper import DEFAULT_BUDGET, HypergeometricModel, SeriesBudget, gamma_ratio
from .quadrature import RadialQuadrature, moments

__all__ = [
    "MeijerWeight",
    "ContourSpec",
    "bg_weight",
    "kp_weight",
    "weight_eval",
    "mellin",
    "moment_check",
    "default_rule",
]

# parameters closer than this are treated as equal and cancelled
_CANCEL_TOL = 1e-14
# exp() of anything below this underflows to zero
_LOG_TINY = -745.0
# largest contour half-height tried before giving up
_MAX_HALF_HEIGHT = 2.0 ** 16
# negative contour results smaller than this fraction of the absolute integral are rounding
_NEG_SLACK = 1e-10


@dataclass(frozen=True)
class ContourSpec:
    """Vertical Mellin-Barnes contour ``Re s = abscissa``.

    ``abscissa=None`` puts the line at the saddle point for every x (the
    default); ``half_height=None`` doubles from 8 until the Mellin transform has
    decayed by ``tail_tol`` relative to its value on the real axis.
    """

    abscissa: float | None = None
    half_height: float | None = None
    nodes: int = 2048
    tail_tol: float = 1e-18

    def __post_init__(self):
        if self.abscissa is not None and not self.abscissa > 0:
            raise ValueError("contour abscissa must be positive")
        if self.half_height is not None and not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if int(self.nodes) < 16:
            raise ValueError("nodes must be >= 16")
        if not 0 < self.tail_tol < 1:
            raise ValueError("tail_tol must lie in (0, 1)")


DEFAULT_CONTOUR = ContourSpec()


@dataclass(frozen=True)
class MeijerWeight:
    """``G^{m,0}_{p,q}(scale * x | top; bottom)`` with ``m = q``.

    ``prefactor`` is the Gamma-ratio constant that turns the weight into the
    radial part of the resolution-of-identity measure; ``support`` is the
    upper end of the support (``inf`` unless the weight lives on ``[0, R]``).
    """

    top: tuple[float, ...]
    bottom: tuple[float, ...]
    scale: float = 1.0
    prefactor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(float(v) for v in self.top))
        object.__setattr__(self, "bottom", tuple(float(v) for v in self.bottom))
        if not self.bottom:
            raise ValueError("a G^{m,0} weight needs at least one lower parameter")
        if min(self.bottom) <= -1.0:
            raise ValueError("lower parameters must exceed -1 so that moments exist from s = 1")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def m(self) -> int:
        return len(self.bottom)

    @property
    def n_idx(self) -> int:
        return 0

    @property
    def p(self) -> int:
        return len(self.top)

    @property
    def q(self) -> int:
        return len(self.bottom)

    def reduced(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Parameter lists with equal top/bottom pairs cancelled."""
        top = list(self.top)
        bottom = []
        for b in self.bottom:
            hit = next((i for i, a in enumerate(top) if abs(a - b) <= _CANCEL_TOL), None)
            if hit is None:
                bottom.append(b)
            else:
                top.pop(hit)
        return tuple(top), tuple(bottom)

    @property
    def support(self) -> float:
        top, bottom = self.reduced()
        return 1.0 / self.scale if len(top) == len(bottom) else math.inf

    def rescaled(self, scale: float) -> "MeijerWeight":
        return MeijerWeight(self.top, self.bottom, float(scale), self.prefactor)

    def describe(self) -> str:
        return f"G^{{{self.m},0}}_{{{self.p},{self.q}}}({self.scale:g} x | {list(self.top)}; {list(self.bottom)})"


def bg_weight(model: HypergeometricModel) -> MeijerWeight:
    """Weight with Mellin transform ``Gamma(s) prod Gamma(b_j-1+s) / prod Gamma(a_i-1+s)``.

    Examples
    --------
    >>> w = bg_weight(HypergeometricModel.pho(2.0))
    >>> round(float(weight_eval(w, 2.0)), 8)
    0.54134113
    """
    return MeijerWeight(
        top=tuple(a - 1.0 for a in model.a),
        bottom=(0.0,) + tuple(b - 1.0 for b in model.b),
        prefactor=1.0 / gamma_ratio(model),
    )


def kp_weight(model: HypergeometricModel) -> MeijerWeight:
    """Weight with Mellin transform ``Gamma(s) prod Gamma(a_i-1+s) / prod Gamma(b_j-1+s)``."""
    return MeijerWeight(
        top=tuple(b - 1.0 for b in model.b),
        bottom=(0.0,) + tuple(a - 1.0 for a in model.a),
        prefactor=gamma_ratio(model),
    )


def mellin(w: MeijerWeight, s):
    """Mellin transform of ``G(scale * x)`` at real ``s`` (must lie right of all poles)."""
    s = np.asarray(s, dtype=float)
    log_val = -s * math.log(w.scale)
    for b in w.bottom:
        log_val = log_val + gammaln(b + s)
    for a in w.top:
        log_val = log_val - gammaln(a + s)
    return np.exp(log_val)


def _registry(top, bottom) -> Callable[[np.ndarray], np.ndarray] | None:
    """Closed form of the unit-scale weight for the reduced lists, if one is known."""
    if not top and len(bottom) == 1:
        (b,) = bottom
        return lambda x: np.exp(b * np.log(x) - x) if b else np.exp(-x)
    if not top and len(bottom) == 2:
        b1, b2 = bottom
        nu = b1 - b2
        half = 0.5 * (b1 + b2)
        return lambda x: 2.0 * x ** half * kv(nu, 2.0 * np.sqrt(x))
    if len(top) == 1 and len(bottom) == 1 and top[0] > bottom[0]:
        (a,), (b,) = top, bottom
        lg = gammaln(a - b)

        def hausdorff(x):
            out = np.zeros_like(x)
            inside = x < 1.0
            xi = x[inside]
            out[inside] = np.exp(b * np.log(xi) + (a - b - 1.0) * np.log1p(-xi) - lg)
            return out

        return hausdorff
    return None


def has_closed_form(w: MeijerWeight) -> bool:
    """True when :func:`weight_eval` uses the closed-form registry for ``w``."""
    return _registry(*w.reduced()) is not None


def _log_mellin_complex(top, bottom, s):
    out = np.zeros_like(s, dtype=complex)
    for b in bottom:
        out += loggamma(b + s)
    for a in top:
        out -= loggamma(a + s)
    return out


def _saddle(top, bottom, logx, cmin):
    """Abscissa minimizing ``log M(c) - c log x`` over ``c >= cmin`` (vectorized bisection)."""

    def f(c):
        out = -logx
        for b in bottom:
            out = out + digamma(b + c)
        for a in top:
            out = out - digamma(a + c)
        return out

    lo = np.full_like(logx, cmin)
    at_min = f(lo) >= 0
    hi = lo + 1.0
    for _ in range(40):
        need = (f(hi) < 0) & ~at_min
        if not need.any():
            break
        hi = np.where(need, hi * 2.0, hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        pos = f(mid) >= 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    c = 0.5 * (lo + hi)
    return np.where(at_min, cmin, c)


def _quantize(c, cmin):
    coarse = cmin + 0.25 * np.round((c - cmin) / 0.25)
    fine = np.exp(np.round(np.log(np.maximum(c, 1e-300)) * 32.0) / 32.0)
    return np.where(c < 8.0, coarse, np.maximum(fine, cmin))


def _contour_group(top, bottom, c, logx, contour: ContourSpec, dist):
    """Inverse Mellin transform for points sharing the abscissa ``c``."""
    base = float(np.real(_log_mellin_complex(top, bottom, np.array([c + 0j]))[0]))
    if contour.half_height is not None:
        half = float(contour.half_height)
    else:
        half = 8.0
        log_tail = math.log(contour.tail_tol)
        while True:
            edge = float(np.real(_log_mellin_complex(top, bottom, np.array([c + 1j * half]))[0]))
            if edge - base < log_tail:
                break
            half *= 2.0
            if half > _MAX_HALF_HEIGHT:
                raise NonConvergentError(
                    "Mellin transform does not decay along the contour; no integrable weight for these parameters"
                )
    step = min(0.05, 2.0 * math.pi * dist / 40.0)
    n = max(int(contour.nodes), int(math.ceil(half / step)))
    t = np.linspace(0.0, half, n + 1)
    h = t[1] - t[0]
    s = c + 1j * t
    log_m = _log_mellin_complex(top, bottom, s)
    trap = np.full(n + 1, h)
    trap[0] = trap[-1] = 0.5 * h
    out = np.empty(len(logx))
    absint = np.empty(len(logx))
    chunk = max(1, 4_000_000 // (n + 1))
    for i in range(0, len(logx), chunk):
        lx = logx[i:i + chunk]
        # shift by the saddle value so nothing overflows; conjugate symmetry halves the line
        shift = base - c * lx
        expo = log_m[None, :] - s[None, :] * lx[:, None] - shift[:, None]
        vals = np.exp(expo)
        out[i:i + chunk] = np.real(vals) @ trap / math.pi * np.exp(shift)
        absint[i:i + chunk] = np.abs(vals) @ trap / math.pi * np.exp(shift)
    return out, absint, half


def _contour_eval(top, bottom, xs, contour: ContourSpec, budget: SeriesBudget):
    logx = np.log(xs)
    pole = max(-b for b in bottom)
    if contour.abscissa is not None:
        if contour.abscissa <= pole:
            raise ValueError(f"abscissa must lie right of the poles at Re s = {-pole}")
        cs = np.full_like(xs, float(contour.abscissa))
        cmin = float(contour.abscissa)
    else:
        cmin = pole + 0.5
        cs = _quantize(_saddle(top, bottom, logx, cmin), cmin)
    out = np.zeros_like(xs)
    for c in np.unique(cs):
        sel = cs == c
        base = float(np.real(_log_mellin_complex(top, bottom, np.array([c + 0j]))[0]))
        # bound on |G| is about M(c) x^(-c) times the contour length
        bound = base - c * logx[sel] + math.log(4.0 * _MAX_HALF_HEIGHT)
        alive = bound > _LOG_TINY
        if not alive.any():
            continue
        idx = np.nonzero(sel)[0][alive]
        vals, absint, _ = _contour_group(top, bottom, float(c), logx[idx], contour, float(c) - pole)
        slack = np.maximum(_NEG_SLACK * absint, budget.abs_tol)
        if np.any(vals < -slack):
            worst = idx[np.argmin(vals + slack)]
            raise NegativeWeightError(f"contour evaluation returned a negative weight at x = {xs[worst]:.6g}")
        out[idx] = np.maximum(vals, 0.0)
    return out


def weight_eval(
    w: MeijerWeight,
    x,
    contour: ContourSpec = DEFAULT_CONTOUR,
    budget: SeriesBudget = DEFAULT_BUDGET,
):
    """Evaluate ``G(scale * x)`` for scalar or array ``x > 0``.

    Closed forms are used for ``x^b e^{-x}``, the two-parameter Bessel-K
    weight ``2 x^{(b1+b2)/2} K_{b1-b2}(2 sqrt x)`` and the one-pair
    beta-type weight on ``[0, 1]``; everything else goes through the contour.

    Raises
    ------
    NegativeWeightError
        The contour result is negative beyond rounding.
    NonConvergentError
        The Mellin transform does not decay along the contour.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs > 0)):
        raise ValueError("weights are evaluated at x > 0 only")
    u = xs * w.scale
    top, bottom = w.reduced()
    out = np.zeros_like(u)
    form = _registry(top, bottom)
    if form is not None:
        with np.errstate(over="ignore", under="ignore"):
            out = np.asarray(form(u), dtype=float)
        out = np.where(np.isfinite(out), out, 0.0)
    else:
        inside = u < 1.0 if len(top) == len(bottom) else np.ones(u.shape, dtype=bool)
        if len(top) == len(bottom) and inside.any():
            # the Mellin transform decays only algebraically; the trapezoid line cannot resolve it
            raise NonConvergentError(
                f"no closed form for the compact-support weight top={list(top)}, bottom={list(bottom)}, "
                "and its Mellin transform decays too slowly for contour inversion"
            )
        if inside.any():
            out[inside] = _contour_eval(top, bottom, u[inside], contour, budget)
    return float(out[0]) if scalar else out


def default_rule(w: MeijerWeight) -> RadialQuadrature:
    """Radial rule suited to ``w``: generalized Gauss-Laguerre for unit-scale
    ``x^b e^{-x}`` weights, adaptive subdivision otherwise."""
    top, bottom = w.reduced()
    if not top and len(bottom) == 1 and w.scale == 1.0:
        return RadialQuadrature.gauss_laguerre(64, alpha=bottom[0])
    rule = RadialQuadrature.adaptive(1e-12)
    if math.isfinite(w.support):
        rule = rule.on_interval(w.support)
    return rule


def moment_check(w: MeijerWeight, n_max: int, quad: RadialQuadrature | None = None,
                 contour: ContourSpec = DEFAULT_CONTOUR):
    """Compare quadrature moments ``int x^n G(scale x) dx`` with the Mellin transform at ``s = n + 1``.

    Returns
    -------
    list of (n, computed, expected, rel_err)
    """
    n_max = int(n_max)
    rule = quad if quad is not None else default_rule(w)
    if math.isfinite(w.support) and rule.half_line:
        rule = rule.on_interval(w.support)
    powers = np.arange(n_max + 1)
    computed, _ = moments(rule, lambda x: weight_eval(w, x, contour), n_max)
    expected = mellin(w, powers + 1.0)
    rows = []
    for n in range(n_max + 1):
        rel = abs(computed[n] - expected[n]) / abs(expected[n])
        rows.append((n, float(computed[n]), float(expected[n]), float(rel)))
    return rows
