"""Radial integration rules on the half-line ``[0, inf)`` or on ``[0, R]``.

Three schemes are available:

``gauss_laguerre``
    Generalized Gauss-Laguerre rule of a given order; exact for
    ``x^alpha e^{-x} * polynomial`` integrands.
``adaptive``
    Vectorized Gauss-Kronrod (7/15) subdivision starting from a geometrically
    graded panel set, so that integrable endpoint singularities (``log x``,
    ``x^b``) are resolved.
``truncated_uniform``
    Composite Simpson rule on ``[0, cutoff]``.

Integrands are called with a 1-D array of abscissae and may return either an
array of the same length or a 2-D array ``(len(x), m)``; in the latter case all
``m`` components are integrated at once with a per-component tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import NonConvergentError

__all__ = ["RadialQuadrature", "integrate", "moments"]

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# 15 Kronrod abscissae on [-1, 1] and matching weights; Gauss points are the odd ones
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:14:2] = _WG[:3][::-1]

# integrand magnitude, relative to its peak, below which the half-line is cut
CUTOFF_DECAY = 1e-18


@dataclass(frozen=True)
class RadialQuadrature:
    """Descriptor of a radial integration rule.

    ``upper`` is ``inf`` for the half-line and ``R`` for the interval ``[0, R]``
    (weights of finite-radius families).
    """

    scheme: str = "adaptive"
    order: int = 64
    alpha: float = 0.0
    rel_tol: float = 1e-12
    max_depth: int = 60
    cutoff: float | None = None
    nodes: int = 4001
    upper: float = math.inf

    def __post_init__(self):
        if self.scheme not in ("gauss_laguerre", "adaptive", "truncated_uniform"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.order < 2:
            raise ValueError("order must be >= 2")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.cutoff is not None and self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.alpha <= -1:
            raise ValueError("alpha must exceed -1")
        if not self.upper > 0:
            raise ValueError("upper limit must be positive")

    @classmethod
    def gauss_laguerre(cls, order: int = 64, alpha: float = 0.0) -> "RadialQuadrature":
        return cls(scheme="gauss_laguerre", order=int(order), alpha=float(alpha))

    @classmethod
    def adaptive(cls, rel_tol: float = 1e-12, max_depth: int = 60) -> "RadialQuadrature":
        return cls(scheme="adaptive", rel_tol=float(rel_tol), max_depth=int(max_depth))

    @classmethod
    def truncated_uniform(cls, cutoff: float, nodes: int = 4001) -> "RadialQuadrature":
        return cls(scheme="truncated_uniform", cutoff=float(cutoff), nodes=int(nodes))

    @classmethod
    def parse(cls, text: str) -> "RadialQuadrature":
        """Parse ``gl:<order>`` or ``adaptive:<tol>`` (CLI syntax)."""
        kind, _, arg = text.partition(":")
        if kind == "gl":
            return cls.gauss_laguerre(int(arg) if arg else 64)
        if kind == "adaptive":
            return cls.adaptive(float(arg) if arg else 1e-12)
        raise ValueError(f"bad quadrature spec {text!r}; expected gl:<order> or adaptive:<tol>")

    def on_interval(self, upper: float) -> "RadialQuadrature":
        """Same rule restricted to ``[0, upper]``."""
        return replace(self, upper=float(upper))

    @property
    def half_line(self) -> bool:
        return math.isinf(self.upper)


def integrate(rule: RadialQuadrature, g: Callable[[np.ndarray], np.ndarray]):
    """Integrate ``g`` over the rule's domain.

    Returns
    -------
    value, err_estimate
        Floats for scalar integrands, arrays of shape ``(m,)`` for vector ones.
        The error estimate is ``|Q_order - Q_order/2|`` for Gauss-Laguerre, the
        summed Kronrod-Gauss differences for the adaptive rule and a
        half-resolution comparison for Simpson.
    """
    if rule.scheme == "gauss_laguerre":
        if not rule.half_line:
            raise ValueError("Gauss-Laguerre rules integrate over the half-line only")
        hi = _gauss_laguerre(g, rule.order, rule.alpha)
        lo = _gauss_laguerre(g, max(2, rule.order // 2), rule.alpha)
        return _squeeze(hi), _squeeze(np.abs(hi - lo))
    if rule.scheme == "truncated_uniform":
        upper = min(rule.cutoff or rule.upper, rule.upper)
        if math.isinf(upper):
            raise ValueError("truncated_uniform needs a finite cutoff")
        n = rule.nodes if rule.nodes % 2 else rule.nodes + 1
        fine = _simpson(g, upper, n)
        coarse = _simpson(g, upper, (n + 1) // 2 if ((n + 1) // 2) % 2 else (n + 1) // 2 + 1)
        return _squeeze(fine), _squeeze(np.abs(fine - coarse))
    return _adaptive(rule, g)


def moments(rule: RadialQuadrature, g: Callable[[np.ndarray], np.ndarray], n_max: int):
    """``int g(x) x^n dx`` for ``n = 0..n_max`` as ``(values, errors)`` arrays."""
    powers = np.arange(int(n_max) + 1)

    def vec(x):
        gx = np.asarray(g(x), dtype=float)
        # log space keeps x^n finite wherever g(x) x^n is
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            log_pow = np.where(powers[None, :] == 0, 0.0, powers[None, :] * np.log(x)[:, None])
            out = np.sign(gx)[:, None] * np.exp(np.log(np.abs(gx))[:, None] + log_pow)
        out[~np.isfinite(out)] = 0.0
        return out

    val, err = integrate(rule, vec)
    return np.atleast_1d(val), np.atleast_1d(err)


def _squeeze(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def _as_2d(vals, n):
    vals = np.asarray(vals, dtype=float)
    if vals.ndim == 1:
        return vals.reshape(n, 1), True
    return vals.reshape(n, -1), False


def _gauss_laguerre(g, order, alpha):
    x, w = roots_genlaguerre(order, alpha)
    with np.errstate(divide="ignore"):
        w_eff = np.exp(np.log(w) + x - alpha * np.log(x))
    vals, scalar = _as_2d(g(x), len(x))
    out = (w_eff[:, None] * vals).sum(axis=0)
    return out[0] if scalar else out


def _simpson(g, upper, n):
    x = np.linspace(0.0, upper, n)
    vals, scalar = _as_2d(g(x), n)
    coef = np.ones(n)
    coef[1:-1:2] = 4.0
    coef[2:-1:2] = 2.0
    out = (coef[:, None] * vals).sum(axis=0) * (x[1] - x[0]) / 3.0
    return out[0] if scalar else out


def _find_cutoff(g) -> float:
    xs = np.geomspace(1e-6, 1e5, 221)
    vals, _ = _as_2d(g(xs), len(xs))
    vals = np.abs(np.where(np.isfinite(vals), vals, 0.0))
    peak = vals.max(axis=0)
    peak[peak == 0] = 1.0
    rel = (vals / peak).max(axis=1)
    alive = np.nonzero(rel > CUTOFF_DECAY)[0]
    if len(alive) == 0:
        return float(xs[1])
    last = alive[-1]
    if last >= len(xs) - 1:
        raise NonConvergentError("integrand does not decay on the half-line")
    return float(xs[last + 1])


def _gk_panels(g, a, b):
    """Kronrod and Gauss estimates on panels ``[a_i, b_i]``; shapes ``(P, m)``."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = (center[:, None] + half[:, None] * _NODES[None, :]).ravel()
    vals, _ = _as_2d(g(x), len(x))
    vals = vals.reshape(len(a), 15, -1)
    vals = np.where(np.isfinite(vals), vals, np.nan)
    if np.isnan(vals).any():
        raise NonConvergentError("integrand returned non-finite values inside the domain")
    kron = np.einsum("pnm,n->pm", vals, _KW) * half[:, None]
    gauss = np.einsum("pnm,n->pm", vals, _GW) * half[:, None]
    absint = np.einsum("pnm,n->pm", np.abs(vals), _KW) * half[:, None]
    return kron, np.abs(kron - gauss), absint


def _adaptive(rule: RadialQuadrature, g):
    if rule.half_line:
        upper = rule.cutoff if rule.cutoff is not None else _find_cutoff(g)
    else:
        upper = min(rule.upper, rule.cutoff) if rule.cutoff is not None else rule.upper
    grade = np.geomspace(1e-14, 0.5, 28)
    breaks = np.concatenate([[0.0], upper * grade, upper * (1.0 - grade[::-1][1:]), [upper]])
    breaks = np.unique(breaks)
    a, b = breaks[:-1], breaks[1:]
    kron, err, absint = _gk_panels(g, a, b)
    scalar = kron.shape[1] == 1 and np.ndim(g(np.array([upper * 0.5]))) == 1
    for _ in range(rule.max_depth):
        total = kron.sum(axis=0)
        tol = rule.rel_tol * np.maximum(absint.sum(axis=0), 1e-300)
        if np.all(err.sum(axis=0) <= tol):
            break
        score = (err / tol[None, :]).max(axis=1)
        split = score > 1.0 / len(a)
        if not split.any():
            split = score >= score.max()
        mid = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mid])
        nb = np.concatenate([mid, b[split]])
        k2, e2, ab2 = _gk_panels(g, na, nb)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        kron = np.concatenate([kron[keep], k2])
        err = np.concatenate([err[keep], e2])
        absint = np.concatenate([absint[keep], ab2])
    else:
        raise NonConvergentError(
            f"adaptive quadrature stalled above rel_tol={rule.rel_tol} after {rule.max_depth} refinements"
        )
    total = kron.sum(axis=0)
    est = err.sum(axis=0)
    if scalar:
        return float(total[0]), float(est[0])
    return total, est
