"""Thermal states of linear spectra: occupation weights, Husimi Q and the P density.

For a spectrum ``E_n = hbar omega (n + e0)`` the normalized Fock-diagonal
weights are geometric, ``p_n = t^n / (nbar + 1)`` with ``t = nbar / (nbar + 1)``;
the offset ``e0`` cancels against the partition function.  The diagonal of the
density matrix in a coherent-state family is then

    Q(x) = N(t x) / ((nbar + 1) N(x))

and the P density, defined by ``int C G(x) P(x) x^n dx = p_n R(n)``, is

    P(x) = G(x / t) / (nbar G(x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivisionUnstableError
from .hyper import DEFAULT_BUDGET, SeriesBudget, pfq_eval
from .meijer import DEFAULT_CONTOUR, ContourSpec, weight_eval
from .quadrature import RadialQuadrature, moments
from .states import MomentRow, StateFamily

__all__ = [
    "ThermalParams",
    "DiagonalWeights",
    "thermal_weights",
    "husimi_q",
    "p_quasi",
    "weight_times_p",
    "p_moment_condition_check",
]

# geometric tail mass left out by the default truncation of the weights
DEFAULT_TAIL = 1e-14


@dataclass(frozen=True)
class ThermalParams:
    """Mean occupation ``nbar > 0`` and spectrum offset ``e0`` (energy bookkeeping only)."""

    nbar: float
    e0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.nbar) and self.nbar > 0):
            raise ValueError("nbar must be a positive finite number")
        object.__setattr__(self, "nbar", float(self.nbar))
        object.__setattr__(self, "e0", float(self.e0))

    @classmethod
    def from_temperature(cls, beta_t: float, hbar_omega: float, e0: float = 0.0) -> "ThermalParams":
        """``nbar = 1 / (exp(beta_t hbar_omega) - 1)``."""
        if beta_t <= 0 or hbar_omega <= 0:
            raise ValueError("beta_t and hbar_omega must be positive")
        return cls(1.0 / math.expm1(beta_t * hbar_omega), e0)

    @property
    def ratio(self) -> float:
        """Boltzmann ratio ``t = nbar / (nbar + 1)``."""
        return self.nbar / (self.nbar + 1.0)

    def p(self, n) -> np.ndarray | float:
        """Normalized weight ``p_n``."""
        n = np.asarray(n, dtype=float)
        out = np.power(self.ratio, n) / (self.nbar + 1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DiagonalWeights:
    """Truncated occupation weights with the omitted tail mass."""

    weights: np.ndarray
    tail: float

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1


def thermal_weights(t: ThermalParams, n_max: int | None = None) -> DiagonalWeights:
    """Geometric weights ``p_0..p_{n_max}``; by default truncated once the tail is below 1e-14.

    >>> thermal_weights(ThermalParams(1.0), 3).weights.tolist()
    [0.5, 0.25, 0.125, 0.0625]
    """
    if n_max is None:
        n_max = max(0, math.ceil(math.log(DEFAULT_TAIL) / math.log(t.ratio)) - 1)
    n = np.arange(int(n_max) + 1)
    return DiagonalWeights(t.p(n), t.ratio ** (int(n_max) + 1))


def _is_canonical_family(fam: StateFamily) -> bool:
    return fam.model.is_canonical


def _pho_bg_index(fam: StateFamily) -> float | None:
    m = fam.model
    if fam.flavor == "bg" and m.a == (1.0,) and m.q == 1:
        return m.b[0] - 1.0
    return None


def husimi_q(fam: StateFamily, t: ThermalParams, x, budget: SeriesBudget = DEFAULT_BUDGET,
             printed_form: bool = False):
    """Thermal diagonal ``Q(x) = N(t x) / ((nbar + 1) N(x))``.

    ``x`` may be complex (the analytic continuation used by the inverse
    transform).  ``printed_form=True`` always uses the BG series ``pFq(a; b; .)``
    even for KP families; it is the Q of the KP P density only when ``k = 0``
    and is kept for comparison.
    """
    xa = np.asarray(x)
    if not np.iscomplexobj(xa):
        fam.check_domain(xa)
    if _is_canonical_family(fam):
        out = np.exp(-xa / (t.nbar + 1.0)) / (t.nbar + 1.0)
        return out[()] if out.ndim == 0 else out
    series = fam.model if printed_form else fam.series_model
    out = pfq_eval(series, t.ratio * xa, budget) / pfq_eval(series, xa, budget) / (t.nbar + 1.0)
    return out


def _weight_ratio(fam, t, x, contour, budget):
    w = fam.weight
    num = weight_eval(w, x / t.ratio, contour, budget)
    den = weight_eval(w, x, contour, budget)
    den_arr = np.atleast_1d(den)
    if np.any(den_arr < max(budget.abs_tol, np.finfo(float).tiny)):
        bad = np.atleast_1d(x)[np.argmin(den_arr)]
        raise DivisionUnstableError(f"weight underflows at x = {bad:.6g}; P = G(x/t)/G(x) is undefined there")
    return num / den / t.nbar


def p_quasi(fam: StateFamily, t: ThermalParams, x, contour: ContourSpec = DEFAULT_CONTOUR,
            budget: SeriesBudget = DEFAULT_BUDGET, method: str = "auto"):
    """Thermal P density ``G(x/t) / (nbar G(x))``.

    ``method="closed_form"`` uses ``exp(-x/nbar)/nbar`` (canonical) or
    ``((nbar+1)/nbar)^k exp(-x/nbar)/nbar`` (PHO BG family) and fails for other
    families; ``"weight_ratio"`` always evaluates the Meijer-G ratio; ``"auto"``
    prefers the closed form when one exists.

    Examples
    --------
    >>> from ncs.hyper import HypergeometricModel
    >>> fam = StateFamily(HypergeometricModel.pho(1.0), "bg")
    >>> round(float(p_quasi(fam, ThermalParams(1.0), 1e-12)), 10)
    2.0
    """
    if method not in ("auto", "closed_form", "weight_ratio"):
        raise ValueError(f"unknown method {method!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("P is evaluated at x > 0")
    k = _pho_bg_index(fam)
    closed = _is_canonical_family(fam) or k is not None
    if method == "closed_form" and not closed:
        raise ValueError("no closed form for this family; use method='weight_ratio'")
    if closed and method != "weight_ratio":
        k = 0.0 if _is_canonical_family(fam) else k
        out = np.exp(k * math.log(1.0 / t.ratio) - xa / t.nbar) / t.nbar
        return float(out) if out.ndim == 0 else out
    out = _weight_ratio(fam, t, xa, contour, budget)
    return float(out) if np.ndim(out) == 0 else out


def weight_times_p(fam: StateFamily, t: ThermalParams, x, contour: ContourSpec = DEFAULT_CONTOUR,
                   method: str = "auto"):
    """``C G(x) P(x)``, the density whose moments are ``p_n R(n)``.

    Points where ``G`` underflows contribute zero instead of raising.
    """
    xa = np.asarray(x, dtype=float)
    w = fam.weight
    g = weight_eval(w, xa, contour)
    out = np.zeros_like(np.atleast_1d(xa))
    ok = np.atleast_1d(g) > np.finfo(float).tiny
    if ok.any():
        out[ok] = np.atleast_1d(g)[ok] * np.atleast_1d(p_quasi(fam, t, np.atleast_1d(xa)[ok], contour, method=method))
    out *= w.prefactor
    return float(out[0]) if xa.ndim == 0 else out


def p_moment_condition_check(fam: StateFamily, t: ThermalParams, n_max: int,
                             quad: RadialQuadrature | None = None,
                             contour: ContourSpec = DEFAULT_CONTOUR) -> list[MomentRow]:
    """Check ``int C G(x) P(x) x^n dx = p_n R(n)`` for ``n = 0..n_max``."""
    rule = quad if quad is not None else RadialQuadrature.adaptive(1e-13)
    support = fam.weight.support
    if math.isfinite(support) and rule.half_line:
        rule = rule.on_interval(support)
    computed, _ = moments(rule, lambda x: weight_times_p(fam, t, x, contour), int(n_max))
    rows = []
    for n in range(int(n_max) + 1):
        expected = t.p(n) * fam.rho(n)
        rows.append(MomentRow(n, float(computed[n]), expected, abs(computed[n] - expected) / expected))
    return rows

