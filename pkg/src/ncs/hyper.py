"""Pochhammer and Gamma-ratio arithmetic, structure functions and pFq series.

A :class:`HypergeometricModel` is the ``(p, q, a, b)`` record that fixes the
nonlinearity function

    f(n)^2 = prod_j (b_j - 1 + n) / prod_i (a_i - 1 + n)

and through it the structure function ``rho(n) = n! prod (b_j)_n / prod (a_i)_n``.
Every normalization, overlap and measure in the package is derived from it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from .errors import NonConvergentError, OutsideRadiusError, RepresentationOverflow

__all__ = [
    "HypergeometricModel",
    "SeriesBudget",
    "RadiusClass",
    "pochhammer",
    "gamma_ratio",
    "structure_rho",
    "structure_rho_dual",
    "log_rho_table",
    "pfq_eval",
    "radius_classify",
    "series_radius",
    "parse_model",
]

# below this index rho(n) is formed as an exact running product
EXACT_PRODUCT_MAX = 30
# largest argument for which math.gamma stays finite
_GAMMA_ARG_MAX = 171.62


@dataclass(frozen=True)
class HypergeometricModel:
    """Numerator/denominator parameter lists of a generalized hypergeometric model.

    ``p = q = 0`` (both lists empty) is the canonical model with ``rho(n) = n!``.
    Parameters must be strictly positive; terminating (negative integer)
    parameter sets are not supported.
    """

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        for name, vals in (("a", a), ("b", b)):
            for v in vals:
                if not math.isfinite(v) or v <= 0:
                    raise ValueError(f"parameter {name}={v!r} must be a positive finite real")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    @property
    def is_canonical(self) -> bool:
        # (a)_n / (a)_n cancels, so equal multisets also reduce to n!
        return sorted(self.a) == sorted(self.b)

    def swapped(self) -> "HypergeometricModel":
        """Model with the roles of ``a`` and ``b`` exchanged (dual structure function)."""
        return HypergeometricModel(a=self.b, b=self.a)

    def step_ratio(self, n: int) -> float:
        """``prod(a_i + n) / ((n + 1) prod(b_j + n))``, the pFq term ratio."""
        num = math.prod(ai + n for ai in self.a)
        den = (n + 1) * math.prod(bj + n for bj in self.b)
        return num / den

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "a": list(self.a), "b": list(self.b)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "HypergeometricModel":
        a = list(d.get("a", []))
        b = list(d.get("b", []))
        if "p" in d and int(d["p"]) != len(a):
            raise ValueError(f"p={d['p']} does not match len(a)={len(a)}")
        if "q" in d and int(d["q"]) != len(b):
            raise ValueError(f"q={d['q']} does not match len(b)={len(b)}")
        return cls(a=tuple(a), b=tuple(b))

    @classmethod
    def canonical(cls) -> "HypergeometricModel":
        return cls()

    @classmethod
    def pho(cls, k: float) -> "HypergeometricModel":
        """Pseudoharmonic oscillator model ``p = q = 1, a = [1], b = [k + 1]``."""
        return cls(a=(1.0,), b=(float(k) + 1.0,))


@dataclass(frozen=True)
class SeriesBudget:
    """Truncation controls for infinite series."""

    max_terms: int = 20000
    rel_tol: float = 1e-16
    abs_tol: float = 1e-300

    def __post_init__(self):
        if int(self.max_terms) < 1:
            raise ValueError("max_terms must be >= 1")
        if not 0 < self.rel_tol < 1 or not 0 < self.abs_tol < 1:
            raise ValueError("rel_tol and abs_tol must lie in (0, 1)")


DEFAULT_BUDGET = SeriesBudget()


@dataclass(frozen=True)
class RadiusClass:
    """Convergence class of ``sum x^n / rho(n)``.

    ``radius`` is one of ``"infinite"``, ``"one"``, ``"zero"`` and follows the
    ratio test ``R = lim rho(n+1)/rho(n) ~ n^exponent``.  ``reciprocal_radius``
    is the class obtained from the reciprocal ratio ``rho(n)/rho(n+1)``; it is
    reported for comparison only and never used for domain checks.
    """

    radius: str
    exponent: int
    reciprocal_radius: str = field(default="")

    @property
    def value(self) -> float:
        return {"infinite": math.inf, "one": 1.0, "zero": 0.0}[self.radius]


def _classify(exponent: int) -> str:
    if exponent > 0:
        return "infinite"
    if exponent == 0:
        return "one"
    return "zero"


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)`` with ``(a)_0 = 1``.

    >>> pochhammer(3.0, 3)
    60.0
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    if a <= 0 and float(a).is_integer() and n > -a:
        return 0.0
    if n <= 64 or a <= 0:
        out = 1.0
        for s in range(n):
            out *= a + s
        return out
    log_val = gammaln(a + n) - gammaln(a)
    if log_val > 709.78:
        raise RepresentationOverflow(f"({a})_{n} overflows double precision")
    return math.exp(log_val)


def gamma_ratio(model: HypergeometricModel) -> float:
    """``prod_j Gamma(b_j) / prod_i Gamma(a_i)``; 1 for the canonical model."""
    for v in model.a + model.b:
        if v > _GAMMA_ARG_MAX:
            raise RepresentationOverflow(f"Gamma({v}) exceeds double precision")
    num = math.prod(math.gamma(bj) for bj in model.b)
    den = math.prod(math.gamma(ai) for ai in model.a)
    return num / den


def _rho_exact(model: HypergeometricModel, n: int) -> float:
    out = 1.0
    for s in range(1, n + 1):
        out *= s * math.prod(bj - 1 + s for bj in model.b) / math.prod(ai - 1 + s for ai in model.a)
    return out


def _log_rho_gamma(model: HypergeometricModel, n):
    n = np.asarray(n, dtype=float)
    out = gammaln(n + 1)
    for bj in model.b:
        out = out + gammaln(bj + n) - gammaln(bj)
    for ai in model.a:
        out = out - gammaln(ai + n) + gammaln(ai)
    return out


def structure_rho(model: HypergeometricModel, n: int, log: bool = False) -> float:
    """Structure function ``rho(n) = n! prod (b_j)_n / prod (a_i)_n``.

    Small ``n`` uses an exact running product; larger ``n`` is computed from
    log-Gamma values.  With ``log=True`` the natural logarithm is returned and
    no overflow is possible.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n <= EXACT_PRODUCT_MAX:
        val = _rho_exact(model, n)
        return math.log(val) if log else val
    log_val = float(_log_rho_gamma(model, n))
    if log:
        return log_val
    if log_val > 709.78:
        raise RepresentationOverflow(f"rho({n}) overflows; request log=True")
    return math.exp(log_val)


def structure_rho_dual(model: HypergeometricModel, n: int, log: bool = False) -> float:
    """Dual structure function ``(n!)^2 / rho(n) = n! prod (a_i)_n / prod (b_j)_n``."""
    return structure_rho(model.swapped(), n, log=log)


def log_rho_table(model: HypergeometricModel, n_max: int) -> np.ndarray:
    """``log rho(n)`` for ``n = 0..n_max`` as an array."""
    n_max = int(n_max)
    out = np.empty(n_max + 1)
    m = min(n_max, EXACT_PRODUCT_MAX)
    val = 1.0
    out[0] = 0.0
    for s in range(1, m + 1):
        val *= s * math.prod(bj - 1 + s for bj in model.b) / math.prod(ai - 1 + s for ai in model.a)
        out[s] = math.log(val)
    if n_max > EXACT_PRODUCT_MAX:
        out[EXACT_PRODUCT_MAX + 1:] = _log_rho_gamma(model, np.arange(EXACT_PRODUCT_MAX + 1, n_max + 1))
    return out


def radius_classify(model: HypergeometricModel, flavor: str = "bg") -> RadiusClass:
    """Classify the convergence radius of the flavor's normalization series.

    The BG series uses ``rho``, whose step ratio grows like ``n^(1+q-p)``; the
    KP series uses the dual structure function, growing like ``n^(1+p-q)``.
    """
    flavor = flavor.lower()
    if flavor == "bg":
        exponent = 1 + model.q - model.p
    elif flavor == "kp":
        exponent = 1 + model.p - model.q
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if model.is_canonical:
        exponent = 1
    return RadiusClass(_classify(exponent), exponent, _classify(-exponent))


def series_radius(model: HypergeometricModel) -> float:
    """Numeric radius (inf, 1.0 or 0.0) of ``sum x^n / rho(n)``."""
    return radius_classify(model, "bg").value


def pfq_eval(model: HypergeometricModel, x, budget: SeriesBudget = DEFAULT_BUDGET):
    """Sum ``pFq(a; b; x) = sum_n x^n / rho(n)`` by term recurrence.

    ``x`` may be a scalar or array, real or complex.  Summation stops once two
    consecutive terms fall below ``max(rel_tol*|sum|, abs_tol)`` while the term
    ratio is below one.  The canonical model is returned as ``exp(x)``.

    Raises
    ------
    OutsideRadiusError
        ``|x|`` is not strictly inside the radius of convergence.
    NonConvergentError
        The stopping rule was not met within ``budget.max_terms`` terms.
    """
    scalar = np.ndim(x) == 0
    xa = np.asarray(x)
    is_complex = np.iscomplexobj(xa)
    xa = xa.astype(complex if is_complex else float)
    radius = series_radius(model)
    if np.any(np.abs(xa) >= radius) and not (radius == 0.0 and np.all(xa == 0)):
        raise OutsideRadiusError(f"|x| = {np.max(np.abs(xa))} outside convergence radius {radius}")
    if model.is_canonical:
        out = np.exp(xa)
        return out[()] if scalar else out

    total = np.ones_like(xa)
    term = np.ones_like(xa)
    below_prev = np.zeros(xa.shape, dtype=bool)
    done = np.zeros(xa.shape, dtype=bool)
    for n in range(int(budget.max_terms)):
        ratio = model.step_ratio(n)
        new_term = term * xa * ratio
        total = np.where(done, total, total + new_term)
        thr = np.maximum(budget.rel_tol * np.abs(total), budget.abs_tol)
        below = np.abs(new_term) <= thr
        shrinking = np.abs(xa) * model.step_ratio(n + 1) < 1
        done |= below & below_prev & shrinking
        if done.all():
            break
        below_prev = below
        term = new_term
    else:
        raise NonConvergentError(f"pFq series not converged within {budget.max_terms} terms")
    return total[()] if scalar else total


def parse_model(source: str | Path) -> HypergeometricModel:
    """Resolve ``"canonical"``, ``"pho:<k>"`` or a JSON file path to a model."""
    text = str(source).strip()
    if text == "canonical":
        return HypergeometricModel.canonical()
    if text.startswith("pho:"):
        k = float(text.split(":", 1)[1])
        if k < 0:
            raise ValueError("PHO preset needs k >= 0")
        return HypergeometricModel.pho(k)
    path = Path(text)
    if not path.is_file():
        raise ValueError(f"unknown model preset or missing file: {text!r}")
    return HypergeometricModel.from_dict(json.loads(path.read_text()))

