"""Coherent-state Fourier transform of radial functions and the canonical Mehta apparatus.

The forward transform of a radial ``f`` is the coherent-state expectation

    F(y) = int dmu(z) f(|z|^2) |<sqrt(y)|z>|^2
         = N(y)^(-1) sum_n y^n / R(n)^2 * M_n(f),      M_n(f) = int C G(x) f(x) x^n dx,

after the angular integral has been done analytically.  The moments ``M_n``
do not depend on ``y`` and are cached per ``(family, f)``.

The inverse recovers ``f`` from ``F``.  Writing ``F(y) N(y) = sum d_n y^n`` one
has ``M_n(f) = d_n R(n)^2``, so ``m_n = d_n R(n)`` is the moment sequence of
``f`` relative to the flavor structure function.  The inverse is implemented
for the class where ``m_n`` is a finite sum of geometric sequences
``sum_j c_j tau_j^n``; then ``f(z) = sum_j (c_j / tau_j) G(z / tau_j) / G(z)``.
Thermal Q functions, constants and their linear combinations belong to it.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import j0, roots_genlaguerre

from .errors import DivisionUnstableError, NonConvergentError
from .hyper import DEFAULT_BUDGET, SeriesBudget
from .meijer import DEFAULT_CONTOUR, ContourSpec, weight_eval
from .quadrature import RadialQuadrature, integrate, moments
from .states import MomentRow, StateFamily, normalization, reduced_measure_weight
from .thermal import ThermalParams, husimi_q, p_quasi, weight_times_p

__all__ = [
    "RadialFunction",
    "GeometricMixture",
    "gft",
    "gft_inverse",
    "geometric_decomposition",
    "thermal_p_function",
    "thermal_q_function",
    "kernel_series",
    "kernel_numeric_angle",
    "mehta_anti_diagonal",
    "mehta_formula_check",
    "gaussian_integral_check",
    "optical_equivalence_check",
    "normal_ordered_moment_check",
    "clear_moment_cache",
]

# a term y^n / R(n) below this fraction of N(y) no longer matters
_KERNEL_TAIL = 1e-18
# number of Taylor coefficients used by the inverse and the circle sampling
_INVERSE_TERMS = 20
_CIRCLE_POINTS = 64
_INVERSE_RESIDUAL = 1e-8


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """A phase-independent function of ``x = |z|^2``.

    ``weighted`` optionally evaluates ``C G(x) f(x)`` directly, which avoids
    forming ``f`` where the weight underflows (``f = P`` is a ratio of weights).
    Instances hash by identity, which is what the moment cache keys on.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support: float = math.inf
    name: str = "f"
    weighted: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x):
        return self.evaluator(x)

    @classmethod
    def constant(cls, value: float = 1.0) -> "RadialFunction":
        return cls(lambda x: np.full(np.shape(x), value, dtype=np.result_type(x, float)), name=f"const({value})")


def thermal_p_function(fam: StateFamily, t: ThermalParams, contour: ContourSpec = DEFAULT_CONTOUR,
                       method: str = "auto") -> RadialFunction:
    """The thermal P density of ``fam`` as a transformable function."""
    return RadialFunction(
        lambda x: p_quasi(fam, t, x, contour, method=method),
        support=fam.weight.support,
        name=f"P(nbar={t.nbar:g})",
        weighted=lambda x: weight_times_p(fam, t, x, contour, method=method),
    )


def thermal_q_function(fam: StateFamily, t: ThermalParams, printed_form: bool = False) -> RadialFunction:
    """The thermal Husimi diagonal of ``fam``; accepts complex arguments."""
    return RadialFunction(lambda x: husimi_q(fam, t, x, printed_form=printed_form),
                          support=fam.radius, name=f"Q(nbar={t.nbar:g})")


class _MomentCache:
    """Moments ``M_0..M_n`` per (family, function, rule, contour); entries are deterministic,
    so concurrent writers can only store identical values."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def get(self, key, n_max):
        with self._lock:
            hit = self._store.get(key)
        if hit is not None and len(hit) > n_max:
            return hit[: n_max + 1]
        return None

    def put(self, key, values):
        with self._lock:
            old = self._store.get(key)
            if old is None or len(old) < len(values):
                self._store[key] = values

    def clear(self):
        with self._lock:
            self._store.clear()


_CACHE = _MomentCache()


def clear_moment_cache() -> None:
    _CACHE.clear()


def function_moments(fam: StateFamily, f: RadialFunction, n_max: int,
                     quad: RadialQuadrature | None = None,
                     contour: ContourSpec = DEFAULT_CONTOUR) -> np.ndarray:
    """``M_n(f) = int C G(x) f(x) x^n dx`` for ``n = 0..n_max`` (cached)."""
    rule = quad if quad is not None else RadialQuadrature.adaptive(1e-13)
    support = fam.weight.support
    if math.isfinite(support) and rule.half_line:
        rule = rule.on_interval(support)
    key = (fam, f, rule, contour)
    hit = _CACHE.get(key, n_max)
    if hit is not None:
        return hit
    if f.weighted is not None:
        g = f.weighted
    else:
        def g(x):
            return reduced_measure_weight(fam, x, contour) * np.asarray(f(x), dtype=float)
    vals, _ = moments(rule, g, n_max)
    _CACHE.put(key, vals)
    return vals


def _kernel_terms_needed(fam: StateFamily, y: float) -> int:
    """Smallest index past which ``y^n / R(n)`` stays below ``_KERNEL_TAIL * N(y)``."""
    if y == 0:
        return 0
    log_n = math.log(float(normalization(fam, y)))
    n_max = 32
    while True:
        lr = fam.log_rho_table(n_max)
        logs = np.arange(n_max + 1) * math.log(y) - lr
        peak = int(np.argmax(logs))
        small = np.nonzero((logs < log_n + math.log(_KERNEL_TAIL)) & (np.arange(n_max + 1) > peak))[0]
        if len(small):
            return int(small[0])
        n_max *= 2
        if n_max > 100_000:
            raise NonConvergentError(f"kernel series at y = {y} needs more than 1e5 terms")


def gft(fam: StateFamily, f: RadialFunction, alpha_sq, quad: RadialQuadrature | None = None,
        budget: SeriesBudget = DEFAULT_BUDGET, contour: ContourSpec = DEFAULT_CONTOUR):
    """Forward transform ``F(y)`` of the radial function ``f`` at ``y = alpha_sq``.

    Examples
    --------
    >>> from ncs.hyper import HypergeometricModel
    >>> fam = StateFamily(HypergeometricModel.canonical())
    >>> round(float(gft(fam, RadialFunction.constant(1.0), 2.0)), 12)
    1.0
    """
    ys = np.atleast_1d(np.asarray(alpha_sq, dtype=float))
    fam.check_domain(ys)
    n_max = max(_kernel_terms_needed(fam, float(y)) for y in ys)
    n_max = min(n_max, int(budget.max_terms))
    mom = function_moments(fam, f, n_max, quad, contour)
    lr = fam.log_rho_table(n_max)
    out = np.empty_like(ys)
    sign = np.sign(mom)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(mom))
    for i, y in enumerate(ys):
        if y == 0:
            out[i] = mom[0]
            continue
        log_norm = math.log(float(normalization(fam, y, budget)))
        terms = sign * np.exp(np.arange(n_max + 1) * math.log(y) - 2.0 * lr + log_abs - log_norm)
        out[i] = terms.sum()
    return float(out[0]) if np.ndim(alpha_sq) == 0 else out


@dataclass(frozen=True)
class GeometricMixture:
    """``m_n = sum_j c_j tau_j^n``; the function is ``sum_j (c_j/tau_j) G(z/tau_j)/G(z)``."""

    taus: tuple[float, ...]
    coeffs: tuple[float, ...]
    residual: float = 0.0
    raw_moments: np.ndarray = field(default=None, repr=False, compare=False)


def _taylor_coefficients(phi: Callable, n_terms: int, r_max: float) -> np.ndarray:
    """Taylor coefficients of ``phi`` by FFT on circles, radius per index at the Cauchy-bound minimum."""
    radii = np.geomspace(min(0.05, 0.5 * r_max), r_max, 200)
    with np.errstate(divide="ignore"):
        log_mod = np.log(np.abs(np.asarray(phi(radii.astype(complex)), dtype=complex)))
    theta = 2.0 * np.pi * np.arange(_CIRCLE_POINTS) / _CIRCLE_POINTS
    ring = np.exp(1j * theta)
    coeffs = np.zeros(n_terms)
    cache = {}
    for n in range(n_terms):
        j = int(np.argmin(log_mod - n * np.log(radii)))
        r = float(radii[j])
        if j not in cache:
            cache[j] = np.fft.fft(np.asarray(phi(r * ring), dtype=complex)) / _CIRCLE_POINTS
        coeffs[n] = cache[j][n].real / r ** n
    return coeffs


def _matrix_pencil(m: np.ndarray, rank_tol: float = 1e-9):
    k = len(m)
    L = k // 2
    hankel = np.array([m[i:i + L + 1] for i in range(k - L)])
    _, sv, vh = np.linalg.svd(hankel, full_matrices=False)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    v = vh[:rank].conj().T
    taus = np.linalg.eigvals(np.linalg.pinv(v[:-1]) @ v[1:])
    vander = np.vander(taus, k, increasing=True).T
    coeffs = np.linalg.lstsq(vander, m.astype(complex), rcond=None)[0]
    residual = float(np.max(np.abs(vander @ coeffs - m)) / np.max(np.abs(m)))
    return taus, coeffs, residual


def geometric_decomposition(fam: StateFamily, F: RadialFunction,
                            budget: SeriesBudget = DEFAULT_BUDGET) -> GeometricMixture:
    """Decompose the relative moments ``m_n = d_n R(n)`` of ``F`` into geometric sequences.

    ``F`` must accept complex arrays (it is sampled on circles in the complex plane).

    Raises
    ------
    NonConvergentError
        ``F`` is not the transform of a finite geometric mixture.
    """
    r_max = 40.0 if math.isinf(fam.radius) else 0.95 * fam.radius

    def phi(w):
        return np.asarray(F(w), dtype=complex) * normalization(fam, w, budget)

    d = _taylor_coefficients(phi, _INVERSE_TERMS, r_max)
    m = d * np.exp(fam.log_rho_table(_INVERSE_TERMS - 1))
    if np.max(np.abs(m)) == 0:
        return GeometricMixture((), (), 0.0, m)
    taus, coeffs, residual = _matrix_pencil(m)
    if residual > _INVERSE_RESIDUAL:
        raise NonConvergentError(
            f"input is not a geometric mixture of thermal diagonals (pencil residual {residual:.2e})"
        )
    scale = np.max(np.abs(coeffs))
    keep = np.abs(coeffs) > 1e-14 * scale
    taus, coeffs = taus[keep], coeffs[keep]
    if np.any(np.abs(taus.imag) > 1e-8 * np.abs(taus)) or np.any(taus.real <= 0):
        raise NonConvergentError("moment sequence has non-positive or complex ratios; no radial inverse")
    taus = taus.real
    taus = np.where(np.abs(taus - 1.0) < 1e-12, 1.0, taus)
    order = np.argsort(-taus)
    return GeometricMixture(tuple(float(v) for v in taus[order]),
                            tuple(float(v) for v in coeffs.real[order]), residual, m)


_INVERSE_CACHE: dict = {}
_INVERSE_LOCK = threading.Lock()


def gft_inverse(fam: StateFamily, F: RadialFunction, z_sq, quad: RadialQuadrature | None = None,
                budget: SeriesBudget = DEFAULT_BUDGET, contour: ContourSpec = DEFAULT_CONTOUR):
    """Radial function ``f`` whose forward transform is ``F``, evaluated at ``z_sq > 0``.

    ``quad`` is accepted for signature symmetry with :func:`gft`; the inverse
    needs no radial quadrature.
    """
    with _INVERSE_LOCK:
        mix = _INVERSE_CACHE.get((fam, F))
    if mix is None:
        mix = geometric_decomposition(fam, F, budget)
        with _INVERSE_LOCK:
            _INVERSE_CACHE[(fam, F)] = mix
    zs = np.atleast_1d(np.asarray(z_sq, dtype=float))
    if np.any(zs <= 0):
        raise ValueError("the inverse is evaluated at z_sq > 0")
    w = fam.weight
    out = np.zeros_like(zs)
    if mix.taus:
        den = weight_eval(w, zs, contour, budget)
        if np.any(den <= np.finfo(float).tiny):
            raise DivisionUnstableError(f"weight underflows at x = {zs[np.argmin(den)]:.6g}")
        for tau, c in zip(mix.taus, mix.coeffs):
            if tau == 1.0:
                out += c
            else:
                out += (c / tau) * weight_eval(w, zs / tau, contour, budget) / den
    return float(out[0]) if np.ndim(z_sq) == 0 else out


def kernel_series(fam: StateFamily, u: float) -> float:
    """Angular-averaged two-sided kernel ``sum_n u^n / R(n)^2``."""
    if u == 0:
        return 1.0
    n_max = _kernel_terms_needed(fam, math.sqrt(u)) + 8
    lr = fam.log_rho_table(n_max)
    return float(np.exp(np.arange(n_max + 1) * math.log(u) - 2.0 * lr).sum())


def kernel_numeric_angle(fam: StateFamily, u: float, nodes: int = 256) -> float:
    """Same kernel with the angle integrated numerically: ``mean_phi |N(sqrt(u) e^{i phi})|^2``.

    Diagnostic for the analytic angular reduction; agreement with
    :func:`kernel_series` checks the orthogonality of ``e^{i n phi}``.
    """
    phi = 2.0 * np.pi * np.arange(nodes) / nodes
    vals = normalization(fam, math.sqrt(u) * np.exp(1j * phi))
    return float(np.mean(np.abs(vals) ** 2))


def mehta_anti_diagonal(t: ThermalParams, alpha_sq):
    """``exp(|alpha|^2) <-alpha|rho|alpha>`` of a thermal state in canonical coherent states.

    >>> round(float(mehta_anti_diagonal(ThermalParams(1.0), 1.0)), 8)
    0.30326533
    """
    out = np.exp(-t.ratio * np.asarray(alpha_sq, dtype=float)) / (t.nbar + 1.0)
    return float(out) if out.ndim == 0 else out


def mehta_formula_check(t: ThermalParams, z_sq: float, quad2d: RadialQuadrature | None = None,
                        rel_tol: float = 1e-10, max_order: int = 256):
    """Recover ``P(z) e^{-|z|^2}`` from anti-diagonal elements by the 2-D Fourier integral.

    After the angular integral, ``e^{z conj(a) - conj(z) a}`` averages to
    ``J0(2 |z| |a|)`` and the check reads

        P(x) e^{-x} = int_0^inf A(y) J0(2 sqrt(x y)) dy,   A = mehta_anti_diagonal.

    The default rule is Gauss-Laguerre in ``u = t y`` with the order doubled
    until two successive results agree to ``rel_tol`` or to the rounding floor
    of the oscillating sum; an adaptive ``quad2d`` is used as given.

    Returns
    -------
    computed, expected, rel_err
    """
    def integrand(y):
        return mehta_anti_diagonal(t, y) * j0(2.0 * np.sqrt(z_sq * y))

    expected = math.exp(-z_sq / t.nbar - z_sq) / t.nbar
    if quad2d is not None and quad2d.scheme != "gauss_laguerre":
        computed, _ = integrate(quad2d, integrand)
    else:
        order = quad2d.order if quad2d is not None else 16
        prev = None
        scale = 1.0 / ((t.nbar + 1.0) * t.ratio)
        while True:
            u, w = roots_genlaguerre(order, 0.0)
            terms = w * j0(2.0 * np.sqrt(z_sq * u / t.ratio)) * scale
            computed = float(np.sum(terms))
            floor = 64.0 * np.finfo(float).eps * float(np.sum(np.abs(terms)))
            if prev is not None and abs(computed - prev) <= max(rel_tol * abs(computed), floor):
                break
            if order >= max_order:
                raise NonConvergentError(f"Mehta integral not converged at Gauss-Laguerre order {order}")
            prev = computed
            order *= 2
    return float(computed), expected, abs(computed - expected) / abs(expected)


def gaussian_integral_check(a_param: float, sigma: complex, poly_degree: int,
                            angular_nodes: int = 64, radial_order: int = 64):
    """``int d^2z/pi e^{-a|z|^2} e^{sigma conj(z)} z^m = (1/a)(sigma/a)^m`` by angle-radius quadrature.

    The angle uses the trapezoid rule (exact for the trigonometric polynomial
    that survives), the radius Gauss-Laguerre in ``u = a |z|^2``.

    Returns
    -------
    computed, expected, err
        ``err`` is relative, or absolute when the expected value is zero.
    """
    if a_param <= 0:
        raise ValueError("a must be positive")
    m = int(poly_degree)
    sigma = complex(sigma)
    u, wu = roots_genlaguerre(radial_order, 0.0)
    x = u / a_param
    phi = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    z = np.sqrt(x)[:, None] * np.exp(1j * phi)[None, :]
    angular = np.mean(np.exp(sigma * np.conj(z)) * z ** m, axis=1)
    computed = complex(np.sum(wu * angular) / a_param)
    expected = (sigma / a_param) ** m / a_param
    err = abs(computed - expected)
    if expected != 0:
        err /= abs(expected)
    return computed, complex(expected), err


def optical_equivalence_check(fam: StateFamily, t: ThermalParams, n: int,
                              quad: RadialQuadrature | None = None,
                              contour: ContourSpec = DEFAULT_CONTOUR) -> MomentRow:
    """Monomial moment of the P density against the reduced measure: ``p_n R(n)``."""
    rule = quad if quad is not None else RadialQuadrature.adaptive(1e-13)
    vals, _ = moments(rule, lambda x: weight_times_p(fam, t, x, contour), int(n))
    expected = t.p(n) * fam.rho(n)
    return MomentRow(int(n), float(vals[n]), expected, abs(vals[n] - expected) / expected)


def normal_ordered_moment_check(fam: StateFamily, t: ThermalParams, n: int,
                                quad: RadialQuadrature | None = None,
                                contour: ContourSpec = DEFAULT_CONTOUR) -> MomentRow:
    """Monomial moment of P against the full measure ``C G N``, BG families only.

    It equals the thermal expectation of the normally ordered power of the
    deformed number operator, ``sum_{m >= n} p_m rho(m) / rho(m - n)``
    (``n! nbar^n`` for canonical states).
    """
    if fam.flavor != "bg":
        raise ValueError("the normal-ordered moment identity is implemented for BG families")
    n = int(n)
    rule = quad if quad is not None else RadialQuadrature.adaptive(1e-13)

    def g(x):
        out = weight_times_p(fam, t, x, contour)
        live = out > 0
        # N grows as fast as the weight decays; skip it where the product has underflowed
        out[live] = out[live] * normalization(fam, x[live])
        return out

    vals, _ = moments(rule, g, n)
    m_max = n + 64
    while True:
        m = np.arange(n, m_max + 1)
        lr = fam.log_rho_table(m_max)
        terms = t.p(m) * np.exp(lr[m] - lr[m - n])
        if terms[-1] < 1e-18 * terms.sum():
            break
        m_max *= 2
    expected = float(terms.sum())
    return MomentRow(n, float(vals[n]), expected, abs(vals[n] - expected) / expected)
