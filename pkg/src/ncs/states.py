"""Barut-Girardello (BG) and Klauder-Perelomov (KP) coherent-state families.

Both flavors expand ``|z> = N(|z|^2)^(-1/2) sum_n z^n / sqrt(R(n)) |n>``.  For BG
``R = rho`` and ``N = pFq(a; b; .)``; for KP ``R`` is the dual structure
function ``(n!)^2 / rho(n)`` and ``N = qFp(b; a; .)``.  A KP family of the model
``(a, b)`` is therefore the BG family of the swapped model ``(b, a)``, which is
how everything below is computed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import OutsideRadiusError
from .hyper import (
    DEFAULT_BUDGET,
    HypergeometricModel,
    SeriesBudget,
    log_rho_table,
    pfq_eval,
    radius_classify,
    structure_rho,
)
from .meijer import DEFAULT_CONTOUR, ContourSpec, MeijerWeight, bg_weight, default_rule, kp_weight, weight_eval
from .quadrature import RadialQuadrature, moments

__all__ = [
    "StateFamily",
    "ComplexLabel",
    "MomentRow",
    "fock_coefficient",
    "fock_coefficients",
    "normalization",
    "overlap",
    "measure_weight",
    "reduced_measure_weight",
    "identity_resolution_check",
    "continuity_distance",
]

FLAVORS = ("bg", "kp")


class MomentRow(NamedTuple):
    n: int
    computed: float
    expected: float
    rel_err: float


@dataclass(frozen=True)
class StateFamily:
    """A coherent-state family: a model plus the ``"bg"`` or ``"kp"`` flavor."""

    model: HypergeometricModel
    flavor: str = "bg"

    def __post_init__(self):
        flavor = self.flavor.lower()
        if flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        object.__setattr__(self, "flavor", flavor)
        if radius_classify(self.model, flavor).radius == "zero":
            raise ValueError(f"{flavor.upper()} states of {self.model} have zero convergence radius")

    @property
    def series_model(self) -> HypergeometricModel:
        """Model whose ``rho`` is the flavor's structure function."""
        return self.model if self.flavor == "bg" else self.model.swapped()

    @property
    def radius(self) -> float:
        return radius_classify(self.model, self.flavor).value

    @property
    def weight(self) -> MeijerWeight:
        return bg_weight(self.model) if self.flavor == "bg" else kp_weight(self.model)

    def rho(self, n: int, log: bool = False) -> float:
        """Flavor structure function ``R(n)``."""
        return structure_rho(self.series_model, n, log=log)

    def log_rho_table(self, n_max: int) -> np.ndarray:
        return log_rho_table(self.series_model, n_max)

    def check_domain(self, x) -> None:
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 0):
            raise ValueError("|z|^2 must be nonnegative")
        if np.any(xa >= self.radius):
            raise OutsideRadiusError(f"|z|^2 = {float(np.max(xa))} outside the label domain [0, {self.radius})")

    @classmethod
    def parse(cls, model: HypergeometricModel, flavor: str) -> "StateFamily":
        return cls(model, flavor)


@dataclass(frozen=True)
class ComplexLabel:
    """Coherent-state label ``z = sqrt(modulus_sq) e^{i phase}``."""

    modulus_sq: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.modulus_sq >= 0:
            raise ValueError("modulus_sq must be nonnegative")
        object.__setattr__(self, "modulus_sq", float(self.modulus_sq))
        object.__setattr__(self, "phase", float(self.phase) % (2 * math.pi))

    @property
    def z(self) -> complex:
        return cmath.rect(math.sqrt(self.modulus_sq), self.phase)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexLabel":
        return cls(abs(z) ** 2, cmath.phase(z))


def _as_label(z) -> ComplexLabel:
    return z if isinstance(z, ComplexLabel) else ComplexLabel.from_complex(complex(z))


def normalization(fam: StateFamily, x, budget: SeriesBudget = DEFAULT_BUDGET):
    """``N(x) = sum x^n / R(n)``; scalar or array, complex arguments allowed.

    Examples
    --------
    >>> fam = StateFamily(HypergeometricModel.pho(1.0), "kp")
    >>> round(float(normalization(fam, 1.0)), 8)
    5.43656366
    """
    return pfq_eval(fam.series_model, x, budget)


def fock_coefficient(fam: StateFamily, z, n: int, budget: SeriesBudget = DEFAULT_BUDGET) -> complex:
    """``<n|z> = z^n / sqrt(R(n) N(|z|^2))``."""
    label = _as_label(z)
    fam.check_domain(label.modulus_sq)
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if label.modulus_sq == 0:
        return 1.0 + 0j if n == 0 else 0j
    log_mag = 0.5 * (n * math.log(label.modulus_sq) - fam.rho(n, log=True)
                     - math.log(normalization(fam, label.modulus_sq, budget)))
    return cmath.rect(math.exp(log_mag), n * label.phase)


def fock_coefficients(fam: StateFamily, z, n_max: int, budget: SeriesBudget = DEFAULT_BUDGET) -> np.ndarray:
    """Vector of ``<n|z>`` for ``n = 0..n_max``."""
    label = _as_label(z)
    fam.check_domain(label.modulus_sq)
    n = np.arange(int(n_max) + 1)
    if label.modulus_sq == 0:
        return (n == 0).astype(complex)
    log_mag = 0.5 * (n * math.log(label.modulus_sq) - fam.log_rho_table(int(n_max))
                     - math.log(normalization(fam, label.modulus_sq, budget)))
    return np.exp(log_mag) * np.exp(1j * n * label.phase)


def overlap(fam: StateFamily, z1, z2, budget: SeriesBudget = DEFAULT_BUDGET) -> complex:
    """``<z1|z2> = N(conj(z1) z2) / sqrt(N(|z1|^2) N(|z2|^2))``; exactly 1 for equal labels."""
    l1, l2 = _as_label(z1), _as_label(z2)
    fam.check_domain([l1.modulus_sq, l2.modulus_sq])
    if l1 == l2:
        return 1.0 + 0j
    w = l1.z.conjugate() * l2.z
    num = complex(normalization(fam, complex(w), budget))
    den = math.sqrt(float(normalization(fam, l1.modulus_sq, budget)) * float(normalization(fam, l2.modulus_sq, budget)))
    return num / den


def continuity_distance(fam: StateFamily, z1, z2, budget: SeriesBudget = DEFAULT_BUDGET) -> float:
    """Hilbert-space distance ``|| |z1> - |z2> || = sqrt(2 - 2 Re <z1|z2>)``."""
    ov = overlap(fam, z1, z2, budget)
    return math.sqrt(max(0.0, 2.0 - 2.0 * ov.real))


def reduced_measure_weight(fam: StateFamily, x, contour: ContourSpec = DEFAULT_CONTOUR):
    """Radial density without the normalization factor: ``C * G(x)``.

    Its moments are the flavor structure function, ``int x^n h_red = R(n)``.
    """
    w = fam.weight
    return w.prefactor * weight_eval(w, x, contour)


def measure_weight(fam: StateFamily, x, contour: ContourSpec = DEFAULT_CONTOUR,
                   budget: SeriesBudget = DEFAULT_BUDGET):
    """Full radial density ``h(x) = C G(x) N(x)`` of the resolution of identity.

    Canonical states give ``h = 1`` (the flat ``d^2 z / pi`` measure).
    """
    if fam.model.p == fam.model.q == 0:
        ones = np.ones_like(np.asarray(x, dtype=float))
        return float(ones) if ones.ndim == 0 else ones
    return reduced_measure_weight(fam, x, contour) * normalization(fam, x, budget)


def identity_resolution_check(fam: StateFamily, n_max: int, quad: RadialQuadrature | None = None,
                              contour: ContourSpec = DEFAULT_CONTOUR) -> list[MomentRow]:
    """Check ``int_0^R h_red(x) x^n dx = R(n)`` for ``n = 0..n_max``."""
    w = fam.weight
    rule = quad if quad is not None else default_rule(w)
    if math.isfinite(w.support) and rule.half_line:
        rule = rule.on_interval(w.support)
    computed, _ = moments(rule, lambda x: reduced_measure_weight(fam, x, contour), int(n_max))
    rows = []
    for n in range(int(n_max) + 1):
        expected = fam.rho(n)
        rows.append(MomentRow(n, float(computed[n]), expected, abs(computed[n] - expected) / expected))
    return rows
