"""Pseudoharmonic oscillator: Bargmann index, energies and the ``1F1`` model.

The potential ``V_J(r) = (m w^2 r0^2 / 8) (r/r0 - r0/r)^2 + hbar^2 J (J+1) / (2 m r^2)``
has the linear spectrum ``E = hbar w (n + k) - m w^2 r0^2 / 4`` with

    k = 1/2 + 1/2 sqrt((J + 1/2)^2 + (m w r0^2 / (2 hbar))^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import hbar as HBAR

from .hyper import HypergeometricModel

__all__ = ["PhoParams", "BargmannIndex", "bargmann_k", "pho_model", "pho_energy", "pho_level"]


@dataclass(frozen=True)
class PhoParams:
    """Physical parameters in SI units."""

    reduced_mass: float
    omega: float
    r0: float
    J: int = 0
    hbar: float = HBAR

    def __post_init__(self):
        if not self.reduced_mass > 0 or not self.omega > 0:
            raise ValueError("reduced_mass and omega must be positive")
        if not self.r0 >= 0:
            raise ValueError("r0 must be nonnegative")
        if int(self.J) != self.J or self.J < 0:
            raise ValueError("J must be a nonnegative integer")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def anharmonic_term(self) -> float:
        """Dimensionless ``m w r0^2 / (2 hbar)``."""
        return self.reduced_mass * self.omega * self.r0 ** 2 / (2.0 * self.hbar)


@dataclass(frozen=True)
class BargmannIndex:
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ValueError("Bargmann index must be a finite nonnegative number")

    def __float__(self) -> float:
        return float(self.k)

    def e(self, n: int) -> float:
        """Dimensionless level ``e_k(n) = n + k``."""
        return n + self.k


def bargmann_k(params: PhoParams) -> BargmannIndex:
    """Bargmann index from the molecular parameters.

    >>> bargmann_k(PhoParams(1.0, 1.0, 0.0, J=2)).k
    1.75
    """
    return BargmannIndex(0.5 + 0.5 * math.hypot(params.J + 0.5, params.anharmonic_term))


def pho_model(k: BargmannIndex | float) -> HypergeometricModel:
    """Model ``a = [1], b = [k + 1]``, i.e. ``rho(n) = (k + 1)_n``.

    ``k = 0`` lies below the physical range but is accepted: it reproduces the
    canonical structure function ``n!``.
    """
    return HypergeometricModel.pho(float(k))


def pho_level(k: BargmannIndex | float, n: int) -> float:
    return int(n) + float(k)


def pho_energy(params: PhoParams, k: BargmannIndex | None, n: int) -> float:
    """``E = hbar w (n + k) - m w^2 r0^2 / 4`` in joules."""
    if int(n) < 0:
        raise ValueError("n must be nonnegative")
    kk = float(k) if k is not None else bargmann_k(params).k
    shift = params.reduced_mass * params.omega ** 2 * params.r0 ** 2 / 4.0
    return params.hbar * params.omega * (int(n) + kk) - shift
