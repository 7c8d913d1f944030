"""Verification suites: named collections of identity checks with a JSON report."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .hyper import HypergeometricModel
from .meijer import has_closed_form, moment_check
from .states import ComplexLabel, StateFamily, identity_resolution_check, overlap
from .thermal import ThermalParams, husimi_q, p_moment_condition_check, p_quasi
from .transform import (
    gaussian_integral_check,
    gft,
    gft_inverse,
    mehta_formula_check,
    normal_ordered_moment_check,
    optical_equivalence_check,
    thermal_p_function,
    thermal_q_function,
)

__all__ = ["CheckRecord", "VerificationReport", "SUITES", "DEFAULT_TOLERANCES", "run_suite"]

GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
PHO_KS = (0.5, 1.0, 2.5)
N_MAX = 10

DEFAULT_TOLERANCES = {
    "registry": 1e-8,
    "contour": 1e-6,
    "roundtrip": 1e-8,
    "roundtrip_contour": 1e-5,
    "mehta": 1e-6,
    "gaussian": 1e-8,
    "optical": 1e-8,
    "axioms": 1e-10,
}


@dataclass
class CheckRecord:
    check_id: str
    identity: str
    computed: float
    expected: float
    rel_err: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.computed = float(self.computed)
        self.expected = float(self.expected)
        self.rel_err = float(self.rel_err)
        self.passed = bool(self.rel_err <= self.tol)


@dataclass
class VerificationReport:
    suite: str
    checks: list[CheckRecord]
    wall_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checks": [asdict(c) for c in self.checks],
            "passed": self.passed,
            "wall_time": self.wall_time,
        }


def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def _round_trips(fam: StateFamily, label: str, nbars, tol: float, inverse: bool = True):
    out = []
    xs = np.array(GRID)
    for nbar in nbars:
        t = ThermalParams(nbar)
        forward = gft(fam, thermal_p_function(fam, t), xs)
        q = husimi_q(fam, t, xs)
        for x, f, e in zip(xs, forward, q):
            out.append(CheckRecord(f"{label}/p-to-q/nbar={nbar:g}/x={x:g}", "coherent-state transform of P gives Q",
                                   f, e, _rel(f, e), tol))
        if inverse:
            back = gft_inverse(fam, thermal_q_function(fam, t), xs)
            p = p_quasi(fam, t, xs)
            for x, f, e in zip(xs, back, p):
                out.append(CheckRecord(f"{label}/q-to-p/nbar={nbar:g}/x={x:g}", "inverse transform of Q gives P",
                                       f, e, _rel(f, e), tol))
    return out


def _moment_rows(fam: StateFamily, label: str, tol: float):
    out = []
    for row in identity_resolution_check(fam, N_MAX):
        out.append(CheckRecord(f"{label}/identity/n={row.n}", "resolution of identity moments",
                               row.computed, row.expected, row.rel_err, tol))
    return out


def _thermal_rows(fam: StateFamily, label: str, tol: float, nbars=(0.5, 1.0, 2.0), normal_ordered=True):
    out = []
    for nbar in nbars:
        t = ThermalParams(nbar)
        for row in p_moment_condition_check(fam, t, N_MAX):
            out.append(CheckRecord(f"{label}/p-moment/nbar={nbar:g}/n={row.n}", "P moment condition",
                                   row.computed, row.expected, row.rel_err, tol))
        for n in range(N_MAX + 1):
            row = optical_equivalence_check(fam, t, n)
            out.append(CheckRecord(f"{label}/optical/nbar={nbar:g}/n={n}", "optical equivalence monomials",
                                   row.computed, row.expected, row.rel_err, tol))
            if normal_ordered and fam.flavor == "bg":
                row = normal_ordered_moment_check(fam, t, n)
                out.append(CheckRecord(f"{label}/normal-ordered/nbar={nbar:g}/n={n}",
                                       "normal-ordered moments from P", row.computed, row.expected, row.rel_err, tol))
    return out


def _axiom_rows(fam: StateFamily, label: str, tol: float):
    rng = np.random.default_rng(7)
    out = []
    for i in range(5):
        z = ComplexLabel(rng.uniform(0, 4), rng.uniform(0, 2 * math.pi))
        ov = overlap(fam, z, z)
        out.append(CheckRecord(f"{label}/self-overlap/{i}", "normalized states", ov.real, 1.0, abs(ov - 1.0), tol))
    return out


def suite_canonical(tol: dict) -> list[CheckRecord]:
    fam = StateFamily(HypergeometricModel.canonical())
    checks = _round_trips(fam, "canonical", (0.5, 1.0, 2.0), tol["roundtrip"])
    for nbar in (0.5, 1.0, 2.0):
        for z_sq in (0.0, 1.0, 4.0):
            c, e, r = mehta_formula_check(ThermalParams(nbar), z_sq)
            checks.append(CheckRecord(f"canonical/mehta/nbar={nbar:g}/z2={z_sq:g}", "Mehta anti-diagonal inversion",
                                      c, e, r, tol["mehta"]))
    for a in (0.5, 1.0, 2.0):
        for deg in range(5):
            sigma = complex(0.7, -0.4)
            c, e, r = gaussian_integral_check(a, sigma, deg)
            checks.append(CheckRecord(f"canonical/gaussian/a={a:g}/deg={deg}", "Gaussian integral identity",
                                      abs(c), abs(e), r, tol["gaussian"]))
    checks += _moment_rows(fam, "canonical", tol["registry"])
    checks += _thermal_rows(fam, "canonical", tol["optical"])
    checks += _axiom_rows(fam, "canonical", tol["axioms"])
    return checks


def suite_pho_bg(tol: dict) -> list[CheckRecord]:
    checks = []
    for k in PHO_KS:
        fam = StateFamily(HypergeometricModel.pho(k), "bg")
        label = f"pho-bg/k={k:g}"
        checks += _round_trips(fam, label, (0.5, 2.0), tol["roundtrip"])
        checks += _moment_rows(fam, label, tol["registry"])
        checks += _thermal_rows(fam, label, tol["optical"], nbars=(0.5, 2.0))
        t = ThermalParams(1.0)
        for x in GRID:
            a = p_quasi(fam, t, x, method="weight_ratio")
            b = p_quasi(fam, t, x, method="closed_form")
            checks.append(CheckRecord(f"{label}/p-closed-form/x={x:g}", "P as weight ratio equals closed form",
                                      a, b, _rel(a, b), tol["registry"]))
    return checks


def suite_pho_kp(tol: dict) -> list[CheckRecord]:
    checks = []
    for k in PHO_KS:
        fam = StateFamily(HypergeometricModel.pho(k), "kp")
        label = f"pho-kp/k={k:g}"
        checks += _round_trips(fam, label, (0.5, 2.0), tol["roundtrip_contour"])
        checks += _moment_rows(fam, label, tol["contour"])
        for row in p_moment_condition_check(fam, ThermalParams(1.0), N_MAX):
            checks.append(CheckRecord(f"{label}/p-moment/nbar=1/n={row.n}", "P moment condition",
                                      row.computed, row.expected, row.rel_err, tol["contour"]))
    return checks


def suite_moments(tol: dict) -> list[CheckRecord]:
    checks = []
    fams = [("canonical", StateFamily(HypergeometricModel.canonical()))]
    for k in PHO_KS:
        fams.append((f"pho-bg/k={k:g}", StateFamily(HypergeometricModel.pho(k), "bg")))
        fams.append((f"pho-kp/k={k:g}", StateFamily(HypergeometricModel.pho(k), "kp")))
    for label, fam in fams:
        w = fam.weight
        key = "registry" if has_closed_form(w) else "contour"
        for n, c, e, r in moment_check(w, N_MAX):
            checks.append(CheckRecord(f"{label}/mellin/n={n}", "Mellin moment integral of the weight",
                                      c, e, r, tol[key]))
    return checks


SUITES = {
    "canonical": suite_canonical,
    "pho-bg": suite_pho_bg,
    "pho-kp": suite_pho_kp,
    "moments": suite_moments,
}


def run_suite(name: str, tolerances: dict | None = None) -> VerificationReport:
    """Run one suite (or ``"all"``) and collect the report.

    Raises
    ------
    KeyError
        Unknown suite name or tolerance key.
    """
    tol = dict(DEFAULT_TOLERANCES)
    for key, val in (tolerances or {}).items():
        if key not in tol:
            raise KeyError(f"unknown tolerance key {key!r}; known: {sorted(tol)}")
        tol[key] = float(val)
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    start = time.perf_counter()
    checks = []
    for n in names:
        checks += SUITES[n](tol)
    return VerificationReport(name, checks, time.perf_counter() - start)
