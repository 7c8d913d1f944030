"""Command-line front end (``ncs``).

Exit codes: 0 success, 1 a verification check failed, 2 usage or configuration
error (including labels outside the convergence radius), 3 numerical failure.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from contextlib import contextmanager

import click
import numpy as np

from .errors import NCSError, OutsideRadiusError
from .hyper import parse_model
from .meijer import moment_check
from .pho import PhoParams, bargmann_k, pho_model
from .quadrature import RadialQuadrature
from .states import ComplexLabel, StateFamily, measure_weight, normalization, overlap
from .thermal import ThermalParams, husimi_q, p_quasi
from .transform import gft, gft_inverse, thermal_p_function, thermal_q_function
from .verify import DEFAULT_TOLERANCES, SUITES, run_suite

log = logging.getLogger("ncs")

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(click.ClickException):
    exit_code = EXIT_USAGE


class NumericFailure(click.ClickException):
    exit_code = EXIT_NUMERIC


def _setup_logging() -> None:
    level = os.environ.get("NCS_LOG", "quiet").lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise UsageError(f"NCS_LOG must be one of {sorted(levels)}, got {level!r}")
    logging.basicConfig(level=levels[level], stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


@contextmanager
def _errors(operation: str):
    try:
        yield
    except OutsideRadiusError as exc:
        raise UsageError(f"{operation}: outside_radius: {exc}") from exc
    except NCSError as exc:
        raise NumericFailure(f"{operation}: {exc}") from exc
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(f"{operation}: {exc}") from exc


def parse_grid(text: str) -> np.ndarray:
    """``xmin:xmax:steps[:log]`` to an array of points."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin", "linear")):
        raise ValueError(f"grid must look like xmin:xmax:steps[:log], got {text!r}")
    xmin, xmax, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if xmin < 0 or steps < 1:
        raise ValueError("grid needs xmin >= 0 and steps >= 1")
    if steps == 1:
        return np.array([xmin])
    if not xmax > xmin:
        raise ValueError("grid needs xmax > xmin")
    if len(parts) == 4 and parts[3] == "log":
        if xmin <= 0:
            raise ValueError("log grid needs xmin > 0")
        return np.geomspace(xmin, xmax, steps)
    return np.linspace(xmin, xmax, steps)


def _fmt(v: float) -> str:
    return "%.17g" % v


def _write(rows: list[dict], columns: list[str], fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=None) + "\n"
    else:
        lines = [",".join(columns)]
        lines += [",".join(_fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in columns) for r in rows]
        text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _family(model: str, flavor: str) -> StateFamily:
    return StateFamily(parse_model(model), flavor)


def _pointwise(fn, xs: np.ndarray, operation: str) -> np.ndarray:
    """Vectorized evaluation; on failure, locate the offending grid point for the message."""
    try:
        return np.asarray(fn(xs), dtype=float).reshape(xs.shape)
    except OutsideRadiusError:
        raise
    except NCSError as exc:
        for x in xs:
            try:
                fn(np.array([x]))
            except NCSError as inner:
                raise type(inner)(f"{operation} failed at x = {_fmt(x)}: {inner}") from inner
        raise exc


common_model = [
    click.option("--model", default="canonical", show_default=True,
                 help="canonical, pho:<k>, or a JSON file with p, q, a, b"),
    click.option("--flavor", type=click.Choice(["bg", "kp"]), default="bg", show_default=True),
    click.option("--quad", default="adaptive:1e-13", show_default=True, help="gl:<order> or adaptive:<tol>"),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
    click.option("--output", type=click.Path(dir_okay=False), default=None, help="write here instead of stdout"),
]


def _with(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return deco


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Nonlinear coherent states: measures, thermal Q/P functions and their transforms."""
    _setup_logging()


@main.command("eval")
@click.option("--quantity", type=click.Choice(["q", "p", "overlap", "weight", "norm"]), required=True)
@click.option("--nbar", type=float, default=1.0, show_default=True)
@click.option("--grid", required=True, help="xmin:xmax:steps[:log]")
@click.option("--ref", type=float, default=0.0, show_default=True, help="|z|^2 of the reference label for overlaps")
@_with(common_model)
def cmd_eval(quantity, nbar, grid, ref, model, flavor, quad, fmt, output):
    """Evaluate a quantity on a grid of x = |z|^2 values; CSV columns x,value."""
    with _errors("eval"):
        RadialQuadrature.parse(quad)
        xs = parse_grid(grid)
        fam = _family(model, flavor)
        fam.check_domain(xs)
        t = ThermalParams(nbar) if quantity in ("q", "p") else None
        log.info("eval %s for %s %s on %d points", quantity, flavor, model, len(xs))
        if quantity in ("p", "weight") and np.any(xs <= 0):
            raise ValueError(f"{quantity} is evaluated at x > 0 only")
        fns = {
            "q": lambda x: husimi_q(fam, t, x),
            "p": lambda x: p_quasi(fam, t, x),
            "norm": lambda x: normalization(fam, x),
            "weight": lambda x: measure_weight(fam, x),
            "overlap": lambda x: np.array([overlap(fam, ComplexLabel(ref), ComplexLabel(v)).real for v in x]),
        }
        values = _pointwise(fns[quantity], xs, quantity)
    _write([{"x": float(x), "value": float(v)} for x, v in zip(xs, values)], ["x", "value"], fmt, output)


@main.command("transform")
@click.option("--direction", type=click.Choice(["p-to-q", "q-to-p"]), required=True)
@click.option("--nbar", type=float, default=1.0, show_default=True)
@click.option("--grid", required=True, help="xmin:xmax:steps[:log]")
@_with(common_model)
def cmd_transform(direction, nbar, grid, model, flavor, quad, fmt, output):
    """Transform thermal P to Q (or Q to P) and compare with the direct evaluation."""
    with _errors("transform"):
        rule = RadialQuadrature.parse(quad)
        xs = parse_grid(grid)
        fam = _family(model, flavor)
        fam.check_domain(xs)
        t = ThermalParams(nbar)
        log.info("transform %s for %s %s nbar=%g", direction, flavor, model, nbar)
        if direction == "p-to-q":
            pfun = thermal_p_function(fam, t)
            got = _pointwise(lambda x: gft(fam, pfun, x, rule), xs, "gft")
            ref = husimi_q(fam, t, xs)
        else:
            if np.any(xs <= 0):
                raise ValueError("q-to-p is evaluated at x > 0 only")
            qfun = thermal_q_function(fam, t)
            got = _pointwise(lambda x: gft_inverse(fam, qfun, x), xs, "gft_inverse")
            ref = p_quasi(fam, t, xs)
    ref = np.atleast_1d(ref)
    rows = [
        {"x": float(x), "transformed": float(g), "closed_form": float(r), "rel_err": float(abs(g - r) / abs(r))}
        for x, g, r in zip(xs, got, ref)
    ]
    _write(rows, ["x", "transformed", "closed_form", "rel_err"], fmt, output)


@main.command("verify")
@click.option("--suite", type=click.Choice(sorted(SUITES) + ["all"]), required=True)
@click.option("--tol", "tols", multiple=True, metavar="KEY=VALUE",
              help=f"override a tolerance; keys: {', '.join(sorted(DEFAULT_TOLERANCES))}")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def cmd_verify(suite, tols, output):
    """Run a verification suite and print a JSON report; exit 1 if any check fails."""
    with _errors("verify"):
        overrides = {}
        for item in tols:
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"--tol expects KEY=VALUE, got {item!r}")
            overrides[key.strip()] = float(val)
        report = run_suite(suite, overrides)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    failed = [c.check_id for c in report.checks if not c.passed]
    log.info("%d checks, %d failed", len(report.checks), len(failed))
    if failed:
        click.echo(f"{len(failed)} check(s) failed, first: {failed[0]}", err=True)
        sys.exit(EXIT_VERIFY_FAILED)


@main.command("moments")
@click.option("--n-max", type=int, default=10, show_default=True)
@click.option("--model", default="canonical", show_default=True)
@click.option("--flavor", type=click.Choice(["bg", "kp"]), default="bg", show_default=True)
@click.option("--quad", default=None, help="gl:<order> or adaptive:<tol>; default picks per weight")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def cmd_moments(n_max, model, flavor, quad, fmt, output):
    """Moments of the flavor's Meijer-G weight against its Mellin transform."""
    with _errors("moments"):
        if n_max < 0:
            raise ValueError("--n-max must be nonnegative")
        rule = RadialQuadrature.parse(quad) if quad else None
        fam = _family(model, flavor)
        rows = moment_check(fam.weight, n_max, rule)
    _write([{"n": n, "computed": c, "expected": e, "rel_err": r} for n, c, e, r in rows],
           ["n", "computed", "expected", "rel_err"], fmt, output)


@main.command("pho-k")
@click.option("--J", "J", type=int, required=True, help="rotational quantum number")
@click.option("--mass", type=float, required=True, help="reduced mass in kg")
@click.option("--omega", type=float, required=True, help="angular frequency in rad/s")
@click.option("--r0", type=float, required=True, help="equilibrium distance in m")
def cmd_pho_k(J, mass, omega, r0):
    """Bargmann index of a pseudoharmonic oscillator and its model JSON."""
    with _errors("pho-k"):
        k = bargmann_k(PhoParams(mass, omega, r0, J))
        model = pho_model(k)
    click.echo(f"k = {_fmt(k.k)}")
    click.echo(model.to_json())


if __name__ == "__main__":  # pragma: no cover
    main()
