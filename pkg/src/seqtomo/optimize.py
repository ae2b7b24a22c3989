"""Scalar-parameter minimization of the Gram condition number."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .instrument import Instrument, make_example1, make_example2, make_qudit_mub
from .sequential import collective_effects, gram_report

INV_PHI = (math.sqrt(5) - 1) / 2


class InfeasibleScanError(ValueError):
    """No grid point yields an informationally complete effect set."""


@dataclass(frozen=True)
class Family:
    """A one-parameter instrument family and its feasible parameter interval."""

    name: str
    build: Callable[[float], Instrument]
    p_range: tuple

    def condition_number(self, p: float, depth: int) -> float:
        return gram_report(collective_effects(self.build(p), depth)).condition_number


def get_family(family, d: int = 3, p_range: tuple | None = None) -> Family:
    """Resolve a family name (``example1``, ``example2``, ``qudit_mub``) or callable."""
    if isinstance(family, Family):
        return family
    if callable(family):
        return Family("custom", family, p_range or (0.0, 1.0))
    name = str(family).replace("-", "_")
    if name == "example1":
        return Family(name, make_example1, p_range or (0.0, 1.0))
    if name == "example2":
        return Family(name, make_example2, p_range or (0.0, 1.0))
    if name == "qudit_mub":
        # the negative branch down to -1/(d-1) is a valid instrument but outside the IC
        # interval this family is studied on
        return Family(name, lambda p: make_qudit_mub(d, p), p_range or (0.0, 1.0))
    raise ValueError(f"unknown instrument family {family!r}")


@dataclass
class ScanResult:
    family: str
    depth: int
    grid: list
    best_p: float
    best_lambda: float
    refinement_iterations: int = 0
    grid_best_p: float = field(default=math.nan)
    grid_best_lambda: float = field(default=math.inf)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "depth": self.depth,
            "best_p": self.best_p,
            "best_lambda": self.best_lambda,
            "grid_best_p": self.grid_best_p,
            "grid_best_lambda": self.grid_best_lambda,
            "refinement_iterations": self.refinement_iterations,
            "grid": [[p, None if math.isinf(lam) else lam] for p, lam in self.grid],
        }


def scan_condition_number(family, depth: int, grid_points: int = 101, p_range: tuple | None = None, d: int = 3) -> ScanResult:
    """Evaluate the condition number on a uniform grid of the open interval ``p_range``.

    Endpoints are excluded: the grid is ``lo + (hi - lo) * k / (n + 1)`` for
    ``k = 1..n``. Non-IC points carry ``inf`` and never become the optimum.
    """
    fam = get_family(family, d=d, p_range=p_range)
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    lo, hi = fam.p_range if p_range is None else p_range
    if not hi > lo:
        raise ValueError(f"empty parameter interval ({lo}, {hi})")
    ps = [lo + (hi - lo) * k / (grid_points + 1) for k in range(1, grid_points + 1)]
    grid = [(p, fam.condition_number(p, depth)) for p in ps]
    finite = [(p, lam) for p, lam in grid if math.isfinite(lam)]
    if not finite:
        raise InfeasibleScanError(f"{fam.name}: no informationally complete point at depth {depth}")
    # min over (lambda, p) breaks ties toward smaller p
    best_p, best_lam = min(finite, key=lambda t: (t[1], t[0]))
    return ScanResult(fam.name, depth, grid, best_p, best_lam, 0, best_p, best_lam)


class Minimum(NamedTuple):
    p: float
    value: float
    iterations: int


def golden_section(f: Callable[[float], float], bracket: tuple, xtol: float = 1e-6, maxiter: int = 200) -> Minimum:
    """Golden-section search inside a bracket ``(a, b, c)`` with ``f(b) < f(a), f(c)``.

    Stops once the bracket is narrower than ``xtol``. Ties keep the
    smaller abscissa.
    """
    a, b, c = (float(x) for x in bracket)
    if not a < b < c:
        raise ValueError("bracket must satisfy a < b < c")
    fa, fb, fc = f(a), f(b), f(c)
    if not (math.isfinite(fa) and math.isfinite(fb) and math.isfinite(fc)):
        raise ValueError("bracket values must be finite")
    if not fb < min(fa, fc):
        raise ValueError("invalid bracket: middle value is not below both ends")
    it = 0
    while c - a >= xtol and it < maxiter:
        it += 1
        if (c - b) > (b - a):
            x = b + (1 - INV_PHI) * (c - b)
            fx = f(x)
            if fx < fb:
                a, b, fb = b, x, fx
            else:
                c = x
        else:
            x = b - (1 - INV_PHI) * (b - a)
            fx = f(x)
            if fx <= fb:
                c, b, fb = b, x, fx
            else:
                a = x
    return Minimum(b, fb, it)


def refine_minimum(family, depth: int, bracket: tuple, xtol: float = 1e-6, d: int = 3) -> Minimum:
    """Golden-section refinement of the condition number inside ``bracket``."""
    fam = get_family(family, d=d)
    return golden_section(lambda p: fam.condition_number(p, depth), bracket, xtol)


def optimize_family(family, depth: int, grid_points: int = 101, p_range: tuple | None = None, d: int = 3, xtol: float = 1e-6) -> ScanResult:
    """Grid scan followed by golden-section refinement around the best grid point."""
    fam = get_family(family, d=d, p_range=p_range)
    scan = scan_condition_number(fam, depth, grid_points, p_range)
    i = next(k for k, (p, _) in enumerate(scan.grid) if p == scan.grid_best_p)
    if 0 < i < len(scan.grid) - 1:
        (pl, ll), (pr, lr) = scan.grid[i - 1], scan.grid[i + 1]
        if scan.best_lambda < min(ll, lr):
            m = golden_section(lambda p: fam.condition_number(p, depth), (pl, scan.best_p, pr), xtol)
            if m.value <= scan.best_lambda:
                scan.best_p, scan.best_lambda = m.p, m.value
            scan.refinement_iterations = m.iterations
    return scan
