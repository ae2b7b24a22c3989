"""Reference numbers for the built-in instrument families, as a check table."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple

from .instrument import make_example1, make_example2, make_luders, make_nqubit_shift, sic_qubit_effects
from .optimize import optimize_family
from .sequential import collective_effects, condition_number, gram_report, ic_search, min_depth_bound


class Check(NamedTuple):
    name: str
    expected: float
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and abs(self.measured - self.expected) <= self.tolerance


def _sic():
    return gram_report(collective_effects(make_luders(sic_qubit_effects(), label="sic"), 1)).condition_number


@lru_cache(maxsize=1)
def _qutrit():
    res = optimize_family("qudit_mub", 2, d=3)
    return res.best_p, res.best_lambda


# name -> (expected, tolerance, measure)
CHECKS: dict[str, tuple[float, float, Callable[[], float]]] = {
    "lambda-sic": (3.0, 1e-9, _sic),
    "lambda-example1": (13.5, 1e-6, lambda: condition_number(make_example1(2 / 3), 2)),
    "optimum-example1": (2 / 3, 1e-3, lambda: optimize_family("example1", 2).best_p),
    "lambda-example2": (8.0, 1e-6, lambda: condition_number(make_example2(1 / math.sqrt(2)), 2)),
    "optimum-example2": (1 / math.sqrt(2), 1e-3, lambda: optimize_family("example2", 2).best_p),
    "lambda-qutrit": (17.0, 1.0, lambda: _qutrit()[1]),
    "optimum-qutrit": (0.69, 0.02, lambda: _qutrit()[0]),
    "depth-bound-qubit": (2, 0, lambda: min_depth_bound(2, 2)),
    "ic-depth-2qubit-shift": (4, 0, lambda: _first_ic(make_nqubit_shift(2, make_example2(0.5)), 4)),
}


def _first_ic(instr, max_depth):
    first = ic_search(instr, max_depth).first_ic_depth
    return math.nan if first is None else first


def run_checks(only=None) -> list:
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    rows = []
    for name in names:
        expected, tol, measure = CHECKS[name]
        rows.append(Check(name, float(expected), float(measure()), float(tol)))
    return rows
