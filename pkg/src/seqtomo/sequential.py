"""Collective effects of repeated instrument use and informational completeness.

Multi-indices are tuples of 1-based outcome labels ``(j_1, ..., j_N)`` where
``j_1`` is the first measurement performed. Every array indexed by
multi-indices uses row-major order over ``(j_1, ..., j_N)`` with ``j_N``
varying fastest, i.e. :func:`itertools.product` order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .instrument import DensityOperator, Instrument
from .linalg import DEFAULT_TOLERANCES, Tolerances, as_matrix, dag, span_rank, vec_matrix

DEFAULT_MAX_LEAVES = 4096


class LeafCapExceeded(ValueError):
    """The measurement tree would have more leaves than allowed."""


def multi_indices(outcomes: int, depth: int) -> list:
    return list(itertools.product(range(1, outcomes + 1), repeat=depth))


def format_multi_index(index, outcomes: int | None = None) -> str:
    """``(1, 2, 1) -> "121"``; comma separated when there are more than 9 outcomes."""
    m = max(index, default=0) if outcomes is None else outcomes
    if m > 9:
        return ",".join(str(j) for j in index)
    return "".join(str(j) for j in index)


def parse_multi_index(key: str, outcomes: int) -> tuple:
    if outcomes > 9:
        parts = key.split(",")
    else:
        parts = list(key.replace(",", ""))
    index = tuple(int(p) for p in parts)
    if any(not 1 <= j <= outcomes for j in index):
        raise ValueError(f"multi-index {key!r} has labels outside 1..{outcomes}")
    return index


def _check_leaves(instr: Instrument, depth: int, max_leaves: int) -> int:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    leaves = instr.outcomes**depth
    if leaves > max_leaves:
        raise LeafCapExceeded(f"{instr.outcomes}^{depth} = {leaves} leaves exceeds the cap of {max_leaves}")
    return leaves


def _dual_stack(instr: Instrument, X: np.ndarray) -> np.ndarray:
    """Apply every outcome's dual map to a stack ``X`` of shape ``(n, d, d)``.

    Result has shape ``(m * n, d, d)``, outcome-major.
    """
    out = []
    for op in instr.operations:
        K = op.stacked()
        out.append(np.einsum("aji,njk,akl->nil", K.conj(), X, K, optimize=True))
    return np.concatenate(out)


def _forward_stack(instr: Instrument, X: np.ndarray) -> np.ndarray:
    """Forward counterpart of :func:`_dual_stack`: parent-major, outcome-minor."""
    per_outcome = []
    for op in instr.operations:
        K = op.stacked()
        per_outcome.append(np.einsum("aij,njk,alk->nil", K, X, K.conj(), optimize=True))
    # (m, n, d, d) -> (n, m, d, d)
    return np.stack(per_outcome, axis=1).reshape(-1, *X.shape[1:])


@dataclass(frozen=True)
class EffectSet:
    """The ``m**N`` collective effects of ``N`` sequential uses of an instrument."""

    dim: int
    depth: int
    outcomes: int
    effects: np.ndarray
    span_rank: int
    is_ic: bool

    @property
    def indices(self) -> list:
        return multi_indices(self.outcomes, self.depth)

    def __len__(self):
        return self.effects.shape[0]

    def position(self, index) -> int:
        pos = 0
        for j in index:
            if not 1 <= j <= self.outcomes:
                raise KeyError(index)
            pos = pos * self.outcomes + (j - 1)
        if len(index) != self.depth:
            raise KeyError(index)
        return pos

    def __getitem__(self, index) -> np.ndarray:
        if isinstance(index, str):
            index = parse_multi_index(index, self.outcomes)
        return self.effects[self.position(tuple(index))]

    def as_dict(self) -> dict:
        return dict(zip(self.indices, self.effects))

    def probabilities(self, rho) -> np.ndarray:
        """``tr(rho E_x)`` for every multi-index."""
        R = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho, square=True)
        return np.einsum("ij,nji->n", R, self.effects).real


def collective_effects(
    instr: Instrument,
    depth: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> EffectSet:
    """Effects ``E_{j_1...j_N} = I_{j_1}^dag[... I_{j_N}^dag[I]]``.

    The innermost dual map belongs to the last measurement. Built by
    prepending one outer dual application per level, so level ``k`` holds
    the effects of the last ``k`` uses.
    """
    _check_leaves(instr, depth, max_leaves)
    d = instr.dim
    level = np.eye(d, dtype=np.complex128)[None]
    for _ in range(depth):
        level = _dual_stack(instr, level)
    level = 0.5 * (level + dag(level))
    rank = span_rank(level, tol.rank_rel_tol)
    return EffectSet(d, depth, instr.outcomes, level, rank, rank == d * d)


def forward_tree(instr: Instrument, depth: int, rho, max_leaves: int = DEFAULT_MAX_LEAVES) -> np.ndarray:
    """Unnormalized leaf states ``I_{j_N}[... I_{j_1}[rho]]`` in multi-index order."""
    _check_leaves(instr, depth, max_leaves)
    R = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho, square=True)
    if R.shape != (instr.dim, instr.dim):
        raise ValueError(f"state has dimension {R.shape[0]}, instrument acts on {instr.dim}")
    level = R[None].astype(np.complex128)
    for _ in range(depth):
        level = _forward_stack(instr, level)
    return level


def outcome_distribution(
    instr: Instrument, depth: int, rho: DensityOperator, max_leaves: int = DEFAULT_MAX_LEAVES
) -> np.ndarray:
    """Probabilities ``tr(I_{j_N}[... I_{j_1}[rho]])`` by forward propagation."""
    leaves = forward_tree(instr, depth, rho, max_leaves)
    p = np.einsum("nii->n", leaves).real
    return np.clip(p, 0.0, None)


class GramReport(NamedTuple):
    gram: np.ndarray
    eigenvalues: np.ndarray
    condition_number: float
    # why the condition number is infinite; None when finite
    infinite_reason: str | None

    @property
    def is_finite(self) -> bool:
        return self.infinite_reason is None


def gram_report(es: EffectSet, tol: Tolerances = DEFAULT_TOLERANCES) -> GramReport:
    """Gram matrix ``G_xy = tr(E_x E_y)`` and its condition number."""
    A = vec_matrix(es.effects)
    G = (A.conj() @ A.T).real
    G = 0.5 * (G + G.T)
    w = np.linalg.eigvalsh(G)[::-1].copy()
    a = np.abs(w)
    top, bottom = a.max(), a.min()
    d2 = es.dim * es.dim
    if not es.is_ic:
        reason = f"effects span {es.span_rank} of {d2} dimensions"
    elif len(es) > d2:
        reason = f"{len(es)} effects in a {d2}-dimensional space are linearly dependent"
    elif bottom <= tol.rank_rel_tol * top:
        reason = "smallest Gram eigenvalue below rank threshold"
    else:
        return GramReport(G, w, float(top / bottom), None)
    return GramReport(G, w, math.inf, reason)


def condition_number(instr: Instrument, depth: int, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    return gram_report(collective_effects(instr, depth, tol), tol).condition_number


def min_depth_bound(m: int, d: int) -> int:
    """Smallest ``N`` with ``m**N >= d**2``."""
    if m < 2 or d < 2:
        raise ValueError("m and d must both be at least 2")
    N = max(1, math.ceil(2 * math.log(d) / math.log(m)))
    while N > 1 and m ** (N - 1) >= d * d:
        N -= 1
    while m**N < d * d:
        N += 1
    return N


class ICSearch(NamedTuple):
    first_ic_depth: int | None
    rank_per_depth: list


def ic_search(
    instr: Instrument,
    max_depth: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> ICSearch:
    """Span rank of the collective effects at depths ``1..max_depth``."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    _check_leaves(instr, max_depth, max_leaves)
    d2 = instr.dim**2
    ranks = []
    first = None
    level = np.eye(instr.dim, dtype=np.complex128)[None]
    for depth in range(1, max_depth + 1):
        level = _dual_stack(instr, level)
        r = span_rank(level, tol.rank_rel_tol)
        ranks.append(r)
        if first is None and r == d2:
            first = depth
    return ICSearch(first, ranks)
