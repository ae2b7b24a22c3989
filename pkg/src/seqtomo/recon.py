"""Trajectory sampling and linear-inversion state reconstruction."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .instrument import DensityOperator, Instrument
from .linalg import as_matrix, dag, vec, vec_matrix
from .sequential import (
    DEFAULT_MAX_LEAVES,
    EffectSet,
    _check_leaves,
    format_multi_index,
    multi_indices,
    parse_multi_index,
)


class NotInformationallyCompleteError(ValueError):
    """The effect set cannot determine the state."""


@dataclass(frozen=True)
class TrajectoryBatch:
    """Outcome counts of ``total`` independent depth-``N`` trajectories."""

    label: str
    depth: int
    outcomes: int
    seed: int
    counts: dict
    total: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts do not add up to total")

    def count_vector(self) -> np.ndarray:
        return np.array([self.counts.get(ix, 0) for ix in multi_indices(self.outcomes, self.depth)], dtype=np.int64)

    def frequencies(self) -> np.ndarray:
        return self.count_vector() / self.total

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "depth": self.depth,
            "outcomes": self.outcomes,
            "seed": self.seed,
            "total": self.total,
            "counts": {format_multi_index(ix, self.outcomes): int(c) for ix, c in sorted(self.counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "TrajectoryBatch":
        depth = int(data["depth"])
        raw = data["counts"]
        if "outcomes" in data:
            m = int(data["outcomes"])
        else:
            labels = [int(x) for k in raw for x in (k.split(",") if "," in k else k)]
            m = max(labels) if labels else 1
        counts = {}
        for key, c in raw.items():
            ix = parse_multi_index(key, m)
            if len(ix) != depth:
                raise ValueError(f"multi-index {key!r} does not have depth {depth}")
            if int(c) < 0:
                raise ValueError("counts must be nonnegative")
            counts[ix] = int(c)
        return cls(str(data.get("label", "")), depth, m, int(data["seed"]), counts, int(data["total"]))

    @classmethod
    def from_json(cls, text: str) -> "TrajectoryBatch":
        return cls.from_dict(json.loads(text))


def sample_trajectories(
    instr: Instrument,
    depth: int,
    rho: DensityOperator,
    shots: int,
    seed: int,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> TrajectoryBatch:
    """Simulate ``shots`` sequential measurement runs starting from ``rho``.

    Each shot picks outcome ``j`` at step ``k`` with probability
    ``tr(I_j[rho_k]) / tr(rho_k)`` and continues from ``I_j[rho_k]``.
    Shots sharing a prefix share the same unnormalized state, so they are
    drawn together node by node (depth first, outcome order), which keeps
    the result a deterministic function of ``seed`` and ``shots``.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    _check_leaves(instr, depth, max_leaves)
    if rho.dim != instr.dim:
        raise ValueError(f"state has dimension {rho.dim}, instrument acts on {instr.dim}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    m = instr.outcomes
    counts = {}

    def visit(state, prefix, n):
        if len(prefix) == depth:
            counts[prefix] = n
            return
        children = [op(state) for op in instr.operations]
        weights = np.clip(np.array([np.trace(c).real for c in children]), 0.0, None)
        total = weights.sum()
        if total <= 0.0:
            raise RuntimeError(f"all outcomes have zero probability after prefix {prefix}")
        cdf = np.cumsum(weights / total)
        cdf[-1] = 1.0
        draws = np.searchsorted(cdf, rng.random(n), side="right")
        per_outcome = np.bincount(draws, minlength=m)
        for j in range(m):
            if per_outcome[j]:
                # renormalize to keep deep trees away from underflow
                w = np.trace(children[j]).real
                visit(children[j] / w, prefix + (j + 1,), int(per_outcome[j]))

    visit(rho.matrix, (), shots)
    return TrajectoryBatch(instr.label, depth, m, seed, counts, shots)


@dataclass(frozen=True)
class ReconstructionResult:
    estimate: DensityOperator
    raw_estimate: np.ndarray
    # Euclidean misfit of the raw linear-inversion estimate
    residual: float
    # misfit of the returned estimate (equal to residual when not projected)
    estimate_residual: float
    projected: bool


def _project_to_state(M: np.ndarray) -> np.ndarray:
    H = 0.5 * (M + dag(M))
    w, v = np.linalg.eigh(H)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0.0:
        raise ValueError("estimate has no positive part to project onto")
    R = (v * w) @ dag(v)
    R = 0.5 * (R + dag(R))
    return R / np.trace(R).real


def reconstruct(es: EffectSet, probabilities, project: bool = True) -> ReconstructionResult:
    """Linear-inversion estimate of the state from multi-index probabilities.

    Solves ``tr(rho E_x) = p_x`` together with ``tr(rho) = 1`` in the least
    squares sense. With ``project=True`` negative eigenvalues of the
    Hermitian part are clipped and the trace is renormalized.
    """
    if not es.is_ic:
        raise NotInformationallyCompleteError(
            f"effects span {es.span_rank} of {es.dim**2} dimensions; the state is not informationally complete"
        )
    p = np.asarray(probabilities, dtype=float).ravel()
    if p.shape[0] != len(es):
        raise ValueError(f"expected {len(es)} probabilities, got {p.shape[0]}")
    if np.any(p < -1e-12):
        raise ValueError("probabilities must be nonnegative")
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1.0) > 0.01:
        raise ValueError(f"probabilities sum to {p.sum():.6g}, expected 1")
    d = es.dim
    # tr(rho E) = <vec E, vec rho> for Hermitian E
    A_eff = vec_matrix(es.effects).conj()
    A = np.vstack([A_eff, vec(np.eye(d)).conj()[None]])
    b = np.concatenate([p, [1.0]])
    x, *_ = np.linalg.lstsq(A, b.astype(np.complex128), rcond=None)
    raw = x.reshape((d, d), order="F")
    residual = float(np.linalg.norm(A_eff @ x - p))
    if project:
        est = _project_to_state(raw)
        est_residual = float(np.linalg.norm(A_eff @ vec(est) - p))
        return ReconstructionResult(DensityOperator(est), raw, residual, est_residual, True)
    try:
        est = DensityOperator(raw)
    except ValueError as exc:
        raise ValueError(f"linear-inversion estimate is not a valid state ({exc}); use project=True") from exc
    return ReconstructionResult(est, raw, residual, residual, False)


def trace_distance(a, b) -> float:
    """``0.5 * ||a - b||_1`` for two states of equal dimension."""
    A = a.matrix if isinstance(a, DensityOperator) else as_matrix(a, square=True)
    B = b.matrix if isinstance(b, DensityOperator) else as_matrix(b, square=True)
    if A.shape != B.shape:
        raise ValueError("states have different dimensions")
    D = A - B
    D = 0.5 * (D + dag(D))
    return float(0.5 * np.abs(np.linalg.eigvalsh(D)).sum())
