"""Quantum operations, instruments, and the built-in instrument families.

Operations are stored as Kraus lists. An :class:`Instrument` is an ordered
tuple of operations whose effects ``E_j = I_j^dag(I)`` resolve the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    as_matrix,
    dag,
    hermiticity_residual,
    is_unitary,
    psd_sqrt,
)

__all__ = [
    "DensityOperator",
    "QuantumOperation",
    "Instrument",
    "ValidationReport",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "HADAMARD",
    "V_UNITARY",
    "apply",
    "apply_dual",
    "validate",
    "check_effect",
    "make_example1",
    "make_example2",
    "mub_transition",
    "qutrit_mub_unitaries",
    "make_qudit_mub",
    "make_qudit_custom",
    "shift_unitary",
    "make_nqubit_shift",
    "make_luders",
    "make_projective",
    "sic_qubit_effects",
    "is_prime",
]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
V_UNITARY = np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / np.sqrt(2)


class DensityOperator:
    """A validated quantum state: Hermitian, PSD, unit trace."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOLERANCES):
        rho = as_matrix(matrix, square=True)
        if hermiticity_residual(rho) > tol.hermiticity_tol:
            raise ValueError("density operator is not Hermitian")
        rho = 0.5 * (rho + dag(rho))
        if abs(np.trace(rho).real - 1.0) > tol.trace_tol:
            raise ValueError(f"density operator has trace {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -tol.psd_tol:
            raise ValueError("density operator is not positive semidefinite")
        rho.setflags(write=False)
        self.matrix = rho

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityOperator":
        return cls(np.eye(d) / d)

    @classmethod
    def basis(cls, d: int, k: int) -> "DensityOperator":
        """Pure state ``|k><k|`` with 0-based ``k``."""
        if not 0 <= k < d:
            raise ValueError(f"basis index {k} out of range for d={d}")
        rho = np.zeros((d, d), dtype=np.complex128)
        rho[k, k] = 1.0
        return cls(rho)

    @classmethod
    def random(cls, d: int, rng: np.random.Generator, rank: int | None = None) -> "DensityOperator":
        """Hilbert-Schmidt random state (``rank=d``) or lower-rank Ginibre state."""
        r = d if rank is None else rank
        G = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
        rho = G @ dag(G)
        return cls(rho / np.trace(rho).real)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


class QuantumOperation:
    """Completely positive, trace-nonincreasing map ``X -> sum_a K_a X K_a^dag``."""

    __slots__ = ("kraus",)

    def __init__(self, kraus: Sequence, tol: Tolerances = DEFAULT_TOLERANCES):
        ks = [as_matrix(K, square=True) for K in kraus]
        if not ks:
            raise ValueError("a quantum operation needs at least one Kraus operator")
        d = ks[0].shape[0]
        if any(K.shape != (d, d) for K in ks):
            raise ValueError("Kraus operators have mismatched dimensions")
        for K in ks:
            K.setflags(write=False)
        self.kraus = tuple(ks)
        top = np.linalg.eigvalsh(self.dual_identity())[-1]
        if top > 1.0 + tol.psd_tol:
            raise ValueError(f"operation is trace increasing (sum K^dag K has eigenvalue {top:.6g})")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def kraus_rank(self) -> int:
        """Rank of the Choi matrix, i.e. the minimal number of Kraus operators."""
        vecs = np.array([K.reshape(-1, order="F") for K in self.kraus])
        s = np.linalg.svd(vecs, compute_uv=False)
        return int(np.count_nonzero(s > 1e-10 * s[0])) if s[0] > 0 else 0

    def __call__(self, X):
        return apply(self, X)

    def dual(self, X):
        return apply_dual(self, X)

    def dual_identity(self) -> np.ndarray:
        """The effect ``Phi^dag(I) = sum_a K_a^dag K_a``."""
        return sum(dag(K) @ K for K in self.kraus)

    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    def __repr__(self):
        return f"QuantumOperation(dim={self.dim}, kraus={len(self.kraus)})"


def _check_dim(op: QuantumOperation, X) -> np.ndarray:
    A = as_matrix(X)
    if A.shape != (op.dim, op.dim):
        raise ValueError(f"operand has shape {A.shape}, operation acts on dimension {op.dim}")
    return A


def apply(op: QuantumOperation, X) -> np.ndarray:
    """Forward action ``sum_a K_a X K_a^dag``."""
    A = _check_dim(op, X)
    return sum(K @ A @ dag(K) for K in op.kraus)


def apply_dual(op: QuantumOperation, X) -> np.ndarray:
    """Dual (Heisenberg-picture) action ``sum_a K_a^dag X K_a``."""
    A = _check_dim(op, X)
    return sum(dag(K) @ A @ K for K in op.kraus)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`: one ``(name, passed, residual)`` row per invariant."""

    checks: tuple

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self):
        return [c for c in self.checks if not c[1]]


class Instrument:
    """Finite-outcome quantum instrument on a ``d``-level system.

    Parameters
    ----------
    operations : sequence of QuantumOperation or of Kraus lists
        One operation per outcome, in outcome order.
    label : str
        Free-form name used in reports and serialized files.
    """

    def __init__(self, operations: Sequence, label: str = ""):
        ops = tuple(op if isinstance(op, QuantumOperation) else QuantumOperation(op) for op in operations)
        if len(ops) < 2:
            raise ValueError("an instrument needs at least two outcomes")
        d = ops[0].dim
        if any(op.dim != d for op in ops):
            raise ValueError("operations act on different dimensions")
        self.operations = ops
        self.label = str(label)

    @property
    def dim(self) -> int:
        return self.operations[0].dim

    @property
    def outcomes(self) -> int:
        return len(self.operations)

    def __len__(self):
        return len(self.operations)

    def __getitem__(self, j) -> QuantumOperation:
        return self.operations[j]

    def __iter__(self):
        return iter(self.operations)

    def effects(self) -> np.ndarray:
        """Single-use POVM, shape ``(m, d, d)``."""
        return np.stack([op.dual_identity() for op in self.operations])

    def channel(self, X) -> np.ndarray:
        """Outcome-averaged (trace preserving) action."""
        return sum(apply(op, X) for op in self.operations)

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
        return validate(self, tol)

    def __repr__(self):
        return f"Instrument(label={self.label!r}, dim={self.dim}, outcomes={self.outcomes})"


def validate(instr: Instrument, tol: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
    """Check the identity resolution and positivity of every outcome effect."""
    effects = instr.effects()
    d = instr.dim
    total = effects.sum(axis=0)
    resolution = float(np.max(np.abs(total - np.eye(d))))
    checks = [("identity_resolution", resolution <= tol.trace_tol, resolution)]
    for j, E in enumerate(effects, start=1):
        herm = hermiticity_residual(E)
        lo = float(np.linalg.eigvalsh(0.5 * (E + dag(E)))[0])
        checks.append((f"effect_{j}_psd", herm <= tol.hermiticity_tol and lo >= -tol.psd_tol, max(herm, -lo, 0.0)))
    return ValidationReport(tuple(checks))


def check_effect(E, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Return ``E`` as an array after checking ``O <= E <= I``."""
    A = as_matrix(E, square=True)
    if hermiticity_residual(A) > tol.hermiticity_tol:
        raise ValueError("effect is not Hermitian")
    A = 0.5 * (A + dag(A))
    w = np.linalg.eigvalsh(A)
    if w[0] < -tol.psd_tol or w[-1] > 1.0 + tol.psd_tol:
        raise ValueError(f"effect eigenvalues [{w[0]:.3g}, {w[-1]:.3g}] leave [0, 1]")
    return A


def _require_unit_interval(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parameter p={p} outside [0, 1]")
    return p


def make_example1(p: float) -> Instrument:
    """Dichotomic qubit instrument whose operations have Kraus rank 2.

    ``I_1(rho) = H (E rho E^dag + T rho T^dag) H^dag / 2`` and
    ``I_2(rho) = V (E^dag rho E + B rho B^dag) V^dag / 2`` with
    ``E = [[0, sqrt p], [0, 0]]``, ``T = diag(sqrt(1-p), 1)``,
    ``B = diag(1, sqrt(1-p))``.
    """
    p = _require_unit_interval(p)
    E = np.array([[0, np.sqrt(p)], [0, 0]], dtype=np.complex128)
    T = np.diag([np.sqrt(1 - p), 1]).astype(np.complex128)
    B = np.diag([1, np.sqrt(1 - p)]).astype(np.complex128)
    s = 1 / np.sqrt(2)
    op1 = QuantumOperation([s * HADAMARD @ E, s * HADAMARD @ T])
    op2 = QuantumOperation([s * V_UNITARY @ dag(E), s * V_UNITARY @ B])
    return Instrument([op1, op2], label=f"example1(p={p!r})")


def make_example2(p: float) -> Instrument:
    """Dichotomic qubit instrument with single-Kraus operations."""
    p = _require_unit_interval(p)
    s = 1 / np.sqrt(2)
    minus = np.diag([np.sqrt(1 - p), np.sqrt(1 + p)]).astype(np.complex128)
    plus = np.diag([np.sqrt(1 + p), np.sqrt(1 - p)]).astype(np.complex128)
    op1 = QuantumOperation([s * HADAMARD @ minus])
    op2 = QuantumOperation([s * V_UNITARY @ plus])
    return Instrument([op1, op2], label=f"example2(p={p!r})")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def mub_transition(d: int, r: int) -> np.ndarray:
    """Transition matrix from the computational basis to the ``r``-th MUB.

    Columns are the basis vectors. For odd prime ``d`` the entries are
    ``w**(r*k*k + a*k) / sqrt(d)`` with ``w = exp(2 pi i / d)`` (row ``k``,
    column ``a``); for ``d = 2`` the two bases are the sigma_x and sigma_y
    eigenbases.
    """
    if not is_prime(d):
        raise ValueError(f"built-in MUBs need a prime dimension, got d={d}")
    if not 0 <= r < d:
        raise ValueError(f"basis index r={r} out of range")
    k = np.arange(d)[:, None]
    a = np.arange(d)[None, :]
    if d == 2:
        M = (1j ** (r * k)) * (-1.0) ** (a * k)
    else:
        M = np.exp(2j * np.pi * ((r * k * k + a * k) % d) / d)
    return M.astype(np.complex128) / np.sqrt(d)


def qutrit_mub_unitaries() -> list:
    """The three qutrit unitaries ``U_k`` (adjoints of the MUB transition matrices)."""
    return [dag(mub_transition(3, r)) for r in range(3)]


def _qudit_kraus(d: int, p: float, unitaries: Sequence) -> list:
    lo = -1.0 / (d - 1)
    if not lo - 1e-12 <= p <= 1.0:
        raise ValueError(f"parameter p={p} outside [{lo}, 1]")
    ops = []
    for k, U in enumerate(unitaries):
        M = (1 - p) / d * np.eye(d, dtype=np.complex128)
        M[k, k] += p
        ops.append(QuantumOperation([U @ psd_sqrt(M)]))
    return ops


def make_qudit_mub(d: int, p: float) -> Instrument:
    """``d``-outcome instrument ``I_k = U_k sqrt(M_k) . sqrt(M_k) U_k^dag`` with MUB unitaries.

    ``M_k = (1-p)/d I + p |k><k|``. ``U_k^dag`` is the transition matrix to
    the ``k``-th mutually unbiased basis (excluding the computational one).
    """
    d = int(d)
    if not is_prime(d):
        raise ValueError(f"make_qudit_mub needs a prime dimension, got d={d}")
    unitaries = [dag(mub_transition(d, r)) for r in range(d)]
    return Instrument(_qudit_kraus(d, float(p), unitaries), label=f"qudit_mub(d={d}, p={float(p)!r})")


def make_qudit_custom(d: int, p: float, unitaries: Sequence, label: str | None = None) -> Instrument:
    """Same construction as :func:`make_qudit_mub` with caller-chosen unitaries."""
    d = int(d)
    if d < 2:
        raise ValueError("dimension must be at least 2")
    Us = [as_matrix(U, square=True) for U in unitaries]
    if len(Us) != d:
        raise ValueError(f"expected {d} unitaries, got {len(Us)}")
    for U in Us:
        if U.shape != (d, d):
            raise ValueError(f"unitary has shape {U.shape}, expected {(d, d)}")
        if not is_unitary(U, 1e-9):
            raise ValueError("matrix is not unitary within 1e-9")
    return Instrument(_qudit_kraus(d, float(p), Us), label=label or f"qudit_custom(d={d}, p={float(p)!r})")


def shift_unitary(n: int) -> np.ndarray:
    """Permutation ``|j_1 ... j_n> -> |j_n j_1 ... j_{n-1}>`` on ``n`` qubits."""
    D = 2**n
    U = np.zeros((D, D), dtype=np.complex128)
    for src in range(D):
        # qubit 1 is the most significant bit
        bits = [(src >> (n - 1 - q)) & 1 for q in range(n)]
        moved = [bits[-1]] + bits[:-1]
        tgt = 0
        for b in moved:
            tgt = (tgt << 1) | b
        U[tgt, src] = 1.0
    return U


def make_nqubit_shift(n: int, base: Instrument) -> Instrument:
    """Act with ``base`` on the first qubit, then cyclically shift the register."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if base.dim != 2 or base.outcomes != 2:
        raise ValueError("base must be a two-outcome qubit instrument")
    if n == 1:
        return Instrument(base.operations, label=base.label)
    U = shift_unitary(n)
    pad = np.eye(2 ** (n - 1), dtype=np.complex128)
    ops = [QuantumOperation([U @ np.kron(K, pad) for K in op.kraus]) for op in base.operations]
    return Instrument(ops, label=f"nqubit_shift(n={n}, base={base.label})")


def _check_resolution(effects: Sequence, tol: Tolerances) -> list:
    Es = [check_effect(E, tol) for E in effects]
    if len(Es) < 2:
        raise ValueError("need at least two effects")
    d = Es[0].shape[0]
    if any(E.shape != (d, d) for E in Es):
        raise ValueError("effects have mismatched dimensions")
    if np.max(np.abs(sum(Es) - np.eye(d))) > tol.trace_tol:
        raise ValueError("effects do not resolve the identity")
    return Es


def make_luders(effects: Sequence, tol: Tolerances = DEFAULT_TOLERANCES, label: str = "luders") -> Instrument:
    """Lüders instrument ``rho -> sqrt(E_j) rho sqrt(E_j)``."""
    Es = _check_resolution(effects, tol)
    return Instrument([QuantumOperation([psd_sqrt(E, tol)]) for E in Es], label=label)


def make_projective(
    projectors: Sequence,
    post_channels: Sequence | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    label: str = "projective",
) -> Instrument:
    """Sharp instrument ``I_j[rho] = Phi_j[P_j rho P_j]``.

    ``post_channels`` default to the identity channel on every outcome.
    """
    Ps = _check_resolution(projectors, tol)
    for i, P in enumerate(Ps):
        if np.max(np.abs(P @ P - P)) > tol.psd_tol:
            raise ValueError(f"effect {i + 1} is not a projector")
        for Q in Ps[i + 1 :]:
            if np.max(np.abs(P @ Q)) > tol.psd_tol:
                raise ValueError("projectors are not mutually orthogonal")
    d = Ps[0].shape[0]
    if post_channels is None:
        post_channels = [QuantumOperation([np.eye(d)]) for _ in Ps]
    if len(post_channels) != len(Ps):
        raise ValueError("need one post-measurement channel per projector")
    ops = []
    for P, ch in zip(Ps, post_channels):
        ch = ch if isinstance(ch, QuantumOperation) else QuantumOperation(ch)
        if np.max(np.abs(ch.dual_identity() - np.eye(d))) > tol.trace_tol:
            raise ValueError("post-measurement channel is not trace preserving")
        ops.append(QuantumOperation([K @ P for K in ch.kraus]))
    return Instrument(ops, label=label)


def sic_qubit_effects() -> np.ndarray:
    """Tetrahedral qubit SIC-POVM: ``(I + n_k . sigma) / 4``."""
    dirs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    return np.stack([(np.eye(2) + n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z) / 4 for n in dirs])
