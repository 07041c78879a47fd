"""Dense state-vector and density-matrix primitives.

Qubit ordering is little-endian throughout: qubit ``q`` is bit ``q`` of the
basis index.  Bit strings in any output are printed most-significant qubit
first, so ``format(index, f"0{n}b")`` is the label of basis state ``index``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

STRUCT_TOL = 1e-10
PSD_TOL = 1e-9
MAX_DENSITY_QUBITS = 12
MAX_PURE_QUBITS = 20

# probabilities below this are treated as an empty branch
ZERO_PROB = 1e-14


class CapacityError(RuntimeError):
    """Raised when a register would exceed the dense-storage cap."""


def _n_from_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = _n_from_dim(amps.size)
        if n > MAX_PURE_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the pure-state cap of {MAX_PURE_QUBITS}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"state norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return _n_from_dim(self.amplitudes.size)

    @classmethod
    def basis(cls, index: Union[int, str], n_qubits: int | None = None) -> "PureState":
        """Computational basis state; a string label is read MSB first."""
        if isinstance(index, str):
            n_qubits = len(index) if n_qubits is None else n_qubits
            index = int(index, 2)
        n_qubits = 1 if n_qubits is None else n_qubits
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_vector(cls, vec, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(vec)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        n = _n_from_dim(rho.shape[0])
        if n > MAX_DENSITY_QUBITS:
            raise CapacityError(
                f"{n} qubits exceeds the density-matrix cap of {MAX_DENSITY_QUBITS}"
            )
        if np.max(np.abs(rho - rho.conj().T)) > STRUCT_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > STRUCT_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def n_qubits(self) -> int:
        return _n_from_dim(self.entries.shape[0])

    @classmethod
    def zero(cls, n_qubits: int = 1) -> "DensityMatrix":
        rho = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
        rho[0, 0] = 1.0
        return cls(rho)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_valid(self) -> bool:
        return self.min_eigenvalue() >= -PSD_TOL

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits})"


State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: str
    probability: float
    post_state: State | None


def as_density(state: State) -> DensityMatrix:
    return state.to_density() if isinstance(state, PureState) else state


def tensor(a: State, b: State) -> State:
    """Joint state with ``a`` on the low qubits and ``b`` on the high ones."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(b.amplitudes, a.amplitudes))
    a, b = as_density(a), as_density(b)
    return DensityMatrix(np.kron(b.entries, a.entries))


def _check_indices(n: int, targets: Sequence[int], controls: Sequence[tuple[int, int]]):
    qubits = list(targets) + [q for q, _ in controls]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices collide: {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n}-qubit register")
    for _, pol in controls:
        if pol not in (0, 1):
            raise ValueError(f"control polarity must be 0 or 1, got {pol}")


def _apply_on_axes(t: np.ndarray, u: np.ndarray, axes: list[int], fixed: list[tuple[int, int]]):
    """Contract ``u`` into tensor ``t`` on ``axes`` within the slice picked by ``fixed``.

    ``axes`` are listed most-significant gate qubit first. Returns a new array.
    """
    if fixed:
        out = t.copy()
        idx = [slice(None)] * t.ndim
        for ax, val in fixed:
            idx[ax] = val
        idx = tuple(idx)
        removed = sorted(ax for ax, _ in fixed)
        sub_axes = [a - sum(r < a for r in removed) for a in axes]
        out[idx] = _apply_on_axes(t[idx], u, sub_axes, [])
        return out
    k = len(axes)
    ut = u.reshape([2] * (2 * k))
    res = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(res, list(range(k)), axes)


def apply_gate(
    state: State,
    gate,
    targets: Sequence[int],
    controls: Iterable[tuple[int, int]] = (),
) -> State:
    """Apply a (controlled) unitary; ``targets[0]`` is the gate's least-significant qubit.

    ``gate`` may be a matrix or anything with a ``matrix`` attribute.  Each
    control is a ``(qubit, polarity)`` pair; polarity 0 fires on ``|0>``.
    """
    u = np.asarray(getattr(gate, "matrix", gate), dtype=complex)
    targets = list(targets)
    controls = list(controls)
    n = state.n_qubits
    if u.shape != (1 << len(targets), 1 << len(targets)):
        raise ValueError(f"gate of shape {u.shape} does not match {len(targets)} target(s)")
    _check_indices(n, targets, controls)
    axes = [n - 1 - q for q in reversed(targets)]
    fixed = [(n - 1 - q, pol) for q, pol in controls]
    if isinstance(state, PureState):
        t = state.amplitudes.reshape([2] * n)
        out = _apply_on_axes(t, u, axes, fixed)
        return PureState(out.reshape(-1))
    t = state.entries.reshape([2] * (2 * n))
    t = _apply_on_axes(t, u, axes, fixed)
    t = _apply_on_axes(t, u.conj(), [a + n for a in axes], [(a + n, v) for a, v in fixed])
    rho = t.reshape(1 << n, 1 << n)
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def apply_kraus(rho: DensityMatrix, kraus: Sequence[np.ndarray], targets: Sequence[int]) -> DensityMatrix:
    """Apply a channel given by Kraus operators on ``targets``."""
    n = rho.n_qubits
    targets = list(targets)
    _check_indices(n, targets, [])
    axes = [n - 1 - q for q in reversed(targets)]
    t = rho.entries.reshape([2] * (2 * n))
    acc = np.zeros_like(t)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        kt = _apply_on_axes(t, k, axes, [])
        acc += _apply_on_axes(kt, k.conj(), [a + n for a in axes], [])
    out = acc.reshape(1 << n, 1 << n)
    return DensityMatrix(0.5 * (out + out.conj().T))


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def partial_trace(rho: State, drop: Iterable[int]) -> DensityMatrix:
    """Trace out ``drop``; surviving qubits keep their relative order."""
    rho = as_density(rho)
    n = rho.n_qubits
    drop = sorted(set(drop))
    if not drop:
        raise ValueError("nothing to trace out")
    if len(drop) >= n:
        raise ValueError("cannot trace out every qubit")
    for q in drop:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n}-qubit register")
    rows = list(_LETTERS[:n])
    cols = list(_LETTERS[n:2 * n])
    for q in drop:
        cols[n - 1 - q] = rows[n - 1 - q]
    keep_rows = [rows[n - 1 - q] for q in range(n - 1, -1, -1) if q not in drop]
    keep_cols = [cols[n - 1 - q] for q in range(n - 1, -1, -1) if q not in drop]
    spec = "".join(rows) + "".join(cols) + "->" + "".join(keep_rows) + "".join(keep_cols)
    out = np.einsum(spec, rho.entries.reshape([2] * (2 * n)))
    d = 1 << (n - len(drop))
    out = out.reshape(d, d)
    return DensityMatrix(0.5 * (out + out.conj().T))


def _outcome_bits(outcome: Union[int, str], k: int) -> list[int]:
    """Bits for the measured qubits, element ``j`` belonging to ``qubits[j]``."""
    if isinstance(outcome, str):
        if len(outcome) != k or set(outcome) - {"0", "1"}:
            raise ValueError(f"bad outcome string {outcome!r} for {k} qubit(s)")
        outcome = int(outcome, 2)
    return [(outcome >> j) & 1 for j in range(k)]


def project(state: State, qubits: Sequence[int], outcome: Union[int, str]) -> MeasurementRecord:
    """Project ``qubits`` onto ``outcome``.

    An integer outcome has bit ``j`` for ``qubits[j]``; a string is the same
    value written MSB first.  Empty branches come back with ``post_state=None``.
    """
    qubits = list(qubits)
    n = state.n_qubits
    _check_indices(n, qubits, [])
    bits = _outcome_bits(outcome, len(qubits))
    label = "".join(str(b) for b in reversed(bits))
    if isinstance(state, PureState):
        t = state.amplitudes.reshape([2] * n)
        mask = np.zeros_like(t)
        idx = [slice(None)] * n
        for q, b in zip(qubits, bits):
            idx[n - 1 - q] = b
        mask[tuple(idx)] = t[tuple(idx)]
        vec = mask.reshape(-1)
        prob = float(np.vdot(vec, vec).real)
        if prob < ZERO_PROB:
            return MeasurementRecord(label, max(prob, 0.0), None)
        return MeasurementRecord(label, min(prob, 1.0), PureState(vec / np.sqrt(prob)))
    t = state.entries.reshape([2] * (2 * n))
    idx = [slice(None)] * (2 * n)
    for q, b in zip(qubits, bits):
        idx[n - 1 - q] = b
        idx[2 * n - 1 - q] = b
    sub = np.zeros_like(t)
    sub[tuple(idx)] = t[tuple(idx)]
    mat = sub.reshape(1 << n, 1 << n)
    prob = float(np.trace(mat).real)
    if prob < ZERO_PROB:
        return MeasurementRecord(label, max(prob, 0.0), None)
    mat = mat / prob
    return MeasurementRecord(label, min(prob, 1.0), DensityMatrix(0.5 * (mat + mat.conj().T)))


def outcome_probabilities(state: State, qubits: Sequence[int]) -> dict[str, float]:
    """Marginal distribution of ``qubits``, keyed by MSB-first outcome label."""
    k = len(qubits)
    return {
        rec.outcome: rec.probability
        for rec in (project(state, qubits, v) for v in range(1 << k))
    }


def fidelity_with_pure(rho: State, psi: PureState) -> float:
    rho = as_density(rho)
    if rho.n_qubits != psi.n_qubits:
        raise ValueError("dimension mismatch")
    val = np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes).real
    return float(min(max(val, 0.0), 1.0))


def sample_counts(rho: State, shots: int, seed=None) -> dict[str, int]:
    """Multinomial computational-basis counts; deterministic for a given seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rho = as_density(rho)
    n = rho.n_qubits
    p = np.clip(np.diag(rho.entries).real, 0.0, None)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    return {format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c}
