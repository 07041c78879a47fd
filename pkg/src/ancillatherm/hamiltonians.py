"""Benchmark Hamiltonians, the randomized generator and phase bookkeeping.

Phases follow ``exp(-i E tau) = exp(2 pi i theta)`` after shifting every
energy by the groundstate energy, so the groundstate always has phase 0 and
reads out as the all-zero precision pattern.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

HERMITIAN_TOL = 1e-10
FILE_HERMITIAN_TOL = 1e-8
# distance (in units of one precision step) below which a phase counts as exact
EXACT_PHASE_TOL = 1e-3

H2_ENTRIES = [
    [-0.08609, -0.22467, -0.41822, -0.10511],
    [-0.22467, -1.40667, -0.16506, -0.67003],
    [-0.41822, -0.16506, -3.06202, 0.09996],
    [-0.10511, -0.67003, 0.09996, 1.41319],
]


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    matrix: np.ndarray
    tau: float = 1.0
    name: str = "H"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ValueError("Hamiltonian must be a square 2^n matrix")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("Hamiltonian is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @cached_property
    def _eig(self):
        w, v = np.linalg.eigh(self.matrix)
        return w, v

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        """Columns are eigenvectors, in ascending energy order."""
        return self._eig[1]

    @cached_property
    def label_basis(self) -> np.ndarray:
        """Eigenvectors relabelled by their dominant computational-basis index.

        Column ``j`` is the eigenvector assigned to basis state ``j`` (greedy by
        overlap), phased so that entry ``j`` is real and positive.  A diagonal
        Hamiltonian gives the identity.
        """
        v = self.eigenvectors
        dim = v.shape[0]
        weight = np.abs(v) ** 2
        out = np.zeros_like(v)
        free_rows, free_cols = set(range(dim)), set(range(dim))
        for _ in range(dim):
            r, c = max(((r, c) for r in free_rows for c in free_cols), key=lambda rc: weight[rc])
            col = v[:, c]
            out[:, r] = col * (abs(col[r]) / col[r])
            free_rows.discard(r)
            free_cols.discard(c)
        return out

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def groundstate(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def phases(self, tau: float | None = None) -> np.ndarray:
        """Shifted phases ``(E_G - E_i) tau / 2 pi mod 1``, groundstate first."""
        tau = self.tau if tau is None else tau
        th = np.mod((self.ground_energy - self.eigenvalues) * tau / (2 * math.pi), 1.0)
        th[np.isclose(th, 1.0, atol=1e-12)] = 0.0
        return th


def builtin(name: str) -> Hamiltonian:
    key = name.lower()
    if key == "h1":
        return Hamiltonian(np.diag([0.0, -1.5 * math.pi]), name="h1")
    if key == "h2":
        return Hamiltonian(np.array(H2_ENTRIES), name="h2")
    raise ValueError(f"unknown built-in Hamiltonian {name!r}")


def _gram_schmidt(a: np.ndarray) -> np.ndarray | None:
    q, r = np.linalg.qr(a)
    d = np.diag(r)
    if np.min(np.abs(d)) < 1e-8:
        return None
    # sign convention of classical Gram-Schmidt: positive diagonal of R
    return q * (d / np.abs(d))


_QUARTER_TURNS = np.array([1, 1j, -1, -1j])
# i*log(e^{i k pi/2}) on the principal branch, k = 0..3
_PRINCIPAL_ENERGIES = np.array([0.0, -math.pi / 2, -math.pi, math.pi / 2])


def generate_h2_style(n: int = 2, eps: float = 0.5, seed=None, max_retries: int = 20) -> Hamiltonian:
    """Random Hamiltonian with ``exp(-iH) = V D V^dag``, ``D_kk = e^{i k pi/2}``.

    ``V`` is the Gram-Schmidt orthonormalisation of ``I + eps * B`` with
    ``B_ij`` drawn from a normal distribution of variance 0.5.
    """
    if not 1 <= n <= 3:
        raise ValueError("generator supports 1 <= n <= 3")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    dim = 1 << n
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        b = rng.normal(0.0, math.sqrt(0.5), size=(dim, dim))
        v = _gram_schmidt(np.eye(dim) + eps * b)
        if v is not None:
            break
    else:
        raise RuntimeError("Gram-Schmidt broke down on every draw")
    k = np.arange(dim) % 4
    energies = _PRINCIPAL_ENERGIES[k]
    h = (v * energies) @ v.conj().T
    h = 0.5 * (h + h.conj().T)
    return Hamiltonian(h, name=f"h2-style(n={n},eps={eps},seed={seed})")


def quarter_turn_diagonal(dim: int) -> np.ndarray:
    return np.diag(_QUARTER_TURNS[np.arange(dim) % 4])


def phase_patterns(h: Hamiltonian, m: int, tau: float | None = None) -> np.ndarray:
    """Nearest ``m``-bit grid value (round half to even) of every shifted phase."""
    th = h.phases(tau)
    return np.mod(np.rint(th * (1 << m)).astype(int), 1 << m)


def shifted_phases(h: Hamiltonian, m: int, tau: float | None = None) -> tuple[list[float], int]:
    """``(phases, N*)`` where ``N*`` counts eigenstates sharing the groundstate's pattern."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pats = phase_patterns(h, m, tau)
    return [float(t) for t in h.phases(tau)], int(np.sum(pats == pats[0]))


def phases_exact(h: Hamiltonian, m: int, tau: float | None = None) -> bool:
    th = h.phases(tau) * (1 << m)
    return bool(np.all(np.abs(th - np.rint(th)) < EXACT_PHASE_TOL))


def minimal_precision(h: Hamiltonian, max_m: int = 6, tau: float | None = None) -> int:
    """Smallest ``m`` giving exactly representable phases and ``N* = 1``; else ``max_m``."""
    for m in range(1, max_m + 1):
        if phases_exact(h, m, tau) and shifted_phases(h, m, tau)[1] == 1:
            return m
    return max_m


def load_hamiltonian(path, tau: float = 1.0) -> Hamiltonian:
    """Read a dense matrix stored as rows of ``[re, im]`` pairs."""
    data = json.loads(Path(path).read_text())
    rows = data["matrix"] if isinstance(data, dict) else data
    try:
        m = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed Hamiltonian file {path}: {exc}") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Hamiltonian file must hold a square matrix")
    if np.max(np.abs(m - m.conj().T)) > FILE_HERMITIAN_TOL:
        raise ValueError("Hamiltonian file is not Hermitian")
    tau = float(data.get("tau", tau)) if isinstance(data, dict) else tau
    return Hamiltonian(0.5 * (m + m.conj().T), tau=tau, name=str(path))


def dump_hamiltonian(h: Hamiltonian) -> str:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in h.matrix]
    return json.dumps({"matrix": rows, "tau": h.tau})
