"""Groundstate preparation by phase estimation, NOR compilation and scrambling.

Layout for ``n`` targets, precision ``m`` and ``T`` applications: targets are
``0..n-1``; iteration 0 owns precision block ``P0``; every later iteration
``i`` owns a NOR block ``R_i`` (``m - 1`` qubits, none for ``m = 1``) followed
by a fresh precision block ``P_i``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..analysis import predicted_groundstate_fidelity
from ..gates import Gate, Op, controlled_power, count_gates, hamiltonian_evolution, inverse_qft_ops, standard_gate
from ..hamiltonians import Hamiltonian, minimal_precision, shifted_phases
from ..qstate import PureState, fidelity_with_pure
from ..results import RunResult, SeriesPoint
from .core import Circuit, execute
from .perceptron import ThermaliseConfig, _noise_model

SCRAMBLING_MODES = ("exact", "hadamard")


def _hadamard_n(n: int) -> np.ndarray:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, h)
    return out


def nor_ops(precision, helpers) -> list[Op]:
    """Compute OR(precision) onto ``helpers[-1]`` (``|0>`` iff the register is all zero).

    X on every input and helper, then a Toffoli chain; each intermediate helper is
    flipped back to its complement before it feeds the next Toffoli.  The inputs
    are left complemented, which is harmless since they are discarded next.
    """
    precision, helpers = list(precision), list(helpers)
    m = len(precision)
    if len(helpers) != max(m - 1, 0):
        raise ValueError("NOR needs m - 1 helper qubits")
    if m == 1:
        return []
    x = standard_gate("X")
    ops = [Op(x, (q,)) for q in precision + helpers]
    prev = precision[0]
    for k, r in enumerate(helpers):
        ops.append(Op(x, (r,), ((prev, 1), (precision[k + 1], 1))))
        if k < len(helpers) - 1:
            ops.append(Op(x, (r,)))
        prev = r
    return ops


def build_nor(m: int) -> Circuit:
    """Precision qubits ``0..m-1``, helpers ``m..2m-2``; the result sits on qubit ``2m - 2``.

    For ``m = 1`` the single precision qubit already carries OR(register) and the
    circuit is empty.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    prec = list(range(m))
    helpers = list(range(m, 2 * m - 1))
    return Circuit(max(2 * m - 1, 1), nor_ops(prec, helpers), ancillae=tuple(helpers))


def nor_output(m: int) -> int:
    return 2 * m - 2


def build_scrambler(h: Hamiltonian, mode: str = "exact") -> Gate:
    """``V H^n V^dag`` in the eigenbasis (``exact``) or plain ``H^n`` (``hadamard``).

    ``V`` is :attr:`Hamiltonian.label_basis`, so a diagonal Hamiltonian gives ``H^n`` in both modes.
    """
    if mode not in SCRAMBLING_MODES:
        raise ValueError(f"mode must be one of {SCRAMBLING_MODES}")
    hn = _hadamard_n(h.n_qubits)
    if mode == "hadamard":
        return Gate("Scramble-H", hn, "U2" if h.n_qubits == 1 else "COMPOSITE")
    v = h.label_basis
    s = v @ hn @ v.conj().T
    return Gate("Scramble", s, "U3" if h.n_qubits == 1 else "COMPOSITE")


def shifted_evolution(h: Hamiltonian, tau: float | None = None, shift: float | None = None) -> Gate:
    """``exp(-i (H - shift) tau)``; ``shift`` defaults to the groundstate energy."""
    tau = h.tau if tau is None else tau
    shift = h.ground_energy if shift is None else shift
    dim = h.matrix.shape[0]
    return hamiltonian_evolution(h.matrix - shift * np.eye(dim), tau, label="A")


def pea_ops(a: Gate, targets, precision, control: int | None = None) -> list[Op]:
    """Phase estimation on ``precision`` (``precision[0]`` least significant).

    With ``control`` only the controlled powers are conditioned: on the skipped
    branch the fresh register sees H^m then QFT^dag, which returns it to |0...0>.
    """
    h = standard_gate("H")
    ops = [Op(h, (p,)) for p in precision]
    for j, p in enumerate(precision):
        ctrls = ((p, 1),) if control is None else ((p, 1), (control, 1))
        ops.append(controlled_power(a, j, ctrls, targets))
    ops += inverse_qft_ops(list(precision))
    return ops


def build_pea_unit(h: Hamiltonian, m: int, tau: float | None = None, shift: float | None = None) -> Circuit:
    """Targets ``0..n-1``, precision ``n..n+m-1``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    n = h.n_qubits
    prec = list(range(n, n + m))
    a = shifted_evolution(h, tau, shift)
    return Circuit(n + m, pea_ops(a, list(range(n)), prec), ancillae=tuple(prec))


@dataclass(frozen=True)
class GroundstateLayout:
    n: int
    m: int
    T: int

    def precision(self, i: int) -> list[int]:
        if i == 0:
            start = self.n
        else:
            start = self.n + self.m + (i - 1) * (2 * self.m - 1) + (self.m - 1)
        return list(range(start, start + self.m))

    def helpers(self, i: int) -> list[int]:
        if i == 0:
            return []
        start = self.n + self.m + (i - 1) * (2 * self.m - 1)
        return list(range(start, start + self.m - 1))

    @property
    def n_qubits(self) -> int:
        return self.n + self.m + (self.T - 1) * (2 * self.m - 1)


def build_groundstate_thermalise(h: Hamiltonian, config: ThermaliseConfig) -> Circuit:
    """Phase estimation, then ``T - 1`` rounds of [NOR; scramble and re-estimate on fresh
    ancillae, both conditioned on the NOR output].  Every spent ancilla is marked for
    tracing right after its last use.  The initial superposition is an input, not ops."""
    m = config.m or minimal_precision(h)
    lay = GroundstateLayout(h.n_qubits, m, config.T)
    n = h.n_qubits
    targets = list(range(n))
    a = shifted_evolution(h, config.tau, config.energy_shift)
    scr = build_scrambler(h, config.scrambling_mode)
    c = Circuit(lay.n_qubits, ancillae=tuple(range(n, lay.n_qubits)))
    c.extend(pea_ops(a, targets, lay.precision(0)))
    for i in range(1, config.T):
        prev, helpers = lay.precision(i - 1), lay.helpers(i)
        ops = nor_ops(prev, helpers)
        flag = helpers[-1] if helpers else prev[0]
        if ops:
            c.extend(ops)
            c.trace_after_last_op([q for q in prev + helpers if q != flag])
        if config.scrambling_mode == "exact":
            c.append(Op(scr, tuple(targets), ((flag, 1),), "C-A"))
        else:
            hg = standard_gate("H")
            c.extend(Op(hg, (t,), ((flag, 1),)) for t in targets)
        c.extend(pea_ops(a, targets, lay.precision(i), control=flag))
        # the flag's last use is the final controlled power, before the trailing QFT^dag
        last = max(k for k, op in enumerate(c.ops) if flag in op.qubits)
        c.trace_points[last] = tuple(c.trace_points.get(last, ())) + (flag,)
    c.trace_after_last_op(lay.precision(config.T - 1))
    return c


def initial_state(h: Hamiltonian, mode: str = "exact") -> PureState:
    """Equal superposition of eigenstates (exact) or ``|+>^n`` (hadamard)."""
    zero = np.zeros(1 << h.n_qubits, dtype=complex)
    zero[0] = 1
    vec = _hadamard_n(h.n_qubits) @ zero
    if mode == "exact":
        vec = h.label_basis @ vec
    return PureState.from_vector(vec, normalize=True)


def run_groundstate_point(h: Hamiltonian, config: ThermaliseConfig, noise=None):
    circ = build_groundstate_thermalise(h, config)
    psi0 = initial_state(h, config.scrambling_mode)
    rho, _ = execute(circ, psi0, tuple(range(h.n_qubits)), eager=config.eager, noise=_noise_model(noise))
    return rho, fidelity_with_pure(rho, PureState.from_vector(h.groundstate, normalize=True))


def simulate_groundstate_thermalise(h: Hamiltonian, config: ThermaliseConfig, noise=None) -> RunResult:
    """Independent runs for ``T' = 1..config.T``; predictions use the exact-mode formula."""
    start = time.perf_counter()
    m = config.m or minimal_precision(h)
    cfg = ThermaliseConfig(**{**config.as_dict(), "m": m})
    _, n_star = shifted_phases(h, m, cfg.tau)
    N = 1 << h.n_qubits
    res = RunResult("groundstate", {"hamiltonian": h.name, **cfg.as_dict(), "N": N, "N_star": n_star},
                    seed=None)
    for t in range(1, cfg.T + 1):
        point = ThermaliseConfig(**{**cfg.as_dict(), "T": t})
        rho, f = run_groundstate_point(h, point, noise)
        res.series.append(SeriesPoint(t, f, predicted_groundstate_fidelity(N, n_star, t)))
        res.states[(None, t)] = rho
    res.counts = count_gates(build_groundstate_thermalise(h, cfg)).as_dict()
    res.wall_time = time.perf_counter() - start
    return res
