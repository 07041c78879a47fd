"""Quantum perceptron unit, its derived reset, and the thermalisation circuit.

Layout: qubit 0 is the target, qubits ``1..T`` are the ancillae of the
successive applications.  Success means the ancilla reads ``0``.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from ..analysis import estimate_q_angle, perceptron_overlap_sq, predicted_perceptron_fidelity, q_activation
from ..gates import Gate, Op, count_gates, ry, standard_gate
from ..qstate import DensityMatrix, PureState, fidelity_with_pure
from ..results import RunResult, SeriesPoint
from .core import Circuit, execute

TARGET, ANCILLA = 0, 1


@dataclass(frozen=True)
class ThermaliseConfig:
    """``T`` is the total number of applications of the unit (first one included)."""

    T: int = 1
    trailing_reset: bool = True
    scrambling_mode: str = "exact"
    m: int | None = None
    energy_shift: float | None = None
    tau: float = 1.0
    eager: bool = True

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be >= 1")
        if self.scrambling_mode not in ("exact", "hadamard"):
            raise ValueError("scrambling_mode must be 'exact' or 'hadamard'")

    def as_dict(self) -> dict:
        return asdict(self)


def _unit_ops(theta: float, target: int, ancilla: int, control: int | None = None) -> list[Op]:
    ctrl = () if control is None else ((control, 1),)
    return [
        Op(standard_gate("Ry", 2 * theta), (ancilla,), ctrl),
        Op(standard_gate("-iY"), (target,), ((ancilla, 1),)),
        Op(standard_gate("Ry", -2 * theta), (ancilla,), ctrl),
    ]


def build_perceptron_unit(theta: float) -> Circuit:
    """Two-qubit unit: target 0, ancilla 1."""
    return Circuit(2, _unit_ops(theta, TARGET, ANCILLA), ancillae=(ANCILLA,))


def branch_operator(unit: Circuit, ancillae, outcome: int) -> np.ndarray:
    """Target-space block ``<outcome|_anc U |0>_anc`` of a small unit circuit."""
    u = unit.unitary()
    n = unit.n_qubits
    ancillae = tuple(ancillae)
    targets = tuple(q for q in range(n) if q not in ancillae)

    def index(t_bits: int, a_bits: int) -> int:
        i = 0
        for j, q in enumerate(targets):
            i |= ((t_bits >> j) & 1) << q
        for j, q in enumerate(ancillae):
            i |= ((a_bits >> j) & 1) << q
        return i

    dim_t = 1 << len(targets)
    rows = [index(t, outcome) for t in range(dim_t)]
    cols = [index(t, 0) for t in range(dim_t)]
    return u[np.ix_(rows, cols)]


def failure_isometry(unit: Circuit, ancillae=(ANCILLA,), outcome: int = 1) -> np.ndarray:
    """Unitary ``E`` with failure block ``= sqrt(1 - p) E``; raises if the block is not unitary up to scale."""
    k = branch_operator(unit, ancillae, outcome)
    g = k.conj().T @ k
    scale2 = float(g[0, 0].real)
    if scale2 < 1e-14:
        raise ValueError("failure branch is empty")
    if np.max(np.abs(g - scale2 * np.eye(k.shape[0]))) > 1e-10:
        raise ValueError("failure branch is not a scaled unitary; no deterministic reset exists")
    return k / math.sqrt(scale2)


def derive_reset(theta: float) -> Gate:
    """Reset ``W = E^-1`` for the perceptron failure branch, found by projection.

    The failure operator does not depend on theta; where its amplitude vanishes
    (sin 2 theta = 0) it is derived at theta = pi/4 instead.
    """
    try:
        e = failure_isometry(build_perceptron_unit(theta))
    except ValueError:
        e = failure_isometry(build_perceptron_unit(math.pi / 4))
    return Gate("W", e.conj().T, "U3")


def success_operator(theta: float) -> np.ndarray:
    """Normalised success branch; equals ``exp(-i q Y)``."""
    k = branch_operator(build_perceptron_unit(theta), (ANCILLA,), 0)
    return k / math.sqrt(float((k.conj().T @ k)[0, 0].real))


def success_probability(theta: float) -> float:
    k = branch_operator(build_perceptron_unit(theta), (ANCILLA,), 0)
    return float((k.conj().T @ k)[0, 0].real)


def build_perceptron_thermalise(theta: float, config: ThermaliseConfig) -> Circuit:
    """First unit, then ``T - 1`` rounds of [reset, unit on a fresh ancilla], each conditioned
    on the previous ancilla reading 1; optionally a trailing conditioned reset."""
    T = config.T
    w = derive_reset(theta)
    c = Circuit(T + 1, ancillae=tuple(range(1, T + 1)))
    c.extend(_unit_ops(theta, TARGET, 1))
    for i in range(2, T + 1):
        prev = i - 1
        c.append(Op(w, (TARGET,), ((prev, 1),)))
        c.append(Op(standard_gate("Ry", 2 * theta), (i,), ((prev, 1),)))
        c.append(Op(standard_gate("-iY"), (TARGET,), ((i, 1),)))
        c.append(Op(standard_gate("Ry", -2 * theta), (i,), ((prev, 1),)))
        c.trace_after_last_op((prev,))
    if config.trailing_reset:
        c.append(Op(w, (TARGET,), ((T, 1),)))
    c.trace_after_last_op((T,))
    return c


def target_state(theta: float, psi: PureState) -> PureState:
    u = ry(2 * q_activation(theta))  # exp(-i q Y)
    return PureState(u @ psi.amplitudes)


def run_perceptron_point(theta: float, config: ThermaliseConfig, psi: PureState | None = None,
                         noise=None) -> tuple[DensityMatrix, float]:
    """Target state and fidelity for one ``(theta, T)``."""
    psi = PureState.basis(0, 1) if psi is None else psi
    circ = build_perceptron_thermalise(theta, config)
    model = _noise_model(noise)
    rho, _ = execute(circ, psi, (TARGET,), eager=config.eager, noise=model)
    return rho, fidelity_with_pure(rho, target_state(theta, psi))


def _noise_model(noise):
    if noise is None:
        return None
    from ..noise import NoiseModel, NoiseProfile

    return NoiseModel(noise) if isinstance(noise, NoiseProfile) else noise


def simulate_perceptron_thermalise(theta: float, config: ThermaliseConfig,
                                   psi: PureState | None = None, noise=None) -> RunResult:
    """Independent runs for ``T' = 1..config.T``, each with its own circuit."""
    start = time.perf_counter()
    psi_given = psi is not None
    psi = PureState.basis(0, 1) if psi is None else psi
    overlap = perceptron_overlap_sq(theta, psi)
    res = RunResult("perceptron", {"theta": theta, **config.as_dict()}, seed=None)
    for t in range(1, config.T + 1):
        cfg = ThermaliseConfig(**{**config.as_dict(), "T": t})
        rho, f = run_perceptron_point(theta, cfg, psi, noise)
        pred = predicted_perceptron_fidelity(theta, t, overlap) if config.trailing_reset else None
        q_est = None if psi_given and not np.allclose(psi.amplitudes, [1, 0]) else estimate_q_angle(rho)
        res.series.append(SeriesPoint(t, f, pred, theta, q_est))
        res.states[(theta, t)] = rho
    res.counts = count_gates(build_perceptron_thermalise(theta, config)).as_dict()
    res.wall_time = time.perf_counter() - start
    return res
