"""Fixed-point oblivious amplitude amplification with pi/3 reflections.

``A_0 = U`` and ``A_k = -A_{k-1} S A_{k-1}^dag S A_{k-1}`` where ``S`` puts a
phase on the all-zero ancilla state.  The ``-1`` is carried in
``Circuit.global_phase``.
"""
from __future__ import annotations

import math

import numpy as np

from ..gates import Gate, Op, standard_gate
from ..qstate import PureState
from .core import Circuit, run_pure

PI_3 = math.pi / 3


def _reflection(phi: float, ancillae) -> Op:
    ancillae = tuple(ancillae)
    return Op(standard_gate("S", None if phi == PI_3 else phi, n=len(ancillae)), ancillae)


def build_oaa(unit: Circuit, k: int, ancillae=None, phi: float = PI_3) -> Circuit:
    """Unrolled recursion of depth ``k`` over ``unit`` (ancillae default to ``unit.ancillae``)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    anc = tuple(unit.ancillae if ancillae is None else ancillae)
    if not anc:
        raise ValueError("OAA needs at least one ancilla")
    a = Circuit(unit.n_qubits, list(unit.ops), ancillae=anc, global_phase=unit.global_phase)
    for _ in range(k):
        s = Circuit(unit.n_qubits, [_reflection(phi, anc)], ancillae=anc)
        nxt = a + s + a.dagger() + s + a
        nxt.global_phase = -nxt.global_phase
        a = nxt
    return a


def success_probability(circuit: Circuit, psi: PureState | None = None, ancillae=None) -> float:
    """Probability that every ancilla reads 0 after ``circuit`` on ``|psi>|0...0>``."""
    anc = tuple(circuit.ancillae if ancillae is None else ancillae)
    targets = [q for q in range(circuit.n_qubits) if q not in anc]
    n = circuit.n_qubits
    full = np.zeros(1 << n, dtype=complex)
    amps = (PureState.basis(0, len(targets)) if psi is None else psi).amplitudes
    for t in range(len(amps)):
        idx = sum(((t >> j) & 1) << q for j, q in enumerate(targets))
        full[idx] = amps[t]
    out = run_pure(circuit, PureState(full)).amplitudes
    mask = np.zeros(1 << n, dtype=bool)
    for i in range(1 << n):
        mask[i] = all(not (i >> q) & 1 for q in anc)
    return float(np.sum(np.abs(out[mask]) ** 2))


def oaa_success(unit: Circuit, k: int, psi: PureState | None = None) -> float:
    return success_probability(build_oaa(unit, k), psi, unit.ancillae)


def oaa_with_angle_error(unit: Circuit, k: int, delta: float, psi: PureState | None = None) -> float:
    """Success probability when every reflection uses ``pi/3 + delta``."""
    if abs(delta) >= math.pi / 6:
        raise ValueError("|delta| must be below pi/6")
    return success_probability(build_oaa(unit, k, phi=PI_3 + delta), psi, unit.ancillae)


def demo_unit(p0: float) -> Circuit:
    """Target 0, ancilla 1; success branch ``sqrt(p0) H|psi>`` for every input.

    ``Ry(2 phi)`` on the ancilla with ``cos^2 phi = p0``, then CNOT from the
    ancilla onto the target, then H on the target.
    """
    if not 0 < p0 <= 1:
        raise ValueError("p0 must lie in (0, 1]")
    phi = math.acos(math.sqrt(p0))
    return Circuit(2, [
        Op(standard_gate("Ry", 2 * phi), (1,)),
        Op(standard_gate("X"), (0,), ((1, 1),)),
        Op(standard_gate("H"), (0,)),
    ], ancillae=(1,))


def reflection_gate(m: int, phi: float = PI_3) -> Gate:
    return standard_gate("S", None if phi == PI_3 else phi, n=m)
