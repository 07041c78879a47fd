"""Circuit container and the live-register executor.

A :class:`Circuit` may name *trace points*: after op ``i`` the listed qubits are
never touched again and can be traced out immediately.  The executor allocates
each qubit lazily (fresh ``|0>``) at first use, so the live register only ever
holds qubits between their first and last use.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..gates import Op, expand_native, native_class
from ..qstate import (
    MAX_DENSITY_QUBITS,
    CapacityError,
    DensityMatrix,
    PureState,
    State,
    apply_gate,
    apply_kraus,
    as_density,
    partial_trace,
    tensor,
)


@dataclass
class Circuit:
    n_qubits: int
    ops: list[Op] = field(default_factory=list)
    # op index -> qubits that may be traced out once that op has run
    trace_points: dict[int, tuple[int, ...]] = field(default_factory=dict)
    ancillae: tuple[int, ...] = ()
    global_phase: complex = 1.0

    def __post_init__(self):
        self.ops = list(self.ops)
        for op in self.ops:
            self._check(op)

    def _check(self, op: Op):
        for q in op.qubits:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"op {op.gate.label} touches qubit {q} outside 0..{self.n_qubits - 1}")

    def append(self, op: Op) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, ops: Iterable[Op]) -> "Circuit":
        for op in ops:
            self.append(op)
        return self

    def trace_after_last_op(self, qubits: Sequence[int]) -> None:
        """Mark ``qubits`` for tracing once the most recent op has run."""
        if not self.ops:
            raise ValueError("no op to attach a trace point to")
        i = len(self.ops) - 1
        self.trace_points[i] = tuple(self.trace_points.get(i, ())) + tuple(qubits)

    @property
    def targets(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n_qubits) if q not in self.ancillae)

    def traced_qubits(self) -> set[int]:
        return {q for qs in self.trace_points.values() for q in qs}

    def validate(self) -> None:
        """No op may touch a qubit after that qubit's trace point."""
        dead: set[int] = set()
        for i, op in enumerate(self.ops):
            hit = dead.intersection(op.qubits)
            if hit:
                raise ValueError(f"op {i} ({op.gate.label}) touches traced qubit(s) {sorted(hit)}")
            dead.update(self.trace_points.get(i, ()))

    def dagger(self) -> "Circuit":
        return Circuit(
            self.n_qubits,
            [op.dagger() for op in reversed(self.ops)],
            ancillae=self.ancillae,
            global_phase=np.conj(self.global_phase),
        )

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        shift = len(self.ops)
        tp = dict(self.trace_points)
        tp.update({i + shift: qs for i, qs in other.trace_points.items()})
        return Circuit(
            self.n_qubits,
            self.ops + other.ops,
            tp,
            self.ancillae,
            self.global_phase * other.global_phase,
        )

    def controlled(self, controls: Sequence[tuple[int, int]]) -> "Circuit":
        return Circuit(
            self.n_qubits,
            [op.with_controls(controls) for op in self.ops],
            ancillae=self.ancillae,
        )

    def unitary(self) -> np.ndarray:
        """Full matrix including the global phase (small circuits only)."""
        dim = 1 << self.n_qubits
        cols = []
        for j in range(dim):
            psi = PureState.basis(j, self.n_qubits)
            for op in self.ops:
                psi = apply_gate(psi, op.gate, op.targets, op.controls)
            cols.append(psi.amplitudes)
        return self.global_phase * np.array(cols).T

    def peak_live(self, input_qubits: Sequence[int] = (), eager: bool = True) -> int:
        """Largest live-register size the executor will need."""
        if not eager:
            return self.n_qubits
        live = set(input_qubits)
        peak = len(live)
        for i, op in enumerate(self.ops):
            live.update(op.qubits)
            peak = max(peak, len(live))
            live.difference_update(self.trace_points.get(i, ()))
        return peak


def run_pure(circuit: Circuit, psi: PureState) -> PureState:
    """Apply every op of ``circuit`` to a pure state over all of its qubits."""
    for op in circuit.ops:
        psi = apply_gate(psi, op.gate, op.targets, op.controls)
    if circuit.global_phase != 1:
        psi = PureState(psi.amplitudes * circuit.global_phase)
    return psi


class _LiveRegister:
    def __init__(self, state: DensityMatrix, labels: Sequence[int]):
        self.rho = state
        self.pos: list[int] = list(labels)

    def ensure(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            if q not in self.pos:
                if len(self.pos) + 1 > MAX_DENSITY_QUBITS:
                    raise CapacityError(
                        f"live register would hold {len(self.pos) + 1} qubits "
                        f"(cap {MAX_DENSITY_QUBITS})"
                    )
                self.rho = tensor(self.rho, DensityMatrix.zero(1))
                self.pos.append(q)

    def where(self, qubits: Iterable[int]) -> list[int]:
        return [self.pos.index(q) for q in qubits]

    def apply(self, op: Op) -> None:
        self.ensure(op.qubits)
        t = self.where(op.targets)
        c = [(self.pos.index(q), p) for q, p in op.controls]
        self.rho = apply_gate(self.rho, op.gate, t, c)

    def channel(self, kraus, qubit: int) -> None:
        self.rho = apply_kraus(self.rho, kraus, self.where([qubit]))

    def trace(self, qubits: Iterable[int]) -> None:
        qubits = [q for q in qubits if q in self.pos]
        if not qubits:
            return
        if len(qubits) == len(self.pos):
            raise ValueError("cannot trace out the whole register")
        self.rho = partial_trace(self.rho, self.where(qubits))
        self.pos = [q for q in self.pos if q not in qubits]


def execute(
    circuit: Circuit,
    initial: State,
    input_qubits: Sequence[int] | None = None,
    *,
    eager: bool = True,
    noise=None,
) -> tuple[DensityMatrix, tuple[int, ...]]:
    """Run ``circuit`` on ``initial`` (placed on ``input_qubits``); other qubits start in ``|0>``.

    Returns the reduced state of the qubits that are never traced, together
    with their circuit indices (ascending).  ``eager=False`` keeps the whole
    register alive and traces once at the end.  ``noise`` is an object with a
    ``channels(cls, qubit)`` method returning Kraus lists (see
    :class:`ancillatherm.noise.NoiseModel`).
    """
    circuit.validate()
    if input_qubits is None:
        input_qubits = tuple(range(initial.n_qubits))
    input_qubits = tuple(input_qubits)
    if len(input_qubits) != initial.n_qubits:
        raise ValueError("input_qubits must match the initial state width")
    peak = circuit.peak_live(input_qubits, eager)
    if peak > MAX_DENSITY_QUBITS:
        raise CapacityError(f"circuit needs {peak} live qubits (cap {MAX_DENSITY_QUBITS})")

    reg = _LiveRegister(as_density(initial), input_qubits)
    if not eager:
        reg.ensure(range(circuit.n_qubits))
    for i, op in enumerate(circuit.ops):
        if noise is None:
            reg.apply(op)
        else:
            for sub in ([op] if native_class(op) else expand_native(op)):
                reg.apply(sub)
                cls = native_class(sub)
                for q in sub.qubits:
                    kraus = noise.channels(cls, q)
                    if kraus is not None:
                        reg.channel(kraus, q)
        if eager:
            reg.trace(circuit.trace_points.get(i, ()))
    reg.trace(circuit.traced_qubits())
    # surviving qubits in ascending circuit order
    order = sorted(reg.pos)
    rho = reg.rho
    if order != reg.pos:
        rho = _permute(rho, [reg.pos.index(q) for q in order])
    return rho, tuple(order)


def _permute(rho: DensityMatrix, new_from_old: list[int]) -> DensityMatrix:
    """Reorder qubits: new qubit ``k`` is old qubit ``new_from_old[k]``."""
    n = rho.n_qubits
    t = rho.entries.reshape([2] * (2 * n))
    row_axes = [n - 1 - new_from_old[n - 1 - a] for a in range(n)]
    t = np.transpose(t, row_axes + [a + n for a in row_axes])
    return DensityMatrix(t.reshape(1 << n, 1 << n))
