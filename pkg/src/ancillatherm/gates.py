"""Gate library, Hamiltonian exponentiation and gate counting.

Gate matrices use the little-endian convention of :mod:`ancillatherm.qstate`:
for a gate applied to ``targets``, ``targets[0]`` is bit 0 of the matrix index.

Counting works from a fixed registry of decomposition rules (see
``DECOMPOSITION_RULES``).  Counts are in single-qubit gates plus CNOTs and are
only meaningful relative to this registry.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

GATE_CLASSES = ("U1", "U2", "U3", "CNOT", "C-A", "CC-A", "COMPOSITE")
UNITARY_TOL = 1e-10


class UnregisteredDecompositionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Gate:
    label: str
    matrix: np.ndarray
    gate_class: str = "COMPOSITE"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ValueError(f"gate {self.label!r} needs a square 2^k matrix")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err >= UNITARY_TOL:
            raise ValueError(f"gate {self.label!r} is not unitary (error {err:.2e})")
        if self.gate_class not in GATE_CLASSES:
            raise ValueError(f"unknown gate class {self.gate_class!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def dagger(self) -> "Gate":
        label = self.label[:-1] if self.label.endswith("†") else self.label + "†"
        return Gate(label, self.matrix.conj().T, self.gate_class)

    def power(self, k: int) -> "Gate":
        return Gate(f"{self.label}^{k}", np.linalg.matrix_power(self.matrix, k), self.gate_class)

    def __repr__(self):
        return f"Gate({self.label!r}, arity={self.arity}, class={self.gate_class})"


@dataclass(frozen=True)
class Op:
    """One gate application.  ``tag`` overrides the gate class (C-A / CC-A)."""

    gate: Gate
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), int(p)) for q, p in self.controls)
        )
        if len(self.targets) != self.gate.arity:
            raise ValueError(f"{self.gate.label} acts on {self.gate.arity} qubit(s)")
        if self.tag is not None and self.tag not in GATE_CLASSES:
            raise ValueError(f"unknown gate class tag {self.tag!r}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    def dagger(self) -> "Op":
        return Op(self.gate.dagger(), self.targets, self.controls, self.tag)

    def remap(self, mapping) -> "Op":
        return Op(
            self.gate,
            tuple(mapping[q] for q in self.targets),
            tuple((mapping[q], p) for q, p in self.controls),
            self.tag,
        )

    def with_controls(self, extra: Iterable[tuple[int, int]], tag: str | None = None) -> "Op":
        return Op(self.gate, self.targets, tuple(extra) + self.controls, tag or self.tag)


# ---------------------------------------------------------------- library

_SQ2 = 1 / math.sqrt(2)
_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
PAULI = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def phase(angle: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * angle)])


def reflection_zero(phi: float, m: int = 1) -> np.ndarray:
    """``I - (1 - e^{i phi}) |0^m><0^m|``: phase ``e^{i phi}`` on the all-zero state only."""
    s = np.eye(1 << m, dtype=complex)
    s[0, 0] = np.exp(1j * phi)
    return s


def _cnot() -> np.ndarray:
    # control = targets[0] (bit 0), target = targets[1] (bit 1)
    u = np.eye(4, dtype=complex)
    u[[1, 3]] = u[[3, 1]]
    return u


def _ccx() -> np.ndarray:
    # controls = targets[0], targets[1]; target = targets[2]
    u = np.eye(8, dtype=complex)
    u[[3, 7]] = u[[7, 3]]
    return u


def standard_gate(name: str, param: float | None = None, *, n: int = 1) -> Gate:
    """Library gate by name.

    ``Ry``, ``Rz`` and ``Phase`` take an angle; ``S`` takes the reflection
    angle (default pi/3) and ``n`` ancilla qubits.
    """
    key = name.replace("π", "pi").replace(" ", "")
    fixed = {
        "I": ("I", _I, "U1"),
        "X": ("X", _X, "U3"),
        "Y": ("Y", _Y, "U3"),
        "Z": ("Z", _Z, "U1"),
        "H": ("H", _H, "U2"),
        "-iY": ("-iY", -1j * _Y, "U3"),
        "CNOT": ("CNOT", _cnot(), "CNOT"),
        "CX": ("CNOT", _cnot(), "CNOT"),
        "CCX": ("CCX", _ccx(), "COMPOSITE"),
        "T": ("T", phase(math.pi / 4), "U1"),
        "Tdg": ("T†", phase(-math.pi / 4), "U1"),
    }
    if key in fixed:
        label, mat, cls = fixed[key]
        return Gate(label, mat, cls)
    if key in ("Ry", "Rz", "Phase"):
        if param is None:
            raise ValueError(f"{name} needs an angle")
        mat = {"Ry": ry, "Rz": rz, "Phase": phase}[key](param)
        return Gate(f"{key}({param:.6g})", mat, "U3" if key == "Ry" else "U1")
    if key in ("S", "S(pi/3)"):
        phi = math.pi / 3 if param is None else param
        label = "S(pi/3)" if param is None else f"S({phi:.6g})"
        return Gate(label, reflection_zero(phi, n), "U1" if n == 1 else "COMPOSITE")
    raise ValueError(f"unknown gate {name!r}")


def qft(m: int) -> Gate:
    dim = 1 << m
    j, k = np.meshgrid(np.arange(dim), np.arange(dim))
    mat = np.exp(2j * np.pi * j * k / dim) / math.sqrt(dim)
    return Gate(f"QFT{m}", mat, "U2" if m == 1 else "COMPOSITE")


def inverse_qft(m: int) -> Gate:
    if not 1 <= m <= 10:
        raise ValueError("inverse_qft supports 1 <= m <= 10")
    return Gate(f"QFT{m}†", qft(m).matrix.conj().T, "U2" if m == 1 else "COMPOSITE")


def inverse_qft_ops(qubits: Sequence[int]) -> list[Op]:
    """Inverse QFT on ``qubits`` (``qubits[0]`` least significant) as H, controlled phases and swaps."""
    m = len(qubits)
    fwd: list[Op] = []
    h = standard_gate("H")
    x = standard_gate("X")
    for i in range(m - 1, -1, -1):
        fwd.append(Op(h, (qubits[i],)))
        for l in range(i - 1, -1, -1):
            angle = 2 * math.pi / (1 << (i - l + 1))
            fwd.append(Op(standard_gate("Phase", angle), (qubits[i],), ((qubits[l], 1),)))
    for i in range(m // 2):
        a, b = qubits[i], qubits[m - 1 - i]
        fwd += [Op(x, (b,), ((a, 1),)), Op(x, (a,), ((b, 1),)), Op(x, (b,), ((a, 1),))]
    return [op.dagger() for op in reversed(fwd)]


# ---------------------------------------------------------------- Hamiltonians

@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * sigma``; ``pauli`` is written most-significant qubit first, like bit strings."""

    coefficient: float
    pauli: str

    def __post_init__(self):
        if not self.pauli or set(self.pauli) - set("IXYZ"):
            raise ValueError(f"bad Pauli string {self.pauli!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.pauli)

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, [PAULI[c] for c in self.pauli])


def _as_matrix(h) -> np.ndarray:
    return np.asarray(getattr(h, "matrix", h), dtype=complex)


def hamiltonian_evolution(h, tau: float = 1.0, label: str = "A") -> Gate:
    """``exp(-i H tau)`` through the eigendecomposition of ``H``."""
    mat = _as_matrix(h)
    if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
        raise ValueError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(mat)
    u = (v * np.exp(-1j * w * tau)) @ v.conj().T
    n = mat.shape[0].bit_length() - 1
    return Gate(label, u, "U3" if n == 1 else "COMPOSITE")


def pauli_sum_matrix(terms: Sequence[PauliTerm]) -> np.ndarray:
    return sum(t.coefficient * t.matrix() for t in terms)


def trotterize(terms: Sequence[PauliTerm], tau: float, steps: int) -> Gate:
    """First-order product formula ``(prod_a exp(-i h_a sigma_a tau/steps))^steps``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if len({t.n_qubits for t in terms}) != 1:
        raise ValueError("Pauli terms must share a qubit count")
    dt = tau / steps
    dim = 1 << terms[0].n_qubits
    step = np.eye(dim, dtype=complex)
    for t in terms:
        x = t.coefficient * dt
        # sigma^2 = I, so the exponential is a cos/sin pair
        step = (math.cos(x) * np.eye(dim) - 1j * math.sin(x) * t.matrix()) @ step
    n = terms[0].n_qubits
    return Gate("A~", np.linalg.matrix_power(step, steps), "U3" if n == 1 else "COMPOSITE")


def controlled_power(
    a: Gate, j: int, controls: Sequence[tuple[int, int]], targets: Sequence[int]
) -> Op:
    """Controlled ``A^(2^j)`` as a single C-A (or CC-A) application."""
    mat = np.array(a.matrix)
    for _ in range(j):
        mat = mat @ mat
    tag = "C-A" if len(controls) == 1 else "CC-A"
    return Op(Gate(f"{a.label}^{1 << j}", mat, a.gate_class), tuple(targets), tuple(controls), tag)


# ---------------------------------------------------------------- counting

@dataclass(frozen=True)
class GateCount:
    singles: int = 0
    cnots: int = 0
    rules: dict = field(default_factory=dict, compare=False)
    total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.singles + self.cnots)

    def __add__(self, other: "GateCount") -> "GateCount":
        return GateCount(
            self.singles + other.singles,
            self.cnots + other.cnots,
            dict(Counter(self.rules) + Counter(other.rules)),
        )

    def scaled(self, k: int) -> "GateCount":
        return GateCount(self.singles * k, self.cnots * k, {r: c * k for r, c in self.rules.items()})

    def as_dict(self) -> dict:
        return {"singles": self.singles, "cnots": self.cnots, "total": self.total,
                "rules": dict(sorted(self.rules.items()))}


TOFFOLI = (9, 6)
CONTROLLED_SINGLE = (4, 2)
KAK_TWO_QUBIT = (8, 3)

DECOMPOSITION_RULES = {
    "single": "uncontrolled one-qubit gate: 1 single",
    "cnot": "CNOT, or X with one control: 1 CNOT",
    "toffoli": "X with two controls: 9 singles + 6 CNOTs (H, T, T† network)",
    "mcx-vchain": "X with c >= 3 controls: (2c - 3) Toffolis, c - 2 clean ancillae",
    "controlled-single": "one-qubit U with one control, ZYZ/ABC form: 4 singles + 2 CNOTs",
    "mc-single": "one-qubit U with c >= 2 controls: 2(c - 1) Toffolis into c - 1 ancillae, "
                 "then controlled-single",
    "reflection": "S(phi) on m >= 2 qubits: X on all m (2m singles) plus a phase with m - 1 controls",
    "generic-qsd": "any other gate on n = arity + controls qubits: Shannon recursion "
                   "s(n) = 4 s(n-1) + 3 * 2^(n-1), c(n) = 4 c(n-1) + 3 * 2^(n-1), "
                   "from the two-qubit KAK count s(2) = 8, c(2) = 3",
    "negative-control": "each polarity-0 control adds 2 X singles",
}


# composite gate families with a registered rule, keyed by the leading name of the label
_COMPOSITE_FAMILIES = {"CCX": "toffoli", "S": "reflection", "QFT": "generic-qsd",
                       "A": "generic-qsd", "Scramble": "generic-qsd",
                       "Scramble-H": "generic-qsd", "U": "generic-qsd"}


def _family(label: str) -> str:
    m = re.match(r"[A-Za-z\-]+", label)
    return m.group(0) if m else label


def register_composite(family: str, rule: str = "generic-qsd") -> None:
    """Allow composite gates whose label starts with ``family`` to be counted."""
    if rule not in DECOMPOSITION_RULES:
        raise ValueError(f"unknown rule {rule!r}")
    _COMPOSITE_FAMILIES[family] = rule


def composite_rule(gate: Gate) -> str | None:
    return _COMPOSITE_FAMILIES.get(_family(gate.label))


def _qsd(n: int) -> tuple[int, int]:
    if n == 1:
        return (1, 0)
    s, c = KAK_TWO_QUBIT
    for k in range(3, n + 1):
        s = 4 * s + 3 * (1 << (k - 1))
        c = 4 * c + 3 * (1 << (k - 1))
    return (s, c)


def _is_x(gate: Gate) -> bool:
    return gate.arity == 1 and np.allclose(gate.matrix, _X, atol=1e-12)


def _single_rule(gate: Gate, nctrl: int) -> tuple[str, tuple[int, int]]:
    if nctrl == 0:
        return "single", (1, 0)
    if _is_x(gate):
        if nctrl == 1:
            return "cnot", (0, 1)
        if nctrl == 2:
            return "toffoli", TOFFOLI
        k = 2 * nctrl - 3
        return "mcx-vchain", (k * TOFFOLI[0], k * TOFFOLI[1])
    if nctrl == 1:
        return "controlled-single", CONTROLLED_SINGLE
    k = 2 * (nctrl - 1)
    return "mc-single", (k * TOFFOLI[0] + CONTROLLED_SINGLE[0], k * TOFFOLI[1] + CONTROLLED_SINGLE[1])


def op_count(op: Op) -> GateCount:
    """Count for one application under the registered rules."""
    neg = sum(1 for _, p in op.controls if p == 0)
    nctrl = len(op.controls)
    gate = op.gate
    extra = {"negative-control": neg} if neg else {}
    if gate.label == "CNOT":
        gate, nctrl = standard_gate("X"), nctrl + 1
    elif gate.label == "CCX":
        gate, nctrl = standard_gate("X"), nctrl + 2
    if gate.arity == 1:
        rule, (s, c) = _single_rule(gate, nctrl)
    elif gate.label.startswith("S(") and nctrl == 0:
        m = gate.arity
        sub_rule, (s, c) = _single_rule(standard_gate("Phase", 0.1), m - 1)
        rule = "reflection"
        extra[sub_rule] = extra.get(sub_rule, 0) + 1
        s += 2 * m
    else:
        if gate.gate_class == "COMPOSITE" and composite_rule(gate) is None:
            raise UnregisteredDecompositionError(
                f"no decomposition registered for composite {gate.label!r}"
            )
        rule, (s, c) = "generic-qsd", _qsd(gate.arity + nctrl)
    return GateCount(s + 2 * neg, c, {rule: 1, **extra})


def count_gates(circuit) -> GateCount:
    """Total single-qubit and CNOT count of ``circuit`` (anything with ``.ops``)."""
    ops = getattr(circuit, "ops", circuit)
    return sum((op_count(op) for op in ops), GateCount())


# ---------------------------------------------------------------- decomposition into native ops

NATIVE = ("U1", "U2", "U3", "CNOT", "C-A", "CC-A")


def native_class(op: Op) -> str | None:
    """Timing class of ``op`` if it runs natively, else ``None``."""
    if op.tag is not None:
        return op.tag
    if not op.controls:
        if op.gate.label == "CNOT":
            return "CNOT"
        if op.gate.arity == 1:
            return op.gate.gate_class
        return None
    if len(op.controls) == 1 and op.controls[0][1] == 1 and _is_x(op.gate):
        return "CNOT"
    return None


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """``(alpha, beta, gamma, delta)`` with ``u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)``."""
    u = np.asarray(u, dtype=complex)
    alpha = float(np.angle(np.linalg.det(u))) / 2
    v = u * np.exp(-1j * alpha)
    a, b = v[0, 0], v[1, 0]
    gamma = 2 * math.atan2(abs(b), abs(a))
    s = -2 * float(np.angle(a)) if abs(a) > 1e-12 else 0.0  # beta + delta
    d = 2 * float(np.angle(b)) if abs(b) > 1e-12 else 0.0  # beta - delta
    return alpha, (s + d) / 2, gamma, (s - d) / 2


def _toffoli_ops(c1: int, c2: int, t: int) -> list[Op]:
    h, tg, td = standard_gate("H"), standard_gate("T"), standard_gate("Tdg")
    x = standard_gate("X")

    def cx(c, tt):
        return Op(x, (tt,), ((c, 1),))

    return [
        Op(h, (t,)), cx(c2, t), Op(td, (t,)), cx(c1, t), Op(tg, (t,)), cx(c2, t),
        Op(td, (t,)), cx(c1, t), Op(tg, (c2,)), Op(tg, (t,)), Op(h, (t,)),
        cx(c1, c2), Op(tg, (c1,)), Op(td, (c2,)), cx(c1, c2),
    ]


def _controlled_single_ops(u: np.ndarray, control: int, target: int) -> list[Op]:
    alpha, beta, gamma, delta = zyz_angles(u)
    a = rz(beta) @ ry(gamma / 2)
    b = ry(-gamma / 2) @ rz(-(delta + beta) / 2)
    c = rz((delta - beta) / 2)
    x = standard_gate("X")
    return [
        Op(Gate("C", c, "U3"), (target,)),
        Op(x, (target,), ((control, 1),)),
        Op(Gate("B", b, "U3"), (target,)),
        Op(x, (target,), ((control, 1),)),
        Op(Gate("A", a, "U3"), (target,)),
        Op(Gate("Phase", phase(alpha), "U1"), (control,)),
    ]


def decompose(op: Op) -> list[Op]:
    """One expansion step towards native ops; raises when no rule applies."""
    if native_class(op) is not None:
        return [op]
    neg = [q for q, p in op.controls if p == 0]
    if neg:
        x = standard_gate("X")
        flips = [Op(x, (q,)) for q in neg]
        pos = Op(op.gate, op.targets, tuple((q, 1) for q, _ in op.controls), op.tag)
        return flips + [pos] + flips
    gate, targets, ctrls = op.gate, op.targets, [q for q, _ in op.controls]
    if gate.label == "CNOT":
        gate, ctrls, targets = standard_gate("X"), ctrls + [targets[0]], targets[1:]
    elif gate.label == "CCX":
        gate, ctrls, targets = standard_gate("X"), ctrls + list(targets[:2]), targets[2:]
    if gate.arity == 1 and _is_x(gate) and len(ctrls) == 1:
        return [Op(gate, targets, ((ctrls[0], 1),))]
    if gate.arity == 1 and _is_x(gate) and len(ctrls) == 2:
        return _toffoli_ops(ctrls[0], ctrls[1], targets[0])
    if gate.arity == 1 and len(ctrls) == 1:
        return _controlled_single_ops(gate.matrix, ctrls[0], targets[0])
    raise UnregisteredDecompositionError(
        f"no native decomposition for {gate.label} with {len(ctrls)} control(s); tag it C-A/CC-A"
    )


def expand_native(op: Op) -> list[Op]:
    out = []
    for sub in decompose(op):
        out.extend([sub] if native_class(sub) is not None else expand_native(sub))
    return out
