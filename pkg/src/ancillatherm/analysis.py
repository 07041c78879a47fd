"""Closed-form fidelities, iteration counts and resource-table rows.

Iteration counts use ``T`` = total applications of the unit (the first plus
``T - 1`` conditioned repeats), so every fidelity formula here has exponent ``T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class Prediction:
    formula: str
    inputs: dict
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.formula} gave a non-finite value")


def q_activation(theta: float) -> float:
    """Rotation angle ``arctan(tan^2 theta)`` of a successful perceptron unit.

    Written as ``atan2(sin^2, cos^2)`` so ``theta = +-pi/2`` gives ``pi/2``.
    """
    s, c = math.sin(theta), math.cos(theta)
    return math.atan2(s * s, c * c)


def p_success(theta: float) -> float:
    return math.cos(theta) ** 4 + math.sin(theta) ** 4


def predicted_perceptron_fidelity(theta: float, T: int, overlap_sq: float) -> float:
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0.0 <= overlap_sq <= 1.0 + 1e-12:
        raise ValueError("overlap_sq must lie in [0, 1]")
    return 1.0 - (1.0 - p_success(theta)) ** T * (1.0 - min(overlap_sq, 1.0))


def perceptron_overlap_sq(theta: float, psi=None) -> float:
    """``|<psi| exp(-i q Y) |psi>|^2``; ``psi`` defaults to ``|0>``."""
    q = q_activation(theta)
    if psi is None:
        return math.cos(q) ** 2
    psi = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex)
    r = np.array([[math.cos(q), -math.sin(q)], [math.sin(q), math.cos(q)]])
    return float(abs(np.vdot(psi, r @ psi)) ** 2)


def predicted_groundstate_fidelity(N: int, N_star: int, T: int) -> float:
    if not 1 <= N_star <= N:
        raise ValueError("need 1 <= N* <= N")
    if T < 1:
        raise ValueError("T must be >= 1")
    return (1.0 - ((N - N_star) / N) ** T) / N_star


def _check_unit(name, x):
    if not 0.0 < x < 1.0:
        raise ValueError(f"{name} must lie in (0, 1)")


def iterations_for_epsilon(eps: float, p0: float) -> float:
    """Real-valued count of extra applications, ``log(1/eps)/log(1/(1-p0)) - 1``."""
    _check_unit("eps", eps)
    _check_unit("p0", p0)
    return math.log(1 / eps) / math.log(1 / (1 - p0)) - 1


def applications_for_epsilon(eps: float, p0: float) -> int:
    """Smallest total application count ``T`` with ``(1-p0)^T <= eps``."""
    _check_unit("eps", eps)
    _check_unit("p0", p0)
    fail = 1.0 - p0
    T = max(1, math.ceil(math.log(eps) / math.log(fail)))
    while fail ** T > eps:
        T += 1
    while T > 1 and fail ** (T - 1) <= eps:
        T -= 1
    return T


class OAADepth(NamedTuple):
    k: int
    real: float


def oaa_depth(eps: float, p: float) -> OAADepth:
    """Smallest ``k >= 0`` with ``(1-p)^(3^k) <= eps``, plus the unrounded expression."""
    _check_unit("eps", eps)
    _check_unit("p", p)
    real = (math.log(math.log(1 / eps)) - math.log(math.log(1 / (1 - p)))) / math.log(3)
    k = 0
    while (1 - p) ** (3 ** k) > eps:
        k += 1
    return OAADepth(k, real)


def oaa_success(p0: float, k: int) -> float:
    return 1.0 - (1.0 - p0) ** (3 ** k)


def oaa_gate_count(q_u: int, q_s: int, k: int) -> int:
    if min(q_u, q_s, k) < 0:
        raise ValueError("counts and depth must be non-negative")
    return (q_u + q_s) * 3 ** k - q_s


def estimate_q_angle(rho) -> float:
    """``arcsin(sqrt(<1|rho|1>))`` for a single-qubit state prepared from ``|0>``."""
    m = np.asarray(getattr(rho, "entries", rho))
    if m.shape != (2, 2):
        raise ValueError("expected a single-qubit density matrix")
    p1 = min(max(float(m[1, 1].real), 0.0), 1.0)
    return math.asin(math.sqrt(p1))


# ---------------------------------------------------------------- resource tables

METHODS = (
    "postselect", "oaa", "thermalise",
    "pea-postselect", "pea-thermalise", "lcu-thermalise", "lcu-oaa",
)


@dataclass(frozen=True)
class ResourceQuery:
    n: int = 1
    m: int = 1
    epsilon: float = 1e-3
    p0: float = 0.5
    delta_gap: float = 0.1
    sparsity: int = 1
    q_u: int | None = None
    q_w: int | None = None
    q_s: int | None = None
    q_cu: int | None = None

    def __post_init__(self):
        if not 0 < self.p0 <= 1:
            raise ValueError("p0 must lie in (0, 1]")
        _check_unit("epsilon", self.epsilon)
        if self.delta_gap <= 0:
            raise ValueError("delta_gap must be positive")
        if self.sparsity < 1 or self.n < 1 or self.m < 1:
            raise ValueError("n, m and sparsity must be >= 1")


@dataclass(frozen=True)
class Cell:
    """One table entry. ``exact=False`` marks a scaling expression with unit constant."""

    expr: str
    value: float | None = None
    exact: bool = True

    def as_dict(self) -> dict:
        return {"expr": self.expr, "value": self.value, "kind": "exact" if self.exact else "asymptotic"}


@dataclass(frozen=True)
class ResourceRow:
    method: str
    measurements: Cell
    qubits: Cell
    gates: Cell
    notes: tuple = field(default=())

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "measurements": self.measurements.as_dict(),
            "qubits": self.qubits.as_dict(),
            "gates": self.gates.as_dict(),
            "notes": list(self.notes),
        }


def _sum_or_none(*xs):
    return None if any(x is None for x in xs) else sum(xs)


def resource_rows(q: ResourceQuery, method: str) -> ResourceRow:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    n, m, eps, p0 = q.n, q.m, q.epsilon, q.p0
    zero = Cell("0", 0, True)
    poly = "polylog(1/eps, 1/Delta)"

    if method == "postselect":
        return ResourceRow(
            method,
            Cell("1/p0 (expected)", 1 / p0),
            Cell("n + m", n + m),
            Cell("Q(U) + Q(W)", _sum_or_none(q.q_u, q.q_w)),
        )
    if method == "oaa":
        k = oaa_depth(eps, p0).k if p0 < 1 else 0
        helpers = max(m - 2, 0)
        gates = None if q.q_u is None or q.q_s is None else oaa_gate_count(q.q_u, q.q_s, k)
        return ResourceRow(
            method,
            zero,
            Cell("n + m + max(m-2, 0)", n + m + helpers),
            Cell(f"(Q(U) + Q(S)) 3^k - Q(S), k={k}", gates),
            (f"k = {k} from (1-p0)^(3^k) <= eps",
             "scaling O(log(eps)/log(1-p0) [m + Q(U)])"),
        )
    if method == "thermalise":
        T = applications_for_epsilon(eps, p0) if p0 < 1 else 1
        gates = _sum_or_none(q.q_cu, q.q_w)
        return ResourceRow(
            method,
            zero,
            Cell("n + T (2m - 1)", n + T * (2 * m - 1)),
            Cell("T [m + Q(C-U) + Q(W)]", None if gates is None else T * (m + gates), False),
            (f"T = {T}: smallest T with (1-p0)^T <= eps",
             "qubits count m precision + (m-1) NOR ancillae per application; "
             "scaling O(n + m log(eps)/log(1-p0))"),
        )
    # groundstate rows carry polylog factors with no fixed constant: symbolic only
    if method == "pea-postselect":
        return ResourceRow(
            method,
            Cell("O(2^n)", 2.0 ** n, False),
            Cell("O(n + log(1/Delta) + log(1/eps))", None, False),
            Cell(f"O(2^(n/2) Delta^-1 eps^-1 d {poly})", None, False),
        )
    if method == "pea-thermalise":
        return ResourceRow(
            method, zero,
            Cell(f"O(2^n {poly})", None, False),
            Cell(f"O(2^(3n/2) Delta^-1 eps^-1 d {poly})", None, False),
        )
    if method == "lcu-thermalise":
        return ResourceRow(
            method, zero,
            Cell(f"O(2^(n/2) {poly})", None, False),
            Cell(f"O(2^(n/2) Delta^-1 d {poly})", None, False),
            ("analytical only; no LCU circuit is built",),
        )
    return ResourceRow(
        method, zero,
        Cell("O(n + log(1/Delta) + loglog(1/eps))", None, False),
        Cell(f"O(2^(n/2) Delta^-1 d {poly})", None, False),
        ("analytical only; no LCU circuit is built",),
    )


def preactivation(inputs, weights, bias: float) -> float:
    """Classical perceptron input signal ``sum x_i w_i + b``."""
    inputs, weights = list(inputs), list(weights)
    if len(inputs) != len(weights):
        raise ValueError("inputs and weights differ in length")
    return float(sum(x * w for x, w in zip(inputs, weights)) + bias)
