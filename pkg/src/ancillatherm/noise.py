"""Thermal-relaxation noise: T1/T2 channels, per-qubit parameter draws, noisy execution.

Relaxation is taken at zero temperature (decay towards ``|0>``).  Noise acts
only on the qubits that take part in a gate, for that gate class's duration;
idle qubits are left alone.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .qstate import DensityMatrix

CLASSES = ("U1", "U2", "U3", "CNOT", "C-A", "CC-A")
DEFAULT_DURATIONS_NS = {"U1": 0.0, "U2": 50.0, "U3": 100.0, "CNOT": 300.0, "C-A": 1600.0, "CC-A": 3000.0}


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        d = ops[0].shape[0]
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(d))) > 1e-10:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ops)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """This channel followed by ``other``."""
        return KrausChannel(tuple(b @ a for a in self.kraus for b in other.kraus))


def thermal_relaxation_channel(t1: float, t2: float, t: float) -> KrausChannel:
    """Amplitude damping to ``|0>`` plus pure dephasing; populations decay as
    ``exp(-t/T1)``, coherences as ``exp(-t/T2)``.  Any consistent time unit."""
    if not t1 > 0 or not t2 > 0:
        raise ValueError("T1 and T2 must be positive")
    if t2 > 2 * t1:
        raise ValueError(f"T2={t2} exceeds 2*T1={2 * t1}")
    if t < 0:
        raise ValueError("duration must be non-negative")
    gamma = 1.0 - math.exp(-t / t1)
    # residual coherence factor after amplitude damping's own sqrt(1-gamma)
    lam = math.exp(-t / t2 + t / (2 * t1))
    lam = min(lam, 1.0)
    a0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    d0 = math.sqrt((1 + lam) / 2) * np.eye(2, dtype=complex)
    d1 = math.sqrt((1 - lam) / 2) * np.diag([1, -1]).astype(complex)
    ops = [d @ a for a in (a0, a1) for d in (d0, d1)]
    return KrausChannel(tuple(k for k in ops if np.any(np.abs(k) > 0)))


@dataclass(frozen=True)
class NoiseProfile:
    durations_ns: dict = field(default_factory=lambda: dict(DEFAULT_DURATIONS_NS))
    mu1_us: float = math.inf
    mu2_us: float = math.inf
    sigma_us: float = 0.0
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        missing = set(CLASSES) - set(self.durations_ns)
        if missing:
            raise ValueError(f"durations missing for {sorted(missing)}")
        if any(v < 0 for v in self.durations_ns.values()):
            raise ValueError("durations must be non-negative")
        if not (self.mu1_us > 0 and self.mu2_us > 0) or self.sigma_us < 0:
            raise ValueError("need mu1, mu2 > 0 and sigma >= 0")

    def to_dict(self) -> dict:
        return {
            "durations_ns": dict(self.durations_ns),
            "mu1_us": self.mu1_us,
            "mu2_us": self.mu2_us,
            "sigma_us": self.sigma_us,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict, name: str = "file") -> "NoiseProfile":
        return cls(
            durations_ns={k: float(v) for k, v in d["durations_ns"].items()},
            mu1_us=float(d["mu1_us"]),
            mu2_us=float(d["mu2_us"]),
            sigma_us=float(d["sigma_us"]),
            seed=int(d.get("seed", 0)),
            name=name,
        )


PROFILES = {
    "low": NoiseProfile(mu1_us=1800.0, mu2_us=2000.0, sigma_us=10.0, name="low"),
    "medium": NoiseProfile(mu1_us=180.0, mu2_us=200.0, sigma_us=10.0, name="medium"),
    "high": NoiseProfile(mu1_us=50.0, mu2_us=70.0, sigma_us=10.0, name="high"),
}
IDEAL = NoiseProfile(name="ideal")


def builtin_profile(name: str, seed: int | None = None) -> NoiseProfile:
    p = PROFILES[name]
    if seed is not None:
        p = NoiseProfile(p.durations_ns, p.mu1_us, p.mu2_us, p.sigma_us, seed, p.name)
    return p


def load_profile(path) -> NoiseProfile:
    data = json.loads(Path(path).read_text())
    return NoiseProfile.from_dict(data, name=str(path))


def sample_qubit_params(profile: NoiseProfile, qubit: int, rng=None) -> tuple[float, float]:
    """Draw ``(T1, T2)`` in microseconds for one qubit.

    Without an explicit ``rng`` the stream is keyed on ``(profile.seed, qubit)``.
    Non-positive draws are redrawn; T2 is clamped to ``2 * T1``.
    """
    if rng is None:
        rng = np.random.default_rng([profile.seed, qubit])

    def draw(mu):
        if math.isinf(mu) or profile.sigma_us == 0:
            return mu
        for _ in range(1000):
            v = rng.normal(mu, profile.sigma_us)
            if v > 0:
                return float(v)
        raise RuntimeError("could not draw a positive relaxation time")

    t1 = draw(profile.mu1_us)
    t2 = draw(profile.mu2_us)
    return t1, min(t2, 2 * t1)


class NoiseModel:
    """Per-run noise state: caches one ``(T1, T2)`` draw and channel set per qubit."""

    def __init__(self, profile: NoiseProfile):
        self.profile = profile
        self._params: dict[int, tuple[float, float]] = {}
        self._cache: dict[tuple[str, int], tuple | None] = {}

    def params(self, qubit: int) -> tuple[float, float]:
        if qubit not in self._params:
            self._params[qubit] = sample_qubit_params(self.profile, qubit)
        return self._params[qubit]

    def channels(self, cls: str, qubit: int):
        key = (cls, qubit)
        if key not in self._cache:
            t_ns = self.profile.durations_ns[cls]
            t1, t2 = self.params(qubit)
            if t_ns == 0 or (math.isinf(t1) and math.isinf(t2)):
                self._cache[key] = None
            else:
                self._cache[key] = thermal_relaxation_channel(t1, t2, t_ns / 1000.0).kraus
        return self._cache[key]


def noisy_execute(circuit, rho, profile: NoiseProfile, input_qubits=None, eager: bool = True) -> DensityMatrix:
    """Execute ``circuit`` with thermal relaxation after every native gate."""
    from .circuits.core import execute

    out, _ = execute(circuit, rho, input_qubits, eager=eager, noise=NoiseModel(profile))
    return out
