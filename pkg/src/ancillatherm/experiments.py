"""Experiment runners behind the command line: sweeps, reports and the scrambling study."""
from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import (
    estimate_q_angle,
    oaa_gate_count,
    perceptron_overlap_sq,
    predicted_groundstate_fidelity,
    predicted_perceptron_fidelity,
    q_activation,
)
from .circuits.groundstate import build_groundstate_thermalise, run_groundstate_point
from .circuits.oaa import build_oaa, demo_unit, oaa_success, oaa_with_angle_error, reflection_gate
from .circuits.perceptron import ThermaliseConfig, build_perceptron_thermalise, run_perceptron_point
from .gates import Gate, Op, count_gates, op_count, ry
from .hamiltonians import Hamiltonian, minimal_precision, shifted_phases
from .qstate import DensityMatrix, apply_gate, sample_counts
from .results import RunResult, SeriesPoint

DEFAULT_SHOTS = 8192


def point_seed(seed: int, *key) -> int:
    """``seed`` plus a stable hash of the grid point."""
    return (seed + zlib.crc32(repr(key).encode())) % (1 << 32)


# ---------------------------------------------------------------- perceptron sweep

def _perceptron_point(args):
    theta, T, mode, shots, noise, seed, trailing = args
    cfg = ThermaliseConfig(T=T, trailing_reset=trailing)
    rho, f_exact = run_perceptron_point(theta, cfg, None, noise)
    pred = predicted_perceptron_fidelity(theta, T, perceptron_overlap_sq(theta)) if trailing else None
    if mode == "exact":
        return SeriesPoint(T, f_exact, pred, theta, estimate_q_angle(rho)), None
    s = point_seed(seed, theta, T)
    z = sample_counts(rho, shots, seed=[s, 0])
    p1 = z.get("1", 0) / shots
    q_est = math.asin(math.sqrt(p1))
    # fidelity with exp(-iqY)|0>: rotate back by exp(+iqY) and read |0>
    back = _rotate_y(rho, -2 * q_activation(theta))
    f_counts = sample_counts(back, shots, seed=[s, 1])
    f = f_counts.get("0", 0) / shots
    err = math.sqrt(max(f * (1 - f), 0.0) / shots)
    return SeriesPoint(T, f, pred, theta, q_est, err), {"z": z, "fidelity_basis": f_counts}


def _rotate_y(rho: DensityMatrix, angle: float) -> DensityMatrix:
    return apply_gate(rho, Gate("Ry", ry(angle), "U3"), (0,))


def perceptron_sweep(thetas, iterations, mode: str = "exact", shots: int = DEFAULT_SHOTS,
                     noise=None, seed: int = 0, trailing_reset: bool = True, workers: int = 1) -> RunResult:
    if not len(thetas):
        raise ValueError("theta grid is empty")
    if mode not in ("exact", "shots"):
        raise ValueError("mode must be 'exact' or 'shots'")
    if mode == "shots" and shots < 1:
        raise ValueError("shots must be >= 1")
    start = time.perf_counter()
    jobs = [(float(th), int(T), mode, shots, noise, seed, trailing_reset)
            for th in thetas for T in iterations]
    outs = _map(_perceptron_point, jobs, workers)
    res = RunResult(
        "perceptron",
        {"thetas": [float(t) for t in thetas], "iterations": [int(t) for t in iterations],
         "mode": mode, "noise": getattr(noise, "name", None), "trailing_reset": trailing_reset},
        seed,
        shots=shots if mode == "shots" else None,
    )
    for (point, counts), job in zip(outs, jobs):
        res.series.append(point)
        if counts is not None:
            res.counts.setdefault("measurements", {})[f"theta={job[0]!r},T={job[1]}"] = counts
    res.sort()
    t_max = max(iterations)
    res.counts["gates"] = {
        f"theta={th!r}": count_gates(build_perceptron_thermalise(th, ThermaliseConfig(T=t_max))).as_dict()
        for th in map(float, thetas)
    }
    res.wall_time = time.perf_counter() - start
    return res


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))  # map keeps submission order


# ---------------------------------------------------------------- groundstate

def _groundstate_point(args):
    h, cfg, noise = args
    _, f = run_groundstate_point(h, cfg, noise)
    return f


def groundstate_run(h: Hamiltonian, iterations, m: int | None = None, scramble: str = "exact",
                    noise=None, seed: int = 0, workers: int = 1) -> RunResult:
    start = time.perf_counter()
    m = m or minimal_precision(h)
    _, n_star = shifted_phases(h, m)
    N = 1 << h.n_qubits
    jobs = [(h, ThermaliseConfig(T=int(T), m=m, scrambling_mode=scramble), noise) for T in iterations]
    fids = _map(_groundstate_point, jobs, workers)
    res = RunResult(
        "groundstate",
        {"hamiltonian": h.name, "precision": m, "iterations": [int(t) for t in iterations],
         "scramble": scramble, "noise": getattr(noise, "name", None), "N": N, "N_star": n_star},
        seed,
    )
    for T, f in zip(iterations, fids):
        res.series.append(SeriesPoint(int(T), f, predicted_groundstate_fidelity(N, n_star, int(T))))
    res.sort()
    res.counts["gates"] = count_gates(
        build_groundstate_thermalise(h, ThermaliseConfig(T=max(iterations), m=m, scrambling_mode=scramble))
    ).as_dict()
    res.wall_time = time.perf_counter() - start
    return res


# ---------------------------------------------------------------- OAA

def oaa_report(p0: float, k: int, deltas=(0.0, 0.01, 0.05, 0.1)) -> dict:
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie in (0, 1)")
    if k < 0:
        raise ValueError("k must be >= 0")
    unit = demo_unit(p0)
    q_u = count_gates(unit).total
    q_s = op_count(Op(reflection_gate(len(unit.ancillae)), tuple(unit.ancillae))).total
    sweep = []
    base = 1 - oaa_success(unit, k)
    for d in deltas:
        fail = 1 - oaa_with_angle_error(unit, k, d)
        sweep.append({"delta": float(d), "failure": fail, "excess": fail - base})
    return {
        "p0": p0,
        "k": k,
        "success_sim": oaa_success(unit, k),
        "success_pred": 1 - (1 - p0) ** (3 ** k),
        "gate_count_circuit": count_gates(build_oaa(unit, k)).total,
        "gate_count_formula": oaa_gate_count(q_u, q_s, k),
        "q_u": q_u,
        "q_s": q_s,
        "angle_error_sweep": sweep,
    }


# ---------------------------------------------------------------- scrambling Monte Carlo

def haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def perpendicular_state(rng: np.random.Generator, lam: np.ndarray) -> np.ndarray:
    v = rng.normal(size=lam.size) + 1j * rng.normal(size=lam.size)
    v = v - np.vdot(lam, v) * lam
    return v / np.linalg.norm(v)


def _local_layer(n: int, which: str) -> np.ndarray:
    one = {"H": np.array([[1, 1], [1, -1]]) / math.sqrt(2), "X": np.array([[0, 1], [1, 0]])}[which]
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, one)
    return out.astype(complex)


@dataclass(frozen=True)
class OverlapStats:
    gate: str
    n: int
    trials: int
    mean: float
    std: float

    @property
    def sem(self) -> float:
        return self.std / math.sqrt(self.trials)

    def as_dict(self) -> dict:
        return {"gate": self.gate, "n": self.n, "trials": self.trials,
                "mean": self.mean, "std": self.std, "sem": self.sem}


def overlap_samples(n: int, trials: int, seed: int, which: str = "H") -> np.ndarray:
    """``|<lam_perp| G |lam>|^2`` for Haar ``lam`` and a random state orthogonal to it."""
    if not 1 <= n <= 8:
        raise ValueError("qubits must lie in 1..8")
    rng = np.random.default_rng([seed, n, 0 if which == "H" else 1])
    g = _local_layer(n, which)
    dim = 1 << n
    out = np.empty(trials)
    for t in range(trials):
        lam = haar_state(rng, dim)
        perp = perpendicular_state(rng, lam)
        out[t] = abs(np.vdot(perp, g @ lam)) ** 2
    return out


def scramble_study(n: int, trials: int = 1000, seed: int = 0) -> dict:
    stats = {}
    for which in ("H", "X"):
        x = overlap_samples(n, trials, seed, which)
        stats[which] = OverlapStats(which, n, trials, float(x.mean()), float(x.std(ddof=1)))
    h, x = stats["H"], stats["X"]
    diff = abs(h.mean - x.mean)
    combined = math.sqrt(h.sem ** 2 + x.sem ** 2)
    dim = 1 << n
    return {
        "n": n,
        "trials": trials,
        "seed": seed,
        "target": 1 / dim,
        "haar_mean": dim / (dim * dim - 1),
        "H": h.as_dict(),
        "X": x.as_dict(),
        "two_sample_z": diff / combined if combined > 0 else 0.0,
    }
