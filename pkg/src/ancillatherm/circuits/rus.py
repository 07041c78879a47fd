"""Repeat-until-success: measure the ancilla, reset the target on failure, retry."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gates import Gate
from ..qstate import PureState
from .core import Circuit
from .perceptron import branch_operator, failure_isometry


@dataclass(frozen=True)
class RUSResult:
    trials_used: int
    succeeded: bool
    final_state: PureState

    def __post_init__(self):
        if self.trials_used < 1:
            raise ValueError("trials_used must be >= 1")


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def run_rus(unit: Circuit, success_outcome: int = 0, psi: PureState | None = None, rng=None,
            max_trials: int = 1000, reset: Gate | None = None) -> RUSResult:
    """Sample the ancilla outcome of ``unit`` until ``success_outcome`` appears.

    ``unit.ancillae`` start in ``|0>`` every trial.  On failure the target is
    mapped back by ``reset`` (default: the inverse of the failure isometry,
    derived from the unit itself).
    """
    if max_trials < 1:
        raise ValueError("max_trials must be >= 1")
    anc = tuple(unit.ancillae)
    if not anc:
        raise ValueError("unit has no ancillae")
    n_t = unit.n_qubits - len(anc)
    psi = PureState.basis(0, n_t) if psi is None else psi
    rng = _rng(rng)
    k_ok = branch_operator(unit, anc, success_outcome)
    fails = [o for o in range(1 << len(anc)) if o != success_outcome]
    k_fail = [branch_operator(unit, anc, o) for o in fails]
    if reset is not None:
        resets = [reset.matrix] * len(fails)
    else:
        resets = []
        for o, k in zip(fails, k_fail):
            try:
                resets.append(failure_isometry(unit, anc, o).conj().T)
            except ValueError:
                if np.max(np.abs(k)) > 1e-12:
                    raise
                resets.append(np.eye(k.shape[0]))  # branch never occurs
    v = psi.amplitudes
    for trial in range(1, max_trials + 1):
        ok = k_ok @ v
        p = float(np.vdot(ok, ok).real)
        u = rng.random()
        if u < p:
            return RUSResult(trial, True, PureState(ok / np.sqrt(p)))
        # pick which failure outcome occurred, conditional on failing
        probs = np.array([float(np.vdot(k @ v, k @ v).real) for k in k_fail])
        j = int(np.searchsorted(np.cumsum(probs), u - p, side="right"))
        j = min(j, len(fails) - 1)
        bad = k_fail[j] @ v
        bad = bad / np.linalg.norm(bad)
        v = resets[j] @ bad
    return RUSResult(max_trials, False, PureState(v / np.linalg.norm(v)))


def mean_trials(unit: Circuit, runs: int, base_seed: int = 0, max_trials: int = 10_000) -> tuple[float, float]:
    """Mean and standard error of trials over ``runs`` seeded runs (run ``i`` uses seed ``[base_seed, i]``)."""
    trials = np.array([
        run_rus(unit, rng=np.random.default_rng([base_seed, i]), max_trials=max_trials).trials_used
        for i in range(runs)
    ], dtype=float)
    return float(trials.mean()), float(trials.std(ddof=1) / np.sqrt(runs))
