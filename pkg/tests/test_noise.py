from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ancillatherm.circuits import ThermaliseConfig, build_groundstate_thermalise, execute, initial_state
from ancillatherm.circuits.groundstate import run_groundstate_point
from ancillatherm.hamiltonians import builtin
from ancillatherm.noise import (
    DEFAULT_DURATIONS_NS,
    IDEAL,
    PROFILES,
    KrausChannel,
    NoiseModel,
    NoiseProfile,
    builtin_profile,
    load_profile,
    noisy_execute,
    sample_qubit_params,
    thermal_relaxation_channel,
)
from ancillatherm.qstate import DensityMatrix, PureState, as_density

ONE = np.diag([0, 1]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_zero_duration_is_identity():
    ch = thermal_relaxation_channel(50.0, 70.0, 0.0)
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    assert np.allclose(ch.apply(rho), rho, atol=1e-14)


def test_decay_laws():
    t1, t2 = 40.0, 55.0
    assert thermal_relaxation_channel(t1, t2, t1).apply(ONE)[1, 1].real == pytest.approx(math.exp(-1), abs=1e-12)
    off = thermal_relaxation_channel(t1, t2, t2).apply(PLUS)[0, 1]
    assert abs(off) == pytest.approx(math.exp(-1) / 2, abs=1e-12)


def test_rejects_unphysical_parameters():
    with pytest.raises(ValueError):
        thermal_relaxation_channel(10.0, 25.0, 1.0)
    with pytest.raises(ValueError):
        thermal_relaxation_channel(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        thermal_relaxation_channel(1.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        KrausChannel((np.eye(2) * 0.5,))


@settings(max_examples=40, deadline=None)
@given(t1=st.floats(1.0, 500.0), ratio=st.floats(0.05, 2.0), ta=st.floats(0.0, 50.0), tb=st.floats(0.0, 50.0))
def test_channel_cptp_and_semigroup(t1, ratio, ta, tb):
    t2 = ratio * t1
    a = thermal_relaxation_channel(t1, t2, ta)
    b = thermal_relaxation_channel(t1, t2, tb)
    total = sum(k.conj().T @ k for k in a.kraus)
    assert np.max(np.abs(total - np.eye(2))) < 1e-10
    rng = np.random.default_rng(int(t1 * 1000) % 2**32)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    out = DensityMatrix(a.apply(rho))
    assert out.min_eigenvalue() >= -1e-9
    both = thermal_relaxation_channel(t1, t2, ta + tb)
    assert np.max(np.abs(b.apply(a.apply(rho)) - both.apply(rho))) < 1e-10
    assert np.max(np.abs(a.then(b).apply(rho) - both.apply(rho))) < 1e-10


def test_sampling_rules():
    p = NoiseProfile(mu1_us=100.0, mu2_us=300.0, sigma_us=0.0)
    assert sample_qubit_params(p, 0) == (100.0, 200.0)
    low = builtin_profile("low", seed=4)
    draws = np.array([sample_qubit_params(low, q) for q in range(1000)])
    assert np.all(np.abs(draws[:, 0] - 1800) < 50)
    assert np.all(draws[:, 1] <= 2 * draws[:, 0])
    assert np.all(np.abs(draws[:, 1] - 2000) < 50)
    assert sample_qubit_params(low, 7) == sample_qubit_params(low, 7)
    assert sample_qubit_params(low, 7) != sample_qubit_params(builtin_profile("low", seed=5), 7)


def test_redraw_keeps_times_positive():
    p = NoiseProfile(mu1_us=1.0, mu2_us=1.0, sigma_us=5.0)
    for q in range(200):
        t1, t2 = sample_qubit_params(p, q)
        assert t1 > 0 and 0 < t2 <= 2 * t1


def test_profiles_carry_table_values():
    assert (PROFILES["low"].mu1_us, PROFILES["low"].mu2_us, PROFILES["low"].sigma_us) == (1800, 2000, 10)
    assert (PROFILES["medium"].mu1_us, PROFILES["medium"].mu2_us) == (180, 200)
    assert (PROFILES["high"].mu1_us, PROFILES["high"].mu2_us) == (50, 70)
    assert DEFAULT_DURATIONS_NS == {"U1": 0, "U2": 50, "U3": 100, "CNOT": 300, "C-A": 1600, "CC-A": 3000}
    with pytest.raises(ValueError):
        NoiseProfile(durations_ns={"U1": 0.0})


def test_profile_file_roundtrip(tmp_path):
    p = builtin_profile("medium", seed=9)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(p.to_dict()))
    q = load_profile(path)
    assert q.to_dict() == p.to_dict()


def _h1_circuit(T=2):
    h = builtin("h1")
    return build_groundstate_thermalise(h, ThermaliseConfig(T=T)), initial_state(h)


def test_ideal_and_zero_duration_profiles_match_noiseless():
    c, psi = _h1_circuit(3)
    ref, _ = execute(c, psi, (0,))
    a = noisy_execute(c, as_density(psi), IDEAL, (0,))
    zero = NoiseProfile(durations_ns={k: 0.0 for k in DEFAULT_DURATIONS_NS}, mu1_us=50, mu2_us=70, sigma_us=10)
    b = noisy_execute(c, as_density(psi), zero, (0,))
    assert np.max(np.abs(a.entries - ref.entries)) < 1e-12
    assert np.max(np.abs(b.entries - ref.entries)) < 1e-12


def test_noisy_run_preserves_trace_and_validity():
    c, psi = _h1_circuit(3)
    out = noisy_execute(c, as_density(psi), builtin_profile("high"), (0,))
    assert abs(np.trace(out.entries).real - 1) < 1e-10
    assert out.is_valid()


def test_idle_qubits_receive_no_noise():
    from ancillatherm.circuits import Circuit
    from ancillatherm.gates import Op, standard_gate

    c = Circuit(2, [Op(standard_gate("X"), (0,))])
    psi = PureState.basis(0b10, 2)
    model = NoiseModel(builtin_profile("high"))
    out, _ = execute(c, psi, noise=model)
    # qubit 0 relaxes, qubit 1 stays exactly |1>
    assert out.entries[3, 3].real < 1
    assert out.entries[3, 3].real + out.entries[2, 2].real == pytest.approx(1.0, abs=1e-14)


def test_medium_noise_below_noiseless_curve():
    h = builtin("h1")
    for T in range(1, 5):
        cfg = ThermaliseConfig(T=T)
        _, f0 = run_groundstate_point(h, cfg)
        _, f = run_groundstate_point(h, cfg, builtin_profile("medium"))
        assert f < f0


def test_fidelity_degrades_across_profiles():
    h = builtin("h1")
    cfg = ThermaliseConfig(T=3)
    f = [run_groundstate_point(h, cfg, builtin_profile(name))[1] for name in ("low", "medium", "high")]
    assert f[0] > f[1] > f[2]
