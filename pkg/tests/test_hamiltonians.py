from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ancillatherm.circuits import build_pea_unit, execute
from ancillatherm.gates import hamiltonian_evolution
from ancillatherm.hamiltonians import (
    builtin,
    dump_hamiltonian,
    generate_h2_style,
    load_hamiltonian,
    minimal_precision,
    phase_patterns,
    shifted_phases,
)
from ancillatherm.qstate import PureState, outcome_probabilities, tensor


def expm_herm(h, t=1.0):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def test_h2_printed_matrix():
    h = builtin("h2")
    assert np.allclose(h.matrix, h.matrix.conj().T)
    assert np.trace(h.matrix).real == pytest.approx(-math.pi, abs=1e-4)
    want = sorted([0, -math.pi / 2, -math.pi, math.pi / 2])
    assert np.allclose(h.eigenvalues, want, atol=1e-3)
    v = h.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(4))) < 1e-10


def test_h1():
    h = builtin("h1")
    assert np.max(np.abs(expm_herm(h.matrix) - np.diag([1, -1j]))) < 1e-12
    assert h.ground_energy == pytest.approx(-1.5 * math.pi)
    assert abs(h.groundstate[1]) == pytest.approx(1.0)
    assert np.allclose(h.label_basis, np.eye(2))
    with pytest.raises(ValueError):
        builtin("h3")


def test_rejects_non_hermitian():
    from ancillatherm.hamiltonians import Hamiltonian

    with pytest.raises(ValueError):
        Hamiltonian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        Hamiltonian(np.eye(3))


def test_generator_without_perturbation_is_principal_log():
    h = generate_h2_style(2, eps=0.0, seed=1)
    assert np.max(np.abs(h.matrix - np.diag([0, -math.pi / 2, -math.pi, math.pi / 2]))) < 1e-10


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_generator_eigenphases(seed, n):
    h = generate_h2_style(n, seed=seed)
    assert np.max(np.abs(h.matrix - h.matrix.conj().T)) < 1e-10
    phases = np.exp(-1j * h.eigenvalues)
    quarter = np.exp(1j * np.pi / 2 * np.arange(4))
    for z in phases:
        assert np.min(np.abs(quarter - z)) < 1e-9
    a = expm_herm(h.matrix)
    assert np.max(np.abs(a @ a.conj().T - np.eye(1 << n))) < 1e-9


def test_generator_determinism():
    a, b = generate_h2_style(2, seed=42), generate_h2_style(2, seed=42)
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, generate_h2_style(2, seed=43).matrix)
    with pytest.raises(ValueError):
        generate_h2_style(4)


def test_shifted_phases_examples():
    th, ns = shifted_phases(builtin("h1"), 2)
    assert th == pytest.approx([0.0, 0.25], abs=1e-12)
    assert ns == 1
    pats = phase_patterns(builtin("h2"), 2)
    assert len(set(pats.tolist())) == 4 and pats[0] == 0
    assert shifted_phases(builtin("h2"), 2)[1] == 1
    assert shifted_phases(builtin("h1"), 1)[1] == 2
    assert minimal_precision(builtin("h1")) == 2
    assert minimal_precision(builtin("h2")) == 2
    with pytest.raises(ValueError):
        shifted_phases(builtin("h1"), 0)


@pytest.mark.parametrize("name", ["h1", "h2"])
def test_pea_patterns_deterministic_on_eigenvectors(name):
    h = builtin(name)
    m, n = 2, h.n_qubits
    pats = phase_patterns(h, m)
    circ = build_pea_unit(h, m, 1.0, h.ground_energy)
    for j in range(1 << n):
        psi = tensor(PureState.from_vector(h.eigenvectors[:, j], normalize=True), PureState.basis(0, m))
        out, _ = execute(circ, psi)
        probs = outcome_probabilities(out, list(range(n, n + m)))
        want = format(int(pats[j]), f"0{m}b")
        assert probs.get(want, 0.0) > 1 - 1e-9


def test_file_roundtrip(tmp_path):
    h = generate_h2_style(2, seed=3)
    p = tmp_path / "h.json"
    p.write_text(dump_hamiltonian(h))
    back = load_hamiltonian(p)
    assert np.array_equal(back.matrix, h.matrix)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}))
    with pytest.raises(ValueError):
        load_hamiltonian(bad)
    bad.write_text(json.dumps({"matrix": [[1, 2]]}))
    with pytest.raises(ValueError):
        load_hamiltonian(bad)


def test_evolution_consistent_with_matrix():
    h = builtin("h2")
    g = hamiltonian_evolution(h.matrix, 1.0)
    assert np.max(np.abs(g.matrix - expm_herm(h.matrix))) < 1e-10
