from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ancillatherm.analysis import (
    METHODS,
    ResourceQuery,
    applications_for_epsilon,
    estimate_q_angle,
    iterations_for_epsilon,
    oaa_depth,
    oaa_gate_count,
    oaa_success,
    p_success,
    perceptron_overlap_sq,
    preactivation,
    predicted_groundstate_fidelity,
    predicted_perceptron_fidelity,
    q_activation,
    resource_rows,
)
from ancillatherm.circuits import ThermaliseConfig, simulate_perceptron_thermalise

from .oracles import groundstate_closed_form, perceptron_closed_form, ry


def test_q_activation_examples():
    assert q_activation(0.0) == 0.0
    assert q_activation(math.pi / 4) == pytest.approx(math.pi / 4, abs=1e-15)
    assert q_activation(math.pi / 3) == pytest.approx(1.249046, abs=1e-6)
    assert q_activation(math.pi / 2) == pytest.approx(math.pi / 2)
    assert q_activation(-math.pi / 2) == pytest.approx(math.pi / 2)


def test_q_activation_monotone_and_even():
    grid = np.linspace(0, math.pi / 2, 401)
    vals = [q_activation(t) for t in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    for t in grid[:-1]:
        assert q_activation(-t) == pytest.approx(q_activation(t), abs=1e-15)
        assert q_activation(t) == pytest.approx(math.atan(math.tan(t) ** 2), abs=1e-12)


def test_p_success_range():
    assert p_success(0.0) == 1.0
    assert p_success(math.pi / 4) == pytest.approx(0.5)
    grid = np.linspace(-math.pi, math.pi, 801)
    vals = np.array([p_success(t) for t in grid])
    assert vals.min() == pytest.approx(0.5, abs=1e-12)
    assert abs(grid[vals.argmin()]) == pytest.approx(3 * math.pi / 4, abs=1e-9) or \
        abs(grid[vals.argmin()]) == pytest.approx(math.pi / 4, abs=1e-9)
    assert np.all((vals >= 0.5 - 1e-12) & (vals <= 1 + 1e-12))


def test_predicted_fidelity_examples():
    assert predicted_perceptron_fidelity(math.pi / 4, 2, 0.5) == pytest.approx(0.875)
    for T in range(1, 6):
        assert predicted_perceptron_fidelity(0.7, T, 1.0) == 1.0
        assert predicted_perceptron_fidelity(0.0, T, 0.2) == 1.0
    assert predicted_groundstate_fidelity(2, 1, 1) == pytest.approx(0.5)
    assert predicted_groundstate_fidelity(4, 1, 5) == pytest.approx(0.762695, abs=1e-6)
    for T in (1, 3, 7):
        assert predicted_groundstate_fidelity(3, 3, T) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        predicted_groundstate_fidelity(2, 3, 1)
    with pytest.raises(ValueError):
        predicted_perceptron_fidelity(0.1, 0, 0.5)


@settings(max_examples=50, deadline=None)
@given(theta=st.floats(-1.5, 1.5), T=st.integers(1, 8), ov=st.floats(0, 1),
       N=st.integers(1, 16), data=st.data())
def test_predictions_match_oracle_forms(theta, T, ov, N, data):
    assert predicted_perceptron_fidelity(theta, T, ov) == pytest.approx(
        perceptron_closed_form(theta, T, ov), abs=1e-12)
    ns = data.draw(st.integers(1, N))
    assert predicted_groundstate_fidelity(N, ns, T) == pytest.approx(
        groundstate_closed_form(N, ns, T), abs=1e-12)


def test_overlap_of_activation():
    q = q_activation(math.pi / 3)
    assert perceptron_overlap_sq(math.pi / 3) == pytest.approx(math.cos(q) ** 2)
    plus = np.array([1, 1]) / math.sqrt(2)
    ref = abs(plus @ ry(2 * q) @ plus) ** 2
    assert perceptron_overlap_sq(math.pi / 3, plus) == pytest.approx(ref, abs=1e-12)


def test_iteration_counts():
    assert iterations_for_epsilon(1e-3, 0.5) == pytest.approx(8.9658, abs=1e-4)
    assert applications_for_epsilon(1e-3, 0.5) == 10
    assert iterations_for_epsilon(0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    # near-certain success: one application, no repeats; the real form dips below zero
    assert applications_for_epsilon(1e-3, 1 - 1e-12) == 1
    assert iterations_for_epsilon(1e-3, 1 - 1e-12) < 0
    with pytest.raises(ValueError):
        iterations_for_epsilon(0.0, 0.5)


@settings(max_examples=80, deadline=None)
@given(eps=st.floats(1e-9, 0.99), p0=st.floats(0.01, 0.99))
def test_integer_count_brackets_epsilon(eps, p0):
    T = applications_for_epsilon(eps, p0)
    fail = 1 - p0
    assert fail ** T <= eps
    assert T == 1 or fail ** (T - 1) > eps


def test_oaa_depth():
    d = oaa_depth(1e-3, 0.5)
    assert d.k == 3
    assert d.real == pytest.approx(2.093, abs=1e-3)
    assert oaa_depth(0.6, 0.5).k == 0
    assert oaa_depth(0.5, 0.5).k == 0
    assert oaa_success(0.75, 1) == pytest.approx(0.984375)


def test_oaa_gate_count():
    assert oaa_gate_count(7, 3, 0) == 7
    assert oaa_gate_count(10, 4, 2) == 122
    for k in range(1, 7):
        assert oaa_gate_count(10, 4, k) == 3 * oaa_gate_count(10, 4, k - 1) + 2 * 4
    with pytest.raises(ValueError):
        oaa_gate_count(-1, 2, 1)


def test_resource_rows():
    q = ResourceQuery(n=1, m=1, epsilon=1e-3, p0=0.5)
    row = resource_rows(q, "postselect").as_dict()
    assert row["measurements"]["value"] == 2
    th = resource_rows(q, "thermalise").as_dict()
    assert th["qubits"]["value"] == 11
    assert th["measurements"]["value"] == 0
    lcu = resource_rows(q, "lcu-oaa").as_dict()
    assert lcu["gates"]["kind"] == "asymptotic"
    assert lcu["gates"]["value"] is None
    assert "2^(n/2)" in lcu["gates"]["expr"] and "Delta^-1" in lcu["gates"]["expr"]
    assert resource_rows(ResourceQuery(n=2, m=3), "thermalise").qubits.value == 2 + 10 * 5
    oaa = resource_rows(ResourceQuery(q_u=10, q_s=4, epsilon=0.01, p0=0.75), "oaa")
    assert oaa.gates.value == oaa_gate_count(10, 4, oaa_depth(0.01, 0.75).k)
    for m in METHODS:
        d = resource_rows(q, m).as_dict()
        for key in ("measurements", "qubits", "gates"):
            assert d[key]["kind"] in ("exact", "asymptotic")
            if d[key]["kind"] == "asymptotic":
                assert d[key]["expr"].startswith(("O(", "T ["))
    with pytest.raises(ValueError):
        resource_rows(q, "grover")
    with pytest.raises(ValueError):
        ResourceQuery(delta_gap=0)


def test_estimate_q_angle():
    rho = ry(math.pi / 4) @ np.diag([1, 0]) @ ry(math.pi / 4).conj().T
    assert estimate_q_angle(rho) == pytest.approx(math.pi / 8, abs=1e-10)
    assert estimate_q_angle(np.eye(2) / 2) == pytest.approx(math.pi / 4)
    res = simulate_perceptron_thermalise(math.pi / 4, ThermaliseConfig(T=6))
    rho6 = res.states[(math.pi / 4, 6)]
    assert abs(estimate_q_angle(rho6) - math.pi / 4) < 0.01


def test_preactivation():
    assert preactivation([1, 1], [0.3, 0.2], 0.5) == pytest.approx(1.0)
    assert preactivation([0, 0], [0, 0], 0.25) == 0.25
    assert preactivation([2, -1], [0.5, 0.5], 0) == pytest.approx(0.5)
    assert preactivation([], [], 1.5) == 1.5
    with pytest.raises(ValueError):
        preactivation([1], [1, 2], 0)
