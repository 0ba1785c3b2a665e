"""Clifford circuits, Weyl operators, and the stabilizer canonical form."""

import json
import math
import random

import numpy as np
import pytest

from conftest import random_states
from stab_lab.clifford import (
    BalanceError,
    CliffordCircuit,
    GateError,
    StabilizerState,
    apply_clifford,
    apply_weyl,
    balance,
    enumerate_stabilizers,
    expected_stabilizer_count,
    fourth_moment,
    random_real_clifford,
    stabilizer_from_statevector,
    stabilizer_to_statevector,
    stabilizer_unit_matrix,
    weyl_expectation,
)
from stab_lab.states import FamilySpec, StateVector, make_state


def _gate_matrix(n, gate):
    """Dense unitary oracle for a single gate."""
    N = 1 << n
    H1 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    Z1 = np.diag([1, -1])
    S1 = np.diag([1, 1j])
    U = np.eye(N, dtype=complex)
    if gate[0] in ("H", "Z", "S"):
        single = {"H": H1, "Z": Z1, "S": S1}[gate[0]]
        mats = [single if i == gate[1] else np.eye(2) for i in range(n)]
        # qubit i is bit i of the index, so kron in reverse order
        U = mats[-1]
        for m in mats[-2::-1]:
            U = np.kron(U, m)
    else:
        c, t = gate[1], gate[2]
        U = np.zeros((N, N))
        for x in range(N):
            U[x ^ ((((x >> c) & 1)) << t), x] = 1
    return U


@pytest.mark.parametrize("seed", range(5))
def test_apply_clifford_matches_dense_oracle(seed):
    rng = random.Random(seed)
    n = rng.choice([1, 2, 3])
    gates = []
    for _ in range(6):
        kind = rng.choice(["H", "Z", "S", "CNOT"])
        if kind == "CNOT" and n > 1:
            i, j = rng.sample(range(n), 2)
            gates.append(("CNOT", i, j))
        elif kind != "CNOT":
            gates.append((kind, rng.randrange(n)))
    circuit = CliffordCircuit(n, tuple(gates))
    state = random_states(n, 1, seed=seed)[0]
    out = apply_clifford(circuit, state)
    vec = state.unit()
    for gate in gates:
        vec = _gate_matrix(n, gate) @ vec
    assert np.allclose(out.unit(), vec)


def test_circuit_validation():
    with pytest.raises(GateError):
        CliffordCircuit(1, (("X", 0),))
    with pytest.raises(GateError):
        CliffordCircuit(1, (("H", 1),))
    with pytest.raises(GateError):
        CliffordCircuit(2, (("CNOT", 1, 1),))


@pytest.mark.parametrize("seed", range(5))
def test_circuit_inverse_roundtrip(seed):
    circuit = random_real_clifford(3, depth=30, seed=seed)
    extra = CliffordCircuit(3, (("S", 0), ("S", 2)) + circuit.gates)
    state = random_states(3, 1, seed=seed)[0]
    back = apply_clifford(extra.inverse(), apply_clifford(extra, state))
    assert np.allclose(back.g, state.g)


def test_real_circuits_stay_real():
    circuit = random_real_clifford(3, depth=50, seed=7)
    assert circuit.is_real()
    state = StateVector.from_unit(np.ones(8) / math.sqrt(8))
    out = apply_clifford(circuit, state)
    assert np.abs(out.g.imag).max() < 1e-12
    assert out.is_normalized(1e-12)


def test_random_real_clifford_deterministic():
    a = random_real_clifford(2, seed=5)
    b = random_real_clifford(2, seed=5)
    assert a == b
    assert a != random_real_clifford(2, seed=6)


def _weyl_matrix(n, z):
    N = 1 << n
    y, alpha = z >> n, z & (N - 1)
    W = np.zeros((N, N), dtype=complex)
    for x in range(N):
        sign = (-1) ** bin(alpha & x).count("1")
        W[x ^ y, x] = sign
    return (1j ** bin(y & alpha).count("1")) * W


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weyl_matches_dense_oracle(n):
    state = random_states(n, 1, seed=n)[0]
    for z in range(1 << (2 * n)):
        out = apply_weyl(state, z)
        expect = _weyl_matrix(n, z) @ state.unit()
        assert np.allclose(out.unit(), expect)
        exp = weyl_expectation(state, z)
        y, alpha = z >> n, z & ((1 << n) - 1)
        dense = np.vdot(state.unit(), _weyl_matrix(n, (y << n)) @ np.diag(
            [(-1) ** bin(alpha & x).count("1") for x in range(1 << n)]
        ) @ state.unit())
        assert abs(exp - dense) < 1e-10


def test_weyl_t_state_values(t_state):
    # f-values of the single-qubit magic state: 1, 0, 1/2, 1/2
    f = [abs(weyl_expectation(t_state, z)) ** 2 for z in range(4)]
    assert np.allclose(f, [1.0, 0.0, 0.5, 0.5], atol=1e-12)


def test_stabilizer_counts():
    for n in range(1, 5):
        assert expected_stabilizer_count(n) == (1 << n) * math.prod(
            (1 << k) + 1 for k in range(1, n + 1)
        )
    assert len(enumerate_stabilizers(1)) == 6
    assert len(enumerate_stabilizers(2)) == 60
    assert len(enumerate_stabilizers(3)) == 1080


def test_stabilizer_enumeration_is_duplicate_free():
    for n in (1, 2):
        mat = stabilizer_unit_matrix(n)
        gram = np.abs(mat.conj() @ mat.T)
        off = gram - np.eye(len(mat))
        assert off.max() < 1 - 1e-9  # no two states are equal up to phase


def test_stabilizer_statevector_normalized():
    for s in enumerate_stabilizers(2):
        vec = stabilizer_to_statevector(s)
        assert vec.is_normalized(1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_form_roundtrip(n):
    states = enumerate_stabilizers(n)
    rng = random.Random(n)
    for s in rng.sample(states, min(40, len(states))):
        vec = stabilizer_to_statevector(s)
        back = stabilizer_from_statevector(vec)
        assert back == s


def test_canonical_form_roundtrip_with_global_phase():
    s = enumerate_stabilizers(2)[17]
    vec = stabilizer_to_statevector(s)
    rotated = StateVector(2, vec.g * np.exp(0.3j))
    back = stabilizer_from_statevector(rotated)
    assert np.isclose(
        abs(stabilizer_to_statevector(back).inner(rotated)), 1.0, atol=1e-9
    )


def test_from_statevector_rejects_non_stabilizer(t_state):
    with pytest.raises(ValueError):
        stabilizer_from_statevector(t_state)


def test_stabilizer_json_roundtrip():
    s = StabilizerState(3, 0b101, (0b110, 0b001), ell=0b10, q_upper=(0b11, 0b10))
    back = StabilizerState.from_json(s.to_json())
    assert back == s
    data = json.loads(s.to_json())
    assert data["n"] == 3
    assert data["offset"] == "101"


def test_fourth_moment_extremes():
    basis = make_state(FamilySpec("basis", 3, x0=5))
    assert np.isclose(fourth_moment(basis), 1.0)
    uniform = make_state(FamilySpec("uniform", 3))
    assert np.isclose(fourth_moment(uniform), 1.0 / 8)


def test_balance_reaches_threshold():
    # basis states are maximally unbalanced; balance must fix them
    for n in (2, 3):
        state = make_state(FamilySpec("basis", n, x0=1))
        circuit, out = balance(state, seed=3)
        assert fourth_moment(out) <= 3.0 / state.N + 1e-9
        assert circuit.is_real()
        assert np.allclose(apply_clifford(circuit, state).g, out.g)


def test_balance_identity_short_circuit():
    uniform = make_state(FamilySpec("uniform", 2))
    circuit, out = balance(uniform)
    assert circuit.gates == ()
    assert out is uniform


def test_balance_zero_tries_rejected():
    state = make_state(FamilySpec("basis", 2, x0=0))
    with pytest.raises(ValueError):
        balance(state, max_tries=0)


def test_balance_error_message():
    err = BalanceError(tries=7, best_moment=0.5)
    assert "7" in str(err) and "0.5" in str(err)
    assert err.tries == 7 and err.best_moment == 0.5
