"""Statevector container, Walsh-Hadamard analysis, families, and JSON I/O."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stab_lab.states import (
    FamilySpec,
    StateFormatError,
    StateVector,
    convolve,
    dot_parity,
    dump_state_json,
    fwht,
    haar_unit,
    inverse_walsh,
    load_state_json,
    make_state,
    phase_derivative,
    sign_table,
    walsh_hadamard,
)


def _random_complex(n, seed):
    rng = np.random.default_rng(seed)
    N = 1 << n
    return rng.standard_normal(N) + 1j * rng.standard_normal(N)


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_fwht_is_scaled_involution(n, seed):
    g = _random_complex(n, seed)
    again = fwht(fwht(g))
    assert np.allclose(again, (1 << n) * g)


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_walsh_roundtrip_and_parseval(n, seed):
    g = _random_complex(n, seed)
    ghat = walsh_hadamard(g)
    assert np.allclose(inverse_walsh(ghat), g)
    assert np.isclose(np.sum(np.abs(ghat) ** 2), np.mean(np.abs(g) ** 2))


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_walsh_matches_definition(n, seed):
    g = _random_complex(n, seed)
    N = 1 << n
    ghat = walsh_hadamard(g)
    for alpha in range(N):
        direct = np.mean([(-1) ** bin(alpha & x).count("1") * g[x] for x in range(N)])
        assert abs(ghat[alpha] - direct) < 1e-10


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_convolution_oracle(n, seed):
    f = _random_complex(n, seed)
    g = _random_complex(n, seed + 1)
    N = 1 << n
    conv = convolve(f, g)
    for x in range(N):
        direct = np.mean([f[y] * g[x ^ y] for y in range(N)])
        assert abs(conv[x] - direct) < 1e-9


def test_fwht_axis_handling():
    a = _random_complex(2, 0).reshape(2, 2)
    col = fwht(a, axis=0)
    for j in range(2):
        assert np.allclose(col[:, j], fwht(a[:, j]))


def test_fwht_rejects_non_power_of_two():
    with pytest.raises(StateFormatError):
        fwht(np.ones(3))


@given(st.integers(0, 255), st.integers(0, 255))
def test_dot_parity_matches_bit_count(value, mask):
    assert dot_parity(np.array([value]), mask)[0] == (value & mask).bit_count() % 2


def test_sign_table_small():
    assert list(sign_table(4, 0b01)) == [1, -1, 1, -1]
    assert list(sign_table(4, 0b11)) == [1, -1, -1, 1]


def test_phase_derivative():
    g = _random_complex(2, 3)
    d = phase_derivative(g, 0b10)
    assert np.allclose(d, g * np.conj(g[[2, 3, 0, 1]]))


def test_statevector_conventions():
    state = make_state(FamilySpec("uniform", 2))
    assert np.allclose(state.g, 1.0)
    assert state.is_normalized()
    assert np.allclose(state.unit(), 0.5)
    back = StateVector.from_unit(state.unit())
    assert np.allclose(back.g, state.g)


def test_inner_product_convention():
    a = make_state(FamilySpec("basis", 2, x0=1))
    b = make_state(FamilySpec("basis", 2, x0=1))
    c = make_state(FamilySpec("basis", 2, x0=2))
    assert np.isclose(a.inner(b), 1.0)
    assert np.isclose(a.inner(c), 0.0)
    assert np.isclose(a.overlap_sq(make_state(FamilySpec("uniform", 2))), 0.25)


def test_normalized_and_zero_vector():
    s = StateVector(1, np.array([2.0, 0.0], dtype=complex))
    assert s.normalized().is_normalized()
    with pytest.raises(StateFormatError):
        StateVector(1, np.zeros(2, dtype=complex)).normalized()


def test_family_basis_and_t_tensor():
    basis = make_state(FamilySpec("basis", 2, x0=3))
    assert np.allclose(basis.unit(), [0, 0, 0, 1])
    t2 = make_state(FamilySpec("t_tensor", 2))
    phase = np.exp(1j * math.pi / 4)
    assert np.allclose(t2.g, [1, phase, phase, phase**2])


def test_family_haar_deterministic_and_normalized():
    a = make_state(FamilySpec("haar", 3, seed=9))
    b = make_state(FamilySpec("haar", 3, seed=9))
    c = make_state(FamilySpec("haar", 3, seed=10))
    assert np.allclose(a.g, b.g)
    assert not np.allclose(a.g, c.g)
    assert a.is_normalized(1e-12)


def test_family_interpolate_endpoints():
    from stab_lab.clifford import StabilizerState, stabilizer_to_statevector

    stab = StabilizerState(2, 0, (1, 2), 0, (0, 0))
    s_end = make_state(FamilySpec("interpolate", 2, seed=4, eps=0.0, stab=stab))
    assert np.isclose(
        s_end.overlap_sq(stabilizer_to_statevector(stab)), 1.0, atol=1e-12
    )
    h_end = make_state(FamilySpec("interpolate", 2, seed=4, eps=1.0, stab=stab))
    assert h_end.is_normalized(1e-9)
    with pytest.raises(StateFormatError):
        make_state(FamilySpec("interpolate", 2, eps=1.5, stab=stab))


def test_unknown_family_rejected():
    with pytest.raises(StateFormatError):
        make_state(FamilySpec("bogus", 1))


def test_json_roundtrip():
    state = make_state(FamilySpec("haar", 2, seed=11))
    text = dump_state_json(state)
    data = json.loads(text)
    assert data["n"] == 2
    assert len(data["amplitudes"]) == 4
    back = load_state_json(text)
    assert np.allclose(back.g, state.g)


def test_json_rejects_malformed():
    with pytest.raises(StateFormatError):
        load_state_json("not json")
    with pytest.raises(StateFormatError):
        load_state_json(json.dumps({"n": 2, "amplitudes": [[1.0, 0.0]]}))


def test_json_norm_tolerance():
    vec = [[0.8, 0.0], [0.0, 0.0]]  # norm 0.8, far from 1
    text = json.dumps({"n": 1, "amplitudes": vec})
    with pytest.raises(StateFormatError):
        load_state_json(text)
    fixed = load_state_json(text, renormalize=True)
    assert fixed.is_normalized(1e-12)


def test_haar_unit_is_unit():
    rng = np.random.default_rng(0)
    vec = haar_unit(4, rng)
    assert np.isclose(np.linalg.norm(vec), 1.0)
