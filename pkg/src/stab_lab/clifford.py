"""Weyl operators, Clifford circuits, and stabilizer-state canonical forms.

A stabilizer state is stored as an affine support A = offset + span(basis)
together with phase data in the parameter coordinates y of A: amplitude on
x(y) is i^<ell,y> * (-1)^Q(y), where Q(y) = sum_{i<=j} M_ij y_i y_j is given
by an upper-triangular bit matrix whose diagonal carries the linear sign
part. Enumeration over these forms hits each physical state exactly once.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .gf2 import Subspace, dot, symp_unpack
from .states import StateVector, sign_table

REAL_GATES = ("H", "Z", "CNOT")


class GateError(ValueError):
    pass


class BalanceError(RuntimeError):
    """Raised when rejection sampling finds no balancing circuit in budget."""

    def __init__(self, tries: int, best_moment: float):
        super().__init__(
            f"no balancing circuit found in {tries} tries "
            f"(best fourth moment {best_moment:.6g})"
        )
        self.tries = tries
        self.best_moment = best_moment


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: tuple[tuple, ...]  # ("H", i) | ("S", i) | ("Z", i) | ("CNOT", i, j)

    def __post_init__(self):
        for gate in self.gates:
            name = gate[0]
            if name not in ("H", "S", "Z", "CNOT"):
                raise GateError(f"unknown gate {name}")
            if any(q >= self.n or q < 0 for q in gate[1:]):
                raise GateError(f"gate {gate} is out of range for n={self.n}")
            if name == "CNOT" and gate[1] == gate[2]:
                raise GateError("CNOT needs distinct qubits")

    def is_real(self) -> bool:
        return all(g[0] != "S" for g in self.gates)

    def inverse(self) -> "CliffordCircuit":
        inv = []
        for gate in reversed(self.gates):
            if gate[0] == "S":
                # S^-1 = Z S
                inv.extend([("S", gate[1]), ("Z", gate[1])])
            else:
                inv.append(gate)  # H, Z, CNOT are involutions
        return CliffordCircuit(self.n, tuple(inv))


def apply_clifford(circuit: CliffordCircuit, state: StateVector) -> StateVector:
    if circuit.n != state.n:
        raise GateError("circuit and state sizes differ")
    g = np.array(state.g, dtype=complex)
    N = state.N
    idx = np.arange(N)
    for gate in circuit.gates:
        if gate[0] == "H":
            q = 1 << gate[1]
            lo = (idx & q) == 0
            a, b = g[idx[lo]], g[idx[lo] | q]
            g[idx[lo]] = (a + b) / math.sqrt(2)
            g[idx[lo] | q] = (a - b) / math.sqrt(2)
        elif gate[0] == "Z":
            q = 1 << gate[1]
            g[(idx & q) != 0] *= -1
        elif gate[0] == "S":
            q = 1 << gate[1]
            g[(idx & q) != 0] *= 1j
        else:  # CNOT control -> target, |x> -> |x ^ (x_c << t)>
            c, t = gate[1], gate[2]
            perm = idx ^ (((idx >> c) & 1) << t)
            g = g[perm]
    return StateVector(state.n, g)


def apply_weyl(state: StateVector, z: int) -> StateVector:
    """W_z |phi> with W_(y,a) = i^(y.a) X^y Z^a."""
    n, N = state.n, state.N
    if z >> (2 * n):
        raise GateError("Weyl label does not fit the state")
    y, alpha = symp_unpack(n, z)
    t = state.g * sign_table(N, alpha)
    out = t[np.arange(N) ^ y] * (1j ** ((y & alpha).bit_count()))
    return StateVector(n, out)


def weyl_expectation(state: StateVector, z: int) -> complex:
    """<phi| X^y Z^a |phi> (no quadrature prefactor)."""
    n = state.n
    y, alpha = symp_unpack(n, z)
    idx = np.arange(state.N)
    shifted = (state.g * sign_table(state.N, alpha))[idx ^ y]
    return complex(np.mean(np.conj(state.g) * shifted))


def random_real_clifford(
    n: int, depth: int | None = None, seed: int = 0
) -> CliffordCircuit:
    """Seeded random word over {H, Z, CNOT}; depth defaults to 40 n^2, long
    enough that the draw is statistically indistinguishable from uniform in
    the orthogonal 2-design test."""
    if n < 1:
        raise GateError("need at least one qubit")
    if depth is None:
        depth = 40 * n * n
    rng = np.random.default_rng(seed)
    pool: list[tuple] = [("H", i) for i in range(n)] + [("Z", i) for i in range(n)]
    pool += [("CNOT", i, j) for i in range(n) for j in range(n) if i != j]
    picks = rng.integers(0, len(pool), size=depth)
    return CliffordCircuit(n, tuple(pool[k] for k in picks))


@dataclass(frozen=True)
class StabilizerState:
    """Canonical form over affine support offset + span(basis).

    basis is the RREF basis of the direction space (decreasing order);
    parameter y_i selects basis[i]. ell holds the i-phase linear form, q_upper
    the upper-triangular (diagonal included) sign form, both over the m
    parameter bits.
    """

    n: int
    offset: int
    basis: tuple[int, ...]
    ell: int = 0
    q_upper: tuple[int, ...] = ()

    def __post_init__(self):
        m = len(self.basis)
        if len(self.q_upper) != m:
            raise ValueError("need one q_upper row per basis vector")
        for i, row in enumerate(self.q_upper):
            if row & ((1 << i) - 1):
                raise ValueError("q_upper rows must be upper triangular")

    @property
    def m(self) -> int:
        return len(self.basis)

    def point(self, y: int) -> int:
        x = self.offset
        for i, b in enumerate(self.basis):
            if (y >> i) & 1:
                x ^= b
        return x

    def sign_form(self, y: int) -> int:
        q = 0
        for i, row in enumerate(self.q_upper):
            if (y >> i) & 1:
                q ^= dot(row, y)
        return q

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "offset": format(self.offset, f"0{self.n}b"),
                "basis": [format(b, f"0{self.n}b") for b in self.basis],
                "ell": format(self.ell, f"0{max(self.m, 1)}b"),
                "Q_upper": [format(r, f"0{max(self.m, 1)}b") for r in self.q_upper],
            }
        )

    @staticmethod
    def from_json(text: str) -> "StabilizerState":
        data = json.loads(text)
        return StabilizerState(
            n=int(data["n"]),
            offset=int(data["offset"], 2),
            basis=tuple(int(b, 2) for b in data["basis"]),
            ell=int(data["ell"], 2),
            q_upper=tuple(int(r, 2) for r in data["Q_upper"]),
        )


def stabilizer_to_statevector(s: StabilizerState) -> StateVector:
    N = 1 << s.n
    g = np.zeros(N, dtype=complex)
    scale = math.sqrt(N / (1 << s.m))
    for y in range(1 << s.m):
        phase = (1j ** (dot(s.ell, y))) * (1 - 2 * s.sign_form(y))
        g[s.point(y)] = scale * phase
    return StateVector(s.n, g)


def stabilizer_from_statevector(state: StateVector, tol: float = 1e-9) -> StabilizerState:
    """Recover the canonical form of a statevector known to be a stabilizer
    state (up to global phase). Raises ValueError if the vector is not one."""
    n, N = state.n, state.N
    g = state.g
    mags = np.abs(g)
    support = [x for x in range(N) if mags[x] > tol]
    if not support:
        raise ValueError("zero vector")
    expected = math.sqrt(N / len(support))
    if not np.allclose(mags[support], expected, atol=1e-8):
        raise ValueError("support is not flat")
    direction = Subspace.from_vectors(n, (x ^ support[0] for x in support))
    aff_offset = direction.reduce(support[0])
    if len(direction) != len(support):
        raise ValueError("support is not an affine subspace")
    basis = direction.basis
    m = direction.dim

    def param_point(y: int) -> int:
        x = aff_offset
        for i, b in enumerate(basis):
            if (y >> i) & 1:
                x ^= b
        return x

    base = g[param_point(0)]

    def phase_bits(y: int) -> tuple[int, int]:
        # amp(y)/amp(0) = i^l * (-1)^d with l, d in {0, 1}
        ratio = g[param_point(y)] / base
        for l in (0, 1):
            for d in (0, 1):
                if abs(ratio - (1j**l) * (1 - 2 * d)) < 1e-6:
                    return l, d
        raise ValueError("relative phase is not a fourth root of unity")

    ell = 0
    diag = {}
    for i in range(m):
        l, d = phase_bits(1 << i)
        ell |= l << i
        diag[i] = d
    rows = [0] * m
    for i in range(m):
        rows[i] |= diag[i] << i
    for i in range(m):
        for j in range(i + 1, m):
            y = (1 << i) | (1 << j)
            l, d = phase_bits(y)
            li, lj = (ell >> i) & 1, (ell >> j) & 1
            if l != (li ^ lj):
                raise ValueError("i-phase part is not linear")
            m_ij = d ^ diag[i] ^ diag[j]
            rows[i] |= m_ij << j
    cand = StabilizerState(n, aff_offset, basis, ell, tuple(rows))
    vec = stabilizer_to_statevector(cand)
    ref = vec.inner(state)
    if abs(abs(ref) - math.sqrt(state.norm_sq())) > 1e-7:
        raise ValueError("phases are not quadratic")
    return cand


@functools.lru_cache(maxsize=None)
def enumerate_stabilizers(n: int) -> tuple[StabilizerState, ...]:
    """All physical n-qubit stabilizer states, each exactly once; count is
    2^n * prod_{k=1..n}(2^k + 1)."""
    if n > 4:
        raise ValueError("stabilizer enumeration capped at n = 4")
    from .gf2 import all_subspaces

    out = []
    for sub in all_subspaces(n):
        m = sub.dim
        offsets = sorted({sub.reduce(x) for x in range(1 << n)})
        rowmasks = [((1 << m) - 1) & ~((1 << i) - 1) for i in range(m)]
        for offset in offsets:
            for ell in range(1 << m):
                for rows in itertools.product(
                    *[[r for r in range(1 << m) if r & ~mask == 0] for mask in rowmasks]
                ):
                    out.append(StabilizerState(n, offset, sub.basis, ell, rows))
    return tuple(out)


def expected_stabilizer_count(n: int) -> int:
    count = 1 << n
    for k in range(1, n + 1):
        count *= (1 << k) + 1
    return count


@functools.lru_cache(maxsize=None)
def stabilizer_unit_matrix(n: int) -> np.ndarray:
    """Row k = unit-convention amplitudes of the k-th enumerated stabilizer."""
    states = enumerate_stabilizers(n)
    return np.array([stabilizer_to_statevector(s).unit() for s in states])


def fourth_moment(state: StateVector) -> float:
    """sum_x |<x|phi>|^4 in the unit convention."""
    return float(np.sum(np.abs(state.unit()) ** 4))


def balance(
    state: StateVector, max_tries: int = 1000, seed: int = 0
) -> tuple[CliffordCircuit, StateVector]:
    """Real Clifford C with fourth moment of C|phi> at most 3/N. Identity is
    tried first; then seeded rejection sampling over random real Cliffords."""
    if max_tries < 1:
        raise ValueError("max_tries must be positive")
    threshold = 3.0 / state.N
    identity = CliffordCircuit(state.n, ())
    best = fourth_moment(state)
    if best <= threshold:
        return identity, state
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        circuit = random_real_clifford(state.n, seed=int(rng.integers(0, 2**63)))
        cand = apply_clifford(circuit, state)
        moment = fourth_moment(cand)
        if moment <= threshold:
            return circuit, cand
        best = min(best, moment)
    raise BalanceError(max_tries, best)
