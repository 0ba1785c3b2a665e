"""The characteristic table f(y, alpha) = |<phi| X^y Z^alpha |phi>|^2 and the
exact Bell-difference quantities derived from it.

Tables are stored as (N, N) float arrays indexed [y, alpha]; the flat view in
z = (y << n) | alpha order is used for convolutions. The i^(y.alpha) Weyl
prefactor is deliberately absent: it cancels in every squared magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import StateVector, fwht

MAX_TABLE_QUBITS = 6  # 4^6 doubles per table
NEGATIVE_TOL = 1e-12


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class CharTable:
    n: int
    f: np.ndarray  # shape (2^n, 2^n), nonnegative

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        f.setflags(write=False)
        object.__setattr__(self, "f", f)
        N = 1 << self.n
        if f.shape != (N, N):
            raise TableError(f"expected shape {(N, N)}, got {f.shape}")

    @property
    def N(self) -> int:
        return 1 << self.n

    def flat(self) -> np.ndarray:
        """Values in z = (y << n) | alpha order."""
        return self.f.reshape(-1)

    def row_sums(self) -> np.ndarray:
        """r(y) = sum_alpha f(y, alpha)."""
        return self.f.sum(axis=1)

    def mean(self) -> float:
        """(1/N) sum_z f(z); equals <phi|phi>^2 for the source state."""
        return float(self.f.sum() / self.N)


@dataclass(frozen=True)
class BellDistribution:
    n: int
    q: np.ndarray  # flat, z-ordered, sums to 1

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        if len(q) != 1 << (2 * self.n):
            raise TableError("Bell distribution has the wrong length")


def char_function(state: StateVector) -> CharTable:
    """All 4^n values via one Walsh transform per phase-derivative row."""
    if state.n > MAX_TABLE_QUBITS:
        raise TableError(f"tables capped at n = {MAX_TABLE_QUBITS}")
    g = state.g
    N = state.N
    idx = np.arange(N)
    deriv = g[None, :] * np.conj(g[idx[:, None] ^ idx[None, :]])  # [y, x]
    hat = fwht(deriv, axis=1) / N
    f = np.abs(hat) ** 2
    if f.min() < -NEGATIVE_TOL:
        raise TableError("internal consistency: negative characteristic value")
    return CharTable(state.n, np.maximum(f, 0.0))


def symplectic_fourier(t: CharTable) -> CharTable:
    """z -> (1/N) sum_z' (-1)^[z,z'] t(z'); the identity on valid tables."""
    # [(y,a),(y',a')] = <y,a'> + <a,y'>, so the symplectic transform is the
    # plain 2-axis Walsh transform with the output halves swapped.
    out = fwht(fwht(t.f, axis=0), axis=1).real.T / t.N
    return CharTable(t.n, out)


def bell_diff_distribution(t: CharTable) -> BellDistribution:
    """q = f * f with (f*g)(z) = E_w[f(w) g(z+w)] over F2^(2n)."""
    flat = t.flat()
    M = len(flat)
    hat = fwht(flat)
    q = fwht(hat * hat).real / M**2
    return BellDistribution(t.n, np.maximum(q, 0.0))


def exact_R(state: StateVector) -> float:
    """sum_z q(z) f(z), computed exactly from the tables."""
    t = char_function(state)
    q = bell_diff_distribution(t)
    return float(np.dot(q.q, t.flat()))


def char_table_csv(t: CharTable) -> str:
    lines = ["y_bits,alpha_bits,f_value"]
    for y in range(t.N):
        for a in range(t.N):
            lines.append(
                f"{format(y, f'0{t.n}b')},{format(a, f'0{t.n}b')},{float(t.f[y, a])!r}"
            )
    return "\n".join(lines) + "\n"
