"""Constructive stabilizer-witness extraction.

Given a state whose degree-3 uniformity norm is large, produce an explicit
stabilizer state with provable overlap. The pipeline: take the dominant real
part, flatten amplitudes with a real Clifford, read off an approximately
linear structure in the characteristic table, round it to a symmetric
zero-diagonal linear map, and lift that map to a full-support quadratic-phase
stabilizer. Each rounding stage carries a runtime-checked inequality, so a
successful run certifies its own overlap bound.

The approximately-linear structure is found by direct exhaustive search over
affine maps (feasible at n <= 4) rather than by additive-combinatorics
covering arguments, whose constants are vacuous at this scale; the exhaustive
optimum is at least as good as any covered map, so downstream bounds apply
unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .charfn import CharTable, char_function
from .clifford import (
    CliffordCircuit,
    StabilizerState,
    apply_clifford,
    balance,
    stabilizer_from_statevector,
)
from .gf2 import (
    COVER_CONSTANT,
    COVER_EXPONENT,
    AffineMap,
    LinMap,
    linmap_from_images,
    nullspace,
)
from .measures import gowers3
from .states import StateVector, dot_parity, walsh_hadamard

CONTRACT_TOL = 1e-9
EXHAUSTIVE_MAX_N = 4
HILL_CLIMB_RESTARTS = 64


class PipelineError(RuntimeError):
    """An inequality the construction guarantees failed at runtime."""


# ---------------------------------------------------------------------------
# Real-part split


def split_real(state: StateVector) -> tuple[StateVector, float, str]:
    """Pick whichever of Re(g), Im(g) has the larger uniformity norm; return
    it renormalized together with its mass nu = E|part|^2 and a tag."""
    g = state.g
    parts = {"real": np.real(g), "imaginary": np.imag(g)}
    scored = {}
    for which, part in parts.items():
        nu = float(np.mean(part**2))
        if nu == 0.0:
            scored[which] = (-1.0, nu, part)
            continue
        cand = StateVector(state.n, part / math.sqrt(nu))
        scored[which] = (gowers3(cand) * nu**4, nu, part)
    which = max(scored, key=lambda k: scored[k][0])
    score, nu, part = scored[which]
    if score < 0:
        raise PipelineError("state has no real or imaginary mass")
    return StateVector(state.n, part.astype(complex) / math.sqrt(nu)), nu, which


# ---------------------------------------------------------------------------
# Randomized linearity probe


@dataclass(frozen=True)
class ZetaSample:
    n: int
    zeta: tuple[int, ...]  # zeta[y] in F2^n
    delta: float
    L_value: float  # exact pair probability, not an estimate


def sample_zeta(t: CharTable, delta: float, seed: int = 0) -> ZetaSample:
    """Draw zeta(y) = alpha with probability f(y, alpha)/r(y) independently
    per y (zeta(y) = 0 where the row vanishes), then evaluate exactly

        L = P_{y1,y2}[ all three of f(y_i, zeta(y_i)) >= delta and
                       zeta(y1) + zeta(y2) = zeta(y1 + y2) ].

    Requires a balanced table (row sums <= 3): the draw is only a probability
    distribution row-wise because balancing caps the row mass."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    rows = t.row_sums()
    if rows.max() > 3 + 1e-9:
        raise PipelineError(
            f"table is unbalanced (max row sum {rows.max():.6g} > 3); "
            "apply a balancing Clifford first"
        )
    rng = np.random.default_rng(seed)
    N = t.N
    zeta = np.zeros(N, dtype=int)
    for y in range(N):
        if rows[y] > 0:
            zeta[y] = rng.choice(N, p=t.f[y] / rows[y])
    good = t.f[np.arange(N), zeta] >= delta
    y1 = np.arange(N)[:, None]
    y2 = np.arange(N)[None, :]
    y12 = y1 ^ y2
    linear = (zeta[y1] ^ zeta[y2]) == zeta[y12]
    events = good[y1] & good[y2] & good[y12] & linear
    return ZetaSample(t.n, tuple(int(z) for z in zeta), delta, float(events.mean()))


# ---------------------------------------------------------------------------
# Graph sums and the map-rounding stages


def graph_sum(t: CharTable, mapping) -> float:
    """sum_y t(y, mapping(y)) for an AffineMap or LinMap."""
    images = np.array([mapping(y) for y in range(t.N)])
    return float(t.f[np.arange(t.N), images].sum())


def _linear_images(n: int, cols_array: np.ndarray) -> np.ndarray:
    """images[m, y] for a batch of column stacks cols_array (batch, n)."""
    N = 1 << n
    out = np.zeros((len(cols_array), N), dtype=int)
    for y in range(1, N):
        acc = np.zeros(len(cols_array), dtype=int)
        for j in range(n):
            if (y >> j) & 1:
                acc ^= cols_array[:, j]
        out[:, y] = acc
    return out


def best_affine_map(t: CharTable) -> tuple[AffineMap, float]:
    """Maximize sum_{y} t(y, l(y) + c) over all affine maps (l, c).

    Exhaustive over all 2^(n^2 + n) candidates for n <= 4; seeded hill climb
    with restarts for n in {5, 6} (a local optimum, flagged by the caller via
    map_search_exhaustive). First optimum in lexicographic (columns, shift)
    order wins ties."""
    n, N = t.n, t.N
    if n <= EXHAUSTIVE_MAX_N:
        best_val = -1.0
        best_idx = None
        n_maps = 1 << (n * n)
        chunk = 1 << 12
        shifts = np.arange(N)
        for start in range(0, n_maps, chunk):
            ms = np.arange(start, min(start + chunk, n_maps))
            cols = np.stack(
                [(ms >> ((n - 1 - j) * n)) & (N - 1) for j in range(n)], axis=1
            )
            images = _linear_images(n, cols)  # (batch, N)
            gathered = t.f[
                np.arange(N)[None, :, None],
                images[:, :, None] ^ shifts[None, None, :],
            ]
            vals = gathered.sum(axis=1)  # (batch, N_shifts)
            local = int(np.argmax(vals))
            local_val = float(vals.flat[local])
            if local_val > best_val:
                best_val = local_val
                best_idx = (int(ms[local // N]), int(local % N))
        m, shift = best_idx
        cols = tuple(int((m >> ((n - 1 - j) * n)) & (N - 1)) for j in range(n))
        return AffineMap(LinMap(n, cols), shift), best_val
    return _hill_climb_affine(t)


def _hill_climb_affine(t: CharTable) -> tuple[AffineMap, float]:
    n, N = t.n, t.N
    rng = np.random.default_rng(0)
    yidx = np.arange(N)

    def value(cols: list[int], shift: int) -> float:
        images = np.zeros(N, dtype=int)
        for j in range(n):
            images[yidx & (1 << j) != 0] ^= cols[j]
        return float(t.f[yidx, images ^ shift].sum())

    best_cols, best_shift = [0] * n, 0
    best_val = value(best_cols, best_shift)
    for restart in range(HILL_CLIMB_RESTARTS):
        if restart == 0:
            cols, shift = [0] * n, 0
        else:
            cols = [int(c) for c in rng.integers(0, N, size=n)]
            shift = int(rng.integers(0, N))
        val = value(cols, shift)
        improved = True
        while improved:
            improved = False
            for j in range(n):
                for b in range(n):
                    cand = list(cols)
                    cand[j] ^= 1 << b
                    v = value(cand, shift)
                    if v > val + 1e-12:
                        cols, val, improved = cand, v, True
            for b in range(n):
                v = value(cols, shift ^ (1 << b))
                if v > val + 1e-12:
                    shift, val, improved = shift ^ (1 << b), v, True
        if val > best_val + 1e-12:
            best_cols, best_shift, best_val = cols, shift, val
    return AffineMap(LinMap(n, tuple(best_cols)), best_shift), best_val


def drop_shift(amap: AffineMap, t: CharTable) -> tuple[LinMap, float]:
    """Discard the affine shift; the purely linear graph always collects at
    least as much mass (checked)."""
    l0 = amap.linear
    before = graph_sum(t, amap)
    after = graph_sum(t, l0)
    if after < before - CONTRACT_TOL:
        raise PipelineError(
            f"shift removal lost mass: {after:.12g} < {before:.12g}"
        )
    return l0, after


def symmetrize_map(l: LinMap, t: CharTable) -> tuple[LinMap, float]:
    """Symmetric map agreeing with l on Y = ker(l + l^T); off the kernel the
    completion is free, so for small n we pick the symmetric completion with
    the heaviest graph (zero completion otherwise).  The graph mass obeys the
    quadratic law sum_{G(l')} t >= (sum_{G(l)} t)^2 / N (checked)."""
    n = l.n
    Y = nullspace(n, (l.add(l.transpose())).transpose().cols)
    # A vector u is in ker(l + l^t) iff <(l + l^t)^t_j, u> = 0 for every
    # row j; rows of (l+l^t) are the columns of its transpose.
    p_basis = list(Y.basis) + list(Y.complement_basis())
    k = Y.dim
    # Bilinear form in the p-basis: beta(p_a, p_b) = <p_a, l p_b> when p_b
    # lies in Y (symmetric there since Y kills l + l^t), mirrored for p_a in
    # Y, zero on complement x complement.
    B = np.zeros((n, n), dtype=int)
    for a in range(n):
        for b in range(n):
            if b < k:
                B[a, b] = (p_basis[a] & l(p_basis[b])).bit_count() & 1
            elif a < k:
                B[a, b] = (p_basis[b] & l(p_basis[a])).bit_count() & 1
    b_cols = tuple(int(sum((B[a, b] << a) for a in range(n))) for b in range(n))
    b_map = LinMap(n, b_cols)
    p_inv = linmap_from_images(n, [(p, 1 << a) for a, p in enumerate(p_basis)])
    lp = p_inv.transpose().compose(b_map.compose(p_inv))
    if not lp.is_symmetric():
        raise PipelineError("symmetrization produced a non-symmetric map")
    for y in Y:
        if lp(y) != l(y):
            raise PipelineError("symmetrization moved the kernel graph")
    if n <= EXHAUSTIVE_MAX_N:
        # The completion off the kernel is a free choice; scan every
        # symmetric map that agrees with l on Y and keep the heaviest graph
        # (first maximum in column-lexicographic order, so deterministic).
        best_val = graph_sum(t, lp)
        pairs = [(i, j) for j in range(n) for i in range(j + 1)]
        for mask in range(1 << len(pairs)):
            cols = [0] * n
            for bit, (i, j) in enumerate(pairs):
                if (mask >> bit) & 1:
                    cols[j] |= 1 << i
                    if i != j:
                        cols[i] |= 1 << j
            cand = LinMap(n, tuple(cols))
            if any(cand(y) != l(y) for y in Y.basis):
                continue
            val = graph_sum(t, cand)
            if val > best_val + CONTRACT_TOL or (
                abs(val - best_val) <= CONTRACT_TOL and cand.cols < lp.cols
            ):
                lp, best_val = cand, val
    before = graph_sum(t, l)
    after = graph_sum(t, lp)
    if after < before**2 / t.N - CONTRACT_TOL:
        raise PipelineError(
            f"quadratic law failed: {after:.12g} < {before:.12g}^2/{t.N}"
        )
    return lp, after


def zero_diagonal_map(l: LinMap, t: CharTable) -> tuple[LinMap, float]:
    """Cancel the diagonal with the rank-one correction l + v<v,.>, v =
    diag(l); for real-state tables the graph mass never drops (checked)."""
    if not l.is_symmetric():
        raise PipelineError("zero-diagonal step needs a symmetric map")
    v = l.diagonal()
    lz = l.add(LinMap.rank_one(l.n, v, v))
    if lz.diagonal() != 0:
        raise PipelineError("diagonal did not cancel")
    before = graph_sum(t, l)
    after = graph_sum(t, lz)
    if after < before - CONTRACT_TOL:
        raise PipelineError(
            f"zero-diagonal step lost mass: {after:.12g} < {before:.12g}"
        )
    return lz, after


# ---------------------------------------------------------------------------
# Quadratic phase extraction


@dataclass(frozen=True)
class QuadraticPoly:
    """q(x) = sum_{i<j} M_ij x_i x_j + <alpha, x> over F2, M strict upper."""

    n: int
    upper_rows: tuple[int, ...]  # row i holds bits j > i
    alpha: int = 0

    def __post_init__(self):
        for i, row in enumerate(self.upper_rows):
            if row & ((1 << (i + 1)) - 1):
                raise ValueError("rows must be strictly upper triangular")

    def values(self) -> np.ndarray:
        """q(x) for all x, as a 0/1 array."""
        N = 1 << self.n
        x = np.arange(N)
        q = dot_parity(x, self.alpha)
        for i, row in enumerate(self.upper_rows):
            q ^= ((x >> i) & 1) & dot_parity(x, row)
        return q

    def signs(self) -> np.ndarray:
        return 1 - 2 * self.values()


def _strict_upper_rows(l: LinMap) -> tuple[int, ...]:
    mask = [~((1 << (i + 1)) - 1) for i in range(l.n)]
    return tuple(
        int(l.transpose().cols[i] & mask[i]) for i in range(l.n)
    )


def extract_quadratic(
    g: np.ndarray, l: LinMap
) -> tuple[QuadraticPoly, float, int]:
    """Best linear correction to the quadratic phase of a symmetric
    zero-diagonal map: with H(x) = (-1)^{sum_{i<j} l_ij x_i x_j}, pick alpha
    maximizing |E[g H (-1)^{<alpha, x>}]|. Returns the full polynomial, the
    achieved correlation, and alpha.

    The choice is certified by the exact fourth-moment identity
    sum_alpha (Hg-hat)(alpha)^4 = (1/N) sum_y f(y, l(y)) and the resulting
    floor correlation^2 >= that sum / E[g^2] (both checked)."""
    if not l.is_symmetric() or l.diagonal() != 0:
        raise PipelineError("quadratic extraction needs symmetric zero diagonal")
    g = np.asarray(g)
    if np.iscomplexobj(g) and np.abs(g.imag).max() > 1e-12:
        raise PipelineError("quadratic extraction needs a real function")
    g = g.real.astype(float)
    rows = _strict_upper_rows(l)
    base = QuadraticPoly(l.n, rows, 0)
    Hg = g * base.signs()
    hat = walsh_hadamard(Hg).real
    alpha = int(np.argmax(np.abs(hat)))
    corr = float(abs(hat[alpha]))

    # Certification against the characteristic table of g.
    t = char_function(StateVector(l.n, g.astype(complex)))
    graph_mass = graph_sum(t, l) / t.N
    fourth = float(np.sum(hat**4))
    if abs(fourth - graph_mass) > 1e-9:
        raise PipelineError(
            f"fourth-moment identity failed: {fourth:.12g} != {graph_mass:.12g}"
        )
    energy = float(np.mean(g**2))
    if corr**2 < graph_mass / energy - CONTRACT_TOL:
        raise PipelineError("correlation floor failed")
    return QuadraticPoly(l.n, rows, alpha), corr, alpha


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class PipelineTrace:
    n: int
    gamma: float  # gowers3 of the input
    nu: float
    which_part: str
    balance_circuit: CliffordCircuit
    stage_values: dict  # affine -> linear -> symmetric -> zero_diagonal
    map_search_exhaustive: bool
    q_poly: QuadraticPoly
    correlation: float
    final_overlap: float
    # Documentation only: the worst-case guarantee gamma^C2 / C1 from the
    # covering-argument constants, recorded as log10 since it underflows.
    theoretical_floor_log10: float = field(default=0.0)


def _theoretical_floor_log10(gamma: float) -> float:
    if gamma <= 0:
        return -math.inf
    c2 = 4 * COVER_EXPONENT + 6
    log_c1 = (
        math.log10(6)
        + 2 * math.log10(COVER_CONSTANT)
        + (2 * COVER_EXPONENT + 2) * math.log10(54)
        + (32 * COVER_EXPONENT + 48) * math.log10(2)
    )
    return c2 * math.log10(gamma) - log_c1


def extract_stabilizer(
    state: StateVector, seed: int = 0
) -> tuple[StabilizerState, float, PipelineTrace]:
    """Run the full extraction pipeline and return the stabilizer witness,
    its squared overlap with the input, and the per-stage trace."""
    if not state.is_normalized(1e-9):
        raise ValueError("input must be normalized")
    if state.n > 6:
        raise ValueError("pipeline capped at n = 6")
    gamma = gowers3(state)
    tilde, nu, which = split_real(state)
    circuit, balanced = balance(tilde, seed=seed)
    t = char_function(balanced)
    amap, val_affine = best_affine_map(t)
    l0, val_linear = drop_shift(amap, t)
    ls, val_sym = symmetrize_map(l0, t)
    lz, val_zd = zero_diagonal_map(ls, t)
    qpoly, corr, _alpha = extract_quadratic(balanced.g, lz)

    s_prime = StateVector(state.n, qpoly.signs().astype(complex))
    s_vec = apply_clifford(circuit.inverse(), s_prime)
    witness = stabilizer_from_statevector(s_vec)
    overlap = s_vec.overlap_sq(state)
    floor = nu * corr**2
    if overlap < floor - 1e-9:
        raise PipelineError(
            f"overlap {overlap:.12g} fell below its floor {floor:.12g}"
        )
    trace = PipelineTrace(
        n=state.n,
        gamma=gamma,
        nu=nu,
        which_part=which,
        balance_circuit=circuit,
        stage_values={
            "affine": val_affine,
            "linear": val_linear,
            "symmetric": val_sym,
            "zero_diagonal": val_zd,
        },
        map_search_exhaustive=state.n <= EXHAUSTIVE_MAX_N,
        q_poly=qpoly,
        correlation=corr,
        final_overlap=overlap,
        theoretical_floor_log10=_theoretical_floor_log10(gamma),
    )
    return witness, overlap, trace
