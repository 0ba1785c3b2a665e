"""Stabilizer complexity measures — Gowers-3 norm, stabilizer fidelity,
stabilizer rank — plus Gram-matrix eigenvalue machinery and the small-scale
relations experiment tying the three measures together.

All exhaustive searches run over the complete stabilizer enumeration, so
results at n <= 4 (fidelity) and n <= 2 (rank) are exact, not heuristic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .charfn import char_function
from .clifford import (
    StabilizerState,
    enumerate_stabilizers,
    stabilizer_to_statevector,
    stabilizer_unit_matrix,
)
from .states import FamilySpec, StateVector, make_state

SINGULAR_TOL = 1e-9
RANK_RESIDUAL_TOL = 1e-9
_CHUNK = 4096


class MeasureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Gowers norms


def gowers_norm_direct(state: StateVector, d: int) -> float:
    """Brute-force E_{x,y_1..y_d}[D_{y_1}...D_{y_d} g(x)], the 2^d-th power
    of the degree-d uniformity norm. Exponential loop; d=3 capped at n=4."""
    if d not in (1, 2, 3):
        raise MeasureError("only degrees 1, 2, 3 are supported")
    if d == 3 and state.n > 4:
        raise MeasureError("degree-3 brute force capped at n = 4")
    g = state.g
    N = state.N
    idx = np.arange(N)
    if d == 1:
        xy = idx[:, None] ^ idx[None, :]
        acc = np.einsum("xy,x->", g[xy], np.conj(g)) / N**2
    elif d == 2:
        x = idx[:, None, None]
        y1 = idx[None, :, None]
        y2 = idx[None, None, :]
        acc = np.einsum(
            "abc,abc,abc,abc->",
            g[x ^ y1 ^ y2],
            np.conj(g[x ^ y1]),
            np.conj(g[x ^ y2]),
            g[x],
        ) / N**3
    else:
        x = idx[:, None, None, None]
        y1 = idx[None, :, None, None]
        y2 = idx[None, None, :, None]
        y3 = idx[None, None, None, :]
        cg = np.conj(g)
        acc = (
            np.einsum(
                "abcd,abcd,abcd,abcd,abcd,abcd,abcd,abcd->",
                g[x ^ y1 ^ y2 ^ y3],
                cg[x ^ y1 ^ y2],
                cg[x ^ y1 ^ y3],
                cg[x ^ y2 ^ y3],
                g[x ^ y1],
                g[x ^ y2],
                g[x ^ y3],
                cg[x],
            )
            / N**4
        )
    if abs(acc.imag) > 1e-10:
        raise MeasureError(f"uniformity average has imaginary part {acc.imag:g}")
    return float(acc.real)


def gowers3(state: StateVector) -> float:
    """(1/N) sum_z f(z)^2 — the 8th power of the degree-3 norm, via tables."""
    t = char_function(state)
    return float(np.sum(t.f**2) / state.N)


# ---------------------------------------------------------------------------
# Fidelity and rank


def stabilizer_fidelity(state: StateVector) -> tuple[float, StabilizerState]:
    """Exact max_{s} |<s|phi>|^2 with an argmax witness, exhaustively over the
    full stabilizer enumeration (ties broken by enumeration order)."""
    if state.n > 4:
        raise MeasureError("exhaustive fidelity capped at n = 4")
    overlaps = np.abs(stabilizer_unit_matrix(state.n).conj() @ state.unit()) ** 2
    best = int(np.argmax(overlaps))
    return float(overlaps[best]), enumerate_stabilizers(state.n)[best]


def _subset_residuals(S: np.ndarray, v: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Squared least-squares distance of unit vector v to span{S[c]} for each
    index tuple c, batched."""
    A = S[combos]  # (batch, r, N)
    G = A.conj() @ A.swapaxes(1, 2)  # G_ij = <a_i, a_j>
    b = A.conj() @ v
    Ginv = np.linalg.pinv(G, rcond=1e-12, hermitian=True)
    proj = np.einsum("ki,kij,kj->k", b.conj(), Ginv, b).real
    return np.maximum(float(np.vdot(v, v).real) - proj, 0.0)


def stabilizer_rank(
    state: StateVector, delta: float = 0.0
) -> tuple[object, Optional[tuple[int, ...]]]:
    """Smallest r such that some r-subset of stabilizer states contains the
    state in its span, up to least-squares residual delta.

    Exact for n <= 2 (subsets searched in lexicographic order, first hit
    wins). For n = 3 only r <= 2 is searched; a miss returns the bound pair
    (3, 2^n) with no witness.
    """
    if delta < 0:
        raise MeasureError("delta must be nonnegative")
    n = state.n
    if n > 3:
        raise MeasureError("rank search capped at n = 3")
    tol = max(delta, RANK_RESIDUAL_TOL)
    S = stabilizer_unit_matrix(n)
    v = state.unit()
    r_cap = state.N if n <= 2 else 2
    for r in range(1, r_cap + 1):
        combos = itertools.combinations(range(len(S)), r)
        offset = 0
        while True:
            chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=int)
            if chunk.size == 0:
                break
            res = _subset_residuals(S, v, chunk)
            hits = np.flatnonzero(res <= tol**2 + RANK_RESIDUAL_TOL)
            if len(hits):
                witness = tuple(int(i) for i in chunk[hits[0]])
                return r, witness
            offset += len(chunk)
    if n <= 2:
        raise MeasureError("no spanning subset found (cannot happen: basis states span)")
    return (3, state.N), None


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass(frozen=True)
class GramMatrix:
    k: int
    entries: np.ndarray  # (k, k) complex, Hermitian, unit diagonal
    n: int
    indices: tuple[int, ...]  # enumeration indices of the source states

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if entries.shape != (self.k, self.k):
            raise MeasureError("Gram matrix shape mismatch")


def quantize_overlap(value: complex, tol: float = 1e-10) -> Optional[tuple[int, int]]:
    """Express value as i^ell * 2^(-m/2) (quarter roots of unity only).
    Returns (ell, m) or None. Zero maps to None by convention."""
    mag = abs(value)
    if mag <= tol:
        return None
    m = round(-2 * math.log2(mag))
    if m < 0 or abs(mag - 2 ** (-m / 2)) > tol:
        return None
    phase = value / mag
    for ell in range(4):
        if abs(phase - 1j**ell) <= tol:
            return ell, m
    return None


def quantize_overlap_eighth(
    value: complex, tol: float = 1e-10
) -> Optional[tuple[int, int]]:
    """Express value as e^(i pi ell / 4) * 2^(-m/2) (eighth roots of unity).
    Returns (ell, m) or None."""
    mag = abs(value)
    if mag <= tol:
        return None
    m = round(-2 * math.log2(mag))
    if m < 0 or abs(mag - 2 ** (-m / 2)) > tol:
        return None
    phase = value / mag
    for ell in range(8):
        if abs(phase - np.exp(1j * math.pi * ell / 4)) <= tol:
            return ell, m
    return None


def gram_lambda_min(
    states: Sequence[StabilizerState], indices: Optional[Sequence[int]] = None
) -> tuple[GramMatrix, float]:
    """Exact Gram matrix of the given stabilizer states and its minimum
    eigenvalue; lambda_min below 1e-9 flags a singular (dependent) family."""
    k = len(states)
    if not 1 <= k <= 8:
        raise MeasureError("Gram machinery supports 1 <= k <= 8 states")
    n = states[0].n
    vecs = np.array([stabilizer_to_statevector(s).unit() for s in states])
    entries = vecs.conj() @ vecs.T
    gram = GramMatrix(
        k, entries, n, tuple(indices) if indices is not None else tuple(range(k))
    )
    lam = float(np.linalg.eigvalsh(entries)[0])
    return gram, lam


@dataclass(frozen=True)
class ScanRow:
    k: int
    n: int
    min_lambda: float
    witness: tuple[int, ...]
    exhaustive: bool
    samples: int = 0


_EXHAUSTIVE_BUDGET = {(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)}


def lambda_star_scan(
    k_max: int,
    n_max: int,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
) -> list[ScanRow]:
    """Minimum lambda_min over nonsingular Gram matrices of k distinct
    enumerated stabilizers, per (k, n). Exhaustive mode is budget-limited to
    (k <= 3, n <= 2) and (k = 2, n <= 3); sampled mode draws seeded random
    subsets."""
    if mode not in ("exhaustive", "sampled"):
        raise MeasureError(f"unknown scan mode {mode!r}")
    rows = []
    rng = np.random.default_rng(seed)
    for n in range(1, n_max + 1):
        S = stabilizer_unit_matrix(n)
        for k in range(1, k_max + 1):
            if k == 1:
                rows.append(ScanRow(1, n, 1.0, (0,), True))
                continue
            if mode == "exhaustive":
                if (k, n) not in _EXHAUSTIVE_BUDGET:
                    raise MeasureError(
                        f"exhaustive scan budget exceeded at (k={k}, n={n}); "
                        "use sampled mode"
                    )
                combos_iter = itertools.combinations(range(len(S)), k)
                samples = 0
            else:
                picks = [
                    tuple(sorted(rng.choice(len(S), size=k, replace=False)))
                    for _ in range(trials)
                ]
                combos_iter = iter(picks)
                samples = trials
            best_val, best_wit = math.inf, None
            while True:
                chunk = np.array(list(itertools.islice(combos_iter, _CHUNK)), dtype=int)
                if chunk.size == 0:
                    break
                G = np.einsum("kin,kjn->kij", S[chunk].conj(), S[chunk])
                lams = np.linalg.eigvalsh(G)[:, 0]
                ok = lams >= SINGULAR_TOL
                if ok.any():
                    i = int(np.flatnonzero(ok)[np.argmin(lams[ok])])
                    if lams[i] < best_val - 1e-15:
                        best_val = float(lams[i])
                        best_wit = tuple(int(x) for x in chunk[i])
            rows.append(
                ScanRow(k, n, best_val, best_wit, mode == "exhaustive", samples)
            )
    return rows


# ---------------------------------------------------------------------------
# Reports and experiments


@dataclass(frozen=True)
class MeasureReport:
    n: int
    gowers3_pow8: float
    fidelity: float
    fidelity_witness: int  # enumeration index
    rank: object  # int or (lower, upper)
    rank_witness: Optional[tuple[int, ...]]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "gowers3_pow8": self.gowers3_pow8,
            "fidelity": self.fidelity,
            "fidelity_witness": self.fidelity_witness,
            "rank": list(self.rank) if isinstance(self.rank, tuple) else self.rank,
            "rank_witness": list(self.rank_witness) if self.rank_witness else None,
        }


def measure_report(state: StateVector) -> MeasureReport:
    fid, wit = stabilizer_fidelity(state)
    wit_index = enumerate_stabilizers(state.n).index(wit)
    if state.n <= 3:
        rank, rank_wit = stabilizer_rank(state)
    else:
        rank, rank_wit = (1, state.N), None
    return MeasureReport(state.n, gowers3(state), fid, wit_index, rank, rank_wit)


def counterexample_state(n: int, seed: int) -> StateVector:
    """1/2 |0> + (sqrt(3)/2) |phi> with phi a random state orthogonal to |0>:
    fidelity is at least 1/4 regardless of how complex phi is."""
    rng = np.random.default_rng(seed)
    N = 1 << n
    vec = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    vec[0] = 0.0
    vec /= np.linalg.norm(vec)
    out = 0.5 * np.eye(N, dtype=complex)[0] + (math.sqrt(3) / 2) * vec
    return StateVector.from_unit(out)


def relations_experiment(
    specs: Sequence[FamilySpec], seed: int = 0
) -> dict:
    """Per-state (rank, 1 - fidelity, 1 - gowers3) triples over an n <= 2
    corpus, the implication checks between the three measures, and the
    bounded-fidelity counterexample family."""
    rows = []
    for spec in specs:
        if spec.n > 2:
            raise MeasureError("relations corpus must stay at n <= 2")
        state = make_state(spec).normalized()
        rank, _ = stabilizer_rank(state)
        fid, _ = stabilizer_fidelity(state)
        rows.append(
            {
                "kind": spec.kind,
                "n": spec.n,
                "seed": spec.seed,
                "rank": rank,
                "one_minus_fidelity": 1.0 - fid,
                "one_minus_gowers3": 1.0 - gowers3(state),
            }
        )
    bounds = {}
    for row in rows:
        k = row["rank"]
        bounds[k] = max(bounds.get(k, 0.0), row["one_minus_fidelity"])
    checks = {
        "rank1_is_stabilizer": all(
            row["one_minus_fidelity"] <= 1e-9 and row["one_minus_gowers3"] <= 1e-9
            for row in rows
            if row["rank"] == 1
        ),
        "fidelity_gowers_together": all(
            row["one_minus_gowers3"] <= 1e-9 or row["one_minus_fidelity"] > 0
            for row in rows
        ),
        "observed_bound_by_rank": {int(k): v for k, v in sorted(bounds.items())},
    }
    counterexamples = []
    for i in range(5):
        psi = counterexample_state(2, seed + i)
        fid, _ = stabilizer_fidelity(psi)
        rank, _ = stabilizer_rank(psi)
        counterexamples.append({"seed": seed + i, "fidelity": fid, "rank": rank})
    checks["counterexample_fidelity_floor"] = all(
        c["fidelity"] >= 0.25 - 1e-9 for c in counterexamples
    )
    return {"rows": rows, "checks": checks, "counterexamples": counterexamples}


def random_low_rank_state(
    n: int, k: int, rng: np.random.Generator
) -> StateVector:
    """Random normalized combination of k distinct enumerated stabilizers."""
    S = stabilizer_unit_matrix(n)
    picks = rng.choice(len(S), size=k, replace=False)
    coeffs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    vec = coeffs @ S[picks]
    nrm = np.linalg.norm(vec)
    if nrm < 1e-9:
        return random_low_rank_state(n, k, rng)
    return StateVector.from_unit(vec / nrm)


def delta_k_probe(k: int, n: int, trials: int = 100, seed: int = 0) -> dict:
    """Minimum observed fidelity over random rank<=k combinations, reported
    next to the 2^-k reference level. Informational only — no pass/fail."""
    rng = np.random.default_rng(seed)
    worst = 1.0
    for _ in range(trials):
        state = random_low_rank_state(n, k, rng)
        fid, _ = stabilizer_fidelity(state)
        worst = min(worst, fid)
    return {"k": k, "n": n, "trials": trials, "min_fidelity": worst, "ref": 2.0**-k}
