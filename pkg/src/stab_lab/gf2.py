"""Exact linear algebra over F2 using int bitsets.

Vectors in F2^n are Python ints with bit i holding coordinate i. Points of
the symplectic space F2^(2n) are packed as z = (y << n) | alpha. All
operations are pure functions on immutable values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

# Covering-argument constants: a set with additive energy >= eps has a large
# intersection with an affine subspace, with quality eps^COVER_EXPONENT /
# COVER_CONSTANT. Vacuous as runtime thresholds at desk scale; kept as named
# documentation values only.
COVER_EXPONENT = 73
COVER_CONSTANT = 3 * 6**72

MAX_DIM = 64  # one machine word worth of coordinates


class DimensionMismatchError(ValueError):
    pass


def dot(x: int, y: int) -> int:
    """Standard inner product <x, y> over F2."""
    return (x & y).bit_count() & 1


def symp_pack(n: int, y: int, alpha: int) -> int:
    return (y << n) | alpha


def symp_unpack(n: int, z: int) -> tuple[int, int]:
    return z >> n, z & ((1 << n) - 1)


def symp_swap(n: int, z: int) -> int:
    """Swap the (y, alpha) halves of a symplectic point."""
    y, alpha = symp_unpack(n, z)
    return (alpha << n) | y


def symplectic_form(n: int, z1: int, z2: int) -> int:
    """[(y1,a1),(y2,a2)] = <y1,a2> + <y2,a1> over F2."""
    if max(z1, z2) >> (2 * n):
        raise DimensionMismatchError(f"point does not fit in F2^{2*n}")
    return dot(z1, symp_swap(n, z2))


def _rref(vectors: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis, pivots at the highest set bits, rows sorted
    in decreasing integer order."""
    rows: list[int] = []
    for v in vectors:
        for r in rows:
            v = min(v, v ^ r)
        if v:
            rows.append(v)
            rows.sort(reverse=True)
            # re-reduce to keep the basis fully reduced
            for i in range(len(rows)):
                for j in range(len(rows)):
                    if i != j and rows[j] and (rows[i] ^ rows[j]) < rows[i]:
                        rows[i] ^= rows[j]
            rows = sorted((r for r in rows if r), reverse=True)
    return tuple(rows)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of F2^ambient_dim with a canonical RREF basis."""

    ambient_dim: int
    basis: tuple[int, ...] = ()

    @staticmethod
    def from_vectors(ambient_dim: int, vectors: Iterable[int]) -> "Subspace":
        if ambient_dim > MAX_DIM:
            raise DimensionMismatchError(f"dimension {ambient_dim} exceeds {MAX_DIM}")
        return Subspace(ambient_dim, _rref(vectors))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return 1 << self.dim

    def reduce(self, v: int) -> int:
        """Canonical coset representative of v (lexicographically smallest)."""
        for r in self.basis:
            v = min(v, v ^ r)
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __iter__(self) -> Iterator[int]:
        for picks in itertools.product((0, 1), repeat=self.dim):
            acc = 0
            for bit, b in zip(picks, self.basis):
                if bit:
                    acc ^= b
            yield acc

    def complement_basis(self) -> tuple[int, ...]:
        """Vectors extending the basis to all of F2^ambient_dim."""
        out: list[int] = []
        rows = list(self.basis)
        for i in range(self.ambient_dim):
            cand = 1 << i
            red = cand
            for r in rows:
                red = min(red, red ^ r)
            if red:
                rows = list(_rref(rows + [cand]))
                out.append(cand)
        return tuple(out)


@dataclass(frozen=True)
class AffineSubspace:
    """Coset offset + direction, with the offset canonicalized so structural
    equality is set equality."""

    offset: int
    direction: Subspace

    def __post_init__(self):
        object.__setattr__(self, "offset", self.direction.reduce(self.offset))

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    def __len__(self) -> int:
        return len(self.direction)

    def contains(self, v: int) -> bool:
        return self.direction.contains(v ^ self.offset)

    def __iter__(self) -> Iterator[int]:
        for d in self.direction:
            yield d ^ self.offset


@dataclass(frozen=True)
class LinMap:
    """Linear map F2^n -> F2^n stored as column images (cols[j] = image of e_j)."""

    n: int
    cols: tuple[int, ...]

    def __post_init__(self):
        if len(self.cols) != self.n:
            raise DimensionMismatchError("need one column per coordinate")

    @staticmethod
    def zero(n: int) -> "LinMap":
        return LinMap(n, (0,) * n)

    @staticmethod
    def identity(n: int) -> "LinMap":
        return LinMap(n, tuple(1 << j for j in range(n)))

    def __call__(self, y: int) -> int:
        acc = 0
        while y:
            j = (y & -y).bit_length() - 1
            acc ^= self.cols[j]
            y &= y - 1
        return acc

    def transpose(self) -> "LinMap":
        cols = tuple(
            sum(((self.cols[i] >> j) & 1) << i for i in range(self.n))
            for j in range(self.n)
        )
        return LinMap(self.n, cols)

    def is_symmetric(self) -> bool:
        return self.cols == self.transpose().cols

    def diagonal(self) -> int:
        return sum(((self.cols[i] >> i) & 1) << i for i in range(self.n))

    def add(self, other: "LinMap") -> "LinMap":
        return LinMap(self.n, tuple(a ^ b for a, b in zip(self.cols, other.cols)))

    def compose(self, other: "LinMap") -> "LinMap":
        """self after other: x -> self(other(x))."""
        return LinMap(self.n, tuple(self(c) for c in other.cols))

    @staticmethod
    def rank_one(n: int, u: int, v: int) -> "LinMap":
        """The map x -> u * <v, x>."""
        return LinMap(n, tuple(u if (v >> j) & 1 else 0 for j in range(n)))

    def encoding(self) -> tuple[int, ...]:
        return self.cols


@dataclass(frozen=True)
class AffineMap:
    """y -> linear(y) + shift."""

    linear: LinMap
    shift: int = 0

    @property
    def n(self) -> int:
        return self.linear.n

    def __call__(self, y: int) -> int:
        return self.linear(y) ^ self.shift

    def graph(self) -> list[int]:
        """All packed points (y, map(y)); always 2^n of them."""
        n = self.n
        return [symp_pack(n, y, self(y)) for y in range(1 << n)]


def linmap_from_images(n: int, pairs: Sequence[tuple[int, int]]) -> LinMap:
    """Linear map sending each (v, w) pair v -> w; inputs must be independent
    and are completed by sending a complement basis to 0."""
    span = Subspace.from_vectors(n, (v for v, _ in pairs))
    if span.dim != len(pairs):
        raise ValueError("input vectors are not independent")
    full_pairs = list(pairs) + [(c, 0) for c in span.complement_basis()]
    cols = []
    for j in range(n):
        image = _solve_in_span(full_pairs, 1 << j)
        if image is None:
            raise ValueError("inputs do not span F2^n after completion")
        cols.append(image)
    return LinMap(n, tuple(cols))


def _solve_in_span(pairs: list[tuple[int, int]], target: int) -> int | None:
    """XOR-combination of pair outputs whose inputs sum to target, or None."""
    # triangularize copies
    work = sorted(pairs, key=lambda p: -p[0])
    basis: list[tuple[int, int]] = []
    for v, w in work:
        for bv, bw in basis:
            if v ^ bv < v:
                v, w = v ^ bv, w ^ bw
        if v:
            basis.append((v, w))
            basis.sort(key=lambda p: -p[0])
    out = 0
    for bv, bw in basis:
        if target ^ bv < target:
            target ^= bv
            out ^= bw
    return out if target == 0 else None


def phase_sum(S: Subspace, zp: int) -> int:
    """Sum over z in S of (-1)^[z, zp]; equals |S| on the symplectic
    complement of S and 0 elsewhere."""
    if S.ambient_dim % 2:
        raise DimensionMismatchError("symplectic space must have even dimension")
    n = S.ambient_dim // 2
    if zp >> S.ambient_dim:
        raise DimensionMismatchError("point does not fit the ambient space")
    return sum(1 - 2 * symplectic_form(n, z, zp) for z in S)


def perp(S: Subspace) -> Subspace:
    """Symplectic complement {z : [z, z'] = 0 for all z' in S}."""
    if S.ambient_dim % 2:
        raise DimensionMismatchError("symplectic space must have even dimension")
    n = S.ambient_dim // 2
    constraints = [symp_swap(n, b) for b in S.basis]
    return nullspace(S.ambient_dim, constraints)


def nullspace(ambient_dim: int, constraints: Sequence[int]) -> Subspace:
    """{z : <z, c> = 0 for every constraint c}."""
    rows = list(_rref(constraints))
    pivots = [r.bit_length() - 1 for r in rows]
    free = [i for i in range(ambient_dim) if i not in pivots]
    basis = []
    for fidx in free:
        v = 1 << fidx
        for r, p in zip(rows, pivots):
            if dot(v, r):
                v |= 1 << p
        # v now satisfies all RREF constraints: check and collect
        basis.append(v)
    # Fix-up: RREF rows may interact; correct by direct solve per pivot.
    fixed = []
    for v in basis:
        for r, p in zip(rows, pivots):
            if dot(v, r):
                v ^= 1 << p
        assert all(dot(v, r) == 0 for r in rows)
        fixed.append(v)
    return Subspace.from_vectors(ambient_dim, fixed)


def cover_affine_map(
    n: int, S: Iterable[int], V: AffineSubspace
) -> tuple[AffineMap, int]:
    """Affine map l: F2^n -> F2^n whose graph covers at least
    |S inter V| * |U| / |V| points of S, where U is the projection of V onto
    the first half of the coordinates.

    Builds a base map L with (u, L(u)) in V for all u in U, then picks the
    best coset translate of its graph by exhaustive scoring. Ties among
    equally-scoring translates break toward the lexicographically smallest
    resulting shift.
    """
    if V.ambient_dim != 2 * n:
        raise DimensionMismatchError("V must live in F2^(2n)")
    points = list(S)

    u0 = V.offset >> n
    U0 = Subspace.from_vectors(n, (b >> n for b in V.direction.basis))

    def smallest_partner(u: int) -> int:
        for a in range(1 << n):
            if V.contains(symp_pack(n, u, a)):
                return a
        raise ValueError("projection point has no partner in V")

    u0p = smallest_partner(u0)
    pairs = []
    for ui in U0.basis:
        uip = smallest_partner(u0 ^ ui)
        pairs.append((ui, uip ^ u0p))
    M = (
        linmap_from_images(n, pairs)
        if pairs
        else LinMap.zero(n)
    )
    base_shift = u0p ^ M(u0)

    # Translating the graph of y -> M(y) + b only changes the shift, so score
    # every achievable shift at once: point (y, a) lies on the graph with
    # shift c exactly when c = a + M(y).
    counts: dict[int, int] = {}
    for z in points:
        y, a = symp_unpack(n, z)
        c = a ^ M(y)
        counts[c] = counts.get(c, 0) + 1
    if counts:
        best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
        shift, count = best[0], best[1]
    else:
        shift, count = base_shift, 0
    return AffineMap(M, shift), count


def doubling_stats(n: int, S: Iterable[int]) -> tuple[float, float]:
    """(additive energy, sumset ratio) of a finite set in F2^(2n):
    energy = Pr_{z1,z2 in S}[z1+z2 in S], ratio = |S+S| / |S|."""
    points = list(dict.fromkeys(S))
    if not points:
        raise ValueError("S must be nonempty")
    pset = set(points)
    hits = sum(1 for z1 in points for z2 in points if z1 ^ z2 in pset)
    energy = hits / len(points) ** 2
    sumset = {z1 ^ z2 for z1 in points for z2 in points}
    return energy, len(sumset) / len(points)


def all_subspaces(n: int) -> list[Subspace]:
    """Every linear subspace of F2^n (desk scale: n <= 4)."""
    if n > 4:
        raise ValueError("subspace enumeration capped at n = 4")
    seen: set[tuple[int, ...]] = set()
    out = [Subspace(n, ())]
    seen.add(())
    nonzero = list(range(1, 1 << n))
    for m in range(1, n + 1):
        for combo in itertools.combinations(nonzero, m):
            sub = Subspace.from_vectors(n, combo)
            if sub.dim == m and sub.basis not in seen:
                seen.add(sub.basis)
                out.append(sub)
    return out
