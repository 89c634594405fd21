"""The cut functor from the simplex category to Fin_*, and simplicial sets built from it.

``beta`` turns an order-preserving map [m] -> [n] into a pointed map
<n> -> <m>. Precomposing an F_1-module with it gives a pointed simplicial
set; :func:`two_segal_check` tests the 2-Segal pullback squares of such a
set at finite level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from . import finstar as fs
from .f1mod import TabulatedModule
from .nerve import nerve_level
from .plasma import Plasma, check_properties, krasner

__all__ = [
    "DeltaMap",
    "coface",
    "codegeneracy",
    "beta",
    "beta_face",
    "beta_degen",
    "beta_table",
    "TruncatedSimplicialSet",
    "underlying_simplicial",
    "partial_monoid_classifying",
    "SquareResult",
    "TwoSegalReport",
    "two_segal_check",
    "span_pullback",
    "span_pullback_count",
    "horn_fillers",
]


@dataclass(frozen=True)
class DeltaMap:
    """A weakly increasing map [m] -> [n]."""

    m: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.m + 1:
            raise ValueError(f"a map out of [{self.m}] needs {self.m + 1} values")
        if any(not 0 <= v <= self.n for v in vals):
            raise ValueError(f"values must lie in [{self.n}]")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError("simplex maps must be order preserving")

    def __call__(self, j: int) -> int:
        return self.values[j]

    def after(self, f: DeltaMap) -> DeltaMap:
        if f.n != self.m:
            raise ValueError("maps do not compose")
        return DeltaMap(f.m, self.n, tuple(self.values[v] for v in f.values))


def coface(n: int, k: int) -> DeltaMap:
    """[n-1] -> [n] missing k."""
    if not (n >= 1 and 0 <= k <= n):
        raise ValueError(f"no coface delta_{k}^{n}")
    return DeltaMap(n - 1, n, tuple(j if j < k else j + 1 for j in range(n)))


def codegeneracy(n: int, k: int) -> DeltaMap:
    """[n+1] -> [n] sending k and k+1 to k."""
    if not (n >= 0 and 0 <= k <= n):
        raise ValueError(f"no codegeneracy sigma_{k}^{n}")
    return DeltaMap(n + 1, n, tuple(j if j <= k else j - 1 for j in range(n + 2)))


def all_delta_maps(m: int, n: int) -> list[DeltaMap]:
    return [DeltaMap(m, n, c) for c in itertools.combinations_with_replacement(range(n + 1), m + 1)]


def beta(phi: DeltaMap) -> fs.PointedMap:
    """<n> -> <m>: i goes to the least j with phi(j) >= i, or to 0 when that j is 0 or absent."""
    image = [0]
    for i in range(1, phi.n + 1):
        K = [j for j in range(phi.m + 1) if phi(j) >= i]
        image.append(K[0] if K and K[0] != 0 else 0)
    return fs.PointedMap(phi.n, phi.m, tuple(image))


def beta_face(n: int, k: int) -> fs.PointedMap:
    """Closed form of beta(coface(n, k)): <n> -> <n-1>."""
    if not (n >= 1 and 0 <= k <= n):
        raise ValueError(f"no face d_{k} on level {n}")
    if k == n:
        return fs.PointedMap(n, n - 1, tuple(i if i != n else 0 for i in range(n + 1)))
    return fs.PointedMap(n, n - 1, tuple(i if i <= k else i - 1 for i in range(n + 1)))


def beta_degen(n: int, k: int) -> fs.PointedMap:
    """Closed form of beta of [n] -> [n-1] collapsing k, k+1: <n-1> -> <n>, skipping k+1."""
    if not (n >= 1 and 0 <= k <= n - 1):
        raise ValueError(f"no degeneracy collapsing {k},{k + 1} out of [{n}]")
    return fs.PointedMap(n - 1, n, tuple(i if i <= k else i + 1 for i in range(n)))


def beta_table(n: int) -> list[tuple[str, DeltaMap, fs.PointedMap]]:
    """Rows (name, simplex map, its image) for every coface and codegeneracy into [n] or below."""
    rows = []
    for t in range(1, n + 1):
        for k in range(t + 1):
            d = coface(t, k)
            rows.append((f"delta_{k}^{t}", d, beta(d)))
        for k in range(t):
            s = codegeneracy(t - 1, k)
            rows.append((f"sigma_{k}^{t}", s, beta(s)))
    return rows


class TruncatedSimplicialSet:
    """Levels 0..N with face maps ``faces[n][i]: X_n -> X_{n-1}`` and
    degeneracies ``degens[n][i]: X_n -> X_{n+1}``, all as index arrays."""

    def __init__(self, elements, faces, degens, labels=None, name: str = ""):
        self.elements = tuple(tuple(level) for level in elements)
        self.N = len(self.elements) - 1
        self.faces = tuple(tuple(np.asarray(f, dtype=np.int64) for f in row) for row in faces)
        self.degens = tuple(tuple(np.asarray(s, dtype=np.int64) for s in row) for row in degens)
        if labels is None:
            labels = [[str(x) for x in level] for level in self.elements]
        self.labels = tuple(tuple(level) for level in labels)
        self.name = name
        for n in range(self.N + 1):
            if len(self.faces[n]) != (n + 1 if n else 0):
                raise ValueError(f"level {n} needs {n + 1 if n else 0} face maps")
            want = n + 1 if n < self.N else 0
            if len(self.degens[n]) != want:
                raise ValueError(f"level {n} needs {want} degeneracies")
            for f in self.faces[n]:
                if f.shape != (self.size(n),) or (f.size and not (0 <= f.min() and f.max() < self.size(n - 1))):
                    raise ValueError(f"a face map on level {n} has the wrong shape or range")
            for f in self.degens[n]:
                if f.shape != (self.size(n),) or (f.size and not (0 <= f.min() and f.max() < self.size(n + 1))):
                    raise ValueError(f"a degeneracy on level {n} has the wrong shape or range")

    def size(self, n: int) -> int:
        return len(self.elements[n])

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.elements)

    def d(self, n: int, i: int) -> np.ndarray:
        return self.faces[n][i]

    def s(self, n: int, i: int) -> np.ndarray:
        return self.degens[n][i]

    def check_identities(self) -> tuple[bool, str | None]:
        """All simplicial identities plus pointedness, at every level where they make sense."""
        ident = [np.arange(self.size(n)) for n in range(self.N + 1)]
        for n in range(1, self.N + 1):
            for i, f in enumerate(self.faces[n]):
                if self.size(n) and f[0] != 0:
                    return False, f"d_{i} on level {n} is not pointed"
        for n in range(self.N):
            for i, s in enumerate(self.degens[n]):
                if self.size(n) and s[0] != 0:
                    return False, f"s_{i} on level {n} is not pointed"
        for n in range(2, self.N + 1):
            for j in range(n + 1):
                for i in range(j):
                    if not np.array_equal(self.d(n - 1, i)[self.d(n, j)], self.d(n - 1, j - 1)[self.d(n, i)]):
                        return False, f"d_{i} d_{j} != d_{j - 1} d_{i} on level {n}"
        for n in range(self.N):
            for j in range(n + 1):
                sj = self.s(n, j)
                for i in range(n + 2):
                    lhs = self.d(n + 1, i)[sj]
                    if i < j:
                        rhs = self.s(n - 1, j - 1)[self.d(n, i)]
                    elif i in (j, j + 1):
                        rhs = ident[n]
                    else:
                        rhs = self.s(n - 1, j)[self.d(n, i - 1)]
                    if not np.array_equal(lhs, rhs):
                        return False, f"d_{i} s_{j} identity fails on level {n}"
        for n in range(self.N - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if not np.array_equal(self.s(n + 1, i)[self.s(n, j)], self.s(n + 1, j + 1)[self.s(n, i)]):
                        return False, f"s_{i} s_{j} != s_{j + 1} s_{i} on level {n}"
        return True, None

    def canonical(self, key: Callable[[int, Hashable], Hashable] | None = None) -> TruncatedSimplicialSet:
        """Rename elements by ``key(level, element)`` and sort each level."""
        key = key or (lambda n, x: x)
        renamed = [[key(n, x) for x in level] for n, level in enumerate(self.elements)]
        perms = [sorted(range(len(r)), key=lambda i, r=r: r[i]) for r in renamed]
        inv = [np.argsort(p) if p else np.zeros(0, dtype=np.int64) for p in perms]
        elems = [[r[i] for i in p] for r, p in zip(renamed, perms)]
        faces = [[inv[n - 1][f[perms[n]]] for f in row] if n else [] for n, row in enumerate(self.faces)]
        degens = [[inv[n + 1][s[perms[n]]] for s in row] for n, row in enumerate(self.degens)]
        labels = [[self.labels[n][i] for i in p] for n, p in enumerate(perms)]
        return TruncatedSimplicialSet(elems, faces, degens, labels, self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSimplicialSet):
            return NotImplemented
        return (
            self.elements == other.elements
            and all(np.array_equal(a, b) for r, q in zip(self.faces, other.faces) for a, b in zip(r, q))
            and all(np.array_equal(a, b) for r, q in zip(self.degens, other.degens) for a, b in zip(r, q))
        )

    __hash__ = None

    def to_tsv(self) -> str:
        """One line per simplex: level, index, label, faces, then degeneracies."""
        lines = ["level\tindex\tlabel\tfaces\tdegeneracies"]
        for n in range(self.N + 1):
            for z in range(self.size(n)):
                faces = ",".join(str(int(f[z])) for f in self.faces[n])
                degens = ",".join(str(int(s[z])) for s in self.degens[n])
                lines.append(f"{n}\t{z}\t{self.labels[n][z]}\t{faces}\t{degens}")
        return "\n".join(lines) + "\n"


def underlying_simplicial(X: TabulatedModule) -> TruncatedSimplicialSet:
    """Precompose the module with beta: d_i acts by beta_face, s_i by beta_degen."""
    faces = [[] if n == 0 else [X.act(beta_face(n, i)) for i in range(n + 1)] for n in range(X.N + 1)]
    degens = [[X.act(beta_degen(n + 1, i)) for i in range(n + 1)] if n < X.N else [] for n in range(X.N + 1)]
    return TruncatedSimplicialSet(X.sets, faces, degens, X.labels, name=f"B({X.name})")


def partial_monoid_classifying(M: Plasma, N: int = 4) -> TruncatedSimplicialSet:
    """n-simplices are n-tuples with a defined total sum; inner faces add neighbours."""
    r = check_properties(M)
    if not (r.deterministic and r.strictly_unital and r.associative):
        raise ValueError(f"{M.name or 'input'} is not a commutative partial monoid")

    def add(a: int, b: int) -> int | None:
        s = M.sum(a, b)
        return s.bit_length() - 1 if s else None

    def total(t) -> int | None:
        acc = 0
        for a in t:
            acc = add(acc, a)
            if acc is None:
                return None
        return acc

    levels = [[t for t in itertools.product(range(len(M)), repeat=n) if total(t) is not None] for n in range(N + 1)]
    index = [{t: i for i, t in enumerate(L)} for L in levels]

    def face(t, i):
        n = len(t)
        if i == 0:
            return t[1:]
        if i == n:
            return t[:-1]
        return t[: i - 1] + (add(t[i - 1], t[i]),) + t[i + 1 :]

    faces = [[] if n == 0 else [[index[n - 1][face(t, i)] for t in levels[n]] for i in range(n + 1)] for n in range(N + 1)]
    degens = [
        [[index[n + 1][t[:i] + (0,) + t[i:]] for t in levels[n]] for i in range(n + 1)] if n < N else []
        for n in range(N + 1)
    ]
    labels = [["(" + ",".join(M.labels[a] for a in t) + ")" for t in L] for L in levels]
    return TruncatedSimplicialSet(levels, faces, degens, labels, name=f"B{M.name}")


@dataclass(frozen=True)
class SquareResult:
    n: int
    i: int
    square: int
    level_size: int
    pullback_size: int
    bijective: bool

    def describe(self) -> str:
        maps = f"(d_{self.i + 1}, d_0)" if self.square == 1 else f"(d_{self.i}, d_{self.n + 1})"
        verdict = "bijective" if self.bijective else "not bijective"
        return f"n={self.n} i={self.i} square {self.square} {maps}: |X_{self.n + 1}|={self.level_size} |pullback|={self.pullback_size} {verdict}"


@dataclass(frozen=True)
class TwoSegalReport:
    ok: bool
    squares: tuple[SquareResult, ...]

    @property
    def failures(self) -> tuple[SquareResult, ...]:
        return tuple(s for s in self.squares if not s.bijective)

    def __bool__(self) -> bool:
        return self.ok


def _square(S: TruncatedSimplicialSet, n: int, i: int, which: int) -> SquareResult:
    if which == 1:
        left, top = S.d(n + 1, i + 1), S.d(n + 1, 0)  # z -> (a, b)
        bottom, right = S.d(n, 0), S.d(n, i)  # d_0 a == d_i b
    else:
        left, top = S.d(n + 1, i), S.d(n + 1, n + 1)
        bottom, right = S.d(n, n), S.d(n, i)
    size_c = S.size(n - 1)
    pull = int(np.dot(np.bincount(bottom, minlength=size_c), np.bincount(right, minlength=size_c)))
    in_pullback = bool((bottom[left] == right[top]).all())
    pairs = left * S.size(n) + top
    injective = len(np.unique(pairs)) == len(pairs)
    bij = in_pullback and injective and len(pairs) == pull
    return SquareResult(n, i, which, S.size(n + 1), pull, bij)


def two_segal_check(S: TruncatedSimplicialSet) -> TwoSegalReport:
    """Both 2-Segal squares for every 0 < i < n <= N-1."""
    if S.N < 3:
        raise ValueError("2-Segal check needs levels up to 3")
    squares = []
    for n in range(2, S.N):
        for i in range(1, n):
            for which in (1, 2):
                squares.append(_square(S, n, i, which))
    return TwoSegalReport(all(s.bijective for s in squares), tuple(squares))


def span_pullback(M: Plasma | None = None) -> list[tuple[tuple[int, int, int], int, tuple[int, int, int]]]:
    """The apex of (Z x M) x_{M x M} Z, where Z = {(a, b, c) : c in a+b}.

    An element is ((a, b, c), k, (c, k, e)): the first triple's sum c and the
    extra coordinate k must be the summands of the second triple.
    """
    M = M if M is not None else krasner()
    Z = [(x[1], x[2], x[3]) for x in nerve_level(M, 2)]
    out = []
    for z in Z:
        for k in range(len(M)):
            for w in Z:
                if w[0] == z[2] and w[1] == k:
                    out.append((z, k, w))
    return out


def span_pullback_count(M: Plasma | None = None) -> int:
    return len(span_pullback(M))


def horn_fillers(S: TruncatedSimplicialSet, n: int, k: int, faces: Sequence[int | None]) -> list[int]:
    """Simplices z in X_n with d_j z = faces[j] for every j != k."""
    if len(faces) != n + 1:
        raise ValueError(f"a horn in level {n} has {n + 1} slots")
    hits = np.ones(S.size(n), dtype=bool)
    for j, f in enumerate(faces):
        if j != k:
            hits &= S.d(n, j) == f
    return [int(z) for z in np.flatnonzero(hits)]
