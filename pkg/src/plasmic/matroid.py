"""Pointed matroids given by closure tables, and their plasmas of lines.

Ground elements are indexed 0..k-1 with the basepoint at index 0; subsets of
the ground set are bitmasks over these indices. The closure operator is a
full table ``closure[A]`` for every bitmask A.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._bits import Budget, members
from .plasma import Plasma, enumerate_morphisms, is_morphism

__all__ = [
    "MatroidError",
    "PointedMatroid",
    "MatroidFlags",
    "closure_table",
    "from_lines",
    "pg_f2",
    "free_simple",
    "matroid_from_json",
    "build_matroid",
    "classify_matroid",
    "pi_plasma",
    "enumerate_matroid_morphisms",
    "is_matroid_morphism",
    "EmbeddingReport",
    "embedding_check",
    "find_matroid_isomorphism",
]

MAX_GROUND = 16


class MatroidError(ValueError):
    pass


def _axiom_violation(k: int, K: np.ndarray) -> str | None:
    """First violated closure axiom, described by a witness subset, or None."""
    idx = np.arange(1 << k, dtype=np.int64)
    bad = np.flatnonzero(idx & ~K)
    if bad.size:
        return f"not extensive at subset {int(bad[0]):#b}"
    bad = np.flatnonzero(K[K] != K)
    if bad.size:
        return f"not idempotent at subset {int(bad[0]):#b}"
    for y in range(k):
        bit = 1 << y
        KAy = K[idx | bit]
        bad = np.flatnonzero(K & ~KAy)
        if bad.size:
            return f"not monotone: subset {int(bad[0]):#b} plus element {y}"
    for y in range(k):
        KAy = K[idx | (1 << y)]
        new = KAy & ~K
        for x in range(k):
            need = ((new >> x) & 1).astype(bool)
            ok = ((K[idx | (1 << x)] >> y) & 1).astype(bool)
            bad = np.flatnonzero(need & ~ok)
            if bad.size:
                return f"exchange fails for subset {int(bad[0]):#b}, x={x}, y={y}"
    if not K[0] & 1:
        return "basepoint is not in the closure of the empty set"
    return None


class PointedMatroid:
    """A finite pointed matroid; the closure table is validated on construction."""

    def __init__(self, ground: Sequence[str], closure: Sequence[int], name: str = ""):
        ground = tuple(str(g) for g in ground)
        k = len(ground)
        if k == 0:
            raise MatroidError("ground set needs the basepoint")
        if k > MAX_GROUND:
            raise MatroidError(f"ground sets are limited to {MAX_GROUND} elements")
        if len(set(ground)) != k:
            raise MatroidError("duplicate ground labels")
        K = np.array(closure, dtype=np.int64)
        if K.shape != (1 << k,):
            raise MatroidError(f"closure table needs {1 << k} entries")
        if (K >> k).any() or (K < 0).any():
            raise MatroidError("closure names elements outside the ground set")
        why = _axiom_violation(k, K)
        if why:
            raise MatroidError(why)
        K.flags.writeable = False
        self.ground = ground
        self.closure = K
        self.name = name

    def __len__(self) -> int:
        return len(self.ground)

    def __repr__(self) -> str:
        return f"PointedMatroid({self.name or 'unnamed'}, {len(self)} elements)"

    def kappa(self, A: int) -> int:
        return int(self.closure[A])

    def mask(self, labels: Iterable[str]) -> int:
        out = 0
        for x in labels:
            out |= 1 << self.ground.index(str(x))
        return out

    def format(self, A: int) -> str:
        return "{" + ",".join(self.ground[i] for i in members(A)) + "}"

    def flats(self) -> list[int]:
        return [int(A) for A in np.flatnonzero(self.closure == np.arange(1 << len(self)))]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ground": list(self.ground),
            "basepoint": self.ground[0],
            "closure": {",".join(self.ground[i] for i in members(A)): [self.ground[i] for i in members(int(c))] for A, c in enumerate(self.closure.tolist())},
        }


def closure_table(ground: Sequence[str], closure, name: str = "") -> PointedMatroid:
    """From a closure given as a list indexed by bitmask or a callable on bitmasks."""
    k = len(ground)
    if callable(closure):
        closure = [closure(A) for A in range(1 << k)]
    return PointedMatroid(ground, closure, name)


def from_lines(points: Sequence[str], lines: Iterable[Iterable[str]], basepoint: str = "0", name: str = "") -> PointedMatroid:
    """A rank <= 3 simple pointed matroid from its lines with at least three points.

    Pairs on no listed line span only themselves; three or more points not on
    a common line span everything.
    """
    ground = [str(basepoint)] + [str(p) for p in points if str(p) != str(basepoint)]
    pos = {g: i for i, g in enumerate(ground)}
    line_masks = []
    for L in lines:
        m = 0
        for p in L:
            if str(p) not in pos or str(p) == str(basepoint):
                raise MatroidError(f"line point {p!r} is not a point")
            m |= 1 << pos[str(p)]
        line_masks.append(m)
    full = (1 << len(ground)) - 1

    def kappa(A: int) -> int:
        pts = A & ~1
        c = pts.bit_count()
        if c <= 1:
            return A | 1
        holders = [L for L in line_masks if pts & ~L == 0]
        if len(holders) > 1:
            raise MatroidError(f"points {sorted(members(pts))} lie on two lines")
        if holders:
            return holders[0] | 1
        return A | 1 if c == 2 else full

    return PointedMatroid(ground, [kappa(A) for A in range(1 << len(ground))], name or "lines")


def pg_f2(k: int) -> PointedMatroid:
    """All vectors of F_2^k (labelled as bit strings) with linear span as closure."""
    if not 0 <= k <= 4:
        raise MatroidError("pg_f2 supports 0 <= k <= 4")
    size = 1 << k
    ground = [format(v, f"0{k}b") if k else "0" for v in range(size)]
    closure = []
    for A in range(1 << size):
        span = 1  # the zero vector
        for v in members(A):
            span |= _shift_span(span, v, size)
        closure.append(span)
    return PointedMatroid(ground, closure, f"PG(F2^{k})")


def _shift_span(span: int, v: int, size: int) -> int:
    """The set {w ^ v : w in span}."""
    out = 0
    for w in members(span):
        out |= 1 << (w ^ v)
    return out


def free_simple(points: Sequence[str] | int, basepoint: str = "0") -> PointedMatroid:
    """kappa(A) = A plus the basepoint."""
    if isinstance(points, int):
        points = [str(i) for i in range(1, points + 1)]
    ground = [str(basepoint)] + [str(p) for p in points]
    return PointedMatroid(ground, [A | 1 for A in range(1 << len(ground))], f"free({len(points)})")


def matroid_from_json(data: Mapping | str) -> PointedMatroid:
    if isinstance(data, str):
        data = json.loads(data)
    name = data.get("name", "")
    base = str(data.get("basepoint", "0"))
    if "lines" in data:
        return from_lines(data["points"], data["lines"], base, name)
    if "closure" not in data:
        raise MatroidError("matroid JSON needs 'lines' or 'closure'")
    table = data["closure"]
    if isinstance(table, list):
        if "ground" not in data:
            raise MatroidError("a closure list needs an explicit 'ground'")
        return PointedMatroid(data["ground"], table, name)
    parse = lambda s: [x for x in (s.split(",") if isinstance(s, str) else s) if str(x) != ""]
    if "ground" in data or "points" in data:
        labels = [str(x) for x in data.get("ground", data.get("points"))]
    else:
        labels = sorted({x for key, val in table.items() for x in parse(key) + parse(val)})
    ground = [base] + [x for x in labels if x != base]
    pos = {g: i for i, g in enumerate(ground)}
    closure = [-1] * (1 << len(ground))
    for key, val in table.items():
        try:
            A = sum(1 << pos[str(x)] for x in parse(key))
            closure[A] = sum(1 << pos[str(x)] for x in parse(val))
        except KeyError as exc:
            raise MatroidError(f"unknown label {exc}") from None
    missing = [A for A, c in enumerate(closure) if c < 0]
    if missing:
        raise MatroidError(f"closure missing for {len(missing)} subsets")
    return PointedMatroid(ground, closure, name)


_DESC = re.compile(r"^\s*([a-z_0-9]+)\s*(?:[(:]\s*(\d+)\s*\)?)?\s*$")


def build_matroid(desc) -> PointedMatroid:
    """``pg_f2(k)``, ``free(n)``, a JSON mapping, or a JSON string."""
    if isinstance(desc, Mapping):
        return matroid_from_json(desc)
    m = _DESC.match(str(desc))
    if m:
        kind, arg = m.group(1), m.group(2)
        if kind == "pg_f2" and arg is not None:
            return pg_f2(int(arg))
        if kind in ("free", "free_simple") and arg is not None:
            return free_simple(int(arg))
        if kind == "fano":
            return pg_f2(3)
    raise MatroidError(f"unknown matroid descriptor {desc!r}")


@dataclass(frozen=True)
class MatroidFlags:
    matroid: bool
    simple_pointed: bool
    projective: bool
    witness: str | None = None


def _pair_unions(M: PointedMatroid) -> np.ndarray:
    """``R[x, Q]`` = union of kappa({x, y}) over y in Q."""
    k = len(M)
    R = np.zeros((k, 1 << k), dtype=np.int64)
    for x in range(k):
        row = np.zeros(1, dtype=np.int64)
        for y in range(k):
            row = np.concatenate([row, row | M.kappa((1 << x) | (1 << y))])
        R[x] = row
    return R


def classify_matroid(M: PointedMatroid) -> MatroidFlags:
    k = len(M)
    K = M.closure
    simple = K[0] == 1 and all(M.kappa(1 << x) == (1 << x) | 1 for x in range(k))
    if not simple:
        bad = next((x for x in range(k) if M.kappa(1 << x) != (1 << x) | 1), None)
        w = "closure of the empty set is not {0}" if K[0] != 1 else f"closure of {{{M.ground[bad]}}} is {M.format(M.kappa(1 << bad))}"
        return MatroidFlags(True, False, False, w)
    # closure is the union of closures of (finite) subsets: sum over subsets
    U = K.copy()
    idx = np.arange(1 << k)
    for i in range(k):
        hit = (idx >> i) & 1 == 1
        U[hit] |= U[idx[hit] ^ (1 << i)]
    if not np.array_equal(U, K):
        A = int(np.flatnonzero(U != K)[0])
        return MatroidFlags(True, True, False, f"closure of {M.format(A)} is not a union of closures of its subsets")
    R = _pair_unions(M)
    flats = M.flats()
    for F in flats:
        for G in flats:
            acc = 0
            for x in members(F):
                acc |= int(R[x, G])
            if acc != M.kappa(F | G):
                return MatroidFlags(True, True, False, f"closure of {M.format(F)} with {M.format(G)} is not a union of lines")
    return MatroidFlags(True, True, True)


def pi_plasma(M: PointedMatroid) -> Plasma:
    """x+y = kappa{x,y} - {x,y,0} for distinct nonzero x, y; x+x = {x,0}; 0 is a strict unit."""
    if not classify_matroid(M).simple_pointed:
        raise MatroidError("the line plasma needs a simple pointed matroid")
    k = len(M)
    table = [[0] * k for _ in range(k)]
    for x in range(k):
        for y in range(k):
            if x == y:
                table[x][y] = (1 << x) | 1
            elif x == 0 or y == 0:
                table[x][y] = 1 << (x | y)
            else:
                pair = (1 << x) | (1 << y)
                table[x][y] = M.kappa(pair) & ~(pair | 1)
    return Plasma(M.ground, table, name=f"Pi({M.name})")


def _image(f: Sequence[int], A: int) -> int:
    out = 0
    for i in members(A):
        out |= 1 << f[i]
    return out


def is_matroid_morphism(M: PointedMatroid, N: PointedMatroid, f: Sequence[int]) -> bool:
    if len(f) != len(M) or f[0] != 0:
        return False
    return all(_image(f, M.kappa(A)) & ~N.kappa(_image(f, A)) == 0 for A in range(1 << len(M)))


def enumerate_matroid_morphisms(M: PointedMatroid, N: PointedMatroid, budget: int | None = None) -> list[tuple[int, ...]]:
    """Pointed maps with f(kappa A) inside kappa'(f A), lexicographic by image vector.

    A subset's condition is checked as soon as every element of its closure
    is assigned; smaller subsets (points, then pairs) come first.
    """
    k, t = len(M), len(N)
    bud = Budget(budget, "matroid morphisms")
    ready: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for A in sorted(range(1 << k), key=lambda A: (A.bit_count(), A)):
        c = M.kappa(A)
        ready[c.bit_length() - 1].append((A, c))
    NK = N.closure
    f = [0] * k
    out = []

    def extend(i: int) -> None:
        if i == k:
            out.append(tuple(f))
            return
        for v in range(t) if i else (0,):
            bud.tick()
            f[i] = v
            if all(_image(f, c) & ~int(NK[_image(f, A)]) == 0 for A, c in ready[i]):
                extend(i + 1)
        f[i] = 0

    extend(0)
    return out


@dataclass(frozen=True)
class EmbeddingReport:
    matroid_count: int
    plasma_count: int
    faithful: bool
    full: bool | None
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.faithful and self.full is not False


def embedding_check(M: PointedMatroid, N: PointedMatroid, budget: int | None = None) -> EmbeddingReport:
    """Is the line-plasma functor injective on hom(M, N), and onto when both are projective?"""
    homs = enumerate_matroid_morphisms(M, N, budget)
    PM, PN = pi_plasma(M), pi_plasma(N)
    witness = None
    faithful = len(set(homs)) == len(homs)
    for f in homs:
        if not is_morphism(PM, PN, f):
            faithful = False
            witness = f"matroid map {f} is not a plasma map"
            break
    plas = [tuple(g.map) for g in enumerate_morphisms(PM, PN, budget)]
    full = None
    if classify_matroid(M).projective and classify_matroid(N).projective:
        full = set(plas) == set(homs)
        if not full and witness is None:
            extra = sorted(set(plas) - set(homs))
            witness = f"plasma map {extra[0]} is not a matroid map" if extra else "hom sets differ"
    return EmbeddingReport(len(homs), len(plas), faithful, full, witness)


def find_matroid_isomorphism(M: PointedMatroid, N: PointedMatroid) -> tuple[int, ...] | None:
    """A basepoint-fixing bijection carrying closures to closures, or None."""
    k = len(M)
    if k != len(N):
        return None
    pairs = [(1 << x) | (1 << y) for x in range(k) for y in range(x + 1, k)]
    for rest in itertools.permutations(range(1, k)):
        f = (0,) + rest
        if all(_image(f, M.kappa(A)) == N.kappa(_image(f, A)) for A in pairs):
            if all(_image(f, M.kappa(A)) == N.kappa(_image(f, A)) for A in range(1 << k)):
                return f
    return None
