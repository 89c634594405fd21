"""The plasmic nerve, the truncation adjunction and Segal-type comparisons.

An element of level n of the nerve of M is a vector ``x`` of length 2**n
indexed by bitmask subsets of [n], with ``x[0]`` the unit and
``x[S | T]`` in ``x[S] + x[T]`` for disjoint nonempty S, T.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import finstar as fs
from ._bits import Budget, members, subset_order, unordered_splits
from .f1mod import (
    DEFAULT_LEVEL,
    CheckResult,
    ModuleError,
    ModuleMorphism,
    TabulatedModule,
    check_functoriality,
    enumerate_module_morphisms,
    f1_module,
    is_natural,
    psi_truncate,
)
from .plasma import Plasma, PlasmaMorphism, check_properties, enumerate_morphisms, is_morphism, power_set

__all__ = [
    "nerve_level",
    "format_tuple",
    "nerve_action",
    "nerve_module",
    "nerve_of_morphism",
    "adjunction_unit",
    "adjunction_check",
    "AdjunctionReport",
    "corepresentability_check",
    "CorepresentabilityReport",
    "segal_check",
    "SegalReport",
    "eilenberg_maclane",
    "compare_em_nerve",
    "f1_nerve_isomorphism",
]


def nerve_level(M: Plasma, n: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """All coherent subset-indexed tuples at level n, sorted by vector."""
    if n < 0:
        raise ValueError("level must be >= 0")
    bud = Budget(budget, f"nerve level {n}")
    order = subset_order(n)[1:]
    splits = [unordered_splits(S) for S in order]
    table = M.table
    full = (1 << len(M)) - 1
    x = [0] * (1 << n)
    out: list[tuple[int, ...]] = []

    def extend(pos: int) -> None:
        if pos == len(order):
            out.append(tuple(x))
            return
        cand = full
        for T, U in splits[pos]:
            cand &= table[x[T]][x[U]]
            if not cand:
                return
        S = order[pos]
        for v in members(cand):
            bud.tick()
            x[S] = v
            extend(pos + 1)
        x[S] = 0

    extend(0)
    out.sort()
    return out


def format_tuple(M: Plasma, x: Sequence[int]) -> str:
    """Comma-separated labels in printed subset order, without the empty set."""
    n = (len(x) - 1).bit_length()
    return ",".join(M.labels[x[S]] for S in subset_order(n)[1:])


def nerve_action(M: Plasma, phi: fs.PointedMap, x: Sequence[int]) -> tuple[int, ...]:
    """(x_S)_S maps to (x_{phi^-1(T)})_T."""
    if len(x) != 1 << phi.n:
        raise ValueError(f"tuple has length {len(x)}, expected {1 << phi.n}")
    return tuple(x[fs.preimage(phi, T)] for T in range(1 << phi.m))


_CHUNK = 1 << 22  # entries per block of gathered preimage tuples


class _Lookup:
    """Row index of tuples within a sorted level, vectorised when codes fit in int64."""

    def __init__(self, level: np.ndarray, base: int):
        self.base = base
        width = level.shape[1]
        self.fast = width * max(base - 1, 1).bit_length() < 62
        if self.fast:
            self.codes = self.encode(level)
        else:
            self.index = {tuple(r): i for i, r in enumerate(level.tolist())}

    def encode(self, rows: np.ndarray) -> np.ndarray:
        code = np.zeros(rows.shape[:-1], dtype=np.int64)
        for j in range(rows.shape[-1]):
            code = code * self.base + rows[..., j]
        return code

    def find(self, rows: np.ndarray) -> np.ndarray:
        """Indices of ``rows``; -1 where a row is absent."""
        if self.fast:
            codes = self.encode(rows)
            pos = np.searchsorted(self.codes, codes)
            pos = np.minimum(pos, len(self.codes) - 1)
            return np.where(self.codes[pos] == codes, pos, -1)
        flat = rows.reshape(-1, rows.shape[-1]).tolist()
        return np.array([self.index.get(tuple(r), -1) for r in flat], dtype=np.int64).reshape(rows.shape[:-1])


def nerve_module(M: Plasma, N: int = DEFAULT_LEVEL, budget: int | None = None) -> TabulatedModule:
    """Levels 0..N of the nerve of M with the preimage action of every pointed map."""
    levels = [nerve_level(M, n, budget) for n in range(N + 1)]
    arrays = [np.array(L, dtype=np.int64).reshape(len(L), 1 << n) for n, L in enumerate(levels)]
    lookups = [_Lookup(a, len(M)) for a in arrays]
    tables = {}
    for n in range(N + 1):
        for m in range(N + 1):
            P = fs.preimage_table(n, m)  # (#phi, 2**m)
            step = max(1, _CHUNK // P.size)
            parts = [lookups[m].find(arrays[n][lo : lo + step, P]) for lo in range(0, len(arrays[n]), step)]
            idx = np.concatenate(parts).T if parts else np.zeros((len(P), 0), dtype=np.int64)
            if (idx < 0).any():
                raise ModuleError(f"nerve action ({n},{m}) leaves the nerve")
            tables[(n, m)] = idx
    labels = [[format_tuple(M, x) if n else "*" for x in L] for n, L in enumerate(levels)]
    return TabulatedModule(levels, tables, labels, name=f"H({M.name})")


def _tuple_lookup(Y: TabulatedModule, n: int, M: Plasma) -> _Lookup:
    arr = np.array(Y.sets[n], dtype=np.int64).reshape(Y.size(n), 1 << n)
    return _Lookup(arr, len(M))


def nerve_of_morphism(
    f: PlasmaMorphism, N: int = DEFAULT_LEVEL, X: TabulatedModule | None = None, Y: TabulatedModule | None = None
) -> ModuleMorphism:
    """Postcomposition (x_S) -> (f(x_S)) between nerve modules."""
    X = X if X is not None else nerve_module(f.source, N)
    Y = Y if Y is not None else nerve_module(f.target, N)
    fmap = np.array(f.map, dtype=np.int64)
    comps = []
    for n in range(X.N + 1):
        arr = np.array(X.sets[n], dtype=np.int64).reshape(X.size(n), 1 << n)
        idx = _tuple_lookup(Y, n, f.target).find(fmap[arr])
        if (idx < 0).any():
            raise ModuleError("image tuple is not in the target nerve")
        comps.append(tuple(idx.tolist()))
    return ModuleMorphism(X, Y, tuple(comps))


def _unit_vectors(X: TabulatedModule, n: int) -> np.ndarray:
    """Row z holds (rho_S(z))_S, an X_1-valued vector indexed by subsets of [n]."""
    cols = [X.act(fs.rho_S(n, S)) for S in range(1 << n)]
    return np.stack(cols, axis=1) if X.size(n) else np.zeros((0, 1 << n), dtype=np.int64)


def adjunction_unit(X: TabulatedModule, target: TabulatedModule | None = None) -> ModuleMorphism:
    """The unit X -> nerve(psi X), z -> (rho_S(z))_S."""
    P = psi_truncate(X)
    Y = target if target is not None else nerve_module(P, X.N)
    comps = []
    for n in range(X.N + 1):
        idx = _tuple_lookup(Y, n, P).find(_unit_vectors(X, n))
        if (idx < 0).any():
            z = int(np.flatnonzero(idx < 0)[0])
            raise ModuleError(f"unit sends {X.labels[n][z]} outside the nerve at level {n}")
        comps.append(tuple(idx.tolist()))
    return ModuleMorphism(X, Y, tuple(comps))


@dataclass(frozen=True)
class AdjunctionReport:
    ok: bool
    plas_count: int
    mod_count: int
    eta_bijective: bool
    eta_natural: bool
    counit_identity: bool
    triangle_plasma: bool
    triangle_module: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def adjunction_check(X: TabulatedModule, M: Plasma, budget: int | None = None) -> AdjunctionReport:
    """Compare Plas(psi X, M) with Mod(X, nerve M) through f -> nerve(f) after unit."""
    N = X.N
    P = psi_truncate(X)
    HM = nerve_module(M, N, budget)
    HP = nerve_module(P, N, budget)
    unit = adjunction_unit(X, HP)
    plas = enumerate_morphisms(P, M, budget)
    mods = enumerate_module_morphisms(X, HM, budget)
    images = [nerve_of_morphism(f, N, HP, HM).compose(unit) for f in plas]
    natural = all(is_natural(g) for g in images)
    bij = len(set(images)) == len(images) and set(images) == set(mods)
    counit = psi_truncate(HM) == M
    # nerve(counit) after unit at nerve(M) is the identity; the counit is literally the identity here
    tri_plasma = counit and adjunction_unit(HM, HM) == ModuleMorphism.identity(HM)
    # counit after psi(unit) is the identity on psi X: the unit is the identity on level 1
    tri_module = unit.components[1] == tuple(range(X.size(1)))
    witness = None
    if not bij:
        witness = f"{len(plas)} plasma maps but {len(mods)} module maps"
    elif not natural:
        witness = "an image of eta is not natural"
    elif not counit:
        witness = "psi of the nerve differs from the plasma"
    ok = bij and natural and counit and tri_plasma and tri_module
    return AdjunctionReport(ok, len(plas), len(mods), bij, natural, counit, tri_plasma, tri_module, witness)


@dataclass(frozen=True)
class CorepresentabilityReport:
    ok: bool
    hom_count: int
    nerve_count: int
    bijective: bool
    natural: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _power_set_eta(f: PlasmaMorphism) -> tuple[int, ...]:
    return tuple(f.map)


def corepresentability_check(M: Plasma, n: int, budget: int | None = None) -> CorepresentabilityReport:
    """f -> (f(S))_S identifies Plas(P(n), M) with nerve level n, naturally in <n>."""
    homs = {k: enumerate_morphisms(power_set(k), M, budget) for k in range(n + 1)}
    levels = {k: nerve_level(M, k, budget) for k in range(n + 1)}
    etas = {k: [_power_set_eta(f) for f in homs[k]] for k in homs}
    bij = all(len(set(etas[k])) == len(etas[k]) and set(etas[k]) == set(levels[k]) for k in homs)
    witness = None
    if not bij:
        witness = f"level {n}: {len(homs[n])} morphisms vs {len(levels[n])} tuples"
    natural = True
    for k in range(n + 1):
        for m in range(n + 1):
            for phi in fs.enumerate_pointed_maps(k, m):
                pre = [fs.preimage(phi, T) for T in range(1 << m)]
                if not is_morphism(power_set(m), power_set(k), pre):
                    natural = False
                    witness = witness or f"preimage along {phi} is not a plasma map"
                    continue
                for f in homs[k]:
                    pulled = tuple(f.map[p] for p in pre)
                    if pulled != nerve_action(M, phi, f.map):
                        natural = False
                        witness = witness or f"naturality fails for {phi}"
    ok = bij and natural
    return CorepresentabilityReport(ok, len(homs[n]), len(levels[n]), bij, natural, witness)


@dataclass(frozen=True)
class SegalReport:
    iso_form: CheckResult
    pullback_form: CheckResult

    @property
    def agree(self) -> bool:
        return bool(self.iso_form) == bool(self.pullback_form)

    @property
    def ok(self) -> bool:
        return bool(self.iso_form) and bool(self.pullback_form)

    def __bool__(self) -> bool:
        return self.ok


def _pullback_level(X: TabulatedModule, n: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """X_1-valued subset vectors whose restriction along every P(2) -> P(n) comes from X_2."""
    allowed = set(zip(X.act(fs.rho(2, 1)).tolist(), X.act(fs.rho(2, 2)).tolist(), X.act(fs.ALPHA).tolist()))
    if (0, 0, 0) not in allowed:
        return []
    bud = Budget(budget, f"pullback level {n}")
    checks: dict[int, set[tuple[int, int]]] = {}
    for row in fs.maps_array(n, 2).tolist():
        A = B = 0
        for i, t in enumerate(row[1:]):
            if t == 1:
                A |= 1 << i
            elif t == 2:
                B |= 1 << i
        if A | B:
            checks.setdefault(A | B, set()).add((A, B))
    order = subset_order(n)[1:]
    cons = [sorted(checks.get(S, ())) for S in order]
    x = [0] * (1 << n)
    out = []

    def extend(pos):
        if pos == len(order):
            out.append(tuple(x))
            return
        S = order[pos]
        for v in range(X.size(1)):
            bud.tick()
            x[S] = v
            if all((x[A], x[B], v) in allowed for A, B in cons[pos]):
                extend(pos + 1)
        x[S] = 0

    extend(0)
    out.sort()
    return out


def _levelwise_bijection(X: TabulatedModule, n: int, targets: list[tuple[int, ...]]) -> str | None:
    vecs = [tuple(r) for r in _unit_vectors(X, n).tolist()]
    index = {t: i for i, t in enumerate(targets)}
    seen = {}
    for z, v in enumerate(vecs):
        if v not in index:
            return f"level {n}: {X.labels[n][z]} maps outside the target"
        if v in seen:
            return f"level {n}: {X.labels[n][seen[v]]} and {X.labels[n][z]} have the same image"
        seen[v] = z
    if len(seen) != len(targets):
        return f"level {n}: {len(targets) - len(seen)} of {len(targets)} target elements are missed"
    return None


def segal_check(X: TabulatedModule, budget: int | None = None) -> SegalReport:
    """Is X the nerve of its truncation? Checked as an isomorphism and as a pullback."""
    if X.N < 2:
        raise ModuleError("Segal check needs levels up to 2")
    func = check_functoriality(X)
    if not func:
        bad = CheckResult(False, f"not a module: {func.witness}")
        return SegalReport(bad, bad)
    try:
        P = psi_truncate(X)
    except ModuleError as exc:
        bad = CheckResult(False, str(exc))
        return SegalReport(bad, bad)
    iso = pull = None
    for n in range(X.N + 1):
        if iso is None:
            w = _levelwise_bijection(X, n, nerve_level(P, n, budget))
            if w:
                iso = CheckResult(False, w)
        if pull is None:
            w = _levelwise_bijection(X, n, _pullback_level(X, n, budget))
            if w:
                pull = CheckResult(False, w)
    passed = CheckResult(True)
    return SegalReport(passed if iso is None else iso, passed if pull is None else pull)


def eilenberg_maclane(A: Plasma, N: int = DEFAULT_LEVEL) -> TabulatedModule:
    """HA_n = A^n, with a pointed map acting by summing each fibre."""
    if not check_properties(A).monoid:
        raise ModuleError(f"{A.name or 'input'} is not a commutative monoid")
    k = len(A)
    add = np.array([[int(A.sum(i, j)).bit_length() - 1 for j in range(k)] for i in range(k)], dtype=np.int64)
    sets, labels, arrays = [], [], []
    for n in range(N + 1):
        elems = list(itertools.product(range(k), repeat=n))
        sets.append(elems)
        labels.append([",".join(A.labels[a] for a in e) if n else "*" for e in elems])
        arrays.append(np.array(elems, dtype=np.int64).reshape(len(elems), n))
    tables = {}
    for n in range(N + 1):
        for m in range(N + 1):
            imgs = fs.maps_array(n, m)
            P, E = imgs.shape[0], arrays[n].shape[0]
            res = np.zeros((P, E, m + 1), dtype=np.int64)  # column 0 collects the discarded part
            pi = np.arange(P)[:, None]
            ei = np.arange(E)[None, :]
            for i in range(1, n + 1):
                j = imgs[:, i][:, None]
                res[pi, ei, j] = add[res[pi, ei, j], arrays[n][None, :, i - 1]]
            code = np.zeros((P, E), dtype=np.int64)
            for j in range(1, m + 1):
                code = code * k + res[:, :, j]
            tables[(n, m)] = code
    return TabulatedModule(sets, tables, labels, name=f"EM({A.name})")


def compare_em_nerve(A: Plasma, N: int = DEFAULT_LEVEL) -> CheckResult:
    """Projection to singleton coordinates is a natural bijection nerve(A) -> HA."""
    H = nerve_module(A, N)
    EM = eilenberg_maclane(A, N)
    comps = []
    for n in range(N + 1):
        comp = [EM.index(n, tuple(x[1 << i] for i in range(n))) for x in H.sets[n]]
        comps.append(tuple(comp))
    f = ModuleMorphism(H, EM, tuple(comps))
    if not f.is_bijective():
        return CheckResult(False, "projection is not bijective")
    return is_natural(f)


def f1_nerve_isomorphism(N: int = DEFAULT_LEVEL) -> tuple[ModuleMorphism, CheckResult]:
    """nerve(psi F1) -> F1 sending a tuple to the unique singleton carrying 1 (or 0)."""
    F = f1_module(N)
    P = psi_truncate(F)
    H = nerve_module(P, N)
    comps = []
    for n in range(N + 1):
        comp = []
        for x in H.sets[n]:
            hot = [i + 1 for i in range(n) if x[1 << i] != 0]
            comp.append(hot[0] if len(hot) == 1 else 0 if not hot else -1)
        comps.append(tuple(comp))
    f = ModuleMorphism(H, F, tuple(comps))
    if any(-1 in c for c in comps):
        return f, CheckResult(False, "a tuple has two nonzero singleton entries")
    if not f.is_bijective():
        return f, CheckResult(False, "not bijective")
    return f, is_natural(f)
