"""Truncated F_1-modules: pointed functors Fin_* -> Set_* tabulated up to level N.

A :class:`TabulatedModule` stores the finite pointed sets X_0..X_N (basepoint
at index 0) and, for every pair of levels (n, m), an integer array whose row
``phi.index`` is the function X_n -> X_m induced by ``phi``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from . import finstar as fs
from ._bits import Budget
from .plasma import Plasma, PlasmaError

__all__ = [
    "CheckResult",
    "ModuleError",
    "TabulatedModule",
    "ModuleMorphism",
    "f1_module",
    "psi_truncate",
    "check_functoriality",
    "is_natural",
    "enumerate_module_morphisms",
    "corepresented_module",
    "wedge_sum",
    "generated_submodule",
    "GLReport",
    "gl_n",
]

DEFAULT_LEVEL = 4


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.ok


class TabulatedModule:
    """Pointed sets X_0..X_N with the action of every pointed map between them.

    ``action[(n, m)]`` has shape ``((m+1)**n, |X_n|)``. Construction only
    checks shapes; use :func:`check_functoriality` for the functor laws.
    """

    def __init__(
        self,
        sets: Sequence[Sequence[Hashable]],
        action: Mapping[tuple[int, int], np.ndarray],
        labels: Sequence[Sequence[str]] | None = None,
        name: str = "",
    ):
        self.sets = tuple(tuple(s) for s in sets)
        self.N = len(self.sets) - 1
        self.name = name
        if self.N < 0:
            raise ModuleError("a module needs at least level 0")
        self._action: dict[tuple[int, int], np.ndarray] = {}
        for n in range(self.N + 1):
            for m in range(self.N + 1):
                if (n, m) not in action:
                    raise ModuleError(f"missing action for maps <{n}> -> <{m}>")
                arr = np.array(action[(n, m)], dtype=np.int64)
                want = (fs.map_count(n, m), len(self.sets[n]))
                if arr.shape != want:
                    raise ModuleError(f"action ({n},{m}) has shape {arr.shape}, expected {want}")
                if arr.size and (arr.min() < 0 or arr.max() >= len(self.sets[m])):
                    raise ModuleError(f"action ({n},{m}) points outside X_{m}")
                arr.flags.writeable = False
                self._action[(n, m)] = arr
        if labels is None:
            labels = [[str(x) for x in s] for s in self.sets]
        self.labels = tuple(tuple(str(x) for x in row) for row in labels)
        self._index = [None] * (self.N + 1)

    def __repr__(self) -> str:
        return f"TabulatedModule({self.name or 'unnamed'}, sizes={self.sizes()})"

    def size(self, n: int) -> int:
        return len(self.sets[n])

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sets)

    def table(self, n: int, m: int) -> np.ndarray:
        return self._action[(n, m)]

    def act(self, phi: fs.PointedMap) -> np.ndarray:
        """The function X_n -> X_m induced by ``phi``, as an index array."""
        return self._action[(phi.n, phi.m)][phi.index]

    def apply(self, phi: fs.PointedMap, x: int) -> int:
        return int(self.act(phi)[x])

    def index(self, n: int, element: Hashable) -> int:
        if self._index[n] is None:
            self._index[n] = {x: i for i, x in enumerate(self.sets[n])}
        return self._index[n][element]

    def truncate(self, N: int) -> TabulatedModule:
        if N > self.N:
            raise ModuleError(f"cannot extend a level-{self.N} module to level {N}")
        return TabulatedModule(
            self.sets[: N + 1],
            {(n, m): a for (n, m), a in self._action.items() if n <= N and m <= N},
            self.labels[: N + 1],
            self.name,
        )

    def to_json(self) -> dict:
        action = {}
        for (n, m), arr in sorted(self._action.items()):
            for phi, row in zip(fs.enumerate_pointed_maps(n, m), arr.tolist()):
                action[str(phi)] = row
        return {"name": self.name, "levels": [list(row) for row in self.labels], "action": action}

    @classmethod
    def from_json(cls, data: Mapping | str) -> TabulatedModule:
        if isinstance(data, str):
            data = json.loads(data)
        levels = [[str(x) for x in row] for row in data["levels"]]
        N = len(levels) - 1
        tables = {(n, m): np.full((fs.map_count(n, m), len(levels[n])), -1, dtype=np.int64) for n in range(N + 1) for m in range(N + 1)}
        for key, row in data["action"].items():
            phi = fs.PointedMap.parse(key)
            if phi.n > N or phi.m > N:
                raise ModuleError(f"action for {key} exceeds level {N}")
            tables[(phi.n, phi.m)][phi.index] = row
        for (n, m), arr in tables.items():
            if (arr < 0).any():
                raise ModuleError(f"action table ({n},{m}) incomplete")
        return cls(levels, tables, levels, data.get("name", ""))


def tabulate(
    sets: Sequence[Sequence[Hashable]],
    act: Callable[[fs.PointedMap, Hashable], Hashable],
    labels=None,
    name: str = "",
) -> TabulatedModule:
    """Build a module from a pointwise action function (small modules only)."""
    index = [{x: i for i, x in enumerate(s)} for s in sets]
    N = len(sets) - 1
    tables = {}
    for n in range(N + 1):
        for m in range(N + 1):
            arr = np.empty((fs.map_count(n, m), len(sets[n])), dtype=np.int64)
            for phi in fs.enumerate_pointed_maps(n, m):
                arr[phi.index] = [index[m][act(phi, x)] for x in sets[n]]
            tables[(n, m)] = arr
    return TabulatedModule(sets, tables, labels, name)


def f1_module(N: int = DEFAULT_LEVEL) -> TabulatedModule:
    """The inclusion Fin_* -> Set_*: X_n = <n>, phi acts as itself."""
    if N < 0:
        raise ModuleError("N must be >= 0")
    sets = [tuple(range(n + 1)) for n in range(N + 1)]
    tables = {(n, m): fs.maps_array(n, m) for n in range(N + 1) for m in range(N + 1)}
    return TabulatedModule(sets, tables, name="F1")


def psi_truncate(X: TabulatedModule) -> Plasma:
    """The plasma on X_1 with x+y = alpha(sigma_2^{-1}(x, y))."""
    if X.N < 2:
        raise ModuleError("truncation needs levels up to 2")
    if X.apply(fs.E, 0) != 0:
        raise ModuleError("module is not pointed: e^X is not the basepoint")
    r1, r2, al = X.act(fs.rho(2, 1)), X.act(fs.rho(2, 2)), X.act(fs.ALPHA)
    k = X.size(1)
    table = [[0] * k for _ in range(k)]
    for z in range(X.size(2)):
        table[r1[z]][r2[z]] |= 1 << int(al[z])
    try:
        return Plasma(X.labels[1], table, name=f"psi({X.name})")
    except PlasmaError as exc:
        raise ModuleError(f"truncation is not a plasma: {exc}") from None


def _composition_index(n: int, m: int, k: int) -> np.ndarray:
    """``C[psi, phi]`` = index of psi after phi, for phi: n->m, psi: m->k."""
    left = fs.maps_array(m, k)
    right = fs.maps_array(n, m)
    comp = left[:, right]  # (#psi, #phi, n+1)
    return fs.map_index(comp, k)


def check_functoriality(X: TabulatedModule) -> CheckResult:
    """Exhaustively check pointedness, identities and composition up to level N."""
    if X.size(0) != 1:
        return CheckResult(False, f"X_0 has {X.size(0)} elements")
    for (n, m), arr in X._action.items():
        bad = np.flatnonzero(arr[:, 0] != 0)
        if bad.size:
            phi = fs.from_index(n, m, int(bad[0]))
            return CheckResult(False, f"{phi} does not preserve the basepoint")
    for n in range(X.N + 1):
        ident = X.act(fs.identity(n))
        bad = np.flatnonzero(ident != np.arange(X.size(n)))
        if bad.size:
            return CheckResult(False, f"identity on <{n}> moves element {X.labels[n][bad[0]]}")
    for n in range(X.N + 1):
        for m in range(X.N + 1):
            A_nm = X.table(n, m)
            for k in range(X.N + 1):
                A_mk = X.table(m, k)
                A_nk = X.table(n, k)
                comp = _composition_index(n, m, k)
                for psi in range(A_mk.shape[0]):
                    lhs = A_mk[psi][A_nm]
                    rhs = A_nk[comp[psi]]
                    if not np.array_equal(lhs, rhs):
                        phi_i, x = map(int, np.argwhere(lhs != rhs)[0])
                        phi = fs.from_index(n, m, phi_i)
                        g = fs.from_index(m, k, psi)
                        return CheckResult(
                            False, f"action({g} after {phi}) differs from action({g}) after action({phi}) at {X.labels[n][x]}"
                        )
    return CheckResult(True)


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """A level-indexed family of functions f_n: X_n -> Y_n."""

    source: TabulatedModule
    target: TabulatedModule
    components: tuple[tuple[int, ...], ...]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleMorphism):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __getitem__(self, n: int) -> tuple[int, ...]:
        return self.components[n]

    def compose(self, first: ModuleMorphism) -> ModuleMorphism:
        """``self`` after ``first``."""
        comps = tuple(tuple(g[x] for x in f) for g, f in zip(self.components, first.components))
        return ModuleMorphism(first.source, self.target, comps)

    def is_bijective(self) -> bool:
        return all(
            len(set(c)) == len(c) == self.target.size(n) for n, c in enumerate(self.components)
        )

    @classmethod
    def identity(cls, X: TabulatedModule) -> ModuleMorphism:
        return cls(X, X, tuple(tuple(range(X.size(n))) for n in range(X.N + 1)))


def is_natural(f: ModuleMorphism) -> CheckResult:
    X, Y = f.source, f.target
    if X.N != Y.N or len(f.components) != X.N + 1:
        return CheckResult(False, "levels do not match")
    comps = [np.asarray(c, dtype=np.int64) for c in f.components]
    for n in range(X.N + 1):
        if comps[n].shape != (X.size(n),):
            return CheckResult(False, f"component {n} has the wrong length")
        if X.size(n) and comps[n][0] != 0:
            return CheckResult(False, f"component {n} is not pointed")
    for n in range(X.N + 1):
        for m in range(X.N + 1):
            lhs = comps[m][X.table(n, m)]
            rhs = Y.table(n, m)[:, comps[n]]
            if not np.array_equal(lhs, rhs):
                phi_i, x = map(int, np.argwhere(lhs != rhs)[0])
                return CheckResult(False, f"not natural for {fs.from_index(n, m, phi_i)} at {X.labels[n][x]}")
    return CheckResult(True)


def enumerate_module_morphisms(
    X: TabulatedModule, Y: TabulatedModule, budget: int | None = None
) -> list[ModuleMorphism]:
    """All pointed natural families X -> Y at truncation level N.

    Levels are filled in increasing order. Within a level, candidates are
    first cut down by naturality against maps to and from lower levels (both
    already fixed), then a backtracking pass enforces naturality against the
    endomorphisms of the level.
    """
    if X.N != Y.N:
        raise ModuleError("modules must share the truncation level")
    N = X.N
    bud = Budget(budget, f"Mod({X.name or 'X'}, {Y.name or 'Y'})")
    f: list[np.ndarray | None] = [None] * (N + 1)
    f[0] = np.zeros(1, dtype=np.int64)
    out: list[ModuleMorphism] = []

    def allowed_at(n: int) -> np.ndarray:
        sx, sy = X.size(n), Y.size(n)
        allowed = np.ones((sx, sy), dtype=bool)
        allowed[0] = False
        allowed[0, 0] = True
        for k in range(n):
            AX, AY = X.table(n, k), Y.table(n, k)
            req = f[k][AX]  # (P, sx)
            for p in range(AX.shape[0]):
                allowed &= AY[p][None, :] == req[p][:, None]
            AXu, AYu = X.table(k, n), Y.table(k, n)
            zs = AXu.ravel()
            ys = AYu[:, f[k]].ravel()
            forced = np.zeros((sx, sy), dtype=bool)
            forced[zs, ys] = True
            hit = forced.any(axis=1)
            allowed[hit] &= forced[hit]
            allowed[forced.sum(axis=1) > 1] = False
        return allowed

    def solve_level(n: int):
        sx = X.size(n)
        allowed = allowed_at(n)
        if not allowed.any(axis=1).all():
            return
        AX, AY = X.table(n, n), Y.table(n, n)
        fwd = []
        back = []
        for z in range(sx):
            col = AX[:, z]
            sel = np.flatnonzero(col <= z)
            fwd.append((sel, col[sel]))
            ph, w = np.nonzero(AX == z)
            keep = w < z
            back.append((ph[keep], w[keep]))
        cur = np.full(sx, -1, dtype=np.int64)

        def extend(z):
            if z == sx:
                yield cur.copy()
                return
            sel, zp = fwd[z]
            bph, bw = back[z]
            for y in np.flatnonzero(allowed[z]):
                bud.tick()
                cur[z] = y
                if not np.array_equal(AY[sel, y], cur[zp]):
                    continue
                if bph.size and not (AY[bph, cur[bw]] == y).all():
                    continue
                yield from extend(z + 1)
            cur[z] = -1

        yield from extend(0)

    def descend(n: int):
        if n > N:
            out.append(ModuleMorphism(X, Y, tuple(tuple(int(v) for v in c) for c in f)))
            return
        for comp in solve_level(n):
            f[n] = comp
            descend(n + 1)
        f[n] = None

    if X.size(0) != 1 or Y.size(0) != 1:
        raise ModuleError("level 0 must be a singleton")
    descend(1)
    return out


def corepresented_module(n: int, N: int = DEFAULT_LEVEL, budget: int | None = None) -> TabulatedModule:
    """X_k = Fin_*(<n>, <k>) with the action of postcomposition."""
    if n < 0 or N < 0:
        raise ModuleError("n and N must be >= 0")
    bud = Budget(budget, f"corepresented <{n}>")
    bud.require(sum(fs.map_count(n, k) for k in range(N + 1)))
    sets = [tuple(tuple(r) for r in fs.maps_array(n, k).tolist()) for k in range(N + 1)]
    labels = [[str(fs.PointedMap(n, k, r)) for r in s] for k, s in enumerate(sets)]
    tables = {}
    for k in range(N + 1):
        elems = fs.maps_array(n, k)
        for j in range(N + 1):
            psis = fs.maps_array(k, j)
            tables[(k, j)] = fs.map_index(psis[:, elems], j)
    return TabulatedModule(sets, tables, labels, name=f"corep<{n}>")


def wedge_sum(X: TabulatedModule, copies: int) -> TabulatedModule:
    """Pointwise coproduct of ``copies`` copies of X (basepoints identified)."""
    if copies < 1:
        raise ModuleError("need at least one summand")
    sets, labels, offsets = [], [], []
    for n in range(X.N + 1):
        base = X.sets[n][0]
        elems = [base] + [(q, x) for q in range(1, copies + 1) for x in X.sets[n][1:]]
        labs = [X.labels[n][0]] + [f"{q}:{lab}" for q in range(1, copies + 1) for lab in X.labels[n][1:]]
        sets.append(elems)
        labels.append(labs)
        offsets.append(X.size(n) - 1)
    tables = {}
    for n in range(X.N + 1):
        for m in range(X.N + 1):
            A = X.table(n, m)
            rest = A[:, 1:]
            blocks = [np.zeros((A.shape[0], 1), dtype=np.int64)]
            for q in range(copies):
                blocks.append(np.where(rest == 0, 0, rest + q * offsets[m]))
            tables[(n, m)] = np.concatenate(blocks, axis=1)
    return TabulatedModule(sets, tables, labels, name=f"{X.name}^v{copies}")


def generated_submodule(X: TabulatedModule, k: int) -> TabulatedModule:
    """The smallest submodule containing level k: images of X_k under every <k> -> <n>."""
    if not 0 <= k <= X.N:
        raise ModuleError(f"no level {k} in a module truncated at {X.N}")
    keep = []
    for n in range(X.N + 1):
        hit = np.zeros(X.size(n), dtype=bool)
        hit[X.table(k, n).ravel()] = True
        keep.append(np.flatnonzero(hit))
    new_index = []
    for n, kept in enumerate(keep):
        pos = np.full(X.size(n), -1, dtype=np.int64)
        pos[kept] = np.arange(len(kept))
        new_index.append(pos)
    tables = {(n, m): new_index[m][X.table(n, m)[:, keep[n]]] for n in range(X.N + 1) for m in range(X.N + 1)}
    sets = [[X.sets[n][z] for z in kept] for n, kept in enumerate(keep)]
    labels = [[X.labels[n][z] for z in kept] for n, kept in enumerate(keep)]
    return TabulatedModule(sets, tables, labels, name=f"<{X.name}>_{k}")


@dataclass
class GLReport:
    n: int
    N: int
    order: int
    automorphisms: list[ModuleMorphism]
    permutation_image: dict[tuple[int, ...], ModuleMorphism] = field(repr=False)
    group_axioms: bool
    isomorphic_to_symmetric: bool


def _summand_permutation(W: TabulatedModule, X: TabulatedModule, sigma: Sequence[int]) -> ModuleMorphism:
    comps = []
    for k in range(W.N + 1):
        per = X.size(k) - 1
        comp = [0]
        for q in range(len(sigma)):
            for x in range(per):
                comp.append(1 + sigma[q] * per + x)
        comps.append(tuple(comp))
    return ModuleMorphism(W, W, tuple(comps))


def gl_n(n: int, N: int = 3, budget: int | None = None) -> GLReport:
    """Natural automorphisms of the n-fold wedge of F_1, truncated at level N."""
    if n < 1:
        raise ModuleError("n must be >= 1")
    X = f1_module(N)
    W = wedge_sum(X, n)
    endos = enumerate_module_morphisms(W, W, budget)
    autos = [g for g in endos if g.is_bijective()]
    found = set(autos)
    ident = ModuleMorphism.identity(W)
    closed = ident in found and all(g.compose(h) in found for g in autos for h in autos)
    has_inv = all(any(g.compose(h) == ident and h.compose(g) == ident for h in autos) for g in autos)
    perms = {}
    for sigma in itertools.permutations(range(n)):
        perms[sigma] = _summand_permutation(W, X, sigma)
    images = list(perms.values())
    hom = all(
        perms[tuple(s[t[q]] for q in range(n))] == perms[s].compose(perms[t]) for s in perms for t in perms
    )
    iso = hom and len(set(images)) == len(images) and set(images) == found
    return GLReport(n, N, len(autos), autos, perms, closed and has_inv, iso)
