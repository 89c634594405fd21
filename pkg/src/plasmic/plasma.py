"""Finite plasmas: weakly unital commutative hypermagmas.

A plasma on ``k`` elements is stored as labels plus the upper triangle of its
hyperoperation table; each hypersum is a bitmask over element indices. The
weak unit is always index 0.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ._bits import Budget, members

__all__ = [
    "Plasma",
    "PlasmaError",
    "PlasmaMorphism",
    "PropertyReport",
    "check_properties",
    "inverse_assignments",
    "enumerate_morphisms",
    "classify_maps_to_linear_tree",
    "build_plasma",
    "krasner",
    "psi_f1",
    "boolean",
    "z_mod",
    "power_set",
    "linear_tree",
    "poset",
    "recover_order",
    "tree",
    "monoid",
    "from_json",
]


class PlasmaError(ValueError):
    """Raised for malformed plasma data or failed axioms."""


class Plasma:
    """An immutable finite plasma with unit at index 0."""

    __slots__ = ("name", "labels", "_tri", "__dict__")

    def __init__(self, labels: Sequence[str], table, name: str = ""):
        labels = tuple(str(x) for x in labels)
        k = len(labels)
        if k == 0:
            raise PlasmaError("a plasma needs at least the unit element")
        if len(set(labels)) != k:
            raise PlasmaError(f"duplicate element labels in {labels}")
        full = (1 << k) - 1
        tri = []
        for i in range(k):
            for j in range(i + 1):
                a, b = _lookup(table, i, j), _lookup(table, j, i)
                if a != b:
                    raise PlasmaError(
                        f"table is not symmetric: {labels[i]}+{labels[j]} differs from "
                        f"{labels[j]}+{labels[i]}"
                    )
                if a & ~full or a < 0:
                    raise PlasmaError(f"hypersum {labels[i]}+{labels[j]} names unknown elements")
                tri.append(a)
        self.labels = labels
        self.name = name
        self._tri = tuple(tri)
        for i in range(k):
            if not self.sum(0, i) >> i & 1:
                raise PlasmaError(f"weak unitality fails: {labels[i]} not in {labels[0]}+{labels[i]}")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def unit(self) -> int:
        return 0

    def sum(self, i: int, j: int) -> int:
        if i < j:
            i, j = j, i
        return self._tri[i * (i + 1) // 2 + j]

    @cached_property
    def table(self) -> tuple[tuple[int, ...], ...]:
        """Dense symmetric table of hypersum bitmasks."""
        k = len(self)
        return tuple(tuple(self.sum(i, j) for j in range(k)) for i in range(k))

    def sum_sets(self, a: int, b: int) -> int:
        """Union of x+y over x in mask ``a`` and y in mask ``b``."""
        out = 0
        for x in members(a):
            row = self.table[x]
            for y in members(b):
                out |= row[y]
        return out

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise PlasmaError(f"no element labelled {label!r}") from None

    def format_set(self, mask: int) -> str:
        return "{" + ",".join(self.labels[i] for i in members(mask)) + "}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Plasma):
            return NotImplemented
        return self.labels == other.labels and self._tri == other._tri

    def __hash__(self) -> int:
        return hash((self.labels, self._tri))

    def __repr__(self) -> str:
        return f"Plasma({self.name or 'unnamed'}, {len(self)} elements)"

    def sum_table_str(self) -> str:
        w = max(len(self.format_set(m)) for row in self.table for m in row)
        w = max(w, max(map(len, self.labels)))
        lines = [" " * w + " | " + " ".join(x.rjust(w) for x in self.labels)]
        for i, row in enumerate(self.table):
            lines.append(self.labels[i].rjust(w) + " | " + " ".join(self.format_set(m).rjust(w) for m in row))
        return "\n".join(lines)

    def to_json(self) -> dict:
        out = {}
        for i in range(len(self)):
            for j in range(i, len(self)):
                s = self.sum(i, j)
                if s or i == 0:
                    out[f"{self.labels[i]},{self.labels[j]}"] = [self.labels[x] for x in members(s)]
        return {"name": self.name, "elements": list(self.labels), "unit": self.labels[0], "sum": out}

    def is_isomorphic_to(self, other: Plasma) -> bool:
        return find_isomorphism(self, other) is not None


def _lookup(table, i, j) -> int:
    if isinstance(table, Mapping):
        return table.get((i, j), table.get((j, i), 0))
    return table[i][j]


def find_isomorphism(p: Plasma, q: Plasma) -> tuple[int, ...] | None:
    """A bijection p -> q carrying hypersums to hypersums, if one exists."""
    k = len(p)
    if k != len(q):
        return None
    for rest in itertools.permutations(range(1, k)):
        f = (0,) + rest
        if all(
            _image(f, p.sum(i, j)) == q.sum(f[i], f[j]) for i in range(k) for j in range(i + 1)
        ):
            return f
    return None


def _image(f: Sequence[int], mask: int) -> int:
    out = 0
    for x in members(mask):
        out |= 1 << f[x]
    return out


@dataclass(frozen=True)
class PlasmaMorphism:
    """A unit-preserving map with f(a+b) contained in f(a)*f(b)."""

    source: Plasma
    target: Plasma
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        bad = _morphism_violation(self.source, self.target, self.map)
        if bad is not None:
            raise PlasmaError(f"not a plasma morphism: {bad}")

    def __call__(self, i: int) -> int:
        return self.map[i]

    def compose(self, first: PlasmaMorphism) -> PlasmaMorphism:
        """``self`` after ``first``."""
        if first.target != self.source:
            raise PlasmaError("morphisms are not composable")
        return PlasmaMorphism(first.source, self.target, tuple(self.map[x] for x in first.map))

    @classmethod
    def identity(cls, p: Plasma) -> PlasmaMorphism:
        return cls(p, p, tuple(range(len(p))))

    def __str__(self) -> str:
        return "[" + ",".join(self.target.labels[y] for y in self.map) + "]"


def _morphism_violation(p: Plasma, q: Plasma, f: Sequence[int]) -> str | None:
    if len(f) != len(p) or any(not 0 <= y < len(q) for y in f):
        return "map has the wrong shape"
    if f[0] != 0:
        return "unit not preserved"
    for a in range(len(p)):
        for b in range(a + 1):
            if _image(f, p.sum(a, b)) & ~q.sum(f[a], f[b]):
                return f"f({p.labels[a]}+{p.labels[b]}) not inside f({p.labels[a]})*f({p.labels[b]})"
    return None


def is_morphism(p: Plasma, q: Plasma, f: Sequence[int]) -> bool:
    return _morphism_violation(p, q, f) is None


# -- properties ---------------------------------------------------------------


@dataclass(frozen=True)
class PropertyReport:
    commutative: bool
    weakly_unital: bool
    associative: bool
    strictly_unital: bool
    total: bool
    deterministic: bool
    reversible: bool
    mosaic: bool
    monoid: bool
    witnesses: dict = field(default_factory=dict)
    inverse: tuple[int, ...] | None = None
    inverse_count: int = 0

    FLAGS = (
        "commutative",
        "weakly_unital",
        "associative",
        "strictly_unital",
        "total",
        "deterministic",
        "reversible",
        "mosaic",
        "monoid",
    )

    def flags(self) -> dict[str, bool]:
        return {f: getattr(self, f) for f in self.FLAGS}


def _inverse_candidates(p: Plasma) -> list[int]:
    """Per-element masks of admissible inverses.

    Each clause of reversibility mentions a single inverse: ``b in a + c^-1``
    constrains only c^-1 and ``c in b^-1 + a`` only b^-1, so the admissible
    values can be filtered element by element.
    """
    k = len(p)
    t = p.table
    cand = [(1 << k) - 1] * k
    for b in range(k):
        for c in range(k):
            for a in members(t[b][c]):
                # b in a + c^-1
                ok = 0
                for u in members(cand[c]):
                    if t[a][u] >> b & 1:
                        ok |= 1 << u
                cand[c] = ok
                # c in b^-1 + a
                ok = 0
                for u in members(cand[b]):
                    if t[u][a] >> c & 1:
                        ok |= 1 << u
                cand[b] = ok
    return cand


def inverse_assignments(p: Plasma, budget: int | None = None):
    """Yield every inverse function making ``p`` reversible, lexicographically."""
    cand = _inverse_candidates(p)
    bud = Budget(budget, "inverse search")
    current = [0] * len(p)

    def extend(i):
        if i == len(p):
            yield tuple(current)
            return
        for u in members(cand[i]):
            bud.tick()
            current[i] = u
            yield from extend(i + 1)

    yield from extend(0)


def check_properties(p: Plasma) -> PropertyReport:
    k = len(p)
    t = p.table
    w: dict[str, tuple] = {}
    lab = p.labels

    commutative = True  # symmetric by construction
    weakly_unital = all(t[0][a] >> a & 1 for a in range(k))

    associative = True
    for a, b, c in itertools.product(range(k), repeat=3):
        lhs = p.sum_sets(t[a][b], 1 << c)
        rhs = p.sum_sets(1 << a, t[b][c])
        if lhs != rhs:
            associative = False
            w["associative"] = (lab[a], lab[b], lab[c], p.format_set(lhs), p.format_set(rhs))
            break

    strictly_unital = True
    for a in range(k):
        if t[0][a] != 1 << a:
            strictly_unital = False
            w["strictly_unital"] = (lab[a], p.format_set(t[0][a]))
            break

    total = deterministic = True
    for a in range(k):
        for b in range(a, k):
            s = t[a][b]
            if total and s == 0:
                total = False
                w["total"] = (lab[a], lab[b])
            if deterministic and s.bit_count() > 1:
                deterministic = False
                w["deterministic"] = (lab[a], lab[b], p.format_set(s))

    cand = _inverse_candidates(p)
    inverse_count = 1
    for c in cand:
        inverse_count *= c.bit_count()
    reversible = inverse_count > 0
    inverse = None
    if reversible:
        inverse = next(inverse_assignments(p))
    else:
        bad = next(i for i, c in enumerate(cand) if c == 0)
        w["reversible"] = (lab[bad],)

    return PropertyReport(
        commutative=commutative,
        weakly_unital=weakly_unital,
        associative=associative,
        strictly_unital=strictly_unital,
        total=total,
        deterministic=deterministic,
        reversible=reversible,
        mosaic=strictly_unital and reversible,
        monoid=total and deterministic and associative,
        witnesses=w,
        inverse=inverse,
        inverse_count=inverse_count,
    )


# -- morphisms ----------------------------------------------------------------


def enumerate_morphisms(p: Plasma, q: Plasma, budget: int | None = None) -> list[PlasmaMorphism]:
    """All plasma morphisms p -> q, in lexicographic order of the map vector.

    Depth-first over p's elements; a pair (a, b) is checked as soon as a, b
    and every element of a+b have images.
    """
    k, kq = len(p), len(q)
    bud = Budget(budget, f"Plas({p.name or 'p'}, {q.name or 'q'})")
    ready: list[list[tuple[int, int, int]]] = [[] for _ in range(k)]
    for a in range(k):
        for b in range(a + 1):
            s = p.sum(a, b)
            r = max(a, s.bit_length() - 1)
            ready[r].append((a, b, s))
    qt = q.table
    f = [0] * k
    out: list[tuple[int, ...]] = []

    def ok(i):
        for a, b, s in ready[i]:
            allowed = qt[f[a]][f[b]]
            for x in members(s):
                if not allowed >> f[x] & 1:
                    return False
        return True

    def extend(i):
        if i == k:
            out.append(tuple(f))
            return
        for y in range(kq):
            bud.tick()
            f[i] = y
            if ok(i):
                extend(i + 1)

    f[0] = 0
    bud.tick()
    if ok(0):
        extend(1)
    return [_trusted(p, q, m) for m in out]


def _trusted(p, q, m) -> PlasmaMorphism:
    # skip re-validation for maps the search already checked
    obj = object.__new__(PlasmaMorphism)
    object.__setattr__(obj, "source", p)
    object.__setattr__(obj, "target", q)
    object.__setattr__(obj, "map", m)
    return obj


def classify_maps_to_linear_tree(p: Plasma, n: int, budget: int | None = None):
    """Plasma maps p -> T_n as ordered partitions (U_0, ..., U_n) of p.

    Each partition is checked against the three interval conditions, and the
    partitions are compared with a brute-force enumeration of all functions
    into {0..n}.
    """
    if n < 1:
        raise PlasmaError("linear tree needs n >= 1")
    tn = linear_tree(n)
    homs = enumerate_morphisms(p, tn, budget)
    parts = [tuple(frozenset(x for x in range(len(p)) if f.map[x] == i) for i in range(n + 1)) for f in homs]
    for u in parts:
        if not _interval_conditions(p, u):
            raise RuntimeError(f"morphism partition {u} violates the interval conditions")
    Budget(budget, "T_n partitions").require((n + 1) ** (len(p) - 1))
    brute = []
    for rest in itertools.product(range(n + 1), repeat=len(p) - 1):
        g = (0,) + rest
        u = tuple(frozenset(x for x in range(len(p)) if g[x] == i) for i in range(n + 1))
        if _interval_conditions(p, u):
            brute.append(u)
    if sorted(map(_part_key, brute)) != sorted(map(_part_key, parts)):
        raise RuntimeError("morphisms into T_n and interval partitions disagree")
    return parts


def _part_key(u):
    return tuple(tuple(sorted(b)) for b in u)


def _interval_conditions(p: Plasma, u) -> bool:
    if 0 not in u[0]:
        return False
    where = {x: i for i, block in enumerate(u) for x in block}
    for x in range(len(p)):
        for y in range(len(p)):
            i, j = sorted((where[x], where[y]))
            allowed = set().union(*u[i : j + 1])
            if not set(members(p.sum(x, y))) <= allowed:
                return False
    return True


# -- builders -----------------------------------------------------------------


def krasner() -> Plasma:
    return Plasma(["0", "1"], [[0b01, 0b10], [0b10, 0b11]], name="krasner")


def psi_f1() -> Plasma:
    return Plasma(["0", "1"], [[0b01, 0b10], [0b10, 0]], name="psi_f1")


def boolean() -> Plasma:
    return Plasma(["0", "1"], [[0b01, 0b10], [0b10, 0b10]], name="boolean")


def z_mod(n: int) -> Plasma:
    if n < 1:
        raise PlasmaError("Z/n needs n >= 1")
    return Plasma([str(i) for i in range(n)], [[1 << ((i + j) % n) for j in range(n)] for i in range(n)], name=f"z_mod({n})")


def power_set(n: int) -> Plasma:
    """Subsets of [n] with X+Y = {X u Y} if disjoint, else no result.

    Element index equals the subset's bitmask, so the labels 0..2^n-1 match
    the usual numbering (for n = 2: 0, {1}, {2}, {1,2} are 0, 1, 2, 3).
    """
    if n < 0:
        raise PlasmaError("power_set needs n >= 0")
    k = 1 << n
    table = [[(1 << (x | y)) if not x & y else 0 for y in range(k)] for x in range(k)]
    return Plasma([str(x) for x in range(k)], table, name=f"power_set({n})")


def linear_tree(n: int) -> Plasma:
    if n < 0:
        raise PlasmaError("linear_tree needs n >= 0")
    table = [[((1 << (max(i, j) + 1)) - 1) ^ ((1 << min(i, j)) - 1) for j in range(n + 1)] for i in range(n + 1)]
    return Plasma([str(i) for i in range(n + 1)], table, name=f"linear_tree({n})")


def _ordered(labels: Iterable, first) -> list[str]:
    rest = sorted(str(x) for x in labels if str(x) != str(first))
    return [str(first)] + rest


def poset(relation: Iterable[tuple], elements: Iterable | None = None, least=None) -> Plasma:
    """Interval plasma of a finite poset: x+y = {z : x<=z<=y or y<=z<=x}.

    ``relation`` lists pairs (x, y) meaning x <= y; its reflexive-transitive
    closure must be antisymmetric and have a least element.
    """
    pairs = [(str(x), str(y)) for x, y in relation]
    elems = {str(e) for e in elements} if elements is not None else set()
    for x, y in pairs:
        elems.update((x, y))
    leq = {(x, x) for x in elems} | set(pairs)
    changed = True
    while changed:
        changed = False
        for x, y in list(leq):
            for y2, z in list(leq):
                if y == y2 and (x, z) not in leq:
                    leq.add((x, z))
                    changed = True
    for x, y in leq:
        if x != y and (y, x) in leq:
            raise PlasmaError(f"relation is not antisymmetric: {x} <= {y} <= {x}")
    bottoms = [e for e in elems if all((e, x) in leq for x in elems)]
    if not bottoms:
        raise PlasmaError("poset has no least element")
    if least is not None and str(least) != bottoms[0]:
        raise PlasmaError(f"{least!r} is not the least element")
    labels = _ordered(elems, bottoms[0])
    k = len(labels)
    table = [
        [
            sum(
                1 << z
                for z in range(k)
                if ((labels[x], labels[z]) in leq and (labels[z], labels[y]) in leq)
                or ((labels[y], labels[z]) in leq and (labels[z], labels[x]) in leq)
            )
            for y in range(k)
        ]
        for x in range(k)
    ]
    return Plasma(labels, table, name="poset")


def recover_order(p: Plasma) -> set[tuple[str, str]]:
    """Read the order back off an interval plasma.

    The two-element hypersums are exactly the covering pairs; each is
    oriented by checking which end lies in the interval from the unit.
    """
    covers = set()
    for x in range(len(p)):
        for y in range(x):
            s = p.sum(x, y)
            if s.bit_count() == 2:
                lo, hi = (x, y) if p.sum(0, y) >> x & 1 else (y, x)
                covers.add((lo, hi))
    leq = {(x, x) for x in range(len(p))} | covers
    changed = True
    while changed:
        changed = False
        for a, b in list(leq):
            for b2, c in list(leq):
                if b == b2 and (a, c) not in leq:
                    leq.add((a, c))
                    changed = True
    return {(p.labels[a], p.labels[b]) for a, b in leq}


def tree(edges: Iterable[tuple], root) -> Plasma:
    """Path plasma of a tree: v+w is the set of vertices on the path v..w."""
    edges = [(str(u), str(v)) for u, v in edges]
    verts = {str(root)}
    for u, v in edges:
        verts.update((u, v))
    if len(edges) != len(verts) - 1:
        raise PlasmaError("tree must have exactly |V|-1 edges")
    adj: dict[str, list[str]] = {v: [] for v in verts}
    for u, v in edges:
        if u == v:
            raise PlasmaError("tree has a loop")
        adj[u].append(v)
        adj[v].append(u)
    labels = _ordered(verts, root)
    idx = {v: i for i, v in enumerate(labels)}
    # parent pointers from the root; connectivity check
    parent = {labels[0]: None}
    depth = {labels[0]: 0}
    stack = [labels[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                depth[w] = depth[v] + 1
                stack.append(w)
    if len(parent) != len(verts):
        raise PlasmaError("tree is not connected")

    def path(a, b):
        m = 0
        while depth[a] > depth[b]:
            m |= 1 << idx[a]
            a = parent[a]
        while depth[b] > depth[a]:
            m |= 1 << idx[b]
            b = parent[b]
        while a != b:
            m |= 1 << idx[a] | 1 << idx[b]
            a, b = parent[a], parent[b]
        return m | 1 << idx[a]

    table = [[path(a, b) for b in labels] for a in labels]
    return Plasma(labels, table, name="tree")


def monoid(table: Sequence[Sequence], labels: Sequence | None = None, name: str = "monoid") -> Plasma:
    """A commutative monoid from its Cayley table; ``labels[0]`` is the unit.

    Entries may be labels or indices. Associativity is not assumed here;
    ``check_properties`` reports it.
    """
    k = len(table)
    labels = [str(x) for x in (labels if labels is not None else range(k))]
    pos = {lab: i for i, lab in enumerate(labels)}

    def as_index(v):
        if isinstance(v, int) and not isinstance(v, bool):
            return v
        if str(v) in pos:
            return pos[str(v)]
        raise PlasmaError(f"unknown monoid element {v!r}")

    dense = [[1 << as_index(table[i][j]) for j in range(k)] for i in range(k)]
    return Plasma(labels, dense, name=name)


def from_json(data: Mapping | str) -> Plasma:
    """Load the plasma JSON format.

    Keys of ``sum`` are ``"a,b"``; each unordered pair may appear once.
    Missing pairs are empty, except pairs with the unit, which must be given
    unless ``strict_unit`` is true (then ``unit + x`` defaults to ``{x}``).
    The unit is moved to index 0; other elements keep their listed order.
    """
    if isinstance(data, str):
        data = json.loads(data)
    try:
        elements = [str(x) for x in data["elements"]]
        unit = str(data["unit"])
        sums = data.get("sum", {})
    except (KeyError, TypeError) as exc:
        raise PlasmaError(f"plasma JSON missing field: {exc}") from None
    if unit not in elements:
        raise PlasmaError(f"unit {unit!r} is not an element")
    if any("," in e for e in elements):
        raise PlasmaError("element labels may not contain ','")
    labels = [unit] + [e for e in elements if e != unit]
    pos = {lab: i for i, lab in enumerate(labels)}
    table: dict[tuple[int, int], int] = {}
    for key, vals in sums.items():
        parts = [s.strip() for s in key.split(",")]
        if len(parts) != 2 or any(s not in pos for s in parts):
            raise PlasmaError(f"bad sum key {key!r}")
        i, j = pos[parts[0]], pos[parts[1]]
        pair = (max(i, j), min(i, j))
        if pair in table:
            raise PlasmaError(f"pair {key!r} given twice")
        m = 0
        for v in vals:
            if str(v) not in pos:
                raise PlasmaError(f"unknown element {v!r} in sum {key!r}")
            m |= 1 << pos[str(v)]
        table[pair] = m
    for x in range(len(labels)):
        if (x, 0) not in table:
            if data.get("strict_unit"):
                table[(x, 0)] = 1 << x
            else:
                raise PlasmaError(f"sum {labels[0]},{labels[x]} missing (set strict_unit to default it)")
    return Plasma(labels, table, name=str(data.get("name", "")))


_DESCRIPTOR = re.compile(r"^\s*([a-z_0-9]+)\s*(?:[(:]\s*(\d+)\s*\)?)?\s*$")


def build_plasma(desc) -> Plasma:
    """Build a plasma from a descriptor.

    Strings: ``krasner``, ``psi_f1``, ``boolean``, ``z_mod(n)``,
    ``power_set(n)``, ``linear_tree(n)`` (``name:n`` also accepted).
    Dicts: ``{"kind": "poset", "relation": [[x, y], ...], "least": e}``,
    ``{"kind": "tree", "edges": [...], "root": r}``,
    ``{"kind": "monoid", "elements": [...], "table": [[...]]}``,
    or a raw plasma JSON object (``kind`` absent or ``"table"``).
    """
    if isinstance(desc, Plasma):
        return desc
    if isinstance(desc, str):
        m = _DESCRIPTOR.match(desc)
        if not m:
            raise PlasmaError(f"invalid plasma descriptor {desc!r}")
        name, arg = m.group(1), m.group(2)
        nullary = {"krasner": krasner, "psi_f1": psi_f1, "boolean": boolean}
        unary = {"z_mod": z_mod, "power_set": power_set, "linear_tree": linear_tree}
        if name in nullary and arg is None:
            return nullary[name]()
        if name in unary and arg is not None:
            return unary[name](int(arg))
        raise PlasmaError(f"invalid plasma descriptor {desc!r}")
    if isinstance(desc, Mapping):
        kind = desc.get("kind", "table")
        if kind == "poset":
            return poset(desc["relation"], desc.get("elements"), desc.get("least"))
        if kind == "tree":
            return tree(desc["edges"], desc["root"])
        if kind == "monoid":
            return monoid(desc["table"], desc.get("elements"), desc.get("name", "monoid"))
        if kind == "table":
            return from_json(desc)
    raise PlasmaError(f"invalid plasma descriptor {desc!r}")
