"""The category Fin_* of finite pointed sets <n> = {0, 1, ..., n}.

Maps are written by their image vector ``(0, f(1), ..., f(n))``. Composition
follows function notation: ``compose(g, f)`` is g after f.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from ._bits import Budget, subset_mask

__all__ = [
    "PointedMap",
    "identity",
    "compose",
    "generator",
    "rho",
    "rho_S",
    "rho_ST",
    "ALPHA",
    "I1",
    "I2",
    "TAU",
    "E",
    "ZETA",
    "enumerate_pointed_maps",
    "map_count",
    "maps_array",
    "map_index",
    "preimage",
]


@dataclass(frozen=True, order=True)
class PointedMap:
    n: int
    m: int
    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", img)
        if len(img) != self.n + 1:
            raise ValueError(f"image of a map from <{self.n}> needs {self.n + 1} entries, got {len(img)}")
        if img[0] != 0:
            raise ValueError("pointed maps send 0 to 0")
        if any(not 0 <= x <= self.m for x in img):
            raise ValueError(f"image entries must lie in <{self.m}>")

    def __call__(self, i: int) -> int:
        return self.image[i]

    def __str__(self) -> str:
        return f"{self.n}->{self.m}:[{','.join(map(str, self.image))}]"

    @classmethod
    def parse(cls, text: str) -> PointedMap:
        m = re.fullmatch(r"\s*(\d+)\s*->\s*(\d+)\s*:\s*\[([\d,\s]*)\]\s*", text)
        if not m:
            raise ValueError(f"cannot parse pointed map {text!r}")
        image = tuple(int(x) for x in m.group(3).split(",") if x.strip())
        return cls(int(m.group(1)), int(m.group(2)), image)

    @property
    def index(self) -> int:
        """Rank in the lexicographic enumeration of maps <n> -> <m>."""
        r = 0
        for x in self.image[1:]:
            r = r * (self.m + 1) + x
        return r

    def preimage(self, subset: int) -> int:
        return preimage(self, subset)

    def after(self, f: PointedMap) -> PointedMap:
        return compose(self, f)

    def is_bijective(self) -> bool:
        return self.n == self.m and len(set(self.image)) == self.n + 1


def identity(n: int) -> PointedMap:
    return PointedMap(n, n, tuple(range(n + 1)))


def compose(g: PointedMap, f: PointedMap) -> PointedMap:
    """g after f."""
    if f.m != g.n:
        raise ValueError(f"cannot compose {g} after {f}")
    return PointedMap(f.n, g.m, tuple(g.image[x] for x in f.image))


def preimage(phi: PointedMap, subset: int) -> int:
    """Bitmask of {i in [n] : phi(i) in T} for T a bitmask over [m]."""
    out = 0
    for i in range(1, phi.n + 1):
        t = phi.image[i]
        if t and subset >> (t - 1) & 1:
            out |= 1 << (i - 1)
    return out


def _as_mask(s) -> int:
    return s if isinstance(s, int) else subset_mask(s)


def rho(n: int, i: int) -> PointedMap:
    """<n> -> <1> sending i to 1 and everything else to 0."""
    if not 1 <= i <= n:
        raise ValueError(f"rho index {i} out of range for <{n}>")
    return PointedMap(n, 1, tuple(1 if j == i else 0 for j in range(n + 1)))


def rho_S(n: int, S) -> PointedMap:
    """<n> -> <1> with preimage of 1 equal to S (a bitmask or iterable)."""
    S = _as_mask(S)
    if S >> n:
        raise ValueError(f"subset out of range for <{n}>")
    return PointedMap(n, 1, (0,) + tuple((S >> (j - 1)) & 1 for j in range(1, n + 1)))


def rho_ST(n: int, S, T) -> PointedMap:
    """<n> -> <2> with S going to 1 and T to 2."""
    S, T = _as_mask(S), _as_mask(T)
    if S & T:
        raise ValueError("rho_ST needs disjoint S and T")
    if (S | T) >> n:
        raise ValueError(f"subset out of range for <{n}>")
    return PointedMap(n, 2, (0,) + tuple(1 if S >> (j - 1) & 1 else 2 if T >> (j - 1) & 1 else 0 for j in range(1, n + 1)))


ALPHA = PointedMap(2, 1, (0, 1, 1))
I1 = PointedMap(1, 2, (0, 1))
I2 = PointedMap(1, 2, (0, 2))
TAU = PointedMap(2, 2, (0, 2, 1))
E = PointedMap(0, 1, (0,))
ZETA = PointedMap(1, 0, (0, 0))

_NAMED = {"alpha": ALPHA, "i1": I1, "i2": I2, "tau": TAU, "e": E, "zeta": ZETA}


def generator(name: str, *params) -> PointedMap:
    """Named maps: rho_i(n, i), rho_S(n, S), rho_ST(n, S, T), alpha, i1, i2, tau, e, zeta."""
    if name in ("rho", "rho_i"):
        return rho(*params)
    if name == "rho_S":
        return rho_S(*params)
    if name == "rho_ST":
        return rho_ST(*params)
    if name in _NAMED:
        if params:
            raise ValueError(f"{name} takes no parameters")
        return _NAMED[name]
    raise ValueError(f"unknown generator {name!r}")


def map_count(n: int, m: int) -> int:
    return (m + 1) ** n


@lru_cache(maxsize=None)
def maps_array(n: int, m: int) -> np.ndarray:
    """Image vectors of all maps <n> -> <m>, one row each, lexicographic."""
    count = map_count(n, m)
    out = np.zeros((count, n + 1), dtype=np.int64)
    idx = np.arange(count)
    for i in range(n, 0, -1):
        out[:, i] = idx % (m + 1)
        idx //= m + 1
    out.flags.writeable = False
    return out


def map_index(images: np.ndarray, m: int) -> np.ndarray:
    """Lexicographic ranks of image rows (vectorised ``PointedMap.index``)."""
    images = np.asarray(images)
    r = np.zeros(images.shape[:-1], dtype=np.int64)
    for i in range(1, images.shape[-1]):
        r = r * (m + 1) + images[..., i]
    return r


def enumerate_pointed_maps(n: int, m: int, budget: int | None = None) -> list[PointedMap]:
    Budget(budget, f"Fin_*(<{n}>,<{m}>)").require(map_count(n, m))
    return [PointedMap(n, m, tuple(row)) for row in maps_array(n, m).tolist()]


def from_index(n: int, m: int, index: int) -> PointedMap:
    return PointedMap(n, m, tuple(maps_array(n, m)[index].tolist()))


@lru_cache(maxsize=None)
def preimage_table(n: int, m: int) -> np.ndarray:
    """``P[phi, T]`` = preimage bitmask of subset T of [m] under map phi."""
    imgs = maps_array(n, m)
    out = np.zeros((imgs.shape[0], 1 << m), dtype=np.int64)
    for T in range(1 << m):
        acc = np.zeros(imgs.shape[0], dtype=np.int64)
        for i in range(1, n + 1):
            t = imgs[:, i]
            hit = (t > 0) & ((T >> np.maximum(t - 1, 0)) & 1).astype(bool)
            acc |= np.where(hit, 1 << (i - 1), 0)
        out[:, T] = acc
    out.flags.writeable = False
    return out


def permutations(n: int) -> Iterable[PointedMap]:
    for row in maps_array(n, n):
        if len(set(row.tolist())) == n + 1:
            yield PointedMap(n, n, tuple(row.tolist()))
