"""Orbits on the real torus R^{2m}/Z^{2m} in lattice coordinates.

Exact mode works with rationals and is used for every period or torsion
claim. Float mode only feeds the equidistribution statistics.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Optional, Sequence, Union

import numpy as np

from . import linalg
from .cmtorus import LatticeAutomorphism
from .numberfield import FieldElement, minimal_polynomial


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple
    mode: str = "exact"

    def __post_init__(self):
        if self.mode == "exact":
            coords = tuple(Fraction(c) % 1 for c in self.coords)
        elif self.mode == "float":
            coords = tuple(float(c) % 1.0 for c in self.coords)
        elif self.mode == "symbolic":
            coords = tuple(self.coords)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class NonTorsion:
    coordinate: int
    minimal_polynomial: str


@dataclass(frozen=True)
class Translation:
    shift: TorusPoint

    @property
    def dimension(self) -> int:
        return self.shift.dimension


def torsion_order(a: TorusPoint):
    """Order of ``a`` in the group R^n/Z^n.

    Symbolic coordinates are field elements (standing for one of their real
    embeddings); one of degree > 1 is irrational, so the point has infinite order.
    """
    if a.mode == "float":
        raise ValueError("torsion is undecidable for floating-point coordinates")
    if a.mode == "symbolic":
        rational = []
        for i, c in enumerate(a.coords):
            if isinstance(c, FieldElement):
                mu = minimal_polynomial(c)
                if mu.degree > 1:
                    return NonTorsion(i, str(mu))
                c = c.coords[0]
            rational.append(Fraction(c))
        a = TorusPoint(tuple(rational))
    return reduce(math.lcm, (c.denominator for c in a.coords), 1)


def _matrix(map_):
    if isinstance(map_, LatticeAutomorphism):
        return map_.matrix
    return linalg.as_matrix(map_)


def _step_exact(map_, x):
    if isinstance(map_, Translation):
        return tuple((a + b) % 1 for a, b in zip(x, map_.shift.coords))
    return tuple(v % 1 for v in linalg.matvec(_matrix(map_), x))


@dataclass(frozen=True)
class Orbit:
    mode: str
    steps: int
    final: TorusPoint
    period: Optional[int] = None
    preperiod: Optional[int] = None
    points: tuple = ()


def _dimension(map_) -> int:
    if isinstance(map_, Translation):
        return map_.dimension
    return len(_matrix(map_))


def iterate(map_, start: TorusPoint, n: int, mode: Optional[str] = None) -> Orbit:
    """Iterate up to ``n`` times; exact mode stops at the first repeated point."""
    mode = mode or start.mode
    if n <= 0:
        raise ValueError("n must be positive")
    if _dimension(map_) != start.dimension:
        raise ValueError(f"dimension mismatch: map {_dimension(map_)}, point {start.dimension}")
    if mode == "exact":
        if start.mode != "exact":
            raise ValueError("exact iteration needs a rational start point")
        seen = {start.coords: 0}
        points = [start.coords]
        x = start.coords
        for t in range(1, n + 1):
            x = _step_exact(map_, x)
            if x in seen:
                first = seen[x]
                return Orbit("exact", t, TorusPoint(x), t - first, first, tuple(points))
            seen[x] = t
            points.append(x)
        return Orbit("exact", n, TorusPoint(x), None, None, tuple(points))
    if mode == "float":
        orbit = float_orbit(map_, np.array(start.coords, dtype=float), n)
        return Orbit("float", n, TorusPoint(tuple(float(v) for v in orbit[-1]), "float"))
    raise ValueError(f"unknown mode {mode!r}")


def inverse_map(L: LatticeAutomorphism) -> tuple:
    inv = linalg.inverse(L.matrix)
    if any(isinstance(x, Fraction) for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return inv


def float_orbit(map_, start, n: int) -> np.ndarray:
    """Rows x_0 .. x_{n-1} of the orbit, reduced mod 1 with extended-precision accumulation."""
    dim = len(start)
    out = np.empty((n, dim), dtype=np.longdouble)
    x = np.asarray(start, dtype=np.longdouble) % 1
    if isinstance(map_, Translation):
        step = np.asarray(map_.shift.coords if map_.shift.mode != "symbolic" else [], dtype=np.longdouble)
        for t in range(n):
            out[t] = x
            x = _wrap(x + step)
        return out
    mat = np.asarray(_matrix(map_), dtype=np.longdouble)
    for t in range(n):
        out[t] = x
        x = _wrap(mat @ x)
    return out


def _wrap(x):
    x = x % 1
    # a tiny negative value can round up to exactly 1
    x[x >= 1] = 0
    return x


@dataclass(frozen=True)
class OrbitStats:
    iterations: int
    cells_per_axis: int
    hit_fraction: Fraction
    discrepancy: Fraction
    seed: Optional[int] = None
    period: Optional[int] = None
    counts: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        out = {
            "iterations": self.iterations,
            "cells_per_axis": self.cells_per_axis,
            "hit_fraction": str(self.hit_fraction),
            "discrepancy": str(self.discrepancy),
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.period is not None:
            out["period"] = self.period
        return out


def random_start(dim: int, seed: int) -> TorusPoint:
    rng = np.random.default_rng(seed)
    return TorusPoint(tuple(float(v) for v in rng.random(dim)), "float")


def equidistribution(map_, start: Optional[TorusPoint], N: int, k: int, seed: Optional[int] = None) -> OrbitStats:
    """Fraction of the k^dim grid cells visited by N orbit points, and the max cell deviation.

    Without ``start`` the orbit begins at a seeded uniform random point.
    """
    dim = _dimension(map_)
    cells = k ** dim
    if N < cells:
        raise ValueError(f"N = {N} too small for {cells} cells; need N >= {cells}")
    if start is None:
        if seed is None:
            raise ValueError("a seed is required without an explicit start point")
        start = random_start(dim, seed)
    if start.mode != "float":
        start = TorusPoint(tuple(float(c) for c in start.coords), "float")
    orbit = float_orbit(map_, np.array(start.coords), N)
    idx = np.minimum((orbit * k).astype(np.int64), k - 1)
    flat = np.ravel_multi_index(idx.T, (k,) * dim)
    counts = np.bincount(flat, minlength=cells)
    hit = Fraction(int(np.count_nonzero(counts)), cells)
    # exact rational max |count/N - 1/cells|
    worst = max(abs(Fraction(int(c), N) - Fraction(1, cells)) for c in (counts.max(), counts.min()))
    return OrbitStats(N, k, hit, worst, seed, None, tuple(int(c) for c in counts))


def write_counts_csv(stats: OrbitStats, path, dim: int):
    k = stats.cells_per_axis
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"i{d}" for d in range(dim)] + ["count"])
        for flat, c in enumerate(stats.counts):
            w.writerow(list(np.unravel_index(flat, (k,) * dim)) + [c])


def rational_grid(dim: int, q: int):
    """All points with coordinates in (1/q)Z / Z."""
    for coords in product(range(q), repeat=dim):
        yield TorusPoint(tuple(Fraction(c, q) for c in coords))
