"""Canonical simplices, colexicographic ranking, and weighted d-complexes.

Vertices are 0-based (the usual 1-based convention for vertex sets maps to
ours by subtracting one everywhere).  A k-simplex is a strictly increasing
tuple of k+1 vertex ids.  Its colexicographic rank is

    rank({v_0 < ... < v_k}) = sum_i C(v_i, i+1),

which does not depend on the ambient vertex count, so ranks compose across
different n.  A weighted d-complex stores only its present d-simplices and
their weights; the complete (d-1)-skeleton is implicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

Simplex = Tuple[int, ...]


def check_simplex(vertices: Sequence[int], n: int) -> None:
    v = tuple(vertices)
    if len(v) == 0:
        raise ValueError("empty vertex tuple")
    if any(b <= a for a, b in zip(v, v[1:])):
        raise ValueError("vertices must be strictly increasing: %r" % (v,))
    if v[0] < 0 or v[-1] >= n:
        raise ValueError("vertices out of range [0, %d): %r" % (n, v))


def rank_colex(vertices: Sequence[int]) -> int:
    """Colexicographic rank of a strictly increasing vertex tuple."""
    return sum(math.comb(v, i + 1) for i, v in enumerate(vertices))


def unrank_colex(r: int, k: int, n: int) -> Simplex:
    """Inverse of rank_colex for k-simplices over n vertices."""
    if not 0 <= r < math.comb(n, k + 1):
        raise ValueError("rank %d out of range for k=%d, n=%d" % (r, k, n))
    out = [0] * (k + 1)
    m = n
    for j in range(k + 1, 0, -1):
        # Largest m with C(m, j) <= r picks the j-th smallest remaining slot.
        m -= 1
        while math.comb(m, j) > r:
            m -= 1
        r -= math.comb(m, j)
        out[j - 1] = m
    return tuple(out)


def faces(tau: Sequence[int]) -> list:
    """Codimension-1 faces in deletion-index order (delete vertex 0 first)."""
    t = tuple(tau)
    return [t[:i] + t[i + 1:] for i in range(len(t))]


def cofacets(sigma: Sequence[int], n: int) -> list:
    """All d-simplices sigma + {v} in the complete complex, v not in sigma."""
    s = tuple(sigma)
    out = []
    for v in range(n):
        if v not in s:
            out.append(tuple(sorted(s + (v,))))
    return out


def cofacet_ranks(sigma: Sequence[int], n: int) -> np.ndarray:
    """Ranks of all cofacets of sigma, ascending."""
    return np.sort(np.array([rank_colex(t) for t in cofacets(sigma, n)],
                            dtype=np.int64))


@dataclass(frozen=True)
class WeightedComplex:
    """A d-complex over n vertices: present d-simplex ranks plus weights.

    `present` is sorted and duplicate-free; `weights` is aligned with it.
    Instances are immutable; add/remove return new complexes.
    """

    n: int
    d: int
    present: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        present = np.asarray(self.present, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "present", present)
        object.__setattr__(self, "weights", weights)
        if self.d < 1 or self.d >= self.n:
            raise ValueError("need 1 <= d < n")
        if present.shape != weights.shape:
            raise ValueError("present/weights shape mismatch")
        if present.size:
            if np.any(np.diff(present) <= 0):
                raise ValueError("present ranks must be sorted and unique")
            if present[0] < 0 or present[-1] >= math.comb(self.n, self.d + 1):
                raise ValueError("present rank out of range")
            if np.any(weights < 0):
                raise ValueError("negative weight")
        present.setflags(write=False)
        weights.setflags(write=False)

    @property
    def num_present(self) -> int:
        return int(self.present.size)

    def has(self, rank: int) -> bool:
        i = np.searchsorted(self.present, rank)
        return i < self.present.size and self.present[i] == rank

    def weight_of(self, rank: int) -> float:
        i = np.searchsorted(self.present, rank)
        if i >= self.present.size or self.present[i] != rank:
            raise KeyError("simplex rank %d not present" % rank)
        return float(self.weights[i])

    def with_simplex(self, rank: int, weight: float) -> "WeightedComplex":
        """The complex X + tau (replaces the weight if tau is present)."""
        i = int(np.searchsorted(self.present, rank))
        if i < self.present.size and self.present[i] == rank:
            w = self.weights.copy()
            w[i] = weight
            return WeightedComplex(self.n, self.d, self.present, w)
        return WeightedComplex(self.n, self.d,
                               np.insert(self.present, i, rank),
                               np.insert(self.weights, i, weight))

    def without_simplex(self, rank: int) -> "WeightedComplex":
        """The complex X - tau (no-op if tau is absent)."""
        i = int(np.searchsorted(self.present, rank))
        if i >= self.present.size or self.present[i] != rank:
            return self
        return WeightedComplex(self.n, self.d,
                               np.delete(self.present, i),
                               np.delete(self.weights, i))


def degree(X: WeightedComplex, sigma: Sequence[int]) -> int:
    """Number of present cofacets of the (d-1)-simplex sigma."""
    if len(tuple(sigma)) != X.d:
        raise ValueError("sigma must be a (d-1)-simplex")
    ranks = cofacet_ranks(sigma, X.n)
    idx = np.searchsorted(X.present, ranks)
    idx = np.minimum(idx, max(X.present.size - 1, 0))
    if X.present.size == 0:
        return 0
    return int(np.count_nonzero(X.present[idx] == ranks))


@dataclass(frozen=True)
class SubComplexView:
    """A subset of d-simplices of an (n, d) complex.

    If `lower_faces` is None, the view carries the full implicit (d-1)-
    skeleton (as for k-neighborhood balls).  Otherwise it lists exactly the
    (d-1)-simplex ranks of the subcomplex (as for M-balls and strongly
    connected components, which exclude ambient isolated simplices).
    """

    n: int
    d: int
    included: tuple
    weights: tuple
    lower_faces: Optional[frozenset] = None

    def __post_init__(self):
        if self.lower_faces is not None:
            need = set()
            for r in self.included:
                tau = unrank_colex(r, self.d, self.n)
                need.update(rank_colex(f) for f in faces(tau))
            if not need <= set(self.lower_faces):
                raise ValueError("lower_faces must contain every face of "
                                 "every included d-simplex")

    def face_count(self) -> int:
        """f_{d-1} of the viewed subcomplex."""
        if self.lower_faces is not None:
            return len(self.lower_faces)
        return math.comb(self.n, self.d)

    def as_complex(self) -> WeightedComplex:
        """The view as a weighted d-complex with the full implicit skeleton."""
        order = np.argsort(np.asarray(self.included, dtype=np.int64))
        ranks = np.asarray(self.included, dtype=np.int64)[order]
        w = np.asarray(self.weights, dtype=np.float64)[order]
        return WeightedComplex(self.n, self.d, ranks, w)


# ---------------------------------------------------------------------------
# complex file format

def write_complex(path, X: WeightedComplex) -> None:
    """Line-oriented text format: header `n=<n> d=<d>`, then one line per
    present d-simplex `v0,...,vd,weight` with vertices ascending."""
    with open(path, "w") as fh:
        fh.write("n=%d d=%d\n" % (X.n, X.d))
        for r, w in zip(X.present, X.weights):
            verts = unrank_colex(int(r), X.d, X.n)
            fh.write(",".join(str(v) for v in verts) + "," + repr(float(w))
                     + "\n")


def read_complex(path) -> WeightedComplex:
    with open(path) as fh:
        header = fh.readline().split()
        try:
            n = int(header[0].split("=")[1])
            d = int(header[1].split("=")[1])
        except (IndexError, ValueError):
            raise ValueError("malformed header: %r" % (header,))
        ranks = []
        weights = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            verts = tuple(int(p) for p in parts[:-1])
            if len(verts) != d + 1:
                raise ValueError("expected %d vertices: %r" % (d + 1, line))
            check_simplex(verts, n)
            ranks.append(rank_colex(verts))
            weights.append(float(parts[-1]))
    order = np.argsort(np.asarray(ranks, dtype=np.int64), kind="stable")
    ranks = np.asarray(ranks, dtype=np.int64)[order]
    if ranks.size and np.any(np.diff(ranks) == 0):
        raise ValueError("duplicate simplex in complex file")
    return WeightedComplex(n, d, ranks, np.asarray(weights)[order])


# ---------------------------------------------------------------------------
# vectorized enumeration tables

@dataclass(frozen=True)
class SimplexTable:
    """Colex-ordered enumeration of all d-simplices over n vertices, with
    per-simplex face ranks and per-face cofacet ranks, for vectorized
    statistics.  Cached per (n, d)."""

    n: int
    d: int
    verts: np.ndarray        # (N_d, d+1) vertex ids, row i = simplex rank i
    face_ranks: np.ndarray   # (N_d, d+1); column i deletes vertex i
    cofacet_ranks: np.ndarray  # (N_{d-1}, n-d) cofacet ranks per face rank

    @property
    def num_d(self) -> int:
        return self.verts.shape[0]

    @property
    def num_faces(self) -> int:
        return self.cofacet_ranks.shape[0]


@lru_cache(maxsize=32)
def simplex_table(n: int, d: int) -> SimplexTable:
    comb = np.zeros((n + 1, d + 3), dtype=np.int64)
    for v in range(n + 1):
        for j in range(min(v, d + 2) + 1):
            comb[v, j] = math.comb(v, j)
    verts = np.array(list(combinations(range(n), d + 1)), dtype=np.int64)
    cols = np.arange(d + 1)
    ranks = comb[verts, cols + 1].sum(axis=1)
    order = np.argsort(ranks)
    verts = verts[order]
    assert np.array_equal(ranks[order], np.arange(verts.shape[0]))

    # face with vertex i deleted: positions j < i keep index j, j > i drop one
    a = comb[verts, cols + 1]          # C(v_j, j+1)
    b = comb[verts, cols]              # C(v_j, j)
    ca = np.cumsum(a, axis=1)
    cb = np.cumsum(b, axis=1)
    prefix = np.hstack([np.zeros((verts.shape[0], 1), dtype=np.int64),
                        ca[:, :-1]])
    suffix = cb[:, -1:] - cb
    face_ranks = prefix + suffix

    flat = face_ranks.ravel()
    order = np.argsort(flat, kind="stable")
    nf = math.comb(n, d)
    assert flat.size == nf * (n - d)
    cof = (order // (d + 1)).astype(np.int64).reshape(nf, n - d)
    return SimplexTable(n, d, verts, face_ranks, cof)
