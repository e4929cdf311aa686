"""Path neighborhoods on (d-1)-simplices: balls, components, connectivity.

A path is a sequence of (d-1)-simplices whose consecutive unions are
distinct present d-simplices; its length is the number of steps.  Shortest
witnessing paths never repeat a d-simplex (repeating one would allow a
shortcut), so plain breadth-first search on the face adjacency graph
computes minimal path lengths; the brute-force path enumerator in the test
suite checks this equivalence.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .sampling import ModelParams
from .simplices import (Simplex, SubComplexView, WeightedComplex, faces,
                        rank_colex, unrank_colex)


def _face_adjacency(X: WeightedComplex) -> Dict[int, List[Tuple[int, tuple]]]:
    """face rank -> list of (d-simplex rank, ranks of its other faces)."""
    adj: Dict[int, List[Tuple[int, tuple]]] = {}
    for r in X.present:
        tau = unrank_colex(int(r), X.d, X.n)
        franks = [rank_colex(f) for f in faces(tau)]
        for i, fr in enumerate(franks):
            others = tuple(franks[:i] + franks[i + 1:])
            adj.setdefault(fr, []).append((int(r), others))
    return adj


def bfs_distances(X: WeightedComplex, source_rank: int,
                  max_dist: Optional[int] = None) -> Dict[int, int]:
    """Minimal path lengths from a source (d-1)-simplex to every reached one."""
    adj = _face_adjacency(X)
    dist = {source_rank: 0}
    queue = deque([source_rank])
    while queue:
        s = queue.popleft()
        ds = dist[s]
        if max_dist is not None and ds >= max_dist:
            continue
        for _, others in adj.get(s, ()):
            for o in others:
                if o not in dist:
                    dist[o] = ds + 1
                    queue.append(o)
    return dist


def connected_within(X: WeightedComplex, sigma: Sequence[int],
                     sigma_prime: Sequence[int], k: int) -> bool:
    """True iff a path of length <= k joins the two (d-1)-simplices in X."""
    s = rank_colex(tuple(sigma))
    t = rank_colex(tuple(sigma_prime))
    if s == t:
        return True
    if k <= 0:
        return False
    dist = bfs_distances(X, s, max_dist=k)
    return dist.get(t, k + 1) <= k


def ball_k(X: WeightedComplex, center: Sequence[int], k: int) -> SubComplexView:
    """B_k(center, X) over the full ambient skeleton.

    The center may be a (d-1)-simplex or a d-simplex (union over its faces).
    A present d-simplex tau' belongs to the ball iff some face of tau' is at
    BFS distance <= k-1 from a center face.
    """
    c = tuple(center)
    if len(c) == X.d:
        sources = [rank_colex(c)]
    elif len(c) == X.d + 1:
        sources = [rank_colex(f) for f in faces(c)]
    else:
        raise ValueError("center must have dimension d-1 or d")
    if k < 0:
        raise ValueError("k must be nonnegative")
    included = set()
    if k >= 1:
        adj = _face_adjacency(X)
        for src in sources:
            dist = bfs_distances(X, src, max_dist=k - 1)
            for fr, dval in dist.items():
                for tau_rank, _ in adj.get(fr, ()):
                    included.add(tau_rank)
    ranks = sorted(included)
    weights = tuple(X.weight_of(r) for r in ranks)
    return SubComplexView(X.n, X.d, tuple(ranks), weights, lower_faces=None)


def m_ball(X: WeightedComplex, center: Sequence[int], M: int) -> SubComplexView:
    """(X, center)_M: generated by the center and its reachable d-simplices.

    Unlike ball_k this does not carry the ambient skeleton: its (d-1)-
    simplices are the center face(s) plus the faces of included d-simplices.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    c = tuple(center)
    if len(c) == X.d:
        sources = [c]
    elif len(c) == X.d + 1:
        sources = faces(c)
    else:
        raise ValueError("center must have dimension d-1 or d")
    adj = _face_adjacency(X)
    included = set()
    lower = set(rank_colex(s) for s in sources)
    for src in sources:
        dist = bfs_distances(X, rank_colex(src), max_dist=M - 1)
        for fr, dval in dist.items():
            for tau_rank, others in adj.get(fr, ()):
                if tau_rank not in included:
                    included.add(tau_rank)
                    lower.add(fr)
                    lower.update(others)
    ranks = sorted(included)
    weights = tuple(X.weight_of(r) for r in ranks)
    return SubComplexView(X.n, X.d, tuple(ranks), weights,
                          lower_faces=frozenset(lower))


@dataclass(frozen=True)
class ComponentLabeling:
    """Partition of (d-1)-simplices into strong-connectivity classes.

    Only faces covered by some present d-simplex are listed explicitly;
    every uncovered face is its own singleton component and is accounted
    for by `num_singletons`.
    """

    n: int
    d: int
    labels: Dict[int, int]            # covered face rank -> component id
    comp_faces: List[List[int]]       # per component, its face ranks
    comp_simplices: List[List[int]]   # per component, its d-simplex ranks
    num_singletons: int

    @property
    def num_components(self) -> int:
        return len(self.comp_faces) + self.num_singletons


def components(X: WeightedComplex) -> ComponentLabeling:
    """Strongly connected components of X (singletons counted, not listed)."""
    adj = _face_adjacency(X)
    labels: Dict[int, int] = {}
    comp_faces: List[List[int]] = []
    comp_simplices: List[List[int]] = []
    seen_simplices = set()
    for start in adj:
        if start in labels:
            continue
        cid = len(comp_faces)
        face_list = []
        simp_list = []
        queue = deque([start])
        labels[start] = cid
        while queue:
            s = queue.popleft()
            face_list.append(s)
            for tau_rank, others in adj.get(s, ()):
                if tau_rank not in seen_simplices:
                    seen_simplices.add(tau_rank)
                    simp_list.append(tau_rank)
                for o in others:
                    if o not in labels:
                        labels[o] = cid
                        queue.append(o)
        comp_faces.append(sorted(face_list))
        comp_simplices.append(sorted(simp_list))
    covered = len(labels)
    num_singletons = math.comb(X.n, X.d) - covered
    return ComponentLabeling(X.n, X.d, labels, comp_faces, comp_simplices,
                             num_singletons)


def component_view(X: WeightedComplex, labeling: ComponentLabeling,
                   cid: int) -> SubComplexView:
    """One strongly connected component as an explicit-face subcomplex."""
    ranks = labeling.comp_simplices[cid]
    weights = tuple(X.weight_of(r) for r in ranks)
    return SubComplexView(X.n, X.d, tuple(ranks), weights,
                          lower_faces=frozenset(labeling.comp_faces[cid]))


# ---------------------------------------------------------------------------
# exact connection probability by exhaustive enumeration

GAMMA_ENUMERATION_GUARD = 24


def canonical_disjoint_pair(n: int, d: int) -> Tuple[Simplex, Simplex]:
    """Colex-first pair of vertex-disjoint (d-1)-simplices."""
    if n < 2 * d:
        raise ValueError("no disjoint (d-1)-simplex pair for n < 2d")
    return tuple(range(d)), tuple(range(d, 2 * d))


def _popcount(a: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(a).astype(np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    a = a.copy()
    while a.any():
        out += (a & 1).astype(np.int64)
        a >>= 1
    return out


def connection_counts(n: int, d: int, k: int,
                      sigma: Optional[Simplex] = None,
                      sigma_prime: Optional[Simplex] = None) -> np.ndarray:
    """counts[m] = number of present-sets of size m joining sigma to
    sigma_prime by a path of length <= k.  Vectorized frontier propagation
    over all 2^{C(n,d+1)} present-sets, chunked."""
    if sigma is None or sigma_prime is None:
        sigma, sigma_prime = canonical_disjoint_pair(n, d)
    nd = math.comb(n, d + 1)
    if nd > GAMMA_ENUMERATION_GUARD:
        raise ValueError("C(n, d+1) = %d exceeds enumeration guard %d"
                         % (nd, GAMMA_ENUMERATION_GUARD))
    nf = math.comb(n, d)
    if nf > 32:
        raise ValueError("too many (d-1)-simplices for 32-bit frontiers")

    # face-mask of each d-simplex
    face_masks = np.zeros(nd, dtype=np.uint32)
    for r in range(nd):
        tau = unrank_colex(r, d, n)
        m = 0
        for f in faces(tau):
            m |= 1 << rank_colex(f)
        face_masks[r] = m

    src_bit = np.uint32(1 << rank_colex(sigma))
    dst_bit = np.uint32(1 << rank_colex(sigma_prime))
    counts = np.zeros(nd + 1, dtype=np.int64)
    chunk = 1 << 20
    total = 1 << nd
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        subsets = np.arange(lo, hi, dtype=np.uint32)
        frontier = np.full(hi - lo, src_bit, dtype=np.uint32)
        for _ in range(k):
            old = frontier
            new = old.copy()
            for t in range(nd):
                present = (subsets >> np.uint32(t)) & np.uint32(1)
                touch = (old & face_masks[t]) != 0
                gain = np.where(np.logical_and(present.astype(bool), touch),
                                face_masks[t], np.uint32(0))
                new |= gain
            if np.array_equal(new, old):
                break
            frontier = new
        hit = (frontier & dst_bit) != 0
        if hit.any():
            sizes = _popcount(subsets[hit].astype(np.uint64))
            counts += np.bincount(sizes, minlength=nd + 1)
    return counts


def gamma_exact(params: ModelParams, k: int,
                sigma: Optional[Simplex] = None,
                sigma_prime: Optional[Simplex] = None) -> float:
    """Exact probability that two disjoint (d-1)-simplices are joined by a
    path of length <= k, by summing over all present-sets."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    counts = connection_counts(params.n, params.d, k, sigma, sigma_prime)
    nd = params.num_d_simplices
    p = params.p
    return float(sum(int(counts[m]) * p ** m * (1.0 - p) ** (nd - m)
                     for m in range(nd + 1)))
