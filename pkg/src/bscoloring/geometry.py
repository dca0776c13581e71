"""Delaunay graph, nearest-two queries and 2nd-order Voronoi areas.

2nd-order Voronoi regions are never built as polygons.  Membership is a
nearest-two query, and region areas are estimated by counting uniformly
dropped dummy points.
"""

from dataclasses import dataclass, field

import numpy as np

from .predicates import incircle_sos, orient2d
from .rng import substream


def region_key(i, j):
    i, j = int(i), int(j)
    if i == j:
        raise ValueError("a region key needs two distinct base stations")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class DelaunayGraph:
    n: int
    edges: tuple
    triangles: tuple
    adjacency: tuple = field(init=False)

    def __post_init__(self):
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    def degree(self, v):
        return len(self.adjacency[v])

    @property
    def max_degree(self):
        return max(len(a) for a in self.adjacency)

    @property
    def min_degree(self):
        return min(len(a) for a in self.adjacency)

    def has_edge(self, i, j):
        return region_key(i, j) in self._edge_set

    @property
    def _edge_set(self):
        s = self.__dict__.get("_es")
        if s is None:
            s = frozenset(self.edges)
            object.__setattr__(self, "_es", s)
        return s

    def write_edge_list(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for i, j in self.edges:
                fh.write(f"{i} {j}\n")


def _initial_triangulation(pts):
    """Sweep triangulation over points sorted by (x, y); no degenerate triangles."""
    n = len(pts)
    order = sorted(range(n), key=lambda i: (pts[i][0], pts[i][1]))
    k = 2
    while k < n and orient2d(pts[order[0]], pts[order[1]], pts[order[k]]) == 0:
        k += 1
    if k == n:
        raise ValueError("all base stations are collinear")
    chain, apex = order[:k], order[k]
    tris = []
    if orient2d(pts[chain[0]], pts[chain[-1]], pts[apex]) > 0:
        tris.extend((chain[i], chain[i + 1], apex) for i in range(k - 1))
        hull = chain + [apex]
    else:
        tris.extend((chain[i + 1], chain[i], apex) for i in range(k - 1))
        hull = [chain[0], apex] + chain[:0:-1]

    for q in order[k + 1 :]:
        m = len(hull)
        vis = [orient2d(pts[hull[i]], pts[hull[(i + 1) % m]], pts[q]) < 0 for i in range(m)]
        start = next(i for i in range(m) if vis[i] and not vis[i - 1])
        rot = hull[start:] + hull[:start]
        v = 0
        while vis[(start + v) % m]:
            tris.append((rot[(v + 1) % m], rot[v], q))
            v += 1
        hull = [rot[0], q] + rot[v:]
    return tris


def _lawson_flip(pts, tris):
    tri = {}
    owner = {}
    for t, (a, b, c) in enumerate(tris):
        tri[t] = (a, b, c)
        owner[(a, b)] = owner[(b, c)] = owner[(c, a)] = t
    next_id = len(tris)
    stack = [e for e in owner if e[0] < e[1]]
    while stack:
        a, b = stack.pop()
        t1 = owner.get((a, b))
        t2 = owner.get((b, a))
        if t1 is None or t2 is None:
            continue
        c = next(v for v in tri[t1] if v != a and v != b)
        d = next(v for v in tri[t2] if v != a and v != b)
        if incircle_sos(pts, a, b, c, d) <= 0:
            continue
        for e in ((a, b), (b, c), (c, a), (b, a), (a, d), (d, b)):
            owner.pop(e, None)
        del tri[t1], tri[t2]
        for new in ((c, a, d), (d, b, c)):
            x, y, z = new
            tri[next_id] = new
            owner[(x, y)] = owner[(y, z)] = owner[(z, x)] = next_id
            next_id += 1
        stack.extend([(a, d), (d, b), (b, c), (c, a)])
    return sorted(tuple(t) for t in tri.values())


def delaunay(topology):
    """Delaunay graph with exact predicates and index-ordered tie-breaking.

    Two sites give the single edge between them and no triangles.
    """
    bs = topology.bs if hasattr(topology, "bs") else np.asarray(topology, dtype=float)
    if len(bs) == 2:
        return DelaunayGraph(2, ((0, 1),), ())
    if len(bs) < 3:
        raise ValueError("need at least 2 base stations")
    pts = [(float(x), float(y)) for x, y in bs]
    tris = _lawson_flip(pts, _initial_triangulation(pts))
    edges = set()
    for a, b, c in tris:
        edges.update((region_key(a, b), region_key(b, c), region_key(c, a)))
    return DelaunayGraph(len(pts), tuple(sorted(edges)), tuple(tris))


def nearest_two_many(bs, q, chunk=20000):
    """Indices of nearest and second-nearest BS for each row of ``q``.

    Equal distances resolve to the smaller index.
    """
    bs = np.asarray(bs, dtype=float)
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    if len(bs) < 2:
        raise ValueError("need at least 2 base stations")
    out = np.empty((len(q), 2), dtype=np.int64)
    for s in range(0, len(q), chunk):
        blk = q[s : s + chunk]
        d2 = (blk[:, None, 0] - bs[None, :, 0]) ** 2 + (blk[:, None, 1] - bs[None, :, 1]) ** 2
        out[s : s + chunk] = np.argsort(d2, axis=1, kind="stable")[:, :2]
    return out


def nearest_two(topology, q):
    i, j = nearest_two_many(topology.bs, q)[0]
    return int(i), int(j)


def in_second_order_region(topology, q, key):
    i, j = region_key(*key)
    return region_key(*nearest_two(topology, q)) == (i, j)


@dataclass(frozen=True, eq=False)
class AreaEstimate:
    """Dummy-point counts per region key inside the analysis window."""

    counts: dict
    total_dummies: int
    window_area: float

    def count(self, i, j):
        return self.counts.get(region_key(i, j), 0)

    def area(self, i, j):
        return self.count(i, j) / self.total_dummies * self.window_area


def estimate_region_areas(topology, n_dummies=5000, seed=0):
    if n_dummies <= 0:
        raise ValueError("n_dummies must be positive")
    rng = substream(seed, "dummies")
    pts = topology.analysis_window.sample(rng, n_dummies)
    pair = np.sort(nearest_two_many(topology.bs, pts), axis=1)
    keys, cnt = np.unique(pair, axis=0, return_counts=True)
    counts = {(int(i), int(j)): int(c) for (i, j), c in zip(keys, cnt)}
    return AreaEstimate(counts, int(n_dummies), topology.analysis_window.area)
