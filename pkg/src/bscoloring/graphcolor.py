"""Area-based edge cutting and edge colouring into cluster patterns."""

from dataclasses import dataclass

from .geometry import AreaEstimate, delaunay, region_key
from .rng import substream


def _area_lookup(areas):
    if isinstance(areas, AreaEstimate):
        return lambda e: areas.count(*e)
    return lambda e: areas.get(region_key(*e), 0)


@dataclass(frozen=True, eq=False)
class CutGraph:
    base: object
    kept_edges: tuple
    cut_log: tuple
    restored: tuple
    delta_ec: int

    @property
    def n(self):
        return self.base.n

    @property
    def cut_edges(self):
        """Edges removed and not restored, in removal order."""
        back = set(self.restored)
        return tuple(e for e, _ in self.cut_log if e not in back)

    def degrees(self):
        deg = [0] * self.n
        for i, j in self.kept_edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def max_degree(self):
        return max(self.degrees(), default=0)


def edge_cut(graph, areas, delta_ec):
    """Cap every degree at ``delta_ec`` by removing the smallest regions.

    Pass 1 visits vertices in index order and, while a vertex is over
    the cap, removes its kept edge with the smallest area (ties by edge
    order).  Pass 2 visits vertices in index order and, for each vertex
    under the cap, re-adds logged cut edges incident to it, largest area
    first, whenever both endpoints stay within the cap.
    """
    if delta_ec < 1:
        raise ValueError("delta_ec must be at least 1")
    area = _area_lookup(areas)
    adj = [set(a) for a in graph.adjacency]
    cut_log = []
    for v in range(graph.n):
        while len(adj[v]) > delta_ec:
            e = min((region_key(v, w) for w in adj[v]), key=lambda e: (area(e), e))
            w = e[0] if e[1] == v else e[1]
            adj[v].discard(w)
            adj[w].discard(v)
            cut_log.append((e, area(e)))

    restored = []
    cut_now = {e for e, _ in cut_log}
    for v in range(graph.n):
        if len(adj[v]) >= delta_ec:
            continue
        cands = sorted((e for e in cut_now if v in e), key=lambda e: (-area(e), e))
        for e in cands:
            if len(adj[v]) >= delta_ec:
                break
            w = e[0] if e[1] == v else e[1]
            if len(adj[w]) < delta_ec:
                adj[v].add(w)
                adj[w].add(v)
                cut_now.discard(e)
                restored.append(e)

    kept = tuple(sorted(region_key(i, j) for i in range(graph.n) for j in adj[i] if i < j))
    return CutGraph(graph, kept, tuple(cut_log), tuple(restored), int(delta_ec))


@dataclass(frozen=True, eq=False)
class EdgeColoring:
    color: dict
    L: int
    max_degree: int

    def edges_of(self, c):
        return tuple(sorted(e for e, k in self.color.items() if k == c))


class _Colorer:
    """Mutable proper partial edge colouring; ``at[v][c]`` is the neighbour via colour c."""

    def __init__(self, n, edges):
        self.at = [dict() for _ in range(n)]
        self.adj = [[] for _ in range(n)]
        for i, j in edges:
            self.adj[i].append(j)
            self.adj[j].append(i)
        self.col = {}

    def set(self, u, v, c):
        self.at[u][c] = v
        self.at[v][c] = u
        self.col[region_key(u, v)] = c

    def unset(self, u, v):
        c = self.col.pop(region_key(u, v))
        del self.at[u][c]
        del self.at[v][c]
        return c

    def color(self, u, v):
        return self.col.get(region_key(u, v))

    def free(self, v, palette):
        return [c for c in range(1, palette + 1) if c not in self.at[v]]

    def first_free(self, v, palette):
        for c in range(1, palette + 1):
            if c not in self.at[v]:
                return c
        return None

    def kempe_path(self, start, a, b):
        """Vertices of the maximal path from ``start`` alternating colours a, b."""
        path = [start]
        cur, c = start, a
        while c in self.at[cur]:
            cur = self.at[cur][c]
            path.append(cur)
            c = b if c == a else a
        return path

    def swap_path(self, path, a, b):
        edges = list(zip(path, path[1:]))
        cs = [self.unset(x, y) for x, y in edges]
        for (x, y), c in zip(edges, cs):
            self.set(x, y, b if c == a else a)

    def misra_gries(self, u, v, palette):
        # maximal fan at u starting with v
        fan = [v]
        in_fan = {v}
        grew = True
        while grew:
            grew = False
            last = fan[-1]
            for w in self.adj[u]:
                if w in in_fan:
                    continue
                c = self.color(u, w)
                if c is not None and c not in self.at[last]:
                    fan.append(w)
                    in_fan.add(w)
                    grew = True
                    break
        c = self.first_free(u, palette)
        d = self.first_free(fan[-1], palette)
        if c != d and d in self.at[u]:
            self.swap_path(self.kempe_path(u, d, c), d, c)
        # prefix of the fan that is still a fan and ends at a vertex missing d
        w_idx = 0
        for k in range(len(fan)):
            if k > 0:
                ck = self.color(u, fan[k])
                if ck is None or ck in self.at[fan[k - 1]]:
                    break
            if d not in self.at[fan[k]]:
                w_idx = k
                break
        # rotate the fan prefix
        for k in range(w_idx):
            ck = self.unset(u, fan[k + 1])
            self.set(u, fan[k], ck)
        self.set(u, fan[w_idx], d)

    def try_color(self, u, v, palette):
        fu, fv = self.free(u, palette), self.free(v, palette)
        common = [c for c in fu if c in fv]
        if common:
            self.set(u, v, common[0])
            return True
        for a in fu:
            for b in fv:
                # a free at u, used at v; b free at v, used at u
                path = self.kempe_path(v, a, b)
                if path[-1] != u:
                    self.swap_path(path, a, b)
                    self.set(u, v, a)
                    return True
                path = self.kempe_path(u, b, a)
                if path[-1] != v:
                    self.swap_path(path, b, a)
                    self.set(u, v, b)
                    return True
        return False


def _misra_gries(n, edges, delta):
    cl = _Colorer(n, edges)
    for u, v in edges:
        cl.misra_gries(u, v, delta + 1)
    return cl


def _tabu_recolor(n, edges, col, k, budget, rng):
    """Tabu search for a proper ``k``-colouring, starting from ``col``.

    ``col`` maps edge -> colour in 1..k+1; colour k+1 edges are first moved
    to their least-conflicting colour.  Returns (colouring, steps) or
    (None, steps) when the budget runs out.
    """
    inc = [[] for _ in range(n)]
    for t, (i, j) in enumerate(edges):
        inc[i].append(t)
        inc[j].append(t)
    nbrs = [[s for s in inc[i] + inc[j] if s != t] for t, (i, j) in enumerate(edges)]
    c = [col[e] - 1 for e in edges]
    gamma = [[0] * k for _ in edges]
    for t in range(len(edges)):
        if c[t] < k:
            for s in nbrs[t]:
                gamma[s][c[t]] += 1
    for t in range(len(edges)):
        if c[t] == k:
            c[t] = min(range(k), key=lambda q: (gamma[t][q], q))
            for s in nbrs[t]:
                gamma[s][c[t]] += 1
    conflicts = sum(gamma[t][c[t]] for t in range(len(edges))) // 2
    tabu = [[0] * k for _ in edges]
    best_seen = conflicts
    it = 0
    while conflicts and it < budget:
        it += 1
        moves, best_delta = [], None
        for t in range(len(edges)):
            own = gamma[t][c[t]]
            if not own:
                continue
            for q in range(k):
                if q == c[t]:
                    continue
                d = gamma[t][q] - own
                if tabu[t][q] > it and conflicts + d >= best_seen:
                    continue
                if best_delta is None or d < best_delta:
                    moves, best_delta = [(t, q)], d
                elif d == best_delta:
                    moves.append((t, q))
        if not moves:
            continue
        t, q = moves[rng.integers(len(moves))]
        old = c[t]
        for s in nbrs[t]:
            gamma[s][old] -= 1
            gamma[s][q] += 1
        c[t] = q
        conflicts += best_delta
        best_seen = min(best_seen, conflicts)
        tabu[t][old] = it + int(0.6 * conflicts) + int(rng.integers(10)) + 1
    if conflicts:
        return None, it
    return {e: c[t] + 1 for t, e in enumerate(edges)}, it


def _dsatur_search(n, edges, k, budget):
    """Depth-first DSATUR search for a proper ``k``-edge-colouring.

    Visits at most ``budget`` search nodes.  Returns (colouring, nodes)
    with colours in 1..k, or (None, nodes) when the budget runs out or no
    colouring exists.
    """
    m = len(edges)
    inc = [[] for _ in range(n)]
    for t, (i, j) in enumerate(edges):
        inc[i].append(t)
        inc[j].append(t)
    nbrs = [[s for s in inc[i] + inc[j] if s != t] for t, (i, j) in enumerate(edges)]
    col = [-1] * m

    def select():
        best, best_key, best_used = None, None, None
        for t in range(m):
            if col[t] >= 0:
                continue
            used = {col[s] for s in nbrs[t] if col[s] >= 0}
            key = (k - len(used), -len(nbrs[t]), t)
            if best_key is None or key < best_key:
                best, best_key, best_used = t, key, used
        return best, best_used

    t, used = select()
    stack = [[t, [q for q in range(k) if q not in used], 0]]
    nodes = 0
    while stack:
        frame = stack[-1]
        t, opts, pos = frame
        col[t] = -1
        if pos >= len(opts):
            stack.pop()
            continue
        nodes += 1
        if nodes > budget:
            return None, nodes
        col[t] = opts[pos]
        frame[2] = pos + 1
        nt, used = select()
        if nt is None:
            return {e: col[s] + 1 for s, e in enumerate(edges)}, nodes
        nopts = [q for q in range(k) if q not in used]
        if nopts:
            stack.append([nt, nopts, 0])
    return None, nodes


def edge_color(graph, budget=None):
    """Proper edge colouring with at most ``max_degree + 1`` colours.

    Misra-Gries guarantees the bound.  Kempe-chain swaps, a tabu search
    and a DSATUR backtracking search then try to use only ``max_degree``
    colours, sharing ``budget`` steps (default ``10 * |E|``) between the
    last two.  If all fail the Misra-Gries colouring is kept.  The result
    is deterministic.  ``graph`` is a ``CutGraph`` or a ``DelaunayGraph``.
    """
    n = graph.n
    edges = list(graph.kept_edges if isinstance(graph, CutGraph) else graph.edges)
    deg = [0] * n
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    delta = max(deg, default=0)
    if not edges:
        return EdgeColoring({}, 0, 0)
    cl = _misra_gries(n, edges, delta)
    budget = 10 * len(edges) if budget is None else int(budget)

    for e in sorted(e for e, c in cl.col.items() if c == delta + 1):
        cl.unset(*e)
        if not cl.try_color(e[0], e[1], delta):
            cl.set(e[0], e[1], delta + 1)

    col = dict(cl.col)
    if delta + 1 in col.values() and budget > 0:
        rng = substream(0, "recolor")
        found, used = _tabu_recolor(n, edges, col, delta, budget // 2, rng)
        if found is None:
            found, _ = _dsatur_search(n, edges, delta, budget - used)
        if found is not None:
            col = found

    used = sorted(set(col.values()))
    relabel = {c: k + 1 for k, c in enumerate(used)}
    return EdgeColoring({e: relabel[c] for e, c in sorted(col.items())}, len(used), delta)


@dataclass(frozen=True, eq=False)
class ClusterPlan:
    patterns: tuple
    cut_regions: frozenset
    L: int
    graph: object
    cut: CutGraph
    coloring: EdgeColoring

    def pattern_of(self, key):
        """1-based pattern index of a region key, or None if it is cut."""
        return self.coloring.color.get(region_key(*key))

    def bs_in_pattern(self, ell):
        return sorted({b for e in self.patterns[ell - 1] for b in e})

    def summary(self):
        return dict(
            n_bs=self.graph.n,
            delta=self.graph.max_degree,
            delta_ec=self.cut.delta_ec,
            L=self.L,
            n_regions=len(self.graph.edges),
            n_cut=len(self.cut_regions),
        )

    def to_text(self):
        lines = []
        for ell, pat in enumerate(self.patterns, 1):
            lines.append(f"pattern {ell}:")
            lines.extend(f"{i} {j}" for i, j in sorted(pat))
        lines.append("cut:")
        lines.extend(f"{i} {j}" for i, j in sorted(self.cut_regions))
        return "\n".join(lines) + "\n"


def build_cluster_plan(topology, areas, delta_ec=None, budget=None):
    """Delaunay graph, edge cutting, then edge colouring.

    ``delta_ec=None`` skips cutting (the cap becomes the maximum degree).
    """
    graph = topology if hasattr(topology, "adjacency") else delaunay(topology)
    cut = edge_cut(graph, areas, graph.max_degree if delta_ec is None else delta_ec)
    coloring = edge_color(cut, budget=budget)
    patterns = tuple(frozenset(coloring.edges_of(c)) for c in range(1, coloring.L + 1))
    return ClusterPlan(patterns, frozenset(cut.cut_edges), coloring.L, graph, cut, coloring)
