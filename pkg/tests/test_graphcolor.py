import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from bscoloring.geometry import DelaunayGraph, delaunay, estimate_region_areas, region_key
from bscoloring.graphcolor import build_cluster_plan, edge_color, edge_cut
from bscoloring.topology import generate_perturbed_grid

from conftest import explicit


def graph(n, edges):
    return DelaunayGraph(n, tuple(sorted(region_key(*e) for e in edges)), ())


def assert_proper(edges, color):
    seen = {}
    for (i, j) in edges:
        c = color[region_key(i, j)]
        for v in (i, j):
            assert (v, c) not in seen, f"vertex {v} has colour {c} twice"
            seen[(v, c)] = True


def reference_cut(n, edges, area, cap):
    """Straight transcription of the cut / restore procedure, used as an oracle."""
    kept = {region_key(*e) for e in edges}

    def deg(v):
        return sum(v in e for e in kept)

    removed = []
    for v in range(n):
        while deg(v) > cap:
            inc = sorted((e for e in kept if v in e), key=lambda e: (area[e], e))
            kept.remove(inc[0])
            removed.append(inc[0])
    for v in range(n):
        for e in sorted((e for e in removed if v in e and e not in kept), key=lambda e: (-area[e], e)):
            if deg(v) >= cap:
                break
            if deg(e[0]) < cap and deg(e[1]) < cap:
                kept.add(e)
    return kept, removed


def chromatic_index(n, edges):
    delta = max(sum(v in e for e in edges) for v in range(n))
    for k in (delta, delta + 1):
        for cols in itertools.product(range(k), repeat=len(edges)):
            ok = all(
                cols[a] != cols[b]
                for a, b in itertools.combinations(range(len(edges)), 2)
                if set(edges[a]) & set(edges[b])
            )
            if ok:
                return k
    raise AssertionError("Vizing bound violated")


K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_k4_needs_no_cut_and_three_colours():
    g = graph(4, K4)
    cut = edge_cut(g, {e: 1 for e in K4}, 3)
    assert cut.kept_edges == tuple(K4) and cut.cut_log == ()
    col = edge_color(cut)
    assert col.L == 3
    assert_proper(K4, col.color)


def test_triangle_needs_three_colours():
    col = edge_color(graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert col.L == 3


def test_star_cuts_smallest_and_restores_nothing():
    edges = [(0, k) for k in range(1, 6)]
    areas = {(0, k): 10 * k for k in range(1, 6)}
    cut = edge_cut(graph(6, edges), areas, 4)
    assert cut.cut_log == (((0, 1), 10),)
    assert cut.restored == ()
    assert cut.cut_edges == ((0, 1),)


def test_shared_minimal_edge_cut_once():
    # u=0 and v=1 both have degree 3 with cap 2; their shared edge is smallest
    edges = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]
    areas = {(0, 1): 1, (0, 2): 5, (0, 3): 6, (1, 4): 7, (1, 5): 8}
    cut = edge_cut(graph(6, edges), areas, 2)
    assert [e for e, _ in cut.cut_log] == [(0, 1)]
    assert cut.max_degree == 2


def test_cut_tie_broken_by_edge_order():
    edges = [(0, 3), (0, 1), (0, 2)]
    cut = edge_cut(graph(4, edges), {e: 5 for e in edges}, 2)
    assert cut.cut_log == (((0, 1), 5),)


def test_restore_prefers_larger_area():
    # cap 2: vertex 0 sheds (0,1) and (0,2); vertex 3 then sheds (0,3), so
    # vertex 0 has room for one edge back.  (0,3) is blocked by vertex 3,
    # and of the rest the larger (0,2) must win over (0,1).
    edges = [(0, 1), (0, 2), (0, 3), (0, 4), (3, 5), (3, 6)]
    areas = {(0, 1): 1, (0, 2): 2, (0, 3): 30, (0, 4): 40, (3, 5): 50, (3, 6): 60}
    cut = edge_cut(graph(7, edges), areas, 2)
    assert [e for e, _ in cut.cut_log] == [(0, 1), (0, 2), (0, 3)]
    assert cut.restored == ((0, 2),)
    assert cut.cut_edges == ((0, 1), (0, 3))


@settings(max_examples=150, deadline=None)
@given(
    st.integers(4, 9).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=20),
            st.integers(1, 5),
            st.integers(0, 2**31),
        )
    )
)
def test_cut_matches_reference(args):
    n, raw, cap, seed = args
    edges = sorted({region_key(i, j) for i, j in raw if i != j})
    if not edges:
        return
    rng = np.random.default_rng(seed)
    areas = {e: int(rng.integers(0, 4)) for e in edges}
    g = graph(n, edges)
    cut = edge_cut(g, areas, cap)
    kept, removed = reference_cut(n, edges, areas, cap)
    assert set(cut.kept_edges) == kept
    assert [e for e, _ in cut.cut_log] == removed
    deg0 = [g.degree(v) for v in range(n)]
    assert all(d <= min(d0, cap) for d, d0 in zip(cut.degrees(), deg0))
    assert cut.max_degree == min(g.max_degree, cap) or cut.max_degree < cap


@settings(max_examples=120, deadline=None)
@given(
    st.integers(3, 7).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=8),
        )
    )
)
def test_colouring_reaches_chromatic_index_on_small_graphs(args):
    n, raw = args
    edges = sorted({region_key(i, j) for i, j in raw if i != j})
    if not edges:
        return
    col = edge_color(graph(n, edges))
    assert_proper(edges, col.color)
    assert col.L == chromatic_index(n, edges)


def test_triangular_lattice_uses_six_colours():
    # degree-6 interior vertices of a triangular lattice
    pts = [(x + 0.5 * (y % 2), y * np.sqrt(3) / 2) for y in range(5) for x in range(5)]
    g = delaunay(explicit(pts))
    assert g.max_degree == 6
    col = edge_color(g)
    assert col.L == 6
    assert_proper(g.edges, col.color)


def test_plan_structure(plan100, grid100):
    plan = plan100
    assert plan.L in (4, 5)
    union = set()
    for ell, pat in enumerate(plan.patterns, 1):
        bs = [b for e in pat for b in e]
        assert len(bs) == len(set(bs))
        assert not (union & pat)
        union |= pat
        assert all(plan.pattern_of(e) == ell for e in pat)
    assert union == set(plan.cut.kept_edges)
    assert union | plan.cut_regions == set(plan.graph.edges)
    assert plan.cut.max_degree == min(plan.graph.max_degree, 4)
    assert all(plan.pattern_of(e) is None for e in plan.cut_regions)


def test_plan_deterministic(grid100):
    areas = estimate_region_areas(grid100, 5000, 11)
    a = build_cluster_plan(grid100, areas, 4)
    b = build_cluster_plan(grid100, areas, 4)
    assert a.to_text() == b.to_text()


def test_cap_at_min_degree_never_exceeded(grid200):
    g = delaunay(grid200)
    areas = estimate_region_areas(grid200, 5000, 3)
    plan = build_cluster_plan(grid200, areas, g.min_degree)
    assert max(plan.cut.degrees()) <= g.min_degree
    assert plan.L <= g.min_degree + 1


def test_no_cap_keeps_all_edges(grid100):
    plan = build_cluster_plan(grid100, estimate_region_areas(grid100, 5000, 1), None)
    assert plan.cut_regions == frozenset()
    assert plan.L in (plan.graph.max_degree, plan.graph.max_degree + 1)


def test_plan_text_export():
    plan = build_cluster_plan(explicit([[0, 0], [1000, 0], [500, 900], [500, 300]]), {}, 4)
    text = plan.to_text()
    assert text.startswith("pattern 1:\n")
    assert text.count("pattern ") == 3 and text.endswith("cut:\n")
    for ell in range(1, 4):
        assert len(plan.bs_in_pattern(ell)) == 4


def test_regular_grid_plan_uses_four_patterns():
    t = generate_perturbed_grid(7, 7, 200.0, 0.0, seed=0)
    plan = build_cluster_plan(t, estimate_region_areas(t, 5000, 0), 4)
    assert plan.L == 4
    assert plan.summary()["delta"] == 6
