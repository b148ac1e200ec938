from math import comb

import pytest

from kneser.bitstrings import from_string
from kneser.errors import ParameterError
from kneser.families import (
    GraphSpec,
    fallback_backtracking,
    hamilton_bipartite,
    hamilton_generalized_kneser,
    hamilton_johnson,
    hamilton_kneser,
    hamilton_tour,
    verify_tour,
)


def johnson_expectation(n: int, k: int, s: int) -> str:
    """Ground truth by elementary counting, independent of the library.

    Only one edge can leave a set when the forced overlap 2k-n exceeds s
    (no edges at all), or when s = 0 and n = 2k (complement matching)."""
    count = comb(n, k)
    if count == 1 or (n == 2 * k and s == 0 and count == 2):
        return "path"
    if 2 * k - n > s or (n == 2 * k and s == 0):
        return "none"
    if (n, k, s) in ((5, 2, 0), (5, 3, 1)):
        return "path"  # the Petersen graph and its complement relabeling
    return "cycle"


# -- specs and verification ------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ParameterError):
        GraphSpec("heawood", 7, 2)
    with pytest.raises(ParameterError):
        GraphSpec("kneser", 5, 0)
    with pytest.raises(ParameterError):
        GraphSpec("kneser", 5, 6)
    with pytest.raises(ParameterError):
        GraphSpec("johnson", 5, 2, -1)


def test_adjacency_semantics():
    a, b = from_string("11000"), from_string("00110")
    assert GraphSpec("kneser", 5, 2).adjacent(a, b)
    assert not GraphSpec("kneser", 5, 2).adjacent(a, from_string("01100"))
    assert GraphSpec("johnson", 5, 2, 1).adjacent(a, from_string("01100"))
    assert not GraphSpec("johnson", 5, 2, 1).adjacent(a, b)
    assert GraphSpec("gen-kneser", 5, 2, 1).adjacent(a, b)
    assert GraphSpec("gen-kneser", 5, 2, 1).adjacent(a, from_string("01100"))
    hi = GraphSpec("bipartite", 5, 2)
    assert hi.adjacent(from_string("11000"), from_string("11100"))
    assert not hi.adjacent(from_string("11000"), from_string("00111"))
    assert not hi.adjacent(a, a)


def test_verify_tour_rejections():
    spec = GraphSpec("kneser", 7, 2)
    r = hamilton_kneser(7, 2)
    good = list(r.vertices)
    assert verify_tour(spec, good, closed=True)
    assert not verify_tour(spec, good[:-1], closed=True)  # missing vertex
    assert not verify_tour(spec, good[:-1] + [good[0]], closed=True)  # repeat
    swapped = good[:]
    swapped[0], swapped[2] = swapped[2], swapped[0]
    assert not verify_tour(spec, swapped, closed=True)  # non-edge
    assert not verify_tour(spec, [good[0]] * len(good), closed=True)


# -- Kneser dispatch ----------------------------------------------------------------


def test_kneser_gluing_range():
    for (n, k) in [(7, 2), (9, 3), (5, 1), (9, 1)]:
        r = hamilton_kneser(n, k)
        assert r.status == "cycle" and r.cycle_exists is True
        assert verify_tour(GraphSpec("kneser", n, k), r.vertices)


def test_kneser_sparse_fallback():
    for (n, k) in [(6, 2), (7, 3), (8, 3)]:
        r = hamilton_kneser(n, k)
        assert r.status == "cycle"
        assert verify_tour(GraphSpec("kneser", n, k), r.vertices)


def test_kneser_petersen_is_honest():
    r = hamilton_kneser(5, 2)
    assert r.status == "path"
    assert r.cycle_exists is False
    assert verify_tour(GraphSpec("kneser", 5, 2), r.vertices, closed=False)


def test_kneser_degenerate_cases():
    assert hamilton_kneser(1, 1).status == "path"
    assert hamilton_kneser(2, 1).status == "path"  # K2 has no cycle
    assert hamilton_kneser(2, 1).cycle_exists is False
    assert hamilton_kneser(3, 2).status == "none"  # edgeless
    assert hamilton_kneser(4, 2).status == "none"  # perfect matching


def test_kneser_posa_range():
    r = hamilton_kneser(9, 4)  # 126 vertices, degree 5: heuristic territory
    assert r.status == "cycle"
    assert verify_tour(GraphSpec("kneser", 9, 4), r.vertices)


def test_kneser_cap_respected():
    # a fresh computation (cached answers are returned regardless of caps)
    from kneser import families

    families._kneser_cache.pop((8, 3), None)
    r = hamilton_kneser(8, 3, fallback_cap=10)
    assert r.status == "unsupported"
    assert r.cycle_exists is None
    assert "cap" in r.note
    assert hamilton_kneser(8, 3).status == "cycle"  # full budget still works


def test_kneser_determinism():
    a = hamilton_kneser(9, 4)
    b = hamilton_kneser(9, 4)
    assert a.vertices == b.vertices


# -- exhaustive fallback ---------------------------------------------------------------


def test_backtracking_rules_out_petersen_cycle():
    spec = GraphSpec("kneser", 5, 2)
    verts = spec.vertices()
    adjacency = {v: tuple(w for w in verts if spec.adjacent(v, w)) for v in verts}
    status, seq = fallback_backtracking(verts, adjacency, want_cycle=True)
    assert (status, seq) == ("none", None)
    status, seq = fallback_backtracking(verts, adjacency, want_cycle=False)
    assert status == "path"
    assert verify_tour(spec, seq, closed=False)


def test_backtracking_finds_small_cycle():
    verts = [0, 1, 2, 3]
    ring = {0: (1, 3), 1: (0, 2), 2: (1, 3), 3: (2, 0)}
    status, seq = fallback_backtracking(verts, ring, want_cycle=True)
    assert status == "cycle"
    assert sorted(seq) == verts


# -- Johnson graphs ------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 9))
def test_johnson_matrix(n):
    for k in range(1, n + 1):
        for s in range(0, k):
            r = hamilton_johnson(n, k, s)
            want = johnson_expectation(n, k, s)
            assert r.status == want, (n, k, s, r.status, r.note)
            if r.status != "none":
                spec = GraphSpec("johnson", n, k, s)
                assert verify_tour(spec, r.vertices, closed=(r.status == "cycle"))


def test_johnson_infeasible_pair_reports_paths():
    for (n, k, s) in [(5, 2, 0), (5, 3, 1)]:
        r = hamilton_johnson(n, k, s)
        assert r.status == "path" and r.cycle_exists is False
        assert verify_tour(GraphSpec("johnson", n, k, s), r.vertices, closed=False)


def test_johnson_complement_reduction():
    r = hamilton_johnson(9, 7, 5)  # complement of J(9, 2, 0)
    assert r.status == "cycle"
    assert verify_tour(GraphSpec("johnson", 9, 7, 5), r.vertices)


# -- generalized Kneser graphs ----------------------------------------------------------


def test_gen_kneser_views():
    r = hamilton_generalized_kneser(5, 2, 1)
    assert r.status == "cycle"
    assert verify_tour(GraphSpec("gen-kneser", 5, 2, 1), r.vertices)
    r = hamilton_generalized_kneser(6, 2, 2)  # s >= k: complete graph
    assert r.status == "cycle"
    assert verify_tour(GraphSpec("gen-kneser", 6, 2, 2), r.vertices)
    r = hamilton_generalized_kneser(5, 2, 0)  # plain Petersen again
    assert r.status == "path" and r.cycle_exists is False


def test_gen_kneser_prefers_single_overlap_class():
    # a J(n, k, t) cycle for any t <= s is reused edge for edge
    r = hamilton_generalized_kneser(8, 3, 1)
    assert r.status == "cycle"
    assert verify_tour(GraphSpec("gen-kneser", 8, 3, 1), r.vertices)


# -- bipartite containment graphs ---------------------------------------------------------


def test_bipartite_odd_count_gives_cycle():
    r = hamilton_bipartite(7, 2)  # 21 sets per side, odd
    assert r.status == "cycle"
    assert len(r.vertices) == 2 * comb(7, 2)
    assert verify_tour(GraphSpec("bipartite", 7, 2), r.vertices)


def test_bipartite_even_count_gives_path():
    r = hamilton_bipartite(6, 1)  # 6 sets per side, even
    assert r.status == "path"
    assert len(r.vertices) == 12
    assert verify_tour(GraphSpec("bipartite", 6, 1), r.vertices, closed=False)


def test_bipartite_needs_a_base_cycle():
    assert hamilton_bipartite(5, 2).status == "unsupported"
    assert hamilton_bipartite(4, 2).status == "none"


# -- one front door -------------------------------------------------------------------------


def test_hamilton_tour_dispatch():
    for spec in [
        GraphSpec("kneser", 7, 2),
        GraphSpec("johnson", 7, 2, 1),
        GraphSpec("gen-kneser", 7, 2, 1),
        GraphSpec("bipartite", 7, 2),
    ]:
        r = hamilton_tour(spec)
        assert r.spec == spec
        assert r.status == "cycle"
        assert verify_tour(spec, r.vertices)
