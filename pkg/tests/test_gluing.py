from math import comb, gcd

import pytest
from hypothesis import given, settings

from conftest import vertices
from oracles import box

from kneser.bitstrings import (
    CyclicBitstring,
    apply_f,
    iter_bits,
    parenthesis_match,
    rotate_bits,
)
from kneser.errors import ParameterError
from kneser.gliders import glider_partition, speed_multiset, speed_partition
from kneser.gluing import (
    build_gluing_plan,
    connector_four_cycle,
    connector_partners,
    hamilton_cycle,
    is_connector,
    match_rewrite,
    rewrite_families,
    single_glider_vertex,
)

PLANNED = [(7, 2), (9, 3), (10, 3), (11, 4), (12, 4)]


def v(s: str) -> CyclicBitstring:
    return CyclicBitstring.from_string(s)


# -- connectors ----------------------------------------------------------------


@given(vertices(min_n=5))
def test_partner_count(x):
    m = parenthesis_match(x)
    ell = x.n - 2 * x.k
    partners = connector_partners(x, m)
    assert len(partners) == len(m.visible) * (ell - 1)
    assert len(set(p.bits for p in partners)) == len(partners)


def test_partner_count_micro():
    # four visible pairs and l = 6 unmatched zeros give 4 * 5 = 20 partners
    x = v("10101010000000")
    assert len(connector_partners(x)) == 20


@given(vertices(min_n=5))
@settings(max_examples=60)
def test_partners_are_connectors_both_ways(x):
    for y in connector_partners(x):
        assert is_connector(x, y)
        assert is_connector(y, x)
        assert x.bits in {z.bits for z in connector_partners(y)}


@pytest.mark.parametrize("n,k", [(7, 2), (8, 3), (9, 3)])
def test_connector_relation_exhaustive(n, k):
    """is_connector agrees with membership in connector_partners everywhere."""
    verts = [CyclicBitstring(n, k, b) for b in iter_bits(n, k)]
    partner_sets = {x.bits: {y.bits for y in connector_partners(x)} for x in verts}
    for x in verts:
        for y in verts:
            assert is_connector(x, y) == (y.bits in partner_sets[x.bits])


def test_four_cycle_is_a_kneser_cycle():
    x = v("101000000")
    y = connector_partners(x)[0]
    quad = connector_four_cycle(x, y)
    assert (quad[0], quad[2]) == (x, y)
    ring = quad + (quad[0],)
    for a, b in zip(ring, ring[1:]):
        assert a.bits & b.bits == 0
    assert quad[1] == apply_f(x) and quad[3] == apply_f(y)


def test_four_cycle_rejects_non_connectors():
    with pytest.raises(ParameterError):
        connector_four_cycle(v("101000000"), v("101000000"))
    with pytest.raises(ParameterError):
        connector_four_cycle(v("101000000"), v("110000000"))


# -- single-glider vertices ------------------------------------------------------


@pytest.mark.parametrize("n,k", [(7, 2), (9, 3), (10, 4), (12, 4)])
def test_single_glider_orbit(n, k):
    for i in range(n):
        s = single_glider_vertex(n, k, i)
        assert apply_f(s) == single_glider_vertex(n, k, i + k)


@pytest.mark.parametrize("n,k", [(7, 2), (9, 3), (10, 4), (12, 4)])
def test_single_glider_cycles_count(n, k, factors):
    f = factors(n, k)
    keys = {f.cycle_containing(single_glider_vertex(n, k, i).bits).key for i in range(n)}
    assert len(keys) == gcd(n, k)


# -- rewrite rules ----------------------------------------------------------------


@pytest.mark.parametrize("n,k", [(10, 3), (9, 3), (11, 4)])
def test_at_most_one_family_matches(n, k):
    for bits in iter_bits(n, k):
        fams = rewrite_families(CyclicBitstring(n, k, bits), 0)
        assert len(fams) <= 1


@pytest.mark.parametrize("n,k", [(9, 3), (11, 4)])
def test_rewrite_pairs_are_disjoint_connectors(n, k):
    seen: set[int] = set()
    for bits in iter_bits(n, k):
        m = match_rewrite(CyclicBitstring(n, k, bits), 0)
        if m is None:
            continue
        assert is_connector(m.x, m.image)
        assert m.x.bits not in seen and m.image.bits not in seen
        seen.update((m.x.bits, m.image.bits))


@pytest.mark.parametrize("n,k", [(9, 3), (11, 4), (12, 4)])
def test_partition_direction_per_family(n, k):
    """Each rewrite family moves the speed partition a known direction."""
    for bits in iter_bits(n, k):
        x = CyclicBitstring(n, k, bits)
        m = match_rewrite(x, 0)
        if m is None:
            continue
        px = glider_partition(x)
        src = speed_partition(px)
        dst = speed_partition(glider_partition(m.image))
        fam = m.family
        if fam == 2:
            assert min(speed_multiset(px)) % 2 == 0
            assert dst == box(src, -1)
        elif fam == 4:
            vmin = min(speed_multiset(px))
            assert vmin % 2 == 1
            assert dst == (box(src, -1) if vmin >= 3 else src)
        elif fam == 9:
            assert speed_multiset(glider_partition(m.image)) == speed_multiset(px)
        elif fam in (6, 7, 8):
            assert dst > box(src, 1)
        else:  # 1, 3, 5 strictly increase the partition
            assert dst > src
            vs = speed_multiset(px)
            if fam == 1 and len(vs) >= 3 and vs[2] > vs[1]:
                assert dst > box(src, 1)


def test_rule_seven_instance():
    m = match_rewrite(v("100110001110000"), 0)
    assert m is not None and m.family == 7
    src = speed_partition(glider_partition(m.x))
    dst = speed_partition(glider_partition(m.image))
    assert dst > box(src, 1)


def test_rewrites_cover_all_nine_families():
    seen: set[int] = set()
    for (n, k) in [(9, 3), (11, 4), (12, 4), (15, 6)]:
        for bits in iter_bits(n, k):
            m = match_rewrite(CyclicBitstring(n, k, bits), 0)
            if m is not None:
                seen.add(m.family)
    assert seen == set(range(1, 10))


# -- the gluing plan ---------------------------------------------------------------


@pytest.mark.parametrize("n,k", PLANNED)
def test_plan_tree_spans_the_factor(n, k, plans):
    plan = plans(n, k)
    cycles = plan.factor.cycles
    assert len(plan.tree) + len(plan.rotation_pairs) + 1 == len(cycles)
    parent = list(range(len(cycles)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(u, w):
        ru, rw = find(u), find(w)
        assert ru != rw, "a splice may not close a cycle among cycles"
        parent[ru] = rw

    at = {b: i for i, c in enumerate(cycles) for b in c.vertices}
    for rm in plan.tree:
        union(at[rm.x.bits], at[rm.image.bits])
    for a, b in plan.rotation_pairs:
        union(at[a.bits], at[b.bits])
    assert len({find(i) for i in range(len(cycles))}) == 1


@pytest.mark.parametrize("n,k", PLANNED)
def test_plan_splice_edges_are_distinct(n, k, plans):
    plan = plans(n, k)
    removed: list[frozenset[int]] = []
    added: list[frozenset[int]] = []
    for rm in plan.tree:
        fx, fy = apply_f(rm.x).bits, apply_f(rm.image).bits
        removed += [frozenset((rm.x.bits, fx)), frozenset((rm.image.bits, fy))]
        added += [frozenset((rm.x.bits, fy)), frozenset((rm.image.bits, fx))]
    for a, b in plan.rotation_pairs:
        fa, fb = apply_f(a).bits, apply_f(b).bits
        removed += [frozenset((a.bits, fa)), frozenset((b.bits, fb))]
        added += [frozenset((a.bits, b.bits)), frozenset((fa, fb))]
    assert len(removed) == len(set(removed))
    assert len(added) == len(set(added))
    assert not set(removed) & set(added)


@pytest.mark.parametrize("n,k", PLANNED)
def test_rotation_pairs_use_fresh_vertices(n, k, plans):
    plan = plans(n, k)
    ends = {w for rm in plan.rewrites for w in (rm.x.bits, rm.image.bits)}
    singles = {single_glider_vertex(n, k, i).bits for i in range(n)}
    for a, b in plan.rotation_pairs:
        assert a.bits not in ends and b.bits not in ends
        assert a.bits in singles and b.bits in singles
        # chords of the rotation splice are Kneser edges
        assert a.bits & b.bits == 0
        assert apply_f(a).bits & apply_f(b).bits == 0


def test_branched_rewrites_occur(plans):
    plan = plans(12, 4)
    assert any(rm.branched for rm in plan.tree) or any(
        rm.branched for rm in plan.rewrites
    )


# -- assembly -----------------------------------------------------------------------


@pytest.mark.parametrize("n,k", PLANNED)
def test_assembled_hamilton_cycle(n, k, hamiltons):
    ham = hamiltons(n, k)
    assert len(ham) == comb(n, k)
    assert len(set(ham.vertices)) == len(ham)
    ring = ham.vertices + (ham.vertices[0],)
    for a, b in zip(ring, ring[1:]):
        assert a & b == 0
        assert bin(a).count("1") == k


def test_trivial_gluings():
    # k = 1 needs no splices: the factor is a single cycle already
    assert len(hamilton_cycle(3, 1)) == 3
    assert len(hamilton_cycle(6, 1)) == 6


def test_anchor_choice_is_free():
    for anchor in (0, 2, 7):
        ham = hamilton_cycle(9, 3, anchor=anchor)
        assert len(ham) == comb(9, 3)


def test_plan_rejects_sparse_cases():
    with pytest.raises(ParameterError):
        build_gluing_plan(7, 3)  # n = 2k+1
    with pytest.raises(ParameterError):
        build_gluing_plan(8, 3)  # n = 2k+2
    with pytest.raises(ParameterError):
        build_gluing_plan(5, 0)


def test_rotation_window_avoids_rewrite_window(plans):
    """Single-glider images of the rewrites use s-indices p+2 .. p+l+1; the
    rotation pairs start at r = p+l+2 and never collide with them."""
    for (n, k) in [(9, 3), (12, 4)]:
        plan = plans(n, k)
        ell = n - 2 * k
        s_index = {rotate_bits((1 << k) - 1, n, i): i for i in range(n)}
        window = {(plan.anchor + 2 + j) % n for j in range(ell)}
        for rm in plan.rewrites:
            for w in (rm.x.bits, rm.image.bits):
                if w in s_index:
                    assert s_index[w] in window
        used = {s_index[a.bits] for a, _ in plan.rotation_pairs}
        used |= {s_index[b.bits] for _, b in plan.rotation_pairs}
        assert not used & window
