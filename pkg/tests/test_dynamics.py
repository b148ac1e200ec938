from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import vertices
from oracles import det_fractions

from kneser.bitstrings import CyclicBitstring, apply_f, iter_bits
from kneser.dynamics import (
    advance,
    capture_analysis,
    find_period,
    motion_matrix,
    motion_trace,
    render_trace,
    tau,
    tau_slow,
    trace_svg,
)
from kneser.errors import ParameterError
from kneser.gliders import glider_partition, train_composition


def v(s: str) -> CyclicBitstring:
    return CyclicBitstring.from_string(s)


def f_power(x: CyclicBitstring, t: int) -> CyclicBitstring:
    for _ in range(t):
        x = apply_f(x)
    return x


# -- one step -----------------------------------------------------------------


@given(vertices())
def test_advance_agrees_with_f(x):
    assert advance(x).fx == apply_f(x)


@given(vertices())
def test_bijection_respects_speed(x):
    adv = advance(x)
    old = adv.partition.gliders
    new = adv.next_partition.gliders
    assert sorted(adv.bijection) == [g.id for g in old]
    assert sorted(adv.bijection.values()) == [g.id for g in new]
    for gid, nid in adv.bijection.items():
        assert old[gid].speed == new[nid].speed


@given(vertices())
def test_movers_are_free(x):
    p = glider_partition(x)
    ana = capture_analysis(p)
    free = {g.id for g in p.gliders if g.free}
    assert ana.movers
    assert ana.movers <= free
    for gid in ana.movers:
        for copy in ana.captured[gid]:
            assert p.gliders[copy.glider].speed < p.gliders[gid].speed


@given(vertices())
def test_step_displacement_balance(x):
    """Non-movers stand still; a mover advances its own doubled speed plus
    that of every glider it traps or releases during the step."""
    adv = advance(x)
    speeds = {g.id: g.speed for g in adv.partition.gliders}
    for gid, d2 in adv.delta2s.items():
        if gid not in adv.analysis.movers:
            assert d2 == 0
            continue
        carried = sum(
            2 * speeds[d]
            for d, trapper in adv.trap_events + adv.release_events
            if trapper == gid
        )
        assert d2 == 2 * speeds[gid] + carried


# -- many steps ---------------------------------------------------------------


@given(vertices(max_n=10))
def test_motion_trace_checks_out(x):
    steps = 2 * x.n
    tr = motion_trace(x, steps, verify=True)
    assert tr.final == f_power(x, steps)
    assert len(tr.steps) == steps


@given(vertices(max_n=9))
@settings(max_examples=40)
def test_period_closes_the_orbit(x):
    per = find_period(x, verify=True)
    assert per.glider_period % per.string_period == 0
    assert f_power(x, per.string_period) == x
    tr = motion_trace(x, per.glider_period, verify=True)
    assert tr.final == x
    for c, (start, end) in enumerate(zip(tr.start2s, tr.pos2)):
        assert (end - start) % (2 * x.n) == 0, f"class {c} not back on its steps"


def test_period_micro():
    per = find_period(v("100100"))
    assert per.string_period == 3
    assert per.glider_period == 6


def test_single_glider_cycle_length():
    # a lone glider advances by k per step: cycle length n / gcd(n, k)
    per = find_period(v("110000000"))
    assert per.string_period == 9
    per = find_period(v("11000000"))
    assert per.string_period == 4
    assert per.glider_period == 4


# -- first-visit search ---------------------------------------------------------


def trackable(p):
    """Gliders tau accepts: free, slowest, and closing their train."""
    vmin = min(g.speed for g in p.gliders)
    comp = train_composition(p)[vmin]
    return [p.gliders[t[-1]] for t in comp.trains if p.gliders[t[-1]].free]


@pytest.mark.parametrize("n,k", [(7, 2), (7, 3), (8, 3)])
def test_tau_matches_reference_exhaustive(n, k):
    for bits in iter_bits(n, k):
        x = CyclicBitstring(n, k, bits)
        p = glider_partition(x)
        for g in trackable(p):
            for bit in (0, 1):
                fast = tau(x, g, bit, 0, partition=p)
                slow = tau_slow(x, g, bit, 0)
                assert (fast.t, fast.z) == (slow.t, slow.z), (str(x), g.id, bit)


@given(vertices(min_n=6, max_n=9), st.integers(0, 1), st.integers(0, 8))
@settings(max_examples=40)
def test_tau_matches_reference(x, bit, pos):
    pos %= x.n
    p = glider_partition(x)
    eligible = trackable(p)
    if not eligible:
        return
    g = eligible[pos % len(eligible)]
    fast = tau(x, g, bit, pos, partition=p)
    slow = tau_slow(x, g, bit, pos)
    assert (fast.t, fast.z) == (slow.t, slow.z)


# -- the average-motion matrix ---------------------------------------------------


@given(st.integers(1, 5), st.data())
def test_motion_matrix_determinant(nu, data):
    speeds = tuple(sorted(data.draw(
        st.lists(st.integers(1, 6), min_size=nu, max_size=nu))))
    k = sum(speeds)
    n = data.draw(st.integers(2 * k + 1, 3 * k + 8))
    mat, det = motion_matrix(n, speeds)
    assert det == det_fractions(mat)
    assert det != 0
    closed = (-1) ** (nu - 1) * speeds[0]
    for i in range(2, nu + 1):
        big_v = sum(2 * speeds[min(i, j + 1) - 1] for j in range(nu))
        closed *= n - big_v
    assert det == closed


def test_motion_matrix_rejects_unsorted():
    with pytest.raises(ParameterError):
        motion_matrix(9, (2, 1))


# -- rendering ------------------------------------------------------------------


def test_render_trace_smoke():
    tr = motion_trace(v("1001010000"), 10)
    lines = render_trace(tr).splitlines()
    assert lines[0].startswith("t=0")
    assert "10-1010---" in lines[0]  # annotated start vertex
    assert len(lines) == 10


def test_trace_svg_smoke():
    tr = motion_trace(v("1001010000"), 6)
    svg = trace_svg(tr)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
