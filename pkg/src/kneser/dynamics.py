"""Glider dynamics under the flip map f.

Per application of f a glider either stands still or jumps: its down-steps
become its up-steps, and it lands on a staircase of fresh down-steps found
by the capture walk beyond its last step.  Which gliders jump is decided by
comparing capture walks of all free gliders; a slower glider inside the
jump interval of a faster one is overrun and temporarily trapped.

All bookkeeping is exact integer arithmetic.  A glider's doubled position
is 2s = s1 + s2 (peak plus last step, window-absolute); doubling avoids
half-integers, and the trap counters are likewise stored doubled, one unit
per trap or release event.  The motion law checked at every step of a
trace is

    2s(t) = 2s(0) + 2vt + sum_c 2v(c) 2N(c trapped by this)
                        - sum_c 2v(this) 2N(this trapped by c).
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import comb, lcm

from .bitstrings import CyclicBitstring, _f_bits, _scan_match, apply_f_inverse, to_string
from .errors import InternalConsistencyError, ParameterError
from .gliders import (
    Glider,
    GliderPartition,
    glider_partition,
    train_composition,
)

__all__ = [
    "step_types",
    "CapturedCopy",
    "CaptureAnalysis",
    "capture_analysis",
    "AdvanceResult",
    "advance",
    "MotionStep",
    "MotionTrace",
    "motion_trace",
    "OrbitPeriod",
    "find_period",
    "motion_matrix",
    "shift_glider",
    "TauResult",
    "tau",
    "tau_slow",
    "render_trace",
    "trace_svg",
]

ClassKey = tuple[frozenset[int], frozenset[int]]


def step_types(bits: int, n: int) -> tuple[str, ...]:
    """Per position: U for a 1, D for a matched 0, F for an unmatched 0."""
    _, m0 = _scan_match(bits, n)
    return tuple(
        "U" if (bits >> i) & 1 else "D" if (m0 >> i) & 1 else "F" for i in range(n)
    )


def _capture_walk(
    m0: int, n: int, s2: int, v: int, cap: int
) -> tuple[int, list[int]]:
    """Walk right from s2+1 weighting 1s and unmatched 0s +1, matched 0s -1.
    Returns the first coordinate where the sum reaches v, plus the landing
    staircase: the last +1 coordinate attaining each level 1..v."""
    level = 0
    last_at: dict[int, int] = {}
    j = s2
    while j - s2 <= cap:
        j += 1
        r = j % n
        if (m0 >> r) & 1:
            level -= 1
        else:
            level += 1
            if level >= 1:
                last_at[level] = j
                if level == v:
                    return j, [last_at[t] for t in range(1, v + 1)]
    raise InternalConsistencyError("capture walk exceeded its cap")


@dataclass(frozen=True)
class CapturedCopy:
    """A free glider lying inside a faster glider's jump interval, possibly
    as a translate by a whole number of laps."""

    glider: int  # id within the partition
    shift: int  # translate by shift * n
    stratum: int  # landing steps strictly left of the copy


@dataclass(frozen=True)
class CaptureAnalysis:
    partition: GliderPartition = field(repr=False)
    s_plus: dict[int, int]  # free gid -> end of its jump interval
    landing: dict[int, tuple[int, ...]]  # free gid -> new down-step staircase
    movers: frozenset[int]
    captured: dict[int, tuple[CapturedCopy, ...]]  # mover gid -> overrun copies


def capture_analysis(p: GliderPartition) -> CaptureAnalysis:
    x = p.x
    n, k = x.n, x.k
    _, m0 = _scan_match(x.bits, n)
    types = step_types(x.bits, n)
    free = [g for g in p.gliders if g.free]
    cap = (k + 2) * n  # the walk gains at least n-2k >= 1 per lap
    s_plus: dict[int, int] = {}
    landing: dict[int, tuple[int, ...]] = {}
    for g in free:
        sp, stair = _capture_walk(m0, n, g.s2, g.speed, cap)
        assert len(stair) == g.speed and stair[-1] == sp
        assert all(stair[t] < stair[t + 1] for t in range(len(stair) - 1))
        seen_one = False
        for c in stair:
            tp = types[c % n]
            assert tp in "UF"  # landing steps are never matched zeros
            if tp == "U":
                seen_one = True
            else:
                assert not seen_one, "flat landing steps precede the 1s"
        s_plus[g.id] = sp
        landing[g.id] = tuple(stair)

    movers: set[int] = set()
    for gi in free:
        ok = True
        for gj in free:
            t_star = (gi.s1 - 1 - gj.s1) // n
            if s_plus[gj.id] + t_star * n > s_plus[gi.id]:
                ok = False
                break
        if ok:
            movers.add(gi.id)

    captured: dict[int, tuple[CapturedCopy, ...]] = {}
    for gid in movers:
        gi = p.gliders[gid]
        lo = gi.s2 + 1
        hi = s_plus[gid]
        copies: list[CapturedCopy] = []
        for gj in free:
            if gj.id == gid:
                continue
            # translates with lo <= s0 + tn and s_plus + tn <= hi
            t_min = -((gj.s0 - lo) // n)  # ceil((lo - s0) / n)
            t_max = (hi - s_plus[gj.id]) // n
            if t_min > t_max:
                continue
            assert t_min == t_max, "at most one translate per class fits"
            t = t_min
            assert s_plus[gj.id] + t * n < hi
            stratum = bisect_left(landing[gid], gj.s0 + t * n)
            assert gj.speed < gi.speed - stratum
            copies.append(CapturedCopy(gj.id, t, stratum))
        captured[gid] = tuple(sorted(copies, key=lambda c: p.gliders[c.glider].s0 + c.shift * n))
    return CaptureAnalysis(p, s_plus, landing, frozenset(movers), captured)


@dataclass(frozen=True)
class AdvanceResult:
    x: CyclicBitstring
    fx: CyclicBitstring
    partition: GliderPartition = field(repr=False)
    next_partition: GliderPartition = field(repr=False)
    analysis: CaptureAnalysis = field(repr=False)
    bijection: dict[int, int]  # glider id in x -> id in f(x)
    delta2s: dict[int, int]  # doubled position gain, per id in x
    trap_events: tuple[tuple[int, int], ...]  # (trapped, trapper), ids in x
    release_events: tuple[tuple[int, int], ...]


def advance(
    x: CyclicBitstring,
    partition: GliderPartition | None = None,
    verify: bool = True,
) -> AdvanceResult:
    """One application of f with the glider bijection across it.

    Movers are rekeyed (A,B) -> (B, landing staircase); everything else
    keeps its steps.  The result is checked against the fresh partition of
    f(x), and with verify=True the full step-type image is checked too."""
    n, k = x.n, x.k
    p = partition if partition is not None else glider_partition(x)
    ana = capture_analysis(p)
    fx = CyclicBitstring(n, k, _f_bits(x.bits, n))
    q = glider_partition(fx)
    if len(q.gliders) != len(p.gliders):
        raise InternalConsistencyError("glider count changed across f")
    keymap = {g.key(n): g.id for g in q.gliders}
    assert len(keymap) == len(q.gliders)
    bij: dict[int, int] = {}
    for g in p.gliders:
        if g.id in ana.movers:
            newkey: ClassKey = (
                frozenset(b % n for b in g.B),
                frozenset(s % n for s in ana.landing[g.id]),
            )
        else:
            newkey = g.key(n)
        nid = keymap.get(newkey)
        if nid is None:
            raise InternalConsistencyError(
                f"glider g{g.id} of {x} has no continuation in {fx}"
            )
        bij[g.id] = nid
    if len(set(bij.values())) != len(bij):
        raise InternalConsistencyError("glider continuation is not a bijection")

    delta2s = {
        g.id: (ana.s_plus[g.id] - g.s1 if g.id in ana.movers else 0)
        for g in p.gliders
    }
    if sum(delta2s.values()) != 2 * k:
        raise InternalConsistencyError("doubled position gains do not sum to 2k")

    inv = {v: u for u, v in bij.items()}
    old_rel = {(g.id, t) for g in p.gliders for t in g.trapped_by}
    new_rel = {(inv[g.id], inv[t]) for g in q.gliders for t in g.trapped_by}
    traps = tuple(sorted(new_rel - old_rel))
    releases = tuple(sorted(old_rel - new_rel))

    if verify:
        tx = step_types(x.bits, n)
        tfx = step_types(fx.bits, n)
        phi = ["F"] * n
        claimed = [False] * n
        for gid in ana.movers:
            g = p.gliders[gid]
            for j in range(g.s1 + 1, ana.s_plus[gid] + 1):
                r = j % n
                if claimed[r]:
                    raise InternalConsistencyError("jump intervals overlap mod n")
                claimed[r] = True
                phi[r] = "U" if tx[r] == "D" else "D"
        if list(tfx) != phi:
            raise InternalConsistencyError(f"step-type image mismatch at {x}")
    return AdvanceResult(
        x, fx, p, q, ana, bij, delta2s, traps, releases
    )


@dataclass(frozen=True)
class MotionStep:
    t: int
    bits: int
    class_at: tuple[int, ...]  # per position: class index, -1 unmatched
    movers: tuple[int, ...]  # class indices
    delta2s: tuple[int, ...]  # per class
    traps: tuple[tuple[int, int], ...]  # (trapped, trapper) class indices
    releases: tuple[tuple[int, int], ...]


@dataclass
class MotionTrace:
    """A run of the dynamics with per-class positions and trap counters.

    Classes are the gliders of the starting string, indexed in partition
    order and followed through the per-step bijections.  pos2 holds the
    accumulated doubled positions; counters2 the doubled trap counts,
    keyed (trapped class, trapper class)."""

    x0: CyclicBitstring
    speeds: tuple[int, ...]  # per class
    start2s: tuple[int, ...]
    steps: list[MotionStep]
    pos2: list[int]
    counters2: dict[tuple[int, int], int]
    final: CyclicBitstring


def motion_trace(
    x: CyclicBitstring, steps: int, verify: bool = True
) -> MotionTrace:
    p = glider_partition(x)
    speeds = tuple(g.speed for g in p.gliders)
    start2s = tuple(g.s1 + g.s2 for g in p.gliders)
    cls_of: dict[int, int] = {g.id: i for i, g in enumerate(p.gliders)}
    pos2 = list(start2s)
    counters2: dict[tuple[int, int], int] = {}
    out: list[MotionStep] = []
    cur = x
    for t in range(steps):
        adv = advance(cur, partition=p, verify=verify)
        class_at = tuple(
            -1 if gid < 0 else cls_of[gid] for gid in p.pos_class
        )
        d2 = [0] * len(speeds)
        for gid, d in adv.delta2s.items():
            d2[cls_of[gid]] = d
        movers = tuple(sorted(cls_of[g] for g in adv.analysis.movers))
        traps = tuple(sorted((cls_of[a], cls_of[b]) for a, b in adv.trap_events))
        rels = tuple(sorted((cls_of[a], cls_of[b]) for a, b in adv.release_events))
        out.append(MotionStep(t, cur.bits, class_at, movers, tuple(d2), traps, rels))
        for c, d in enumerate(d2):
            pos2[c] += d
        for pair in traps + rels:
            counters2[pair] = counters2.get(pair, 0) + 1
        cls_of = {adv.bijection[gid]: c for gid, c in cls_of.items()}
        p = adv.next_partition
        cur = adv.fx
        if verify:
            _check_motion_law(
                t + 1, speeds, start2s, pos2, counters2, p, cls_of, cur.n
            )
    return MotionTrace(x, speeds, start2s, out, pos2, counters2, cur)


def _check_motion_law(
    t: int,
    speeds: tuple[int, ...],
    start2s: tuple[int, ...],
    pos2: list[int],
    counters2: dict[tuple[int, int], int],
    p: GliderPartition,
    cls_of: dict[int, int],
    n: int,
) -> None:
    nu = len(speeds)
    for c in range(nu):
        rhs = start2s[c] + 2 * speeds[c] * t
        for other in range(nu):
            rhs += 2 * speeds[other] * counters2.get((other, c), 0)
            rhs -= 2 * speeds[c] * counters2.get((c, other), 0)
        if pos2[c] != rhs:
            raise InternalConsistencyError(
                f"motion law violated for class {c} at step {t}"
            )
    # accumulated positions agree with the fresh partition modulo a lap
    for gid, c in cls_of.items():
        g = p.gliders[gid]
        if (pos2[c] - (g.s1 + g.s2)) % n:
            raise InternalConsistencyError(
                f"tracked position of class {c} drifted at step {t}"
            )


@dataclass(frozen=True)
class OrbitPeriod:
    string_period: int  # length of the factor cycle through x
    glider_period: int  # steps until every class returns to its own steps
    class_cycles: tuple[tuple[int, ...], ...]  # permutation cycles on classes


def find_period(x: CyclicBitstring, verify: bool = False) -> OrbitPeriod:
    """String period L and glider period T = L * lcm of the class shuffle."""
    n = x.n
    length = 1
    b = _f_bits(x.bits, n)
    while b != x.bits:
        b = _f_bits(b, n)
        length += 1
    p0 = glider_partition(x)
    cls_of = {g.id: i for i, g in enumerate(p0.gliders)}
    cur = x
    p = p0
    for _ in range(length):
        adv = advance(cur, partition=p, verify=verify)
        cls_of = {adv.bijection[gid]: c for gid, c in cls_of.items()}
        p = adv.next_partition
        cur = adv.fx
    assert cur == x
    # the final partition has the ids of p0 again; class c now occupies the
    # steps of glider forward[c]
    forward = {c: gid for gid, c in cls_of.items()}
    for c, d in forward.items():
        assert p0.gliders[c].speed == p0.gliders[d].speed
    seen: set[int] = set()
    cycles: list[tuple[int, ...]] = []
    for c in range(len(p0.gliders)):
        if c in seen:
            continue
        cyc = [c]
        seen.add(c)
        d = forward[c]
        while d != c:
            cyc.append(d)
            seen.add(d)
            d = forward[d]
        cycles.append(tuple(cyc))
    t = length * lcm(*(len(cyc) for cyc in cycles))
    return OrbitPeriod(length, t, tuple(cycles))


def _bareiss_det(m: list[list[int]]) -> int:
    m = [row[:] for row in m]
    size = len(m)
    sign = 1
    prev = 1
    for i in range(size - 1):
        if m[i][i] == 0:
            for r in range(i + 1, size):
                if m[r][i]:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, size):
            for c in range(i + 1, size):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = m[i][i]
    return sign * m[-1][-1]


def motion_matrix(n: int, speeds: tuple[int, ...]) -> tuple[list[list[int]], int]:
    """Interaction matrix of the average motion, with its determinant.

    speeds must be ascending.  Row 0 balances the fastest lap counts; row i
    couples class i to slower classes through overtakes.  The determinant
    has the closed form (-1)^(nu-1) v1 prod(n - V_i), nonzero whenever
    n > 2k, which makes the average speeds of the classes well defined."""
    if list(speeds) != sorted(speeds) or not speeds:
        raise ParameterError("speeds must be an ascending nonempty tuple")
    nu = len(speeds)
    v = list(speeds)

    def big_v(i: int) -> int:  # 1-indexed
        return sum(2 * v[min(i, j + 1) - 1] for j in range(nu))

    mat: list[list[int]] = []
    row0 = [v[0]] + [-2 * v[0]] * (nu - 1)
    mat.append(row0)
    for i in range(2, nu + 1):
        row = [v[i - 1]]
        for j in range(2, nu + 1):
            if j < i:
                row.append(-2 * v[j - 1])
            elif j == i:
                row.append(big_v(i) - 2 * v[i - 1] - n)
            else:
                row.append(-2 * v[i - 1])
        mat.append(row)
    det = _bareiss_det(mat)
    closed = (-1) ** (nu - 1) * v[0]
    for i in range(2, nu + 1):
        closed *= n - big_v(i)
    if det != closed or det == 0:
        raise InternalConsistencyError("motion matrix determinant mismatch")
    return mat, det


def _require_shiftable(p: GliderPartition, g: Glider) -> None:
    if not g.free:
        raise ParameterError("only a free glider can be shifted")
    vmin = min(h.speed for h in p.gliders)
    if g.speed != vmin:
        raise ParameterError("only a slowest glider can be shifted")
    comp = train_composition(p)[vmin]
    for train in comp.trains:
        if g.id in train:
            if train[-1] != g.id:
                raise ParameterError("the shifted glider must close its train")
            return
    raise InternalConsistencyError("glider missing from its train")


def shift_glider(
    x: CyclicBitstring, glider: Glider, partition: GliderPartition | None = None
) -> CyclicBitstring:
    """Transpose the two bits just right of the peak and of the last step of
    the glider's preimage copy, nudging the glider one position forward
    without disturbing anything else.  f commutes with the shift, which is
    what makes parallel-orbit tracking work."""
    p = partition if partition is not None else glider_partition(x)
    _require_shiftable(p, glider)
    n = x.n
    y = apply_f_inverse(x)
    adv = advance(y, verify=False)
    target = glider.key(n)
    back = None
    for gid, nid in adv.bijection.items():
        if adv.next_partition.gliders[nid].key(n) == target:
            back = adv.partition.gliders[gid]
            break
    if back is None:
        raise InternalConsistencyError("no preimage glider under f")
    i1 = (back.s1 + 1) % n
    i2 = (back.s2 + 1) % n
    b1 = (x.bits >> i1) & 1
    b2 = (x.bits >> i2) & 1
    if b1 == b2:
        raise InternalConsistencyError("shift positions carry equal bits")
    return CyclicBitstring(n, x.k, x.bits ^ (1 << i1) ^ (1 << i2))


@dataclass(frozen=True)
class TauResult:
    t: int
    z: CyclicBitstring  # f^t of the start


def _carries(n: int, a: int, q: int, bit: int, pos: int) -> bool:
    if bit == 1:
        return (pos - q) % n < a
    return (pos - q - a) % n < a


def _open_clean_carries(
    p: GliderPartition, g: Glider, bit: int, pos: int
) -> bool:
    if g.inverted or not g.is_clean():
        return False
    if p.pos_class[(g.s2 + 1) % p.x.n] >= 0:
        return False  # not open: the position after the glider is matched
    return _carries(p.x.n, g.speed, g.s0 % p.x.n, bit, pos)


def tau(
    x: CyclicBitstring,
    glider: Glider,
    bit: int,
    pos: int,
    partition: GliderPartition | None = None,
    cap: int | None = None,
) -> TauResult:
    """First t >= 0 at which the tracked glider sits cleanly on consecutive
    positions, is upright and open, and carries the wanted bit at pos.

    Runs two parallel orbits, the second with the glider shifted by one.
    Their two differing bits reveal the previous step's peak and last-step
    coordinates, so each candidate t is tested one step late against the
    retained previous string; no partitions are recomputed along the way."""
    n, k = x.n, x.k
    a = glider.speed
    p = partition if partition is not None else glider_partition(x)
    if cap is None:
        cap = n * comb(n, k)
    shifted = shift_glider(x, glider, p).bits
    prev = x.bits
    prev_um = ((1 << n) - 1) & ~(prev | _scan_match(prev, n)[1])
    cur = prev
    cur_shifted = shifted
    for t in range(1, cap + 2):
        cur = _f_bits(cur, n)
        cur_shifted = _f_bits(cur_shifted, n)
        diff = cur ^ cur_shifted
        if diff.bit_count() != 2:
            raise InternalConsistencyError("parallel orbits drifted apart")
        d1 = (diff & -diff).bit_length() - 1
        d2 = (diff & (diff - 1)).bit_length() - 1
        hits = []
        for u, w in ((d1, d2), (d2, d1)):
            if (u + a) % n != w:
                continue
            # u = peak+1, w = last+1 of the previous copy; clean means the
            # a bits before u are its 1s and the a from u its matched 0s
            q = (u - a) % n
            if any((prev >> ((q + i) % n)) & 1 == 0 for i in range(a)):
                continue
            if any(
                (prev >> ((u + i) % n)) & 1 or (prev_um >> ((u + i) % n)) & 1
                for i in range(a)
            ):
                continue
            if not (prev_um >> w) & 1:
                continue  # not open
            if _carries(n, a, q, bit, pos):
                hits.append(q)
        if len(hits) > 1:
            raise InternalConsistencyError("ambiguous glider reading")
        if hits:
            return TauResult(t - 1, CyclicBitstring(n, k, prev))
        prev_um = ((1 << n) - 1) & ~(cur | _scan_match(cur, n)[1])
        prev = cur
    raise InternalConsistencyError("first-visit search exceeded its cap")


def tau_slow(
    x: CyclicBitstring,
    glider: Glider,
    bit: int,
    pos: int,
    cap: int | None = None,
) -> TauResult:
    """Reference implementation of tau: follow the class through advance."""
    if cap is None:
        cap = x.n * comb(x.n, x.k)
    p = glider_partition(x)
    gid = glider.id
    cur = x
    for t in range(cap + 1):
        g = p.gliders[gid]
        if _open_clean_carries(p, g, bit, pos):
            return TauResult(t, cur)
        adv = advance(cur, partition=p, verify=False)
        gid = adv.bijection[gid]
        p = adv.next_partition
        cur = adv.fx
    raise InternalConsistencyError("first-visit search exceeded its cap")


_HUES = [0, 210, 120, 30, 270, 180, 60, 330, 150, 240, 90, 300]


def render_trace(trace: MotionTrace) -> str:
    """Text table: step, string with unmatched shown as '-', class ids."""
    n = trace.x0.n
    lines = []
    width = len(str(len(trace.steps)))
    for st in trace.steps:
        _, m0 = _scan_match(st.bits, n)
        um = ((1 << n) - 1) & ~(st.bits | m0)
        s = "".join(
            "1" if (st.bits >> i) & 1 else "-" if (um >> i) & 1 else "0"
            for i in range(n)
        )
        ids = "".join(
            "." if c < 0 else ("0123456789abcdefghijklmnopqrstuvwxyz"[c % 36])
            for c in st.class_at
        )
        note = ""
        if st.traps:
            note += " traps " + ",".join(f"{a}<{b}" for a, b in st.traps)
        if st.releases:
            note += " releases " + ",".join(f"{a}<{b}" for a, b in st.releases)
        lines.append(f"t={st.t:<{width}} {s}  {ids}{note}")
    return "\n".join(lines)


def trace_svg(trace: MotionTrace) -> str:
    """Time-space diagram: one row per step, one cell per position, colored
    by glider class."""
    n = trace.x0.n
    cell = 14
    rows = len(trace.steps)
    w = n * cell + 2
    h = rows * cell + 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]
    for r, st in enumerate(trace.steps):
        for i in range(n):
            c = st.class_at[i]
            one = (st.bits >> i) & 1
            if c < 0:
                fill = "#eeeeee"
            else:
                hue = _HUES[c % len(_HUES)]
                fill = f"hsl({hue},70%,{45 if one else 75}%)"
            parts.append(
                f'<rect x="{1 + i * cell}" y="{1 + r * cell}" '
                f'width="{cell - 1}" height="{cell - 1}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    return "".join(parts)
