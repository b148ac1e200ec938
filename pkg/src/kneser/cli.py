"""Command line interface.

Subcommands:
  gen     construct a Hamilton cycle (or the strongest substitute) and print it
  verify  recheck a printed tour from a file or stdin
  factor  print the parenthesis-matching cycle factor of K(n, k)
  trace   run the glider dynamics from a start vertex
  plan    show the gluing plan: rewrite pairs, rotation pairs, spanning tree

Exit codes: 0 success, 1 verification failure, 2 bad parameters,
3 provably infeasible, 4 timeout or unsupported.
"""

import argparse
import json
import sys
from collections import Counter
from math import gcd

from .bitstrings import CyclicBitstring, cycle_factor, from_string, to_string
from .dynamics import motion_trace, render_trace, trace_svg
from .errors import ParameterError
from .gliders import glider_partition, speed_partition, train_composition
from .families import (
    DEFAULT_FALLBACK_CAP,
    DEFAULT_FALLBACK_SECS,
    GraphSpec,
    HamiltonResult,
    hamilton_tour,
    verify_tour,
)
from .gluing import build_gluing_plan

__all__ = ["main"]


def _add_family_flags(p: argparse.ArgumentParser, required: bool) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--kneser", nargs=2, type=int, metavar=("N", "K"),
                   help="Kneser graph K(N, K): disjoint K-sets")
    g.add_argument("--johnson", nargs=3, type=int, metavar=("N", "K", "S"),
                   help="generalized Johnson J(N, K, S): K-sets meeting in exactly S")
    g.add_argument("--gen-kneser", nargs=3, type=int, metavar=("N", "K", "S"),
                   dest="gen_kneser",
                   help="generalized Kneser K(N, K, S): K-sets meeting in at most S")
    g.add_argument("--bipartite", nargs=2, type=int, metavar=("N", "K"),
                   help="containment graph H(N, K): K-sets below (N-K)-sets")


def _spec_from_args(args) -> GraphSpec | None:
    if args.kneser is not None:
        n, k = args.kneser
        return GraphSpec("kneser", n, k)
    if args.johnson is not None:
        n, k, s = args.johnson
        return GraphSpec("johnson", n, k, s)
    if args.gen_kneser is not None:
        n, k, s = args.gen_kneser
        return GraphSpec("gen-kneser", n, k, s)
    if args.bipartite is not None:
        n, k = args.bipartite
        return GraphSpec("bipartite", n, k)
    return None


def _fmt_vertex(v: int, n: int, fmt: str) -> str:
    if fmt == "bits":
        return to_string(v, n)
    return ",".join(str(i + 1) for i in range(n) if v >> i & 1)


def _tour_header(spec: GraphSpec, status: str) -> str:
    head = f"{spec.n} {spec.k} {spec.family}"
    if spec.family in ("johnson", "gen-kneser"):
        head += f" {spec.s}"
    if status == "path":
        head += " path"
    return head


def _exit_code(spec: GraphSpec, r: HamiltonResult) -> int:
    if r.status == "cycle":
        return 0
    if r.status == "path":
        if r.cycle_exists is False:
            return 3
        return 0 if spec.family == "bipartite" else 4
    if r.status == "none":
        return 3
    return 4


def _cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    r = hamilton_tour(spec, args.fallback_cap, args.fallback_secs)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        if r.vertices:
            if args.format == "json":
                payload = {
                    "n": spec.n, "k": spec.k, "family": spec.family,
                    "s": spec.s if spec.family in ("johnson", "gen-kneser") else None,
                    "status": r.status, "closed": r.status == "cycle",
                    "count": len(r.vertices), "note": r.note,
                    "vertices": [[i + 1 for i in range(spec.n) if v >> i & 1]
                                 for v in r.vertices],
                }
                print(json.dumps(payload), file=out)
            else:
                print(_tour_header(spec, r.status), file=out)
                for v in r.vertices:
                    print(_fmt_vertex(v, spec.n, args.format), file=out)
        if r.status not in ("cycle",):
            print(f"{r.status}: {r.note}", file=sys.stderr)
    finally:
        if args.output:
            out.close()
    return _exit_code(spec, r)


def _parse_tour(text: str) -> tuple[GraphSpec, list[int], bool]:
    text = text.strip()
    if not text:
        raise ParameterError("empty tour input")
    if text.startswith("{"):
        payload = json.loads(text)
        family = payload["family"]
        s = payload.get("s") or 0
        spec = GraphSpec(family, payload["n"], payload["k"], s)
        verts = [sum(1 << (i - 1) for i in elems) for elems in payload["vertices"]]
        return spec, verts, bool(payload.get("closed", True))
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) < 3:
        raise ParameterError(f"bad tour header {lines[0]!r}")
    n, k, family = int(head[0]), int(head[1]), head[2]
    rest = head[3:]
    closed = True
    if rest and rest[-1] == "path":
        closed = False
        rest = rest[:-1]
    s = int(rest[0]) if rest else 0
    spec = GraphSpec(family, n, k, s)
    verts = []
    for ln in lines[1:]:
        if set(ln) <= {"0", "1", "-"}:
            if len(ln) != n:
                raise ParameterError(f"bitstring {ln!r} is not {n} positions long")
            verts.append(from_string(ln))
        else:
            verts.append(sum(1 << (int(tok) - 1) for tok in ln.split(",")))
    return spec, verts, closed


def _cmd_verify(args) -> int:
    if args.file:
        with open(args.file) as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    spec, verts, closed = _parse_tour(text)
    declared = _spec_from_args(args)
    if declared is not None and declared != spec:
        print(f"declared {declared} but the input describes {spec}", file=sys.stderr)
        return 2
    if verify_tour(spec, verts, closed):
        kind = "cycle" if closed else "path"
        print(f"ok: Hamilton {kind} of {spec.family} n={spec.n} k={spec.k}"
              + (f" s={spec.s}" if spec.family in ("johnson", "gen-kneser") else "")
              + f", {len(verts)} vertices")
        return 0
    print(_verify_diagnosis(spec, verts, closed), file=sys.stderr)
    return 1


def _verify_diagnosis(spec: GraphSpec, verts: list[int], closed: bool) -> str:
    want = spec.vertex_count()
    if len(verts) != want:
        return f"fail: {len(verts)} vertices listed, the graph has {want}"
    if len(set(verts)) != len(verts):
        return "fail: repeated vertex"
    for v in verts:
        if not spec.valid_vertex(v):
            return f"fail: {to_string(v, spec.n)} is not a vertex of this graph"
    pairs = zip(verts, verts[1:] + verts[:1]) if closed else zip(verts, verts[1:])
    for i, (u, v) in enumerate(pairs):
        if not spec.adjacent(u, v):
            return (f"fail: positions {i} and {i + 1}: "
                    f"{to_string(u, spec.n)} and {to_string(v, spec.n)} are not adjacent")
    return "fail"


def _resolve_nk(args) -> tuple[int, int]:
    flagged = getattr(args, "kneser", None)
    if flagged is not None:
        if args.n is not None:
            raise ParameterError("give n and k either positionally or via --kneser, not both")
        return flagged[0], flagged[1]
    if args.n is None or args.k is None:
        raise ParameterError("n and k are required (positionally or via --kneser n k)")
    return args.n, args.k


def _cycle_invariants(c, n: int, k: int) -> tuple[tuple[int, ...], dict[int, tuple[int, ...]]]:
    p = glider_partition(CyclicBitstring(n, k, c.key))
    comp = {v: tc.composition for v, tc in train_composition(p).items()}
    return speed_partition(p), comp


def _fmt_trains(comp: dict[int, tuple[int, ...]]) -> str:
    return ";".join(
        f"{v}^({','.join(map(str, comp[v]))})" for v in sorted(comp, reverse=True)
    )


def _cmd_factor(args) -> int:
    n, k = _resolve_nk(args)
    f = cycle_factor(n, k)
    hist = Counter(len(c) for c in f.cycles)
    if args.format == "json":
        payload = {
            "n": f.n, "k": f.k, "cycle_count": len(f.cycles),
            "vertex_count": f.total_vertices(),
            "length_histogram": {str(length): hist[length] for length in sorted(hist)},
            "cycles": [],
        }
        for c in f.cycles:
            part, comp = _cycle_invariants(c, f.n, f.k)
            payload["cycles"].append({
                "key": to_string(c.key, f.n), "length": len(c),
                "V": list(part),
                "Z": {str(v): list(comp[v]) for v in sorted(comp, reverse=True)},
                "vertices": [to_string(v, f.n) for v in c.vertices],
            })
        print(json.dumps(payload))
        return 0
    print(f"n={f.n} k={f.k} cycles={len(f.cycles)} vertices={f.total_vertices()}")
    print("lengths: " + ", ".join(
        f"{hist[length]} cycles x length {length}" for length in sorted(hist)))
    for i, c in enumerate(f.cycles):
        part, comp = _cycle_invariants(c, f.n, f.k)
        body = " ".join(_fmt_vertex(v, f.n, args.format) for v in c.vertices)
        v_str = ",".join(map(str, part))
        print(f"cycle {i} len {len(c)} V=({v_str}) Z={_fmt_trains(comp)}: {body}")
    return 0


def _cmd_trace(args) -> int:
    bits = from_string(args.start)
    if len(args.start) != args.n:
        raise ParameterError(f"start string has {len(args.start)} positions, n={args.n}")
    k = args.start.count("1")
    if k != args.k:
        raise ParameterError(f"start string has {k} ones, k={args.k}")
    x = CyclicBitstring(args.n, args.k, bits)
    tr = motion_trace(x, args.steps)
    print(render_trace(tr))
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(trace_svg(tr))
        print(f"wrote {args.svg}", file=sys.stderr)
    return 0


def _cmd_plan(args) -> int:
    plan = build_gluing_plan(args.n, args.k, args.anchor)
    n, k = plan.n, plan.k
    g = gcd(n, k)
    print(f"K({n},{k}): anchor p={plan.anchor}, factor cycles={len(plan.factor.cycles)}, "
          f"vertices={plan.factor.total_vertices()}")
    print(f"single-glider cycles merged: {g}")
    print(f"rotation base r={plan.rotation_base}, rotation pairs: {len(plan.rotation_pairs)}")
    for a, b in plan.rotation_pairs:
        print(f"  rotate {a} <-> {b}")
    counts = plan.family_counts()
    total = sum(counts.values())
    print(f"rewrite matches: {total} " +
          " ".join(f"rule{fam}:{c}" for fam, c in counts.items()))
    print(f"spanning tree: {len(plan.tree)} connectors")
    shown = plan.rewrites if args.full else plan.tree
    label = "connector" if args.full else "tree edge"
    for rm in shown:
        star = "*" if rm.branched else ""
        print(f"  {label} rule{rm.family}{star}: {rm.x} <-> {rm.image}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kneser", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="construct a Hamilton tour")
    _add_family_flags(gen, required=True)
    gen.add_argument("--format", choices=("bits", "sets", "json"), default="bits")
    gen.add_argument("--fallback-cap", type=int, default=DEFAULT_FALLBACK_CAP,
                     help="largest vertex count attempted by fallback search")
    gen.add_argument("--fallback-secs", type=float, default=DEFAULT_FALLBACK_SECS,
                     help="time budget for fallback search")
    gen.add_argument("-o", "--output", help="write the tour here instead of stdout")
    gen.set_defaults(func=_cmd_gen)

    ver = sub.add_parser("verify", help="recheck a tour printed by gen")
    ver.add_argument("file", nargs="?", help="tour file, stdin when omitted")
    _add_family_flags(ver, required=False)
    ver.set_defaults(func=_cmd_verify)

    fac = sub.add_parser("factor", help="print the cycle factor of K(n, k)")
    fac.add_argument("n", type=int, nargs="?", default=None)
    fac.add_argument("k", type=int, nargs="?", default=None)
    fac.add_argument("--kneser", nargs=2, type=int, metavar=("N", "K"),
                     help="alternative to the positional n k")
    fac.add_argument("--format", choices=("bits", "sets", "json"), default="bits")
    fac.set_defaults(func=_cmd_factor)

    tra = sub.add_parser("trace", help="run the glider dynamics")
    tra.add_argument("n", type=int)
    tra.add_argument("k", type=int)
    tra.add_argument("--start", required=True,
                     help="start vertex as a bitstring, position 0 first")
    tra.add_argument("--steps", type=int, default=None,
                     help="steps to run (default n)")
    tra.add_argument("--svg", help="also write a time-space diagram here")
    tra.set_defaults(func=_cmd_trace)

    pla = sub.add_parser("plan", help="show the gluing plan for K(n, k)")
    pla.add_argument("n", type=int)
    pla.add_argument("k", type=int)
    pla.add_argument("--anchor", type=int, default=0)
    pla.add_argument("--full", action="store_true",
                     help="list every connector, not just the spanning tree")
    pla.set_defaults(func=_cmd_plan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 0) is None:
        args.steps = args.n
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
