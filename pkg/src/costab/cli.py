"""Command-line entry points.

Exit codes: 0 when every verdict passes, 1 when some verdict fails or is
unverifiable, 2 on parse or usage errors.
"""

from __future__ import annotations

import argparse
import cmath
import math
import random
import sys
from pathlib import Path

from . import conditions as cs
from .algebra import QuiverAlgebra, load_algebra, preset
from .coslice import (COSLICING_SCHEMA, check_axioms, check_condition_S, epsilon0, load_coslicing,
                      metric, parse_coslicing)
from .cotstruct import (COTSTRUCTURE_SCHEMA, check_cotstructure, enumerate_cohearts, from_coheart,
                        heart_filtration, parse_cotstructure, resolve_cotstructure)
from .field import Field
from .report import Report
from .snapshot import SCHEMA as SNAPSHOT_SCHEMA
from .snapshot import (FormalObject, IndecId, SnapshotError, WindowExhausted, build_snapshot, load_snapshot,
                       parse_snapshot)
from .textio import ParseError
from .towers import tower_lines


def _snapshot(args, default_algebra: str = "kA2", min_width: int = 0):
    if getattr(args, "snapshot", None):
        return load_snapshot(args.snapshot)
    name = args.algebra or default_algebra
    fld = Field.parse(args.field)
    if Path(name).is_file():
        A = load_algebra(name)
        if fld != A.field:
            A = QuiverAlgebra(A.presentation.with_field(fld))
    else:
        A = preset(name, fld)
    width = max(args.width, min_width)
    return build_snapshot(A, width, tuple(args.window))


def _emit(args, text: str) -> None:
    sys.stdout.write(text)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")


def _status(rep: Report) -> int:
    return 0 if rep.ok else 1


def _schema_of(text: str) -> str | None:
    for line in text.splitlines():
        t = line.split("#", 1)[0].strip()
        if t.startswith("schema"):
            return t.split("=", 1)[1].strip() if "=" in t else None
    return None


# -- commands ------------------------------------------------------------------

def cmd_validate(args) -> int:
    code = 0
    out = []
    snap = None
    for path in args.paths:
        text = Path(path).read_text(encoding="utf-8")
        schema = _schema_of(text)
        if schema == SNAPSHOT_SCHEMA:
            s = parse_snapshot(text, path)
            rep = Report("snapshot", {"path": path, "window": f"{s.window[0]} {s.window[1]}",
                                      "field": s.algebra.field.name})
            try:
                s.validate()
                rep.add("consistent", True)
            except SnapshotError as exc:
                rep.add("consistent", False, str(exc))
            rep.add("catalog", s.catalog_closed, "" if s.catalog_closed else "triangle catalog not closed under rotation")
            snap = snap or s
        else:
            snap = snap or _snapshot(args)
            if schema == COSLICING_SCHEMA:
                Q = parse_coslicing(text, path)
                rep = check_axioms(snap, Q)
            elif schema == cs.CONDITION_SCHEMA:
                rep = cs.check_condition(snap, cs.parse_condition(snap, text, path))
            elif schema == cs.CHARGE_SCHEMA:
                Z = cs.parse_charge(snap, text, path)
                rep = Report("charge", {"rank": snap.k0_rank})
                finite = all(math.isfinite(v.real) and math.isfinite(v.imag) for v in Z.values)
                rep.add("finite", finite, "" if finite else "non-finite value")
                for b, v in zip(snap.k0_basis, Z.values):
                    rep.info(b, f"{v.real!r} {v.imag!r}")
            elif schema == COTSTRUCTURE_SCHEMA:
                P, rep = resolve_cotstructure(snap, parse_cotstructure(text, path))
                rep.extend(check_cotstructure(snap, P))
            else:
                raise ParseError(f"unknown or missing schema {schema!r}", path=path)
            rep.context["path"] = path
        out.append(rep.render())
        code = max(code, _status(rep))
    _emit(args, "\n".join(out))
    return code


def cmd_demo_dual(args) -> int:
    snap = _snapshot(args, "dual", min_width=3)
    rep = Report("demo-theorem-b", {"window": f"{snap.window[0]} {snap.window[1]}",
                                    "field": snap.algebra.field.name, "seed": args.seed})
    en = enumerate_cohearts(snap)
    hearts = [sorted(P.coheart) for P in en.structures]
    orbits = {i.orbit for h in hearts for i in h}
    shifts = sorted(h[0].shift for h in hearts if len(h) == 1)
    lo, hi = snap.window
    ok = len(orbits) == 1 and all(len(h) == 1 for h in hearts) and shifts == list(range(lo, hi + 1))
    rep.add("cohearts", ok and en.complete, "found: " + "; ".join(" ".join(map(str, h)) for h in hearts))
    if orbits:
        rep.info("generator", "add(" + next(iter(orbits)) + ")")
    rep.add("k0-rank", snap.k0_rank == 1, f"rank {snap.k0_rank}")
    rep.info("chart-dimension", str(2 * snap.k0_rank))
    rng = random.Random(args.seed)
    sample = []
    for _ in range(args.count):
        phi0 = rng.uniform(lo, hi + 1)
        z0 = rng.uniform(0.2, 5.0) * cmath.exp(1j * math.pi * phi0)
        sample.append(cs.dual_condition(snap, z0, phi0))
    valid = all(cs.check_condition(snap, C, axioms=(k < 3)).ok for k, C in enumerate(sample))
    rep.add("sample-valid", valid, f"{len(sample)} conditions (z0, φ0)")
    trans, free = True, True
    for C1 in sample:
        C2 = sample[rng.randrange(len(sample))]
        z1, p1 = cs.dual_coordinates(snap, C1)
        z2, p2 = cs.dual_coordinates(snap, C2)
        g = cs.GElement(z1 / z2, p1 - p2)
        if not cs.act_g(C1, g).same_as(C2, 1e-9):
            trans = False
        h = cs.GElement.from_polar(rng.uniform(0.5, 2.0), rng.choice([-1, 1]) * rng.uniform(0.01, 1.5))
        if cs.act_g(C1, h).same_as(C1, 1e-9):
            free = False
    rep.add("transitive", trans, "each sampled condition carried to another by the solved G element")
    rep.add("free", free, "no nontrivial sampled element fixes a condition")
    rows = ["z0_re,z0_im,phi0"]
    for C in sample:
        z, p = cs.dual_coordinates(snap, C)
        rows.append(f"{z.real!r},{z.imag!r},{p!r}")
    if args.csv:
        Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8")
        rep.info("chart-csv", args.csv)
    _emit(args, rep.render())
    return _status(rep)


def cmd_demo_counterexample(args) -> int:
    eps = args.eps if args.eps is not None else 0.1
    if not 0 < eps < 0.5:
        raise SystemExit("error: --eps must lie in (0, 1/2)")
    snap = _snapshot(args, "kA2")
    snap, C, W = cs.counterexample_data(eps, snap)
    rep = Report("demo-counterexample", {"window": f"{snap.window[0]} {snap.window[1]}",
                                         "field": snap.algebra.field.name, "eps": eps})
    rep.extend(cs.check_condition(snap, C), "Q ")
    S = check_condition_S(snap, C.Q)
    rep.add("S-fails", not S, f"witness ({S.witness[0]}, {S.witness[1]})" if S.witness else "no witness")
    w = cs.inequality_witness(snap, C, W, eps)
    rep.info("strict-bound", "equality at " + str(w[0]) + f": |W-Z| = {w[1]:.15g}, sin(πε)|Z| = {w[2]:.15g}"
             if w else "strict inequality holds")
    try:
        cs.deform(snap, C, W, eps)
        rep.add("deform-refused", False, "deformation was not refused")
    except cs.DeformRefused as exc:
        rep.add("deform-refused", True, str(exc))
    sc = cs.counterexample_scan(snap, C, W)
    rep.add("no-R", sc.exists is False, f"{sc.candidates} candidates, {sc.near} within 1/2")
    for k, line in enumerate(sc.trace):
        rep.info(f"trace {k + 1}", line)
    _, G = cs.good_kA2_data(snap)
    e = epsilon0(G.Q) / 2
    Wg = cs.perturb(snap, G, math.sin(math.pi * e) * 0.5, random.Random(args.seed))
    res = cs.deform(snap, G, Wg, e)
    rep.add("contrast-deform", res.report.ok, f"{G.Q.describe()} -> {res.condition.Q.describe()}, "
            f"d = {res.distance:.6g}")
    _emit(args, rep.render())
    return _status(rep)


def cmd_deform(args) -> int:
    snap = _snapshot(args)
    C = cs.load_condition(snap, args.condition)
    W = cs.load_charge(snap, args.target)
    eps = args.eps if args.eps is not None else epsilon0(C.Q) / 2
    try:
        res = cs.deform(snap, C, W, eps, rational_denominator=args.rational)
    except cs.DeformRefused as exc:
        rep = Report("deform", {"eps": f"{eps:.9g}"})
        rep.add("precondition", False, str(exc))
        sys.stdout.write(rep.render())
        return 1
    text = res.report.render()
    sys.stdout.write(text)
    if args.out:
        cs.save_condition(snap, res.condition, args.out)
    return _status(res.report)


def cmd_metric(args) -> int:
    snap = _snapshot(args)
    Q, R = load_coslicing(args.first), load_coslicing(args.second)
    d = metric(snap, Q, R)
    rep = Report("metric", {"window": f"{snap.window[0]} {snap.window[1]}"})
    for name, X in (("first", Q), ("second", R)):
        rep.extend(check_axioms(snap, X), name + " ")
    value = "undetermined" if d.value is None else repr(d.value)
    rep.info("d", f"{value} ; method {d.method} ; per-id {d.per_id!r}" +
             ("" if d.exact else f" ; d >= {d.lower}"))
    _emit(args, rep.render())
    return _status(rep)


def cmd_hn(args) -> int:
    snap = _snapshot(args)
    if args.cotstructure:
        P, rep0 = resolve_cotstructure(snap, parse_cotstructure(Path(args.cotstructure).read_text(), args.cotstructure))
    else:
        C = [IndecId.parse(w) for w in (args.coheart or "x@0 y@0").split()]
        P, rep0 = from_coheart(snap, C), Report("hn")
    t = FormalObject.parse(args.object)
    T = heart_filtration(snap, P, t)
    rep = Report("hn", {"object": str(t), "window": f"{snap.window[0]} {snap.window[1]}"})
    rep.extend(rep0)
    rep.add("tower", T.validate(), T.describe())
    for k, line in enumerate(tower_lines(T)):
        rep.info(f"line {k + 1}", line)
    _emit(args, rep.render())
    return _status(rep)


def cmd_enumerate_cohearts(args) -> int:
    snap = _snapshot(args)
    en = enumerate_cohearts(snap)
    rep = Report("cohearts", {"window": f"{snap.window[0]} {snap.window[1]}",
                              "field": snap.algebra.field.name, "candidates": en.candidates})
    rep.add("complete", en.complete)
    for k, P in enumerate(en.structures):
        rep.info(f"coheart {k + 1}", " ".join(map(str, sorted(P.coheart))))
    _emit(args, rep.render())
    return _status(rep)


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="preset (k, kA2, dual) or algebra file")
    common.add_argument("--snapshot", help="snapshot file to use instead of building one")
    common.add_argument("--window", nargs=2, type=int, default=[-2, 2], metavar=("LO", "HI"))
    common.add_argument("--width", type=int, default=2, help="width bound for indecomposables")
    common.add_argument("--field", default="QQ", help="QQ or GF(p)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eps", type=float, default=None)
    common.add_argument("--out", help="also write the report (or result) to this file")

    p = argparse.ArgumentParser(prog="costab", description="Co-slicings and co-stability conditions.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check snapshot, co-slicing, condition or co-t-structure files")
    s.add_argument("paths", nargs="+")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("demo-theorem-b", parents=[common], help="dual numbers: co-hearts and the G-action")
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--csv", help="write the (z0, φ0) chart rows here")
    s.set_defaults(func=cmd_demo_dual)
    s = sub.add_parser("demo-counterexample", parents=[common], help="kA2 condition without (S)")
    s.set_defaults(func=cmd_demo_counterexample)
    s = sub.add_parser("deform", parents=[common], help="deform a condition to a new charge")
    s.add_argument("condition")
    s.add_argument("target", help="charge file or condition file supplying W")
    s.add_argument("--rational", type=int, default=None, metavar="N",
                   help="snap output phases within 1e-9 of a fraction with denominator <= N")
    s.set_defaults(func=cmd_deform)
    s = sub.add_parser("metric", parents=[common], help="distance between two co-slicings")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_metric)
    s = sub.add_parser("hn", parents=[common], help="co-heart filtration of an object")
    s.add_argument("object", help="formal object, e.g. 'z@0' or '2*x@1 + y@0'")
    s.add_argument("--cotstructure", help="co-t-structure file")
    s.add_argument("--coheart", help="co-heart ids, default 'x@0 y@0'")
    s.set_defaults(func=cmd_hn)
    s = sub.add_parser("enumerate-cohearts", parents=[common], help="list silting co-hearts in the window")
    s.set_defaults(func=cmd_enumerate_cohearts)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (FileNotFoundError, WindowExhausted) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
