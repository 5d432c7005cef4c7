"""Co-t-structures on a snapshot: axioms, co-hearts, filtrations and split K₀."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass

from .report import INFO, UNVERIFIABLE, Report
from .snapshot import FormalObject, IndecId, Snapshot, WindowExhausted
from .textio import format_sections, parse_sections
from .towers import UNKNOWN, DepthExhausted, Tower, find_tower


@dataclass(frozen=True)
class CoTStructure:
    """Aisle A and co-aisle B as in-window id sets.

    When ``coheart`` is given, membership of ids outside the window is
    decided by the perpendicular rules A = ⊥(Σ^{>=1}C), B = (Σ^{<=0}C)^⊥.
    """

    A: frozenset
    B: frozenset
    coheart: frozenset | None = None
    outside: str | None = None  # "A" or "B": side of every id beyond the window

    def derived_coheart(self) -> frozenset:
        return frozenset(c for c in self.A if c.suspend(1) in self.B)


def _coheart_offsets(C) -> dict[str, int]:
    out = {}
    for c in C:
        if c.orbit in out:
            raise ValueError(f"co-heart contains two shifts of orbit {c.orbit}")
        out[c.orbit] = c.shift
    return out


def heart_tag(C) -> callable:
    """Tag j for ids of the form Σ^j c with c in C, None otherwise."""
    offs = _coheart_offsets(C)

    def tag(i: IndecId):
        if i.orbit in offs:
            return i.shift - offs[i.orbit]
        return None

    return tag


def from_coheart(snap: Snapshot, C) -> CoTStructure:
    """The co-t-structure generated by a silting set C, on in-window ids."""
    C = frozenset(C)
    tag = heart_tag(C)
    A, B = set(), set()
    for t in snap.ids:
        tw = find_tower(snap, FormalObject([t]), tag)
        if tw is None:
            continue
        if max(tw.tags) <= 0:
            A.add(t)
        if min(tw.tags) >= 1:
            B.add(t)
    return CoTStructure(frozenset(A), frozenset(B), C)


def trivial(snap: Snapshot, side: str = "A") -> CoTStructure:
    """Everything in A (side "A") or everything in B (side "B")."""
    every = frozenset(snap.ids)
    if side == "A":
        return CoTStructure(every, frozenset(), None, "A")
    return CoTStructure(frozenset(), every, None, "B")


def from_aisle(snap: Snapshot, A) -> CoTStructure:
    """Pair (A, A^⊥) with the perpendicular taken inside the window."""
    A = frozenset(A)
    B = frozenset(b for b in snap.ids if all(snap.hom(a, b) == 0 for a in A))
    return CoTStructure(A, B)


def member(snap: Snapshot, P: CoTStructure, i: IndecId, side: str):
    """True/False membership in A or B, or UNKNOWN outside the window without a co-heart."""
    if snap.in_window(i):
        return i in (P.A if side == "A" else P.B)
    if P.outside is not None:
        return P.outside == side
    if P.coheart is None:
        return UNKNOWN
    if side == "A":
        return all(snap.hom(i, c.suspend(j)) == 0 for c in P.coheart for j in _shifts_touching(snap, i, c, 1))
    return all(snap.hom(c.suspend(j), i) == 0 for c in P.coheart for j in _shifts_touching(snap, i, c, None))


def _shifts_touching(snap, i, c, lower):
    # shifts j where Hom between i and Σ^j c can be nonzero; supports must overlap
    span = 2 * (snap.width_bound + 1)
    rng = range(i.shift - c.shift - span, i.shift - c.shift + span + 1)
    if lower is None:
        return [j for j in rng if j <= 0]
    return [j for j in rng if j >= lower]


def ab_tag(snap: Snapshot, P: CoTStructure):
    def tag(i: IndecId):
        a, b = member(snap, P, i, "A"), member(snap, P, i, "B")
        if a is UNKNOWN or b is UNKNOWN:
            return UNKNOWN
        if a:
            return 0
        if b:
            return 1
        return None

    return tag


def check_cotstructure(snap: Snapshot, P: CoTStructure) -> Report:
    rep = Report("cotstructure", {"window": f"{snap.window[0]} {snap.window[1]}",
                                  "field": snap.algebra.field.name})
    bad = [a for a in P.A if snap.in_window(a.suspend(-1)) and a.suspend(-1) not in P.A]
    bad += [b for b in P.B if snap.in_window(b.suspend(1)) and b.suspend(1) not in P.B]
    rep.add("i", not bad, f"not closed: {', '.join(map(str, sorted(bad)))}" if bad else "")
    wit = next(((a, b) for a in sorted(P.A) for b in sorted(P.B) if snap.hom(a, b)), None)
    rep.add("ii", wit is None, f"hom({wit[0]},{wit[1]}) = {snap.hom(*wit)}" if wit else "")
    tag = ab_tag(snap, P)
    failures, unknown = [], []
    for t in snap.ids:
        try:
            tw = find_tower(snap, FormalObject([t]), tag)
        except (WindowExhausted, DepthExhausted) as exc:
            unknown.append(f"{t}: {exc}")
            continue
        if tw is None:
            failures.append(str(t))
    if failures:
        rep.add("iii", False, "no triangle a -> t -> b for " + ", ".join(failures))
    elif unknown:
        rep.add("iii", UNVERIFIABLE, "; ".join(unknown))
    else:
        rep.add("iii", True)
    lo, hi = snap.window
    unbounded = []
    for t in snap.ids:
        in_a = any(t.suspend(-j) in P.A for j in range(lo - hi, hi - lo + 1))
        in_b = any(t.suspend(-j) in P.B for j in range(lo - hi, hi - lo + 1))
        if not (in_a and in_b):
            unbounded.append(str(t))
    rep.add("bounded", not unbounded, "outside every shift of A or B: " + ", ".join(unbounded) if unbounded else "")
    rep.add("coheart", INFO, " ".join(map(str, sorted(P.derived_coheart()))))
    return rep


def heart_filtration(snap: Snapshot, P: CoTStructure, t, rng: random.Random | None = None) -> Tower:
    """Tower of t with factors Σ^j c, c in the co-heart, j strictly increasing."""
    C = P.coheart if P.coheart is not None else P.derived_coheart()
    tw = find_tower(snap, t, heart_tag(C), rng=rng)
    if tw is None:
        raise ValueError(f"{t} has no co-heart filtration; co-t-structure not bounded on it")
    return tw


def split_k0_class(snap: Snapshot, P: CoTStructure, t, rng: random.Random | None = None):
    """Class of t in the split Grothendieck group of the co-heart and its image in K₀.

    Returns (vector, image) where vector maps (c, j) to the multiplicity of
    Σ^j c in a co-heart filtration.
    """
    C = P.coheart if P.coheart is not None else P.derived_coheart()
    offs = _coheart_offsets(C)
    tw = heart_filtration(snap, P, t, rng)
    vec = Counter()
    for piece, j in zip(tw.pieces, [tg for tg, s in zip(tw.tags, tw.sizes) for _ in range(s)]):
        vec[(IndecId(piece.orbit, offs[piece.orbit]), j)] += 1
    image = [0] * snap.k0_rank
    for (c, j), m in vec.items():
        for k, x in enumerate(snap.k0_class(c)):
            image[k] += m * (-1) ** (j % 2) * x
    return dict(vec), tuple(image)


def is_presilting(snap: Snapshot, C) -> bool:
    for c, d in itertools.product(C, repeat=2):
        span = 2 * (snap.width_bound + 1) + abs(c.shift - d.shift)
        for k in range(1, span + 1):
            if snap.hom(c, d.suspend(k)):
                return False
    return True


def generates(snap: Snapshot, C) -> bool:
    tag = heart_tag(C)
    for t in snap.ids:
        try:
            if find_tower(snap, FormalObject([t]), tag) is None:
                return False
        except DepthExhausted:
            return False
    return True


@dataclass
class CoheartEnumeration:
    structures: list[CoTStructure]
    complete: bool
    candidates: int


def enumerate_cohearts(snap: Snapshot, max_candidates: int = 20000) -> CoheartEnumeration:
    """All silting id sets with in-window shifts, each with its co-t-structure."""
    lo, hi = snap.window
    choices = [[None] + list(range(lo, hi + 1)) for _ in snap.orbits]
    found, count, complete = [], 0, True
    for assign in itertools.product(*choices):
        C = frozenset(IndecId(o, s) for o, s in zip(snap.orbits, assign) if s is not None)
        if not C:
            continue
        count += 1
        if count > max_candidates:
            complete = False
            break
        if not is_presilting(snap, C):
            continue
        if not generates(snap, C):
            continue
        found.append(from_coheart(snap, C))
    found.sort(key=lambda P: sorted(P.coheart))
    return CoheartEnumeration(found, complete, count)


def structure_lines(P: CoTStructure) -> list[str]:
    out = ["A = " + " ".join(map(str, sorted(P.A))), "B = " + " ".join(map(str, sorted(P.B)))]
    if P.coheart is not None:
        out.append("coheart = " + " ".join(map(str, sorted(P.coheart))))
    return out


COTSTRUCTURE_SCHEMA = "costab-cotstructure/1"


def cotstructure_text(P: CoTStructure) -> str:
    return format_sections([("meta", [f"schema = {COTSTRUCTURE_SCHEMA}"]), ("structure", structure_lines(P))],
                           header="co-t-structure on in-window ids")


@dataclass
class CoTStructureFile:
    A: frozenset
    B: frozenset | None
    coheart: frozenset | None


def parse_cotstructure(text: str, path: str | None = None) -> CoTStructureFile:
    s = parse_sections(text, path)
    meta = s.keyvalues("meta")
    if meta.get("schema", (None, None))[1] != COTSTRUCTURE_SCHEMA:
        raise s.error(f"expected schema {COTSTRUCTURE_SCHEMA}")
    kv = s.keyvalues("structure")
    if "A" not in kv:
        raise s.error("missing 'A = ids' in [structure]")

    def ids(key):
        if key not in kv:
            return None
        no, v = kv[key]
        try:
            return frozenset(IndecId.parse(w) for w in v.split())
        except ValueError as exc:
            raise s.error(str(exc), no) from None

    return CoTStructureFile(ids("A"), ids("B"), ids("coheart"))


def resolve_cotstructure(snap: Snapshot, f: CoTStructureFile) -> tuple[CoTStructure, Report]:
    """Structure from a file: generated by the co-heart if given, else B = A-perp in the window.

    The report cross-checks any declared sets against the derived ones.
    """
    rep = Report("cotstructure-file", {})
    if f.coheart is not None:
        P = from_coheart(snap, f.coheart)
        same = P.A == f.A
        rep.add("A", same, "" if same else "declared A differs from the one generated by the co-heart")
    else:
        P = from_aisle(snap, f.A)
    if f.B is not None:
        same = P.B == f.B
        rep.add("B", same, "" if same else "declared B differs from the derived one")
    return P, rep
