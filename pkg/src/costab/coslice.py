"""Co-slicings on a snapshot.

A co-slicing is stored by its base slices: each orbit that occurs gets one
representative id and a phase in (0,1]; every other shift of the orbit is
placed by Q(φ + 1) = ΣQ(φ). Slices are sets of ids, so sums and summands are
handled by Krull-Schmidt.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cotstruct import CoTStructure
from .report import UNVERIFIABLE, Report
from .snapshot import FormalObject, IndecId, Snapshot
from .textio import ParseError, format_number, format_sections, parse_number, parse_sections
from .towers import DepthExhausted, Tower, find_tower

TAU = 1e-9
COSLICING_SCHEMA = "costab-coslicing/1"


# -- phases --------------------------------------------------------------------

def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def phase_eq(a, b) -> bool:
    if _exact(a, b):
        return a == b
    return abs(a - b) <= TAU


def phase_lt(a, b) -> bool:
    if _exact(a, b):
        return a < b
    return a < b - TAU


def phase_le(a, b) -> bool:
    return not phase_lt(b, a)


def base_phase(phi) -> tuple:
    """(φ', k) with φ' = φ - k in (0,1] and k an integer."""
    k = math.ceil(phi) - 1
    rest = phi - k
    if not _exact(rest):
        if abs(rest) <= TAU:
            return rest + 1, k - 1
        if abs(rest - 1) <= TAU:
            return 1.0, k
    return rest, k


@dataclass(frozen=True)
class Interval:
    """Real interval with closedness flags; endpoints may be ±inf."""

    a: object
    b: object
    left_closed: bool = False
    right_closed: bool = True

    def above(self, phi) -> bool:
        return phase_lt(self.b, phi) or (phase_eq(phi, self.b) and not self.right_closed)

    def below(self, phi) -> bool:
        return phase_lt(phi, self.a) or (phase_eq(phi, self.a) and not self.left_closed)

    def contains(self, phi) -> bool:
        return not self.above(phi) and not self.below(phi)

    @property
    def length(self):
        return self.b - self.a

    def __str__(self):
        lb = "[" if self.left_closed else "("
        rb = "]" if self.right_closed else ")"
        return f"{lb}{format_number(self.a) if math.isfinite(self.a) else '-inf'},"\
               f"{format_number(self.b) if math.isfinite(self.b) else 'inf'}{rb}"

    @classmethod
    def parse(cls, text: str) -> "Interval":
        t = text.strip()
        if len(t) < 5 or t[0] not in "([" or t[-1] not in ")]" or "," not in t:
            raise ParseError(f"malformed interval {text!r}")
        lo, hi = t[1:-1].split(",", 1)

        def num(s):
            s = s.strip()
            if s in ("-inf", "inf", "+inf"):
                return float(s)
            return parse_number(s)

        return cls(num(lo), num(hi), t[0] == "[", t[-1] == "]")


# -- the co-slicing ------------------------------------------------------------

@dataclass(frozen=True)
class CoSlicing:
    """Entries (orbit, shift, phase): orbit@shift lies in Q(phase), phase in (0,1]."""

    entries: tuple

    @classmethod
    def from_slices(cls, slices) -> "CoSlicing":
        """Build from {phase: ids} or a list of (phase, ids); phases may be any reals."""
        items = slices.items() if isinstance(slices, dict) else slices
        canon: list = []
        seen: dict[str, tuple] = {}
        for phi, ids in items:
            for i in ids:
                i = IndecId.parse(i) if isinstance(i, str) else i
                p, k = base_phase(phi)
                # snap float phases within TAU onto an existing slice
                for c in canon:
                    if phase_eq(c, p):
                        p = c
                        break
                else:
                    canon.append(p)
                if i.orbit in seen:
                    raise ValueError(f"orbit {i.orbit} occurs in two slices")
                seen[i.orbit] = (i.orbit, i.shift - k, p)
        return cls(tuple(sorted(seen.values(), key=lambda e: (e[0], e[1]))))

    @property
    def orbits(self) -> list[str]:
        return [o for o, _, _ in self.entries]

    def _entry(self, orbit: str):
        for e in self.entries:
            if e[0] == orbit:
                return e
        return None

    def phase_of(self, i: IndecId):
        """Phase of the slice containing i, or None if i lies in no slice."""
        e = self._entry(i.orbit)
        if e is None:
            return None
        return e[2] + (i.shift - e[1])

    def base_ids(self) -> list[IndecId]:
        return [IndecId(o, s) for o, s, _ in self.entries]

    @property
    def phases(self) -> list:
        out = []
        for _, _, p in self.entries:
            if not any(phase_eq(p, q) for q in out):
                out.append(p)
        return sorted(out)

    def slices(self) -> dict:
        out: dict = {}
        for o, s, p in self.entries:
            out.setdefault(p, []).append(IndecId(o, s))
        return {p: sorted(v) for p, v in sorted(out.items())}

    def slice_ids(self, phi, snap: Snapshot | None = None) -> list[IndecId]:
        """Ids in Q(φ) for any real φ; with a snapshot, only in-window ones."""
        p, k = base_phase(phi)
        out = [IndecId(o, s + k) for o, s, q in self.entries if phase_eq(p, q)]
        if snap is not None:
            out = [i for i in out if snap.in_window(i)]
        return sorted(out)

    def translate(self, a) -> "CoSlicing":
        """Q'(φ) = Q(φ + a): every id moves to phase φ - a."""
        return CoSlicing.from_slices([(p - a, [IndecId(o, s)]) for o, s, p in self.entries])

    def suspend(self, k: int = 1) -> "CoSlicing":
        """Q'(φ) = Σ^k Q(φ)."""
        return CoSlicing.from_slices([(p, [IndecId(o, s + k)]) for o, s, p in self.entries])

    def same_as(self, other: "CoSlicing") -> bool:
        """Equality of id sets per slice, phases compared within TAU."""
        if sorted(self.orbits) != sorted(other.orbits):
            return False
        for o, s, p in self.entries:
            q = other.phase_of(IndecId(o, s))
            if q is None or not phase_eq(p, q):
                return False
        return True

    def describe(self) -> str:
        return "; ".join(f"{format_number(p)}: " + " ".join(map(str, ids))
                         for p, ids in self.slices().items())


def _related(snap: Snapshot, Q: CoSlicing, i: IndecId):
    """Slice ids r of Q with Hom(i, r) or Hom(r, i) possibly nonzero, as (r, phase)."""
    out = []
    for o, s, p in Q.entries:
        ks = set(snap.hom_shifts(i.orbit, o)) | {-k for k in snap.hom_shifts(o, i.orbit)}
        for k in sorted(ks):
            r = IndecId(o, i.shift + k)
            out.append((r, Q.phase_of(r)))
    return out


# -- axioms --------------------------------------------------------------------

def _validate_entries(snap: Snapshot, Q: CoSlicing) -> list[str]:
    bad = []
    for o, s, p in Q.entries:
        if o not in snap.reps:
            bad.append(f"unknown orbit {o}")
        if not (phase_lt(0, p) and phase_le(p, 1)):
            bad.append(f"base phase {p} of {o}@{s} not in (0,1]")
    return bad


def hom_order_witness(snap: Snapshot, Q: CoSlicing):
    """(q1, q2, dim) with phase(q1) < phase(q2) and Hom(q1, q2) != 0, or None."""
    for o1, s1, p1 in Q.entries:
        q1 = IndecId(o1, s1)
        for o2, s2, p2 in Q.entries:
            for k in snap.hom_shifts(o1, o2):
                q2 = IndecId(o2, s1 + k)
                if phase_lt(p1, Q.phase_of(q2)):
                    h = snap.hom(q1, q2)
                    if h:
                        return q1, q2, h
    return None


def phase_tag(Q: CoSlicing, I: Interval | None = None):
    def tag(i: IndecId):
        p = Q.phase_of(i)
        if p is None or (I is not None and not I.contains(p)):
            return None
        return p

    return tag


def check_axioms(snap: Snapshot, Q: CoSlicing, rng: random.Random | None = None) -> Report:
    rep = Report("coslicing", {"window": f"{snap.window[0]} {snap.window[1]}",
                               "field": snap.algebra.field.name,
                               "slices": Q.describe() or "none"})
    bad = _validate_entries(snap, Q)
    rep.add("i", not bad, "; ".join(bad))
    if bad:
        return rep
    w = hom_order_witness(snap, Q)
    rep.add("ii", w is None, "" if w is None else
            f"hom({w[0]},{w[1]}) = {w[2]} with phases "
            f"{format_number(Q.phase_of(w[0]))} < {format_number(Q.phase_of(w[1]))}")
    tag = phase_tag(Q)
    missing, unknown = [], []
    for t in snap.ids:
        try:
            tw = find_tower(snap, FormalObject([t]), tag, rng=rng)
        except DepthExhausted as exc:
            unknown.append(f"{t}: {exc}")
            continue
        if tw is None:
            missing.append(str(t))
    if missing:
        rep.add("iii", False, "no phase-ascending tower for " + ", ".join(missing))
    elif unknown:
        rep.add("iii", UNVERIFIABLE, "; ".join(unknown))
    else:
        rep.add("iii", True)
    return rep


@dataclass
class ConditionS:
    holds: bool
    witness: tuple | None = None  # (q1, q2, hom dimension)

    def __bool__(self):
        return self.holds


def check_condition_S(snap: Snapshot, Q: CoSlicing) -> ConditionS:
    """Hom vanishing between distinct indecomposables of one slice."""
    for o1, s1, p1 in Q.entries:
        for o2, s2, p2 in Q.entries:
            if o1 == o2 or not phase_eq(p1, p2):
                continue
            h = snap.hom(IndecId(o1, s1), IndecId(o2, s2))
            if h:
                return ConditionS(False, (IndecId(o1, s1), IndecId(o2, s2), h))
    return ConditionS(True)


# -- interval subcategories ----------------------------------------------------

def in_interval_perp(snap: Snapshot, Q: CoSlicing, i: IndecId, I: Interval) -> bool:
    """i in ⊥Q(above I) ∩ Q(below I)^⊥, decided from the Hom table."""
    for r, p in _related(snap, Q, i):
        if I.above(p) and snap.hom(i, r):
            return False
        if I.below(p) and snap.hom(r, i):
            return False
    return True


@dataclass
class Membership:
    member: bool | None  # None: inconclusive
    method: str
    towers: dict
    detail: str = ""

    def __bool__(self):
        return bool(self.member)


def _as_formal(snap: Snapshot, t) -> FormalObject:
    if isinstance(t, IndecId):
        return FormalObject([t])
    if isinstance(t, FormalObject):
        return t
    return snap.identify(snap.complex_of(t))


def hull_applies(I: Interval) -> bool:
    """Q(I) is the additive hull of its slices when I is shorter than a full turn."""
    L = I.length
    return phase_lt(L, 1) or (phase_eq(L, 1) and not (I.left_closed and I.right_closed))


def interval_membership(snap: Snapshot, Q: CoSlicing, t, I: Interval,
                        fallback: bool = True, rng: random.Random | None = None) -> Membership:
    """Is t in Q(I), the extension and summand closure of the slices Q(φ), φ in I?

    Short intervals use the additive hull. Longer ones search for a tower
    with factors in Q(I); when none is found and ``fallback`` is set, the
    perpendicular description decides (this catches summands of towers).
    """
    obj = _as_formal(snap, t)
    if obj.is_zero():
        return Membership(True, "zero", {})
    if hull_applies(I):
        out = [i for i in obj.ids() if Q.phase_of(i) is None or not I.contains(Q.phase_of(i))]
        return Membership(not out, "hull", {}, "outside: " + ", ".join(map(str, out)) if out else "")
    tag = phase_tag(Q, I)
    towers: dict[IndecId, Tower] = {}
    for i in obj.ids():
        try:
            tw = find_tower(snap, FormalObject([i]), tag, rng=rng)
        except DepthExhausted as exc:
            return Membership(None, "tower", towers, f"{i}: {exc}")
        if tw is not None:
            towers[i] = tw
            continue
        if fallback and in_interval_perp(snap, Q, i, I):
            continue
        return Membership(False, "tower", towers, f"{i} has no tower in {I}")
    method = "tower" if len(towers) == len(obj.ids()) else "tower+perp"
    return Membership(True, method, towers)


def orthogonality_identity(snap: Snapshot, Q: CoSlicing, a, b, closed: bool = False) -> Report:
    """Compare ⊥Q(>b) ∩ Q(≤a)^⊥ with Q((a,b]) on every in-window id.

    With ``closed`` the left condition is Q(<a)^⊥ and the right side Q([a,b]).
    """
    I = Interval(a, b, closed, True)
    rep = Report("orthogonality", {"interval": str(I), "window": f"{snap.window[0]} {snap.window[1]}"})
    bad, undecided, members = [], [], []
    for t in snap.ids:
        lhs = in_interval_perp(snap, Q, t, I)
        m = interval_membership(snap, Q, t, I, fallback=False)
        if m.member is None:
            undecided.append(str(t))
        elif lhs != m.member:
            bad.append(f"{t}: perp {lhs}, interval {m.member}")
        elif lhs:
            members.append(str(t))
    rep.add("identity", UNVERIFIABLE if undecided and not bad else not bad,
            "; ".join(bad) or ("undecided: " + ", ".join(undecided) if undecided else ""))
    rep.info("members", " ".join(members) or "0")
    return rep


# -- ε₀ and the metric ---------------------------------------------------------

def epsilon0(Q: CoSlicing) -> float:
    """Half the smallest circular gap between support phases, capped at 1/2, shrunk by 2^-20."""
    ps = Q.phases
    if not ps:
        raise ValueError("empty co-slicing: the category is zero")
    if len(ps) == 1:
        g = 1.0
    else:
        gaps = [float(ps[i + 1] - ps[i]) for i in range(len(ps) - 1)]
        gaps.append(float(1 - ps[-1] + ps[0]))
        g = min(gaps)
    return min(g / 2, 0.5) * (1 - 2.0 ** -20)


@dataclass
class Distance:
    value: float | None  # None when only bounds are known
    per_id: float  # max phase displacement over orbits in either co-slicing
    exact: bool
    lower: float = 0.0
    method: str = "per-id"

    def __float__(self):
        return float(self.value if self.value is not None else self.per_id)


def per_id_distance(Q: CoSlicing, R: CoSlicing) -> float:
    v = 0.0
    for o in set(Q.orbits) | set(R.orbits):
        i = IndecId(o, 0)
        p, q = Q.phase_of(i), R.phase_of(i)
        if p is None or q is None:
            return math.inf
        v = max(v, abs(float(p - q)))
    return v


def one_sided_distance(snap: Snapshot, Q: CoSlicing, R: CoSlicing) -> float:
    """Least ε with Q(φ) ⊆ R([φ-ε, φ+ε]) for all φ, via the perpendicular description."""
    eps = 0.0
    for q in Q.base_ids():
        phi = Q.phase_of(q)
        for r, psi in _related(snap, R, q):
            if psi > phi and snap.hom(q, r):
                eps = max(eps, float(psi - phi))
            if psi < phi and snap.hom(r, q):
                eps = max(eps, float(phi - psi))
    return eps


def metric(snap: Snapshot, Q: CoSlicing, R: CoSlicing, refine: bool = True) -> Distance:
    """d(Q, R); exact from phases below 1/2, otherwise refined through Hom vanishing."""
    v = per_id_distance(Q, R)
    if v < 0.5:
        return Distance(v, v, True, v, "per-id")
    if not refine:
        return Distance(None, v, False, 0.5, "bound")
    d = max(one_sided_distance(snap, Q, R), one_sided_distance(snap, R, Q))
    return Distance(d, v, True, d, "perp")


def d(snap: Snapshot, Q: CoSlicing, R: CoSlicing) -> float:
    return float(metric(snap, Q, R))


# -- induced co-t-structure ----------------------------------------------------

def induced_cotstructure(snap: Snapshot, Q: CoSlicing) -> CoTStructure:
    """(Q(≤1), Q(>1)) on in-window ids, with co-heart the base slices Q((0,1])."""
    tag = phase_tag(Q)
    A, B = set(), set()
    for t in snap.ids:
        tw = find_tower(snap, FormalObject([t]), tag)
        if tw is None:
            continue
        if all(phase_le(p, 1) for p in tw.tags):
            A.add(t)
        if all(phase_lt(1, p) for p in tw.tags):
            B.add(t)
    return CoTStructure(frozenset(A), frozenset(B), frozenset(Q.base_ids()))


# -- files ---------------------------------------------------------------------

def coslicing_text(Q: CoSlicing) -> str:
    lines = [f"{format_number(p)} = " + " ".join(map(str, ids)) for p, ids in Q.slices().items()]
    return format_sections([("meta", [f"schema = {COSLICING_SCHEMA}"]), ("slices", lines)],
                           header="co-slicing: base phase in (0,1] = ids")


def parse_coslicing(text: str, path: str | None = None) -> CoSlicing:
    s = parse_sections(text, path)
    meta = s.keyvalues("meta")
    if meta.get("schema", (None, None))[1] != COSLICING_SCHEMA:
        raise s.error(f"expected schema {COSLICING_SCHEMA}")
    slices = []
    for no, line in s.require("slices"):
        if "=" not in line:
            raise s.error(f"expected 'phase = ids', got {line!r}", no)
        lhs, rhs = line.split("=", 1)
        phi = parse_number(lhs, no, path)
        try:
            ids = [IndecId.parse(w) for w in rhs.split()]
        except ValueError as exc:
            raise s.error(str(exc), no) from None
        if not ids:
            raise s.error("empty slice", no)
        slices.append((phi, ids))
    try:
        return CoSlicing.from_slices(slices)
    except ValueError as exc:
        raise s.error(str(exc)) from None


def save_coslicing(Q: CoSlicing, path) -> None:
    Path(path).write_text(coslicing_text(Q), encoding="utf-8")


def load_coslicing(path) -> CoSlicing:
    p = Path(path)
    return parse_coslicing(p.read_text(encoding="utf-8"), str(p))
