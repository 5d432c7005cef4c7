"""Windowed combinatorial presentation of a homotopy category.

A snapshot names the Σ-orbits of indecomposables, fixes a shift window,
and exposes the Hom dimensions, a catalog of distinguished triangles and
the K₀ class map that the higher modules consume.
"""

from __future__ import annotations

import itertools
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from functools import total_ordering
from pathlib import Path

from . import complexes as cx
from .algebra import (
    AlgebraPresentation,
    Arrow,
    QuiverAlgebra,
    _parse_relation,
    preset,
)
from .complexes import Complex
from .field import Field
from .textio import ParseError, format_sections, parse_sections

SCHEMA = "costab-snapshot/1"

PRESET_LABELS = {
    "kA2": {"P1": "x", "P2": "y", "C2_0": "z"},
    "dual": {"P1": "c"},
}


class WindowExhausted(RuntimeError):
    """An operation needed an indecomposable that the snapshot does not know."""


class SnapshotError(ValueError):
    pass


@total_ordering
@dataclass(frozen=True)
class IndecId:
    orbit: str
    shift: int = 0

    def suspend(self, k: int = 1) -> "IndecId":
        return IndecId(self.orbit, self.shift + k)

    def __str__(self):
        return f"{self.orbit}@{self.shift}"

    def __lt__(self, other):
        return (self.shift, self.orbit) < (other.shift, other.orbit)

    @classmethod
    def parse(cls, text: str) -> "IndecId":
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)(?:@(-?\d+))?\s*", text)
        if not m:
            raise ValueError(f"malformed id {text!r}")
        return cls(m.group(1), int(m.group(2) or 0))


class FormalObject:
    """A finite multiset of indecomposable ids; the empty multiset is 0."""

    __slots__ = ("_items",)

    def __init__(self, items=()):
        if isinstance(items, (dict, Counter)):
            c = Counter({k: v for k, v in items.items() if v})
        else:
            c = Counter(items)
        if any(v < 0 for v in c.values()):
            raise ValueError("negative multiplicity")
        self._items = tuple(sorted(c.items()))

    @classmethod
    def of(cls, *ids) -> "FormalObject":
        return cls([IndecId.parse(i) if isinstance(i, str) else i for i in ids])

    @classmethod
    def parse(cls, text: str) -> "FormalObject":
        t = text.strip()
        if t in ("0", ""):
            return cls()
        out = Counter()
        for part in t.split("+"):
            part = part.strip()
            m = re.fullmatch(r"(?:(\d+)\*)?(.+)", part)
            out[IndecId.parse(m.group(2))] += int(m.group(1) or 1)
        return cls(out)

    def items(self):
        return self._items

    def counter(self) -> Counter:
        return Counter(dict(self._items))

    def ids(self) -> list[IndecId]:
        return [i for i, _ in self._items]

    def expanded(self) -> list[IndecId]:
        return [i for i, m in self._items for _ in range(m)]

    def size(self) -> int:
        return sum(m for _, m in self._items)

    def is_zero(self) -> bool:
        return not self._items

    def suspend(self, k: int = 1) -> "FormalObject":
        return FormalObject({i.suspend(k): m for i, m in self._items})

    def __add__(self, other: "FormalObject") -> "FormalObject":
        return FormalObject(self.counter() + other.counter())

    def __eq__(self, other):
        return isinstance(other, FormalObject) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __str__(self):
        if not self._items:
            return "0"
        return " + ".join(str(i) if m == 1 else f"{m}*{i}" for i, m in self._items)

    def __repr__(self):
        return f"FormalObject({self})"


@dataclass(frozen=True)
class Triangle:
    a: FormalObject
    b: FormalObject
    c: FormalObject
    tag: str

    def rotations(self):
        return [(self.b, self.c, self.a.suspend(1)), (self.c.suspend(-1), self.a, self.b)]


@dataclass
class Snapshot:
    algebra: QuiverAlgebra
    window: tuple[int, int]
    width_bound: int
    orbits: list[str]
    reps: dict[str, Complex]
    triangles: list[Triangle] = field(default_factory=list, repr=False)
    catalog_closed: bool = True
    enumeration_complete: bool = True
    _rel: dict = field(default_factory=dict, repr=False)

    # ids and window
    @property
    def ids(self) -> list[IndecId]:
        lo, hi = self.window
        return [IndecId(o, s) for s in range(lo, hi + 1) for o in self.orbits]

    def in_window(self, i: IndecId) -> bool:
        return i.orbit in self.reps and self.window[0] <= i.shift <= self.window[1]

    def base_ids(self) -> list[IndecId]:
        return [IndecId(o, 0) for o in self.orbits]

    def complex_of(self, x) -> Complex:
        if isinstance(x, IndecId):
            if x.orbit not in self.reps:
                raise WindowExhausted(f"unknown orbit {x.orbit}")
            return self.reps[x.orbit].shift(x.shift)
        if isinstance(x, FormalObject):
            if x.is_zero():
                return cx.zero_complex(self.algebra)
            return cx.direct_sum(*(self.complex_of(i) for i in x.expanded()))
        if isinstance(x, Complex):
            return x
        raise TypeError(f"cannot realize {x!r}")

    # Hom
    def rel_hom(self, o1: str, o2: str, k: int) -> int:
        """dim Hom(o1@0, o2@k)."""
        key = (o1, o2, k)
        if key not in self._rel:
            X, Y = self.reps[o1], self.reps[o2].shift(k)
            self._rel[key] = cx.hom_dim(X, Y)
        return self._rel[key]

    def hom_shifts(self, o1: str, o2: str) -> range:
        """Shifts k for which Hom(o1@0, o2@k) can be nonzero (the supports overlap)."""
        X, Y = self.reps[o1], self.reps[o2]
        return range(Y.lo - X.hi, Y.hi - X.lo + 1)

    def hom(self, a, b) -> int:
        """Hom dimension, biadditive on formal objects; exact for any shifts by Σ-equivariance."""
        if isinstance(a, IndecId) and isinstance(b, IndecId):
            for i in (a, b):
                if i.orbit not in self.reps:
                    raise WindowExhausted(f"unknown orbit {i.orbit}")
            return self.rel_hom(a.orbit, b.orbit, b.shift - a.shift)
        if isinstance(a, IndecId):
            a = FormalObject([a])
        if isinstance(b, IndecId):
            b = FormalObject([b])
        return sum(m * n * self.hom(i, j) for i, m in a.items() for j, n in b.items())

    def hom_table(self) -> dict[tuple[IndecId, IndecId], int]:
        return {(a, b): self.hom(a, b) for a in self.ids for b in self.ids}

    # K0
    @property
    def k0_basis(self) -> list[str]:
        return [f"P{v}" for v in self.algebra.vertices]

    @property
    def k0_rank(self) -> int:
        return len(self.algebra.vertices)

    def k0_class(self, x) -> tuple[int, ...]:
        if isinstance(x, IndecId):
            base = self.reps[x.orbit].k0_class()
            sign = -1 if x.shift % 2 else 1
            return tuple(sign * c for c in base)
        if isinstance(x, FormalObject):
            out = [0] * self.k0_rank
            for i, m in x.items():
                for k, c in enumerate(self.k0_class(i)):
                    out[k] += m * c
            return tuple(out)
        if isinstance(x, Complex):
            return x.k0_class()
        raise TypeError(f"no class for {x!r}")

    # identification
    def identify(self, X: Complex) -> FormalObject:
        """Krull-Schmidt normal form of a complex in terms of snapshot ids."""
        out = Counter()
        for piece in cx.decompose(X):
            rep, s = cx.normalize(piece)
            for o in self.orbits:
                R = self.reps[o]
                if R.signature() == rep.signature() and cx.isomorphic_indecomposables(rep, R):
                    out[IndecId(o, s)] += 1
                    break
            else:
                raise WindowExhausted(f"summand {piece!r} is not a known indecomposable")
        return FormalObject(out)

    def objects_up_to(self, size: int):
        """All nonzero in-window formal objects with at most ``size`` summands."""
        for n in range(1, size + 1):
            for combo in itertools.combinations_with_replacement(self.ids, n):
                yield FormalObject(combo)

    def check_triangle(self, t: Triangle) -> bool:
        return all(x + z == y for x, y, z in zip(self.k0_class(t.a), self.k0_class(t.b), self.k0_class(t.c)))

    def missing_rotations(self) -> list[tuple]:
        have = {(t.a, t.b, t.c) for t in self.triangles}
        out = []
        for t in self.triangles:
            for rot in t.rotations():
                if all(self.in_window(i) for o in rot for i in o.ids()) and rot not in have:
                    out.append(rot)
        return out

    def validate(self):
        """Raise SnapshotError when a cataloged triangle is not additive in K0."""
        problems = []
        for t in self.triangles:
            if not self.check_triangle(t):
                problems.append(f"triangle {t.tag} is not additive in K0")
        if problems:
            raise SnapshotError("; ".join(problems))


# -- building ---------------------------------------------------------------

def _labels(A: QuiverAlgebra, generic: list[str], name: str) -> list[str]:
    ren = dict(PRESET_LABELS.get(name, {}))
    if name == "dual":
        for g in generic:
            m = re.fullmatch(r"C(\d+)_0", g)
            if m:
                ren[g] = f"s{m.group(1)}"
    return [ren.get(g, g) for g in generic]


def build_snapshot(algebra, width_bound: int = 2, window: tuple[int, int] = (-2, 2),
                   max_orbits: int = 64) -> Snapshot:
    if isinstance(algebra, str):
        algebra = preset(algebra)
    lo, hi = window
    if lo > hi or width_bound < 1:
        raise ValueError("window must satisfy lo <= hi and width bound must be positive")
    try:
        en = cx.enumerate_indecomposables(algebra, width_bound, max_orbits=max_orbits)
    except cx.ResourceLimit as exc:
        en = exc.partial
    generic = [lab for lab, _ in en.orbits]
    labels = _labels(algebra, generic, algebra.presentation.name)
    reps = {lab: X for lab, (_, X) in zip(labels, en.orbits)}
    snap = Snapshot(algebra, (lo, hi), width_bound, labels, reps, enumeration_complete=en.complete)
    snap.triangles = _catalog(snap)
    snap.catalog_closed = not snap.missing_rotations()
    return snap


def _catalog(snap: Snapshot) -> list[Triangle]:
    """Cones of Hom-basis maps between orbit representatives, with rotations, in-window."""
    lo, hi = snap.window
    gens = []
    for o1, o2 in itertools.product(snap.orbits, repeat=2):
        X = snap.reps[o1]
        for k in range(-(2 * snap.width_bound + 1), 2 * snap.width_bound + 2):
            if snap.rel_hom(o1, o2, k) == 0:
                continue
            Y = snap.reps[o2].shift(k)
            for f in cx.hom_space(X, Y).basis:
                try:
                    c = snap.identify(cx.cone(f))
                except cx.DecompositionError:
                    continue
                except WindowExhausted:
                    continue
                gens.append((FormalObject([IndecId(o1, 0)]), FormalObject([IndecId(o2, k)]), c))
    out, seen = [], set()
    for g, (a, b, c) in enumerate(gens):
        base = Triangle(a, b, c, f"g{g}")
        for rot, (ra, rb, rc) in (("r0", (a, b, c)), ("r+", base.rotations()[0]), ("r-", base.rotations()[1])):
            for s in range(lo - 4 * snap.width_bound, hi + 4 * snap.width_bound + 1):
                tri = (ra.suspend(s), rb.suspend(s), rc.suspend(s))
                if all(snap.in_window(i) for o in tri for i in o.ids()) and tri not in seen:
                    seen.add(tri)
                    out.append(Triangle(*tri, f"g{g}:{rot}:{s}"))
    return out


# -- files ------------------------------------------------------------------

def _algebra_lines(p: AlgebraPresentation) -> list[str]:
    out = [f"name = {p.name}", f"field = {p.field.name}", f"vertices = {' '.join(p.vertices)}"]
    for a in p.arrows:
        out.append(f"arrow = {a.label}: {a.source} -> {a.target}")
    for rel in p.relations:
        terms = " + ".join(f"{c} {'*'.join(path)}" for c, path in rel)
        out.append(f"relation = {terms.replace('+ -', '- ')}")
    return out


def _algebra_from_lines(lines, path) -> QuiverAlgebra:
    name, fieldname, vertices, arrows, rels = "", "QQ", [], [], []
    for no, text in lines:
        if "=" not in text:
            raise ParseError(f"expected 'key = value', got {text!r}", no, path)
        k, v = (s.strip() for s in text.split("=", 1))
        if k == "name":
            name = v
        elif k == "field":
            fieldname = v
        elif k == "vertices":
            vertices = v.split()
        elif k == "arrow":
            m = re.fullmatch(r"(\w+)\s*:\s*(\w+)\s*->\s*(\w+)", v)
            if not m:
                raise ParseError(f"malformed arrow {v!r}", no, path)
            arrows.append(Arrow(*m.groups()))
        elif k == "relation":
            rels.append(_parse_relation(v, no, path))
        else:
            raise ParseError(f"unknown algebra key {k!r}", no, path)
    try:
        fld = Field.parse(fieldname)
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from None
    return QuiverAlgebra(AlgebraPresentation(tuple(vertices), tuple(arrows), tuple(rels), fld, name))


def snapshot_text(snap: Snapshot) -> str:
    lo, hi = snap.window
    meta = [
        f"schema = {SCHEMA}",
        f"window = {lo} {hi}",
        f"width = {snap.width_bound}",
        f"orbits = {' '.join(snap.orbits)}",
        f"enumeration_complete = {str(snap.enumeration_complete).lower()}",
        f"catalog_closed = {str(snap.catalog_closed).lower()}",
    ]
    ids = [" ".join(str(i) for i in snap.ids)]
    susp = [f"{i} -> {i.suspend()}" for i in snap.ids if snap.in_window(i.suspend())]
    hom = [f"{a} {b} {d}" for (a, b), d in snap.hom_table().items()]
    tris = [f"{t.a} ; {t.b} ; {t.c} ; {t.tag}" for t in snap.triangles]
    k0 = [f"basis = {' '.join(snap.k0_basis)}"] + [
        f"{o} = {' '.join(str(c) for c in snap.k0_class(IndecId(o, 0)))}" for o in snap.orbits
    ]
    comp = []
    for o in snap.orbits:
        comp.extend(cx.complex_lines(snap.reps[o], o))
    return format_sections([
        ("meta", meta),
        ("algebra", _algebra_lines(snap.algebra.presentation)),
        ("ids", ids),
        ("suspension", susp),
        ("hom", hom),
        ("triangles", tris),
        ("k0", k0),
        ("complexes", comp),
    ], "costab snapshot")


def save_snapshot(snap: Snapshot, path) -> None:
    Path(path).write_text(snapshot_text(snap), encoding="utf-8")


def parse_snapshot(text: str, path: str | None = None) -> Snapshot:
    s = parse_sections(text, path)
    meta = s.keyvalues("meta") if "meta" in s else {}
    if meta.get("schema", (None, None))[1] != SCHEMA:
        raise ParseError(f"schema mismatch: expected {SCHEMA}", path=path)
    try:
        lo, hi = (int(v) for v in meta["window"][1].split())
        width = int(meta["width"][1])
        orbits = meta["orbits"][1].split()
    except (KeyError, ValueError):
        raise ParseError("meta section needs window, width and orbits", path=path) from None
    A = _algebra_from_lines(s.require("algebra"), path)
    reps = cx.complexes_from_lines(A, s.require("complexes"), path)
    if set(reps) != set(orbits):
        raise ParseError("complexes do not match the orbit list", path=path)
    snap = Snapshot(A, (lo, hi), width, orbits, reps,
                    enumeration_complete=meta.get("enumeration_complete", (0, "true"))[1] == "true")
    # ids and suspension must agree with the window
    listed = set()
    for no, text in s.require("ids"):
        for tok in text.split():
            try:
                listed.add(IndecId.parse(tok))
            except ValueError as exc:
                raise ParseError(str(exc), no, path) from None
    if listed != set(snap.ids):
        raise ParseError("id list does not match orbits and window", path=path)
    for no, text in s.get("suspension"):
        m = re.fullmatch(r"(\S+)\s*->\s*(\S+)", text)
        if not m or IndecId.parse(m.group(1)).suspend() != IndecId.parse(m.group(2)):
            raise ParseError(f"suspension must raise the shift by one: {text!r}", no, path)
    # the hom table must be Σ-equivariant and agree with the complexes
    table = {}
    for no, text in s.require("hom"):
        parts = text.split()
        if len(parts) != 3:
            raise ParseError(f"malformed hom line {text!r}", no, path)
        try:
            a, b, dim = IndecId.parse(parts[0]), IndecId.parse(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"malformed hom line {text!r}", no, path) from None
        if dim < 0:
            raise ParseError("negative hom dimension", no, path)
        table[a, b] = (dim, no)
    for (a, b), (dim, no) in table.items():
        sa, sb = a.suspend(), b.suspend()
        if (sa, sb) in table and table[sa, sb][0] != dim:
            raise ParseError(f"hom table not Σ-equivariant: hom({a},{b})={dim} but hom({sa},{sb})={table[sa, sb][0]}",
                             no, path)
    for (a, b), (dim, no) in table.items():
        key = (a.orbit, b.orbit, b.shift - a.shift)
        snap._rel.setdefault(key, dim)
        if snap._rel[key] != dim:
            raise ParseError(f"hom table inconsistent at {a} {b}", no, path)
    for (a, b), (dim, no) in table.items():
        if cx.hom_dim(snap.complex_of(a), snap.complex_of(b)) != dim:
            raise ParseError(f"hom({a},{b}) = {dim} disagrees with the stored complexes", no, path)
    # k0 classes
    k0 = s.keyvalues("k0") if "k0" in s else {}
    for o in orbits:
        if o in k0:
            no, v = k0[o]
            got = tuple(int(c) for c in v.split())
            if got != snap.k0_class(IndecId(o, 0)):
                raise ParseError(f"K0 class of {o} disagrees with its complex", no, path)
    tris = []
    for no, text in s.get("triangles"):
        parts = [p.strip() for p in text.split(";")]
        if len(parts) != 4:
            raise ParseError(f"malformed triangle {text!r}", no, path)
        try:
            t = Triangle(*(FormalObject.parse(p) for p in parts[:3]), parts[3])
        except ValueError as exc:
            raise ParseError(str(exc), no, path) from None
        if not snap.check_triangle(t):
            raise ParseError(f"triangle {t.tag} is not additive in K0", no, path)
        tris.append(t)
    snap.triangles = tris
    missing = snap.missing_rotations()
    snap.catalog_closed = not missing
    if missing:
        warnings.warn(f"triangle catalog is missing {len(missing)} rotation(s); marked non-closed")
    return snap


def load_snapshot(path) -> Snapshot:
    p = Path(path)
    return parse_snapshot(p.read_text(encoding="utf-8"), str(p))


def snapshots_equal(a: Snapshot, b: Snapshot) -> bool:
    return (
        a.window == b.window
        and a.width_bound == b.width_bound
        and a.orbits == b.orbits
        and all(a.reps[o].signature() == b.reps[o].signature() for o in a.orbits)
        and a.hom_table() == b.hom_table()
        and {(t.a, t.b, t.c, t.tag) for t in a.triangles} == {(t.a, t.b, t.c, t.tag) for t in b.triangles}
        and a.catalog_closed == b.catalog_closed
    )
