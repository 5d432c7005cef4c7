"""Bound quiver algebras kQ/I and their indecomposable projectives.

Paths are composed left to right: ``a*b`` is the arrow ``a`` followed by
``b``. A path from ``v`` to ``w`` is a morphism ``P_v -> P_w`` and
composition of morphisms is concatenation, so the additive category of
the ``P_v`` is the path category of the bound quiver.

Concretely ``P_v`` is realized as the span of basis paths ending at ``v``
and the path ``b: v -> w`` acts by right multiplication ``x -> x*b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import linalg
from .field import QQ, Field
from .textio import ParseError, Sections, format_number, format_sections, parse_number, read_sections


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    label: str
    source: str
    target: str


@dataclass(frozen=True)
class AlgebraPresentation:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...] = ()
    # each relation is a tuple of (coefficient, path as tuple of arrow labels)
    relations: tuple[tuple[tuple[Fraction, tuple[str, ...]], ...], ...] = ()
    field: Field = dc_field(default=QQ)
    name: str = ""

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices) or not self.vertices:
            raise AlgebraError("vertex names must be nonempty and distinct")
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise AlgebraError("arrow labels must be distinct")
        if set(labels) & set(self.vertices):
            raise AlgebraError("arrow labels may not reuse vertex names")
        by_label = {a.label: a for a in self.arrows}
        for a in self.arrows:
            if a.source not in self.vertices or a.target not in self.vertices:
                raise AlgebraError(f"arrow {a.label} has an unknown endpoint")
        for rel in self.relations:
            ends = set()
            for coeff, path in rel:
                if len(path) < 2:
                    raise AlgebraError(f"relation term {'*'.join(path) or '1'} has length < 2 (not admissible)")
                for lab in path:
                    if lab not in by_label:
                        raise AlgebraError(f"unknown arrow {lab!r} in relation")
                for u, w in zip(path, path[1:]):
                    if by_label[u].target != by_label[w].source:
                        raise AlgebraError(f"path {'*'.join(path)} is not composable")
                ends.add((by_label[path[0]].source, by_label[path[-1]].target))
            if len(ends) > 1:
                raise AlgebraError("relation mixes paths with different endpoints")

    def with_field(self, field: Field) -> "AlgebraPresentation":
        return AlgebraPresentation(self.vertices, self.arrows, self.relations, field, self.name)


Path = tuple[int, tuple[int, ...]]  # (start vertex index, arrow indices)


class QuiverAlgebra:
    """The finite dimensional algebra kQ/I with a path basis.

    The basis is found by working modulo paths of length > N where N is
    the least length with every length-N path in the ideal; admissibility
    then gives J^N inside I.
    """

    def __init__(self, presentation: AlgebraPresentation, max_length: int = 12, max_paths: int = 5000):
        self.presentation = presentation
        self.field = presentation.field
        self.vertices = presentation.vertices
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self._arrows = presentation.arrows
        self._aindex = {a.label: i for i, a in enumerate(self._arrows)}
        self._build(max_length, max_paths)

    # -- construction -------------------------------------------------

    def _src(self, arrow: int) -> int:
        return self._vindex[self._arrows[arrow].source]

    def _tgt(self, arrow: int) -> int:
        return self._vindex[self._arrows[arrow].target]

    def path_end(self, p: Path) -> int:
        return self._tgt(p[1][-1]) if p[1] else p[0]

    def _paths_up_to(self, n: int, max_paths: int) -> list[Path]:
        layer = [(v, ()) for v in range(len(self.vertices))]
        out = list(layer)
        for _ in range(n):
            nxt = []
            for p in layer:
                end = self.path_end(p)
                for a in range(len(self._arrows)):
                    if self._src(a) == end:
                        nxt.append((p[0], p[1] + (a,)))
            out.extend(nxt)
            layer = nxt
            if len(out) > max_paths:
                raise AlgebraError(f"more than {max_paths} paths; algebra too large for desk scale")
        return out

    def _concat(self, p: Path, q: Path):
        if self.path_end(p) != q[0]:
            return None
        return (p[0], p[1] + q[1])

    def _relation_paths(self, rel) -> list[tuple[Fraction, Path]]:
        out = []
        for coeff, labels in rel:
            arrows = tuple(self._aindex[lab] for lab in labels)
            out.append((Fraction(coeff), (self._src(arrows[0]), arrows)))
        return out

    def _build(self, max_length: int, max_paths: int):
        F = self.field
        rels = [self._relation_paths(r) for r in self.presentation.relations]
        for n in range(1, max_length + 1):
            paths = self._paths_up_to(n, max_paths)
            # long paths first so that pivots land on them
            paths.sort(key=lambda p: (-len(p[1]), p))
            index = {p: i for i, p in enumerate(paths)}
            gens = []
            for rel in rels:
                start, end = rel[0][1][0], self.path_end(rel[0][1])
                shortest = min(len(p[1]) for _, p in rel)
                for u in paths:
                    if self.path_end(u) != start:
                        continue
                    for w in paths:
                        if w[0] != end or len(u[1]) + len(w[1]) + shortest > n:
                            continue
                        row = [F.zero] * len(paths)
                        for coeff, p in rel:
                            full = (u[0], u[1] + p[1] + w[1])
                            if len(full[1]) <= n:
                                row[index[full]] = row[index[full]] + F(coeff)
                        gens.append(row)
            if gens:
                ideal, pivots = linalg.rref(F.matrix(gens), F)
                ideal = ideal[: len(pivots)]
            else:
                ideal, pivots = F.zeros(0, len(paths)), []
            self._ideal, self._pivots = ideal, pivots
            self._paths, self._pindex = paths, index
            self.N = n
            if all(self._is_zero_mod(index[p]) for p in paths if len(p[1]) == n):
                break
        else:
            raise AlgebraError(f"paths of length {max_length} are not all in the ideal; "
                               "algebra infinite dimensional or bound too small")
        pivset = set(self._pivots)
        basis = [p for i, p in enumerate(paths) if i not in pivset]
        basis.sort(key=lambda p: (len(p[1]), p))
        self.basis: list[Path] = basis
        self._bindex = {p: i for i, p in enumerate(basis)}
        self.dim = len(basis)
        self._mult = {}
        for i, p in enumerate(basis):
            for j, q in enumerate(basis):
                pq = self._concat(p, q)
                if pq is None or len(pq[1]) > self.N:
                    continue
                vec = self._coords_of_path(pq)
                if any(x != 0 for x in vec):
                    self._mult[i, j] = vec

    def _unit(self, i: int):
        v = [self.field.zero] * len(self._paths)
        v[i] = self.field.one
        return v

    def _reduce_vector(self, v):
        v = list(v)
        for row, piv in zip(self._ideal, self._pivots):
            c = v[piv]
            if c != 0:
                for k in range(len(v)):
                    if row[k] != 0:
                        v[k] = v[k] - c * row[k]
        return v

    def _is_zero_mod(self, i: int) -> bool:
        return all(x == 0 for x in self._reduce_vector(self._unit(i)))

    def _coords_of_path(self, p: Path) -> np.ndarray:
        out = np.array([self.field.zero] * self.dim, dtype=object)
        if len(p[1]) > self.N:
            return out
        red = self._reduce_vector(self._unit(self._pindex[p]))
        for i, q in enumerate(self._paths):
            if red[i] != 0:
                out[self._bindex[q]] = red[i]
        return out

    # -- basis data ---------------------------------------------------

    def source(self, b: int) -> int:
        return self.basis[b][0]

    def target(self, b: int) -> int:
        return self.path_end(self.basis[b])

    def trivial(self, v: int) -> int:
        return self._bindex[(v, ())]

    def path_name(self, b: int) -> str:
        start, arrows = self.basis[b]
        if not arrows:
            return f"e{self.vertices[start]}"
        return "*".join(self._arrows[a].label for a in arrows)

    def basis_index(self, name: str) -> int:
        for b in range(self.dim):
            if self.path_name(b) == name:
                return b
        raise KeyError(name)

    def vertex_index(self, v: str) -> int:
        return self._vindex[v]

    def product(self, i: int, j: int) -> np.ndarray | None:
        """Coordinates of basis(i) * basis(j), or None when zero."""
        return self._mult.get((i, j))

    def paths_between(self, v: int, w: int) -> list[int]:
        return [b for b in range(self.dim) if self.source(b) == v and self.target(b) == w]

    @cached_property
    def projective_basis(self) -> dict[int, list[int]]:
        """Basis of P_v: basis paths ending at v, trivial path first."""
        out = {}
        for v in range(len(self.vertices)):
            bs = [b for b in range(self.dim) if self.target(b) == v]
            bs.remove(self.trivial(v))
            out[v] = [self.trivial(v)] + bs
        return out

    def pdim(self, v: int) -> int:
        return len(self.projective_basis[v])

    def right_mult(self, b: int) -> np.ndarray:
        """Matrix of x -> x*b from P_source(b) to P_target(b)."""
        return self._right_mult_cache[b]

    @cached_property
    def _right_mult_cache(self) -> dict[int, np.ndarray]:
        F = self.field
        out = {}
        for b in range(self.dim):
            v, w = self.source(b), self.target(b)
            src, tgt = self.projective_basis[v], self.projective_basis[w]
            pos = {x: k for k, x in enumerate(tgt)}
            m = F.zeros(len(tgt), len(src))
            for c, x in enumerate(src):
                vec = self.product(x, b)
                if vec is None:
                    continue
                for y in range(self.dim):
                    if vec[y] != 0:
                        m[pos[y], c] = vec[y]
            out[b] = m
        return out

    def is_radical(self, b: int) -> bool:
        return bool(self.basis[b][1])

    def __repr__(self):
        name = self.presentation.name or "algebra"
        return f"QuiverAlgebra({name}, dim={self.dim}, field={self.field.name})"


# -- presets ----------------------------------------------------------

def trivial_presentation(field: Field = QQ) -> AlgebraPresentation:
    return AlgebraPresentation(("1",), (), (), field, "k")


def a2_presentation(field: Field = QQ) -> AlgebraPresentation:
    return AlgebraPresentation(("1", "2"), (Arrow("a", "1", "2"),), (), field, "kA2")


def dual_numbers_presentation(field: Field = QQ) -> AlgebraPresentation:
    return AlgebraPresentation(
        ("1",), (Arrow("X", "1", "1"),), (((Fraction(1), ("X", "X")),),), field, "dual"
    )


PRESETS = {
    "k": trivial_presentation,
    "kA2": a2_presentation,
    "dual": dual_numbers_presentation,
}


def preset(name: str, field: Field = QQ) -> QuiverAlgebra:
    try:
        return QuiverAlgebra(PRESETS[name](field))
    except KeyError:
        raise AlgebraError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- files ------------------------------------------------------------

_TERM = re.compile(r"^\s*(?:(\d+(?:/\d+)?)\s+)?([A-Za-z_]\w*(?:\*[A-Za-z_]\w*)*)\s*$")


def _parse_relation(text: str, line: int, path: str | None):
    terms = []
    pieces = re.split(r"(?=[+-])", text.replace(" - ", " -").replace(" + ", " +"))
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        sign = 1
        if piece[0] in "+-":
            sign = -1 if piece[0] == "-" else 1
            piece = piece[1:]
        m = _TERM.match(piece)
        if not m:
            raise ParseError(f"malformed relation term {piece!r}", line, path)
        coeff = parse_number(m.group(1), line, path) if m.group(1) else Fraction(1)
        terms.append((sign * Fraction(coeff), tuple(m.group(2).split("*"))))
    if not terms:
        raise ParseError("empty relation", line, path)
    return tuple(terms)


def presentation_from_sections(s: Sections) -> AlgebraPresentation:
    meta = s.keyvalues("algebra") if "algebra" in s else {}
    field = QQ
    if "field" in meta:
        field = Field.parse(meta["field"][1])
    elif "field" in s:
        lines = s.get("field")
        if lines:
            field = Field.parse(lines[0][1])
    name = meta["name"][1] if "name" in meta else ""
    vertices = []
    for no, text in s.require("vertices"):
        vertices.extend(text.split())
    arrows = []
    for no, text in s.get("arrows"):
        m = re.match(r"^(\w+)\s*:\s*(\w+)\s*->\s*(\w+)$", text)
        if not m:
            raise ParseError(f"expected 'label: source -> target', got {text!r}", no, s.path)
        arrows.append(Arrow(*m.groups()))
    relations = tuple(_parse_relation(text, no, s.path) for no, text in s.get("relations"))
    try:
        return AlgebraPresentation(tuple(vertices), tuple(arrows), relations, field, name)
    except AlgebraError as exc:
        raise ParseError(str(exc), path=s.path) from None


def presentation_sections(p: AlgebraPresentation) -> list[tuple[str, list[str]]]:
    rels = []
    for rel in p.relations:
        parts = []
        for coeff, path in rel:
            sign = "-" if coeff < 0 else "+"
            parts.append(f"{sign} {format_number(abs(Fraction(coeff)))} {'*'.join(path)}")
        text = " ".join(parts)
        rels.append(text[2:] if text.startswith("+ ") else text)
    return [
        ("algebra", [f"name = {p.name}", f"field = {p.field.name}"]),
        ("vertices", [" ".join(p.vertices)]),
        ("arrows", [f"{a.label}: {a.source} -> {a.target}" for a in p.arrows]),
        ("relations", rels),
    ]


def load_algebra(path) -> QuiverAlgebra:
    return QuiverAlgebra(presentation_from_sections(read_sections(path)))


def save_algebra(p: AlgebraPresentation, path) -> None:
    from pathlib import Path as _P

    _P(path).write_text(format_sections(presentation_sections(p), "costab algebra"), encoding="utf-8")
