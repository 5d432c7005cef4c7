"""Bounded complexes of projectives over a quiver algebra, up to homotopy.

Conventions: differentials raise degree, ``d^n: X^n -> X^{n+1}``.
Suspension is ``(ΣX)^n = X^{n+1}`` with differential ``-d``, so Σ moves
the support one step down. The mapping cone of ``f: X -> Y`` has
``cone(f)^n = Y^n ⊕ X^{n+1}``.

Each term ``X^n`` is a direct sum of indecomposable projectives, stored
as a tuple of vertex indices, and maps are stored as k-matrices on the
path bases of the summands. A module map ``⊕P_v -> ⊕P_w`` is determined
by its "slot" coordinates: one coefficient per (target summand, source
summand, basis path v->w).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

from . import linalg
from .algebra import QuiverAlgebra
from .field import Field


class ComplexError(ValueError):
    pass


class DecompositionError(RuntimeError):
    """No idempotent found although the endomorphism ring is not local."""


class ResourceLimit(RuntimeError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# -- module maps between sums of projectives -------------------------

def _offsets(A: QuiverAlgebra, verts) -> list[int]:
    out, pos = [], 0
    for v in verts:
        out.append(pos)
        pos += A.pdim(v)
    out.append(pos)
    return out


def module_dim(A: QuiverAlgebra, verts) -> int:
    return sum(A.pdim(v) for v in verts)


@lru_cache(maxsize=None)
def _slots(A: QuiverAlgebra, src: tuple, tgt: tuple) -> tuple:
    return tuple(
        (j, i, b)
        for i, v in enumerate(src)
        for j, w in enumerate(tgt)
        for b in A.paths_between(v, w)
    )


def slots(A, src, tgt):
    """Coordinates of Hom_A(⊕P_src, ⊕P_tgt): tuples (j, i, path)."""
    return _slots(A, tuple(src), tuple(tgt))


def map_from_coeffs(A: QuiverAlgebra, src, tgt, coeffs) -> np.ndarray:
    F = A.field
    so, to = _offsets(A, src), _offsets(A, tgt)
    m = F.zeros(to[-1], so[-1])
    for (j, i, b), c in zip(slots(A, src, tgt), coeffs):
        if c != 0:
            m[to[j]:to[j + 1], so[i]:so[i + 1]] += A.right_mult(b) * c
    return m


def coeffs_from_map(A: QuiverAlgebra, src, tgt, m: np.ndarray) -> np.ndarray:
    so, to = _offsets(A, src), _offsets(A, tgt)
    out = np.empty(len(slots(A, src, tgt)), dtype=object)
    for k, (j, i, b) in enumerate(slots(A, src, tgt)):
        out[k] = m[to[j] + A.projective_basis[tgt[j]].index(b), so[i]]
    return out


def is_module_map(A: QuiverAlgebra, src, tgt, m: np.ndarray) -> bool:
    rebuilt = map_from_coeffs(A, src, tgt, coeffs_from_map(A, src, tgt, m))
    return bool(np.all(rebuilt == m))


def path_matrix(A: QuiverAlgebra, src, tgt, entries) -> np.ndarray:
    """Module map from a nested list of {path name: coefficient} dicts, rows indexed by tgt."""
    F = A.field
    so, to = _offsets(A, src), _offsets(A, tgt)
    m = F.zeros(to[-1], so[-1])
    for j, row in enumerate(entries):
        for i, entry in enumerate(row):
            for name, c in (entry or {}).items():
                b = A.basis_index(name)
                if A.source(b) != src[i] or A.target(b) != tgt[j]:
                    raise ComplexError(f"path {name} does not go from P{A.vertices[src[i]]} to P{A.vertices[tgt[j]]}")
                m[to[j]:to[j + 1], so[i]:so[i + 1]] += A.right_mult(b) * F(c)
    return m


# -- complexes ---------------------------------------------------------

def _freeze(m: np.ndarray) -> tuple:
    return (m.shape, tuple(m.flat))


class Complex:
    """A bounded complex of finitely generated projectives."""

    def __init__(self, algebra: QuiverAlgebra, terms: dict, diff: dict | None = None, check: bool = True):
        self.algebra = algebra
        F = algebra.field
        self.terms = {n: tuple(v) for n, v in sorted(terms.items()) if len(v)}
        self.diff = {}
        diff = diff or {}
        for n in diff:
            if n not in self.terms and diff[n].size and not linalg.is_zero(diff[n]):
                raise ComplexError(f"differential d^{n} leaves a zero term")
        for n in self.terms:
            rows, cols = self.dim(n + 1), self.dim(n)
            if n + 1 in self.terms:
                m = diff.get(n)
                if m is None:
                    m = F.zeros(rows, cols)
                if m.shape != (rows, cols):
                    raise ComplexError(f"d^{n} has shape {m.shape}, expected {(rows, cols)}")
                self.diff[n] = m
        if check:
            self.validate()
        self._key = None

    # basic data
    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def degrees(self) -> list[int]:
        return list(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def lo(self) -> int:
        return min(self.terms)

    @property
    def hi(self) -> int:
        return max(self.terms)

    @property
    def width(self) -> int:
        return 0 if self.is_zero() else self.hi - self.lo + 1

    def term(self, n: int) -> tuple:
        return self.terms.get(n, ())

    def dim(self, n: int) -> int:
        return module_dim(self.algebra, self.term(n))

    def d(self, n: int) -> np.ndarray:
        if n in self.diff:
            return self.diff[n]
        return self.field.zeros(self.dim(n + 1), self.dim(n))

    def validate(self):
        A = self.algebra
        for n, m in self.diff.items():
            if not is_module_map(A, self.term(n), self.term(n + 1), m):
                raise ComplexError(f"d^{n} is not a map of projective modules")
        for n in self.diff:
            if n + 1 in self.diff:
                if not linalg.is_zero(linalg.matmul(self.diff[n + 1], self.diff[n], self.field)):
                    raise ComplexError(f"d^{n + 1} d^{n} != 0")

    @property
    def key(self):
        if self._key is None:
            self._key = (
                id(self.algebra),
                tuple(self.terms.items()),
                tuple((n, _freeze(m)) for n, m in self.diff.items()),
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, Complex) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def signature(self) -> tuple:
        return tuple((n, tuple(sorted(v))) for n, v in self.terms.items())

    def k0_class(self) -> tuple[int, ...]:
        """Alternating sum of projective multiplicities, one entry per vertex."""
        out = [0] * len(self.algebra.vertices)
        for n, vs in self.terms.items():
            for v in vs:
                out[v] += (-1) ** (n % 2)
        return tuple(out)

    def __repr__(self):
        A = self.algebra
        parts = [f"{n}:" + "+".join(f"P{A.vertices[v]}" for v in vs) for n, vs in self.terms.items()]
        return f"Complex({', '.join(parts) or '0'})"

    # constructions
    def shift(self, k: int = 1) -> "Complex":
        """Σ^k."""
        sign = -1 if k % 2 else 1
        return Complex(
            self.algebra,
            {n - k: v for n, v in self.terms.items()},
            {n - k: m * sign for n, m in self.diff.items()},
            check=False,
        )

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {n: self.field.eye(self.dim(n)) for n in self.terms})

    def zero_map(self, other: "Complex") -> "ChainMap":
        return ChainMap(self, other, {})


def zero_complex(A: QuiverAlgebra) -> Complex:
    return Complex(A, {}, {}, check=False)


def stalk(A: QuiverAlgebra, vertex, degree: int = 0) -> Complex:
    v = A.vertex_index(vertex) if isinstance(vertex, str) else vertex
    return Complex(A, {degree: (v,)}, {}, check=False)


def from_paths(A: QuiverAlgebra, terms: dict, diffs: dict) -> Complex:
    """Build a complex from vertex names and path-combination differentials.

    ``terms`` maps degree to a list of vertex names; ``diffs`` maps degree
    n to a nested list (rows = summands of degree n+1) of {path: coeff}.
    """
    tv = {n: tuple(A.vertex_index(v) for v in vs) for n, vs in terms.items()}
    dm = {n: path_matrix(A, tv[n], tv[n + 1], e) for n, e in diffs.items()}
    return Complex(A, tv, dm)


def direct_sum(*xs: Complex) -> Complex:
    if not xs:
        raise ComplexError("direct_sum needs at least one complex")
    A = xs[0].algebra
    F = A.field
    degs = sorted(set().union(*(x.terms for x in xs)))
    terms = {n: sum((x.term(n) for x in xs), ()) for n in degs}
    diff = {}
    for n in degs:
        if n + 1 not in terms:
            continue
        m = F.zeros(module_dim(A, terms[n + 1]), module_dim(A, terms[n]))
        r = c = 0
        for x in xs:
            dr, dc = x.dim(n + 1), x.dim(n)
            if dr and dc:
                m[r:r + dr, c:c + dc] = x.d(n)
            r, c = r + dr, c + dc
        diff[n] = m
    return Complex(A, terms, diff, check=False)


# -- chain maps ----------------------------------------------------------

class ChainMap:
    """A degree-0 map of complexes; ``comps[n]`` is X^n -> Y^n."""

    def __init__(self, source: Complex, target: Complex, comps: dict):
        self.source = source
        self.target = target
        F = source.field
        self.comps = {}
        for n in source.terms:
            if n in target.terms:
                m = comps.get(n)
                if m is None:
                    m = F.zeros(target.dim(n), source.dim(n))
                self.comps[n] = m

    def f(self, n: int) -> np.ndarray:
        if n in self.comps:
            return self.comps[n]
        return self.source.field.zeros(self.target.dim(n), self.source.dim(n))

    def is_chain_map(self) -> bool:
        F = self.source.field
        X, Y = self.source, self.target
        for n in set(X.terms) | set(Y.terms):
            lhs = linalg.matmul(Y.d(n), self.f(n), F)
            rhs = linalg.matmul(self.f(n + 1), X.d(n), F)
            if lhs.size and not np.all(lhs == rhs):
                return False
        return True

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self ∘ other."""
        if other.target.key != self.source.key:
            raise ComplexError("maps are not composable")
        F = self.source.field
        return ChainMap(other.source, self.target,
                        {n: linalg.matmul(self.f(n), other.f(n), F) for n in other.source.terms})

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, {n: self.f(n) + other.f(n) for n in self.comps})

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, {n: self.f(n) - other.f(n) for n in self.comps})

    def scale(self, c) -> "ChainMap":
        c = self.source.field(c)
        return ChainMap(self.source, self.target, {n: m * c for n, m in self.comps.items()})

    def shift(self, k: int = 1) -> "ChainMap":
        return ChainMap(self.source.shift(k), self.target.shift(k),
                        {n - k: m for n, m in self.comps.items()})

    def is_zero(self) -> bool:
        return all(linalg.is_zero(m) for m in self.comps.values())

    def equals(self, other: "ChainMap") -> bool:
        return all(np.all(self.f(n) == other.f(n)) for n in self.comps)


def cone(f: ChainMap) -> Complex:
    X, Y = f.source, f.target
    A = X.algebra
    F = A.field
    degs = sorted(set(Y.terms) | {n - 1 for n in X.terms})
    terms = {n: Y.term(n) + X.term(n + 1) for n in degs}
    diff = {}
    for n in degs:
        if n + 1 not in terms:
            continue
        yr, xr = Y.dim(n + 1), X.dim(n + 2)
        yc, xc = Y.dim(n), X.dim(n + 1)
        m = F.zeros(yr + xr, yc + xc)
        if yr and yc:
            m[:yr, :yc] = Y.d(n)
        if yr and xc:
            m[:yr, yc:] = f.f(n + 1)
        if xr and xc:
            m[yr:, yc:] = -X.d(n + 1)
        diff[n] = m
    return Complex(A, terms, diff, check=False)


def cocone(f: ChainMap) -> Complex:
    """Σ^{-1} cone(f); its term in degree n is Y^{n-1} ⊕ X^n."""
    return cone(f).shift(-1)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """Y -> cone(f)."""
    C = cone(f)
    F = C.field
    comps = {}
    for n in f.target.terms:
        m = F.zeros(C.dim(n), f.target.dim(n))
        m[: f.target.dim(n), :] = F.eye(f.target.dim(n))
        comps[n] = m
    return ChainMap(f.target, C, comps)


def cone_projection(f: ChainMap) -> ChainMap:
    """cone(f) -> ΣX."""
    C = cone(f)
    SX = f.source.shift(1)
    F = C.field
    comps = {}
    for n in C.terms:
        yd = f.target.dim(n)
        m = F.zeros(SX.dim(n), C.dim(n))
        if SX.dim(n):
            m[:, yd:] = F.eye(SX.dim(n))
        comps[n] = m
    return ChainMap(C, SX, comps)


# -- Hom spaces modulo homotopy ------------------------------------------

class HomSpace:
    """Hom_K(X, Y): chain maps modulo nullhomotopic maps.

    Chain maps are encoded by their slot coordinates degree by degree;
    ``basis`` holds chain maps whose classes form a basis.
    """

    def __init__(self, X: Complex, Y: Complex):
        self.X, self.Y = X, Y
        A = X.algebra
        F = A.field
        self.field = F
        self.degrees = [n for n in X.terms if n in Y.terms]
        self._layout = {}
        pos = 0
        for n in self.degrees:
            s = slots(A, X.term(n), Y.term(n))
            self._layout[n] = (pos, len(s))
            pos += len(s)
        self.nvars = pos
        # chain condition d_Y f - f d_X, as slot coordinates of maps X^n -> Y^{n+1}
        cond_layout, cpos = {}, 0
        for n in set(X.terms) | {m - 1 for m in X.terms}:
            if X.term(n) and Y.term(n + 1):
                s = slots(A, X.term(n), Y.term(n + 1))
                cond_layout[n] = (cpos, len(s))
                cpos += len(s)
        cond = F.zeros(cpos, self.nvars)
        for n in self.degrees:
            start, cnt = self._layout[n]
            for k in range(cnt):
                e = F.zeros(cnt, 1)[:, 0]
                e[k] = F.one
                fn = map_from_coeffs(A, X.term(n), Y.term(n), e)
                if n in cond_layout:
                    r0, rc = cond_layout[n]
                    cond[r0:r0 + rc, start + k] += coeffs_from_map(
                        A, X.term(n), Y.term(n + 1), linalg.matmul(Y.d(n), fn, F))
                if n - 1 in cond_layout:
                    r0, rc = cond_layout[n - 1]
                    cond[r0:r0 + rc, start + k] -= coeffs_from_map(
                        A, X.term(n - 1), Y.term(n), linalg.matmul(fn, X.d(n - 1), F))
        self.cycles = linalg.nullspace(cond, F) if self.nvars else F.zeros(0, 0)
        # homotopies h^n: X^n -> Y^{n-1}, image d_Y h + h d_X
        hcols = []
        for n in X.terms:
            if not Y.term(n - 1):
                continue
            s = slots(A, X.term(n), Y.term(n - 1))
            for k in range(len(s)):
                e = F.zeros(len(s), 1)[:, 0]
                e[k] = F.one
                hn = map_from_coeffs(A, X.term(n), Y.term(n - 1), e)
                col = F.zeros(self.nvars, 1)[:, 0]
                if n in self._layout:
                    r0, rc = self._layout[n]
                    col[r0:r0 + rc] += coeffs_from_map(A, X.term(n), Y.term(n), linalg.matmul(Y.d(n - 1), hn, F))
                if n - 1 in self._layout:
                    r0, rc = self._layout[n - 1]
                    col[r0:r0 + rc] += coeffs_from_map(
                        A, X.term(n - 1), Y.term(n - 1), linalg.matmul(hn, X.d(n - 1), F))
                hcols.append((n, k, col))
        self._hgens = hcols
        H = F.zeros(self.nvars, len(hcols))
        for c, (_, _, col) in enumerate(hcols):
            H[:, c] = col
        self._H = H
        both = np.concatenate([H, self.cycles], axis=1) if self.nvars else F.zeros(0, 0)
        ind = linalg.independent_columns(both, F) if self.nvars else []
        hind = [c for c in ind if c < H.shape[1]]
        zind = [c for c in ind if c >= H.shape[1]]
        self.boundary_dim = len(hind)
        self.dim = len(zind)
        self._space = linalg.ColumnSpace(both[:, ind] if ind else F.zeros(self.nvars, 0), F)
        self._nb = len(hind)
        self._basis_vecs = [both[:, c] for c in zind]
        self.basis = [self.map_from_vector(v) for v in self._basis_vecs]

    def map_from_vector(self, vec) -> ChainMap:
        A = self.X.algebra
        comps = {}
        for n, (start, cnt) in self._layout.items():
            comps[n] = map_from_coeffs(A, self.X.term(n), self.Y.term(n), vec[start:start + cnt])
        return ChainMap(self.X, self.Y, comps)

    def vector(self, f: ChainMap) -> np.ndarray:
        A = self.X.algebra
        out = self.field.zeros(self.nvars, 1)[:, 0]
        for n, (start, cnt) in self._layout.items():
            out[start:start + cnt] = coeffs_from_map(A, self.X.term(n), self.Y.term(n), f.f(n))
        return out

    def coords(self, f: ChainMap) -> np.ndarray:
        """Coordinates of the class of f in ``basis``."""
        if self.nvars == 0:
            return self.field.zeros(0, 1)[:, 0]
        x = self._space.coords(self.vector(f))
        if x is None:
            raise ComplexError("not a chain map")
        return x[self._nb:]

    def is_nullhomotopic(self, f: ChainMap) -> bool:
        return all(c == 0 for c in self.coords(f))

    def nullhomotopy(self, f: ChainMap) -> dict | None:
        """Maps h^n: X^n -> Y^{n-1} with f = d_Y h + h d_X, or None."""
        F = self.field
        A = self.X.algebra
        if self.nvars == 0:
            return {}
        sol = linalg.solve(self._H, self.vector(f), F) if self._H.shape[1] else (
            {} if linalg.is_zero(self.vector(f)) else None)
        if sol is None:
            return None
        h = {}
        if isinstance(sol, dict):
            return h
        by_deg: dict[int, list] = {}
        for (n, k, _), c in zip(self._hgens, sol):
            by_deg.setdefault(n, []).append(c)
        for n, cs in by_deg.items():
            h[n] = map_from_coeffs(A, self.X.term(n), self.Y.term(n - 1), cs)
        return h

    def from_coords(self, coords) -> ChainMap:
        vec = self.field.zeros(self.nvars, 1)[:, 0]
        for c, v in zip(coords, self._basis_vecs):
            if c != 0:
                vec = vec + v * c
        return self.map_from_vector(vec)


_HOM_CACHE: dict = {}


def hom_space(X: Complex, Y: Complex) -> HomSpace:
    key = (X.key, Y.key)
    hs = _HOM_CACHE.get(key)
    if hs is None:
        if len(_HOM_CACHE) > 20000:
            _HOM_CACHE.clear()
        hs = HomSpace(X, Y)
        _HOM_CACHE[key] = hs
    return hs


def hom_dim(X: Complex, Y: Complex) -> int:
    if X.is_zero() or Y.is_zero():
        return 0
    if X.hi < Y.lo or Y.hi < X.lo:
        return 0
    return hom_space(X, Y).dim


def homotopic(f: ChainMap, g: ChainMap) -> bool:
    return hom_space(f.source, f.target).is_nullhomotopic(f - g)


def is_contractible(X: Complex) -> bool:
    return X.is_zero() or hom_space(X, X).dim == 0


# -- minimal complexes ---------------------------------------------------

def _find_unit(X: Complex):
    A = X.algebra
    for n, m in X.diff.items():
        so, to = _offsets(A, X.term(n)), _offsets(A, X.term(n + 1))
        for i, v in enumerate(X.term(n)):
            for j, w in enumerate(X.term(n + 1)):
                if v == w and m[to[j], so[i]] != 0:
                    return n, i, j
    return None


def _drop(m: np.ndarray, rows=None, cols=None) -> np.ndarray:
    if rows is not None:
        m = np.delete(m, rows, axis=0)
    if cols is not None:
        m = np.delete(m, cols, axis=1)
    return m


def minimalize(X: Complex) -> Complex:
    """Homotopy equivalent complex whose differential has no unit entries."""
    return minimalize_with_map(X, track=False)[0]


def minimalize_with_map(X: Complex, track: bool = True):
    """Minimal complex M and a homotopy equivalence X -> M (None when not tracked).

    Each elimination step splits off ``P --φ--> P`` with φ invertible; the
    projection is (0, 1) in the lower degree and (-γφ⁻¹, 1) in the upper.
    """
    A = X.algebra
    F = A.field
    source = X
    proj = {n: F.eye(X.dim(n)) for n in X.terms} if track else None
    while True:
        hit = _find_unit(X)
        if hit is None:
            if track:
                return X, ChainMap(source, X, {n: proj[n] for n in X.terms})
            return X, None
        n, i, j = hit
        so, to = _offsets(A, X.term(n)), _offsets(A, X.term(n + 1))
        src_rng = list(range(so[i], so[i + 1]))
        tgt_rng = list(range(to[j], to[j + 1]))
        d = X.d(n)
        phi = d[np.ix_(tgt_rng, src_rng)]
        beta = _drop(d[tgt_rng, :], cols=src_rng)
        gamma = _drop(d[:, src_rng], rows=tgt_rng)
        delta = _drop(d, rows=tgt_rng, cols=src_rng)
        gphi = linalg.matmul(gamma, linalg.inverse(phi, F), F)
        new_d = delta - linalg.matmul(gphi, beta, F)
        if track:
            proj[n] = _drop(proj[n], rows=src_rng)
            # reorder columns of the upper projection to match the original basis
            cols = F.zeros(gphi.shape[0], d.shape[0])
            keep = [r for r in range(d.shape[0]) if r not in set(tgt_rng)]
            if gphi.shape[0]:
                cols[:, tgt_rng] = -gphi
                cols[:, keep] = F.eye(len(keep))
            proj[n + 1] = linalg.matmul(cols, proj[n + 1], F)
        terms = dict(X.terms)
        terms[n] = X.term(n)[:i] + X.term(n)[i + 1:]
        terms[n + 1] = X.term(n + 1)[:j] + X.term(n + 1)[j + 1:]
        diff = dict(X.diff)
        diff[n] = new_d
        if n - 1 in diff:
            diff[n - 1] = _drop(diff[n - 1], rows=src_rng)
        if n + 1 in diff:
            diff[n + 1] = _drop(diff[n + 1], cols=tgt_rng)
        terms = {k: v for k, v in terms.items() if v}
        diff = {k: v for k, v in diff.items() if k in terms and k + 1 in terms}
        X = Complex(A, terms, diff, check=False)


# -- endomorphism algebras and decomposition -----------------------------

class EndAlgebra:
    """End_K(X) as a finite dimensional algebra on the basis of HomSpace(X, X)."""

    def __init__(self, X: Complex):
        self.X = X
        self.hs = hom_space(X, X)
        self.field = X.field
        self.dim = self.hs.dim
        self.unit = self.hs.coords(X.identity())
        self._table = {}

    def mul(self, a, b) -> np.ndarray:
        """Coordinates of a*b (a after b)."""
        F = self.field
        out = F.zeros(self.dim, 1)[:, 0]
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                out = out + self._basis_product(i, j) * (ai * bj)
        return out

    def _basis_product(self, i, j):
        if (i, j) not in self._table:
            g = self.hs.basis[i].compose(self.hs.basis[j])
            self._table[i, j] = self.hs.coords(g)
        return self._table[i, j]

    def left_matrix(self, a) -> np.ndarray:
        F = self.field
        m = F.zeros(self.dim, self.dim)
        for j in range(self.dim):
            e = F.zeros(self.dim, 1)[:, 0]
            e[j] = F.one
            m[:, j] = self.mul(a, e)
        return m

    def radical_codim(self) -> int:
        """dim E/J via the trace form (exact in characteristic 0 and large p)."""
        F = self.field
        n = self.dim
        Ls = [self.left_matrix(self._e(i)) for i in range(n)]
        Ts = [L.T for L in Ls]
        form = F.zeros(n, n)
        for i in range(n):
            for j in range(i, n):
                # tr(Li Lj) without forming the product
                form[i, j] = form[j, i] = sum((Ls[i] * Ts[j]).flat, F.zero)
        return linalg.rank(form, F)

    def _e(self, i):
        F = self.field
        e = F.zeros(self.dim, 1)[:, 0]
        e[i] = F.one
        return e

    def power(self, a, k):
        r = self.unit
        for _ in range(k):
            r = self.mul(a, r)
        return r

    def minimal_polynomial(self, a) -> list:
        """Monic coefficients c_0..c_m (low degree first) of the minimal polynomial."""
        F = self.field
        powers = [self.unit]
        while True:
            nxt = self.mul(a, powers[-1])
            M = np.stack(powers, axis=1)
            sol = linalg.solve(M, nxt, F)
            if sol is not None:
                return [-c for c in sol] + [F.one]
            powers.append(nxt)

    def is_nilpotent(self, a) -> bool:
        p = self.power(a, max(self.dim, 1))
        return all(c == 0 for c in p)

    def eval_poly(self, coeffs, a):
        F = self.field
        out = F.zeros(self.dim, 1)[:, 0]
        for c in reversed(coeffs):
            out = self.mul(a, out) + self.unit * c
        return out


def _sympy_poly(coeffs, field: Field):
    x = sympy.Symbol("x")
    if field.char:
        return sympy.Poly([int(c) for c in reversed(coeffs)], x, modulus=field.char)
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x, domain="QQ")


def _from_sympy(p, field: Field) -> list:
    out = []
    for c in reversed(p.all_coeffs()):
        if field.char:
            out.append(field(int(c)))
        else:
            r = sympy.Rational(c)
            out.append(field(sympy.Rational(r).p) / field(sympy.Rational(r).q))
    return out


def idempotent_from_element(E: EndAlgebra, a):
    """A nontrivial idempotent in the subalgebra k[a], or None."""
    F = E.field
    mp = _sympy_poly(E.minimal_polynomial(a), F)
    factors = mp.factor_list()[1]
    if len(factors) < 2:
        return None
    f1 = factors[0][0] ** factors[0][1]
    rest = sympy.Poly(1, mp.gen, **({"modulus": F.char} if F.char else {"domain": "QQ"}))
    for g, m in factors[1:]:
        rest = rest * g ** m
    s, t, h = sympy.gcdex(f1, rest)
    # s f1 + t rest = 1; t*rest is 1 on the f1-primary part and 0 elsewhere
    e = (t * rest).rem(mp)
    return E.eval_poly(_from_sympy(e, F), a)


def _candidates(E: EndAlgebra, rng: random.Random, tries: int):
    F = E.field
    n = E.dim
    for i in range(n):
        yield E._e(i)
    for i, j in itertools.combinations(range(n), 2):
        yield E._e(i) + E._e(j)
    for _ in range(tries):
        yield F.vector([rng.randint(-5, 5) for _ in range(n)])


def lift_idempotent(f: ChainMap, max_iter: int = 64) -> ChainMap:
    """An idempotent chain map close to f, valid when f is idempotent mod homotopy on a minimal complex."""
    a = f
    for _ in range(max_iter):
        a2 = a.compose(a)
        if a2.equals(a):
            return a
        a3 = a2.compose(a)
        a = a2.scale(3) - a3.scale(2)
    raise DecompositionError("idempotent lifting did not converge")


def _split(X: Complex, e: ChainMap) -> Complex:
    """The summand im(e) of X for an idempotent chain map e."""
    A = X.algebra
    F = A.field
    keep_terms, iotas, pis = {}, {}, {}
    for n, vs in X.terms.items():
        en = e.f(n)
        offs = _offsets(A, vs)
        chosen = []
        m0 = {}
        for v in sorted(set(vs)):
            idx = [i for i, w in enumerate(vs) if w == v]
            top = F.matrix([[en[offs[r], offs[c]] for c in idx] for r in idx])
            cols = linalg.independent_columns(top, F)
            if not cols:
                continue
            sub = top[:, cols]
            rows = linalg.independent_columns(sub.T.copy(), F)
            left = linalg.inverse(sub[rows, :], F)
            for k, c in enumerate(cols):
                chosen.append(idx[c])
                m0[idx[c]] = {idx[r]: left[k, rr] for rr, r in enumerate(rows)}
        chosen.sort()
        if not chosen:
            continue
        new_vs = tuple(vs[c] for c in chosen)
        noffs = _offsets(A, new_vs)
        iota0 = F.zeros(offs[-1], noffs[-1])
        pi0 = F.zeros(noffs[-1], offs[-1])
        for k, c in enumerate(chosen):
            p = A.pdim(vs[c])
            iota0[offs[c]:offs[c] + p, noffs[k]:noffs[k] + p] = F.eye(p)
            for r, coef in m0[c].items():
                if coef != 0:
                    pi0[noffs[k]:noffs[k] + p, offs[r]:offs[r] + p] = F.eye(p) * coef
        iota = linalg.matmul(en, iota0, F)
        pi = linalg.matmul(pi0, en, F)
        u = linalg.matmul(pi, iota, F)
        pi = linalg.matmul(linalg.inverse(u, F), pi, F)
        keep_terms[n] = new_vs
        iotas[n], pis[n] = iota, pi
    diff = {}
    for n in keep_terms:
        if n + 1 in keep_terms:
            diff[n] = linalg.matmul(linalg.matmul(pis[n + 1], X.d(n), F), iotas[n], F)
    return Complex(A, keep_terms, diff, check=False)


def _decompose_minimal(X: Complex, rng: random.Random, tries: int) -> list[Complex]:
    if X.is_zero():
        return []
    E = EndAlgebra(X)
    if E.radical_codim() <= 1:
        return [X]
    for a in _candidates(E, rng, tries):
        e = idempotent_from_element(E, a)
        if e is None:
            continue
        emap = lift_idempotent(E.hs.from_coords(e))
        comp = X.identity() - emap
        parts = []
        for idem in (emap, comp):
            parts.extend(_decompose_minimal(minimalize(_split(X, idem)), rng, tries))
        return parts
    raise DecompositionError(
        f"no idempotent found in End(X) of dimension {E.dim} over {X.field.name}; "
        "retry with another field or more tries"
    )


def decompose(X: Complex, seed: int = 0, tries: int = 200) -> list[Complex]:
    """Krull-Schmidt decomposition into minimal indecomposable complexes."""
    return _decompose_minimal(minimalize(X), random.Random(seed), tries)


def is_indecomposable(X: Complex) -> bool:
    return len(decompose(X)) == 1


def isomorphic_indecomposables(X: Complex, Y: Complex) -> bool:
    """Iso test for indecomposables: some composite X -> Y -> X is not nilpotent."""
    if X.k0_class() != Y.k0_class():
        return False
    X, Y = minimalize(X), minimalize(Y)
    if X.signature() != Y.signature():
        return False
    fwd, back = hom_space(X, Y), hom_space(Y, X)
    if fwd.dim == 0 or back.dim == 0:
        return False
    E = EndAlgebra(X)
    for f in fwd.basis:
        for g in back.basis:
            if not E.is_nilpotent(E.hs.coords(g.compose(f))):
                return True
    return False


def isomorphic(X: Complex, Y: Complex) -> bool:
    """Krull-Schmidt comparison of arbitrary complexes."""
    xs, ys = decompose(X), decompose(Y)
    if len(xs) != len(ys):
        return False
    remaining = list(ys)
    for x in xs:
        for k, y in enumerate(remaining):
            if isomorphic_indecomposables(x, y):
                del remaining[k]
                break
        else:
            return False
    return True


# -- enumeration of indecomposables --------------------------------------

def normalize(X: Complex) -> tuple[Complex, int]:
    """Orbit representative (top degree 0) and shift s with X = Σ^s rep."""
    s = -X.hi
    return X.shift(-s), s


@dataclass
class Enumeration:
    orbits: list  # list of (label, representative complex)
    complete: bool
    width_bound: int


def _generic_labels(A: QuiverAlgebra, reps: list[Complex]) -> list[str]:
    labels, counts = [], {}
    for X in reps:
        if X.width == 1 and len(X.term(X.hi)) == 1:
            labels.append(f"P{A.vertices[X.term(X.hi)[0]]}")
        else:
            k = counts.get(X.width, 0)
            counts[X.width] = k + 1
            labels.append(f"C{X.width}_{k}")
    return labels


def enumerate_indecomposables(A: QuiverAlgebra, width_bound: int, max_orbits: int = 64,
                              seed: int = 0) -> Enumeration:
    """Σ-orbit representatives of indecomposables of support width <= width_bound.

    Starts from the stalk complexes and closes under taking indecomposable
    summands of cones of Hom-basis maps between representatives.
    """
    if width_bound < 1:
        raise ValueError("width bound must be positive")
    reps = [stalk(A, v) for v in range(len(A.vertices))]

    def known(Y: Complex) -> bool:
        return any(isomorphic_indecomposables(Y, R) for R in reps)

    done_pairs = set()
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(range(len(reps)), repeat=2):
            X, Y = reps[a], reps[b]
            # relative shifts k with Hom(X, Σ^k Y) possibly nonzero
            for k in range(-(X.width + Y.width), X.width + Y.width + 1):
                if (a, b, k) in done_pairs:
                    continue
                done_pairs.add((a, b, k))
                SY = Y.shift(k)
                if hom_dim(X, SY) == 0:
                    continue
                for f in hom_space(X, SY).basis:
                    for piece in decompose(cone(f), seed=seed):
                        if piece.width > width_bound:
                            continue
                        rep, _ = normalize(piece)
                        if not known(rep):
                            reps.append(rep)
                            changed = True
                            if len(reps) > max_orbits:
                                raise ResourceLimit(
                                    f"more than {max_orbits} orbits of width <= {width_bound}",
                                    partial=Enumeration(list(zip(_generic_labels(A, reps), reps)), False,
                                                        width_bound))
    reps.sort(key=lambda X: (X.width, X.signature()))
    return Enumeration(list(zip(_generic_labels(A, reps), reps)), True, width_bound)


# -- text format ------------------------------------------------------------

def complex_lines(X: Complex, label: str) -> list[str]:
    """Lines ``label term n v1 v2`` and ``label d n j i coeff path``."""
    A = X.algebra
    from .textio import format_number

    out = []
    for n, vs in X.terms.items():
        out.append(f"{label} term {n} " + " ".join(A.vertices[v] for v in vs))
    for n, m in X.diff.items():
        cs = coeffs_from_map(A, X.term(n), X.term(n + 1), m)
        for (j, i, b), c in zip(slots(A, X.term(n), X.term(n + 1)), cs):
            if c != 0:
                val = c if not A.field.char else int(c)
                from fractions import Fraction

                out.append(f"{label} d {n} {j} {i} {format_number(Fraction(val))} {A.path_name(b)}")
    return out


def complexes_from_lines(A: QuiverAlgebra, lines, path=None) -> dict[str, Complex]:
    from .textio import ParseError, parse_number

    terms: dict[str, dict] = {}
    entries: dict[str, list] = {}
    for no, text in lines:
        parts = text.split()
        if len(parts) >= 3 and parts[1] == "term":
            try:
                verts = tuple(A.vertex_index(v) for v in parts[3:])
                terms.setdefault(parts[0], {})[int(parts[2])] = verts
            except (KeyError, ValueError):
                raise ParseError(f"bad term line {text!r}", no, path) from None
        elif len(parts) == 7 and parts[1] == "d":
            try:
                n, j, i = int(parts[2]), int(parts[3]), int(parts[4])
                c = parse_number(parts[5], no, path)
                b = A.basis_index(parts[6])
            except (KeyError, ValueError):
                raise ParseError(f"bad differential line {text!r}", no, path) from None
            entries.setdefault(parts[0], []).append((no, n, j, i, c, b))
        else:
            raise ParseError(f"unrecognized complex line {text!r}", no, path)
    out = {}
    for label, tv in terms.items():
        diff = {}
        for no, n, j, i, c, b in entries.get(label, []):
            if n not in tv or n + 1 not in tv or i >= len(tv[n]) or j >= len(tv[n + 1]):
                raise ParseError(f"differential entry out of range for {label}", no, path)
            s = slots(A, tv[n], tv[n + 1])
            if (j, i, b) not in s:
                raise ParseError(f"path {A.path_name(b)} has wrong endpoints", no, path)
            vec = diff.setdefault(n, A.field.zeros(len(s), 1)[:, 0])
            vec[s.index((j, i, b))] += A.field(c)
        mats = {n: map_from_coeffs(A, tv[n], tv[n + 1], v) for n, v in diff.items()}
        try:
            out[label] = Complex(A, tv, mats)
        except ComplexError as exc:
            raise ParseError(f"{label}: {exc}", path=path) from None
    return out
