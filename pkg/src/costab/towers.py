"""Filtrations of objects by distinguished triangles, realized as twisted complexes.

A tower with factors q_1, ..., q_n is stored as one complex ``T`` whose
graded pieces are the factors in order, with a differential that is block
upper triangular: the blocks above the diagonal glue later factors onto
earlier ones. The intermediate object t_j is the subcomplex on the first
j factors and the triangles ``t_{j-1} -> t_j -> q_j`` are the degreewise
split inclusions and projections, so every step has a concrete witness.

A tower also remembers the object it filters together with a homotopy
equivalence from that object into ``T``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import complexes as cx
from . import linalg
from .complexes import ChainMap, Complex
from .snapshot import FormalObject, IndecId, Snapshot, WindowExhausted


class TowerError(RuntimeError):
    pass


class SwapRefused(TowerError):
    def __init__(self, position: int, dim: int):
        super().__init__(f"hom(factor {position + 1}, Σ factor {position}) has dimension {dim} != 0")
        self.position = position
        self.dim = dim


class DepthExhausted(TowerError):
    """The tower search hit its depth bound before deciding."""


UNKNOWN = object()  # tag for ids whose membership cannot be decided in the window


# -- layout helpers ----------------------------------------------------------

def _piece_blocks(snap: Snapshot, pieces: list[IndecId]):
    """Per degree, the column range of each piece inside the total complex."""
    cplx = [snap.complex_of(p) for p in pieces]
    degs = sorted(set().union(*(c.terms for c in cplx))) if cplx else []
    blocks = {}
    for n in degs:
        pos, rng = 0, []
        for c in cplx:
            d = c.dim(n)
            rng.append((pos, pos + d))
            pos += d
        blocks[n] = rng
    return cplx, blocks


def _group_ranges(sizes: list[int]) -> list[tuple[int, int]]:
    out, pos = [], 0
    for s in sizes:
        out.append((pos, pos + s))
        pos += s
    return out


@dataclass
class Tower:
    snapshot: Snapshot = field(repr=False)
    pieces: list[IndecId]
    sizes: list[int]
    tags: list
    total: Complex = field(repr=False)
    source: Complex | None = field(default=None, repr=False)
    witness: ChainMap | None = field(default=None, repr=False)
    swaps: list = field(default_factory=list)

    def __post_init__(self):
        if sum(self.sizes) != len(self.pieces) or len(self.tags) != len(self.sizes):
            raise TowerError("group sizes, tags and pieces disagree")

    # structure
    def __len__(self):
        return len(self.sizes)

    def groups(self) -> list[list[int]]:
        return [list(range(a, b)) for a, b in _group_ranges(self.sizes)]

    def factor(self, j: int) -> FormalObject:
        return FormalObject([self.pieces[i] for i in self.groups()[j]])

    def factors(self) -> list[tuple[FormalObject, object]]:
        return [(self.factor(j), self.tags[j]) for j in range(len(self))]

    def total_object(self) -> FormalObject:
        return FormalObject(self.pieces)

    def k0_sum(self) -> tuple[int, ...]:
        return self.snapshot.k0_class(self.total_object())

    def _degree_indices(self, piece_ids: list[int]) -> dict[int, list[int]]:
        _, blocks = _piece_blocks(self.snapshot, self.pieces)
        out = {}
        for n, rng in blocks.items():
            idx = []
            for p in piece_ids:
                idx.extend(range(*rng[p]))
            out[n] = idx
        return out

    def _restrict(self, piece_ids: list[int]) -> Complex:
        idx = self._degree_indices(piece_ids)
        T = self.total
        terms = {}
        for n, vs in T.terms.items():
            terms[n] = sum((self.snapshot.complex_of(self.pieces[p]).term(n) for p in piece_ids), ())
        diff = {}
        for n in T.diff:
            if terms.get(n) and terms.get(n + 1):
                diff[n] = T.d(n)[np.ix_(idx[n + 1], idx[n])]
        return Complex(T.algebra, terms, diff, check=False)

    def intermediate(self, j: int) -> Complex:
        """t_j: the subcomplex on the first j factors (t_0 = 0, t_n = total)."""
        return self._restrict([p for g in self.groups()[:j] for p in g])

    def factor_complex(self, j: int) -> Complex:
        return self._restrict(self.groups()[j])

    def validate(self) -> bool:
        """Differential squares to zero, is block upper triangular, and diagonal blocks are the pieces."""
        T = self.total
        _, blocks = _piece_blocks(self.snapshot, self.pieces)
        owner = [g for g, grp in enumerate(self.groups()) for _ in grp]
        for n, m in T.diff.items():
            for p, (c0, c1) in enumerate(blocks.get(n, [])):
                for r, (r0, r1) in enumerate(blocks.get(n + 1, [])):
                    blk = m[r0:r1, c0:c1]
                    if owner[r] > owner[p] and not linalg.is_zero(blk):
                        return False
                    if owner[r] == owner[p] and r != p and not linalg.is_zero(blk):
                        return False
                    if r == p and not np.all(blk == self.snapshot.complex_of(self.pieces[p]).d(n)):
                        return False
        try:
            T.validate()
        except cx.ComplexError:
            return False
        if self.witness is not None:
            if not self.witness.is_chain_map():
                return False
            if not cx.minimalize(cx.cone(self.witness)).is_zero():
                return False
        return True

    def describe(self) -> str:
        return " | ".join(f"{f} [{_fmt_tag(t)}]" for f, t in self.factors()) or "0"


def _fmt_tag(t) -> str:
    if isinstance(t, Fraction):
        return str(t)
    if isinstance(t, float):
        return f"{t:.12g}"
    return str(t)


# -- constructors ------------------------------------------------------------

def split_tower(snap: Snapshot, factors: list[tuple[FormalObject, object]]) -> Tower:
    """Tower with zero gluing: the total is the direct sum of the factors."""
    pieces, sizes, tags = [], [], []
    for obj, tag in factors:
        ids = obj.expanded()
        pieces.extend(ids)
        sizes.append(len(ids))
        tags.append(tag)
    if pieces:
        total = cx.direct_sum(*(snap.complex_of(p) for p in pieces))
    else:
        total = cx.zero_complex(snap.algebra)
    return Tower(snap, pieces, sizes, tags, total, total, total.identity())


def _stack(snap: Snapshot, lower: Tower, q_pieces: list[IndecId], twist: dict) -> Complex:
    """Total complex [[D_lower, twist], [0, d_q]]."""
    A = snap.algebra
    F = A.field
    Q = cx.direct_sum(*(snap.complex_of(p) for p in q_pieces))
    L = lower.total
    degs = sorted(set(L.terms) | set(Q.terms))
    terms = {n: L.term(n) + Q.term(n) for n in degs}
    diff = {}
    for n in degs:
        if n + 1 not in terms:
            continue
        lr, qr, lc, qc = L.dim(n + 1), Q.dim(n + 1), L.dim(n), Q.dim(n)
        m = F.zeros(lr + qr, lc + qc)
        if lr and lc:
            m[:lr, :lc] = L.d(n)
        if qr and qc:
            m[lr:, lc:] = Q.d(n)
        if lr and qc and n in twist:
            m[:lr, lc:] = twist[n]
        diff[n] = m
    return Complex(A, terms, diff, check=False)


# -- search --------------------------------------------------------------------

def _candidate_targets(snap: Snapshot, t: Complex):
    """Ids whose complexes overlap the support of t, i.e. all s that may have Hom(t, s) != 0."""
    out = []
    for o in snap.orbits:
        R = snap.reps[o]
        for k in range(R.lo - t.hi, -t.lo + 1):
            out.append(IndecId(o, k))
    return out


def _radical_basis(snap: Snapshot, s_from: IndecId, s_to: IndecId) -> list[ChainMap]:
    X, Y = snap.complex_of(s_from), snap.complex_of(s_to)
    hs = cx.hom_space(X, Y)
    if s_from != s_to:
        return list(hs.basis)
    E = cx.EndAlgebra(X)
    F = X.field
    n = E.dim
    # a - λ(a)·1 is nilpotent; λ is read off the trace of left multiplication
    lam = []
    for i in range(n):
        L = E.left_matrix(E._e(i))
        lam.append(sum((L[k, k] for k in range(n)), F.zero) / F(n))
    unit = E.unit
    out = []
    for i in range(n):
        v = E._e(i) - unit * lam[i]
        if any(c != 0 for c in v):
            out.append(hs.from_coords(v))
    return out


def _approximation(snap: Snapshot, t: Complex, S: list[IndecId], rng: random.Random | None):
    """Minimal left add(S)-approximation t -> q as (q pieces, chain map components)."""
    F = t.field
    chosen_maps: list[tuple[IndecId, ChainMap]] = []
    for s in S:
        hs = cx.hom_space(t, snap.complex_of(s))
        rad_vecs = []
        for s2 in S:
            bs = cx.hom_space(t, snap.complex_of(s2)).basis
            for r in _radical_basis(snap, s2, s):
                for b in bs:
                    rad_vecs.append(hs.coords(r.compose(b)))
        basis = [hs.coords(b) for b in hs.basis]
        if rng is not None:
            # random change of basis so the chosen complement varies between runs
            while True:
                M = F.matrix([[rng.randint(-3, 3) for _ in basis] for _ in basis])
                if linalg.rank(M, F) == len(basis):
                    break
            basis = [sum((b * M[i, j] for j, b in enumerate(basis)), F.zeros(hs.dim, 1)[:, 0])
                     for i in range(len(basis))]
        cols = rad_vecs + basis
        mat = np.stack(cols, axis=1) if cols else F.zeros(hs.dim, 0)
        ind = linalg.independent_columns(mat, F)
        rad_rank = len([c for c in ind if c < len(rad_vecs)])
        for c in ind:
            if c >= len(rad_vecs):
                chosen_maps.append((s, hs.from_coords(cols[c])))
        assert len([c for c in ind if c >= len(rad_vecs)]) == hs.dim - rad_rank
    return chosen_maps


def _find(snap: Snapshot, t: Complex, tag_of, bound, depth: int, max_depth: int, rng):
    """Tower of the minimal complex t with witness t -> T, tags strictly below ``bound``."""
    if t.is_zero():
        empty = split_tower(snap, [])
        return Tower(snap, [], [], [], empty.total, t, ChainMap(t, empty.total, {}))
    if depth > max_depth:
        raise DepthExhausted(f"tower search exceeded depth {max_depth}")
    targets = []
    cands = _candidate_targets(snap, t)
    if rng is not None:
        rng.shuffle(cands)
    for s in cands:
        tag = tag_of(s)
        if tag is None:
            continue
        if cx.hom_dim(t, snap.complex_of(s)) == 0:
            continue
        if tag is UNKNOWN:
            raise WindowExhausted(f"membership of {s} is undecidable in the window")
        if bound is not None and not tag < bound:
            return None
        targets.append((s, tag))
    if not targets:
        return None
    tau = max(tag for _, tag in targets)
    S = sorted({s for s, tag in targets if tag == tau})
    maps = _approximation(snap, t, S, rng)
    q_pieces = [s for s, _ in maps]
    Q = cx.direct_sum(*(snap.complex_of(s) for s in q_pieces))
    F = t.field
    comps = {}
    for n in t.terms:
        if Q.term(n):
            comps[n] = np.concatenate([m.f(n) for _, m in maps], axis=0)
    f = ChainMap(t, Q, comps)
    t_prime = cx.cocone(f)
    t_min, proj = cx.minimalize_with_map(t_prime)
    lower = _find(snap, t_min, tag_of, tau, depth + 1, max_depth, rng)
    if lower is None:
        return None
    a_low = lower.witness.compose(proj)  # t' -> T'
    # twist: q^n -> T'^{n+1}, the columns of a'^{n+1} on the q^n summand of t'^{n+1}
    twist = {}
    for n in Q.terms:
        if lower.total.term(n + 1):
            twist[n] = a_low.f(n + 1)[:, : Q.dim(n)]
    total = _stack(snap, lower, q_pieces, twist)
    wc = {}
    for n in t.terms:
        if not total.term(n):
            continue
        top = a_low.f(n)[:, Q.dim(n - 1):]
        bottom = f.f(n) if Q.dim(n) else F.zeros(0, t.dim(n))
        wc[n] = np.concatenate([top, bottom], axis=0)
    witness = ChainMap(t, total, wc)
    tower = Tower(snap, lower.pieces + q_pieces, lower.sizes + [len(q_pieces)], lower.tags + [tau],
                  total, t, witness)
    return tower


def default_depth(snap: Snapshot, t: Complex) -> int:
    return len(cx.decompose(t)) + (snap.window[1] - snap.window[0] + 1) + 2 * snap.width_bound + 2


def find_tower(snap: Snapshot, t, tag_of: Callable, depth: int | None = None,
               rng: random.Random | None = None, verify: bool = True) -> Tower | None:
    """A tower of t whose factors have strictly increasing tags, or None.

    ``tag_of(id)`` returns a comparable tag, None when the id is not an
    allowed factor, or UNKNOWN when membership cannot be decided. The search
    peels off the minimal approximation by the top-tag factors and recurses
    on the cocone; when the tags are Hom-ordered (no maps from lower to
    higher tags) this finds a tower whenever one exists, so None is a
    definite answer in that case.
    """
    X = snap.complex_of(t)
    t_min, proj = cx.minimalize_with_map(X)
    if depth is None:
        depth = default_depth(snap, t_min)
    tower = _find(snap, t_min, tag_of, None, 0, depth, rng)
    if tower is None:
        return None
    tower.source = X
    tower.witness = tower.witness.compose(proj)
    if verify and not cx.minimalize(cx.cone(tower.witness)).is_zero():
        raise TowerError("constructed tower is not homotopy equivalent to its object")
    return tower


# -- transformations -----------------------------------------------------------

def _permute(T: Tower, order: list[int], sizes: list[int], tags: list) -> Tower:
    """Reorder pieces; returns a tower with conjugated differential and updated witness."""
    snap = T.snapshot
    F = T.total.field
    _, blocks = _piece_blocks(snap, T.pieces)
    perm = {}
    for n, rng in blocks.items():
        idx = []
        for p in order:
            idx.extend(range(*rng[p]))
        perm[n] = idx
    terms = {n: sum((snap.complex_of(T.pieces[p]).term(n) for p in order), ()) for n in T.total.terms}
    diff = {n: T.total.d(n)[np.ix_(perm[n + 1], perm[n])] for n in T.total.diff}
    total = Complex(T.total.algebra, terms, diff, check=False)
    P = ChainMap(T.total, total, {n: F.eye(T.total.dim(n))[perm[n], :] for n in T.total.terms})
    witness = P.compose(T.witness) if T.witness is not None else None
    return Tower(snap, [T.pieces[p] for p in order], sizes, tags, total, T.source, witness, list(T.swaps))


def _kill_gluing(T: Tower, j: int) -> Tower:
    """Gauge transform removing the block gluing factor j+1 onto factor j."""
    snap = T.snapshot
    F = T.total.field
    dim = snap.hom(T.factor(j + 1), T.factor(j).suspend(1))
    if dim != 0:
        raise SwapRefused(j, dim)
    groups = T.groups()
    P_ids, Q_ids = groups[j], groups[j + 1]
    Pc = T._restrict(P_ids)
    Qc = T._restrict(Q_ids)
    idx_p = T._degree_indices(P_ids)
    idx_q = T._degree_indices(Q_ids)
    SP = Pc.shift(1)
    u = {}
    for n in Qc.terms:
        if SP.term(n):
            u[n] = T.total.d(n)[np.ix_(idx_p[n + 1], idx_q[n])]
    umap = ChainMap(Qc, SP, u)
    if not umap.is_chain_map():
        raise TowerError("gluing block is not a chain map; tower is corrupt")
    k = cx.hom_space(Qc, SP).nullhomotopy(umap)
    if k is None:
        raise TowerError("gluing map is not nullhomotopic although Hom vanishes")
    T_tot = T.total
    G, Ginv = {}, {}
    for n in T_tot.terms:
        g = F.eye(T_tot.dim(n))
        gi = F.eye(T_tot.dim(n))
        if n in k and len(idx_p.get(n, [])) and len(idx_q.get(n, [])):
            # h = -k, G = I + H
            g[np.ix_(idx_p[n], idx_q[n])] = -k[n]
            gi[np.ix_(idx_p[n], idx_q[n])] = k[n]
        G[n], Ginv[n] = g, gi
    diff = {}
    for n in T_tot.diff:
        diff[n] = linalg.matmul(linalg.matmul(G[n + 1], T_tot.d(n), F), Ginv[n], F)
    total = Complex(T_tot.algebra, dict(T_tot.terms), diff, check=False)
    Gmap = ChainMap(T_tot, total, G)
    witness = Gmap.compose(T.witness) if T.witness is not None else None
    for n in Qc.terms:
        if idx_p.get(n + 1) and idx_q.get(n):
            if not linalg.is_zero(total.d(n)[np.ix_(idx_p[n + 1], idx_q[n])]):
                raise TowerError("gauge transformation failed to remove the gluing")
    swaps = list(T.swaps) + [(str(T.factor(j)), str(T.factor(j + 1)), dim)]
    return Tower(snap, list(T.pieces), list(T.sizes), list(T.tags), total, T.source, witness, swaps)


def swap_adjacent(T: Tower, j: int) -> Tower:
    """Exchange factors j and j+1 (0-based); needs hom(q_{j+1}, Σ q_j) = 0."""
    if not 0 <= j < len(T) - 1:
        raise IndexError(f"no adjacent pair at position {j}")
    G = _kill_gluing(T, j)
    groups = G.groups()
    order = [p for g in groups[:j] for p in g] + groups[j + 1] + groups[j] + [p for g in groups[j + 2:] for p in g]
    sizes = list(G.sizes)
    sizes[j], sizes[j + 1] = sizes[j + 1], sizes[j]
    tags = list(G.tags)
    tags[j], tags[j + 1] = tags[j + 1], tags[j]
    return _permute(G, order, sizes, tags)


def coalesce(T: Tower, j: int, tag=None) -> Tower:
    """Merge factors j and j+1 into their direct sum; needs hom(q_{j+1}, Σ q_j) = 0."""
    if not 0 <= j < len(T) - 1:
        raise IndexError(f"no adjacent pair at position {j}")
    G = _kill_gluing(T, j)
    sizes = G.sizes[:j] + [G.sizes[j] + G.sizes[j + 1]] + G.sizes[j + 2:]
    if tag is None:
        tag = G.tags[j] if G.tags[j] == G.tags[j + 1] else max(G.tags[j], G.tags[j + 1])
    tags = G.tags[:j] + [tag] + G.tags[j + 2:]
    order = list(range(len(G.pieces)))
    return _permute(G, order, sizes, tags)


def split_factor(T: Tower, j: int) -> Tower:
    """Split the smallest-id summand c1 off factor j = c2 ⊕ c1, giving factors c2 then c1."""
    groups = T.groups()
    grp = groups[j]
    if len(grp) < 2:
        raise TowerError(f"factor {j} is already indecomposable")
    smallest = min(grp, key=lambda p: T.pieces[p])
    rest = [p for p in grp if p != smallest]
    order = [p for g in groups[:j] for p in g] + rest + [smallest] + [p for g in groups[j + 1:] for p in g]
    sizes = T.sizes[:j] + [len(rest), 1] + T.sizes[j + 1:]
    tags = T.tags[:j] + [T.tags[j], T.tags[j]] + T.tags[j + 1:]
    return _permute(T, order, sizes, tags)


def refine(T: Tower) -> Tower:
    """Split every factor until all factors are indecomposable."""
    j = 0
    while j < len(T):
        if T.sizes[j] > 1:
            T = split_factor(T, j)
        else:
            j += 1
    return T


def reorder(T: Tower, key: Callable[[int, Tower], object], merge_equal: bool = True) -> Tower:
    """Bubble factors into non-decreasing key order using legal swaps, then coalesce ties."""
    keys = [key(j, T) for j in range(len(T))]
    n = len(T)
    for i in range(n):
        for j in range(n - 1 - i):
            if keys[j] > keys[j + 1]:
                T = swap_adjacent(T, j)
                keys[j], keys[j + 1] = keys[j + 1], keys[j]
    if merge_equal:
        j = 0
        while j < len(T) - 1:
            if keys[j] == keys[j + 1]:
                T = coalesce(T, j, tag=T.tags[j])
                del keys[j + 1]
            else:
                j += 1
    return T


@dataclass
class Cofactor:
    j: int
    sub: Complex  # t_j
    quotient: Complex  # e_j
    tower: Tower  # tower of e_j by factors j+1..n


def truncate(T: Tower, j: int) -> Cofactor:
    """The triangle t_j -> t -> e_j, with e_j filtered by the later factors."""
    if not 0 <= j <= len(T):
        raise IndexError(f"truncation index {j} out of range 0..{len(T)}")
    groups = T.groups()
    later = [p for g in groups[j:] for p in g]
    quotient = T._restrict(later)
    sub_tower = Tower(T.snapshot, [T.pieces[p] for p in later], T.sizes[j:], T.tags[j:], quotient,
                      quotient, quotient.identity())
    return Cofactor(j, T.intermediate(j), quotient, sub_tower)


def tower_lines(T: Tower) -> list[str]:
    out = [f"factors = {len(T)}"]
    for j, (obj, tag) in enumerate(T.factors()):
        out.append(f"factor {j + 1} = {obj} ; tag {_fmt_tag(tag)}")
    for a, b, d in T.swaps:
        out.append(f"swap {a} <-> {b} ; hom = {d}")
    return out
