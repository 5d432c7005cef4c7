"""Central charges, co-stability functions and co-stability conditions.

Covers the bijection between conditions and (bounded co-t-structure,
co-stability function with the split HN property), separation, the
deformation algorithm, the actions of Σ and of the rotation-scaling group G,
chart sampling and the exhaustive scan used for the kA₂ counterexample.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import linalg
from .coslice import (TAU, CoSlicing, check_axioms, check_condition_S, coslicing_text, epsilon0,
                      induced_cotstructure, metric, parse_coslicing, per_id_distance, phase_eq,
                      phase_lt, phase_tag)
from .cotstruct import CoTStructure, from_coheart
from .field import QQ
from .report import Report
from .snapshot import FormalObject, IndecId, Snapshot, build_snapshot
from .textio import format_sections, parse_number, parse_sections
from .towers import SwapRefused, Tower, find_tower, refine, reorder

CONDITION_SCHEMA = "costab-condition/1"
CHARGE_SCHEMA = "costab-charge/1"
CHARGE_TOL = 1e-12


class PhaseUndefined(ValueError):
    """Zero charge, or a charge outside the strict upper half plane."""


class PackRefused(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DeformRefused(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DeformFailure(RuntimeError):
    """An internal step of the deformation went wrong; this would contradict the theory."""


# -- charges -------------------------------------------------------------------

def arg_phase(z: complex) -> float:
    """arg(z)/π in (-1, 1]."""
    if z == 0:
        raise PhaseUndefined("phase of zero is undefined")
    return cmath.phase(z) / math.pi


def phase_and_mass(z: complex) -> tuple[float, float]:
    """(φ, m) with z = m·exp(iπφ), φ in (0,1]; z must lie in the strict upper half plane."""
    z = complex(z)
    m = abs(z)
    if m == 0:
        raise PhaseUndefined("phase of zero is undefined")
    if z.imag > TAU * m:
        return cmath.phase(z) / math.pi, m
    if abs(z.imag) <= TAU * m and z.real < 0:
        return 1.0, m
    raise PhaseUndefined(f"{z} is not in the strict upper half plane")


@dataclass(frozen=True)
class CentralCharge:
    """Values on the K₀ basis [P_v]; extended additively through class vectors."""

    values: tuple

    def __call__(self, snap: Snapshot, x) -> complex:
        cls = snap.k0_class(x)
        return sum((c * v for c, v in zip(cls, self.values)), 0j)

    @classmethod
    def from_values(cls, snap: Snapshot, vals: dict) -> "CentralCharge":
        """Solve for basis values from values on ids whose classes form a K₀ basis."""
        ids = sorted(vals)
        if len(ids) != snap.k0_rank:
            raise ValueError(f"need {snap.k0_rank} classes, got {len(ids)}")
        M = QQ.matrix([[Fraction(c) for c in snap.k0_class(i)] for i in ids])
        try:
            Minv = linalg.inverse(M, QQ)
        except ZeroDivisionError:
            raise ValueError("classes do not form a basis of K₀") from None
        z = [complex(vals[i]) for i in ids]
        out = []
        for k in range(snap.k0_rank):
            out.append(sum((float(Minv[k, j]) * z[j] for j in range(len(ids))), 0j))
        return cls(tuple(out))

    def __mul__(self, c: complex) -> "CentralCharge":
        return CentralCharge(tuple(v * c for v in self.values))

    __rmul__ = __mul__

    def close_to(self, other: "CentralCharge", tol: float = CHARGE_TOL) -> bool:
        return len(self.values) == len(other.values) and all(
            abs(a - b) <= tol * max(1.0, abs(a)) for a, b in zip(self.values, other.values))


@dataclass(frozen=True)
class CoStabilityFunction:
    """Values of Z on the indecomposables of a Krull-Schmidt co-heart."""

    values: tuple  # ((IndecId, complex), ...) sorted by id

    @classmethod
    def of(cls, vals: dict) -> "CoStabilityFunction":
        return cls(tuple(sorted((i, complex(z)) for i, z in vals.items())))

    @property
    def coheart(self) -> frozenset:
        return frozenset(i for i, _ in self.values)

    def value(self, x) -> complex:
        d = dict(self.values)
        if isinstance(x, IndecId):
            return d[x]
        return sum((m * d[i] for i, m in x.items()), 0j)

    def phase(self, x) -> float:
        return phase_and_mass(self.value(x))[0]

    def mass(self, x) -> float:
        return phase_and_mass(self.value(x))[1]

    def close_to(self, other: "CoStabilityFunction", tol: float = CHARGE_TOL) -> bool:
        if self.coheart != other.coheart:
            return False
        d = dict(other.values)
        return all(abs(z - d[i]) <= tol * max(1.0, abs(z)) for i, z in self.values)


def is_semistable(Zc: CoStabilityFunction, a) -> bool:
    """All indecomposable summands share one phase."""
    obj = FormalObject([a]) if isinstance(a, IndecId) else a
    if obj.is_zero():
        raise ValueError("the zero object is not semistable")
    ps = [Zc.phase(i) for i in obj.ids()]
    return all(phase_eq(p, ps[0]) for p in ps)


def split_hn_witness(snap: Snapshot, Zc: CoStabilityFunction):
    """(a1, a2, dim) with φ(a1) < φ(a2) and Hom(a1, a2) != 0, or None."""
    for a1, a2 in itertools.permutations(sorted(Zc.coheart), 2):
        if phase_lt(Zc.phase(a1), Zc.phase(a2)):
            h = snap.hom(a1, a2)
            if h:
                return a1, a2, h
    return None


def check_split_HN(snap: Snapshot, Zc: CoStabilityFunction) -> Report:
    rep = Report("split-hn", {"coheart": " ".join(map(str, sorted(Zc.coheart)))})
    bad = []
    for i, z in Zc.values:
        try:
            phase_and_mass(z)
        except PhaseUndefined as exc:
            bad.append(f"{i}: {exc}")
    rep.add("halfplane", not bad, "; ".join(bad))
    if bad:
        return rep
    w = split_hn_witness(snap, Zc)
    rep.add("i", w is None, "" if w is None else f"hom({w[0]},{w[1]}) = {w[2]} with phases "
            f"{Zc.phase(w[0]):.6g} < {Zc.phase(w[1]):.6g}")
    rep.info("ii", "vacuous: the co-heart is Krull-Schmidt")
    return rep


def hn_decompose(Zc: CoStabilityFunction, a) -> list[tuple[float, FormalObject]]:
    """Group the summands of a by phase, phases ascending."""
    obj = FormalObject([a]) if isinstance(a, IndecId) else a
    groups: list[tuple[float, list]] = []
    for i, m in sorted(obj.items(), key=lambda im: Zc.phase(im[0])):
        p = Zc.phase(i)
        if groups and phase_eq(groups[-1][0], p):
            groups[-1][1].extend([i] * m)
        else:
            groups.append((p, [i] * m))
    return [(p, FormalObject(ids)) for p, ids in groups]


# -- conditions ----------------------------------------------------------------

@dataclass(frozen=True)
class CoStabilityCondition:
    Z: CentralCharge
    Q: CoSlicing

    def same_as(self, other: "CoStabilityCondition", tol: float = CHARGE_TOL) -> bool:
        return self.Q.same_as(other.Q) and self.Z.close_to(other.Z, tol)


def charge_mismatches(snap: Snapshot, C: CoStabilityCondition) -> list[str]:
    bad = []
    for q in C.Q.base_ids():
        z = C.Z(snap, q)
        phi = C.Q.phase_of(q)
        if abs(z) == 0:
            bad.append(f"Z({q}) = 0")
            continue
        diff = (arg_phase(z) - float(phi) + 1) % 2 - 1
        if abs(diff) >= TAU:
            bad.append(f"arg Z({q})/π = {arg_phase(z):.12g} but phase {float(phi):.12g}")
    return bad


def check_condition(snap: Snapshot, C: CoStabilityCondition, axioms: bool = True) -> Report:
    """Co-slicing axioms plus Z(q) = m·exp(iπφ), m > 0, on every slice."""
    rep = Report("condition", {"window": f"{snap.window[0]} {snap.window[1]}",
                               "field": snap.algebra.field.name})
    bad = charge_mismatches(snap, C)
    rep.add("charge", not bad, "; ".join(bad))
    if axioms:
        rep.extend(check_axioms(snap, C.Q), "axiom ")
    return rep


def is_valid(snap: Snapshot, C: CoStabilityCondition) -> bool:
    return not charge_mismatches(snap, C) and check_axioms(snap, C.Q).ok


def pack(snap: Snapshot, P: CoTStructure, Zc: CoStabilityFunction) -> CoStabilityCondition:
    """Condition with Q(φ) = semistables of phase φ in the co-heart, extended by Σ."""
    C = P.coheart if P.coheart is not None else P.derived_coheart()
    if frozenset(C) != Zc.coheart:
        raise PackRefused("co-stability function lives on a different co-heart")
    rep = check_split_HN(snap, Zc)
    if not rep.ok:
        w = split_hn_witness(snap, Zc)
        raise PackRefused("split Harder-Narasimhan property fails: " + rep.failed[0].detail, w)
    Q = CoSlicing.from_slices([(Zc.phase(c), [c]) for c in sorted(C)])
    Z = CentralCharge.from_values(snap, dict(Zc.values))
    return CoStabilityCondition(Z, Q)


def unpack(snap: Snapshot, C: CoStabilityCondition) -> tuple[CoTStructure, CoStabilityFunction]:
    """(Q(≤1), Q(>1)) and Z restricted to the co-heart Q((0,1])."""
    P = induced_cotstructure(snap, C.Q)
    Zc = CoStabilityFunction.of({c: C.Z(snap, c) for c in C.Q.base_ids()})
    return P, Zc


@dataclass
class Separation:
    ok: bool
    distance: float
    equal: bool
    detail: str = ""


def separation_check(snap: Snapshot, C1: CoStabilityCondition, C2: CoStabilityCondition) -> Separation:
    """If the charges agree and d < 1/2 the co-slicings must coincide."""
    if C1.Z != C2.Z:
        raise ValueError("separation compares conditions with identical charges")
    dist = metric(snap, C1.Q, C2.Q)
    eq = C1.Q.same_as(C2.Q)
    bad = dist.value is not None and dist.value < 0.5 and not eq
    return Separation(not bad, float(dist), eq,
                      f"d = {float(dist):.6g} < 1/2 with distinct co-slicings" if bad else "")


# -- deformation ---------------------------------------------------------------

def inequality_witness(snap: Snapshot, C: CoStabilityCondition, W: CentralCharge, eps: float,
                       multiplicity: int = 4):
    """A single-slice sum q with |W(q) - Z(q)| ≥ sin(πε)|Z(q)|, or None.

    Charges of one slice are collinear, so the bound for sums follows from the
    bound for summands; sums are still checked up to ``multiplicity``.
    Near-equality within CHARGE_TOL counts as a failure of the strict bound.
    """
    s = math.sin(math.pi * eps)
    for _, ids in C.Q.slices().items():
        for n in range(1, multiplicity + 1):
            for combo in itertools.combinations_with_replacement(ids, n):
                q = FormalObject(combo)
                z, w = C.Z(snap, q), W(snap, q)
                if abs(w - z) >= s * abs(z) - CHARGE_TOL * abs(z):
                    return q, abs(w - z), s * abs(z)
    return None


def deformed_coslicing(snap: Snapshot, C: CoStabilityCondition, W: CentralCharge,
                       rational_denominator: int | None = None) -> CoSlicing:
    """R with ψ(q) = φ(q) + arg(W(q)/Z(q))/π for each slice indecomposable q.

    With ``rational_denominator`` N, a phase within TAU of a fraction with
    denominator at most N is replaced by that fraction. Off by default.
    """
    items = []
    for q in C.Q.base_ids():
        z, w = C.Z(snap, q), W(snap, q)
        turn = cmath.phase(w / z) / math.pi
        phi = C.Q.phase_of(q)
        psi = phi if turn == 0 else phi + turn
        if rational_denominator and not isinstance(psi, Fraction):
            f = Fraction(psi).limit_denominator(rational_denominator)
            if abs(float(f) - psi) <= TAU:
                psi = f
        items.append((psi, [q]))
    return CoSlicing.from_slices(items)


_TOWERS: dict = {}


def _q_tower(snap: Snapshot, Q: CoSlicing, t: FormalObject) -> Tower:
    key = (id(snap), Q, t)
    hit = _TOWERS.get(key)
    if hit is not None and hit[0] is snap:
        return hit[1]
    T = find_tower(snap, t, phase_tag(Q))
    if T is None:
        raise DeformFailure(f"{t} has no tower for the input co-slicing")
    T = refine(T)
    _TOWERS[key] = (snap, T)
    return T


def reordered_tower(snap: Snapshot, Q: CoSlicing, R: CoSlicing, t) -> Tower:
    """Tower of t for Q, refined, reordered by R-phases with legal swaps, ties merged."""
    T = _q_tower(snap, Q, FormalObject([t]) if isinstance(t, IndecId) else t)
    try:
        T = reorder(T, lambda j, T: R.phase_of(T.factor(j).ids()[0]), merge_equal=True)
    except SwapRefused as exc:
        raise DeformFailure(f"illegal swap while reordering the tower of {t}: {exc}") from exc
    tags = [R.phase_of(T.pieces[g[0]]) for g in T.groups()]
    return replace(T, tags=tags)


@dataclass
class Deformation:
    condition: CoStabilityCondition
    distance: float
    report: Report
    towers: dict = field(default_factory=dict)
    swaps: int = 0


def deform(snap: Snapshot, C: CoStabilityCondition, W: CentralCharge, eps: float,
           verify: bool = True, rational_denominator: int | None = None) -> Deformation:
    """Deform (Z, Q) to (W, R) with d(Q, R) < ε, checking every step."""
    S = check_condition_S(snap, C.Q)
    if not S:
        a, b, h = S.witness
        raise DeformRefused(f"condition (S) fails: hom({a},{b}) = {h} inside one slice", S.witness)
    e0 = epsilon0(C.Q)
    if not 0 < eps <= e0:
        raise DeformRefused(f"ε = {eps} must lie in (0, ε₀] with ε₀ = {e0:.9g}, "
                            "the bound below which each closed interval of length 2ε₀ "
                            "meets at most one slice phase")
    w = inequality_witness(snap, C, W, eps)
    if w is not None:
        raise DeformRefused(f"|W(q) - Z(q)| = {w[1]:.12g} is not below sin(πε)|Z(q)| = {w[2]:.12g} "
                            f"for q = {w[0]}", w[0])
    R = deformed_coslicing(snap, C, W, rational_denominator)
    out = CoStabilityCondition(W, R)
    rep = Report("deform", {"window": f"{snap.window[0]} {snap.window[1]}", "eps": f"{eps:.9g}",
                            "slices": R.describe()})
    dist = float(metric(snap, C.Q, R))
    towers, swaps = {}, 0
    if verify:
        bad = []
        # indecomposables, plus sums inside one slice whose towers need reordering
        objects = [FormalObject([t]) for t in snap.ids]
        for phi in C.Q.phases:
            for k in range(snap.window[0], snap.window[1] + 1):
                ids = C.Q.slice_ids(phi + k, snap)
                objects += [FormalObject(p) for p in itertools.combinations(ids, 2)]
        for t in objects:
            T = reordered_tower(snap, C.Q, R, t)
            if any(not phase_lt(a, b) for a, b in zip(T.tags, T.tags[1:])) or not T.validate():
                bad.append(str(t))
            towers[t] = T
            swaps += len(T.swaps)
            if any(d != 0 for _, _, d in T.swaps):
                raise DeformFailure(f"swap with nonzero Hom recorded in the tower of {t}")
        rep.add("towers", not bad, "not phase-ascending: " + ", ".join(bad) if bad else
                f"{len(towers)} towers reordered with {swaps} legal moves")
        rep.extend(check_condition(snap, out), "")
        S2 = check_condition_S(snap, R)
        rep.add("S", bool(S2), "" if S2 else f"hom({S2.witness[0]},{S2.witness[1]}) != 0")
        rep.add("distance", dist < eps, f"d(Q,R) = {dist:.12g}, ε = {eps:.12g}")
        if not rep.ok:
            raise DeformFailure("deformed condition failed verification:\n" + rep.render())
    return Deformation(out, dist, rep, towers, swaps)


# -- group actions -------------------------------------------------------------

@dataclass(frozen=True)
class GElement:
    """Rotation-scaling by λ together with the phase translation f(x) = x + a."""

    lam: complex
    a: float

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("λ must be nonzero")
        diff = (arg_phase(self.lam) - float(self.a) + 1) % 2 - 1
        if abs(diff) > TAU:
            raise ValueError(f"a = {self.a} is not congruent to arg(λ)/π = {arg_phase(self.lam)} mod 2")

    @classmethod
    def from_polar(cls, s: float, a: float) -> "GElement":
        return cls(s * cmath.exp(1j * math.pi * a), a)

    def compose(self, other: "GElement") -> "GElement":
        """Right action: C·(g·h) = (C·g)·h."""
        return GElement(self.lam * other.lam, self.a + other.a)

    def inverse(self) -> "GElement":
        return GElement(1 / self.lam, -self.a)


def act_shift(k: int, C: CoStabilityCondition) -> CoStabilityCondition:
    """Σ^k·(Z, Q) = (Z∘[Σ^k]⁻¹, Σ^k Q); [Σ] acts on K₀ by -1."""
    return CoStabilityCondition(C.Z * ((-1) ** (k % 2)), C.Q.suspend(k))


def act_g(C: CoStabilityCondition, g: GElement) -> CoStabilityCondition:
    """(Z, Q)·(T, f) = (T⁻¹∘Z, Q'') with Q''(φ) = Q(φ + a)."""
    return CoStabilityCondition(C.Z * (1 / g.lam), C.Q.translate(g.a))


def act(F, C: CoStabilityCondition) -> CoStabilityCondition:
    if isinstance(F, GElement):
        return act_g(C, F)
    return act_shift(int(F), C)


# -- chart sampling ------------------------------------------------------------

def perturb(snap: Snapshot, C: CoStabilityCondition, radius: float, rng: random.Random) -> CentralCharge:
    """W with W(q) = Z(q)(1 + r u), |u| < 1 uniform in the disc, for each base slice id q."""
    vals = {}
    for q in C.Q.base_ids():
        u = cmath.rect(math.sqrt(rng.random()), 2 * math.pi * rng.random())
        vals[q] = C.Z(snap, q) * (1 + radius * u)
    return CentralCharge.from_values(snap, vals)


@dataclass
class ChartSample:
    n: int
    dimension: int
    rows: list  # (W values, d)
    report: Report

    def csv(self) -> str:
        k = self.n
        head = ["sample"] + [f"{p}_{c}" for c in range(k) for p in ("re", "im")] + ["d"]
        lines = [",".join(head)]
        for s, (vals, dist) in enumerate(self.rows):
            cells = [str(s)]
            for v in vals:
                cells += [repr(v.real), repr(v.imag)]
            cells.append(repr(dist))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def chart_sample(snap: Snapshot, C: CoStabilityCondition, radius: float, count: int,
                 seed: int = 0, eps: float | None = None, verify: bool = True) -> ChartSample:
    e0 = epsilon0(C.Q)
    eps = e0 if eps is None else eps
    bound = math.sin(math.pi * eps)
    if radius >= bound:
        warnings.warn(f"sampling radius {radius} clipped below sin(πε) = {bound:.9g}")
        radius = bound * (1 - 1e-6)
    rng = random.Random(seed)
    rows, conds, bad = [], [], []
    for _ in range(count):
        W = perturb(snap, C, radius, rng)
        res = deform(snap, C, W, eps, verify=verify)
        rows.append((W.values, res.distance))
        conds.append(res.condition)
        if not res.distance < eps:
            bad.append(res.distance)
    rep = Report("chart", {"n": snap.k0_rank, "dimension": 2 * snap.k0_rank,
                           "radius": f"{radius:.9g}", "eps": f"{eps:.9g}", "samples": count})
    distinct = all(not conds[i].Z.close_to(conds[j].Z, 0) or conds[i].same_as(conds[j])
                   for i in range(len(conds)) for j in range(i))
    rep.add("injective", distinct)
    rep.add("continuity", not bad, f"d ≥ ε in {len(bad)} samples" if bad else "")
    return ChartSample(snap.k0_rank, 2 * snap.k0_rank, rows, rep)


# -- exhaustive scan -----------------------------------------------------------

@dataclass
class Scan:
    exists: bool | None  # None: inconclusive
    candidates: int
    near: int
    found: list
    trace: list


def _forced(phi, target) -> float | None:
    """The unique element of target + 2ℤ within (φ - 1/2, φ + 1/2), if any."""
    m = round((float(phi) - target) / 2)
    for k in (m - 1, m, m + 1):
        psi = target + 2 * k
        if abs(psi - float(phi)) < 0.5:
            return psi
    return None


def _fmt(x) -> str:
    return f"{float(x):.6g}"


def counterexample_scan(snap: Snapshot, C: CoStabilityCondition, W: CentralCharge,
                        span: int = 2) -> Scan:
    """Search all co-slicings R compatible with W for one with d(Q, R) < 1/2 and (W, R) valid.

    A candidate assigns to a set of orbits phases in arg(W(o@0))/π + 2m with
    |m| ≤ span. Validity of (W, R) needs exactly these phases, and for a valid
    R the phase formula for d is exact below 1/2, so the search is complete
    for the given orbit catalog.
    """
    trace = []
    Q = C.Q
    trace.append("Q: " + Q.describe())
    targets = {}
    for o in snap.orbits:
        w = W(snap, IndecId(o, 0))
        if abs(w) > TAU:
            targets[o] = arg_phase(w)
    forced = {}
    for q in Q.base_ids():
        phi = Q.phase_of(q)
        psi = None
        if q.orbit in targets:
            t = targets[q.orbit] + (q.shift % 2)  # W(Σ^s o) = (-1)^s W(o)
            psi = _forced(phi, t)
        forced[q] = psi
        if psi is None:
            trace.append(f"{q}: no phase within 1/2 of {_fmt(phi)} is compatible with W({q}); "
                         "d < 1/2 is impossible")
        else:
            trace.append(f"{q}: W({q}) = {W(snap, q):.6g} forces {q} into R({_fmt(psi)})")
    trace.append("d(Q,R) < 1/2 forces R((0,1]) to have the same indecomposables as Q((0,1]): "
                 + " ".join(map(str, Q.base_ids())))
    for q1, q2 in itertools.permutations(Q.base_ids(), 2):
        p1, p2 = forced[q1], forced[q2]
        if p1 is not None and p2 is not None and phase_lt(p1, p2) and snap.hom(q1, q2):
            trace.append(f"contradiction: hom({q1},{q2}) = {snap.hom(q1, q2)} but "
                         f"{_fmt(p1)} < {_fmt(p2)}, against Hom vanishing from lower to higher phase")
    count, near, found = 0, 0, []
    orbits = sorted(targets)
    for r in range(1, len(orbits) + 1):
        for sub in itertools.combinations(orbits, r):
            for ms in itertools.product(range(-span, span + 1), repeat=r):
                count += 1
                R = CoSlicing.from_slices([(targets[o] + 2 * m, [IndecId(o, 0)]) for o, m in zip(sub, ms)])
                if per_id_distance(Q, R) >= 0.5:
                    continue
                near += 1
                cand = CoStabilityCondition(W, R)
                if is_valid(snap, cand):
                    found.append(cand)
                    trace.append(f"valid candidate R: {R.describe()} with d = {_fmt(per_id_distance(Q, R))}")
                else:
                    rep = check_condition(snap, cand)
                    why = "; ".join(f"{v.check}: {v.detail}" for v in rep.failed)
                    trace.append(f"candidate R: {R.describe()} rejected ({why})")
    trace.append(f"candidates = {count}, within 1/2 = {near}, valid = {len(found)}")
    if found:
        exists = True
    elif snap.enumeration_complete:
        exists = False
    else:
        exists = None
        trace.append("orbit catalog incomplete at this width: inconclusive")
    return Scan(exists, count, near, found, trace)


# -- worked data ---------------------------------------------------------------

def _ids(snap: Snapshot, *names):
    return [IndecId(n, 0) for n in names]


def condition_from_coheart(snap: Snapshot, vals: dict) -> CoStabilityCondition:
    """pack applied to the co-t-structure generated by the keys of ``vals``."""
    P = from_coheart(snap, frozenset(vals))
    return pack(snap, P, CoStabilityFunction.of(vals))


def counterexample_data(eps: float, snap: Snapshot | None = None):
    """kA₂ with Q(1/2) = add(x, y), Z(x) = Z(y) = i, and W moving y to phase 1/2 + ε."""
    snap = snap or build_snapshot("kA2", 2, (-2, 2))
    x, y = _ids(snap, "x", "y")
    C = condition_from_coheart(snap, {x: 1j, y: 1j})
    W = CentralCharge.from_values(snap, {x: 1j, y: math.cos(math.pi * eps) *
                                         cmath.exp(1j * math.pi * (0.5 + eps))})
    return snap, C, W


def good_kA2_data(snap: Snapshot | None = None):
    """kA₂ with Q = {1/4: y, 3/4: x}; condition (S) holds."""
    snap = snap or build_snapshot("kA2", 2, (-2, 2))
    x, y = _ids(snap, "x", "y")
    return snap, condition_from_coheart(snap, {x: cmath.exp(3j * math.pi / 4), y: cmath.exp(1j * math.pi / 4)})


def dual_condition(snap: Snapshot, z0: complex, phi0: float) -> CoStabilityCondition:
    """The condition (z0, φ0): Q(φ0) = add(c) and Z(c) = z0."""
    c = IndecId("c", 0)
    if abs((arg_phase(z0) - phi0 + 1) % 2 - 1) > TAU:
        raise ValueError("z0 must equal s·exp(iπφ0) with s > 0")
    return CoStabilityCondition(CentralCharge.from_values(snap, {c: z0}),
                                CoSlicing.from_slices([(phi0, [c])]))


def dual_coordinates(snap: Snapshot, C: CoStabilityCondition) -> tuple[complex, float]:
    c = IndecId("c", 0)
    return C.Z(snap, c), float(C.Q.phase_of(c))


def random_condition(snap: Snapshot, rng: random.Random, cohearts: list, tries: int = 100):
    """(P, Zc, C) for a random co-heart and random phases satisfying split HN."""
    for _ in range(tries):
        P = rng.choice(cohearts)
        vals = {c: rng.uniform(0.2, 3.0) * cmath.exp(1j * math.pi * rng.uniform(0.02, 1.0))
                for c in sorted(P.coheart)}
        Zc = CoStabilityFunction.of(vals)
        if split_hn_witness(snap, Zc) is None:
            return P, Zc, pack(snap, P, Zc)
    raise RuntimeError("no split HN co-stability function found")


# -- files ---------------------------------------------------------------------

def condition_text(snap: Snapshot, C: CoStabilityCondition) -> str:
    charge = charge_text(snap, C.Z).split("[charge]", 1)[1].strip().splitlines()
    body = coslicing_text(C.Q).split("[slices]", 1)[1].strip().splitlines()
    return format_sections([("meta", [f"schema = {CONDITION_SCHEMA}"]), ("charge", charge),
                            ("slices", body)], header="co-stability condition")


def charge_text(snap: Snapshot, Z: CentralCharge) -> str:
    charge = [f"{b} = {v.real!r} {v.imag!r}" for b, v in zip(snap.k0_basis, Z.values)]
    return format_sections([("meta", [f"schema = {CHARGE_SCHEMA}"]), ("charge", charge)],
                           header="central charge on the K0 basis: re im")


def _parse_charge(snap: Snapshot, s, path) -> CentralCharge:
    kv = s.keyvalues("charge")
    vals = []
    for b in snap.k0_basis:
        if b not in kv:
            raise s.error(f"missing charge value for {b}")
        no, v = kv[b]
        parts = v.split()
        if len(parts) != 2:
            raise s.error(f"expected 're im' for {b}", no)
        vals.append(complex(float(parse_number(parts[0], no, path)), float(parse_number(parts[1], no, path))))
    return CentralCharge(tuple(vals))


def parse_charge(snap: Snapshot, text: str, path: str | None = None) -> CentralCharge:
    """A charge file, or the charge of a condition file."""
    s = parse_sections(text, path)
    schema = s.keyvalues("meta").get("schema", (None, None))[1]
    if schema not in (CHARGE_SCHEMA, CONDITION_SCHEMA):
        raise s.error(f"expected schema {CHARGE_SCHEMA}")
    return _parse_charge(snap, s, path)


def load_charge(snap: Snapshot, path) -> CentralCharge:
    p = Path(path)
    return parse_charge(snap, p.read_text(encoding="utf-8"), str(p))


def parse_condition(snap: Snapshot, text: str, path: str | None = None) -> CoStabilityCondition:
    s = parse_sections(text, path)
    meta = s.keyvalues("meta")
    if meta.get("schema", (None, None))[1] != CONDITION_SCHEMA:
        raise s.error(f"expected schema {CONDITION_SCHEMA}")
    Z = _parse_charge(snap, s, path)
    if "slices" in s:
        lines = [f"[meta]\nschema = costab-coslicing/1\n[slices]"] + [t for _, t in s.get("slices")]
        Q = parse_coslicing("\n".join(lines), path)
    elif "coslicing" in meta:
        base = Path(path).parent if path else Path(".")
        Q = parse_coslicing((base / meta["coslicing"][1]).read_text(encoding="utf-8"),
                            str(base / meta["coslicing"][1]))
    else:
        raise s.error("missing [slices] section or coslicing reference")
    return CoStabilityCondition(Z, Q)


def save_condition(snap: Snapshot, C: CoStabilityCondition, path) -> None:
    Path(path).write_text(condition_text(snap, C), encoding="utf-8")


def load_condition(snap: Snapshot, path) -> CoStabilityCondition:
    p = Path(path)
    return parse_condition(snap, p.read_text(encoding="utf-8"), str(p))
