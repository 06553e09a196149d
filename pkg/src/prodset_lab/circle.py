"""Rank-2 free group acting on the circle: an exact-rational rotation paired
with a tangent-chart north-south map, on finite unions of closed arcs.

The generator a rotates by a rational angle alpha (stored exactly, so pure
rotations never drift); b applies T(x) = atan(lambda * tan(pi (x - x_plus)))/pi
+ x_plus, an orientation-preserving homeomorphism fixing x_plus (attracting)
and its antipode x_minus (repelling). Witness searches run in fast float
arithmetic; every witness that is reported has been re-verified by outward-
rounded interval evaluation of arc endpoints with an explicit margin, and
points within the margin of an arc endpoint are flagged, never classified.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import (
    CircleCoverageError,
    DegenerateInputError,
    WitnessSearchError,
)
from .groups import FreeGroup
from .intervals import Interval, PrecisionError, atan_over_pi, tan_pi
from .setcalc import FiniteWindowSet

F2 = FreeGroup(2)

DEFAULT_MARGIN = 1e-9


def golden_rotation(min_denominator: int = 10**6) -> Fraction:
    """Continued-fraction convergent of (sqrt(5)-1)/2 with denominator at
    least ``min_denominator`` (a ratio of consecutive Fibonacci numbers)."""
    a, b = 1, 1
    while b < min_denominator:
        a, b = b, a + b
    return Fraction(a, b)


# ---------------------------------------------------------------------------
# arc unions


class ArcUnion:
    """Finite union of closed arcs, stored as (start, length) pairs with
    start in [0,1); overlapping or touching input arcs are merged. Endpoints
    may be Fractions (kept exact) or floats."""

    __slots__ = ("arcs",)

    def __init__(self, arcs: Iterable = ()):
        items = []
        for s, L in arcs:
            if L < 0 or L > 1:
                raise ValueError(f"arc length {L!r} outside [0, 1]")
            if L == 1:
                self.arcs = ((type(L)(0) if isinstance(L, Fraction) else 0.0, L),)
                return
            items.append((s % 1, L))
        items.sort(key=lambda p: (float(p[0]), float(p[1])))
        merged: list = []
        for s, L in items:
            if merged:
                ps, pL = merged[-1]
                if float(s) <= float(ps) + float(pL):
                    new_end = max(float(ps) + float(pL), float(s) + float(L))
                    merged[-1] = (ps, new_end - float(ps))
                    continue
            merged.append((s, L))
        if len(merged) >= 2:
            fs, fL = merged[0]
            ls, lL = merged[-1]
            if float(ls) + float(lL) >= 1 + float(fs):
                new_len = float(fs) + float(fL) + 1 - float(ls)
                merged = merged[1:-1] + [(ls, new_len)]
        if merged and float(merged[0][1]) >= 1:
            merged = [(0.0, 1.0)]
        self.arcs = tuple(merged)

    @classmethod
    def from_endpoint_pairs(cls, pairs: Iterable) -> "ArcUnion":
        """Arcs given as (start, end) traversed counterclockwise."""
        arcs = []
        for s, e in pairs:
            length = (e - s) % 1
            arcs.append((s, length))
        return cls(arcs)

    def endpoint_pairs(self) -> tuple:
        return tuple((s, s + L) for s, L in self.arcs)

    def is_empty(self) -> bool:
        return not self.arcs

    def is_full(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0][1] == 1

    def total_length(self):
        if not self.arcs:
            return Fraction(0)
        total = self.arcs[0][1]
        for _, L in self.arcs[1:]:
            total = total + L
        return total

    def shift(self, delta) -> "ArcUnion":
        """Rotate every arc by delta (exact when both sides are rational)."""
        return ArcUnion(tuple(((s + delta) % 1, L) for s, L in self.arcs))

    def contains(self, x: float, margin: float = 0.0) -> str:
        """"in", "out", or "ambiguous" (within ``margin`` of an endpoint)."""
        x = float(x) % 1
        outside = 0.5
        for s, L in self.arcs:
            sf, Lf = float(s), float(L)
            d = (x - sf) % 1
            if d <= Lf:
                if min(d, Lf - d) >= margin:
                    return "in"
                return "ambiguous"
            outside = min(outside, d - Lf, 1 - d)
        return "out" if outside >= margin else ("ambiguous" if self.arcs else "out")

    def complement(self) -> "ArcUnion":
        """Closure of the complementary gaps."""
        if not self.arcs:
            return ArcUnion(((Fraction(0), Fraction(1)),))
        if self.is_full():
            return ArcUnion(())
        gaps = []
        n = len(self.arcs)
        for i, (s, L) in enumerate(self.arcs):
            end = (s + L) % 1
            nxt = self.arcs[(i + 1) % n][0]
            gap_len = (nxt - end) % 1
            if n == 1:
                gap_len = 1 - L
            gaps.append((end, gap_len))
        return ArcUnion(tuple(gaps))

    def distance_from_point(self, x: float) -> float:
        """Circular distance from x to the union (0 if inside)."""
        x = float(x) % 1
        best = 0.5
        for s, L in self.arcs:
            d = (x - float(s)) % 1
            if d <= float(L):
                return 0.0
            best = min(best, d - float(L), 1 - d)
        return best

    def interior_radius_at(self, x: float) -> float | None:
        """Distance from x to the boundary of the arc containing it."""
        x = float(x) % 1
        for s, L in self.arcs:
            d = (x - float(s)) % 1
            if d <= float(L):
                return min(d, float(L) - d)
        return None

    def contained_in(self, other: "ArcUnion", margin: float = 0.0) -> bool:
        """Float check: every arc fits inside one arc of ``other`` with the
        given clearance."""
        for s, L in self.arcs:
            sf, Lf = float(s), float(L)
            ok = False
            for os, oL in other.arcs:
                osf, oLf = float(os), float(oL)
                if oLf >= 1:
                    ok = True
                    break
                d = (sf - osf) % 1
                if d >= margin and d + Lf <= oLf - margin:
                    ok = True
                    break
            if not ok:
                return False
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, ArcUnion) and self.arcs == other.arcs

    def __repr__(self) -> str:
        return f"ArcUnion({self.arcs!r})"


def arcs_from_lines(text: str) -> ArcUnion:
    """Fixture format: one "l,r" pair per line (values parsed exactly)."""
    pairs = []
    for line in text.split("\n"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        l_str, r_str = line.split(",")
        pairs.append((Fraction(l_str), Fraction(r_str)))
    return ArcUnion.from_endpoint_pairs(pairs)


# ---------------------------------------------------------------------------
# the dynamical system


@dataclass(frozen=True)
class CircleSystem:
    """Rotation by ``alpha`` (generator a) and north-south map (generator b)
    with attractor ``x_plus``, repeller at the antipode, contraction factor
    ``contraction`` in the tangent chart."""

    alpha: Fraction
    contraction: float = 0.5
    x_plus: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.alpha, Fraction):
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not isinstance(self.x_plus, Fraction):
            object.__setattr__(self, "x_plus", Fraction(self.x_plus))
        object.__setattr__(self, "x_plus", self.x_plus % 1)
        if not 0 < self.contraction < 1:
            raise ValueError("contraction must lie in (0, 1)")

    @property
    def x_minus(self) -> Fraction:
        return (self.x_plus + Fraction(1, 2)) % 1

    # -- float path (search) -------------------------------------------------

    def rotate_point(self, x: float, sign: int = 1) -> float:
        return (x + sign * float(self.alpha)) % 1

    def ns_point(self, x: float, inverse: bool = False) -> float:
        c = (x - float(self.x_plus)) % 1
        if c > 0.5:
            c -= 1
        if c == 0.5 or c == -0.5:
            return float(self.x_minus)
        u = math.tan(math.pi * c)
        u = u / self.contraction if inverse else u * self.contraction
        return (math.atan(u) / math.pi + float(self.x_plus)) % 1

    def act_point(self, word: tuple, x: float) -> float:
        x = float(x) % 1
        for s in reversed(word):
            if abs(s) == 1:
                x = self.rotate_point(x, 1 if s > 0 else -1)
            elif abs(s) == 2:
                x = self.ns_point(x, inverse=s < 0)
            else:
                raise ValueError(f"letter {s} outside the rank-2 alphabet")
        return x

    def act_arcs(self, word: tuple, arcs: ArcUnion) -> ArcUnion:
        """Endpoint-wise image (valid for any orientation-preserving
        homeomorphism)."""
        if arcs.is_full() or arcs.is_empty():
            return arcs
        pairs = []
        for s, L in arcs.arcs:
            img_s = self.act_point(word, float(s))
            img_e = self.act_point(word, float((s + L) % 1))
            length = (img_e - img_s) % 1 if L > 0 else 0.0
            pairs.append((img_s, length))
        return ArcUnion(tuple(pairs))

    # -- verified path --------------------------------------------------------

    def act_point_verified(self, word: tuple, x):
        """Image of a point through the word; exact Fraction while only
        rotations are involved, an outward-rounded Interval afterwards."""
        value = x if isinstance(x, (Fraction, Interval)) else Fraction(x)
        for s in reversed(word):
            if abs(s) == 1:
                delta = self.alpha if s > 0 else -self.alpha
                if isinstance(value, Fraction):
                    value = (value + delta) % 1
                else:
                    value = value + Interval.from_fraction(delta)
            else:
                value = self._ns_verified(value, inverse=s < 0)
        return value

    def _ns_verified(self, value, inverse: bool):
        if isinstance(value, Fraction):
            c = (value - self.x_plus) % 1
            if c > Fraction(1, 2):
                c -= 1
            if abs(c) == Fraction(1, 2):
                return self.x_minus  # repelling fixed point, exactly
            civ = Interval.from_fraction(c)
        else:
            civ = (value - Interval.from_fraction(self.x_plus)).shift_to_near_zero()
        u = tan_pi(civ)
        lam = Interval.point(self.contraction)
        u = u.divided_by(lam) if inverse else u * lam
        return atan_over_pi(u) + Interval.from_fraction(self.x_plus)

    def _enclose_image(self, word: tuple, x) -> Interval:
        out = self.act_point_verified(word, x)
        return Interval.from_fraction(out) if isinstance(out, Fraction) else out

    # -- sanity checks --------------------------------------------------------

    def check_north_south(self, grid: int = 512, n_max: int = 60, tol: float = 1e-9) -> None:
        """Fixed points, monotone lift on a grid, and contraction of a test
        arc into a small neighborhood of the attractor."""
        if abs(self.ns_point(float(self.x_plus)) - float(self.x_plus)) > tol:
            raise ValueError("attracting fixed point not fixed")
        drift = abs(self.ns_point(float(self.x_minus)) - float(self.x_minus))
        if min(drift, 1 - drift) > tol:
            raise ValueError("repelling fixed point not fixed")
        xs = [i / grid for i in range(grid)]
        images = [self.ns_point(x) for x in xs]
        total = 0.0
        for i in range(grid):
            step = (images[(i + 1) % grid] - images[i]) % 1
            if not 0 < step < 1:
                raise ValueError("lift not strictly monotone on the grid")
            total += step
        if abs(total - 1) > 1e-6:
            raise ValueError("lift degree is not one")
        # north-south behavior: a quarter-circle arc away from the repeller
        b = ArcUnion(((self.x_plus - Fraction(1, 8), Fraction(1, 4)),))
        target = ArcUnion(((self.x_plus - Fraction(1, 100), Fraction(1, 50)),))
        arcs = b
        for _ in range(n_max):
            arcs = self.act_arcs((2,), arcs)
            if arcs.contained_in(target, margin=0.0):
                return
        raise ValueError("iterates failed to contract into the attractor basin")


def default_system() -> CircleSystem:
    return CircleSystem(alpha=golden_rotation(), contraction=0.5, x_plus=Fraction(0))


def standard_arc_fixture() -> ArcUnion:
    """Four closed arcs of length 1/200 centered at 0.1, 0.3, 0.7, 0.9."""
    half = Fraction(1, 400)
    return ArcUnion.from_endpoint_pairs(
        tuple((Fraction(c, 10) - half, Fraction(c, 10) + half) for c in (1, 3, 7, 9))
    )


# ---------------------------------------------------------------------------
# verified comparisons


def _offset(x: Interval, base: Interval) -> Interval:
    """(x - base) shifted by an integer so the midpoint lies in [0, 1)."""
    r = x - base
    return r.shift_by_int(math.floor(r.mid))


def _arc_endpoints_verified(system: CircleSystem, word: tuple, arcs: ArcUnion):
    out = []
    for s, L in arcs.arcs:
        p = system._enclose_image(word, s)
        q = system._enclose_image(word, (s + L) % 1)
        out.append((p, q))
    return out


def verify_maps_inside(
    system: CircleSystem, word: tuple, source: ArcUnion, target: ArcUnion, margin: float
) -> bool:
    """Certify act(word, source) inside ``target`` with clearance ``margin``
    at every endpoint, by interval evaluation. Conservative: False means
    "not certified", not "disproved"."""
    try:
        images = _arc_endpoints_verified(system, word, source)
    except PrecisionError:
        return False
    for p, q in images:
        ok = False
        for us, uL in target.arcs:
            if float(uL) >= 1:
                ok = True
                break
            base = Interval.enclose(us)
            length_lo = Interval.enclose(uL).lo
            try:
                dp = _offset(p, base)
                dq = _offset(q, base)
            except PrecisionError:
                continue
            if dp.lo >= margin and dq.hi <= length_lo - margin and dp.hi <= dq.lo:
                ok = True
                break
        if not ok:
            return False
    return True


def verify_images_disjoint(
    system: CircleSystem,
    word_a: tuple,
    word_b: tuple,
    arcs: ArcUnion,
    margin: float,
) -> bool:
    """Certify act(word_a, arcs) and act(word_b, arcs) disjoint with
    clearance ``margin`` (arc by arc: each b-image sits in the complementary
    gap of each a-image)."""
    try:
        images_a = _arc_endpoints_verified(system, word_a, arcs)
        images_b = _arc_endpoints_verified(system, word_b, arcs)
    except PrecisionError:
        return False
    for pa, qa in images_a:
        try:
            gap = _offset(pa, qa)  # gap length: from arc end around to its start
        except PrecisionError:
            return False
        for pb, qb in images_b:
            try:
                dp = _offset(pb, qa)
                dq = _offset(qb, qa)
            except PrecisionError:
                return False
            if not (dp.lo >= margin and dq.hi <= gap.lo - margin and dp.hi <= dq.lo):
                return False
    return True


# ---------------------------------------------------------------------------
# witness search


@dataclass(frozen=True)
class WitnessResult:
    word: tuple
    margin: float
    candidates_tried: int


def _witness_candidates(system: CircleSystem, B: ArcUnion, U: ArcUnion, budget: int, margin: float):
    """Candidate words a^-n b^k a^m in a fixed canonical order, float-
    filtered; the caller verifies each with interval arithmetic."""
    x_minus = float(system.x_minus)
    x_plus = float(system.x_plus)
    for total_rot in range(budget + 1):
        for m in range(total_rot + 1):
            n = total_rot - m
            B_m = B.shift(m * system.alpha)
            if B_m.distance_from_point(x_minus) <= 4 * margin:
                continue
            U_n = U.shift(n * system.alpha)
            rho = U_n.interior_radius_at(x_plus)
            arcs = B_m
            for k in range(budget - total_rot + 1):
                if k > 0:
                    arcs = system.act_arcs((2,), arcs)
                if k > 0 and (rho is None or rho <= 4 * margin):
                    break  # contraction cannot help if the target misses x_plus
                if arcs.contained_in(U_n, margin=2 * margin):
                    yield (-1,) * n + (2,) * k + (1,) * m


def shrink_witness(
    system: CircleSystem,
    B: ArcUnion,
    U: ArcUnion,
    budget: int = 40,
    margin: float = DEFAULT_MARGIN,
) -> WitnessResult:
    """A verified word g with act(g, B) inside U (clearance ``margin``).

    Candidates follow the rotate/contract/rotate pattern; each is interval-
    verified before being returned, so a returned witness is a certificate.
    """
    if B.is_full() or float(B.total_length()) >= 1:
        raise DegenerateInputError("B must be a proper closed subset")
    if U.is_empty():
        raise DegenerateInputError("U must be nonempty")
    if B.is_empty():
        return WitnessResult((), margin, 0)
    tried = 0
    for word in _witness_candidates(system, B, U, budget, margin):
        tried += 1
        if verify_maps_inside(system, word, B, U, margin):
            return WitnessResult(word, margin, tried)
    raise WitnessSearchError(
        f"no verified witness within budget {budget} ({tried} candidates)"
    )


def disjointness_witness(
    system: CircleSystem,
    F_words: Iterable,
    A: ArcUnion,
    budget: int = 40,
    margin: float = DEFAULT_MARGIN,
) -> WitnessResult:
    """A verified word g with act(g, A) disjoint from every act(f, A), f in F.

    Candidate search targets the complement of the float image of F.A;
    verification checks pairwise disjointness rigorously, independent of the
    float complement.
    """
    F_words = [tuple(w) for w in F_words]
    if A.is_empty():
        raise DegenerateInputError("A must be nonempty")
    fa = ArcUnion(tuple(arc for f in F_words for arc in system.act_arcs(f, A).arcs))
    if fa.is_full() or float(fa.total_length()) >= 1:
        raise CircleCoverageError(float(fa.total_length()))
    U = fa.complement()
    tried = 0
    for word in _witness_candidates(system, A, U, budget, margin):
        tried += 1
        if all(
            verify_images_disjoint(system, word, f, A, margin) for f in F_words
        ):
            return WitnessResult(word, margin, tried)
    raise WitnessSearchError(
        f"no verified disjointness witness within budget {budget} ({tried} candidates)"
    )


# ---------------------------------------------------------------------------
# return sets and the syndeticity refutation


@dataclass(frozen=True)
class ReturnSetReport:
    window_set: FiniteWindowSet
    ambiguous: tuple
    margin: float


def return_set(
    system: CircleSystem,
    A: ArcUnion,
    x,
    radius: int,
    margin: float = DEFAULT_MARGIN,
) -> ReturnSetReport:
    """{g in Ball(radius) : act(g, x) in A}, with margin-ambiguous words
    reported separately instead of being classified."""
    ball = F2.ball(radius)
    members = []
    ambiguous = []
    x = float(x)
    for w in ball:
        verdict = A.contains(system.act_point(w, x), margin=margin)
        if verdict == "in":
            members.append(w)
        elif verdict == "ambiguous":
            ambiguous.append(w)
    return ReturnSetReport(
        FiniteWindowSet(F2, members, ball), tuple(ambiguous), margin
    )


@dataclass(frozen=True)
class SyndeticityRefutation:
    """Witness that the specific finite set F fails to make F . A_x A_x^-1
    cover the group: a g with act(F, A) and act(g, A) verified disjoint."""

    F_words: tuple
    witness: tuple
    margin: float
    alpha: Fraction
    contraction: float
    arcs: tuple

    def to_json(self) -> str:
        payload = {
            "alpha": {"p": self.alpha.numerator, "q": self.alpha.denominator},
            "lambda": self.contraction,
            "arcs": [[float(s), float(s) + float(L)] for s, L in self.arcs],
            "F": [F2.word_to_str(w) or "e" for w in self.F_words],
            "g": F2.word_to_str(self.witness) or "e",
            "delta": self.margin,
        }
        return json.dumps(payload, sort_keys=True)


def refute_syndeticity(
    system: CircleSystem,
    F_words: Iterable,
    A: ArcUnion,
    budget: int = 40,
    margin: float = DEFAULT_MARGIN,
) -> SyndeticityRefutation:
    """Certificate that F fails to witness left syndeticity of the return-set
    difference set: any g with F.A and g.A disjoint forces
    F A_x A_x^-1 != G for every x."""
    F_words = tuple(tuple(w) for w in F_words)
    found = disjointness_witness(system, F_words, A, budget=budget, margin=margin)
    return SyndeticityRefutation(
        F_words=F_words,
        witness=found.word,
        margin=margin,
        alpha=system.alpha,
        contraction=system.contraction,
        arcs=A.arcs,
    )
