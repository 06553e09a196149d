"""Finite-window and periodic set calculus: product and difference sets,
thickness and syndeticity probes, Bohr membership.

Windowed predicates are honest about truncation: every report carries a
three-valued outcome (witnessed / refuted / undetermined) plus a
``bounded_search`` flag, and refutations are only ever claimed for periodic
sets, where the computation over one period is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .covering import CoverResult, min_cover
from .errors import GroupMismatchError
from .groups import Ball, Group, IntegerLattice

# ---------------------------------------------------------------------------
# data types


class FiniteWindowSet:
    """An explicit subset of a ball, with canonical element order.

    The window records where membership is actually known; operations that
    could push elements outside it report whether truncation occurred.
    """

    __slots__ = ("group", "elements", "window", "_member_set")

    def __init__(self, group: Group, elements: Iterable, window: Ball):
        if window.group != group:
            raise GroupMismatchError("window belongs to a different group")
        elems = sorted(set(elements), key=group.sort_key)
        for g in elems:
            if g not in window:
                raise GroupMismatchError(f"element {g!r} outside the window")
        self.group = group
        self.elements = tuple(elems)
        self.window = window
        self._member_set = frozenset(elems)

    @classmethod
    def from_predicate(cls, window: Ball, pred) -> "FiniteWindowSet":
        return cls(window.group, [g for g in window if pred(g)], window)

    def member_set(self) -> frozenset:
        return self._member_set

    def __contains__(self, g) -> bool:
        return g in self._member_set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteWindowSet)
            and self.group == other.group
            and self.elements == other.elements
        )

    def __repr__(self) -> str:
        return f"FiniteWindowSet({self.group!r}, n={len(self.elements)})"


@dataclass(frozen=True)
class PeriodicIntSet:
    """The set {n in Z : n mod modulus in residues}; densities are exact."""

    modulus: int
    residues: frozenset

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        res = frozenset(int(r) % self.modulus for r in self.residues)
        object.__setattr__(self, "residues", res)

    @classmethod
    def from_spec(cls, text: str) -> "PeriodicIntSet":
        """Parse "mod=m;residues=0,1,4" (empty residue list allowed)."""
        fields = dict(part.split("=", 1) for part in text.strip().split(";") if part)
        modulus = int(fields["mod"])
        raw = fields.get("residues", "").strip()
        residues = frozenset(int(r) for r in raw.split(",") if r != "")
        return cls(modulus, residues)

    def to_spec(self) -> str:
        body = ",".join(str(r) for r in sorted(self.residues))
        return f"mod={self.modulus};residues={body}"

    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.modulus)

    def contains(self, n: int) -> bool:
        return n % self.modulus in self.residues

    def is_full(self) -> bool:
        return len(self.residues) == self.modulus

    def is_empty(self) -> bool:
        return not self.residues

    def complement(self) -> "PeriodicIntSet":
        return PeriodicIntSet(
            self.modulus,
            frozenset(range(self.modulus)) - self.residues,
        )

    def negate(self) -> "PeriodicIntSet":
        """The set {-n : n in this set}."""
        return PeriodicIntSet(
            self.modulus, frozenset((-r) % self.modulus for r in self.residues)
        )

    def translate(self, t: int) -> "PeriodicIntSet":
        return PeriodicIntSet(
            self.modulus, frozenset((r + t) % self.modulus for r in self.residues)
        )

    def lift(self, new_modulus: int) -> "PeriodicIntSet":
        if new_modulus % self.modulus:
            raise ValueError("new modulus must be a multiple of the old one")
        res = frozenset(
            r + j * self.modulus
            for r in self.residues
            for j in range(new_modulus // self.modulus)
        )
        return PeriodicIntSet(new_modulus, res)

    def bitmask(self) -> int:
        mask = 0
        for r in self.residues:
            mask |= 1 << r
        return mask


@dataclass(frozen=True)
class BohrSpec:
    """Torus recurrence target: frequency matrix (d' rows over d lattice
    coordinates), center in [0,1)^d', and an l-infinity radius on the torus."""

    freqs: tuple  # tuple of d' rows, each a tuple of d floats
    center: tuple
    radius: float

    def __post_init__(self):
        freqs = tuple(tuple(float(x) for x in row) for row in self.freqs)
        center = tuple(float(c) for c in self.center)
        if len(freqs) != len(center):
            raise ValueError("one center coordinate per frequency row")
        if not freqs or len({len(row) for row in freqs}) != 1:
            raise ValueError("frequency rows must be nonempty and equal length")
        if not 0 < self.radius <= 0.5:
            raise ValueError("radius must lie in (0, 1/2]")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "center", center)

    @classmethod
    def line(cls, theta: float, radius: float, center: float = 0.0) -> "BohrSpec":
        """One-frequency spec on the 1-D lattice."""
        return cls(((theta,),), (center,), radius)

    @property
    def lattice_dim(self) -> int:
        return len(self.freqs[0])


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ThickReport:
    status: str  # "witnessed" | "refuted" | "undetermined"
    witness: object | None
    exact: bool
    bounded_search: bool
    checked: int = 0

    @property
    def is_thick(self) -> bool | None:
        if self.status == "witnessed":
            return True
        if self.status == "refuted":
            return False
        return None


@dataclass(frozen=True)
class IndexReport:
    status: str  # "exact" | "infeasible" | "undetermined"
    index: int | None
    cover: tuple | None
    lower_bound: int
    upper_bound: int | None
    exact_domain: bool
    nodes: int = 0


@dataclass(frozen=True)
class PWReport:
    status: str  # "witnessed" | "refuted" | "undetermined"
    translates: tuple | None
    thick: ThickReport | None
    exact: bool


class ProductSetResult(NamedTuple):
    product: FiniteWindowSet
    exact: bool
    dropped: int


# ---------------------------------------------------------------------------
# operations


def product_set(A: FiniteWindowSet, B: FiniteWindowSet, out_window: Ball) -> ProductSetResult:
    """All products a*b landing in out_window; ``exact`` is True when none
    escaped it (so the result is the full product set)."""
    if A.group != B.group or out_window.group != A.group:
        raise GroupMismatchError("operands must share one group")
    group = A.group
    members = out_window.member_set()
    out = set()
    dropped = 0
    for a in A.elements:
        for b in B.elements:
            p = group.mul(a, b)
            if p in members:
                out.add(p)
            else:
                dropped += 1
    return ProductSetResult(
        FiniteWindowSet(group, out, out_window), dropped == 0, dropped
    )


def inverse_set(A: FiniteWindowSet, out_window: Ball | None = None) -> FiniteWindowSet:
    window = out_window if out_window is not None else A.window
    inv = [A.group.inv(a) for a in A.elements]
    return FiniteWindowSet(A.group, [g for g in inv if g in window], window)


def difference_set(A: FiniteWindowSet, out_window: Ball) -> ProductSetResult:
    """Product of A with its inverses: {a * b^-1}."""
    inv_all = {A.group.inv(a) for a in A.elements}
    inv_window = A.group.ball(A.window.radius)
    inv_fws = FiniteWindowSet(A.group, inv_all, inv_window)
    return product_set(A, inv_fws, out_window)


def periodic_product(A: PeriodicIntSet, B: PeriodicIntSet) -> PeriodicIntSet:
    """Sumset over Z of two periodic sets, exact on lcm(m_A, m_B)."""
    modulus = math.lcm(A.modulus, B.modulus)
    ra = A.lift(modulus).residues
    rb = B.lift(modulus).residues
    res = frozenset((a + b) % modulus for a in ra for b in rb)
    return PeriodicIntSet(modulus, res)


def is_right_thick(T, probe, search=None) -> ThickReport:
    """Look for g with probe*g inside T.

    Periodic sets get an exact answer (thick iff the set is all of Z).
    Windowed sets are scanned over ``search``; translates that leave the
    window are skipped as unverifiable, and a miss is reported as
    undetermined, never as a refutation.
    """
    if isinstance(T, PeriodicIntSet):
        if T.is_full():
            return ThickReport("witnessed", 0, exact=True, bounded_search=False)
        return ThickReport("refuted", None, exact=True, bounded_search=False)

    if search is None:
        raise ValueError("windowed thickness probe needs a search set")
    group = T.group
    members = T.member_set()
    window = T.window.member_set()
    probe_elems = tuple(probe)
    checked = 0
    for g in search:
        translate = [group.mul(p, g) for p in probe_elems]
        if not all(t in window for t in translate):
            continue
        checked += 1
        if all(t in members for t in translate):
            return ThickReport(
                "witnessed", g, exact=False, bounded_search=True, checked=checked
            )
    return ThickReport("undetermined", None, exact=False, bounded_search=True, checked=checked)


def _index_from_cover(result: CoverResult, keys, exact_domain: bool) -> IndexReport:
    if result.status == "exact":
        cover = tuple(keys[i] for i in result.chosen)
        return IndexReport(
            "exact", result.size, cover, result.lower_bound, result.upper_bound,
            exact_domain, result.nodes,
        )
    if result.status == "infeasible":
        return IndexReport("infeasible", None, None, 0, None, exact_domain, result.nodes)
    return IndexReport(
        "undetermined", None, None, result.lower_bound, result.upper_bound,
        exact_domain, result.nodes,
    )


def syndeticity_index(
    C,
    cover_target: Ball | None = None,
    candidate_pool: Ball | None = None,
    max_k: int | None = None,
    node_cap: int = 2_000_000,
) -> IndexReport:
    """Minimal number of left translates of C covering the target.

    For a PeriodicIntSet the target is all of Z_m and the answer is exact;
    for windowed sets the search covers ``cover_target`` using translates
    drawn from ``candidate_pool``. A search capped at ``max_k`` that finds no
    cover certifies index > max_k rather than guessing.
    """
    if isinstance(C, PeriodicIntSet):
        m = C.modulus
        universe = (1 << m) - 1
        base = C.bitmask()
        masks = [
            ((base << t) | (base >> (m - t))) & universe if t else base
            for t in range(m)
        ]
        result = min_cover(universe, masks, max_size=max_k, node_cap=node_cap)
        return _index_from_cover(result, list(range(m)), exact_domain=True)

    if cover_target is None or candidate_pool is None:
        raise ValueError("windowed index search needs cover_target and candidate_pool")
    group = C.group
    index_of = {g: i for i, g in enumerate(cover_target.elements)}
    masks = []
    for f in candidate_pool.elements:
        mask = 0
        for c in C.elements:
            i = index_of.get(group.mul(f, c))
            if i is not None:
                mask |= 1 << i
        masks.append(mask)
    universe = (1 << len(cover_target.elements)) - 1
    result = min_cover(universe, masks, max_size=max_k, node_cap=node_cap)
    return _index_from_cover(result, list(candidate_pool.elements), exact_domain=False)


def is_piecewise_syndetic(
    C,
    F_pool: Ball | None = None,
    probe=None,
    search=None,
    max_size: int = 3,
    node_cap: int = 2_000_000,
) -> PWReport:
    """Search for a finite F making F*C right thick.

    Exact for periodic sets (piecewise syndetic iff some F of translates
    covers Z_m, iff the set is nonempty). Windowed sets are scanned over
    subsets of F_pool by increasing size; failure within the budget is
    reported as undetermined.
    """
    if isinstance(C, PeriodicIntSet):
        report = syndeticity_index(C, max_k=max_size if max_size else None, node_cap=node_cap)
        if report.status == "exact":
            thick = ThickReport("witnessed", 0, exact=True, bounded_search=False)
            return PWReport("witnessed", report.cover, thick, exact=True)
        if report.status == "infeasible":
            return PWReport("refuted", None, None, exact=True)
        return PWReport("undetermined", None, None, exact=True)

    if F_pool is None or probe is None or search is None:
        raise ValueError("windowed search needs F_pool, probe and search")
    import itertools

    group = C.group
    window = C.window
    members = window.member_set()
    for size in range(1, max_size + 1):
        for F in itertools.combinations(F_pool.elements, size):
            prod = set()
            for f in F:
                for c in C.elements:
                    p = group.mul(f, c)
                    if p in members:
                        prod.add(p)
            fc = FiniteWindowSet(group, prod, window)
            thick = is_right_thick(fc, probe, search)
            if thick.status == "witnessed":
                return PWReport("witnessed", F, thick, exact=False)
    return PWReport("undetermined", None, None, exact=False)


def torus_distance(t: float) -> float:
    """Distance from t to the nearest integer."""
    frac = t % 1.0
    return min(frac, 1.0 - frac)


def bohr_membership(spec: BohrSpec, g: tuple) -> bool:
    """True iff every frequency row lands within the torus box around the
    center: max_j || <g, theta_j> - c_j || < radius."""
    if len(g) != spec.lattice_dim:
        raise GroupMismatchError("lattice element has wrong dimension for spec")
    for row, c in zip(spec.freqs, spec.center):
        t = sum(gi * th for gi, th in zip(g, row)) - c
        if torus_distance(t) >= spec.radius:
            return False
    return True


def piecewise_bohr_score(C, spec: BohrSpec, probe_len: int, search: Iterable) -> float:
    """Best fraction of a length-n Bohr piece found inside C, over translates
    t in ``search``: max_t |C & B & [t,t+n)| / max(1, |B & [t,t+n)|)."""
    if probe_len < 1:
        raise ValueError("probe_len must be >= 1")
    if spec.lattice_dim != 1:
        raise ValueError("scores are computed on the 1-D lattice")

    if isinstance(C, PeriodicIntSet):
        def member(n: int) -> bool:
            return C.contains(n)
    else:
        member_set = C.member_set()

        def member(n: int) -> bool:
            return (n,) in member_set

    best = 0.0
    for t in search:
        hits = 0
        both = 0
        for n in range(t, t + probe_len):
            if bohr_membership(spec, (n,)):
                hits += 1
                if member(n):
                    both += 1
        best = max(best, both / max(1, hits))
    return best


# ---------------------------------------------------------------------------
# loading helpers (newline-delimited integers / word strings)


def load_int_elements(text: str):
    """Parse newline-delimited integers into 1-D lattice elements."""
    return tuple((int(line),) for line in text.split("\n") if line.strip())


def load_word_elements(group, text: str):
    """Parse newline-delimited words (capitals are inverses)."""
    return tuple(group.word_from_str(line) for line in text.split("\n") if line.strip())
