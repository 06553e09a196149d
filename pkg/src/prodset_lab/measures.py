"""Sparse probability measures on groups: convolution powers, Cesaro walk
densities, window densities, and harmonicity residuals.

Pruning never renormalizes: dropped mass is reported, so every density
computed from a pruned power is a rigorous lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .errors import GroupMismatchError, SupportCapError
from .groups import Group, IntegerLattice
from .setcalc import FiniteWindowSet, PeriodicIntSet

DEFAULT_SUPPORT_CAP = 2_000_000
MASS_TOL = 1e-12
MAX_PRUNE_TOL = 1e-6


class SparseMeasure:
    """Finitely supported probability measure, atoms keyed by group element."""

    __slots__ = ("group", "atoms")

    def __init__(self, group: Group, atoms: dict, validate: bool = True):
        if validate:
            for g, w in atoms.items():
                if not group.contains(g):
                    raise GroupMismatchError(f"atom {g!r} not an element of {group!r}")
                if w <= 0:
                    raise ValueError(f"atom weight must be positive, got {w!r}")
            total = sum(atoms.values())
            if abs(total - 1) > MASS_TOL:
                raise ValueError(f"total mass {total!r} is not 1 within {MASS_TOL}")
        self.group = group
        self.atoms = dict(atoms)

    @classmethod
    def uniform(cls, group: Group, elements: Iterable) -> "SparseMeasure":
        elems = list(elements)
        w = 1.0 / len(elems)
        return cls(group, {g: w for g in elems})

    @classmethod
    def point(cls, group: Group, g) -> "SparseMeasure":
        return cls(group, {g: 1.0})

    def mass(self):
        return sum(self.atoms.values())

    def support(self) -> tuple:
        return tuple(sorted(self.atoms, key=self.group.sort_key))

    def __len__(self) -> int:
        return len(self.atoms)

    def mass_of(self, member: Callable) -> float:
        """Mass of {g : member(g)}."""
        return sum(w for g, w in self.atoms.items() if member(g))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        inv = self.group.inv
        for g, w in self.atoms.items():
            w2 = self.atoms.get(inv(g))
            if w2 is None or abs(w - w2) > tol:
                return False
        return True

    def is_adapted(self, radius: int = 1, max_length: int | None = None) -> bool:
        """Whether semigroup products of the support cover Ball(radius)."""
        target = set(self.group.ball(radius).elements)
        support = list(self.atoms)
        closure = set(support)
        frontier = set(support)
        if max_length is None:
            max_length = 2 * radius + 4
        for _ in range(max_length - 1):
            if target <= closure:
                return True
            frontier = {
                self.group.mul(g, s) for g in frontier for s in support
            } - closure
            if not frontier:
                break
            closure |= frontier
        return target <= closure


class PowerResult(NamedTuple):
    measure: SparseMeasure
    pruned_mass: float


def convolve(mu: SparseMeasure, nu: SparseMeasure) -> SparseMeasure:
    """(mu * nu)(x) = sum_g mu(g) nu(g^-1 x); smaller support iterated
    outermost."""
    if mu.group != nu.group:
        raise GroupMismatchError("cannot convolve measures on different groups")
    group = mu.group
    mul = group.mul_unchecked
    acc: dict = {}
    if len(mu.atoms) <= len(nu.atoms):
        for a, wa in mu.atoms.items():
            for b, wb in nu.atoms.items():
                x = mul(a, b)
                acc[x] = acc.get(x, 0.0) + wa * wb
    else:
        for b, wb in nu.atoms.items():
            for a, wa in mu.atoms.items():
                x = mul(a, b)
                acc[x] = acc.get(x, 0.0) + wa * wb
    return SparseMeasure(group, acc, validate=False)


def convolution_power(
    mu: SparseMeasure,
    k: int,
    prune_tol: float = 0.0,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> PowerResult:
    """k-th convolution power with optional pruning of tiny atoms.

    Atoms below ``prune_tol`` are dropped after each step; the total dropped
    mass (1 - remaining mass) is reported, never renormalized away.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= prune_tol <= MAX_PRUNE_TOL:
        raise ValueError(f"prune_tol must lie in [0, {MAX_PRUNE_TOL}]")
    power = mu
    for _ in range(k - 1):
        power = convolve(power, mu)
        if prune_tol:
            power = SparseMeasure(
                power.group,
                {g: w for g, w in power.atoms.items() if w >= prune_tol},
                validate=False,
            )
        if len(power.atoms) > support_cap:
            raise SupportCapError(len(power.atoms), support_cap)
    return PowerResult(power, 1.0 - power.mass())


class WalkDensityRow(NamedTuple):
    k: int
    mass_in_set: float
    cesaro: float
    pruned_mass: float


@dataclass(frozen=True)
class WalkDensityReport:
    rows: tuple
    value: float

    def csv_lines(self):
        yield "k,mass_in_A,cesaro_avg,pruned_mass"
        for row in self.rows:
            yield f"{row.k},{row.mass_in_set!r},{row.cesaro!r},{row.pruned_mass!r}"


def cesaro_walk_density(
    mu: SparseMeasure,
    member: Callable,
    n: int,
    prune_tol: float = 0.0,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> WalkDensityReport:
    """(1/n) sum_{k=1..n} mu^{*k}(A) for the membership predicate ``member``.

    Requires a symmetric measure whose support generates the group (checked
    at radius 1). With pruning, each row's value is a lower bound and the
    dropped mass is reported alongside.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not mu.is_symmetric(tol=MASS_TOL):
        raise ValueError("walk measure must be symmetric")
    if not mu.is_adapted(radius=1):
        raise ValueError("walk measure support must generate the group")
    rows = []
    power = mu
    numerator = 0.0
    for k in range(1, n + 1):
        if k > 1:
            power = convolve(power, mu)
            if prune_tol:
                power = SparseMeasure(
                    power.group,
                    {g: w for g, w in power.atoms.items() if w >= prune_tol},
                    validate=False,
                )
            if len(power.atoms) > support_cap:
                raise SupportCapError(len(power.atoms), support_cap)
        hit = power.mass_of(member)
        numerator += hit
        rows.append(WalkDensityRow(k, hit, numerator / k, 1.0 - power.mass()))
    return WalkDensityReport(tuple(rows), rows[-1].cesaro)


def folner_upper_density(A, window_len: int, search: Iterable | None = None):
    """Best window density max_t |A & (t + [0,n)^d)| / n^d.

    Exact (a Fraction) for periodic sets; for a full period the answer is
    the set's density regardless of the translates searched.
    """
    if window_len < 1:
        raise ValueError("window_len must be >= 1")

    if isinstance(A, PeriodicIntSet):
        m = A.modulus
        if search is None:
            search = range(m)
        full, rem = divmod(window_len, m)
        best = Fraction(0)
        for t in search:
            count = full * len(A.residues)
            count += sum(1 for j in range(t, t + rem) if j % m in A.residues)
            best = max(best, Fraction(count, window_len))
        return best

    if not isinstance(A.group, IntegerLattice):
        raise GroupMismatchError("window densities are defined on lattices")
    d = A.group.dimension
    if search is None:
        raise ValueError("windowed density needs an explicit translate search")
    best = 0.0
    denom = window_len**d
    for t in search:
        tv = t if isinstance(t, tuple) else (t,)
        count = sum(
            1
            for a in A.elements
            if all(tv[i] <= a[i] < tv[i] + window_len for i in range(d))
        )
        best = max(best, count / denom)
    return best


@dataclass(frozen=True)
class HarmonicReport:
    residual: float
    tol: float
    passed: bool
    argmax: object | None


def harmonic_check(f: Callable, mu: SparseMeasure, radius: int, tol: float) -> HarmonicReport:
    """Max over Ball(radius) of |f(g) - sum_h mu(h) f(hg)|."""
    group = mu.group
    worst = 0.0
    worst_at = None
    for g in group.ball(radius):
        smoothed = sum(w * f(group.mul(h, g)) for h, w in mu.atoms.items())
        res = abs(f(g) - smoothed)
        if res > worst:
            worst, worst_at = res, g
    return HarmonicReport(worst, tol, worst <= tol, worst_at)


# ---------------------------------------------------------------------------
# exact radial evaluation for the simple walk on a free group
#
# The simple random walk on a free group is distance-transitive: mu^{*k}
# assigns equal weight to all words of the same length. The distance to the
# identity is therefore a birth-death chain (up 2k-1 : down 1 away from 0),
# and set masses that only depend on the first letter reduce to it exactly.


def free_walk_distance_distribution(rank: int, steps: int) -> list:
    """dist[k][d] = P[simple walk on the rank-k free group is at distance d
    after k steps], as exact Fractions."""
    up = Fraction(2 * rank - 1, 2 * rank)
    down = Fraction(1, 2 * rank)
    cur = {0: Fraction(1)}
    out = [dict(cur)]
    for _ in range(steps):
        nxt: dict = {}
        for d, p in cur.items():
            if d == 0:
                nxt[1] = nxt.get(1, Fraction(0)) + p
            else:
                nxt[d + 1] = nxt.get(d + 1, Fraction(0)) + p * up
                nxt[d - 1] = nxt.get(d - 1, Fraction(0)) + p * down
        cur = nxt
        out.append(dict(cur))
    return out


def free_first_letter_mass(rank: int, k: int, dist=None) -> Fraction:
    """Exact mu^{*k}-mass of the words starting with one fixed letter."""
    if dist is None:
        dist = free_walk_distance_distribution(rank, k)
    return (1 - dist[k].get(0, Fraction(0))) / (2 * rank)


def free_first_letter_cesaro(rank: int, n: int) -> Fraction:
    """Exact Cesaro average (1/n) sum_{k<=n} of the first-letter mass."""
    dist = free_walk_distance_distribution(rank, n)
    total = sum(free_first_letter_mass(rank, k, dist) for k in range(1, n + 1))
    return total / n


# ---------------------------------------------------------------------------
# serialization: one "element weight" pair per line


def measure_to_lines(mu: SparseMeasure):
    group = mu.group
    for g in mu.support():
        if hasattr(group, "word_to_str"):
            key = group.word_to_str(g) or "e"
        elif isinstance(group, IntegerLattice) and group.dimension == 1:
            key = str(g[0])
        else:
            key = ",".join(str(v) for v in g)
        yield f"{key} {mu.atoms[g]!r}"


def measure_from_lines(group: Group, lines: Iterable[str]) -> SparseMeasure:
    atoms: dict = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, weight = line.rpartition(" ")
        if hasattr(group, "word_from_str"):
            g = group.word_from_str("" if key == "e" else key)
        elif isinstance(group, IntegerLattice) and group.dimension == 1:
            g = (int(key),)
        else:
            g = tuple(int(v) for v in key.split(","))
        atoms[g] = atoms.get(g, 0.0) + float(weight)
    return SparseMeasure(group, atoms)
