"""Boundary-cylinder harmonic functions for the simple random walk on a
free group, with certified two-sided bounds.

For a reduced prefix ``p``, the escape event "the walk's limiting ray begins
with p" depends on the current position only through a signed tree distance
to the cylinder root: +i at depth i inside the subtree below p, -j at tree
distance j outside it. On that line the walk is a birth-death chain (away
from the root with probability (2k-1)/2k on the inside ray, toward it with
probability 1/2k on the outside ray), so the escape probability solves a
tridiagonal linear system. Truncating the line at +/-depth and closing the
frontier twice -- once pessimistically (f(M) = 1 - q^M, f(-N) = 0) and once
optimistically (f(M) = 1, f(-N) = q^N), with q = 1/(2k-1) -- brackets the
true value; the closures are valid because P[hit the root from distance d]
equals q^d (an optional-stopping identity for the martingale q^distance).

The user-facing ``free_cylinder_harmonic(group, w, g)`` is oriented so that
g -> h_w(g) is harmonic for the *left*-increment walk: it equals the escape
probability of the right-increment walk started at g^-1 toward the cylinder
of w^-1 (the two walks are mutually inverse, and the driving measure is
symmetric). With this orientation h_a(e) = 1/4, h_a(a) = 3/4, h_a(b) = 1/12
on the rank-2 group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import GroupMismatchError, SupportCapError
from .groups import FreeGroup
from .measures import SparseMeasure, convolve


@dataclass(frozen=True)
class BoundaryCylinder:
    """Event that the limiting boundary ray starts with the given reduced
    word."""

    prefix: tuple

    def __post_init__(self):
        if not self.prefix:
            raise ValueError("cylinder prefix must be nonempty")
        for i, s in enumerate(self.prefix):
            if s == 0 or (i and self.prefix[i - 1] == -s):
                raise ValueError("cylinder prefix must be a reduced word")


def collapsed_coordinate(word: tuple, prefix: tuple) -> int:
    """Signed tree distance of ``word`` to the cylinder root ``prefix``.

    >= 0: the word lies in the subtree below the prefix, at that depth.
    <  0: outside; magnitude is the tree distance to the prefix vertex.
    """
    n = len(prefix)
    if len(word) >= n and word[:n] == prefix:
        return len(word) - n
    common = 0
    for a, b in zip(word, prefix):
        if a != b:
            break
        common += 1
    return -(len(word) + n - 2 * common)


class CertifiedValue(NamedTuple):
    low: Fraction
    high: Fraction

    @property
    def value(self) -> float:
        return float((self.low + self.high) / 2)

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    def contains(self, x) -> bool:
        return self.low <= x <= self.high


def _solve_escape_line(rank: int, depth: int) -> dict:
    """Solve the truncated escape system on c in [-depth, depth] twice.

    Returns {"low": [...], "high": [...]} of Fractions indexed by c+depth.
    """
    two_k = 2 * rank
    q = Fraction(1, two_k - 1)
    up_in = Fraction(two_k - 1, two_k)  # c >= 0: deeper into the subtree
    up_out = Fraction(1, two_k)  # c < 0: toward the root

    n = 2 * depth + 1
    solutions = {}
    for closure in ("low", "high"):
        if closure == "low":
            left, right = Fraction(0), 1 - q**depth
        else:
            left, right = q**depth, Fraction(1)
        # interior equations f(c) = up(c) f(c+1) + (1-up(c)) f(c-1),
        # solved by forward elimination on the tridiagonal system
        a = [Fraction(0)] * n  # f(c) = a[c] + b[c] * f(c+1) sweep
        b = [Fraction(0)] * n
        a[0] = left
        for i in range(1, n - 1):
            c = i - depth
            up = up_in if c >= 0 else up_out
            down = 1 - up
            denom = 1 - down * b[i - 1]
            a[i] = down * a[i - 1] / denom
            b[i] = up / denom
        f = [Fraction(0)] * n
        f[-1] = right
        for i in range(n - 2, 0, -1):
            f[i] = a[i] + b[i] * f[i + 1]
        f[0] = left
        solutions[closure] = f
    return solutions


class CylinderHarmonic:
    """Evaluator for one cylinder's harmonic function at a fixed truncation
    depth. Solves the two-closure system once; evaluation is a table lookup
    keyed by the collapsed coordinate of g^-1 relative to prefix^-1."""

    def __init__(self, group: FreeGroup, prefix: tuple, depth: int = 40):
        if not isinstance(group, FreeGroup):
            raise GroupMismatchError("cylinder harmonics live on free groups")
        BoundaryCylinder(tuple(prefix))
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.group = group
        self.prefix = tuple(prefix)
        self.depth = depth
        self._target = group.inv(self.prefix)
        self._q = Fraction(1, 2 * group.rank - 1)
        tables = _solve_escape_line(group.rank, depth)
        self._low = tables["low"]
        self._high = tables["high"]
        self._mid = [float((lo + hi) / 2) for lo, hi in zip(self._low, self._high)]

    def _coordinate(self, g) -> int:
        return collapsed_coordinate(self.group.inv(g), self._target)

    def interval(self, g) -> CertifiedValue:
        c = self._coordinate(g)
        d = self.depth
        if c >= d:
            return CertifiedValue(1 - self._q**c, Fraction(1))
        if c <= -d:
            return CertifiedValue(Fraction(0), self._q ** (-c))
        return CertifiedValue(self._low[c + d], self._high[c + d])

    def value(self, g) -> float:
        c = self._coordinate(g)
        d = self.depth
        if abs(c) >= d:
            iv = self.interval(g)
            return float((iv.low + iv.high) / 2)
        return self._mid[c + d]

    def __call__(self, g) -> float:
        return self.value(g)


def free_cylinder_harmonic(group: FreeGroup, w, g, depth: int = 40) -> CertifiedValue:
    """Certified interval for the cylinder harmonic h_w at g.

    The interval always brackets the true value; if the requested depth is
    too small for a tight answer, the caller sees the honest width.
    """
    return CylinderHarmonic(group, tuple(w), depth).interval(g)


def escape_probability_exact(rank: int, c: int) -> Fraction:
    """Closed-form escape probability at collapsed coordinate c, from the
    one-step (gambler's ruin) analysis: 1 - q^{c+1}/(1+q) inside,
    q^{|c|}/(1+q) outside."""
    q = Fraction(1, 2 * rank - 1)
    if c >= 0:
        return 1 - q ** (c + 1) / (1 + q)
    return q ** (-c) / (1 + q)


class ChoiEffrosResult(NamedTuple):
    values: tuple  # integrand value at each step 1..n
    final: float


def choi_effros_approx(
    phi: Callable,
    psi: Callable,
    mu: SparseMeasure,
    g,
    n: int,
    prune_tol: float = 0.0,
    support_cap: int = 2_000_000,
) -> ChoiEffrosResult:
    """Step-n approximant of the harmonic-function product:
    sum_h mu^{*n}(h) phi(hg) psi(hg), with the whole sequence reported
    (convergence is a limit statement, not monotone in n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    group = mu.group
    mul = group.mul_unchecked
    values = []
    power = mu
    for k in range(1, n + 1):
        if k > 1:
            power = convolve(power, mu)
            if prune_tol:
                power = SparseMeasure(
                    group,
                    {h: w for h, w in power.atoms.items() if w >= prune_tol},
                    validate=False,
                )
            if len(power.atoms) > support_cap:
                raise SupportCapError(len(power.atoms), support_cap)
        total = 0.0
        for h, wt in power.atoms.items():
            x = mul(h, g)
            total += wt * phi(x) * psi(x)
        values.append(total)
    return ChoiEffrosResult(tuple(values), values[-1])


# ---------------------------------------------------------------------------
# Monte Carlo oracles


def simulate_escape_line(
    rank: int, start: int, n_walks: int, horizon: int = 25, seed: int = 0
) -> float:
    """Fraction of collapsed-chain walks from ``start`` that reach +horizon
    before -horizon (vectorized; the misclassification probability of the
    horizon rule is at most q^horizon per side)."""
    rng = np.random.default_rng(seed)
    pos = np.full(n_walks, start, dtype=np.int64)
    up_in = (2 * rank - 1) / (2 * rank)
    up_out = 1 / (2 * rank)
    active = np.abs(pos) < horizon
    while active.any():
        u = rng.random(n_walks)
        threshold = np.where(pos >= 0, up_in, up_out)
        step = np.where(u < threshold, 1, -1)
        pos = np.where(active, pos + step, pos)
        active = np.abs(pos) < horizon
    return float(np.mean(pos >= horizon))


def simulate_boundary_prefix_words(
    group: FreeGroup,
    start: tuple,
    prefix: tuple,
    n_walks: int,
    stop_margin: int = 25,
    seed: int = 0,
) -> float:
    """Full-word simulation of the right-increment walk from ``start``:
    fraction whose word begins with ``prefix`` once it reaches length
    len(prefix) + stop_margin. Slower than the collapsed chain but shares no
    code path with it."""
    rng = np.random.default_rng(seed)
    k = group.rank
    letters = [s for i in range(1, k + 1) for s in (i, -i)]
    stop_len = len(prefix) + stop_margin
    p = tuple(prefix)
    hits = 0
    batch = rng.integers(0, 2 * k, size=(n_walks, 12 * stop_len), dtype=np.int8)
    for t in range(n_walks):
        word = list(start)
        draws = batch[t]
        i = 0
        while len(word) < stop_len:
            if i >= draws.size:  # pragma: no cover - extremely unlikely
                draws = rng.integers(0, 2 * k, size=4 * stop_len)
                i = 0
            s = letters[draws[i]]
            i += 1
            if word and word[-1] == -s:
                word.pop()
            else:
                word.append(s)
        if tuple(word[: len(p)]) == p:
            hits += 1
    return hits / n_walks
