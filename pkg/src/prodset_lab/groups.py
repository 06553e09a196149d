"""Effective group arithmetic for the three built-in families.

Elements are plain tuples of ints, interpreted per group:

* ``IntegerLattice(d)`` -- integer vectors of length ``d``;
* ``CyclicProduct(m1, ..., mr)`` -- residue vectors, ``0 <= x_i < m_i``;
* ``FreeGroup(k)`` -- freely reduced words as tuples of signed generator
  indices (``+i`` is the i-th generator, ``-i`` its inverse, ``1 <= i <= k``).

All values are immutable and all operations pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BallCapError, GroupMismatchError

Element = tuple

DEFAULT_BALL_CAP = 10_000_000


class Ball:
    """Canonically ordered list of all elements within a given radius.

    Radius means word length for free groups, the l-infinity box radius for
    lattices, and the max per-coordinate cyclic distance for cyclic products.
    """

    __slots__ = ("group", "radius", "elements", "_member_set")

    def __init__(self, group, radius: int, elements: tuple):
        self.group = group
        self.radius = radius
        self.elements = elements
        self._member_set = frozenset(elements)

    def __contains__(self, g) -> bool:
        return g in self._member_set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def member_set(self) -> frozenset:
        return self._member_set

    def __repr__(self) -> str:
        return f"Ball({self.group!r}, r={self.radius}, n={len(self.elements)})"


class Group:
    """Shared surface of the three group families."""

    identity: Element = ()

    def mul(self, g: Element, h: Element) -> Element:
        self._check(g)
        self._check(h)
        return self.mul_unchecked(g, h)

    def mul_unchecked(self, g: Element, h: Element) -> Element:
        """Product without payload validation (hot loops over known-valid
        elements)."""
        raise NotImplementedError

    def inv(self, g: Element) -> Element:
        raise NotImplementedError

    def contains(self, g) -> bool:
        """Full payload validation."""
        raise NotImplementedError

    def sort_key(self, g: Element):
        """Canonical ordering key (length-lex for words, lex for vectors)."""
        raise NotImplementedError

    def ball_size(self, radius: int) -> int:
        raise NotImplementedError

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
        if radius < 0:
            raise ValueError("radius must be >= 0")
        predicted = self.ball_size(radius)
        if predicted > cap:
            raise BallCapError(
                f"ball of radius {radius} has {predicted} elements, cap is {cap}"
            )
        elems = sorted(self._enumerate_ball(radius), key=self.sort_key)
        return Ball(self, radius, tuple(elems))

    def _enumerate_ball(self, radius: int):
        raise NotImplementedError

    def power(self, g: Element, n: int) -> Element:
        """n-th power of g (n may be negative)."""
        if n < 0:
            return self.power(self.inv(g), -n)
        out = self.identity
        acc = g
        while n:
            if n & 1:
                out = self.mul(out, acc)
            n >>= 1
            if n:
                acc = self.mul(acc, acc)
        return out

    def _check(self, g):
        if not self.contains(g):
            raise GroupMismatchError(f"{g!r} is not an element of {self!r}")


@dataclass(frozen=True, repr=False)
class IntegerLattice(Group):
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "identity", (0,) * self.dimension)

    def mul_unchecked(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        self._check(g)
        return tuple(-a for a in g)

    def contains(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.dimension
            and all(isinstance(a, int) for a in g)
        )

    def sort_key(self, g):
        return g

    def ball_size(self, radius: int) -> int:
        return (2 * radius + 1) ** self.dimension

    def _enumerate_ball(self, radius: int):
        return itertools.product(range(-radius, radius + 1), repeat=self.dimension)

    def __repr__(self):
        return f"IntegerLattice({self.dimension})"


@dataclass(frozen=True, repr=False)
class CyclicProduct(Group):
    moduli: tuple

    def __post_init__(self):
        moduli = tuple(self.moduli)
        if not moduli or any(m < 1 for m in moduli):
            raise ValueError("moduli must be a nonempty tuple of ints >= 1")
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "identity", (0,) * len(moduli))

    @property
    def order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    def mul_unchecked(self, g, h):
        return tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))

    def inv(self, g):
        self._check(g)
        return tuple((-a) % m for a, m in zip(g, self.moduli))

    def contains(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == len(self.moduli)
            and all(isinstance(a, int) and 0 <= a < m for a, m in zip(g, self.moduli))
        )

    def sort_key(self, g):
        return g

    def elements(self):
        """All group elements in canonical (lexicographic) order."""
        return itertools.product(*(range(m) for m in self.moduli))

    def _coord_window(self, radius: int, m: int):
        return sorted(x % m for x in range(-min(radius, m // 2), min(radius, (m - 1) // 2) + 1))

    def ball_size(self, radius: int) -> int:
        n = 1
        for m in self.moduli:
            n *= len(self._coord_window(radius, m))
        return n

    def _enumerate_ball(self, radius: int):
        windows = [self._coord_window(radius, m) for m in self.moduli]
        return itertools.product(*windows)

    def __repr__(self):
        return f"CyclicProduct{self.moduli}"


def reduce_word(letters) -> tuple:
    """Freely reduce a sequence of signed generator indices."""
    out = []
    for s in letters:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


@dataclass(frozen=True, repr=False)
class FreeGroup(Group):
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        object.__setattr__(self, "identity", ())

    def generators(self):
        """The 2k single-letter words: g1, g1^-1, g2, g2^-1, ..."""
        out = []
        for i in range(1, self.rank + 1):
            out.append((i,))
            out.append((-i,))
        return out

    def mul_unchecked(self, g, h):
        i = len(g)
        j = 0
        while i > 0 and j < len(h) and g[i - 1] == -h[j]:
            i -= 1
            j += 1
        return g[:i] + h[j:]

    def inv(self, g):
        self._check(g)
        return tuple(-s for s in reversed(g))

    def contains(self, g) -> bool:
        if not isinstance(g, tuple):
            return False
        for idx, s in enumerate(g):
            if not isinstance(s, int) or s == 0 or abs(s) > self.rank:
                return False
            if idx and g[idx - 1] == -s:
                return False
        return True

    @staticmethod
    def _letter_key(s: int):
        # a < a^-1 < b < b^-1 < ...
        return (abs(s), 0 if s > 0 else 1)

    def sort_key(self, g):
        return (len(g), tuple(self._letter_key(s) for s in g))

    def ball_size(self, radius: int) -> int:
        k = self.rank
        if radius == 0:
            return 1
        if k == 1:
            return 2 * radius + 1
        return 1 + 2 * k * ((2 * k - 1) ** radius - 1) // (2 * k - 2)

    def _enumerate_ball(self, radius: int):
        level = [()]
        yield ()
        letters = [s for i in range(1, self.rank + 1) for s in (i, -i)]
        for _ in range(radius):
            nxt = []
            for w in level:
                last = w[-1] if w else 0
                for s in letters:
                    if s != -last:
                        nxt.append(w + (s,))
            yield from nxt
            level = nxt

    def word_from_str(self, text: str) -> tuple:
        """Parse words like "abA" (capital = inverse), reducing the result."""
        letters = []
        for ch in text.strip():
            if ch.isspace():
                continue
            lower = ch.lower()
            idx = ord(lower) - ord("a") + 1
            if not (1 <= idx <= self.rank) or not ch.isalpha():
                raise GroupMismatchError(f"letter {ch!r} not valid for rank {self.rank}")
            letters.append(-idx if ch.isupper() else idx)
        return reduce_word(letters)

    def word_to_str(self, g) -> str:
        return "".join(
            chr(ord("a") + abs(s) - 1).upper() if s < 0 else chr(ord("a") + s - 1)
            for s in g
        )

    def __repr__(self):
        return f"FreeGroup({self.rank})"


def parse_group(text: str) -> Group:
    """Parse a group descriptor string, e.g. "kind=free,rank=2",
    "kind=lattice,dim=1", "kind=cyclic,moduli=4x3"."""
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise GroupMismatchError(f"bad descriptor fragment {part!r}")
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    kind = fields.get("kind")
    if kind == "free":
        return FreeGroup(int(fields["rank"]))
    if kind == "lattice":
        return IntegerLattice(int(fields["dim"]))
    if kind == "cyclic":
        return CyclicProduct(tuple(int(m) for m in fields["moduli"].split("x")))
    raise GroupMismatchError(f"unknown group kind {kind!r}")


def format_group(group: Group) -> str:
    if isinstance(group, FreeGroup):
        return f"kind=free,rank={group.rank}"
    if isinstance(group, IntegerLattice):
        return f"kind=lattice,dim={group.dimension}"
    if isinstance(group, CyclicProduct):
        return "kind=cyclic,moduli=" + "x".join(str(m) for m in group.moduli)
    raise GroupMismatchError(f"unknown group {group!r}")
