"""Finite G-spaces: stationary measures, Cesaro ergodic averages, and
return-time densities for the induced Markov operator.

The transition operator of a measure mu on a finite space Y is
P(y, y') = sum over {g : g.y = y'} of mu(g); rows sum to one. Stationarity
is found by power iteration with blockwise Cesaro averaging and restarts,
which damps period-2 (and any unit-circle) spectrum geometrically while
keeping every iterate a probability vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GroupMismatchError, LabError, StationaryConvergenceError
from .groups import CyclicProduct, FreeGroup, Group, IntegerLattice
from .measures import SparseMeasure


def _perm_power(perm: np.ndarray, n: int) -> np.ndarray:
    """n-th compositional power of a permutation (n may be negative)."""
    size = perm.size
    if n < 0:
        perm = np.argsort(perm)
        n = -n
    out = np.arange(size)
    acc = perm
    while n:
        if n & 1:
            out = acc[out]
        n >>= 1
        acc = acc[acc]
    return out


class FiniteGSpace:
    """Finite point set with a group action given by generator permutations.

    ``gen_perms`` maps generator elements to index permutations
    (perm[i] = index of s . states[i]); inverses are derived. The action of
    an arbitrary element composes generator permutations.
    """

    def __init__(self, group: Group, states: Iterable, gen_perms: dict, check_samples: int = 25):
        self.group = group
        self.states = tuple(states)
        n = len(self.states)
        perms: dict = {}
        for g, p in gen_perms.items():
            arr = np.asarray(p, dtype=np.int64)
            if sorted(arr.tolist()) != list(range(n)):
                raise ValueError(f"action of {g!r} is not a permutation")
            perms[g] = arr
            perms[group.inv(g)] = np.argsort(arr)
        self._perms = perms
        self._index = {s: i for i, s in enumerate(self.states)}
        if check_samples:
            self._check_action(check_samples)

    def _generator_perm(self, g) -> np.ndarray:
        if g in self._perms:
            return self._perms[g]
        raise GroupMismatchError(f"no action registered for generator {g!r}")

    def element_perm(self, g) -> np.ndarray:
        """Permutation of state indices implementing y -> g . y."""
        n = len(self.states)
        if isinstance(self.group, FreeGroup):
            out = np.arange(n)
            for s in reversed(g):  # rightmost letter acts first
                out = self._generator_perm((s,))[out]
            return out
        # abelian families: compose commuting coordinate powers
        out = np.arange(n)
        for j, power in enumerate(g):
            unit = tuple(1 if i == j else 0 for i in range(len(g)))
            if power:
                out = _perm_power(self._generator_perm(unit), power)[out]
        return out

    def apply(self, g, state):
        return self.states[self.element_perm(g)[self._index[state]]]

    def _check_action(self, samples: int) -> None:
        rng = np.random.default_rng(1234)
        for _ in range(samples):
            g = self._random_small_element(rng)
            h = self._random_small_element(rng)
            i = int(rng.integers(len(self.states)))
            gh = self.group.mul(g, h)
            via_pair = self.element_perm(g)[self.element_perm(h)[i]]
            if self.element_perm(gh)[i] != via_pair:
                raise LabError("action does not respect the group law")

    def _random_small_element(self, rng):
        group = self.group
        if isinstance(group, FreeGroup):
            from .groups import reduce_word

            length = int(rng.integers(0, 4))
            letters = []
            for _ in range(length):
                s = int(rng.integers(1, group.rank + 1))
                letters.append(-s if rng.integers(2) else s)
            return reduce_word(letters)
        if isinstance(group, CyclicProduct):
            return tuple(int(rng.integers(0, m)) for m in group.moduli)
        return tuple(int(rng.integers(-3, 4)) for _ in range(group.dimension))

    def transition_matrix(self, mu: SparseMeasure) -> np.ndarray:
        if mu.group != self.group:
            raise GroupMismatchError("measure lives on a different group")
        n = len(self.states)
        P = np.zeros((n, n))
        for g, w in mu.atoms.items():
            perm = self.element_perm(g)
            P[np.arange(n), perm] += w
        if not np.allclose(P.sum(axis=1), 1.0, atol=1e-9):
            raise LabError("transition rows do not sum to one")
        return P

    def state_index(self, state) -> int:
        return self._index[state]


@dataclass(frozen=True)
class StationaryResult:
    nu: np.ndarray
    residual: float
    iterations: int


def _reachability(adj: np.ndarray) -> np.ndarray:
    """Boolean transitive closure (including self)."""
    n = adj.shape[0]
    reach = adj | np.eye(n, dtype=bool)
    for _ in range(int(np.ceil(np.log2(max(n, 2)))) + 1):
        reach = reach | (reach @ reach)
    return reach


def stationary_measure(
    space: FiniteGSpace,
    mu: SparseMeasure,
    tol: float = 1e-12,
    block: int = 64,
    max_blocks: int = 400,
) -> StationaryResult:
    """Probability vector nu with ||nu P - nu||_1 <= tol.

    Each block Cesaro-averages the iterates of the previous block's output;
    restarting from the average damps unit-modulus spectrum by 1/block per
    block. Verifies strict positivity of nu on the communicating class of
    its own support.
    """
    P = space.transition_matrix(mu)
    n = P.shape[0]
    v = np.full(n, 1.0 / n)
    iterations = 0
    residual = np.inf
    for _ in range(max_blocks):
        acc = np.zeros(n)
        cur = v
        for _ in range(block):
            cur = cur @ P
            acc += cur
            iterations += 1
        v = acc / block
        residual = float(np.abs(v @ P - v).sum())
        if residual <= tol:
            break
    else:
        raise StationaryConvergenceError(residual, iterations)

    # positivity on the communicating class of the support
    reach = _reachability(P > 0)
    comm = reach & reach.T
    support = v > max(tol, 1e-15)
    if support.any():
        anchor = int(np.argmax(v))
        cls = comm[anchor]
        if not (v[cls] > 0).all():
            raise LabError("stationary vector vanishes inside its own class")
    return StationaryResult(v, residual, iterations)


@dataclass(frozen=True)
class CesaroAverageReport:
    average: np.ndarray
    integral: float
    deviation: float  # nu-weighted 2-norm distance from the constant
    n: int


def markov_cesaro_average(
    space: FiniteGSpace,
    mu: SparseMeasure,
    phi,
    n: int,
    nu: np.ndarray | None = None,
) -> CesaroAverageReport:
    """(1/n) sum_{k=1..n} P^k phi, with its deviation from the stationary
    mean of phi in the nu-weighted 2-norm."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = space.transition_matrix(mu)
    phi = np.asarray(
        [phi(s) for s in space.states] if callable(phi) else phi, dtype=float
    )
    if nu is None:
        nu = stationary_measure(space, mu).nu
    acc = np.zeros_like(phi)
    cur = phi
    for _ in range(n):
        cur = P @ cur
        acc += cur
    avg = acc / n
    integral = float(nu @ phi)
    deviation = float(np.sqrt(nu @ (avg - integral) ** 2))
    return CesaroAverageReport(avg, integral, deviation, n)


@dataclass(frozen=True)
class ReturnDensityReport:
    value: float
    stationary_mass: float
    n: int


def return_time_density(
    space: FiniteGSpace,
    mu: SparseMeasure,
    B: Iterable,
    y,
    n: int,
    nu: np.ndarray | None = None,
) -> ReturnDensityReport:
    """Cesaro frequency (1/n) sum_{k<=n} P^k(y, B) of visits to B from y,
    reported next to the stationary mass nu(B)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = space.transition_matrix(mu)
    indicator = np.zeros(len(space.states))
    for s in B:
        indicator[space.state_index(s)] = 1.0
    if nu is None:
        nu = stationary_measure(space, mu).nu
    i = space.state_index(y)
    acc = 0.0
    cur = indicator
    for _ in range(n):
        cur = P @ cur
        acc += cur[i]
    return ReturnDensityReport(acc / n, float(nu @ indicator), n)
