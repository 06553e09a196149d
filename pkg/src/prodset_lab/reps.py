"""Finite-dimensional unitary representations of finite cyclic-product
groups, and the two-route average of matrix coefficients.

The group mean of g -> <x, pi(g) y> is computed once by direct summation
over the group and once as <Px, Py> with P the orthogonal projector onto
the simultaneous fixed space (an SVD null space of the stacked generator
relations, so the two routes share no intermediate quantities).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NonUnitaryRepError
from .groups import CyclicProduct

UNITARY_TOL = 1e-10


class FiniteUnitaryRep:
    """Representation of CyclicProduct(m_1, ..., m_r) from one unitary image
    per coordinate generator. Images must commute and satisfy M_i^{m_i} = I."""

    def __init__(self, group: CyclicProduct, gen_images, check: bool = True):
        self.group = group
        self.gen_images = tuple(np.asarray(M, dtype=complex) for M in gen_images)
        if len(self.gen_images) != len(group.moduli):
            raise NonUnitaryRepError("one generator image per coordinate required")
        self.dim = self.gen_images[0].shape[0]
        # per-coordinate power tables
        self._powers = []
        for M, m in zip(self.gen_images, group.moduli):
            table = [np.eye(self.dim, dtype=complex)]
            for _ in range(m - 1):
                table.append(table[-1] @ M)
            self._powers.append(table)
        if check:
            self.check()

    def check(self, tol: float = UNITARY_TOL) -> None:
        eye = np.eye(self.dim)
        for M, m in zip(self.gen_images, self.group.moduli):
            if M.shape != (self.dim, self.dim):
                raise NonUnitaryRepError("generator images must share one dimension")
            if np.abs(M @ M.conj().T - eye).max() > tol:
                raise NonUnitaryRepError("generator image is not unitary")
            power = np.linalg.matrix_power(M, m)
            if np.abs(power - eye).max() > tol:
                raise NonUnitaryRepError("generator image violates its order relation")
        for i, A in enumerate(self.gen_images):
            for B in self.gen_images[i + 1 :]:
                if np.abs(A @ B - B @ A).max() > tol:
                    raise NonUnitaryRepError("generator images do not commute")
        for g in self.group.elements():
            M = self.image(g)
            if np.abs(M @ M.conj().T - eye).max() > tol:
                raise NonUnitaryRepError(f"image of {g!r} is not unitary")

    def image(self, g) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for table, power in zip(self._powers, g):
            out = out @ table[power]
        return out

    def fixed_space_basis(self, tol: float = UNITARY_TOL) -> np.ndarray:
        """Orthonormal basis (columns) of the simultaneous fixed space,
        via the SVD null space of the stacked (M_i - I)."""
        eye = np.eye(self.dim)
        stacked = np.vstack([M - eye for M in self.gen_images])
        _, s, vh = np.linalg.svd(stacked)
        cutoff = max(tol, s[0] * self.dim * np.finfo(float).eps) if s.size else tol
        rank = int((s > cutoff).sum())
        return vh[rank:].conj().T


class MatrixCoefficientMean(NamedTuple):
    group_average: complex
    fixed_space_inner: complex


def matrix_coefficient_mean(rep: FiniteUnitaryRep, x, y) -> MatrixCoefficientMean:
    """Mean over the group of <x, pi(g) y>, returned alongside the
    independently computed <Px, Py> for comparison."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    order = rep.group.order
    total = 0j
    for g in rep.group.elements():
        total += np.vdot(x, rep.image(g) @ y)
    average = total / order

    Q = rep.fixed_space_basis()
    inner = complex(np.vdot(Q.conj().T @ x, Q.conj().T @ y)) if Q.size else 0j
    return MatrixCoefficientMean(complex(average), inner)


@dataclass(frozen=True)
class RandomRepSpec:
    dim: int
    seed: int


def random_unitary_rep(group: CyclicProduct, dim: int, rng) -> FiniteUnitaryRep:
    """Seeded commuting unitaries: a common random eigenbasis with random
    integer character exponents per coordinate."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(z)
    images = []
    for m in group.moduli:
        exponents = rng.integers(0, m, size=dim)
        phases = np.exp(2j * np.pi * exponents / m)
        images.append(q @ np.diag(phases) @ q.conj().T)
    return FiniteUnitaryRep(group, images)
