"""Linearly independent symmetric state sets in the canonical basis.

A symmetric set is generated from ``psi_0 = sum_k c_k |gamma_k>`` by the
cycling unitary ``U = diag(exp(2*pi*i*k/N))``, so that
``psi_j[k] = c_k * exp(2*pi*i*j*k/N)``. Vectors are stored as the columns
of an ``N x N`` array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadLength,
    DegenerateCoefficient,
    DimensionMismatch,
    NegativeCoefficient,
    NotCirculant,
    NotNormalized,
    OutOfRange,
)
from .numerics import as_cmatrix, fourier_phases

INDEPENDENCE_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
CIRCULANT_TOL = 1e-8
MODULI_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymmetricSet:
    coefficients: np.ndarray
    vectors: np.ndarray
    cycling_unitary: np.ndarray

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def moduli(self) -> np.ndarray:
        """Squared moduli ``|c_k|^2`` of the canonical coefficients."""
        return np.abs(self.coefficients) ** 2

    def state(self, j: int) -> np.ndarray:
        return self.vectors[:, j % self.n]


@dataclass(frozen=True)
class ReciprocalSet:
    vectors: np.ndarray
    normalization_z: float

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def state(self, j: int) -> np.ndarray:
        return self.vectors[:, j % self.n]


def cycling_unitary(n: int) -> np.ndarray:
    return np.diag(fourier_phases(n)[1])


def from_coefficients(coefficients: Sequence[complex], tol: float = INDEPENDENCE_TOL) -> SymmetricSet:
    """Build the symmetric set generated by the canonical coefficients.

    The coefficients are renormalized to unit norm and multiplied by a common
    phase so that ``c_0`` is real and nonnegative.

    Raises:
        BadLength: fewer than two coefficients.
        NotNormalized: ``sum |c_k|^2`` differs from 1 by more than 1e-9.
        DegenerateCoefficient: some ``|c_k|^2 < tol``.
    """
    c = np.array(coefficients, dtype=complex).ravel()
    if len(c) < 2:
        raise BadLength(f"need at least 2 coefficients, got {len(c)}")
    norm_sq = float(np.sum(np.abs(c) ** 2))
    if abs(norm_sq - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"sum of |c_k|^2 is {norm_sq!r}, expected 1")
    c = c / math.sqrt(norm_sq)
    if abs(c[0]) > 0:
        c = c * (np.conj(c[0]) / abs(c[0]))
        c[0] = abs(c[0])
    moduli = np.abs(c) ** 2
    bad = np.flatnonzero(moduli < tol)
    if bad.size:
        raise DegenerateCoefficient(
            f"|c_{bad[0]}|^2 = {moduli[bad[0]]:.3g} < {tol:g}: coefficients must be non-zero "
            "for all r, otherwise the states are linearly dependent"
        )
    n = len(c)
    vectors = c[:, None] * fourier_phases(n)
    return SymmetricSet(_frozen(c), _frozen(vectors), _frozen(cycling_unitary(n)))


def two_state_from_angle(theta: float) -> SymmetricSet:
    """The pair ``cos(theta)|+> +/- sin(theta)|->`` with ``theta`` in [0, pi/4]."""
    if not 0.0 <= theta <= math.pi / 4 + 1e-15:
        raise OutOfRange(f"theta={theta!r} outside [0, pi/4]")
    return from_coefficients([math.cos(theta), math.sin(theta)])


def gram(states: SymmetricSet | np.ndarray) -> np.ndarray:
    """``G[j', j] = <psi_j'|psi_j>`` for a set or a matrix of column vectors."""
    v = states.vectors if isinstance(states, SymmetricSet) else as_cmatrix(states)
    return v.conj().T @ v


def circulant_deviation(g: np.ndarray) -> float:
    g = as_cmatrix(g)
    n = g.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return float(np.max(np.abs(g - g[0][idx])))


def coefficient_moduli_from_gram(g, tol: float = CIRCULANT_TOL) -> np.ndarray:
    """Recover ``|c_r|^2`` from the overlaps of a symmetric set.

    Evaluates ``(1/N^2) sum_{j,j'} exp(-2 pi i r (j - j')/N) <psi_j'|psi_j>``
    as a direct double sum.
    """
    g = as_cmatrix(g)
    n = g.shape[0]
    if g.shape[1] != n:
        raise DimensionMismatch(f"gram matrix must be square, got {g.shape}")
    dev = circulant_deviation(g)
    if dev > tol:
        raise NotCirculant(f"gram matrix deviates from circulant by {dev:.3g}")
    f = fourier_phases(n)
    # kernel[r, j', j] = exp(-2 pi i r (j - j')/N)
    kernel = f.conj()[:, None, :] * f[:, :, None]
    values = np.einsum("rab,ab->r", kernel, g) / n**2
    if np.max(np.abs(values.imag)) > MODULI_TOL:
        raise NotCirculant("overlaps are not Hermitian: moduli have imaginary residue")
    moduli = values.real
    if np.min(moduli) < -MODULI_TOL:
        raise NegativeCoefficient(f"recovered modulus {np.min(moduli):.3g} < 0")
    return np.clip(moduli, 0.0, None)


def reciprocal_set(states: SymmetricSet, tol: float = INDEPENDENCE_TOL) -> ReciprocalSet:
    """Unit vectors orthogonal to every state but their partner.

    ``perp_j[r] = Z^{-1/2} exp(2 pi i j r/N) / conj(c_r)`` with
    ``Z = sum_r |c_r|^{-2}``.
    """
    c = states.coefficients
    if np.min(np.abs(c) ** 2) < tol:
        raise DegenerateCoefficient("cannot form reciprocal states of a dependent set")
    z = float(np.sum(1.0 / np.abs(c) ** 2))
    vectors = (1.0 / np.conj(c))[:, None] * fourier_phases(states.n) / math.sqrt(z)
    return ReciprocalSet(_frozen(vectors), z)


def verify_symmetry(vectors, u, unitary_tol: float = 1e-10, tol: float = 1e-8) -> bool:
    """Check that ``u`` is unitary, cycles the column vectors and has ``u^N = 1``."""
    v = as_cmatrix(vectors)
    u = as_cmatrix(u)
    dim, n = v.shape
    if u.shape != (dim, dim):
        raise DimensionMismatch(f"unitary of shape {u.shape} does not act on vectors of length {dim}")
    eye = np.eye(dim)
    if np.max(np.abs(u.conj().T @ u - eye)) > unitary_tol:
        return False
    shifted = u @ np.roll(v, 1, axis=1)
    if np.max(np.abs(shifted - v)) > tol:
        return False
    return bool(np.max(np.abs(np.linalg.matrix_power(u, n) - eye)) <= tol)
