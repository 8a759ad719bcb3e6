"""Small dense complex linear algebra kernel.

Matrices are plain ``numpy`` complex arrays. The eigensolver is a cyclic
complex Jacobi iteration, which is robust for the tiny Hermitian matrices
(dimension <= 64) that appear in this package.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian

MAX_DIM = 64
HERMITIAN_RTOL = 1e-12
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
PSD_TOL = 1e-9


@dataclass(frozen=True)
class EigDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmatrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def hermitian_deviation(m) -> float:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return math.inf
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return hermitian_deviation(a) <= rtol * float(np.max(np.abs(a)))


def hermitian_eig(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigDecomposition:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary and then applies the real symmetric Jacobi rotation.
    Iteration stops once the off-diagonal Frobenius norm drops below
    ``tol * ||M||_F``.

    Raises:
        NotHermitian: if ``m`` is not square or fails the symmetry check.
        NoConvergence: if ``max_sweeps`` sweeps are not enough.
    """
    a = as_cmatrix(m)
    n = a.shape[0]
    if a.shape[1] != n or not is_hermitian(a):
        raise NotHermitian(f"matrix of shape {a.shape} is not Hermitian")
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    threshold = tol * scale

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm() -> float:
        return float(np.linalg.norm(a[off_mask]))

    converged = n == 1 or off_norm() <= threshold
    sweeps = 0
    while not converged:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = complex(a[p, q])
                r = abs(z)
                if r == 0.0:
                    continue
                w = (z / r).conjugate()
                theta = 0.5 * math.atan2(2.0 * r, a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                # rot = diag(1, w) @ [[c, s], [-s, c]]
                rot = np.array([[c, s], [-s * w, c * w]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ rot
        converged = off_norm() <= threshold

    evals = np.real(np.diagonal(a)).copy()
    order = np.argsort(evals, kind="stable")
    return EigDecomposition(evals[order], v[:, order])


def eigenvalues(m) -> np.ndarray:
    return hermitian_eig(m).eigenvalues


def max_eigenvalue(m) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    return float(hermitian_eig(m).eigenvalues[-1])


def min_eigenvalue(m) -> float:
    return float(hermitian_eig(m).eigenvalues[0])


def is_positive_semidefinite(m, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(m) >= -tol


def psd_sqrt(m) -> np.ndarray:
    """Hermitian square root; eigenvalues below zero are clamped to zero."""
    eig = hermitian_eig(m)
    root = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    v = eig.eigenvectors
    return (v * root) @ v.conj().T


def root_of_unity(n: int, k: int) -> complex:
    """exp(2*pi*i*k/n) with k reduced mod n.

    Exact at the quarter turns, and ``root_of_unity(n, -k)`` is the exact
    conjugate of ``root_of_unity(n, k)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k %= n
    if (4 * k) % n == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // n]
    if 2 * k > n:
        return cmath.exp(2j * math.pi * (n - k) / n).conjugate()
    return cmath.exp(2j * math.pi * k / n)


def fourier_phases(n: int) -> np.ndarray:
    """Matrix ``F[j, k] = exp(2*pi*i*j*k/n)`` built from exactly reduced exponents."""
    jk = np.outer(np.arange(n), np.arange(n)) % n
    table = np.array([root_of_unity(n, m) for m in range(n)])
    return table[jk]


class RandomStream:
    """Seeded, reproducible stream of uniform doubles on [0, 1).

    Backed by numpy's ``SFC64`` generator (a 256-bit-state add/shift/rotate
    design with a documented transition function). Each double takes the
    high 53 bits of one 64-bit output, so batched draws via :meth:`uniforms`
    coincide with repeated :meth:`next_uniform` calls.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self._gen = np.random.Generator(np.random.SFC64(seed))

    def next_uniform(self) -> float:
        return float(self._gen.random())

    def uniforms(self, size) -> np.ndarray:
        return self._gen.random(size)

    def split(self, index: int) -> "RandomStream":
        """Independent child stream derived deterministically from (seed, index)."""
        child = np.random.SeedSequence(self.seed, spawn_key=(int(index),))
        stream = RandomStream.__new__(RandomStream)
        stream.seed = self.seed
        stream._gen = np.random.Generator(np.random.SFC64(child))
        return stream


def next_uniform(stream: RandomStream) -> float:
    return stream.next_uniform()


def random_hermitian(stream: RandomStream, dim: int) -> np.ndarray:
    """Hermitian matrix with real and imaginary parts uniform on [-1, 1)."""
    u = 2.0 * stream.uniforms((2, dim, dim)) - 1.0
    m = u[0] + 1j * u[1]
    return 0.5 * (m + m.conj().T)
