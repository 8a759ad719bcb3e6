"""Symmetric coherent states ``|alpha exp(2 pi i j/N)>``, j = 0..N-1.

Only ``|alpha|^2`` enters the overlaps and hence every quantity computed
here; the phase of ``alpha`` is carried along for the Fock vectors only.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import discrimination
from .errors import BadGrid, CutoffTooLarge, NegativeCoefficient, OutOfRange
from .numerics import fourier_phases, root_of_unity
from .states import SymmetricSet, from_coefficients

MODULI_TOL = 1e-10
MAX_CUTOFF = 4096
DEFAULT_TAIL = 1e-12
POINTS_PER_UNIT = 100
RESOLUTION = 1e-11


@dataclass(frozen=True)
class CoherentFamily:
    alpha: complex
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise OutOfRange("a coherent family needs N >= 2")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def from_alpha_sq(cls, n: int, alpha_sq: float) -> "CoherentFamily":
        if alpha_sq < 0:
            raise OutOfRange("|alpha|^2 must be nonnegative")
        return cls(math.sqrt(alpha_sq), n)

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def amplitudes(self) -> np.ndarray:
        return self.alpha * fourier_phases(self.n)[1]


def coherent_overlap(family: CoherentFamily, j: int, jp: int) -> complex:
    """Exact overlap ``<alpha_jp|alpha_j> = exp(|alpha|^2 (exp(2 pi i (j - jp)/N) - 1))``."""
    return cmath.exp(family.alpha_sq * (root_of_unity(family.n, j - jp) - 1))


def analytic_gram(family: CoherentFamily) -> np.ndarray:
    """Circulant gram matrix ``G[j', j] = <alpha_j'|alpha_j>``."""
    n = family.n
    kernel = np.exp(family.alpha_sq * (fourier_phases(n)[1] - 1.0))
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return kernel[idx]


def _fourier_moduli(alpha_sq: float, n: int) -> np.ndarray:
    f = fourier_phases(n)
    kernel = np.exp(alpha_sq * (f[1] - 1.0))
    values = f.conj() @ kernel / n
    if np.max(np.abs(values.imag)) > MODULI_TOL:
        raise NegativeCoefficient("imaginary residue in coefficient moduli")
    moduli = values.real
    if np.min(moduli) < -MODULI_TOL:
        raise NegativeCoefficient(f"coefficient modulus {np.min(moduli):.3g} < 0")
    return np.clip(moduli, 0.0, None)


def _series_moduli(alpha_sq: float, n: int) -> np.ndarray:
    # Poisson weights folded mod N: |c_r|^2 = exp(-x) sum_{m = r mod N} x^m/m!
    if alpha_sq == 0.0:
        out = np.zeros(n)
        out[0] = 1.0
        return out
    top = int(alpha_sq + 40.0 * math.sqrt(alpha_sq) + 60.0)
    top += (-top - 1) % n
    m = np.arange(top + 1)
    log_terms = -alpha_sq + m * math.log(alpha_sq) - np.array([math.lgamma(k + 1.0) for k in m])
    return np.exp(log_terms).reshape(-1, n).sum(axis=0)


def coefficient_moduli(family: CoherentFamily, method: str = "fourier") -> np.ndarray:
    """Squared canonical coefficients ``|c_r|^2`` of the coherent family.

    ``method="fourier"`` sums ``(1/N) sum_j exp(-2 pi i j r/N) exp(|alpha|^2 (w^j - 1))``
    directly; its error is ~1e-16 absolute, so moduli far below that are noise.
    ``method="series"`` folds the photon-number distribution modulo N, which
    is accurate to relative precision and is what sweeps use to rank the
    moduli. Both agree to ~1e-15 absolute.
    """
    if method == "fourier":
        return _fourier_moduli(family.alpha_sq, family.n)
    if method == "series":
        return _series_moduli(family.alpha_sq, family.n)
    raise ValueError(f"unknown method {method!r}")


def symmetric_set(family: CoherentFamily) -> SymmetricSet:
    """Canonical form of the family; each ``c_r`` is real and positive.

    ``c_r`` is the norm of the projection of ``|alpha>`` onto the Fock sector
    ``n = r mod N`` (phases of ``alpha`` only relabel that basis).
    """
    return from_coefficients(np.sqrt(coefficient_moduli(family, method="series")))


@dataclass(frozen=True)
class SweepTable:
    grid: np.ndarray
    moduli: np.ndarray  # shape (points, N)
    bound: np.ndarray
    argmin: np.ndarray
    max_decrease: float  # largest drop of the bound between neighbours (0 if nondecreasing)

    @property
    def nondecreasing(self) -> bool:
        return self.max_decrease <= 0.0


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0 or np.any(g < 0) or not np.all(np.isfinite(g)) or np.any(np.diff(g) <= 0):
        raise BadGrid("grid must be nonempty, nonnegative and strictly increasing")
    return g


def bound_vs_alpha(n: int, grid: Sequence[float], method: str = "series") -> SweepTable:
    """Moduli, optimal success probability and weakest index along a grid of ``|alpha|^2``."""
    g = _check_grid(grid)
    moduli = np.array([coefficient_moduli(CoherentFamily.from_alpha_sq(n, x), method) for x in g])
    bound = np.array([discrimination.optimal_bound(row) for row in moduli])
    argmin = np.argmin(moduli, axis=1)
    drops = -np.diff(bound)
    max_decrease = float(max(drops.max(initial=0.0), 0.0))
    return SweepTable(g, moduli, bound, argmin, max_decrease)


def default_grid(alpha_sq_max: float, points_per_unit: int = POINTS_PER_UNIT) -> np.ndarray:
    return np.linspace(0.0, alpha_sq_max, max(int(math.ceil(alpha_sq_max * points_per_unit)), 1) + 1)


def derivative_residual(family: CoherentFamily, r: int, step: float) -> float:
    """Gap between a central difference of ``|c_r|^2`` in ``|alpha|^2`` and ``|c_{r-1}|^2 - |c_r|^2``."""
    if not 1e-7 <= step <= 1e-3:
        raise OutOfRange(f"step {step} outside [1e-7, 1e-3]")
    x, n = family.alpha_sq, family.n
    r %= n
    up = _fourier_moduli_unchecked(x + step, n)[r]
    down = _fourier_moduli_unchecked(x - step, n)[r]
    here = _fourier_moduli(x, n)
    return abs((up - down) / (2 * step) - (here[(r - 1) % n] - here[r]))


def _fourier_moduli_unchecked(alpha_sq: float, n: int) -> np.ndarray:
    # also valid for slightly negative alpha_sq, as needed by central differences at 0
    f = fourier_phases(n)
    return (f.conj() @ np.exp(alpha_sq * (f[1] - 1.0))).real / n


def central_difference(n: int, alpha_sq: float, r: int, step: float = 1e-4) -> float:
    up = _fourier_moduli_unchecked(alpha_sq + step, n)[r % n]
    down = _fourier_moduli_unchecked(alpha_sq - step, n)[r % n]
    return (up - down) / (2 * step)


class Crossing(NamedTuple):
    alpha_sq: float
    outgoing: int
    incoming: int


def find_crossings(
    n: int,
    alpha_sq_max: float,
    points_per_unit: int = POINTS_PER_UNIT,
    width: float = 1e-8,
    resolution: float = RESOLUTION,
) -> list[Crossing]:
    """Locate the values of ``|alpha|^2`` where the smallest modulus changes index.

    The argmin is scanned on a uniform grid (skipping ``|alpha|^2 = 0``, where
    all but ``|c_0|^2`` vanish) and each change is bisected on
    ``|c_in|^2 - |c_out|^2`` until the bracket is narrower than ``width``.

    The moduli approach ``1/N`` exponentially fast, so past some point their
    spread is below double-precision rounding and the ordering is noise. The
    scan stops (with a warning) once ``max - min`` of the moduli falls below
    ``resolution``.

    Raises:
        BadGrid: if the argmin moves by more than one index between neighbours.
    """
    if alpha_sq_max <= 0:
        raise OutOfRange("alpha_sq_max must be positive")
    grid = default_grid(alpha_sq_max, points_per_unit)[1:]
    table = bound_vs_alpha(n, grid, method="series")
    spread = table.moduli.max(axis=1) - table.moduli.min(axis=1)
    unresolved = np.flatnonzero(spread < resolution)
    if unresolved.size:
        stop = int(unresolved[0])
        warnings.warn(
            f"moduli agree to within {resolution:g} beyond |alpha|^2 = {grid[stop]:.4g}; "
            "crossings past that point are not resolvable in double precision",
            RuntimeWarning,
            stacklevel=2,
        )
        grid = grid[:stop]
    crossings = []
    for i in range(1, len(grid)):
        old, new = int(table.argmin[i - 1]), int(table.argmin[i])
        if old == new:
            continue
        if (new - old) % n not in (1, n - 1):
            raise BadGrid(f"argmin jumped from {old} to {new} near |alpha|^2={grid[i]:.4g}; refine the grid")

        def gap(x: float) -> float:
            m = _series_moduli(x, n)
            return m[new] - m[old]

        lo, hi = float(grid[i - 1]), float(grid[i])
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            if gap(mid) > 0:
                lo = mid
            else:
                hi = mid
        crossings.append(Crossing(0.5 * (lo + hi), old, new))
    return crossings


class FockVectors(NamedTuple):
    vectors: np.ndarray  # shape (cutoff + 1, N)
    cutoff: int


def fock_vectors(family: CoherentFamily, tail_epsilon: float = DEFAULT_TAIL) -> FockVectors:
    """Number-state amplitudes of the family, truncated where the Poisson tail drops below ``tail_epsilon``."""
    if not 0.0 < tail_epsilon <= 1e-6:
        raise OutOfRange("tail_epsilon must lie in (0, 1e-6]")
    x = family.alpha_sq
    if x == 0.0:
        return FockVectors(np.ones((1, family.n), dtype=complex), 0)
    top = int(x + 40.0 * math.sqrt(x) + 80.0)
    m = np.arange(top + 1)
    log_terms = -x + m * math.log(x) - np.array([math.lgamma(k + 1.0) for k in m])
    terms = np.exp(log_terms)
    # tail[k] = sum_{m > k} terms[m]
    tail = np.concatenate([np.cumsum(terms[::-1])[::-1][1:], [0.0]])
    below = np.flatnonzero(tail < tail_epsilon)
    cutoff = int(below[0])
    if cutoff > MAX_CUTOFF:
        raise CutoffTooLarge(f"truncation would need {cutoff} number states (> {MAX_CUTOFF})")
    m = m[: cutoff + 1]
    magnitude = np.exp(0.5 * log_terms[: cutoff + 1])
    phases = np.exp(1j * np.outer(m, np.angle(family.amplitudes)))
    return FockVectors(magnitude[:, None] * phases, cutoff)


def phase_unitary(n: int, cutoff: int) -> np.ndarray:
    """``exp(2 pi i n_hat/N)`` restricted to number states ``0..cutoff``."""
    return np.diag(np.array([root_of_unity(n, k) for k in range(cutoff + 1)]))
