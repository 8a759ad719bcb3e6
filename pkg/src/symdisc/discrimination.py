"""Zero-error measurements for symmetric states and their optimum.

The measurement for conditional success probabilities ``P_j`` has detection
Kraus operators ``A_j = sqrt(P_j)/<perp_j|psi_j> |e_j><perp_j|`` and a
failure operator ``A_F = sqrt(1 - E_D)``. For equal priors the best average
success probability is ``N * min_r |c_r|^2``; :func:`brute_force_max`
recovers it numerically without using that formula.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numerics
from .errors import (
    BadDistribution,
    DegenerateOverlap,
    InadmissibleProbabilities,
    OutOfRange,
)
from .states import SymmetricSet, ReciprocalSet, reciprocal_set

PSD_TOL = numerics.PSD_TOL
OVERLAP_TOL = 1e-12


@dataclass(frozen=True)
class ConditionalProbabilities:
    """Per-state success probabilities ``P_j``; priors are fixed to ``1/N``."""

    P: np.ndarray

    def __post_init__(self):
        p = np.array(self.P, dtype=float).ravel()
        if p.size == 0 or np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
            raise OutOfRange(f"conditional probabilities must lie in [0, 1], got {p}")
        p.setflags(write=False)
        object.__setattr__(self, "P", p)

    @classmethod
    def uniform(cls, n: int, value: float) -> "ConditionalProbabilities":
        return cls(np.full(n, float(value)))

    @property
    def priors(self) -> np.ndarray:
        return np.full(len(self.P), 1.0 / len(self.P))

    @property
    def average(self) -> float:
        """The average success probability ``P_D = sum_j eta_j P_j``."""
        return float(np.dot(self.priors, self.P))


def _as_probs(probs, n: int) -> ConditionalProbabilities:
    if not isinstance(probs, ConditionalProbabilities):
        probs = ConditionalProbabilities(probs)
    if len(probs.P) != n:
        raise ValueError(f"expected {n} conditional probabilities, got {len(probs.P)}")
    return probs


@dataclass(frozen=True)
class KrausSet:
    detection: np.ndarray  # shape (N, d, d)
    failure: np.ndarray


@dataclass(frozen=True)
class Povm:
    detection_elements: np.ndarray  # shape (N, d, d)
    failure_element: np.ndarray
    total_detection: np.ndarray

    @property
    def n(self) -> int:
        return len(self.detection_elements)

    def completeness_residual(self) -> float:
        d = self.failure_element.shape[0]
        return float(np.max(np.abs(self.failure_element + self.total_detection - np.eye(d))))


def build_kraus(
    states: SymmetricSet,
    recip: ReciprocalSet,
    probs,
    tol: float = PSD_TOL,
) -> KrausSet:
    """Kraus operators of the zero-error measurement with success probabilities ``probs``.

    ``A_j`` maps ``psi_j`` to ``sqrt(P_j) e_j`` and annihilates every other
    state. The failure operator is the positive square root of ``1 - E_D``.

    Raises:
        DegenerateOverlap: if some ``|<perp_j|psi_j>|`` is ~0.
        InadmissibleProbabilities: if ``1 - E_D`` has an eigenvalue below ``-tol``.
    """
    n = states.n
    probs = _as_probs(probs, n)
    # overlaps[j] = <perp_j|psi_j>
    overlaps = np.einsum("kj,kj->j", recip.vectors.conj(), states.vectors)
    if np.min(np.abs(overlaps)) <= OVERLAP_TOL:
        raise DegenerateOverlap("a reciprocal state is orthogonal to its partner")
    detection = np.zeros((n, n, n), dtype=complex)
    for j in range(n):
        detection[j, j, :] = math.sqrt(probs.P[j]) / overlaps[j] * recip.vectors[:, j].conj()
    e_d = np.einsum("jab,jac->bc", detection.conj(), detection)
    e_f = np.eye(n) - e_d
    e_f = 0.5 * (e_f + e_f.conj().T)
    lowest = numerics.min_eigenvalue(e_f)
    if lowest < -tol:
        raise InadmissibleProbabilities(
            f"failure element has eigenvalue {lowest:.3g} < 0; reduce the conditional probabilities"
        )
    return KrausSet(detection, numerics.psd_sqrt(e_f))


def povm_from_kraus(kraus: KrausSet, tol: float = PSD_TOL) -> Povm:
    detection = np.einsum("jab,jac->jbc", kraus.detection.conj(), kraus.detection)
    failure = kraus.failure.conj().T @ kraus.failure
    total = detection.sum(axis=0)
    for j, element in enumerate(detection):
        if not numerics.is_positive_semidefinite(element, tol):
            raise InadmissibleProbabilities(f"detection element {j} is not positive")
    if not numerics.is_positive_semidefinite(failure, tol):
        raise InadmissibleProbabilities("failure element is not positive")
    return Povm(detection, failure, total)


def detection_operator(states: SymmetricSet, probs) -> np.ndarray:
    """Total detection operator ``E_D`` assembled directly in the gamma basis.

    ``E_D[r', r] = (1/N^2) sum_j P_j exp(2 pi i j (r' - r)/N) / (conj(c_r') c_r)``
    """
    n = states.n
    probs = _as_probs(probs, n)
    inv = 1.0 / states.coefficients
    f = numerics.fourier_phases(n)
    # phase[j, r', r] = exp(2 pi i j (r' - r)/N)
    phase = f[:, :, None] * f.conj()[:, None, :]
    weights = np.einsum("j,jab->ab", probs.P, phase)
    return weights * np.conj(inv)[:, None] * inv[None, :] / n**2


def averaged_operator(states: SymmetricSet, probs) -> np.ndarray:
    """Average of ``U^l E_D U^-l`` over the cyclic group."""
    e_d = detection_operator(states, probs)
    u = states.cycling_unitary
    total = np.zeros_like(e_d)
    ul = np.eye(states.n, dtype=complex)
    for _ in range(states.n):
        total += ul @ e_d @ ul.conj().T
        ul = u @ ul
    return total / states.n


def optimal_bound(moduli: Sequence[float], tol: float = 1e-9) -> float:
    """Least upper bound ``N * min_r |c_r|^2`` on the average success probability."""
    m = np.asarray(moduli, dtype=float).ravel()
    if m.size == 0 or np.min(m) < -tol or abs(float(np.sum(m)) - 1.0) > tol:
        raise BadDistribution(f"moduli must be nonnegative and sum to 1, got {m}")
    return float(np.clip(m.size * np.min(m), 0.0, 1.0))


def weakest_component(moduli: Sequence[float]) -> int:
    """Index of the smallest modulus; ties go to the lowest index."""
    return int(np.argmin(np.asarray(moduli, dtype=float)))


def idp_limit(overlap: complex) -> float:
    """Two-state optimum ``1 - |<psi_+|psi_->|``."""
    a = abs(complex(overlap))
    if a > 1.0 + 1e-12:
        raise OutOfRange(f"|overlap| = {a} exceeds 1")
    return max(0.0, 1.0 - a)


def optimal_povm(states: SymmetricSet, tol: float = PSD_TOL) -> tuple[Povm, float]:
    """The optimal measurement: every ``P_j`` equal to the bound."""
    bound = optimal_bound(states.moduli)
    probs = ConditionalProbabilities.uniform(states.n, bound)
    kraus = build_kraus(states, reciprocal_set(states), probs, tol=tol)
    return povm_from_kraus(kraus, tol=tol), bound


def outcome_probabilities(povm: Povm, states: SymmetricSet) -> np.ndarray:
    """``p[j, j'] = <psi_j|E_Dj'|psi_j>`` with a final FAIL column ``<psi_j|E_F|psi_j>``."""
    v = states.vectors
    det = np.einsum("aj,kab,bj->jk", v.conj(), povm.detection_elements, v).real
    fail = np.einsum("aj,ab,bj->j", v.conj(), povm.failure_element, v).real
    return np.column_stack([det, fail])


def zero_error_residual(povm: Povm, states: SymmetricSet, probs) -> float:
    probs = _as_probs(probs, states.n)
    p = outcome_probabilities(povm, states)[:, : states.n]
    return float(np.max(np.abs(p - np.diag(probs.P))))


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`brute_force_max`."""

    coarse_step: float = 0.02
    final_step: float = 1e-5
    feasibility_tol: float = 1e-12
    max_iterations: int = 200_000


class _Feasibility:
    """Batched evaluation of ``lambda_max(E_D(P))`` via LAPACK."""

    def __init__(self, states: SymmetricSet):
        recip = reciprocal_set(states)
        overlaps = np.einsum("kj,kj->j", recip.vectors.conj(), states.vectors)
        perp = recip.vectors / np.conj(overlaps)[None, :]
        # E_D(P) = sum_j P_j |perp_j><perp_j| / |<perp_j|psi_j>|^2
        self.projectors = np.einsum("aj,bj->jab", perp, perp.conj())

    def lambda_max(self, p: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(p)
        out = np.empty(len(p))
        chunk = 1 << 16
        for start in range(0, len(p), chunk):
            mats = np.einsum("sj,jab->sab", p[start : start + chunk], self.projectors)
            out[start : start + chunk] = np.linalg.eigvalsh(mats)[:, -1]
        return out


def brute_force_max(states: SymmetricSet, config: OptimizerConfig | None = None) -> float:
    """Numerically maximize ``(1/N) sum_j P_j`` subject to ``lambda_max(E_D) <= 1``.

    A coarse grid over ``[0, 1]^N`` is searched first. Feasibility is
    monotone in each ``P_j`` (``E_D`` grows in the Loewner order), so for each
    prefix ``(P_0, ..., P_{N-2})`` the largest feasible last coordinate is
    located by bisection over the grid values. The best grid point is then
    refined by a pattern search whose trial points are rescaled back onto the
    feasible boundary, halving the step until it reaches ``final_step``.

    Only intended for ``N <= 4``.
    """
    cfg = config or OptimizerConfig()
    n = states.n
    if n > 4:
        raise ValueError("brute_force_max supports N <= 4 only")
    feas = _Feasibility(states)
    limit = 1.0 + cfg.feasibility_tol

    levels = np.linspace(0.0, 1.0, int(round(1.0 / cfg.coarse_step)) + 1)
    top = len(levels) - 1
    prefixes = np.array(list(itertools.product(levels, repeat=n - 1))).reshape(-1, n - 1)

    def feasible(last_idx: np.ndarray) -> np.ndarray:
        p = np.column_stack([prefixes, levels[last_idx]])
        return feas.lambda_max(p) <= limit

    ok = feasible(np.zeros(len(prefixes), dtype=int))
    lo = np.zeros(len(prefixes), dtype=int)
    hi = np.full(len(prefixes), top + 1)
    while np.any(hi - lo > 1):
        mid = (lo + hi) // 2
        active = hi - lo > 1
        f = np.ones(len(prefixes), dtype=bool)
        f[active] = feasible(np.where(active, mid, 0))[active]
        lo = np.where(active & f, mid, lo)
        hi = np.where(active & ~f, mid, hi)
    totals = np.where(ok, prefixes.sum(axis=1) + levels[lo], -np.inf)
    best_idx = int(np.argmax(totals))
    best = np.append(prefixes[best_idx], levels[lo[best_idx]])

    def to_boundary(p: np.ndarray) -> np.ndarray:
        p = np.clip(p, 0.0, 1.0)
        lam = feas.lambda_max(p)
        scale = np.full(len(p), np.inf)
        np.divide(1.0, lam, out=scale, where=lam > 0)
        pmax = p.max(axis=1)
        scale = np.minimum(scale, np.divide(1.0, pmax, out=np.full(len(p), np.inf), where=pmax > 0))
        scale[~np.isfinite(scale)] = 0.0
        return p * scale[:, None]

    directions = [e for e in np.eye(n)]
    directions += [-e for e in np.eye(n)]
    directions += [np.eye(n)[i] - np.eye(n)[k] for i in range(n) for k in range(n) if i != k]
    directions = np.array(directions)

    current = to_boundary(best[None, :])[0]
    if current.sum() < best.sum():
        current = best
    step = cfg.coarse_step / 2
    iterations = 0
    while iterations < cfg.max_iterations:
        iterations += 1
        candidates = to_boundary(current[None, :] + step * directions)
        sums = candidates.sum(axis=1)
        k = int(np.argmax(sums))
        if sums[k] > current.sum() + 1e-15:
            current = candidates[k]
        elif step <= cfg.final_step:
            break
        else:
            step = max(step / 2, cfg.final_step)
    return float(current.sum() / n)
