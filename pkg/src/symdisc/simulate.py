"""Monte Carlo checks of a zero-error measurement, and a probe of the
convexity of the largest eigenvalue."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .discrimination import Povm, outcome_probabilities
from .errors import BadDistribution
from .numerics import RandomStream, max_eigenvalue, random_hermitian
from .states import SymmetricSet

FAIL = -1
CLAMP_TOL = 1e-12
SUM_TOL = 1e-9


def outcome_distribution(povm: Povm, states: SymmetricSet) -> np.ndarray:
    """Row ``j`` holds the Born probabilities of outcomes ``0..N-1`` then FAIL for state ``j``.

    Values down to ``-1e-12`` are clamped to zero and rows whose total is off
    by at most ``1e-9`` are renormalized; anything worse is an error.
    """
    p = outcome_probabilities(povm, states)
    if np.min(p) < -CLAMP_TOL:
        raise BadDistribution(f"negative outcome probability {np.min(p):.3g}")
    p = np.clip(p, 0.0, None)
    totals = p.sum(axis=1)
    if np.max(np.abs(totals - 1.0)) > SUM_TOL:
        raise BadDistribution(f"outcome probabilities sum to {totals}, expected 1")
    return p / totals[:, None]


def _draw(cdf_row: np.ndarray, u):
    k = np.searchsorted(cdf_row, u, side="right")
    return np.minimum(k, len(cdf_row) - 1)


def sample_outcome(povm: Povm, state_index: int, states: SymmetricSet, stream: RandomStream) -> int:
    """Measure ``psi_state_index`` once; returns the detected index or :data:`FAIL`."""
    cdf = np.cumsum(outcome_distribution(povm, states)[state_index])
    k = int(_draw(cdf, stream.next_uniform()))
    return FAIL if k == states.n else k


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    seed: int
    per_state: np.ndarray  # rows (correct, wrong, inconclusive)
    outcome_counts: np.ndarray  # rows: prepared state; columns: outcomes 0..N-1, FAIL
    expected_success: float
    expected_outcomes: np.ndarray = field(repr=False)

    @property
    def wrong(self) -> int:
        return int(self.per_state[:, 1].sum())

    @property
    def empirical_success(self) -> float:
        return float(self.per_state[:, 0].sum() / self.trials)

    @property
    def standard_error(self) -> float:
        p = self.expected_success
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    @property
    def z_score(self) -> float:
        se = self.standard_error
        diff = self.empirical_success - self.expected_success
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / se

    @property
    def within_5_sigma(self) -> bool:
        return abs(self.z_score) <= 5.0

    def summary(self) -> str:
        lines = [
            f"trials            {self.trials}",
            f"seed              {self.seed}",
            f"expected success  {self.expected_success:.17g}",
            f"empirical success {self.empirical_success:.17g}",
            f"standard error    {self.standard_error:.6g}",
            f"z-score           {self.z_score:.6g}",
            f"wrong conclusive  {self.wrong}",
            "state,correct,wrong,inconclusive",
        ]
        lines += [f"{j},{c},{w},{f}" for j, (c, w, f) in enumerate(self.per_state)]
        return "\n".join(lines)


def run_trials(states: SymmetricSet, povm: Povm, trials: int, seed: int) -> SimulationReport:
    """Prepare uniformly random states and measure each once.

    Every trial consumes two uniforms from the stream: one picks the state as
    ``floor(u N)``, the other draws the outcome by inverse CDF over the order
    ``0..N-1, FAIL``. This matches successive :func:`sample_outcome` calls.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = states.n
    dist = outcome_distribution(povm, states)
    cdf = np.cumsum(dist, axis=1)
    stream = RandomStream(seed)
    u = stream.uniforms((trials, 2))
    prepared = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
    outcomes = np.empty(trials, dtype=np.int64)
    for j in range(n):
        mask = prepared == j
        outcomes[mask] = _draw(cdf[j], u[mask, 1])
    counts = np.zeros((n, n + 1), dtype=np.int64)
    np.add.at(counts, (prepared, outcomes), 1)
    correct = np.diag(counts[:, :n])
    inconclusive = counts[:, n]
    wrong = counts[:, :n].sum(axis=1) - correct
    per_state = np.column_stack([correct, wrong, inconclusive])
    expected = float(np.mean(np.diag(dist[:, :n])))
    return SimulationReport(trials, int(seed), per_state, counts, expected, dist)


def convexity_slack(operators: Sequence[np.ndarray], weights: Sequence[float]) -> float:
    """``sum_l a_l lambda_max(E_l) - lambda_max(sum_l a_l E_l)``; nonnegative by convexity."""
    combined = sum(a * e for a, e in zip(weights, operators))
    return sum(a * max_eigenvalue(e) for a, e in zip(weights, operators)) - max_eigenvalue(combined)


def convexity_probe(
    dims: Sequence[int] = tuple(range(2, 9)),
    weights_per_case: int | Sequence[int] = (2, 3, 4, 5),
    cases: int = 1000,
    seed: int = 1,
) -> float:
    """Smallest convexity slack over random Hermitian tuples with positive weights.

    For each case the dimension is drawn from ``dims`` and the number of
    operators from ``weights_per_case``; weights are uniform on (0, 1].
    """
    if any(d < 2 for d in dims):
        raise ValueError("dimensions must be >= 2")
    counts = [weights_per_case] if isinstance(weights_per_case, int) else list(weights_per_case)
    stream = RandomStream(seed)
    worst = math.inf
    for _ in range(cases):
        dim = dims[min(int(stream.next_uniform() * len(dims)), len(dims) - 1)]
        k = counts[min(int(stream.next_uniform() * len(counts)), len(counts) - 1)]
        operators = [random_hermitian(stream, dim) for _ in range(k)]
        weights = 1.0 - stream.uniforms(k)
        worst = min(worst, convexity_slack(operators, weights))
    return worst
