"""Finite-shot simulation of Pauli measurements on two events.

Setting a = 0 (or b = 0) means that party does not measure: its outcome is
recorded as +1 deterministically and, for temporal mechanisms, the channel
acts on the unmeasured state.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import apply_channel, validate_density
from .errors import ArgumentError, DataError
from .linalg import I2, paulis, tensor
from .pdo import Pdo, TemporalSpec, matrix_from_pauli_coeffs, pdo_from_pauli_coeffs

_SIGMA = paulis()
OUTCOMES = (1, -1)


def projector(a, x):
    """Pi_{x|a} = (I + x sigma_a)/2; for a = 0 the 'outcome' +1 is certain."""
    if a not in (0, 1, 2, 3):
        raise ArgumentError(f"setting must be 0..3, got {a!r}")
    if x not in OUTCOMES:
        raise ArgumentError(f"outcome must be +1 or -1, got {x!r}")
    if a == 0:
        return I2.copy() if x == 1 else np.zeros((2, 2), dtype=complex)
    return 0.5 * (I2 + x * _SIGMA[a])


@dataclass(frozen=True, eq=False)
class Mechanism:
    """How the two events are correlated.

    ``kind`` is 'spatial' (``state`` is a two-qubit density operator),
    'temporal' (``temporal`` holds the initial state, channel and direction),
    or 'mixture' (``components`` is a list of (weight, Mechanism), one
    mechanism drawn per shot).
    """

    kind: str
    state: Optional[np.ndarray] = None
    temporal: Optional[TemporalSpec] = None
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == "spatial":
            rho = validate_density(self.state, "spatial state")
            if rho.shape != (4, 4):
                raise ArgumentError("spatial mechanism needs a two-qubit state")
            object.__setattr__(self, "state", rho)
        elif self.kind == "temporal":
            if not isinstance(self.temporal, TemporalSpec):
                raise ArgumentError("temporal mechanism needs a TemporalSpec")
        elif self.kind == "mixture":
            comps = tuple((float(w), m) for w, m in self.components)
            if not comps or any(w < 0 for w, _ in comps) or abs(sum(w for w, _ in comps) - 1) > 1e-12:
                raise ArgumentError("mixture weights must be non-negative and sum to 1")
            object.__setattr__(self, "components", comps)
        else:
            raise ArgumentError(f"unknown mechanism kind {self.kind!r}")

    @classmethod
    def spatial(cls, rho_ab):
        return cls("spatial", state=rho_ab)

    @classmethod
    def temporal_from(cls, initial, channel, direction="forward"):
        return cls("temporal", temporal=TemporalSpec(initial, channel, direction))

    @classmethod
    def mixture(cls, components):
        return cls("mixture", components=tuple(components))


def joint_probability(m, a, b, x, y):
    """Pr(x, y | a, b) for Alice's setting a and Bob's setting b."""
    pa = projector(a, x)
    pb = projector(b, y)
    if m.kind == "spatial":
        return float(np.trace(tensor(pa, pb) @ m.state).real)
    if m.kind == "temporal":
        spec = m.temporal
        first, second = (pa, pb) if spec.direction == "forward" else (pb, pa)
        out = apply_channel(spec.channel.choi, first @ spec.initial @ first)
        return float(np.trace(out @ second).real)
    return float(sum(w * joint_probability(c, a, b, x, y) for w, c in m.components))


def probability_table(m, a, b):
    """2x2 array P[i, j] = Pr(OUTCOMES[i], OUTCOMES[j] | a, b)."""
    return np.array([[joint_probability(m, a, b, x, y) for y in OUTCOMES] for x in OUTCOMES])


def exact_correlations(m):
    """r_ab = sum_xy x y Pr(x, y | a, b) for all 16 settings."""
    sign = np.outer(OUTCOMES, OUTCOMES)
    return np.array([[np.sum(sign * probability_table(m, a, b)) for b in range(4)] for a in range(4)])


def exact_pdo(m):
    """Infinite-shot reconstruction straight from the Born-rule probabilities."""
    return Pdo(matrix_from_pauli_coeffs(exact_correlations(m)), {"construction": "exact-probabilities"})


@dataclass
class CorrelationEstimate:
    r_hat: np.ndarray
    shots_per_setting: int
    standard_errors: np.ndarray
    counts: np.ndarray = field(repr=False, default=None)


def _sample_setting(table, shots, rng):
    """Counts of (x, y) drawn by first sampling x, then y conditioned on x."""
    table = np.clip(table, 0.0, None)
    rows = table.sum(axis=1)
    counts = np.zeros((2, 2), dtype=np.int64)
    n_plus = rng.binomial(shots, min(rows[0] / rows.sum(), 1.0))
    for i, n in enumerate((n_plus, shots - n_plus)):
        if n == 0:
            continue
        k = rng.binomial(n, min(table[i, 0] / rows[i], 1.0))
        counts[i] = (k, n - k)
    return counts


def sample_correlations(m, shots_per_setting, seed=0):
    """Estimate every r_ab from ``shots_per_setting`` rounds per setting pair.

    Setting (a, b) draws from its own generator seeded with (seed, 4a + b),
    so results do not depend on evaluation order.
    """
    if int(shots_per_setting) != shots_per_setting or shots_per_setting < 1:
        raise ArgumentError(f"shots per setting must be a positive integer, got {shots_per_setting!r}")
    shots = int(shots_per_setting)
    r_hat = np.zeros((4, 4))
    stderr = np.zeros((4, 4))
    counts = np.zeros((4, 4, 2, 2), dtype=np.int64)
    for a in range(4):
        for b in range(4):
            rng = np.random.default_rng([seed, 4 * a + b])
            c = _sample_setting(probability_table(m, a, b), shots, rng)
            counts[a, b] = c
            if a == 0 and b == 0:
                values = np.array([[1, 1], [1, 1]])
            elif a == 0:
                values = np.array([[1, -1], [1, -1]])
            elif b == 0:
                values = np.array([[1, 1], [-1, -1]])
            else:
                values = np.outer(OUTCOMES, OUTCOMES)
            mean = float(np.sum(values * c)) / shots
            var = max(1.0 - mean * mean, 0.0)
            if shots > 1:
                var *= shots / (shots - 1)
            r_hat[a, b] = mean
            stderr[a, b] = np.sqrt(var / shots)
    r_hat[0, 0] = 1.0
    stderr[0, 0] = 0.0
    return CorrelationEstimate(r_hat, shots, stderr, counts)


def _project_bloch(v):
    n = np.linalg.norm(v)
    return (v / n, True) if n > 1.0 else (v, False)


def reconstruct_pdo(est):
    """PDO from an estimated Pauli table, plus a list of flags.

    A marginal whose estimated Bloch vector is longer than one is scaled back
    onto the sphere and flagged 'projected'.
    """
    r = np.array(est.r_hat, dtype=float)
    limit = 1.0 + 5.0 * np.asarray(est.standard_errors) + 1e-12
    if np.any(np.abs(r) > limit):
        a, b = np.argwhere(np.abs(r) > limit)[0]
        raise DataError(f"estimate r_{a}{b} = {r[a, b]:g} is inconsistent with any Pauli expectation")
    r = np.clip(r, -1.0, 1.0)
    r[0, 0] = 1.0
    flags = []
    r[1:, 0], pa = _project_bloch(r[1:, 0])
    r[0, 1:], pb = _project_bloch(r[0, 1:])
    if pa or pb:
        flags.append("projected")
    pdo = pdo_from_pauli_coeffs(r, {"construction": "sampled", "shots_per_setting": est.shots_per_setting})
    return pdo, flags
