"""Pseudo-density operators of two qubit events.

A PDO is R = 1/4 sum_ab r_ab sigma_a (x) sigma_b where r_ab is the
expectation of the product of Pauli outcomes sigma_a at event A and sigma_b
at event B. It is Hermitian with unit trace, its marginals are states, and
it may have negative eigenvalues.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import QuantumChannel, apply_channel, validate_density
from .errors import ArgumentError, InvalidCorrelationsError, NormalizationError
from .linalg import (
    I2,
    anticommutator,
    hermitian_eigenvalues,
    is_hermitian,
    partial_trace,
    paulis,
    swap_operator,
    symmetrize,
    tensor,
)

MARGINAL_TOL = 1e-10
R00_TOL = 1e-9
COEFF_TOL = 1e-9

_SIGMA = paulis()
_BASIS = np.array([[tensor(a, b) for b in _SIGMA] for a in _SIGMA])
_SWAP = swap_operator()


def _marginal_problem(rho):
    lam = hermitian_eigenvalues(rho)[0]
    return lam if lam < -MARGINAL_TOL else None


@dataclass(frozen=True, eq=False)
class Pdo:
    """A two-qubit pseudo-density operator.

    The 4x4 matrix is the canonical representation; ``pauli_coeffs`` is
    recomputed from it on demand. ``provenance`` records how it was built.
    """

    matrix: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ArgumentError(f"PDO matrix must be 4x4, got shape {m.shape}")
        if not is_hermitian(m, 1e-9):
            raise ArgumentError("PDO matrix is not Hermitian")
        m = symmetrize(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-9:
            raise NormalizationError(f"PDO trace is {tr!r}, expected 1")
        for side in ("A", "B"):
            lam = _marginal_problem(partial_trace(m, "B" if side == "A" else "A"))
            if lam is not None:
                raise InvalidCorrelationsError(
                    f"marginal {side} is not a state (minimum eigenvalue {lam:.3e})"
                )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def pauli_coeffs(self):
        """Real 4x4 table r_ab = tr[R (sigma_a (x) sigma_b)]."""
        return np.einsum("abij,ji->ab", _BASIS, self.matrix).real

    @property
    def marginal_a(self):
        return partial_trace(self.matrix, "B")

    @property
    def marginal_b(self):
        return partial_trace(self.matrix, "A")

    def eigenvalues(self):
        return hermitian_eigenvalues(self.matrix)

    def with_provenance(self, **info):
        return Pdo(self.matrix, {**self.provenance, **info})


def matrix_from_pauli_coeffs(r):
    r = np.asarray(r, dtype=float)
    return 0.25 * np.einsum("ab,abij->ij", r, _BASIS)


def pdo_from_pauli_coeffs(r, provenance=None):
    """Build a PDO from a table of Pauli correlations.

    Only normalisation, |r_ab| <= 1 and positivity of both marginals are
    enforced; the PDO as a whole may be non-positive.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (4, 4):
        raise ArgumentError(f"Pauli table must be 4x4, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise InvalidCorrelationsError("Pauli table contains non-finite entries")
    if abs(r[0, 0] - 1.0) > R00_TOL:
        raise NormalizationError(f"r_00 must equal 1, got {float(r[0, 0]):g}")
    bad = np.argwhere(np.abs(r) > 1.0 + COEFF_TOL)
    if len(bad):
        a, b = bad[0]
        raise InvalidCorrelationsError(f"|r_{a}{b}| = {abs(r[a, b]):g} exceeds 1")
    return Pdo(matrix_from_pauli_coeffs(r), provenance or {"construction": "pauli-coeffs"})


def pdo_from_state(rho_ab, provenance=None):
    """A bipartite density operator viewed as a (spatial) PDO."""
    rho = validate_density(rho_ab, "rho_AB")
    if rho.shape != (4, 4):
        raise ArgumentError("pdo_from_state needs a two-qubit state")
    return Pdo(rho, provenance or {"construction": "state"})


def k_operator(rho_a):
    """K = {rho_A (x) I/2, S} = 1/4 sum_k {rho_A, sigma_k} (x) sigma_k."""
    rho_a = np.asarray(rho_a, dtype=complex)
    return anticommutator(tensor(rho_a, I2 / 2), _SWAP)


def k_operator_pauli(rho_a):
    """The Pauli expansion of :func:`k_operator`, used as a cross-check."""
    rho_a = np.asarray(rho_a, dtype=complex)
    return 0.25 * sum(tensor(anticommutator(rho_a, s), s) for s in _SIGMA)


@dataclass(frozen=True, eq=False)
class TemporalSpec:
    """An initial state and the channel acting on it between the two events."""

    initial: np.ndarray
    channel: QuantumChannel
    direction: str = "forward"

    def __post_init__(self):
        rho = validate_density(self.initial, "initial state")
        if rho.shape != (2, 2):
            raise ArgumentError("initial state must be a single-qubit density operator")
        if self.direction not in ("forward", "reverse"):
            raise ArgumentError(f"direction must be 'forward' or 'reverse', got {self.direction!r}")
        object.__setattr__(self, "initial", rho)


def temporal_matrix(rho_a, channel):
    """(I (x) E) K = 1/4 sum_k {rho_A, sigma_k} (x) E(sigma_k).

    ``channel`` may be any Choi matrix, so this also evaluates pseudo-channels.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    return 0.25 * sum(tensor(anticommutator(rho_a, s), apply_channel(channel, s)) for s in _SIGMA)


def temporal_matrix_outer(rho_a, channel):
    """1/4 sum_a sigma_a (x) E({rho_A, sigma_a}); equal to :func:`temporal_matrix`."""
    rho_a = np.asarray(rho_a, dtype=complex)
    return 0.25 * sum(tensor(s, apply_channel(channel, anticommutator(rho_a, s))) for s in _SIGMA)


def temporal_matrix_split(rho_a, channel):
    """Choi-like part plus the two marginal correction terms; equal to :func:`temporal_matrix`."""
    rho_a = np.asarray(rho_a, dtype=complex)
    base = 0.25 * sum(tensor(s, apply_channel(channel, s)) for s in _SIGMA)
    return (
        base
        + tensor(rho_a - I2 / 2, apply_channel(channel, I2 / 2))
        + tensor(I2 / 2, apply_channel(channel, rho_a - I2 / 2))
    )


def swap_matrix(m):
    return _SWAP @ np.asarray(m, dtype=complex) @ _SWAP


def pdo_from_temporal(spec):
    """PDO of a qubit prepared in ``spec.initial`` and sent through ``spec.channel``.

    For ``direction='reverse'`` the first-measured qubit is B, i.e. the
    forward construction with the subsystems swapped.
    """
    m = temporal_matrix(spec.initial, spec.channel.choi)
    if spec.direction == "reverse":
        m = swap_matrix(m)
    return Pdo(m, {"construction": "temporal", "direction": spec.direction, "channel": spec.channel.name})


def swap_pdo(r):
    """S R S^dagger: the same correlations with the roles of A and B exchanged."""
    prov = dict(r.provenance)
    prov["swapped"] = not prov.get("swapped", False)
    return Pdo(swap_matrix(r.matrix), prov)


def local_unitary(r, u, v):
    """(U (x) V) R (U (x) V)^dagger."""
    w = tensor(u, v)
    return Pdo(w @ r.matrix @ w.conj().T, {**r.provenance, "local_unitary": True})


def mix(pdos, weights: Optional[list] = None):
    """Convex combination of PDOs."""
    if weights is None:
        weights = [1.0 / len(pdos)] * len(pdos)
    return Pdo(sum(w * p.matrix for w, p in zip(weights, pdos)), {"construction": "mixture"})
