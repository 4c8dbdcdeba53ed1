"""Recovering the pseudo-channels compatible with a PDO.

A forward pseudo-channel is a trace-preserving, Hermiticity-preserving
linear map Lambda with R = (I (x) Lambda) K(rho_A). When rho_A has full rank
Lambda is unique and has a closed form. When rho_A = |psi><psi| is pure, the
output tau = Lambda(I - rho_A) is unconstrained and the compatible maps form a
family affine in tau, provided the block <psi_perp| R |psi_perp> vanishes.
K(|psi><psi|) has no such block, so a PDO with a nonzero one has no
compatible pseudo-channel in that direction at all. Reverse pseudo-channels
are the forward ones of the swapped PDO.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import is_cptp
from .errors import ArgumentError, NoPseudoChannelError, RankDeficientError
from .linalg import (
    I2,
    from_bloch,
    hermitian_eigenvalues,
    is_hermitian,
    negativity,
    partial_trace,
    partial_transpose,
    paulis,
    symmetrize,
    tensor,
)
from .pdo import Pdo, swap_matrix, temporal_matrix

RANK_EPS = 1e-7
# a PSD R with marginal eigenvalue below RANK_EPS has a smaller orthogonal block
BLOCK_TOL = 1e-6
DIRECTIONS = ("forward", "reverse")


def _check_direction(direction):
    if direction not in DIRECTIONS:
        raise ArgumentError(f"direction must be 'forward' or 'reverse', got {direction!r}")


def oriented_matrix(r, direction):
    """The PDO matrix with the input event of ``direction`` on subsystem A."""
    _check_direction(direction)
    return r.matrix if direction == "forward" else swap_matrix(r.matrix)


def input_marginal_min_eigenvalue(r, direction="forward"):
    m = oriented_matrix(r, direction)
    return float(hermitian_eigenvalues(partial_trace(m, "B"))[0])


@dataclass(frozen=True, eq=False)
class PseudoChannel:
    """Choi state of a (possibly non-CP) trace-preserving map between the events.

    ``tau`` is set only for members of a rank-deficient family.
    """

    choi: np.ndarray
    direction: str = "forward"
    tau: Optional[np.ndarray] = None
    method: str = "closed-form"

    def __post_init__(self):
        _check_direction(self.direction)
        choi = np.array(self.choi, dtype=complex)
        if choi.shape != (4, 4) or not is_hermitian(choi, 1e-9):
            raise ArgumentError("pseudo-channel Choi matrix must be 4x4 Hermitian")
        choi = symmetrize(choi)
        if abs(np.trace(choi).real - 1.0) > 1e-9:
            raise ArgumentError("pseudo-channel Choi matrix must have unit trace")
        tp = np.max(np.abs(partial_trace(choi, "B") - I2 / 2))
        if tp > 1e-9:
            raise ArgumentError(f"pseudo-channel is not trace preserving (residual {tp:.3e})")
        choi.flags.writeable = False
        object.__setattr__(self, "choi", choi)

    @property
    def negativity(self):
        return negativity(self.choi)

    @property
    def cptp(self):
        return is_cptp(self.choi).cptp

    def __call__(self, x):
        from .channels import apply_channel

        return apply_channel(self.choi, x)


def l_operator(m):
    """L = (rho - I/2) (x) tr_A[(rho^-1/2 (x) I) R] + I/2 (x) tr_A[((I - rho^-1/2) (x) I) R]."""
    rho = partial_trace(m, "B")
    inv = np.linalg.inv(rho)
    return tensor(rho - I2 / 2, partial_trace(tensor(inv / 2, I2) @ m, "A")) + tensor(
        I2 / 2, partial_trace(tensor(I2 - inv / 2, I2) @ m, "A")
    )


def recover_choi_full_rank(r, direction="forward", rank_eps=RANK_EPS):
    """The unique compatible pseudo-channel, chi = (T (x) I)(R - L).

    Raises :class:`RankDeficientError` when the input marginal is (numerically)
    pure; use :func:`recover_choi_family` instead.
    """
    m = oriented_matrix(r, direction)
    lam = hermitian_eigenvalues(partial_trace(m, "B"))[0]
    if lam < rank_eps:
        raise RankDeficientError(
            f"input marginal has minimum eigenvalue {lam:.3e} < {rank_eps:g}; "
            "the compatible pseudo-channels form a family parameterised by tau"
        )
    return PseudoChannel(partial_transpose(m - l_operator(m), "A"), direction)


def pure_projector(rho):
    """Projector onto the dominant eigenvector of a qubit state."""
    w, v = np.linalg.eigh(symmetrize(rho))
    psi = v[:, -1]
    return np.outer(psi, psi.conj())


def as_tau(tau):
    """Accept a Bloch 3-vector or a 2x2 Hermitian trace-one matrix."""
    t = np.asarray(tau)
    if t.shape == (3,):
        if not np.all(np.isreal(t)):
            raise ArgumentError("tau Bloch vector must be real")
        return from_bloch(t.real)
    t = np.asarray(t, dtype=complex)
    if t.shape != (2, 2):
        raise ArgumentError(f"tau must be a 2x2 matrix or a Bloch 3-vector, got shape {t.shape}")
    if not is_hermitian(t, 1e-9):
        raise ArgumentError("tau must be Hermitian")
    if abs(np.trace(t) - 1.0) > 1e-9:
        raise ArgumentError(f"tau must have unit trace, got {np.trace(t).real:g}")
    return symmetrize(t)


def family_pdo(m, tau, psi=None):
    """R_tau = R + (I/2 - rho_A) (x) (tau + tr_A R)/2 + I/2 (x) (tau - tr_A R)/2."""
    if psi is None:
        psi = pure_projector(partial_trace(m, "B"))
    r_b = partial_trace(m, "A")
    return m + tensor(I2 / 2 - psi, 0.5 * (tau + r_b)) + tensor(I2 / 2, 0.5 * (tau - r_b))


def family_pdo_alt(m, tau, psi=None):
    """R' = R - rho_A (x) tr_A R / 2 + (I - rho_A) (x) tau / 2; equal to :func:`family_pdo`."""
    if psi is None:
        psi = pure_projector(partial_trace(m, "B"))
    return m - 0.5 * tensor(psi, partial_trace(m, "A")) + 0.5 * tensor(I2 - psi, tau)


def orthogonal_block(r, direction="forward"):
    """Max entry of <psi_perp| R |psi_perp>, psi the dominant input-marginal state."""
    m = oriented_matrix(r, direction)
    psi = pure_projector(partial_trace(m, "B"))
    return float(np.max(np.abs(partial_trace(tensor(I2 - psi, I2) @ m, "A"))))


def recover_choi_family(r, tau, direction="forward", rank_eps=RANK_EPS, block_tol=BLOCK_TOL):
    """Member chi_tau = (T (x) I) R_tau of the family for a pure input marginal.

    A marginal whose smallest eigenvalue is below ``rank_eps`` but not exactly
    zero is replaced by its dominant pure state. Raises
    :class:`NoPseudoChannelError` when the orthogonal block exceeds
    ``block_tol``, since then no member reproduces R.
    """
    tau = as_tau(tau)
    m = oriented_matrix(r, direction)
    rho = partial_trace(m, "B")
    lam = hermitian_eigenvalues(rho)[0]
    if lam >= rank_eps:
        raise ArgumentError(
            f"input marginal has full rank (minimum eigenvalue {lam:.3e}); "
            "the compatible pseudo-channel is unique, use recover_choi_full_rank"
        )
    block = orthogonal_block(r, direction)
    if block > block_tol:
        raise NoPseudoChannelError(
            f"input marginal is pure but <psi_perp|R|psi_perp> has entries up to {block:.3e}; "
            f"no {direction} pseudo-channel is compatible with this PDO"
        )
    chi = partial_transpose(family_pdo(m, tau, pure_projector(rho)), "A")
    return PseudoChannel(chi, direction, tau=tau, method="family")


def recover_pseudo_channel(r, direction="forward", tau=None, rank_eps=RANK_EPS):
    """Closed form when possible, otherwise the family member for ``tau``."""
    if input_marginal_min_eigenvalue(r, direction) >= rank_eps:
        return recover_choi_full_rank(r, direction, rank_eps)
    if tau is None:
        raise RankDeficientError("input marginal is pure: a tau must be supplied or optimised")
    return recover_choi_family(r, tau, direction, rank_eps)


class FamilyAffine:
    """chi(v) = base + sum_k v_k * slopes[k] for tau = (I + v.sigma)/2.

    Precomputed once per PDO so the tau search can evaluate many Bloch
    vectors in a single batched eigensolve.
    """

    def __init__(self, r, direction="forward"):
        m = oriented_matrix(r, direction)
        psi = pure_projector(partial_trace(m, "B"))
        fixed = partial_transpose(m, "A") - 0.5 * tensor(psi.T, partial_trace(m, "A"))
        comp = (I2 - psi).T
        self.base = symmetrize(fixed + 0.25 * tensor(comp, I2))
        self.slopes = np.array([0.25 * tensor(comp, s) for s in paulis()[1:]])

    def choi(self, v):
        return self.base + np.tensordot(np.asarray(v, dtype=float), self.slopes, axes=1)

    def negativity(self, v):
        w = np.linalg.eigvalsh(self.choi(v))
        return float(-np.sum(w[w < 0.0])) + 0.0

    def negativity_batch(self, vs):
        vs = np.asarray(vs, dtype=float).reshape(-1, 3)
        mats = self.base + np.einsum("nk,kij->nij", vs, self.slopes)
        w = np.linalg.eigvalsh(mats)
        return -np.sum(np.where(w < 0.0, w, 0.0), axis=1)


def verify_compatibility(pc, r, direction=None):
    """Max-entry residual between R and the PDO rebuilt from the pseudo-channel.

    ``pc`` may be a :class:`PseudoChannel` or a bare Choi matrix, in which
    case ``direction`` defaults to forward.
    """
    if isinstance(pc, PseudoChannel):
        choi, direction = pc.choi, direction or pc.direction
    else:
        choi, direction = np.asarray(pc, dtype=complex), direction or "forward"
    m = oriented_matrix(r, direction)
    rebuilt = temporal_matrix(partial_trace(m, "B"), choi)
    return float(np.max(np.abs(rebuilt - m)))


def compatibility_pdo(pc, rho_in):
    """The PDO generated by feeding ``rho_in`` into pseudo-channel ``pc``."""
    m = temporal_matrix(rho_in, pc.choi)
    if pc.direction == "reverse":
        m = swap_matrix(m)
    return Pdo(m, {"construction": "pseudo-channel", "direction": pc.direction})
