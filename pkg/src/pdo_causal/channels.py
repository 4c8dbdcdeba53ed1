"""Density operators and qubit channels in normalised Choi form.

A channel Lambda is stored as its Choi state
chi = (I (x) Lambda)|phi+><phi+| = 1/4 sum_a sigma_a^T (x) Lambda(sigma_a),
which has unit trace and satisfies tr_B chi = I/2 when Lambda is trace
preserving. Kraus operators are an optional derived view.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ArgumentError
from .linalg import (
    I2,
    Z,
    dagger,
    hermitian_eigenvalues,
    is_hermitian,
    partial_trace,
    paulis,
    symmetrize,
    tensor,
)

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
KRAUS_TOL = 1e-8

HILBERT_SCHMIDT = "hilbert-schmidt"


def validate_density(rho, name="state"):
    """Return ``rho`` as a symmetrised array after checking it is a density operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape not in ((2, 2), (4, 4)):
        raise ArgumentError(f"{name}: expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if not is_hermitian(rho, 1e-9):
        raise ArgumentError(f"{name}: matrix is not Hermitian")
    rho = symmetrize(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ArgumentError(f"{name}: trace is {tr!r}, expected 1")
    lam = hermitian_eigenvalues(rho)[0]
    if lam < -PSD_TOL:
        raise ArgumentError(f"{name}: minimum eigenvalue {lam:.3e} is negative")
    return rho


def is_density(rho):
    try:
        validate_density(rho)
    except ArgumentError:
        return False
    return True


def apply_channel(choi, x):
    """Lambda(X) = 2 tr_A[(X^T (x) I) chi] for a Choi matrix or channel object."""
    choi = getattr(choi, "choi", choi)
    x = np.asarray(x, dtype=complex)
    return 2.0 * partial_trace(tensor(x.T, I2) @ np.asarray(choi, dtype=complex), "A")


def choi_from_map(fn):
    """Choi state of a linear map given as a Python callable on 2x2 matrices."""
    return 0.25 * sum(tensor(s.T, fn(s)) for s in paulis())


class CptpDiagnostics(NamedTuple):
    cptp: bool
    min_eigenvalue: float
    tp_residual: float
    negativity: float


def is_cptp(choi, tol=1e-9):
    """Check complete positivity and trace preservation of a Choi state.

    Returns a :class:`CptpDiagnostics` tuple whose first field is the verdict.
    """
    choi = symmetrize(choi)
    w = hermitian_eigenvalues(choi)
    tp = float(np.max(np.abs(partial_trace(choi, "B") - I2 / 2)))
    neg = float(-np.sum(w[w < 0.0])) + 0.0
    return CptpDiagnostics(bool(w[0] >= -tol and tp <= tol), float(w[0]), tp, neg)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A CPTP qubit channel. ``choi`` is canonical; ``kraus`` is optional."""

    choi: np.ndarray
    kraus: Optional[tuple] = None
    name: str = "channel"

    def __post_init__(self):
        choi = np.array(self.choi, dtype=complex)
        if choi.shape != (4, 4):
            raise ArgumentError(f"Choi matrix must be 4x4, got {choi.shape}")
        if not is_hermitian(choi, 1e-9):
            raise ArgumentError("Choi matrix is not Hermitian")
        choi = symmetrize(choi)
        diag = is_cptp(choi, tol=PSD_TOL)
        if not diag.cptp:
            raise ArgumentError(
                f"Choi matrix is not CPTP (min eigenvalue {diag.min_eigenvalue:.3e}, "
                f"trace-preservation residual {diag.tp_residual:.3e})"
            )
        choi.flags.writeable = False
        object.__setattr__(self, "choi", choi)
        if self.kraus is not None:
            object.__setattr__(self, "kraus", tuple(np.array(k, dtype=complex) for k in self.kraus))

    def __call__(self, x):
        return apply_channel(self.choi, x)

    def kraus_operators(self):
        if self.kraus is not None:
            return list(self.kraus)
        return kraus_from_choi(self.choi)


def choi_from_kraus(kraus, name="channel"):
    """Build a :class:`QuantumChannel` from a complete set of Kraus operators."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    if not ks or any(k.shape != (2, 2) for k in ks):
        raise ArgumentError("Kraus operators must be a non-empty list of 2x2 matrices")
    completeness = sum(dagger(k) @ k for k in ks)
    dev = np.max(np.abs(completeness - I2))
    if dev > KRAUS_TOL:
        raise ArgumentError(f"Kraus set is not complete: max |sum K^dagger K - I| = {dev:.3e}")
    choi = choi_from_map(lambda x: sum(k @ x @ dagger(k) for k in ks))
    return QuantumChannel(choi, kraus=tuple(ks), name=name)


def kraus_from_choi(choi, cutoff=1e-12):
    """Kraus operators from the eigendecomposition of a PSD Choi state."""
    w, v = np.linalg.eigh(symmetrize(choi))
    ops = []
    for lam, vec in zip(w, v.T):
        if lam > cutoff:
            # chi = 1/2 sum_ij |i><j| (x) K|i><j|K^dagger, so vec reshaped is K^T / sqrt2
            ops.append(np.sqrt(2.0 * lam) * vec.reshape(2, 2).T)
    return ops


def identity_channel():
    return choi_from_kraus([I2], name="identity")


def unitary_channel(u, name="unitary"):
    return choi_from_kraus([u], name=name)


def dephasing_channel(p):
    """rho -> p rho + (1 - p) Z rho Z."""
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"dephasing probability must lie in [0, 1], got {p!r}")
    return choi_from_kraus([np.sqrt(p) * I2, np.sqrt(1.0 - p) * Z], name=f"dephasing(p={p:g})")


def replacement_channel(tau):
    """rho -> tr[rho] tau; the constant channel onto ``tau``."""
    tau = validate_density(tau, "tau")
    return QuantumChannel(tensor(I2 / 2, tau), name="replacement")


def depolarizing_channel():
    """The completely depolarising channel rho -> tr[rho] I/2."""
    return QuantumChannel(np.eye(4, dtype=complex) / 4, name="completely-depolarizing")


def random_density_operator(dim, rng):
    """Hilbert-Schmidt random state G G^dagger / tr(G G^dagger), G complex Ginibre."""
    if dim not in (2, 4):
        raise ArgumentError(f"dim must be 2 or 4, got {dim!r}")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ dagger(g)
    return symmetrize(rho / np.trace(rho).real)


def random_pure_state(dim, rng):
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_unitary(dim, rng):
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_channel(rng):
    """Random CPTP channel from a Ginibre-sampled Choi matrix.

    W = G G^dagger is rescaled to (M^-1/2 (x) I) W (M^-1/2 (x) I) / 2 with
    M = tr_B W, which enforces tr_B chi = I/2.
    """
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    w = g @ dagger(g)
    m = partial_trace(w, "B")
    ev, vec = np.linalg.eigh(symmetrize(m))
    inv_sqrt = vec @ np.diag(ev ** -0.5) @ dagger(vec)
    k = tensor(inv_sqrt, I2)
    return QuantumChannel(symmetrize(k @ w @ k / 2), name="random-ginibre")
