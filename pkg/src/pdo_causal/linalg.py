"""Dense linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4). For
two-qubit operators subsystem A is the first tensor factor.
"""

import numpy as np

from .errors import ArgumentError, ContractViolation

HERMITIAN_TOL = 1e-12

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _p in _PAULIS:
    _p.flags.writeable = False

I2 = _PAULIS[0]
X, Y, Z = _PAULIS[1:]


def pauli(index):
    """Return sigma_index for index in 0..3 (I, X, Y, Z)."""
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index <= 3:
        raise ArgumentError(f"Pauli index must be 0, 1, 2 or 3, got {index!r}")
    return _PAULIS[int(index)].copy()


def paulis():
    """The four single-qubit Paulis as a (4, 2, 2) array."""
    return np.array(_PAULIS)


def tensor(a, b):
    """Kronecker product with ``a`` on subsystem A."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _check_two_qubit(m):
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ArgumentError(f"expected a 4x4 two-qubit operator, got shape {m.shape}")
    return m


def _check_subsystem(subsystem):
    if subsystem not in ("A", "B"):
        raise ArgumentError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def partial_trace(m, subsystem):
    """Trace out ``subsystem`` ('A' or 'B') of a 4x4 operator."""
    m = _check_two_qubit(m)
    _check_subsystem(subsystem)
    t = m.reshape(2, 2, 2, 2)
    if subsystem == "A":
        return np.einsum("ijik->jk", t)
    return np.einsum("ijkj->ik", t)


def partial_transpose(m, subsystem):
    """Transpose ``subsystem`` only. Exact involution."""
    m = _check_two_qubit(m)
    _check_subsystem(subsystem)
    t = m.reshape(2, 2, 2, 2)
    if subsystem == "A":
        return t.transpose(2, 1, 0, 3).reshape(4, 4)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def anticommutator(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b + b @ a


def swap_operator():
    """The two-qubit swap, sum_ij |i><j| (x) |j><i|."""
    s = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            s[2 * i + j, 2 * j + i] = 1.0
    return s


def dagger(m):
    return np.conj(np.transpose(m))


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m)), initial=0.0) <= tol


def symmetrize(m):
    """(M + M^dagger)/2, absorbing roundoff before an eigensolve."""
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + dagger(m))


def _require_hermitian(m, tol):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - dagger(m)), initial=0.0)
    if dev > tol:
        raise ContractViolation(f"matrix is not Hermitian (max |M - M^dagger| = {dev:.3e})")
    return symmetrize(m)


def jacobi_eigenvalues(m, tol=1e-14, max_sweeps=64):
    """Eigenvalues of a small Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps over all (p, q) pairs until the off-diagonal Frobenius norm drops
    below ``tol`` (scaled by the matrix norm when that exceeds one).
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    scale = max(1.0, np.linalg.norm(a))
    upper = np.triu_indices(n, 1)

    def off_norm():
        # summed directly; |A|^2 - |diag A|^2 cancels catastrophically near convergence
        return np.sqrt(2.0 * np.sum(np.abs(a[upper]) ** 2))

    for _ in range(max_sweeps):
        if off_norm() < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mag = abs(b)
                if mag < 1e-30 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                phase = b / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) . [[c, s], [-s, c]] on the (p, q) plane
                cols = a[:, [p, q]].copy()
                a[:, p] = c * cols[:, 0] - s * np.conj(phase) * cols[:, 1]
                a[:, q] = s * cols[:, 0] + c * np.conj(phase) * cols[:, 1]
                rows = a[[p, q], :].copy()
                a[p, :] = c * rows[0] - s * phase * rows[1]
                a[q, :] = s * rows[0] + c * phase * rows[1]
                a[p, q] = a[q, p] = 0.0
    else:
        off = off_norm()
        if off >= tol * scale:
            raise ArithmeticError(f"Jacobi sweeps did not converge (off-diagonal norm {off:.3e})")
    return np.sort(np.diag(a).real)


def hermitian_eigenvalues(m, tol=HERMITIAN_TOL, method="lapack"):
    """Ascending real eigenvalues of a Hermitian matrix.

    ``method`` selects LAPACK (``numpy.linalg.eigvalsh``) or the in-house
    Jacobi solver; both agree to ~1e-14 on 4x4 inputs.
    """
    h = _require_hermitian(m, tol)
    if method == "lapack":
        return np.linalg.eigvalsh(h)
    if method == "jacobi":
        return jacobi_eigenvalues(h)
    raise ArgumentError(f"unknown eigensolver {method!r}")


def trace_norm(m, tol=HERMITIAN_TOL):
    return float(np.sum(np.abs(hermitian_eigenvalues(m, tol))))


def negativity(m, tol=HERMITIAN_TOL):
    """Absolute sum of the negative eigenvalues of a Hermitian matrix."""
    w = hermitian_eigenvalues(m, tol)
    return float(-np.sum(w[w < 0.0])) + 0.0


def min_eigenvalue(m, tol=HERMITIAN_TOL):
    return float(hermitian_eigenvalues(m, tol)[0])


def bloch_vector(rho):
    """Real 3-vector (tr[rho X], tr[rho Y], tr[rho Z])."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ p).real for p in _PAULIS[1:]])


def from_bloch(v):
    """(I + v . sigma)/2 for a real 3-vector v; Hermitian with trace one."""
    v = np.asarray(v, dtype=float)
    return 0.5 * (I2 + v[0] * X + v[1] * Y + v[2] * Z)
