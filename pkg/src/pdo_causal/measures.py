"""Aspatiality, entanglement negativity, atemporality and region labels.

Atemporality in a direction is the smallest Choi negativity over all
pseudo-channels compatible with the PDO in that direction. For a full-rank
input marginal that set has a single element. For a pure input marginal
the Choi state is affine in the Bloch vector v of tau, so the negativity is
a convex, 1/4-Lipschitz function of v and is minimised numerically.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import SolverError
from .linalg import (
    bloch_vector,
    from_bloch,
    negativity,
    partial_trace,
    partial_transpose,
)
from .pdo import swap_pdo
from .pseudo_channel import (
    BLOCK_TOL,
    RANK_EPS,
    FamilyAffine,
    PseudoChannel,
    family_pdo,
    input_marginal_min_eigenvalue,
    oriented_matrix,
    orthogonal_block,
    pure_projector,
    recover_choi_family,
    recover_choi_full_rank,
)

EPS_SPATIAL = 1e-9
EPS_TEMPORAL = 1e-4
TOL_OPT = 1e-5

START_RADIUS = 4.0
MAX_RADIUS = 64.0
GOLDEN_TOL = 1e-7
LIPSCHITZ = 0.25

REGIONS = ("S∩T", "S∩Tc", "Sc∩T", "Sc∩Tc")

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def aspatiality(r):
    """Negativity of the PDO itself; zero exactly for density operators."""
    return negativity(r.matrix)


def entanglement_negativity(r):
    """(||R^T_A||_1 - 1)/2, computed as the negativity of the partial transpose.

    Well defined for any PDO, but only meaningful as an entanglement measure
    when R is a state.
    """
    return negativity(partial_transpose(r.matrix, "A"))


@dataclass
class TauOptimizationResult:
    v_star: np.ndarray
    value: float
    iterations: int
    evaluations: int
    radius: float
    certificate: Optional[float] = None

    @property
    def tau(self):
        return from_bloch(self.v_star)


@dataclass
class DirectedAtemporality:
    """Atemporality in one direction and the pseudo-channel attaining it.

    ``value`` is infinite and ``pseudo_channel`` None when no pseudo-channel
    in this direction is compatible.
    """

    value: float
    direction: str
    method: str
    pseudo_channel: Optional[PseudoChannel]
    optimization: Optional[TauOptimizationResult] = None
    flags: list = field(default_factory=list)

    @property
    def unique(self):
        return self.method == "closed-form"


def _golden(fn, lo, hi, tol):
    """Golden-section minimum of a unimodal function on [lo, hi]."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fn(c), fn(d)
    n = 2
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fn(d)
        n += 1
    t = 0.5 * (lo + hi)
    return t, fn(t), n + 1


def _ball_interval(v, e, radius):
    """Range of t with ||v + t e|| <= radius for a unit vector e."""
    b = float(v @ e)
    c = float(v @ v) - radius * radius
    disc = max(b * b - c, 0.0)
    return -b - np.sqrt(disc), -b + np.sqrt(disc)


def minimize_negativity_over_tau(
    r,
    direction="forward",
    tol_opt=TOL_OPT,
    radius=START_RADIUS,
    max_radius=MAX_RADIUS,
    max_outer=60,
    certify=False,
):
    """Minimise the Choi negativity over the tau family of a pure-marginal PDO.

    Coordinate golden-section sweeps inside the ball ||v|| <= radius alternate
    with Nelder-Mead refinement until a round improves the value by less
    than 1e-13. If the incumbent ends on the ball's surface the radius is
    doubled, up to ``max_radius``.
    """
    fam = FamilyAffine(r, direction)
    evals = 0

    def g(v):
        nonlocal evals
        evals += 1
        return fam.negativity(v)

    out_bloch = bloch_vector(partial_trace(oriented_matrix(r, direction), "A"))
    v = out_bloch if np.linalg.norm(out_bloch) < radius else np.zeros(3)
    best = g(v)
    iterations = 0
    axes = np.eye(3)

    while True:
        converged = False
        for _ in range(max_outer):
            iterations += 1
            start = best
            if best <= 0.0:
                converged = True
                break
            for e in axes:
                lo, hi = _ball_interval(v, e, radius)
                t, val, n = _golden(lambda t: fam.negativity(v + t * e), lo, hi, GOLDEN_TOL)
                evals += n
                if val < best:
                    v, best = v + t * e, val
            if best > 0.0:
                res = minimize(
                    g,
                    v,
                    method="Nelder-Mead",
                    options={"xatol": GOLDEN_TOL, "fatol": 1e-15, "maxiter": 3000},
                )
                if res.fun < best:
                    cand = np.asarray(res.x, dtype=float)
                    if np.linalg.norm(cand) > radius:
                        cand = cand * (radius / np.linalg.norm(cand))
                    val = g(cand)
                    if val < best:
                        v, best = cand, val
            # rotate the search axes so kinks aligned with one basis cannot stall descent
            axes = _rotated_axes(iterations)
            if start - best < 1e-13:
                converged = True
                break
        else:
            converged = start - best < tol_opt
        on_boundary = np.linalg.norm(v) > radius * (1.0 - 1e-3)
        result = TauOptimizationResult(v, float(best), iterations, evals, radius)
        if not converged:
            raise SolverError(f"tau optimisation did not converge in {max_outer} rounds", best=result)
        if not on_boundary or best <= 0.0:
            break
        if radius * 2.0 > max_radius:
            raise SolverError(
                f"tau optimum lies on the search boundary at radius {radius:g}", best=result
            )
        radius *= 2.0

    if certify:
        oracle = grid_minimum(r, direction, radius=min(radius, START_RADIUS))
        result.certificate = oracle.value - result.value
    return result


def _rotated_axes(k):
    """Deterministic orthonormal frame that differs between rounds."""
    a = 0.61803398875 * k
    b = 0.41421356237 * k
    rz = np.array([[np.cos(a), -np.sin(a), 0.0], [np.sin(a), np.cos(a), 0.0], [0.0, 0.0, 1.0]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, np.cos(b), -np.sin(b)], [0.0, np.sin(b), np.cos(b)]])
    return (rz @ rx).T


@dataclass
class GridMinimum:
    value: float
    v: np.ndarray
    grid_value: float
    grid_v: np.ndarray
    evaluations: int


def grid_minimum(r, direction="forward", radius=START_RADIUS, step=0.05, refine=(0.005, 0.0005)):
    """Brute-force minimum of the tau-family negativity on a cubic lattice.

    Returns the exact minimum over lattice points of spacing ``step`` inside
    ||v|| <= radius. Blocks of 9x9x9 lattice points are skipped only when a
    Lipschitz lower bound proves none of them can beat the incumbent, so the
    result equals an exhaustive scan. The lattice optimum is then refined on
    successively finer local lattices ``refine``.

    The Choi states are assembled from the shifted PDO R_tau directly, not
    from the affine parametrisation the optimiser uses.
    """
    m = oriented_matrix(r, direction)
    psi = pure_projector(partial_trace(m, "B"))
    base = partial_transpose(family_pdo(m, from_bloch(np.zeros(3)), psi), "A")
    slopes = np.array(
        [partial_transpose(family_pdo(m, from_bloch(e), psi), "A") - base for e in np.eye(3)]
    )
    evaluations = 0

    def batch(points):
        nonlocal evaluations
        evaluations += len(points)
        out = np.empty(len(points))
        for i in range(0, len(points), 200_000):
            chunk = points[i : i + 200_000]
            w = np.linalg.eigvalsh(base + np.einsum("nk,kij->nij", chunk, slopes))
            out[i : i + 200_000] = -np.sum(np.where(w < 0.0, w, 0.0), axis=1)
        return out

    half = 4
    block = (2 * half + 1) * step
    n_blocks = int(np.ceil((radius + half * step) / block))
    ax = np.arange(-n_blocks, n_blocks + 1) * block
    centers = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    reach = half * step * np.sqrt(3.0)
    centers = centers[np.linalg.norm(centers, axis=1) <= radius + reach]
    cvals = batch(centers)

    inside = np.linalg.norm(centers, axis=1) <= radius
    best_idx = np.argmin(np.where(inside, cvals, np.inf))
    best, best_v = cvals[best_idx], centers[best_idx]

    offs = np.arange(-half, half + 1) * step
    local = np.stack(np.meshgrid(offs, offs, offs, indexing="ij"), axis=-1).reshape(-1, 3)
    for ci in np.argsort(cvals):
        if best <= 0.0 or cvals[ci] - LIPSCHITZ * reach >= best:
            break
        pts = centers[ci] + local
        pts = pts[np.linalg.norm(pts, axis=1) <= radius]
        if not len(pts):
            continue
        vals = batch(pts)
        k = np.argmin(vals)
        if vals[k] < best:
            best, best_v = vals[k], pts[k]

    grid_value, grid_v = float(best), best_v.copy()
    span = step
    for h in refine:
        offs = np.arange(-round(span / h), round(span / h) + 1) * h
        pts = best_v + np.stack(np.meshgrid(offs, offs, offs, indexing="ij"), axis=-1).reshape(-1, 3)
        vals = batch(pts)
        k = np.argmin(vals)
        if vals[k] < best:
            best, best_v = vals[k], pts[k]
        span = h
    return GridMinimum(float(best) + 0.0, best_v, grid_value + 0.0, grid_v, evaluations)


def forward_atemporality(r, tol_opt=TOL_OPT, rank_eps=RANK_EPS, direction="forward"):
    """Minimal Choi negativity over pseudo-channels from A to B.

    Full-rank input marginal: the unique closed-form pseudo-channel. Pure
    marginal: optimisation over tau, or infinity when the block of R
    orthogonal to the marginal is nonzero. Within a factor 100 above
    ``rank_eps`` both are computed and the smaller is reported with a
    conditioning flag.
    """
    lam = input_marginal_min_eigenvalue(r, direction)
    flags = []
    if lam >= rank_eps:
        pc = recover_choi_full_rank(r, direction, rank_eps)
        result = DirectedAtemporality(pc.negativity, direction, "closed-form", pc, flags=flags)
        if lam < 100.0 * rank_eps and orthogonal_block(r, direction) <= BLOCK_TOL:
            opt = minimize_negativity_over_tau(r, direction, tol_opt)
            result.flags.append("near-rank-threshold")
            if opt.value < result.value:
                fam = recover_choi_family(r, opt.v_star, direction, rank_eps=np.inf)
                return DirectedAtemporality(opt.value, direction, "tau-optimized", fam, opt, result.flags)
        return result
    flags.append("rank-deficient-marginal")
    if lam > 1e-14:
        flags.append("marginal-projected-to-pure")
    if orthogonal_block(r, direction) > BLOCK_TOL:
        flags.append("no-compatible-pseudo-channel")
        return DirectedAtemporality(np.inf, direction, "none", None, flags=flags)
    opt = minimize_negativity_over_tau(r, direction, tol_opt)
    pc = recover_choi_family(r, opt.v_star, direction, rank_eps)
    return DirectedAtemporality(opt.value, direction, "tau-optimized", pc, opt, flags)


def reverse_atemporality(r, tol_opt=TOL_OPT, rank_eps=RANK_EPS):
    """Atemporality from B to A, i.e. the forward value of the swapped PDO."""
    res = forward_atemporality(swap_pdo(r), tol_opt, rank_eps)
    res.direction = "reverse"
    if res.pseudo_channel is not None:
        pc = res.pseudo_channel
        res.pseudo_channel = PseudoChannel(pc.choi, "reverse", pc.tau, pc.method)
    return res


def atemporality(r, tol_opt=TOL_OPT, rank_eps=RANK_EPS):
    """f = min(f_forward, f_reverse)."""
    return min(
        forward_atemporality(r, tol_opt, rank_eps).value,
        reverse_atemporality(r, tol_opt, rank_eps).value,
    )


def _finite_or_none(x):
    return float(x) if np.isfinite(x) else None


def region_label(spatial, temporal):
    return ("S" if spatial else "Sc") + "∩" + ("T" if temporal else "Tc")


@dataclass
class CausalReport:
    aspatiality: float
    f_forward: float
    f_reverse: float
    f: float
    e_neg: Optional[float]
    region: str
    tolerances: dict
    flags: list = field(default_factory=list)
    forward: Optional[DirectedAtemporality] = field(default=None, repr=False)
    reverse: Optional[DirectedAtemporality] = field(default=None, repr=False)

    @property
    def spatial(self):
        return self.region.startswith("S∩")

    @property
    def temporal(self):
        return self.region.endswith("∩T")

    def to_dict(self):
        """JSON-ready form; an infinite atemporality becomes None."""
        return {
            "aspatiality": self.aspatiality,
            "f_forward": _finite_or_none(self.f_forward),
            "f_reverse": _finite_or_none(self.f_reverse),
            "f": _finite_or_none(self.f),
            "e_neg": self.e_neg,
            "region": self.region,
            "tolerances": dict(self.tolerances),
            "flags": list(self.flags),
        }


def classify(
    r,
    eps_spatial=EPS_SPATIAL,
    eps_temporal=EPS_TEMPORAL,
    tol_opt=TOL_OPT,
    rank_eps=RANK_EPS,
):
    """All causal measures of ``r`` and its region in the spatial/temporal Venn diagram."""
    asp = aspatiality(r)
    fwd = forward_atemporality(r, tol_opt, rank_eps)
    rev = reverse_atemporality(r, tol_opt, rank_eps)
    f = min(fwd.value, rev.value)
    spatial = asp <= eps_spatial
    flags = [f"forward:{x}" for x in fwd.flags] + [f"reverse:{x}" for x in rev.flags]
    if spatial:
        e_neg = entanglement_negativity(r)
    else:
        e_neg = None
        flags.append("not-a-state")
    return CausalReport(
        aspatiality=asp,
        f_forward=fwd.value,
        f_reverse=rev.value,
        f=f,
        e_neg=e_neg,
        region=region_label(spatial, f <= eps_temporal),
        tolerances={"eps_spatial": eps_spatial, "eps_temporal": eps_temporal, "tol_opt": tol_opt},
        flags=flags,
        forward=fwd,
        reverse=rev,
    )
