"""Named PDO families and the parameter sweeps built on them."""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    HILBERT_SCHMIDT,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
    random_density_operator,
    validate_density,
)
from .errors import ArgumentError
from .linalg import swap_operator, tensor
from .measures import EPS_SPATIAL, EPS_TEMPORAL, TOL_OPT, classify
from .pdo import Pdo, TemporalSpec, mix, pdo_from_state, pdo_from_temporal

CSV_HEADER = ("p", "q", "e_neg", "f", "f_forward", "f_reverse", "aspatiality", "region")

_S = swap_operator()
SYMMETRIC_PROJECTOR = (np.eye(4) + _S) / 2
ANTISYMMETRIC_PROJECTOR = (np.eye(4) - _S) / 2

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET_PLUS = np.full((2, 2), 0.5, dtype=complex)
KET_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)


def _unit_interval(name, x):
    if not 0.0 <= x <= 1.0:
        raise ArgumentError(f"{name} must lie in [0, 1], got {x!r}")


def werner(q):
    """(q/3) P_sym + (1 - q) P_antisym; q = 0 is the singlet."""
    _unit_interval("q", q)
    rho = q / 3 * SYMMETRIC_PROJECTOR + (1 - q) * ANTISYMMETRIC_PROJECTOR
    return pdo_from_state(rho, {"construction": "werner", "q": q})


def biased_werner(p, q):
    """(1 - p) werner(q) + p |00><00|."""
    _unit_interval("p", p)
    _unit_interval("q", q)
    rho = (1 - p) * werner(q).matrix + p * np.diag([1.0, 0, 0, 0])
    return pdo_from_state(rho, {"construction": "biased-werner", "p": p, "q": q})


def bell_states():
    """The four Bell states keyed by name."""
    s = 1 / np.sqrt(2)
    kets = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    return {
        k: pdo_from_state(np.outer(v, np.conj(v)), {"construction": "bell", "name": k})
        for k, v in kets.items()
    }


def bloch_qubit(p, c):
    """rho = 1/2 [[1 + p, c], [c*, 1 - p]]."""
    return 0.5 * np.array([[1 + p, c], [np.conj(c), 1 - p]], dtype=complex)


def identity_channel_pdo(rho_a):
    """A qubit measured twice with nothing happening in between."""
    return pdo_from_temporal(TemporalSpec(rho_a, identity_channel()))


def dephasing_asymmetry(p):
    """rho_A = |+><+|/4 + 3|-><-|/4 sent through rho -> p rho + (1 - p) Z rho Z."""
    _unit_interval("p", p)
    rho = 0.25 * KET_PLUS + 0.75 * KET_MINUS
    r = pdo_from_temporal(TemporalSpec(rho, dephasing_channel(p)))
    return r.with_provenance(construction="dephasing-asymmetry", p=p)


def mixture_counterexample():
    """Equal mixture of |0> through the identity and |+> through full depolarisation."""
    a = pdo_from_temporal(TemporalSpec(KET0, identity_channel()))
    b = pdo_from_temporal(TemporalSpec(KET_PLUS, depolarizing_channel()))
    return mix([a, b]).with_provenance(construction="mixture-counterexample")


def zero_discord_state(p0, basis, tau0, tau1):
    """p0 |e0><e0| (x) tau0 + (1 - p0) |e1><e1| (x) tau1 for an orthonormal basis {e0, e1}."""
    _unit_interval("p0", p0)
    e0, e1 = (np.asarray(e, dtype=complex).reshape(2) for e in basis)
    gram = np.array([[np.vdot(a, b) for b in (e0, e1)] for a in (e0, e1)])
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise ArgumentError("basis vectors are not orthonormal")
    tau0 = validate_density(tau0, "tau0")
    tau1 = validate_density(tau1, "tau1")
    rho = p0 * tensor(np.outer(e0, e0.conj()), tau0) + (1 - p0) * tensor(np.outer(e1, e1.conj()), tau1)
    return pdo_from_state(rho, {"construction": "zero-discord"})


def product_state(rho_a, rho_b):
    return pdo_from_state(tensor(rho_a, rho_b), {"construction": "product"})


@dataclass
class SweepRow:
    parameters: dict
    report: object


@dataclass
class SweepResult:
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rows:
            raise ArgumentError("a sweep needs at least one row")
        keys = set(self.rows[0].parameters)
        if any(set(row.parameters) != keys for row in self.rows):
            raise ArgumentError("all sweep rows must carry the same parameter keys")

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            rep = row.report
            w.writerow(
                [
                    fmt(row.parameters.get("p")),
                    fmt(row.parameters.get("q")),
                    fmt(rep.e_neg),
                    fmt(rep.f),
                    fmt(rep.f_forward),
                    fmt(rep.f_reverse),
                    fmt(rep.aspatiality),
                    rep.region,
                ]
            )
        return buf.getvalue()

    def to_json(self):
        doc = {
            "metadata": self.metadata,
            "rows": [
                {"parameters": row.parameters, "measures": row.report.to_dict()} for row in self.rows
            ],
        }
        return json.dumps(round_floats(doc), indent=2, ensure_ascii=False) + "\n"


def fmt(x):
    """12 significant digits; empty for a missing value."""
    if x is None:
        return ""
    return format(float(x), ".12g")


def round_floats(obj):
    """12 significant digits throughout; non-finite floats become None for JSON."""
    if isinstance(obj, float):
        return float(format(obj, ".12g")) if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def _tolerances(eps_spatial, eps_temporal, tol_opt):
    return {"eps_spatial": eps_spatial, "eps_temporal": eps_temporal, "tol_opt": tol_opt}


def _sweep(generator_id, points, build, eps_spatial, eps_temporal, tol_opt, **meta):
    rows = []
    for params in sorted(points, key=lambda d: tuple(d[k] for k in sorted(d))):
        rep = classify(build(**params), eps_spatial, eps_temporal, tol_opt)
        rows.append(SweepRow(params, rep))
    metadata = {
        "generator": generator_id,
        "tolerances": _tolerances(eps_spatial, eps_temporal, tol_opt),
        **meta,
    }
    return SweepResult(rows, metadata)


def grid(n):
    if n < 2:
        raise ArgumentError(f"grid size must be at least 2, got {n}")
    return [round(float(x), 12) for x in np.linspace(0.0, 1.0, n)]


def werner_sweep(n=101, eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    return _sweep(
        "werner",
        [{"q": q} for q in grid(n)],
        lambda q: werner(q),
        eps_spatial,
        eps_temporal,
        tol_opt,
    )


def biased_werner_line(q=0.25, n=101, eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    """Cut through the biased-Werner family at fixed q, varying the bias p."""
    return _sweep(
        "biased-werner",
        [{"p": p, "q": q} for p in grid(n)],
        biased_werner,
        eps_spatial,
        eps_temporal,
        tol_opt,
    )


def colormap_biased_werner(grid_p=101, grid_q=101, eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    """E_neg and f over the (p, q) lattice of biased Werner states."""
    points = [{"p": p, "q": q} for p in grid(grid_p) for q in grid(grid_q)]
    return _sweep("colormap", points, biased_werner, eps_spatial, eps_temporal, tol_opt)


def asymmetry_sweep(n=11, eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    return _sweep(
        "asymmetry",
        [{"p": p} for p in grid(n)],
        dephasing_asymmetry,
        eps_spatial,
        eps_temporal,
        tol_opt,
    )


def mixture_sweep(eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    return _sweep(
        "mixture", [{}], lambda: mixture_counterexample(), eps_spatial, eps_temporal, tol_opt
    )


def scatter_random_spatial(n=1000, seed=0, eps_spatial=EPS_SPATIAL, eps_temporal=EPS_TEMPORAL, tol_opt=TOL_OPT):
    """``n`` Hilbert-Schmidt random two-qubit states and their causal measures."""
    if n < 1:
        raise ArgumentError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    states = [random_density_operator(4, rng) for _ in range(n)]
    rows = [
        SweepRow({"sample": i}, classify(Pdo(rho), eps_spatial, eps_temporal, tol_opt))
        for i, rho in enumerate(states)
    ]
    return SweepResult(
        rows,
        {
            "generator": "random-scatter",
            "seed": seed,
            "measure": HILBERT_SCHMIDT,
            "tolerances": _tolerances(eps_spatial, eps_temporal, tol_opt),
        },
    )


EXPERIMENTS = ("werner", "biased-werner", "asymmetry", "mixture", "random-scatter", "colormap")


def run_experiment(name, grid_size=None, n=1000, seed=0, q=0.25, **tolerances):
    """Dispatch a named experiment; ``grid_size`` defaults per experiment."""
    if name == "werner":
        return werner_sweep(grid_size or 101, **tolerances)
    if name == "biased-werner":
        return biased_werner_line(q, grid_size or 101, **tolerances)
    if name == "asymmetry":
        return asymmetry_sweep(grid_size or 11, **tolerances)
    if name == "mixture":
        return mixture_sweep(**tolerances)
    if name == "random-scatter":
        return scatter_random_spatial(n, seed, **tolerances)
    if name == "colormap":
        g = grid_size or 101
        return colormap_biased_werner(g, g, **tolerances)
    raise ArgumentError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
