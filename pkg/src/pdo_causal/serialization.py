"""JSON and CSV formats for PDOs, channels, mechanisms and estimates.

Complex matrices are nested lists of ``[re, im]`` pairs; bare real numbers
are also accepted on input.
"""

import csv
import io

import numpy as np

from .channels import (
    QuantumChannel,
    choi_from_kraus,
    dephasing_channel,
    depolarizing_channel,
    identity_channel,
)
from .errors import ArgumentError, PdoError
from .experiments import fmt, round_floats
from .pdo import Pdo, TemporalSpec, pdo_from_pauli_coeffs
from .simulate import Mechanism


class InputError(ArgumentError):
    """A document does not match the expected schema."""


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, shape, field):
    try:
        rows = list(obj)
        out = np.zeros(shape, dtype=complex)
        if len(rows) != shape[0]:
            raise ValueError
        for i, row in enumerate(rows):
            row = list(row)
            if len(row) != shape[1]:
                raise ValueError
            for j, z in enumerate(row):
                if isinstance(z, (int, float)) and not isinstance(z, bool):
                    out[i, j] = float(z)
                else:
                    re, im = z
                    out[i, j] = complex(float(re), float(im))
    except (TypeError, ValueError):
        raise InputError(
            f"field '{field}' must be a {shape[0]}x{shape[1]} matrix of numbers or [re, im] pairs"
        ) from None
    return out


def pdo_from_json(doc, field=None):
    """PDO from ``{"pauli_coeffs": 4x4}`` or ``{"matrix": 4x4}``; errors name the field."""

    def name(key):
        return key if field is None else f"{field}.{key}"

    if not isinstance(doc, dict):
        raise InputError(f"field '{field}' must be a JSON object" if field else "PDO document must be a JSON object")
    key = "pauli_coeffs" if "pauli_coeffs" in doc else "matrix"
    try:
        if key == "pauli_coeffs":
            try:
                r = np.array(doc["pauli_coeffs"], dtype=float)
            except (TypeError, ValueError):
                raise InputError(f"field '{name(key)}' must be a 4x4 array of reals") from None
            if r.shape != (4, 4):
                raise InputError(f"field '{name(key)}' must be 4x4, got shape {r.shape}")
            return pdo_from_pauli_coeffs(r, {"construction": "pauli-coeffs", "source": "json"})
        if "matrix" in doc:
            return Pdo(matrix_from_json(doc["matrix"], (4, 4), name(key)), {"source": "json"})
    except InputError:
        raise
    except PdoError as exc:
        raise InputError(f"field '{name(key)}': {exc}") from None
    raise InputError(f"{'field ' + repr(field) if field else 'PDO document'} needs a 'pauli_coeffs' or a 'matrix' field")


def pdo_to_json(r):
    return {
        "matrix": matrix_to_json(r.matrix),
        "pauli_coeffs": round_floats(r.pauli_coeffs.tolist()),
        "metadata": {k: v for k, v in r.provenance.items()},
    }


def channel_from_json(doc, field="channel"):
    if not isinstance(doc, dict):
        raise InputError(f"field '{field}' must be a JSON object")
    try:
        if "choi" in doc:
            return QuantumChannel(matrix_from_json(doc["choi"], (4, 4), f"{field}.choi"))
        if "kraus" in doc:
            ks = doc["kraus"]
            if not isinstance(ks, list):
                raise InputError(f"field '{field}.kraus' must be a list of 2x2 matrices")
            return choi_from_kraus(
                [matrix_from_json(k, (2, 2), f"{field}.kraus[{i}]") for i, k in enumerate(ks)]
            )
        if "name" in doc:
            name = doc["name"]
            if name == "identity":
                return identity_channel()
            if name == "dephasing":
                return dephasing_channel(float(doc.get("p", 0.5)))
            if name in ("depolarizing", "completely-depolarizing"):
                return depolarizing_channel()
            raise InputError(f"field '{field}.name': unknown channel {name!r}")
    except InputError:
        raise
    except PdoError as exc:
        raise InputError(f"field '{field}': {exc}") from None
    raise InputError(f"field '{field}' needs 'choi', 'kraus' or 'name'")


def channel_to_json(ch):
    doc = {"choi": matrix_to_json(ch.choi)}
    if ch.kraus is not None:
        doc["kraus"] = [matrix_to_json(k) for k in ch.kraus]
    return doc


def mechanism_from_json(doc, field="mechanism"):
    if not isinstance(doc, dict):
        raise InputError(f"field '{field}' must be a JSON object")
    kind = doc.get("kind")
    try:
        if kind == "spatial":
            if "state" not in doc:
                raise InputError(f"field '{field}.state' is required for a spatial mechanism")
            state = doc["state"]
            if isinstance(state, dict):
                # same shape as a PDO document; Mechanism checks positivity
                return Mechanism.spatial(pdo_from_json(state, f"{field}.state").matrix)
            return Mechanism.spatial(matrix_from_json(state, (4, 4), f"{field}.state"))
        if kind == "temporal":
            for key in ("initial", "channel"):
                if key not in doc:
                    raise InputError(f"field '{field}.{key}' is required for a temporal mechanism")
            rho = matrix_from_json(doc["initial"], (2, 2), f"{field}.initial")
            ch = channel_from_json(doc["channel"], f"{field}.channel")
            return Mechanism("temporal", temporal=TemporalSpec(rho, ch, doc.get("direction", "forward")))
        if kind == "mixture":
            comps = doc.get("components")
            if not isinstance(comps, list) or not comps:
                raise InputError(f"field '{field}.components' must be a non-empty list")
            parts = []
            for i, c in enumerate(comps):
                if not isinstance(c, dict) or "weight" not in c or "mechanism" not in c:
                    raise InputError(f"field '{field}.components[{i}]' needs 'weight' and 'mechanism'")
                parts.append((c["weight"], mechanism_from_json(c["mechanism"], f"{field}.components[{i}]")))
            return Mechanism.mixture(parts)
    except InputError:
        raise
    except PdoError as exc:
        raise InputError(f"field '{field}': {exc}") from None
    raise InputError(f"field '{field}.kind' must be 'spatial', 'temporal' or 'mixture'")


def pseudo_channel_record(pc, residual=None):
    doc = {
        "choi": matrix_to_json(pc.choi),
        "direction": pc.direction,
        "tau": None if pc.tau is None else matrix_to_json(pc.tau),
        "negativity": pc.negativity,
        "cptp": bool(pc.cptp),
        "method": pc.method,
    }
    if residual is not None:
        doc["residual"] = residual
    return doc


def estimate_to_json(est):
    return {
        "shots_per_setting": est.shots_per_setting,
        "r_hat": est.r_hat.tolist(),
        "standard_errors": est.standard_errors.tolist(),
    }


def estimate_to_csv(est):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("a", "b", "r_hat", "standard_error", "shots_per_setting"))
    for a in range(4):
        for b in range(4):
            w.writerow((a, b, fmt(est.r_hat[a, b]), fmt(est.standard_errors[a, b]), est.shots_per_setting))
    return buf.getvalue()
