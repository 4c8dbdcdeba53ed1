"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines, or
directly with ``python tests/test_acceptance.py``.
"""

import time

import numpy as np

from generators import (
    maximally_mixed_marginal_state,
    random_pure_pdo,
    random_state_pdo,
    random_mechanism,
    random_table_pdo,
    rank_deficient_pdo,
)
from oracles import ppt
from pdo_causal.channels import random_channel, random_density_operator, random_unitary
from pdo_causal.experiments import (
    bell_states,
    biased_werner,
    dephasing_asymmetry,
    identity_channel_pdo,
    mixture_counterexample,
    werner,
)
from pdo_causal.linalg import hermitian_eigenvalues
from pdo_causal.measures import (
    aspatiality,
    atemporality,
    classify,
    entanglement_negativity,
    forward_atemporality,
    grid_minimum,
    reverse_atemporality,
)
from pdo_causal.pdo import TemporalSpec, local_unitary, pdo_from_state, pdo_from_temporal
from pdo_causal.pseudo_channel import recover_pseudo_channel, verify_compatibility
from pdo_causal.simulate import Mechanism, exact_pdo, reconstruct_pdo, sample_correlations
from test_simulate import constructive

BOUND = (np.sqrt(2) - 1) / 2
VERDICTS = []


def verdict(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, detail


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_01_bell_states():
    with Timer() as t:
        worst = 0.0
        for b in bell_states().values():
            rep = classify(b)
            for v in (rep.f_forward, rep.f_reverse, rep.f):
                worst = max(worst, abs(v - 0.5))
    verdict(1, worst <= 1e-6 and t.seconds < 1, f"max |f - 0.5| = {worst:.2e}, {t.seconds:.2f} s")


def test_criterion_02_biased_werner():
    with Timer() as t:
        rep = classify(biased_werner(0.5, 0.25))
    ok = rep.f <= 1e-4 and 0.0080 <= rep.e_neg <= 0.0095 and t.seconds < 1
    verdict(2, ok, f"f = {rep.f:.2e}, E_neg = {rep.e_neg:.5f}, {t.seconds:.2f} s")


def test_criterion_03_mixture():
    with Timer() as t:
        r = mixture_counterexample()
        f, a = atemporality(r), aspatiality(r)
    ok = abs(f - 0.0785) <= 0.003 and a > 1e-3 and t.seconds < 5
    verdict(3, ok, f"f = {f:.5f}, aspatiality = {a:.4f}, {t.seconds:.2f} s")


def test_criterion_04_identity_channel_spectrum():
    rng = np.random.default_rng(4)
    worst_eig = worst_asp = 0.0
    for _ in range(100):
        rho = random_density_operator(2, rng)
        p, c = 2 * rho[0, 0].real - 1, 2 * rho[0, 1]
        n = np.sqrt(p**2 + abs(c) ** 2)
        expected = np.sort([-0.5, 0.5, 0.5 * (1 + n), 0.5 * (1 - n)])
        r = identity_channel_pdo(rho)
        worst_eig = max(worst_eig, np.max(np.abs(hermitian_eigenvalues(r.matrix) - expected)))
        worst_asp = max(worst_asp, abs(aspatiality(r) - 0.5))
    ok = worst_eig <= 1e-9 and worst_asp <= 1e-9
    verdict(4, ok, f"max eigenvalue error = {worst_eig:.2e}, max |aspatiality - 0.5| = {worst_asp:.2e}")


def test_criterion_05_entanglement_bound():
    rng = np.random.default_rng(5)
    with Timer() as t:
        temporal_states = violations = 0
        for _ in range(1000):
            rep = classify(random_state_pdo(rng))
            if rep.f <= 1e-4:
                temporal_states += 1
                violations += rep.e_neg > BOUND + 1e-6
        worst = 0.0
        for _ in range(1000):
            r = pdo_from_temporal(TemporalSpec(random_density_operator(2, rng), random_channel(rng)))
            worst = max(worst, entanglement_negativity(r))
    ok = violations == 0 and worst <= BOUND + 1e-6 and t.seconds < 120
    verdict(
        5,
        ok,
        f"{temporal_states} temporal states, {violations} violations; "
        f"max PT negativity of constructions = {worst:.4f}, {t.seconds:.1f} s",
    )


def test_criterion_06_maximal_entanglement_identity():
    rng = np.random.default_rng(6)
    worst = worst_schmidt = 0.0
    for _ in range(200):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        r = pdo_from_state(np.outer(psi, psi.conj()))
        s = np.linalg.svd(psi.reshape(2, 2), compute_uv=False)
        f, e = atemporality(r), entanglement_negativity(r)
        worst = max(worst, abs(f - e))
        worst_schmidt = max(worst_schmidt, abs(f - s[0] * s[1]), abs(e - s[0] * s[1]))
    for _ in range(200):
        r = maximally_mixed_marginal_state(rng)
        worst = max(worst, abs(atemporality(r) - entanglement_negativity(r)))
    ok = worst <= 1e-4 and worst_schmidt <= 1e-6
    verdict(6, ok, f"max |f - E_neg| = {worst:.2e}, max Schmidt error = {worst_schmidt:.2e}")


def test_criterion_07_asymmetry():
    with Timer() as t:
        inner = [dephasing_asymmetry(p) for p in np.round(np.arange(0.1, 0.91, 0.1), 12)]
        fwd = max(forward_atemporality(r).value for r in inner)
        rev = min(reverse_atemporality(r).value for r in inner)
        ends = max(reverse_atemporality(dephasing_asymmetry(p)).value for p in (0.0, 1.0))
    ok = fwd <= 1e-4 and rev >= 1e-3 and ends <= 1e-4 and t.seconds < 10
    verdict(
        7,
        ok,
        f"max f_forward = {fwd:.2e}, min f_reverse = {rev:.4f}, endpoint f_reverse = {ends:.2e}, {t.seconds:.2f} s",
    )


def test_criterion_08_werner_line():
    qs = np.linspace(0, 1, 101)
    fs, es, sep = [], [], []
    for q in qs:
        r = werner(q)
        fs.append(atemporality(r))
        es.append(entanglement_negativity(r))
        sep.append(ppt(r.matrix, 1e-12))
    worst = float(np.max(np.abs(np.array(fs) - np.array(es))))
    # first grid point where both measures vanish, against the first PPT point
    q_measures = qs[next(i for i in range(101) if fs[i] <= 1e-4 and es[i] <= 1e-6)]
    q_ppt = qs[sep.index(True)]
    ok = worst <= 1e-4 and abs(q_measures - q_ppt) <= 0.01 + 1e-12
    verdict(8, ok, f"max |f - E_neg| = {worst:.2e}, vanishing at q = {q_measures:.2f}, PPT from q = {q_ppt:.2f}")


def test_criterion_09_pseudo_channel_roundtrip():
    rng = np.random.default_rng(9)
    worst_res = worst_gap = 0.0
    for i in range(500):
        if i % 5:
            r = random_table_pdo(rng)
            for d in ("forward", "reverse"):
                worst_res = max(worst_res, verify_compatibility(recover_pseudo_channel(r, d), r))
        else:
            r = rank_deficient_pdo(rng)
            run = forward_atemporality(r)
            worst_res = max(worst_res, verify_compatibility(run.pseudo_channel, r))
            oracle = grid_minimum(r, radius=4.0)
            worst_gap = max(worst_gap, abs(run.value - oracle.value))
    ok = worst_res <= 1e-8 and worst_gap <= 1e-3
    verdict(9, ok, f"max residual = {worst_res:.2e}, max |optimizer - grid| = {worst_gap:.2e}")


def test_criterion_10_temporal_by_construction():
    rng = np.random.default_rng(10)
    with Timer() as t:
        worst, methods = 0.0, set()
        for _ in range(1000):
            r = pdo_from_temporal(TemporalSpec(random_density_operator(2, rng), random_channel(rng)))
            run = forward_atemporality(r)
            worst = max(worst, run.value)
            methods.add(run.method)
    ok = worst <= 1e-6 and methods == {"closed-form"} and t.seconds < 30
    verdict(10, ok, f"max f_forward = {worst:.2e}, methods = {sorted(methods)}, {t.seconds:.2f} s")


def test_criterion_11_local_unitary_invariance():
    rng = np.random.default_rng(11)
    makers = (random_table_pdo, random_state_pdo, rank_deficient_pdo, random_pure_pdo)
    worst_f = worst_a = 0.0
    for i in range(200):
        r = makers[i % 4](rng)
        moved = local_unitary(r, random_unitary(2, rng), random_unitary(2, rng))
        worst_f = max(worst_f, abs(atemporality(r) - atemporality(moved)))
        worst_a = max(worst_a, abs(aspatiality(r) - aspatiality(moved)))
    ok = worst_f <= 2e-4 and worst_a <= 1e-9
    verdict(11, ok, f"max |delta f| = {worst_f:.2e}, max |delta aspatiality| = {worst_a:.2e}")


def test_criterion_12_simulator():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        m = random_mechanism(rng)
        worst = max(worst, np.max(np.abs(exact_pdo(m).matrix - constructive(m).matrix)))
    singlet = Mechanism.spatial(bell_states()["psi-"].matrix)
    est, _ = reconstruct_pdo(sample_correlations(singlet, 1_000_000, seed=12))
    f_hat = atemporality(est)
    ok = worst <= 1e-10 and 0.45 <= f_hat <= 0.55
    verdict(12, ok, f"max exact-vs-constructive = {worst:.2e}, singlet f_hat = {f_hat:.4f}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
