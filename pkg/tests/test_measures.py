import numpy as np
import pytest

from generators import random_pure_pdo, random_table_pdo, rank_deficient_pdo
from oracles import ppt
from pdo_causal.channels import (
    identity_channel,
    random_channel,
    random_density_operator,
    random_pure_state,
    random_unitary,
    unitary_channel,
)
from pdo_causal.errors import SolverError
from pdo_causal.experiments import (
    KET0,
    bell_states,
    biased_werner,
    dephasing_asymmetry,
    identity_channel_pdo,
    mixture_counterexample,
    werner,
    zero_discord_state,
)
from pdo_causal.linalg import tensor
from pdo_causal.measures import (
    EPS_TEMPORAL,
    REGIONS,
    TOL_OPT,
    aspatiality,
    atemporality,
    classify,
    entanglement_negativity,
    forward_atemporality,
    grid_minimum,
    minimize_negativity_over_tau,
    region_label,
    reverse_atemporality,
)
from pdo_causal.pdo import TemporalSpec, local_unitary, pdo_from_state, pdo_from_temporal, swap_pdo
from pdo_causal.pseudo_channel import FamilyAffine

BOUND = (np.sqrt(2) - 1) / 2


def test_aspatiality_examples():
    rng = np.random.default_rng(0)
    assert aspatiality(pdo_from_state(random_density_operator(4, rng))) < 1e-12
    assert aspatiality(identity_channel_pdo(random_density_operator(2, rng))) == pytest.approx(0.5)
    assert aspatiality(mixture_counterexample()) > 1e-3


def test_entanglement_negativity_examples():
    rng = np.random.default_rng(1)
    sep = pdo_from_state(tensor(random_density_operator(2, rng), random_density_operator(2, rng)))
    assert entanglement_negativity(sep) < 1e-12
    for b in bell_states().values():
        assert entanglement_negativity(b) == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(10))
def test_pure_state_negativity_is_schmidt_product(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    s = np.linalg.svd(psi.reshape(2, 2), compute_uv=False)
    r = pdo_from_state(np.outer(psi, psi.conj()))
    assert entanglement_negativity(r) == pytest.approx(s[0] * s[1], abs=1e-10)
    assert atemporality(r) == pytest.approx(s[0] * s[1], abs=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_temporal_construction_has_zero_forward(seed):
    rng = np.random.default_rng(seed)
    r = pdo_from_temporal(TemporalSpec(random_density_operator(2, rng), random_channel(rng)))
    res = forward_atemporality(r)
    assert res.value < 1e-9
    assert res.unique


def test_bell_atemporality():
    for b in bell_states().values():
        assert forward_atemporality(b).value == pytest.approx(0.5, abs=1e-9)
        assert reverse_atemporality(b).value == pytest.approx(0.5, abs=1e-9)


def test_pure_marginal_identity_is_temporal():
    r = pdo_from_temporal(TemporalSpec(KET0, identity_channel()))
    res = forward_atemporality(r)
    assert res.value <= TOL_OPT
    assert res.method == "tau-optimized"
    assert "rank-deficient-marginal" in res.flags


def test_asymmetry_half():
    r = dephasing_asymmetry(0.5)
    assert forward_atemporality(r).value < 1e-9
    assert reverse_atemporality(r).value > 0.01


def test_product_reverse_zero():
    rng = np.random.default_rng(2)
    r = pdo_from_state(tensor(random_density_operator(2, rng), random_density_operator(2, rng)))
    assert reverse_atemporality(r).value < 1e-9


def test_named_family_values():
    bw = biased_werner(0.5, 0.25)
    assert atemporality(bw) <= 1e-4
    assert entanglement_negativity(bw) == pytest.approx(0.0087, abs=3e-4)
    assert atemporality(mixture_counterexample()) == pytest.approx(0.0785, abs=0.003)
    for q in np.linspace(0, 1, 11):
        w = werner(q)
        assert atemporality(w) == pytest.approx(entanglement_negativity(w), abs=1e-6)


def test_tau_minimum_examples():
    rng = np.random.default_rng(3)
    tau_b = random_density_operator(2, rng)
    assert minimize_negativity_over_tau(pdo_from_state(tensor(KET0, tau_b))).value <= 1e-12
    assert minimize_negativity_over_tau(pdo_from_state(np.diag([1.0, 0, 0, 0]))).value <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_tau_minimum_matches_grid(seed):
    r = rank_deficient_pdo(np.random.default_rng(seed))
    opt = minimize_negativity_over_tau(r, certify=True)
    assert opt.value >= 0
    assert abs(opt.certificate) < 1e-3
    assert opt.certificate > -TOL_OPT


def test_grid_oracle_covers_plain_scan():
    """The pruned scan agrees with an exhaustive 0.05 lattice on a small ball."""
    r = rank_deficient_pdo(np.random.default_rng(7))
    fam = FamilyAffine(r)
    axis = np.arange(-1.5, 1.5 + 1e-9, 0.05)
    pts = np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.5]
    brute = fam.negativity_batch(pts).min()
    oracle = grid_minimum(r, radius=1.5, refine=())
    assert oracle.grid_value == pytest.approx(brute, abs=1e-12)


def test_solver_error_carries_incumbent():
    r = rank_deficient_pdo(np.random.default_rng(8))
    far = minimize_negativity_over_tau(r)
    if np.linalg.norm(far.v_star) < 0.02:
        pytest.skip("optimum already inside the tiny ball")
    with pytest.raises(SolverError) as err:
        minimize_negativity_over_tau(r, radius=0.01, max_radius=0.015)
    assert err.value.best is not None
    assert err.value.best.value >= far.value


def test_classify_regions():
    assert classify(bell_states()["psi-"]).region == "S∩Tc"
    assert classify(identity_channel_pdo(random_density_operator(2, np.random.default_rng(4)))).region == "Sc∩T"
    rep = classify(mixture_counterexample())
    assert rep.region == "Sc∩Tc"
    assert rep.e_neg is None and "not-a-state" in rep.flags
    prod = classify(pdo_from_state(np.diag([0.5, 0.25, 0.125, 0.125])))
    assert prod.region == "S∩T"
    assert set(REGIONS) == {region_label(a, b) for a in (True, False) for b in (True, False)}


@pytest.mark.parametrize("seed", range(10))
def test_report_invariants(seed):
    r = random_table_pdo(np.random.default_rng(seed))
    rep = classify(r)
    assert rep.f == min(rep.f_forward, rep.f_reverse)
    assert rep.region == region_label(rep.aspatiality <= 1e-9, rep.f <= EPS_TEMPORAL)
    d = rep.to_dict()
    assert set(d) == {"aspatiality", "f_forward", "f_reverse", "f", "e_neg", "region", "tolerances", "flags"}
    assert d["tolerances"] == {"eps_spatial": 1e-9, "eps_temporal": 1e-4, "tol_opt": 1e-5}


@pytest.mark.parametrize("seed", range(8))
def test_swap_duality(seed):
    rng = np.random.default_rng(seed)
    r = rank_deficient_pdo(rng) if seed % 2 else random_table_pdo(rng)
    assert forward_atemporality(r).value == pytest.approx(
        reverse_atemporality(swap_pdo(r)).value, abs=2 * TOL_OPT
    )


def test_convexity_witness():
    rng = np.random.default_rng(9)
    fam = FamilyAffine(rank_deficient_pdo(rng))
    for _ in range(200):
        v1, v2 = rng.normal(size=3) * 3, rng.normal(size=3) * 3
        assert fam.negativity((v1 + v2) / 2) <= (fam.negativity(v1) + fam.negativity(v2)) / 2 + 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    r = [random_table_pdo, rank_deficient_pdo, random_pure_pdo][seed % 3](rng)
    moved = local_unitary(r, random_unitary(2, rng), random_unitary(2, rng))
    assert atemporality(moved) == pytest.approx(atemporality(r), abs=2 * TOL_OPT)
    assert aspatiality(moved) == pytest.approx(aspatiality(r), abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_unitary_reversal(seed):
    rng = np.random.default_rng(seed)
    r = pdo_from_temporal(TemporalSpec(random_density_operator(2, rng), unitary_channel(random_unitary(2, rng))))
    assert reverse_atemporality(r).value <= EPS_TEMPORAL


@pytest.mark.parametrize("seed", range(5))
def test_zero_discord_is_temporal(seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(2, rng)
    r = zero_discord_state(
        rng.uniform(), (u[:, 0], u[:, 1]), random_density_operator(2, rng), random_density_operator(2, rng)
    )
    rep = classify(r)
    assert rep.aspatiality < 1e-12
    assert rep.f <= EPS_TEMPORAL


def test_strongly_entangled_states_are_atemporal():
    rng = np.random.default_rng(10)
    checked = 0
    while checked < 50:
        r = pdo_from_state(random_pure_state(4, rng))
        if entanglement_negativity(r) > BOUND + 0.01:
            assert atemporality(r) > EPS_TEMPORAL
            checked += 1


def test_biased_werner_separable_cells_are_temporal():
    for p in np.linspace(0, 1, 6):
        for q in np.linspace(0, 1, 6):
            r = biased_werner(p, q)
            if ppt(r.matrix, 1e-12):
                assert atemporality(r) <= EPS_TEMPORAL
