import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rsp7 import analysis, noise
from rsp7.analysis import (
    AttackParams,
    OutsideStrategy,
    QubitScope,
    SweepConfig,
    SweepModel,
    analytic_detection_probability,
    averaged_fidelity,
    branch_fidelity,
    discrepancy_report,
    fidelity,
    fidelity_sweep,
    inside_attack,
    outside_attack_sim,
    purity,
)
from rsp7.linalg import ket, pure_density
from rsp7.noise import EvolutionModel, NoiseKind, NoiseSpec
from rsp7.protocol import ALL_OUTCOME_KEYS, OutcomeKey, TargetState

from conftest import random_density

SQ2 = 1.0 / math.sqrt(2.0)
BELL = TargetState(SQ2, SQ2)
KEY00 = OutcomeKey(1, "00", "00")


# --------------------------------------------------------------------------
# Metrics.


def test_fidelity_basics():
    xi = TargetState(0.6, 0.8).ket()
    assert_allclose(fidelity(xi, pure_density(xi)), 1.0, atol=1e-14)
    assert_allclose(fidelity(ket("00"), np.eye(4) / 4.0), 0.25, atol=1e-14)


def test_fidelity_phase_invariance():
    rng = np.random.default_rng(2)
    rho = random_density(rng, 4)
    xi = TargetState(0.6, 0.8).ket()
    a = fidelity(xi, rho)
    b = fidelity(np.exp(1j * 1.3) * xi, rho)
    assert abs(a - b) <= 1e-14


def test_fidelity_linear_in_rho():
    rng = np.random.default_rng(3)
    r1 = random_density(rng, 4)
    r2 = random_density(rng, 4)
    xi = TargetState(0.8, 0.6).ket()
    p = 0.3
    mix = p * r1 + (1 - p) * r2
    assert abs(fidelity(xi, mix)
               - (p * fidelity(xi, r1) + (1 - p) * fidelity(xi, r2))) <= 1e-12


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        fidelity(ket("0"), np.eye(4) / 4.0)


def test_purity_rank_one_iff_one():
    rng = np.random.default_rng(4)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    assert_allclose(purity(pure_density(v)), 1.0, atol=1e-12)
    mixed = random_density(rng, 8)
    assert purity(mixed) < 1.0 - 1e-6
    assert_allclose(purity(np.eye(2) / 2.0), 0.5, atol=1e-14)


# --------------------------------------------------------------------------
# Sweeps.


def test_sweep_eta_zero_rows_are_one():
    cfg = SweepConfig(kinds=tuple(NoiseKind), target=BELL, eta_steps=2)
    rows = fidelity_sweep(cfg)
    for row in rows:
        if row.eta == 0.0:
            assert_allclose(row.fidelity_exact, 1.0, atol=1e-12)
            assert_allclose(row.fidelity_truncated, 1.0, atol=1e-12)


def test_sweep_shape_order_and_determinism():
    cfg = SweepConfig(kinds=(NoiseKind.PHASE_FLIP, NoiseKind.BIT_FLIP),
                      target=BELL, eta_steps=3)
    rows = fidelity_sweep(cfg)
    assert len(rows) == 6
    labels = [(r.kind.value, r.eta) for r in rows]
    assert labels == sorted(labels)
    again = fidelity_sweep(cfg)
    assert rows == again


def test_sweep_branch_mode_matches_branch_fidelity():
    spec = NoiseSpec(NoiseKind.PHASE_DAMPING, 0.5)
    cfg = SweepConfig(kinds=(NoiseKind.PHASE_DAMPING,), target=BELL,
                      eta_start=0.5, eta_end=1.0, eta_steps=2, branch=KEY00)
    rows = fidelity_sweep(cfg)
    want = branch_fidelity(BELL, KEY00, spec, EvolutionModel.EXACT)
    assert_allclose(rows[0].fidelity_exact, want, atol=1e-12)
    assert rows[0].branch == KEY00.label()


def test_sweep_error_marker_on_impossible_branch():
    # amplitude damping at eta=1 kills branches that need any helper bit 1
    cfg = SweepConfig(kinds=(NoiseKind.AMPLITUDE_DAMPING,), target=BELL,
                      eta_start=1.0, eta_end=1.0, eta_steps=2,
                      branch=OutcomeKey(1, "11", "11"))
    rows = fidelity_sweep(cfg)
    for row in rows:
        assert row.fidelity_exact is None
        assert row.fidelity_truncated is None
        assert row.error_exact == "impossible-branch"
        assert row.error_truncated == "impossible-branch"


def test_sweep_transmitted_scope_skips_truncated_column():
    cfg = SweepConfig(kinds=(NoiseKind.BIT_FLIP,), target=BELL, eta_steps=2,
                      qubit_scope=QubitScope.TRANSMITTED)
    rows = fidelity_sweep(cfg)
    for row in rows:
        assert row.fidelity_exact is not None
        assert row.fidelity_truncated is None
        assert row.error_truncated is None


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(kinds=(NoiseKind.BIT_FLIP,), target=BELL, eta_steps=1)
    with pytest.raises(ValueError):
        SweepConfig(kinds=(NoiseKind.BIT_FLIP,), target=BELL,
                    eta_start=0.8, eta_end=0.2)
    with pytest.raises(ValueError):
        SweepConfig(kinds=(NoiseKind.BIT_FLIP,), target=BELL,
                    model=SweepModel.TRUNCATED,
                    qubit_scope=QubitScope.TRANSMITTED)


def test_averaged_fidelity_is_weighted_branch_average():
    spec = NoiseSpec(NoiseKind.BIT_FLIP, 0.3)
    rho = noise.evolved_state(spec, EvolutionModel.EXACT)
    num = 0.0
    den = 0.0
    for key in ALL_OUTCOME_KEYS:
        raw = noise.branch_reduction(rho, BELL, key)
        p = float(np.trace(raw).real)
        num += float(np.real(np.vdot(BELL.ket(), raw @ BELL.ket())))
        den += p
    want = num / den
    got = averaged_fidelity(BELL, spec, EvolutionModel.EXACT)
    assert_allclose(got, want, atol=1e-12)


# --------------------------------------------------------------------------
# Inside attack.


def test_trivial_attack_extracts_nothing():
    res = inside_attack(BELL, KEY00, AttackParams.trivial())
    # attacker's joint state is maximally mixed on A times a pure register
    assert_allclose(res.purity, 0.5, atol=1e-12)
    assert_allclose(res.env_purity, 1.0, atol=1e-12)
    assert_allclose(res.alice_state, np.eye(2) / 2.0, atol=1e-12)
    alt = inside_attack(TargetState(0.6, 0.8), KEY00, AttackParams.trivial())
    assert np.max(np.abs(res.env_state - alt.env_state)) <= 1e-12


def test_randomized_attack_always_leaves_mixed_state(rng):
    for _ in range(100):
        params = AttackParams.random(2, rng)
        res = inside_attack(BELL, KEY00, params)
        assert res.purity < 1.0 - 1e-6
        assert res.isometry_residual <= 1e-10


def test_attack_purity_is_exactly_half_for_isometries(rng):
    for env_dim in (2, 3, 5):
        params = AttackParams.random(env_dim, rng)
        res = inside_attack(BELL, KEY00, params)
        assert_allclose(res.purity, 0.5, atol=1e-10)


def test_attack_result_is_target_and_key_independent(rng):
    params = AttackParams.random(2, rng)
    results = [
        inside_attack(t, k, params)
        for t in (BELL, TargetState(0.6, 0.8))
        for k in (KEY00, OutcomeKey(2, "10", "10"))
    ]
    base = results[0]
    for res in results[1:]:
        assert abs(res.purity - base.purity) <= 1e-10
        assert abs(res.raw_branch_weight - base.raw_branch_weight) <= 1e-10


def test_attack_cauchy_schwarz_chain(rng):
    # trace of the unnormalized attacker state squared equals
    # 2 c^2 (1 + |x|^2) and is bounded by 4 c^2, c = half the raw weight
    for _ in range(25):
        params = AttackParams.random(3, rng)
        res = inside_attack(BELL, KEY00, params)
        raw = res.rho_ae * res.raw_branch_weight
        lhs = float(np.trace(raw @ raw).real)
        c = res.raw_branch_weight / 2.0
        mid = 2.0 * c**2 * (1.0 + abs(res.cross_overlap) ** 2)
        assert abs(lhs - mid) <= 1e-10
        assert lhs <= 4.0 * c**2 + 1e-10


def test_attack_raw_weight_is_eighth():
    res = inside_attack(BELL, KEY00, AttackParams.trivial())
    assert_allclose(res.raw_branch_weight, 1.0 / 8.0, atol=1e-12)


def test_attack_params_constraint_violations_are_named():
    e0 = np.array([1.0, 0.0])
    zero = np.zeros(2)
    with pytest.raises(ValueError, match="first-row normalization"):
        AttackParams(e00=0.5 * e0, e01=zero, e10=zero, e11=e0)
    with pytest.raises(ValueError, match="second-row normalization"):
        AttackParams(e00=e0, e01=zero, e10=zero, e11=0.5 * e0)
    with pytest.raises(ValueError, match="row orthogonality"):
        AttackParams(e00=e0, e01=zero, e10=e0, e11=zero)
    with pytest.raises(ValueError, match="environment"):
        AttackParams(e00=np.array([1.0]), e01=np.array([0.0]),
                     e10=np.array([0.0]), e11=np.array([1.0]))


# --------------------------------------------------------------------------
# Outside attack.


def _enumerated_detection(strategy):
    """Exhaustive average over decoy states, attacker bases and outcomes."""
    bases = analysis.DECOY_BASES  # [basis][vector][amplitude]
    comp, diag = bases[0], bases[1]
    prep = [(0, 0), (0, 1), (1, 0), (1, 1)]  # (basis, index) of |0>,|1>,|+>,|->
    total = 0.0
    for pb, pi in prep:
        state = bases[pb][pi]
        eve_bases = (0, 1) if strategy == OutsideStrategy.INTERCEPT_RESEND else (0,)
        for eb in eve_bases:
            for eo in range(2):
                p_eve = abs(np.vdot(bases[eb][eo], state)) ** 2
                resent = bases[eb][eo]
                p_pass = abs(np.vdot(bases[pb][pi], resent)) ** 2
                total += (1.0 / 4.0) * (1.0 / len(eve_bases)) * p_eve * (1 - p_pass)
    return total


def test_single_decoy_detection_matches_enumeration():
    for strategy in OutsideStrategy:
        want = _enumerated_detection(strategy)
        est = outside_attack_sim(1, strategy, trials=200000, seed=5)
        assert abs(est.probability - want) <= 3.0 * est.std_error
        assert_allclose(want, 0.25, atol=1e-12)


def test_analytic_curve():
    assert_allclose(analytic_detection_probability(1), 0.25, atol=1e-15)
    assert_allclose(analytic_detection_probability(10), 1 - 0.75**10,
                    atol=1e-15)
    with pytest.raises(ValueError):
        analytic_detection_probability(0)


def test_outside_sim_matches_analytic_for_many_decoys():
    est = outside_attack_sim(10, OutsideStrategy.INTERCEPT_RESEND,
                             trials=100000, seed=7)
    want = analytic_detection_probability(10)
    assert abs(est.probability - want) <= 3.0 * est.std_error


def test_outside_sim_determinism():
    a = outside_attack_sim(5, OutsideStrategy.MEASURE_RESEND,
                           trials=5000, seed=9)
    b = outside_attack_sim(5, OutsideStrategy.MEASURE_RESEND,
                           trials=5000, seed=9)
    assert a == b


def test_outside_sim_rejects_zero_decoys():
    with pytest.raises(ValueError):
        outside_attack_sim(0, OutsideStrategy.INTERCEPT_RESEND,
                           trials=100, seed=0)


# --------------------------------------------------------------------------
# Discrepancy report.


def test_discrepancy_report_contents():
    entries = discrepancy_report()
    assert len(entries) >= 3
    subjects = " ".join(e.subject for e in entries)
    assert "prefactor" in subjects
    assert "recovery-table" in subjects
    assert "terminal term" in subjects
    for e in entries:
        assert e.residual > 0.0
        assert e.printed and e.computed
