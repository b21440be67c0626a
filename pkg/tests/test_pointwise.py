import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import umbellab as U
from umbellab.pointwise import NoSolution

L2 = U.LpSpace(3, 2.0)
unit = st.floats(min_value=-1, max_value=1, allow_nan=False)
vec3 = st.tuples(unit, unit, unit)


def cfg(**kw):
    return U.InequalityConfig(**kw)


def test_tripod_right_angle_example():
    # w at the origin, legs along the axes, z at the barycenter of the legs
    w, x, y = (0.0, 0.0, 0.0), (2.0, 0.0, 0.0), (0.0, 2.0, 0.0)
    z = (1.0, 1.0, 0.0)
    rep = U.check_inequality(U.InequalityId.Q_TRIPOD, cfg(exponent=2.0, K=1.0),
                             (w, x, y, z), L2)
    assert rep.holds
    assert rep.margin == pytest.approx(0.5)


STAR4 = U.FiniteMatrixSpace(np.array([
    [0.0, 2.0, 2.0, 1.0],
    [2.0, 0.0, 2.0, 1.0],
    [2.0, 2.0, 0.0, 1.0],
    [1.0, 1.0, 1.0, 0.0]]))


def test_tripod_four_star_violation():
    # unit star graph: z the hub, w/x/y the leaves
    rep = U.check_inequality(U.InequalityId.Q_TRIPOD, cfg(exponent=2.0, K=1.0),
                             (0, 1, 2, 3), STAR4)
    assert not rep.holds
    assert rep.margin == pytest.approx(-0.25)


def test_tripod_slack_absorbs_violation():
    rep = U.check_inequality(U.InequalityId.Q_TRIPOD,
                             cfg(exponent=2.0, K=1.0, slack=0.25),
                             (0, 1, 2, 3), STAR4)
    assert rep.holds


@given(vec3, vec3, vec3)
def test_midpoint_curvature_holds_in_hilbert(x, y, z):
    m = tuple((a + b) / 2 for a, b in zip(x, y))
    rep = U.check_inequality(U.InequalityId.MIDPOINT_CURVATURE, cfg(),
                             (x, y, z, m), L2)
    assert rep.holds or rep.margin > -1e-9


@given(vec3, vec3)
def test_p_uniform_convexity_p2_k1_is_parallelogram_law(x, y):
    rep = U.check_inequality(U.InequalityId.P_UNIFORM_CONVEXITY,
                             cfg(exponent=2.0, K=1.0), (x, y), L2)
    assert rep.holds or abs(rep.margin) < 1e-9


def test_umbel_variants_agree_on_finite_families():
    rng = np.random.default_rng(5)
    for _ in range(50):
        w, z, *xs = (tuple(rng.uniform(-1, 1, 3)) for _ in range(6))
        pts = (w, z, tuple(xs))
        base = U.check_inequality(U.InequalityId.RELAXED_P_UMBEL,
                                  cfg(exponent=2.0, K=4.0), pts, L2)
        sup = U.check_inequality(U.InequalityId.SUPER_RELAXED_P_UMBEL,
                                 cfg(exponent=2.0, K=4.0), pts, L2)
        assert base.margin == pytest.approx(sup.margin)


def test_certify_l2_tripod_no_violations():
    rep = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg(exponent=2.0, K=1.0),
                    U.ball_sampler(L2, U.InequalityId.Q_TRIPOD), n=5000, seed=3)
    assert rep.violations == 0
    assert rep.worst_margin >= 0


def test_certify_is_seed_deterministic():
    a = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg(),
                  U.ball_sampler(L2, U.InequalityId.Q_TRIPOD), n=1000, seed=9)
    b = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg(),
                  U.ball_sampler(L2, U.InequalityId.Q_TRIPOD), n=1000, seed=9)
    assert a.worst_margin == b.worst_margin
    assert a.violations == b.violations


def test_campaign_report_json_fields():
    rep = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg(),
                    U.ball_sampler(L2, U.InequalityId.Q_TRIPOD), n=100, seed=0)
    obj = json.loads(rep.to_json())
    for key in ("id", "config", "n", "seed", "violations", "worst_margin",
                "worst_witness"):
        assert key in obj


def test_min_feasible_K_tripod():
    sampler = U.ball_sampler(L2, U.InequalityId.Q_TRIPOD)
    K = U.min_feasible_K(L2, U.InequalityId.Q_TRIPOD, cfg(exponent=2.0),
                         sampler, n=2000, seed=7, bracket=(0.5, 64.0))
    # K=1 already certifies on l2, so the bisection should land at or below 1
    assert K <= 1.0 + 1e-3
    rep = U.certify(L2, U.InequalityId.Q_TRIPOD, cfg(exponent=2.0, K=K),
                    U.ball_sampler(L2, U.InequalityId.Q_TRIPOD), n=2000, seed=7)
    assert rep.violations == 0


# Heisenberg parallelogram


def test_parallelogram_constants_p2_c1():
    K, lam = U.parallelogram_constants(2.0, 1.0)
    assert K == pytest.approx((162.0 / 16.0) ** 0.25)
    assert lam == pytest.approx(27.0 / 19.0)


def test_parallelogram_worked_pair():
    hs = U.HeisenbergMetricSpace(U.standard_symplectic(2), p=2.0)
    a = U.HPoint((1.0, 0.0), 0.0)
    rep = U.check_parallelogram(hs.space, 2.0, 1.0, a, a)
    assert rep.holds


def test_parallelogram_requires_p_at_least_two():
    hs = U.HeisenbergMetricSpace(U.standard_symplectic(2), p=2.0)
    a = U.HPoint((1.0, 0.0), 0.0)
    with pytest.raises(Exception):
        U.check_parallelogram(hs.space, 1.5, 1.0, a, a)


# solver


def test_solve_umbel_K_frozen_value():
    K = U.solve_umbel_K(2.0, 1.0)
    assert 18.0 < K < 19.0
    assert K == pytest.approx(18.8204306, rel=1e-6)
    # residual of the defining condition at the solution
    c, p = 1.0, 2.0
    u = 2 * c / K
    lhs = (1 / 2 ** p) * (u + (2 - u ** p) ** (1 / p)) ** p + 2 ** (p + 1) / K
    assert lhs <= 1.0 + 1e-9


def test_solve_umbel_K_no_solution_at_p1():
    with pytest.raises(NoSolution):
        U.solve_umbel_K(1.0, 1.0)


# moduli of convexity


def test_modulus_delta_hilbert_oracle():
    for eps in (0.5, 1.0, 1.5):
        est = U.modulus_delta(U.LpSpace(2, 2.0), eps)
        assert est.value == pytest.approx(1 - math.sqrt(1 - eps * eps / 4), abs=1e-6)


def test_modulus_delta_sqrt2():
    est = U.modulus_delta(U.LpSpace(2, 2.0), math.sqrt(2.0))
    assert est.value == pytest.approx(1 - math.sqrt(0.5), abs=0.01)


def test_modulus_sandwich_l2():
    sp = U.LpSpace(2, 2.0)
    for eps in (0.5, 1.0, 1.5):
        d_half = U.modulus_delta(sp, eps / 2).value
        d_tilde = U.modulus_delta_tilde(sp, eps).value
        d_twice = 2 * U.modulus_delta(sp, eps).value
        assert d_half <= d_tilde + 0.02
        assert d_tilde <= d_twice + 0.02


def test_modulus_beta_positive_for_separated_families():
    est = U.modulus_beta(U.LpSpace(2, 2.0), 0.8, m=3)
    assert est.value >= -1e-9


# misc helpers


def test_alpha_sequence_shrinks_toward_midpoint():
    sp = U.LpSpace(2, 2.0)
    x, y, z = (0.0, 0.0), (2.0, 0.0), (1.0, 3.0)
    m = (1.0, 0.0)
    seq = U.alpha_sequence(sp, x, y, z, m, 6)
    assert len(seq) == 7
    # in Hilbert space every alpha equals 2 exactly
    for a in seq:
        assert a == pytest.approx(2.0, rel=1e-9)


def test_alpha_sequence_rejects_z_equal_m():
    sp = U.LpSpace(2, 2.0)
    with pytest.raises(Exception):
        U.alpha_sequence(sp, (0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 0.0), 3)


def test_ramsey_refine_finds_monochromatic_clique():
    rng = np.random.default_rng(1)
    pts = [tuple(rng.uniform(-1, 1, 2)) for _ in range(24)]
    idx = U.ramsey_refine(pts, p=2.0, K=2.0, N=4, m=3, space=U.LpSpace(2, 2.0))
    assert len(idx) == 3
    assert len(set(idx)) == 3
