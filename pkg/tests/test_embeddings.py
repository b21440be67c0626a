import math

import numpy as np
import pytest

import umbellab as U
from umbellab.embeddings import EmbeddingError


def test_bourgain_root_edge_norm():
    spec = U.parse_tree_spec("inc:h=4,b=6")
    f = U.bourgain_embed(spec, p=2.0)
    d = np.linalg.norm(np.asarray(f.point((1,))) - np.asarray(f.point(())))
    assert d == pytest.approx(math.sqrt((math.sqrt(2) - 1) ** 2 + 1), rel=1e-12)


def test_bourgain_is_injective_and_finite_distortion():
    spec = U.parse_tree_spec("inc:h=4,b=6")
    f = U.bourgain_embed(spec, p=2.0)
    pts = [tuple(f.point(v)) for v in U.vertices(spec)]
    assert len(set(pts)) == len(pts)
    lip, colip, dist = U.distortion(f)
    assert lip > 0 and colip > 0
    assert dist >= 1.0


def test_bourgain_variants():
    spec = U.parse_tree_spec("inc:h=4,b=6")
    f1 = U.bourgain_embed(spec, variant="l1")
    fi = U.bourgain_embed(spec, variant="linf")
    assert U.distortion(f1)[2] >= 1.0
    assert U.distortion(fi)[2] >= 1.0
    with pytest.raises(Exception):
        U.bourgain_embed(spec, p=1.0, variant="lp")


def test_distortion_rejects_constant_map():
    spec = U.parse_tree_spec("bin:h=2")
    f = U.named_map("constant", spec, U.LpSpace(2, 2.0))
    with pytest.raises(EmbeddingError):
        U.distortion(f)


# moduli curves


def test_moduli_envelopes():
    spec = U.parse_tree_spec("inc:h=4,b=6")
    f = U.bourgain_embed(spec, p=2.0)
    rho, omega = U.moduli(f)
    # rho nondecreasing, omega nondecreasing, rho <= omega pointwise
    ts = [1.0, 2.0, 3.0, 4.0]
    for a, b in zip(ts, ts[1:]):
        assert rho(a) <= rho(b) + 1e-12
        assert omega(a) <= omega(b) + 1e-12
    for t in ts:
        assert rho(t) <= omega(t) + 1e-12


def test_moduli_identity_tree():
    f = U.TreeMap.identity(U.parse_tree_spec("bin:h=4"))
    rho, omega = U.moduli(f)
    for t in (1.0, 2.0, 4.0):
        assert rho(t) == pytest.approx(t)
        assert omega(t) == pytest.approx(t)


def test_modulus_curve_step_semantics():
    curve = U.ModulusCurve((1.0, 2.0, 4.0), (1.0, 1.5, 3.0))
    assert curve(1.0) == 1.0
    assert curve(1.9) == 1.0
    assert curve(2.0) == 1.5
    assert curve(5.0) == 3.0


def test_compression_integral_identity_curve():
    assert U.compression_integral(lambda t: t, 2.0, math.e) == pytest.approx(
        1.0, rel=1e-9)


def test_compression_integral_step_curve_closed_form():
    curve = U.ModulusCurve((1.0, 2.0), (1.0, 2.0))
    # integral of rho(t)^p t^{-p} dt/t with p=2 over [1, 4]
    expected = (1.0 * (1 - 2 ** -2.0) / 2.0) + (4.0 * (2 ** -2.0 - 4 ** -2.0) / 2.0)
    assert U.compression_integral(curve, 2.0, 4.0) == pytest.approx(expected, rel=1e-9)


def test_compression_chain_against_umbel_lhs():
    spec = U.parse_tree_spec("inc:h=4,b=6")
    f = U.bourgain_embed(spec, p=2.0)
    rho, omega = U.moduli(f)
    k, p = 2, 2.0
    lhsv = U.lhs(U.InvariantId.UMBEL_COTYPE, f, p)
    chain = sum(rho(2.0 ** (s + 1)) ** p / 2 ** (s * p) for s in range(1, k))
    assert chain <= lhsv + 1e-9
    integral = U.compression_integral(rho, p, 2.0 ** (k - 1))
    assert integral <= (2 ** p - 1) / p * lhsv * omega(1.0) ** p + 1e-9


# lifting


def make_oracle(rng, n=25, C=2.0, K=0.05):
    dom = U.LpSpace(2, 2.0)
    tgt = U.LpSpace(2, 2.0)
    pts = [tuple(x) for x in rng.uniform(-1, 1, (n, 2))]
    return U.QuotientOracle(dom, tuple(pts), tgt, tuple(pts), C, K)


def make_liftable_g(rng, oracle, spec):
    assign = {}
    for v in U.vertices(spec):
        i = int(rng.integers(0, len(oracle.domain)))
        base = np.asarray(oracle.values[i])
        assign[v] = tuple(base + rng.uniform(-0.02, 0.02, 2))
    return U.TreeMap(spec, oracle.target_space, assign)


def test_lift_random_instances():
    rng = np.random.default_rng(0)
    spec = U.parse_tree_spec("bin:h=2")
    for _ in range(20):
        oracle = make_oracle(rng)
        g = make_liftable_g(rng, oracle, spec)
        h = U.lift_map(g, oracle)
        assert U.verify_lift(g, h, oracle)


def test_lift_rejects_far_values():
    rng = np.random.default_rng(1)
    spec = U.parse_tree_spec("bin:h=2")
    oracle = make_oracle(rng)
    assign = {v: (50.0, 50.0) for v in U.vertices(spec)}
    g = U.TreeMap(spec, oracle.target_space, assign)
    with pytest.raises(EmbeddingError):
        U.lift_map(g, oracle)


def test_lift_is_deterministic():
    rng = np.random.default_rng(2)
    spec = U.parse_tree_spec("bin:h=2")
    oracle = make_oracle(rng)
    g = make_liftable_g(rng, oracle, spec)
    h1 = U.lift_map(g, oracle)
    h2 = U.lift_map(g, oracle)
    for v in U.vertices(spec):
        assert h1.point(v) == h2.point(v)


def test_verify_lift_detects_bad_lift():
    rng = np.random.default_rng(3)
    spec = U.parse_tree_spec("bin:h=2")
    oracle = make_oracle(rng)
    g = make_liftable_g(rng, oracle, spec)
    h = U.lift_map(g, oracle)
    # clobber one vertex with the domain point farthest from its g value
    far = max(range(len(oracle.domain)),
              key=lambda i: oracle.target_space.distance(
                  oracle.values[i], g.point((1, 1))))
    bad_assign = dict(h.assignment)
    bad_assign[(1, 1)] = oracle.domain[far]
    bad = U.TreeMap(spec, oracle.domain_space, bad_assign)
    assert not U.verify_lift(g, bad, oracle)
