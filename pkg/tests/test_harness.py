"""Benchmark harness: synthetic streams, offline comparators, regret reports,
and the closed-form bound calculators (frozen against an independent
transcription of every constant)."""
import math

import numpy as np
import pytest

import adaregret as ar
from tests.conftest import make_absolute_stream


# ---------------------------------------------------------------------------
# Stream generation


def test_stream_reproducibility(ball2):
    cfg = dict(
        horizon=24,
        dimension=2,
        domain=ball2,
        gradient_bound=1.0,
        segments=[
            ar.SegmentSpec(12, "absolute", params={"target": [0.3, 0.0], "noise": 0.2}),
            ar.SegmentSpec(12, "quadratic", "strongly-convex", 0.2,
                           params={"target": [0.1, -0.1], "noise": 0.1, "b_scale": 0.2}),
        ],
    )
    a = ar.generate_stream(ar.StreamConfig(**cfg, seed=7))
    b = ar.generate_stream(ar.StreamConfig(**cfg, seed=7))
    c = ar.generate_stream(ar.StreamConfig(**cfg, seed=8))
    assert ar.stream_rows(a) == ar.stream_rows(b)
    assert ar.stream_rows(a) != ar.stream_rows(c)
    assert len(a) == 24 and all(isinstance(e, ar.LossSpec) for e in a)


def test_stream_segment_sum_must_match_horizon(ball2):
    with pytest.raises(ar.InputError):
        ar.StreamConfig(
            horizon=10,
            dimension=2,
            domain=ball2,
            gradient_bound=1.0,
            segments=[ar.SegmentSpec(4), ar.SegmentSpec(4)],
        )


def test_stream_gradient_guards(ball2, box1):
    # feature scale above G makes the absolute loss violate the bound
    bad = ar.StreamConfig(
        horizon=4,
        dimension=1,
        domain=box1,
        gradient_bound=1.0,
        segments=[ar.SegmentSpec(4, "absolute", params={"scale": 2.0})],
    )
    with pytest.raises(ar.InputError):
        ar.generate_stream(bad)
    # linear direction above G
    bad2 = ar.StreamConfig(
        horizon=4,
        dimension=2,
        domain=ball2,
        gradient_bound=0.5,
        segments=[ar.SegmentSpec(4, "linear", params={"direction": [1.0, 0.0]})],
    )
    with pytest.raises(ar.InputError):
        ar.generate_stream(bad2)
    # quadratic curvature + linear term exceeding G on the domain
    bad3 = ar.StreamConfig(
        horizon=4,
        dimension=2,
        domain=ball2,
        gradient_bound=0.5,
        segments=[
            ar.SegmentSpec(4, "quadratic", "strongly-convex", 1.0,
                           params={"b_scale": 0.4})
        ],
    )
    with pytest.raises(ar.InputError):
        ar.generate_stream(bad3)


def test_cumulative_losses_include_regularizer(box1):
    events = [ar.LossSpec("linear", {"g": np.array([1.0])}) for _ in range(3)]
    pts = [np.array([0.5])] * 3
    reg = ar.Regularizer("l1", 0.2)
    prefix = ar.cumulative_losses(events, pts, reg)
    # each round: f = 0.5, r = 0.2*0.5 = 0.1
    assert np.allclose(prefix, [0.0, 0.6, 1.2, 1.8])
    with pytest.raises(ar.InputError):
        ar.cumulative_losses(events, pts[:2], reg)


# ---------------------------------------------------------------------------
# Offline comparators


def test_comparator_pure_linear_ball(ball2):
    # [TRIVIAL] constant gradient (1,0) over 10 rounds: w* = -(1,0), value -10
    events = [ar.LossSpec("linear", {"g": np.array([1.0, 0.0])}) for _ in range(10)]
    w, val = ar.offline_comparator(events, 1, 10, ball2)
    assert np.allclose(w, [-1.0, 0.0], atol=1e-12)
    assert val == pytest.approx(-10.0, abs=1e-12)


def test_comparator_quadratic_closed_form(ball2, rng):
    # [DERIVED] sum of 0.5*lam||w-u_t||^2 + <b_t, w> is minimized at
    # mean(u) - mean(b)/lam when that point is feasible.
    lam = 2.0
    us = rng.uniform(-0.2, 0.2, size=(6, 2))
    bs = rng.uniform(-0.1, 0.1, size=(6, 2))
    events = [
        ar.LossSpec("quadratic", {"lam": lam, "u": u, "b": b},
                    "strongly-convex", lam)
        for u, b in zip(us, bs)
    ]
    w, val = ar.offline_comparator(events, 1, 6, ball2)
    want = us.mean(axis=0) - bs.mean(axis=0) / lam
    assert np.allclose(w, want, atol=1e-10)
    direct = sum(ev.value(want) for ev in events)
    assert val == pytest.approx(direct, rel=1e-12)


def test_comparator_scalar_matches_grid(box1, rng):
    events = make_absolute_stream(15, box1, noise=0.5, seed=11)
    w, val = ar.offline_comparator(events, 3, 12, box1)
    zs = np.linspace(-1, 1, 200001)
    vals = np.zeros_like(zs)
    for ev in events[2:12]:
        vals += np.abs(ev.params["x"][0] * zs - ev.params["y"])
    assert val <= vals.min() + 1e-9
    assert val == pytest.approx(float(vals.min()), abs=1e-4)


def test_comparator_2d_matches_dense_grid(rng):
    dom = ar.Domain.box(np.array([-0.5, -0.5]), np.array([0.5, 0.5]))
    events = []
    for _ in range(8):
        x = rng.uniform(-0.6, 0.6, size=2)
        y = float(rng.uniform(-0.4, 0.4))
        events.append(
            ar.LossSpec("squared-prediction", {"x": x, "y": y}, "exp-concave", 0.5)
        )
    w, val = ar.offline_comparator(events, 1, 8, dom)
    grid = np.linspace(-0.5, 0.5, 161)
    best = math.inf
    for z1 in grid:
        for z2 in grid:
            z = np.array([z1, z2])
            best = min(best, sum(ev.value(z) for ev in events))
    assert val <= best + 1e-9
    assert val == pytest.approx(best, abs=2e-3)


def test_comparator_l1_composite_scalar(box1):
    events = make_absolute_stream(12, box1, noise=0.4, seed=3)
    reg = ar.Regularizer("l1", 0.3)
    w, val = ar.offline_comparator(events, 1, 12, box1, reg=reg)
    zs = np.linspace(-1, 1, 200001)
    vals = 12 * 0.3 * np.abs(zs)
    for ev in events:
        vals += np.abs(ev.params["x"][0] * zs - ev.params["y"])
    assert val <= vals.min() + 1e-9
    assert val == pytest.approx(float(vals.min()), abs=1e-4)


def test_dominance_check(box1):
    events = make_absolute_stream(8, box1, noise=0.3, seed=5)
    _, val = ar.offline_comparator(events, 1, 8, box1)
    # the true optimum dominates every probe
    low = ar.comparator_dominance_check(events, 1, 8, box1, val, seed=0)
    assert low >= val - 1e-12
    # an inflated "comparator value" is beaten by some probe
    with pytest.raises(ar.InvariantViolation) as exc:
        ar.comparator_dominance_check(events, 1, 8, box1, val + 0.5, seed=0)
    assert exc.value.name == "comparator-optimality"


def test_playing_comparator_gives_zero_regret(box1):
    events = make_absolute_stream(20, box1, noise=0.4, seed=6)
    w, _ = ar.offline_comparator(events, 1, 20, box1)
    pts = [w] * 20
    prefix = ar.cumulative_losses(events, pts)
    emp, _ = ar.interval_regret(events, prefix, 1, 20, box1, trajectory=pts)
    assert abs(emp) <= 1e-9


def test_flip_stream_interval_regret_closed_form(ball2):
    # gradient +g for 32 rounds then -g; trajectory pinned at the pre-flip
    # optimum -g/||g||. On any post-flip interval of length tau the comparator
    # earns -||g|| tau while the trajectory pays +||g|| tau: regret 2 ||g|| tau.
    g = np.array([0.8, 0.0])
    events = [ar.LossSpec("linear", {"g": g}) for _ in range(32)]
    events += [ar.LossSpec("linear", {"g": -g}) for _ in range(32)]
    pts = [np.array([-1.0, 0.0])] * 64
    prefix = ar.cumulative_losses(events, pts)
    for (p, q) in [(33, 64), (40, 47), (50, 50)]:
        tau = q - p + 1
        emp, comp = ar.interval_regret(events, prefix, p, q, ball2, trajectory=pts)
        assert comp == pytest.approx(-0.8 * tau, abs=1e-12)
        assert emp == pytest.approx(2 * 0.8 * tau, abs=1e-12)
    # the full horizon nets out to zero for both learner and comparator
    emp, comp = ar.interval_regret(events, prefix, 1, 64, ball2, trajectory=pts)
    assert comp == pytest.approx(0.0, abs=1e-12)
    assert emp == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# Regret reports


def _short_run(horizon=64, seed=2, algo="uma2-surrogate"):
    dom = ar.Domain.box(np.array([-1.0]), np.array([1.0]))
    events = make_absolute_stream(horizon, dom, noise=0.4, seed=seed)
    learner = ar.build_learner(
        ar.LearnerConfig(algorithm=algo, domain=dom, G=1.0, horizon=horizon)
    )
    recs = ar.run(learner, events)
    return dom, events, [r.w for r in recs]


def test_report_exhaustive_counts():
    dom, events, pts = _short_run(horizon=32)
    rows = ar.adaptive_regret_report(events, pts, dom, tau_list=(4, 32))
    by_tau = {}
    for row in rows:
        by_tau.setdefault(row.tau, []).append(row)
        assert row.q - row.p + 1 == row.tau
        assert math.isnan(row.bound_rhs) and math.isnan(row.ratio)
    assert len(by_tau[4]) == 32 - 4 + 1
    assert len(by_tau[32]) == 1
    assert [r.p for r in by_tau[4]] == list(range(1, 30))


def test_report_anchored_starts():
    dom, events, pts = _short_run(horizon=64)
    rows = ar.adaptive_regret_report(events, pts, dom, tau_list=(16,), mode="anchored")
    starts = [r.p for r in rows]
    # {1} plus multiples of ceil(16/4) = 4 while the window fits
    assert starts == [1] + [4 * j for j in range(1, 13)]


def test_report_tau_validation():
    dom, events, pts = _short_run(horizon=32)
    with pytest.raises(ar.InputError, match=r"evaluation\.tau 33 outside \[1, 32\]"):
        ar.adaptive_regret_report(events, pts, dom, tau_list=(33,))
    with pytest.raises(ar.InputError):
        ar.adaptive_regret_report(events, pts, dom, tau_list=(0,))
    with pytest.raises(ar.InputError):
        ar.adaptive_regret_report(events, pts, dom, tau_list=(8,), mode="sideways")


def test_report_with_bound_ratios():
    dom, events, pts = _short_run(horizon=32)
    params = {"G": 1.0, "D": dom.diameter, "d": 1, "T": 32}
    fn = ar.bound_fn_for("uma2-surrogate", "convex", params)
    rows = ar.adaptive_regret_report(events, pts, dom, tau_list=(8,), bound_fn=fn)
    for row in rows:
        assert row.bound_rhs > 0 and math.isfinite(row.bound_rhs)
        assert row.ratio == pytest.approx(row.empirical / row.bound_rhs)
        assert row.ratio <= 1.0


def test_gc_interval_regret_covers_schedule():
    dom, events, pts = _short_run(horizon=64)
    params = {"G": 1.0, "D": dom.diameter, "d": 1, "T": 64}
    fn = ar.bound_fn_for("uma2-surrogate", "convex", params)
    rows = ar.gc_interval_regret(events, pts, dom, bound_fn=fn)
    schedule = list(ar.iter_gc_intervals(64))
    assert len(rows) == len(schedule) == 121
    assert {(r.p, r.q) for r in rows} == {(iv.start, iv.end) for iv in schedule}
    for row in rows:
        assert row.empirical <= row.bound_rhs


def test_second_order_check_on_learner_run():
    dom, events, pts = _short_run(horizon=64)
    rows = ar.second_order_interval_check(events, pts, dom, G=1.0)
    assert len(rows) == 121
    for (r, s, lhs, rhs_grad, rhs_norm, slack) in rows:
        assert lhs <= rhs_grad + 1e-9
        assert lhs <= rhs_norm + 1e-9
        assert slack == pytest.approx(min(rhs_grad - lhs, rhs_norm - lhs))
        assert slack >= -1e-9


# ---------------------------------------------------------------------------
# Bound calculators — constants frozen from an independent transcription


def test_bound_constants_frozen():
    # [DERIVED] all evaluated at the interval [5, 68] with d=2, T=512
    assert ar.bound_constant_b(5, 68) == 14
    assert ar.bound_constant_c(68) == pytest.approx(157.20495634355368, rel=1e-14)
    assert ar.bound_constant_a(5, 68, 2) == pytest.approx(41.07099963075236, rel=1e-14)
    assert ar.bound_constant_ahat(5, 68) == pytest.approx(44.46012216924809, rel=1e-14)
    assert ar.bound_constant_xi(5, 68) == pytest.approx(4.68213122712422, rel=1e-14)
    assert ar.bound_constant_h(68, 512) == pytest.approx(148.48449119553058, rel=1e-14)


def test_composite_constants_frozen():
    assert ar.composite_expert_count(1) == 3
    assert ar.composite_expert_count(16) == 7
    assert ar.composite_expert_count(1024) == 13
    phi1, phi2, phi3, _ = ar.composite_phis(512)
    assert phi1 == pytest.approx(9.418849316794887, rel=1e-14)
    assert phi2 == pytest.approx(49.627307646651765, rel=1e-14)
    assert phi3 == pytest.approx(8.7837800880564, rel=1e-13)


def test_composite_expert_count_matches_construction(box1):
    from adaregret.algorithms import UMSCompCore

    reg = ar.Regularizer("l1", 0.1)
    for horizon in (1, 2, 16, 100, 1024):
        core = UMSCompCore(box1, 1.0, reg, horizon, fp_tol=1e-3)
        assert core.n_experts == ar.composite_expert_count(horizon)


# [DERIVED] independent transcription of each bound formula, evaluated at
# p=5, q=68 with G=1.5, D=1, d=2, T=512, alpha=0.5, lam=0.5.
FROZEN_BOUNDS = {
    ("T1", "convex"): 7343.924015748525,
    ("T1", "exp-concave"): 21911.385864823802,
    ("T1", "strongly-convex"): 11238.619737123157,
    ("T2", "convex"): 23381.990129836973,
    ("T2", "exp-concave"): 29592.545185528703,
    ("T2", "strongly-convex"): 25692.95314714606,
    ("T3", "convex"): 6837.065847235093,
    ("T3", "exp-concave"): 236732.5477637837,
    ("T3", "strongly-convex"): 120939.4537488895,
    ("T4", "convex"): 374.0723437763481,
    ("T4", "exp-concave"): 1954.1020211675452,
    ("T4", "strongly-convex"): 3539.21717684992,
    ("T5", "convex"): 3633.1080865471204,
    ("T5", "exp-concave"): 37269.63238014054,
    ("T5", "strongly-convex"): 46492.21813873883,
}


@pytest.mark.parametrize("key", sorted(FROZEN_BOUNDS))
def test_theorem_bounds_frozen(key):
    theorem, ftype = key
    params = {"G": 1.5, "D": 1.0, "d": 2, "T": 512, "alpha": 0.5, "lam": 0.5}
    got = ar.theorem_bound_rhs(theorem, ftype, params, 5, 68)
    assert got == pytest.approx(FROZEN_BOUNDS[key], rel=1e-12)


def test_bound_aliases_agree():
    params = {"G": 1.5, "D": 1.0, "d": 2, "T": 512, "alpha": 0.5, "lam": 0.5}
    pairs = [
        ("adaptive-grid", "T1"),
        ("adaptive-surrogate", "T2"),
        ("adaptive-universal", "T3"),
        ("static-composite", "T4"),
        ("adaptive-composite", "T5"),
    ]
    for alias, tag in pairs:
        for ftype in ("convex", "exp-concave", "strongly-convex"):
            assert ar.theorem_bound_rhs(alias, ftype, params, 5, 68) == ar.theorem_bound_rhs(
                tag, ftype, params, 5, 68
            )
    assert ar.ALGORITHM_BOUNDS == {
        "uma2-grid": "T1",
        "uma2-surrogate": "T2",
        "uma3": "T3",
        "ums-comp": "T4",
        "uma-comp": "T5",
    }


def test_theorem_bound_validation():
    params = {"G": 1.0, "D": 2.0, "d": 1, "T": 64}
    with pytest.raises(ar.InputError):
        ar.theorem_bound_rhs("T9", "convex", params, 1, 8)
    with pytest.raises(ar.InputError):
        ar.theorem_bound_rhs("T1", "concave", params, 1, 8)
    with pytest.raises(ar.InputError):
        ar.theorem_bound_rhs("T1", "exp-concave", params, 1, 8)  # no alpha
    with pytest.raises(ar.InputError):
        ar.theorem_bound_rhs("T1", "strongly-convex", params, 1, 8)  # no lam
    with pytest.raises(ar.InputError):
        ar.theorem_bound_rhs("T1", "convex", params, 9, 8)


def test_bound_fn_for_static_and_baselines():
    params = {"G": 1.0, "D": 2.0, "d": 1, "T": 64}
    fn = ar.bound_fn_for("ums-comp", "convex", params)
    assert math.isfinite(fn(1, 64))
    assert math.isnan(fn(2, 64))
    assert math.isnan(fn(1, 63))
    assert ar.bound_fn_for("baseline-ogd", "convex", params) is None
    assert ar.bound_fn_for("uma2-surrogate", "mixed", params) is None
    sliding = ar.bound_fn_for("uma3", "convex", params)
    assert sliding(3, 10) == ar.theorem_bound_rhs("T3", "convex", params, 3, 10)
