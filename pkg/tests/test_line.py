import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bslab.line import (
    FlowBuilt,
    FlowSpec,
    LineAction,
    domain_index,
    line_map_from_json,
    make_affine_line_action,
    make_flow_line_action,
    make_trivial_line_action,
    verify_dagger,
)

lams = st.sampled_from([1.2, 1.5, 2.0, 3.0])


@pytest.fixture
def flow15():
    return make_flow_line_action(FlowSpec(1.5), 2)


def test_flow_time_zero_is_identity():
    spec = FlowSpec(2.0)
    xs = np.linspace(1, 2, 101)
    assert np.array_equal(spec.flow(0.0, xs), xs)


@pytest.mark.parametrize("t", [-1e300, -3.0, 0.5, 7.0, 2.0**40, math.inf])
def test_flow_fixes_endpoints(t):
    spec = FlowSpec(1.5)
    assert spec.flow(t, 1.0) == 1.0
    assert spec.flow(t, 1.5) == 1.5


def test_flow_group_law_example():
    spec = FlowSpec(2.0)
    xs = np.linspace(1, 2, 1001)
    twice = spec.flow(1.0, spec.flow(1.0, xs))
    assert np.max(np.abs(twice - spec.flow(2.0, xs))) < 1e-12


@given(lams, st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 1))
def test_flow_group_law(lam, s, t, frac):
    spec = FlowSpec(lam)
    x = 1 + frac * (lam - 1)
    # composition can differ by the conditioning of the time-s map
    lhs = spec.flow(s, spec.flow(t, x))
    rhs = spec.flow(s + t, x)
    assert abs(lhs - rhs) < 1e-9


def test_flow_rejects_outside_domain():
    with pytest.raises(ValueError):
        FlowSpec(1.5).flow(1.0, 1.6)
    with pytest.raises(ValueError):
        FlowSpec(1.5).flow(1.0, [1.2, 0.9])


def test_flowspec_validation():
    with pytest.raises(ValueError):
        FlowSpec(1.0)
    with pytest.raises(ValueError):
        FlowSpec(2.0, chart="spline")


def test_chart_is_increasing_bijection():
    spec = FlowSpec(1.5)
    xs = np.linspace(1, 1.5, 2001)[1:-1]
    u = spec.psi(xs)
    assert np.all(np.diff(u) > 0)
    assert np.max(np.abs(spec.psi_inv(u) - xs)) < 1e-14


def test_flow_speed_bound_is_max_inverse_chart_derivative():
    # K = sup d/du psi^-1(u), attained at u = 0; compare a centred difference
    spec = FlowSpec(2.0)
    h = 1e-6
    slope = (spec.psi_inv(h) - spec.psi_inv(-h)) / (2 * h)
    assert slope == pytest.approx(spec.K, rel=1e-9)
    assert spec.K == pytest.approx(1 / math.pi)


def test_dagger_bound_lambda_two():
    spec = FlowSpec(2.0)
    worst = verify_dagger(spec, 1024)
    assert worst <= spec.K + 1e-9
    assert worst == pytest.approx(0.3183, abs=1e-4)


def test_dagger_needs_positive_n():
    with pytest.raises(ValueError):
        verify_dagger(FlowSpec(2.0), 0)


def test_domain_index():
    lam = 1.5
    ks = np.arange(-30, 31)
    xs = lam ** ks.astype(float)
    assert np.array_equal(domain_index(xs, lam), ks)
    assert np.array_equal(domain_index(xs * 1.2, lam), ks)
    assert domain_index(1.2, 1.5) == 0


def test_domain_boundaries_fixed(flow15):
    xs = 1.5 ** np.arange(-20, 21, dtype=float)
    assert np.max(np.abs(flow15.b_image(xs) - xs) / xs) < 1e-15


def test_domain_zero_uses_flow_directly(flow15):
    assert flow15.b_image(1.2) == FlowSpec(1.5).flow(1.0, 1.2)


def test_domain_one_example(flow15):
    expected = 1.5 * FlowSpec(1.5).flow(0.5, 2.0 / 1.5)
    assert abs(flow15.b_image(2.0) - expected) < 1e-12


def test_nonpositive_half_line_fixed(flow15):
    xs = np.array([-1e6, -3.0, -1e-9, 0.0])
    assert np.array_equal(flow15.b_image(xs), xs)


def test_flow_action_requires_regime():
    with pytest.raises(ValueError):
        make_flow_line_action(FlowSpec(2.5), 2)


def test_affine_examples():
    act = make_affine_line_action(2)
    assert act.lam * act.b_image(0.0 / act.lam) == 2.0 == act.b_image(act.b_image(0.0))
    act3 = make_affine_line_action(3)
    assert 3 * act3.b_image(5 / 3) == pytest.approx(8.0)
    xs = np.linspace(-100, 100, 1001)
    assert np.all(act.b_image(xs) - xs == 1.0)


def test_flow_relation_spanning_domains():
    act = make_flow_line_action(FlowSpec(1.5), 2)
    xs = np.geomspace(1.5**-20, 1.5**21, 1000)
    assert act.relation_residual(np.concatenate([xs, -xs])) < 1e-9


@pytest.mark.parametrize("lam, n", [(1.2, 2), (2.0, 2), (2.0, 3), (3.0, 3)])
def test_flow_relation_relative(lam, n):
    # D_20 reaches lam^21 ~ 1e10 for lam = 3, so the residual is taken relative to |x|
    act = make_flow_line_action(FlowSpec(lam), n)
    xs = np.geomspace(lam**-20, lam**21, 1000)
    worst = max(act.relation_residual([x]) / max(1.0, x) for x in xs)
    assert worst < 1e-12


def test_affine_relation():
    xs = np.linspace(-1000, 1000, 1001)
    # halving is exact in binary, so n = 2 has no rounding at all
    assert make_affine_line_action(2).relation_residual(xs) == 0.0
    assert make_affine_line_action(3).relation_residual(xs) < 1e-12 * 1000


def test_deep_domains_finite_monotone_and_bounded(flow15):
    b = flow15.b_image
    xs = np.geomspace(1.5**-40, 1.5**41, 20001)
    ys = b(xs)
    assert np.all(np.isfinite(ys))
    assert np.all(np.diff(ys) >= 0)
    assert np.max(np.abs(ys - xs)) <= b.displacement_bound() + 1e-12


def test_saturation_beyond_float_range(flow15):
    # D_-1100 needs flow time 2^1100, which overflows; points go to the domain's upper end
    k = -1100
    x = 1.5**k * np.array([1.0, 1.1, 1.3, 1.49])
    y = flow15.b_image(x)
    assert np.all(np.isfinite(y))
    assert y[0] == x[0]
    assert np.allclose(y[1:], 1.5 ** (k + 1), rtol=1e-12)
    assert np.all(np.diff(y) >= 0)


def test_inverse_round_trip(flow15):
    # deep negative domains compress most of D_k against its upper end (derivative
    # ~ n^(-2|k|)), so the round trip is only well conditioned from D_-3 upwards
    b = flow15.b_image
    xs = np.concatenate([np.geomspace(0.3, 1e6, 500), -np.geomspace(1e-3, 1e6, 50)])
    assert np.max(np.abs(b.inverse()(b(xs)) - xs)) < 1e-9


@settings(max_examples=200)
@given(lams, st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_b_increasing(lam, x1, x2):
    b = FlowBuilt(FlowSpec(lam), 3 if lam > 2 else 2)
    lo, hi = sorted((x1, x2))
    assert b(lo) <= b(hi)


def test_rigorous_displacement_bound_covers_negative_domains():
    b = FlowBuilt(FlowSpec(1.5), 2)
    # D_-1 reaches (lam-1)/(2 lam) = 1/6, above the flow speed K
    assert b.displacement_bound() >= 1 / 6
    assert FlowSpec(1.5).K < 1 / 6


def test_json_round_trip(flow15):
    for act in (flow15, make_affine_line_action(3), make_trivial_line_action(2, 0.5)):
        again = LineAction.from_json(act.to_json())
        assert again == act
    with pytest.raises(ValueError):
        line_map_from_json({"kind": "spline"})
    assert flow15.faithful and not make_trivial_line_action(2, 0.5).faithful
