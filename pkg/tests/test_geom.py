import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pediloop.geom import OrientedRect2, Quat, Rect2, Transform, Vec3, quat_slerp, wrap_angle


def test_quat_yaw_roundtrip():
    for yaw in (-3.0, -1.2, 0.0, 0.4, 2.9):
        assert Quat.from_yaw(yaw).yaw() == pytest.approx(yaw, abs=1e-12)


def test_quat_rotate_basis():
    q = Quat.from_yaw(math.pi / 2.0)
    v = q.rotate(Vec3(1.0, 0.0, 0.0))
    assert (v.x, v.y, v.z) == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)


def test_quat_norm_invariant():
    with pytest.raises(ValueError):
        Quat(1.0, 1.0, 0.0, 0.0)


def test_transform_compose_matches_sequential_apply():
    a = Transform(Vec3(1.0, 2.0, 0.0), Quat.from_yaw(0.7))
    b = Transform(Vec3(0.5, -1.0, 0.2), Quat.from_yaw(-0.3))
    p = Vec3(0.3, 0.4, 0.5)
    via_compose = a.compose(b).apply(p)
    sequential = a.apply(b.apply(p))
    assert (via_compose - sequential).norm() < 1e-12


def test_slerp_midpoint_bisects():
    a = Quat.identity()
    b = Quat.from_yaw(math.pi / 2.0)
    mid = quat_slerp(a, b, 0.5)
    assert mid.yaw() == pytest.approx(math.pi / 4.0, abs=1e-12)


def test_slerp_endpoints_exact():
    a = Quat.from_yaw(0.3)
    b = Quat.from_yaw(1.1)
    assert quat_slerp(a, b, 0.0).yaw() == pytest.approx(0.3, abs=1e-12)
    assert quat_slerp(a, b, 1.0).yaw() == pytest.approx(1.1, abs=1e-12)


def test_rect_requires_positive_area():
    with pytest.raises(ValueError):
        Rect2(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        OrientedRect2(0.0, 0.0, 0.0, 1.0, -2.0)


@given(
    x=st.floats(-50, 50),
    y=st.floats(-50, 50),
    yaw=st.floats(-math.pi, math.pi),
)
def test_oriented_rect_clamp_is_projection(x, y, yaw):
    rect = OrientedRect2(3.0, -2.0, yaw, 8.0, 5.0)
    cx, cy = rect.clamp(x, y)
    u, v = rect.to_local(cx, cy)
    assert -1e-9 <= u <= rect.width + 1e-9
    assert -1e-9 <= v <= rect.height + 1e-9
    if rect.contains(x, y):
        assert (cx, cy) == pytest.approx((x, y), abs=1e-9)
    else:
        # the projection is the nearest rectangle point: check against a grid
        best = min(
            math.hypot(rect.to_world(u, v)[0] - x, rect.to_world(u, v)[1] - y)
            for u in [i / 40 * 8.0 for i in range(41)]
            for v in [j / 40 * 5.0 for j in range(41)]
        )
        assert math.hypot(cx - x, cy - y) <= best + 1e-6


def test_wrap_angle():
    assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi, abs=1e-12)
    assert wrap_angle(-3.0 * math.pi) == pytest.approx(math.pi, abs=1e-12)
    assert wrap_angle(0.1) == pytest.approx(0.1)
