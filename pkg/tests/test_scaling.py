import math
import random

import pytest

from kpzlab.scaling import LatticePoint, ScalingFrame, SnappedPoint, affine_map, snap


def test_lattice_point_parity_enforced():
    LatticePoint(3, 1)
    with pytest.raises(ValueError):
        LatticePoint(3, 2)
    with pytest.raises(ValueError):
        LatticePoint(-1, 1)


def test_frame_validation():
    with pytest.raises(ValueError):
        ScalingFrame(0.0, 0.5)
    with pytest.raises(ValueError):
        ScalingFrame(0.1, 1.0)
    with pytest.raises(ValueError):
        ScalingFrame(0.1, 0.0)


def test_affine_map_examples():
    f = ScalingFrame(0.1, 0.5)
    assert affine_map(f, LatticePoint(0, 0)) == (0.0, 0.0)
    t, x = affine_map(f, LatticePoint(100, 60))
    assert abs(t - 1.0) < 1e-14 and abs(x - 1.0) < 1e-14
    t, x = affine_map(f, LatticePoint(100, 50))
    assert abs(t - 1.0) < 1e-14 and abs(x - 0.0) < 1e-14


def test_snap_examples():
    f = ScalingFrame(0.1, 0.5)
    sp = snap(f, 1.0, 0.0)
    assert sp.point == LatticePoint(100, 50)
    with pytest.raises(ValueError):
        snap(f, -0.1, 0.0)


def test_snap_fixed_point_of_lattice_images():
    rnd = random.Random(7)
    for _ in range(500):
        eps = rnd.choice([0.5, 0.2, 0.1, 0.05, 0.02])
        v = rnd.uniform(0.05, 0.95)
        f = ScalingFrame(eps, v)
        i = rnd.randrange(0, 500)
        j = rnd.randrange(-i, i + 1) if i else 0
        if (i + j) % 2:
            j += -1 if j > -i else 1
        p = LatticePoint(i, j)
        t, x = affine_map(f, p)
        assert snap(f, t, x).point == p


def test_snap_idempotent():
    rnd = random.Random(3)
    for _ in range(300):
        f = ScalingFrame(rnd.choice([0.3, 0.1, 0.04]), rnd.uniform(0.1, 0.9))
        sp = snap(f, rnd.uniform(0.0, 5.0), rnd.uniform(-4.0, 4.0))
        again = snap(f, sp.t_eps, sp.x_eps)
        assert again.point == sp.point


def test_interior_points_of_one_cell_snap_together():
    # two interior points of the same parallelogram cell must agree
    rnd = random.Random(11)
    for _ in range(800):
        eps = rnd.choice([0.5, 0.1, 0.03])
        v = rnd.uniform(0.05, 0.95)
        f = ScalingFrame(eps, v)
        i = rnd.randrange(0, 60)
        j = rnd.randrange(-i, i + 1) if i else 0
        if (i + j) % 2:
            j -= 1 if j > -i else -1
        pts = []
        for _ in range(2):
            T = i + rnd.uniform(0.02, 0.98)
            X = j + rnd.uniform(0.04, 1.96)
            pts.append(snap(f, T * eps * eps, (X - v * T) * eps).point)
        assert pts[0] == pts[1] == LatticePoint(i, j)


def test_snap_is_total_and_single_valued_on_random_grid():
    rnd = random.Random(5)
    f = ScalingFrame(0.07, 0.4)
    for _ in range(400):
        t = rnd.uniform(0.0, 3.0)
        x = rnd.uniform(-3.0, 3.0)
        sp = snap(f, t, x)
        assert isinstance(sp, SnappedPoint)
        # the reported cell actually contains the point
        T = t / f.epsilon**2
        X = x / f.epsilon + f.v * T
        assert sp.point.i <= T < sp.point.i + 1 or math.isclose(T, sp.point.i)
        assert sp.point.j <= X < sp.point.j + 2 or math.isclose(X, sp.point.j)


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.01])
def test_cell_area(eps):
    f = ScalingFrame(eps, 0.3)
    o = affine_map(f, LatticePoint(2, 0))
    u = affine_map(f, LatticePoint(3, 1))
    w = affine_map(f, LatticePoint(2, 2))
    ux, uy = u[0] - o[0], u[1] - o[1]
    wx, wy = w[0] - o[0], w[1] - o[1]
    area = abs(ux * wy - uy * wx)
    assert abs(area - 2.0 * eps**3) <= 1e-14
