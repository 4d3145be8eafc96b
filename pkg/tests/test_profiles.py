"""Profile kinds, validation, and moving-frame evaluation."""

import numpy as np
import pytest

from fowler.grid import RealField, make_grid
from fowler.profiles import WaveProfile


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        WaveProfile(kind="square-wave")


def test_sampled_requires_samples():
    with pytest.raises(ValueError, match="samples"):
        WaveProfile(kind="sampled")


def test_nonpositive_width_rejected():
    with pytest.raises(ValueError, match="width"):
        WaveProfile(kind="tanh-front", width=0.0)


def test_constant_evaluation():
    g = make_grid(64, 10.0)
    p = WaveProfile(kind="constant", amplitude=1.5, speed=3.0)
    for t in (0.0, 0.7):
        assert np.allclose(p.evaluate(t, g).values, 1.5)


def test_moving_front_translates():
    g = make_grid(256, 40.0)
    p = WaveProfile(kind="tanh-front", amplitude=1.0, width=1.0, speed=2.0)
    t = 1.25
    values = p.evaluate(t, g).values
    # interior matches the unwrapped translate; the far side wraps around
    interior = g.points > -17.0
    assert np.allclose(values[interior], np.tanh(g.points[interior] - 2.5), atol=1e-12)
    wrapped = g.points < -17.5
    assert np.all(values[wrapped] > 0.9)


def test_moving_profile_wraps_periodically():
    g = make_grid(256, 40.0)
    p = WaveProfile(kind="gaussian-bump", amplitude=1.0, width=1.0, speed=1.0)
    full_period = p.evaluate(g.length / p.speed, g)
    assert np.allclose(full_period.values, p.evaluate(0.0, g).values, atol=1e-12)


def test_sampled_profile_shift_matches_roll():
    g = make_grid(128, 16.0)
    rng = np.random.default_rng(2)
    base = rng.standard_normal(128)
    p = WaveProfile(kind="sampled", samples=RealField(g, base), speed=1.0)
    # moving by exactly 8 cells
    t = 8 * g.spacing / p.speed
    shifted = p.evaluate(t, g)
    assert np.allclose(shifted.values, np.roll(base, 8), atol=1e-10)


def test_sup_values_orders():
    g = make_grid(512, 40.0)
    p = WaveProfile(kind="tanh-front", amplitude=2.0, width=0.5)
    s0, s1, s2 = p.sup_values(g)
    assert s0 == pytest.approx(2.0, rel=1e-9)
    assert s1 == pytest.approx(4.0, rel=1e-6)
    assert s2 > 0
