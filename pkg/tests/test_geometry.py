import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from risdepth.errors import ZeroDistance
from risdepth.geometry import (
    Direction,
    RisGeometry,
    angles_to_direction,
    direction_to_angles,
    element_positions,
    feed_distances,
    steering_matrix,
    steering_vector,
)

LAM = 5e-3


def geom(n_h, n_v, feed=(0.0, -1.0, 0.0), spacing=LAM / 2):
    return RisGeometry(n_h, n_v, spacing, LAM, feed)


def test_element_positions_2x2():
    pos = element_positions(geom(2, 2))
    d = LAM / 2
    expected = [(0, 0, 0), (d, 0, 0), (0, 0, d), (d, 0, d)]
    np.testing.assert_allclose(pos, expected, atol=0)


def test_element_positions_single():
    np.testing.assert_array_equal(element_positions(geom(1, 1)), [[0, 0, 0]])


def test_element_positions_half_wavelength_60ghz():
    g = RisGeometry(3, 1, 2.5e-3, LAM)
    np.testing.assert_allclose(element_positions(g)[:, 0], [0, 2.5e-3, 5e-3])
    assert np.all(element_positions(g)[:, 1] == 0)


def test_half_wavelength_constructor():
    g = RisGeometry.half_wavelength(4, 2, 60e9)
    assert g.spacing == pytest.approx(g.wavelength / 2)
    assert g.wavelength == pytest.approx(4.99654e-3, rel=1e-5)
    assert g.n == 8


def test_feed_distance_single_element():
    np.testing.assert_allclose(feed_distances(geom(1, 1, (0, -1, 0))), [1.0])


def test_feed_distance_hand_arithmetic():
    d = feed_distances(RisGeometry(2, 1, 2.5e-3, LAM, (0, -0.3, 0)))
    assert d[0] == pytest.approx(0.3)
    assert d[1] == pytest.approx(np.sqrt(0.09 + 2.5e-3**2))
    assert d[1] == pytest.approx(0.300010, abs=1e-6)


def test_feed_distance_symmetric_feed():
    g = geom(4, 4)
    centre = element_positions(g).mean(axis=0)
    g = geom(4, 4, feed=tuple(centre + [0, -0.5, 0]))
    d = feed_distances(g).reshape(4, 4)
    np.testing.assert_allclose(d, d[::-1, ::-1], rtol=1e-14)
    np.testing.assert_allclose(d, d.T, rtol=1e-14)


def test_feed_on_element_raises():
    with pytest.raises(ZeroDistance):
        feed_distances(geom(2, 2, feed=(LAM / 2, 0, 0)))


def test_feed_distances_translation_invariant(rng):
    g = geom(3, 4, feed=(0.02, -0.4, 0.01))
    shift = rng.normal(size=3)
    pos = element_positions(g) + shift
    feed = np.asarray(g.feed_position) + shift
    np.testing.assert_allclose(np.linalg.norm(pos - feed, axis=1), feed_distances(g), rtol=1e-12)


def test_steering_boresight_all_ones():
    v = steering_vector(geom(4, 3), Direction(np.pi / 2, np.pi / 2))
    np.testing.assert_allclose(v, np.ones(12), atol=1e-15)


def test_steering_endfire_half_wavelength():
    v = steering_vector(geom(2, 1), Direction(0.0, np.pi / 2))
    np.testing.assert_allclose(v, [1, np.exp(1j * np.pi)], atol=1e-12)


def test_steering_kronecker_order():
    g = geom(3, 2)
    d = Direction(0.4, 1.1)
    v = steering_vector(g, d)
    kd = 2 * np.pi / LAM * g.spacing
    vx = np.exp(1j * kd * np.arange(3) * np.cos(0.4) * np.sin(1.1))
    vz = np.exp(1j * kd * np.arange(2) * np.cos(1.1))
    for iz in range(2):
        for ix in range(3):
            assert v[iz * 3 + ix] == pytest.approx(vz[iz] * vx[ix], abs=1e-12)


def test_steering_matches_element_positions(rng):
    g = geom(5, 4)
    az, ze = rng.uniform(-np.pi, np.pi), rng.uniform(0, np.pi)
    u = angles_to_direction(Direction(az, ze))
    expected = np.exp(1j * 2 * np.pi / LAM * element_positions(g) @ u)
    np.testing.assert_allclose(steering_vector(g, Direction(az, ze)), expected, atol=1e-12)


def test_steering_matrix_rows(rng):
    g = geom(4, 5)
    az = rng.uniform(-np.pi, np.pi, 7)
    ze = rng.uniform(0, np.pi, 7)
    mat = steering_matrix(g, az, ze)
    for k in range(7):
        np.testing.assert_allclose(mat[k], steering_vector(g, Direction(az[k], ze[k])), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(-np.pi, np.pi, exclude_min=True), st.floats(0, np.pi))
def test_steering_unit_modulus_and_reference(az, ze):
    v = steering_vector(geom(6, 5), Direction(az, ze))
    np.testing.assert_allclose(np.abs(v), 1.0, atol=1e-15)
    assert v[0] == 1


def test_direction_examples():
    d = direction_to_angles((0, 1, 0))
    assert (d.azimuth, d.zenith) == pytest.approx((np.pi / 2, np.pi / 2))
    d = direction_to_angles((1, 0, 0))
    assert (d.azimuth, d.zenith) == pytest.approx((0.0, np.pi / 2))
    d = direction_to_angles((0, 0, 1))
    assert d.zenith == 0.0 and d.azimuth == 0.0


def test_direction_round_trip_random(rng):
    u = rng.normal(size=(1000, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    u = u[np.abs(u[:, 2]) < 0.999]
    for vec in u:
        back = angles_to_direction(direction_to_angles(vec))
        np.testing.assert_allclose(back, vec, atol=1e-10)


def test_direction_rejects_bad_angles():
    with pytest.raises(ValueError):
        Direction(0.0, -0.1)
    with pytest.raises(ValueError):
        Direction(-np.pi, 1.0)


def test_geometry_validation():
    with pytest.raises(ValueError):
        RisGeometry(0, 2, 1e-3, LAM)
    with pytest.raises(ValueError):
        RisGeometry(2, 2, 0.0, LAM)
