import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from risdepth.codebook import build_grid
from risdepth.errors import EmptyScene, ParseError, ValidationError
from risdepth.geometry import Direction
from risdepth.scene import (
    PATH_CSV_COLUMNS,
    PropagationPath,
    Scene,
    Target,
    ground_truth_depth,
    load_paths,
    pixel_of,
    save_paths,
    synthesize_paths,
)

HEADER = ",".join(PATH_CSV_COLUMNS) + "\n"


def test_boresight_target_path():
    (p,) = synthesize_paths(Scene([Target((0, 4, 0), rcs=2.0, id=9)]))
    assert p.target_id == 9
    assert p.fwd_dist == p.bwd_dist == 4.0
    assert p.depart == p.arrive
    assert p.depart.azimuth == pytest.approx(np.pi / 2)
    assert p.depart.zenith == pytest.approx(np.pi / 2)
    assert p.fwd_loss == p.bwd_loss == 1.0
    assert p.rcs == 2.0
    assert p.total_distance(1.0) == 10.0


def test_three_four_five_target():
    (p,) = synthesize_paths(Scene([Target((3, 4, 0))]))
    assert p.fwd_dist == pytest.approx(5.0)
    assert np.rad2deg(p.depart.azimuth) == pytest.approx(53.130102, abs=1e-6)


def test_two_targets_two_paths():
    paths = synthesize_paths(Scene([Target((0, 2, 0), id=1), Target((1, 3, 1), id=2)]))
    assert [p.target_id for p in paths] == [1, 2]


def test_injected_paths_appended_unmodified():
    extra = PropagationPath(5, 3, Direction(1.0, 1.2), Direction(1.4, 1.5), 3.0, 4.5, 2.0, 3.0, 0.5)
    paths = synthesize_paths(Scene([Target((0, 2, 0))], [extra]))
    assert paths[-1] is extra


def test_empty_scene_raises():
    with pytest.raises(EmptyScene):
        synthesize_paths(Scene())


def test_target_validation():
    with pytest.raises(ValueError):
        Target((0, -1, 0))
    with pytest.raises(ValueError):
        Target((0, 1, 0), rcs=0)
    with pytest.raises(ValueError):
        Scene([Target((0, 1, 0), id=1), Target((0, 2, 0), id=1)])


def test_single_bounce_invariant_random(rng):
    pos = rng.uniform([-5, 0.5, -5], [5, 10, 5], size=(50, 3))
    paths = synthesize_paths(Scene([Target(p, id=i) for i, p in enumerate(pos)]))
    for p, xyz in zip(paths, pos):
        assert p.is_single_bounce
        assert abs(p.fwd_dist - np.linalg.norm(xyz)) < 1e-12
        np.testing.assert_allclose(p.depart.unit_vector() * p.fwd_dist, xyz, atol=1e-12)


def test_load_header_only(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER)
    assert load_paths(f) == []


def test_load_single_row(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER + "1,0,90,90,90,90,5,5,0,0,1\n")
    (p,) = load_paths(f)
    assert p.is_single_bounce
    assert p.fwd_dist == 5 and p.rcs == 1 and p.fwd_loss == 1.0
    assert p.depart.azimuth == pytest.approx(np.pi / 2)


def test_load_converts_loss_db(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER + "1,0,90,90,80,95,5,6,3,10,1\n")
    (p,) = load_paths(f)
    assert p.fwd_loss == pytest.approx(10 ** 0.3)
    assert p.bwd_loss == pytest.approx(10.0)


def test_load_negative_distance(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER + "1,0,90,90,90,90,-1,5,0,0,1\n")
    with pytest.raises(ValidationError) as exc:
        load_paths(f)
    assert exc.value.row == 1


def test_load_parse_error_row_number(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER + "1,0,90,90,90,90,5,5,0,0,1\n2,0,abc,90,90,90,5,5,0,0,1\n")
    with pytest.raises(ParseError) as exc:
        load_paths(f)
    assert exc.value.row == 2


def test_load_bad_header(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("a,b,c\n")
    with pytest.raises(ParseError):
        load_paths(f)


def test_load_preserves_order(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text(HEADER + "".join(f"{i},0,90,90,90,90,{i + 1},{i + 1},0,0,1\n" for i in range(5)))
    assert [p.target_id for p in load_paths(f)] == list(range(5))


angle_az = st.floats(-179.0, 180.0)
angle_ze = st.floats(0.0, 180.0)
pos = st.floats(0.01, 100.0)


@st.composite
def paths_strategy(draw):
    n = draw(st.integers(0, 6))
    out = []
    for i in range(n):
        out.append(
            PropagationPath(
                draw(st.integers(0, 99)), i,
                Direction.from_degrees(draw(angle_az), draw(angle_ze)),
                Direction.from_degrees(draw(angle_az), draw(angle_ze)),
                draw(pos), draw(pos),
                10 ** (draw(st.floats(0, 30)) / 10), 10 ** (draw(st.floats(0, 30)) / 10),
                draw(pos),
            )
        )
    return out


@settings(max_examples=40, deadline=None)
@given(paths_strategy())
def test_save_load_round_trip(tmp_path_factory, paths):
    f = tmp_path_factory.mktemp("rt") / "paths.csv"
    save_paths(paths, f)
    back = load_paths(f)
    assert len(back) == len(paths)
    for a, b in zip(paths, back):
        assert (a.target_id, a.path_id) == (b.target_id, b.path_id)
        for attr in ("fwd_dist", "bwd_dist", "fwd_loss", "bwd_loss", "rcs"):
            assert getattr(b, attr) == pytest.approx(getattr(a, attr), rel=1e-12)
        for d_a, d_b in ((a.depart, b.depart), (a.arrive, b.arrive)):
            np.testing.assert_allclose(d_b.unit_vector(), d_a.unit_vector(), atol=1e-12)


@pytest.fixture
def grid9():
    return build_grid(np.deg2rad(60), 1.0, 9, 9)


def test_ground_truth_single_boresight(grid9):
    dm = ground_truth_depth(Scene([Target((0, 4, 0))]), grid9, background=19.0)
    assert dm.values[4, 4] == 4.0
    mask = np.ones((9, 9), bool)
    mask[4, 4] = False
    assert np.all(dm.values[mask] == 19.0)


def test_ground_truth_smallest_depth(grid9):
    scene = Scene([Target((0, 3, 0), id=1), Target((0, 5, 0), id=2)])
    assert ground_truth_depth(scene, grid9, 19.0).values[4, 4] == 3.0


def test_ground_truth_boundary_goes_to_lower_index():
    grid = build_grid(np.deg2rad(60), 1.0, 4, 4)
    step = 2 * np.tan(np.deg2rad(30)) / 3
    # midpoint between columns 1 and 2 is x/y = 0, between rows 1 and 2 is z/y = 0
    assert pixel_of(grid, (0.0, 2.0, 0.0)) == (1, 1)
    # explicit boundary between columns 0 and 1
    x_b = (-np.tan(np.deg2rad(30)) + 0.5 * step) * 3.0
    assert pixel_of(grid, (x_b, 3.0, 0.0))[1] == 0
    assert pixel_of(grid, (x_b + 1e-6, 3.0, 0.0))[1] == 1


def test_ground_truth_rows_top_down(grid9):
    row_up, _ = pixel_of(grid9, (0, 2, 0.9))
    row_down, _ = pixel_of(grid9, (0, 2, -0.9))
    assert row_up < 4 < row_down


def test_ground_truth_outside_fov_ignored(grid9):
    dm = ground_truth_depth(Scene([Target((10, 1, 0))]), grid9, 19.0)
    assert np.all(dm.values == 19.0)


def test_ground_truth_monotone(rng, grid9):
    targets = [Target(p, id=i) for i, p in enumerate(rng.uniform([-2, 1, -2], [2, 8, 2], (12, 3)))]
    prev = ground_truth_depth(Scene(targets[:1]), grid9, 19.0).values
    for k in range(2, len(targets) + 1):
        cur = ground_truth_depth(Scene(targets[:k]), grid9, 19.0).values
        assert np.all(cur <= prev)
        prev = cur
