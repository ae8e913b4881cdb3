"""
Scene description, single-bounce path synthesis and path-trace CSV files.

Targets are point scatterers. Each one yields a single-bounce path whose
departure and arrival directions coincide. Anything richer (double-bounce
clutter, ray-traced facets) enters as explicit PropagationPath rows, either
injected into the Scene or loaded from a path-trace CSV.
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyScene, ParseError, ValidationError
from .geometry import Direction, direction_to_angles

PATH_CSV_COLUMNS = (
    "target_id",
    "path_id",
    "depart_az_deg",
    "depart_ze_deg",
    "arrive_az_deg",
    "arrive_ze_deg",
    "fwd_dist_m",
    "bwd_dist_m",
    "fwd_loss_db",
    "bwd_loss_db",
    "rcs_m2",
)


@dataclass(frozen=True)
class Target:
    position: tuple
    rcs: float = 1.0
    id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        if len(self.position) != 3:
            raise ValueError("target position must have three coordinates")
        if not self.position[1] > 0:
            raise ValueError(f"target {self.id} is not in front of the array (y <= 0)")
        if not self.rcs > 0:
            raise ValueError(f"target {self.id} has nonpositive rcs")


@dataclass(frozen=True)
class PropagationPath:
    """
    One channel path between the RIS reference element and the scene.

    `fwd_loss` and `bwd_loss` are linear attenuation factors (>= 1).
    """

    target_id: int
    path_id: int
    depart: Direction
    arrive: Direction
    fwd_dist: float
    bwd_dist: float
    fwd_loss: float = 1.0
    bwd_loss: float = 1.0
    rcs: float = 1.0

    def total_distance(self, delta1):
        """Feed -> RIS -> scene -> RIS -> feed length for reference distance `delta1`."""
        return 2 * delta1 + self.fwd_dist + self.bwd_dist

    @property
    def is_single_bounce(self):
        return self.depart == self.arrive and self.fwd_dist == self.bwd_dist


@dataclass
class Scene:
    targets: list = field(default_factory=list)
    injected_paths: list = field(default_factory=list)
    ground_truth: object = None

    def __post_init__(self):
        ids = [t.id for t in self.targets]
        if len(set(ids)) != len(ids):
            raise ValueError("target ids must be unique")


def synthesize_paths(scene, geom=None):
    """
    One single-bounce path per target, followed by the injected paths.

    `geom` is accepted for interface symmetry; targets are already expressed
    in the RIS frame so the array layout does not enter.
    """
    if not scene.targets and not scene.injected_paths:
        raise EmptyScene("scene has no targets and no injected paths")
    paths = []
    for t in scene.targets:
        p = np.asarray(t.position)
        dist = float(np.linalg.norm(p))
        d = direction_to_angles(p / dist)
        paths.append(PropagationPath(t.id, 0, d, d, dist, dist, 1.0, 1.0, t.rcs))
    paths.extend(scene.injected_paths)
    return paths


def _azimuth_deg_to_rad(deg):
    rad = float(np.deg2rad(deg))
    # wrap into (-pi, pi]
    rad = -((-rad + np.pi) % (2 * np.pi) - np.pi)
    return rad


def load_paths(file):
    """
    Read a path-trace CSV into a list of PropagationPath, preserving row order.

    Data rows are numbered from 1. Malformed rows raise ParseError, rows with
    nonpositive distances/rcs or negative losses raise ValidationError.
    """
    with open(file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PATH_CSV_COLUMNS:
            raise ParseError(0, f"expected header {','.join(PATH_CSV_COLUMNS)}")
        paths = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(PATH_CSV_COLUMNS):
                raise ParseError(row_no, f"expected {len(PATH_CSV_COLUMNS)} fields, got {len(row)}")
            try:
                tid, pid = int(row[0]), int(row[1])
                vals = [float(c) for c in row[2:]]
            except ValueError as exc:
                raise ParseError(row_no, str(exc)) from None
            daz, dze, aaz, aze, fwd, bwd, fl_db, bl_db, rcs = vals
            if not np.all(np.isfinite(vals)):
                raise ValidationError(row_no, "non-finite value")
            if fwd <= 0 or bwd <= 0:
                raise ValidationError(row_no, "distances must be positive")
            if rcs <= 0:
                raise ValidationError(row_no, "rcs must be positive")
            if fl_db < 0 or bl_db < 0:
                raise ValidationError(row_no, "loss factors must be >= 0 dB")
            if not (0 <= dze <= 180 and 0 <= aze <= 180):
                raise ValidationError(row_no, "zenith must lie in [0, 180] degrees")
            paths.append(
                PropagationPath(
                    tid,
                    pid,
                    Direction(_azimuth_deg_to_rad(daz), float(np.deg2rad(dze))),
                    Direction(_azimuth_deg_to_rad(aaz), float(np.deg2rad(aze))),
                    fwd,
                    bwd,
                    10 ** (fl_db / 10),
                    10 ** (bl_db / 10),
                    rcs,
                )
            )
    return paths


def save_paths(paths, file):
    """Write paths in the path-trace CSV format (inverse of load_paths)."""
    with open(file, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PATH_CSV_COLUMNS)
        for p in paths:
            w.writerow(
                [
                    p.target_id,
                    p.path_id,
                    repr(float(np.rad2deg(p.depart.azimuth))),
                    repr(float(np.rad2deg(p.depart.zenith))),
                    repr(float(np.rad2deg(p.arrive.azimuth))),
                    repr(float(np.rad2deg(p.arrive.zenith))),
                    repr(float(p.fwd_dist)),
                    repr(float(p.bwd_dist)),
                    repr(float(10 * np.log10(p.fwd_loss))),
                    repr(float(10 * np.log10(p.bwd_loss))),
                    repr(float(p.rcs)),
                ]
            )


def _cell_index(coord, extent, count):
    """
    Pixel index along one image axis for image-plane coordinate `coord`.

    Pixel centres sit at -extent + k*step (endpoint inclusive). A point on
    a shared boundary belongs to the lower index. Returns -1 when outside.
    """
    if count == 1:
        step = 2 * extent
        first = 0.0
    else:
        step = 2 * extent / (count - 1)
        first = -extent
    val = (coord - first) / step - 0.5
    nearest = round(val)
    # snap boundary points that rounding pushed off the exact midpoint
    k = int(nearest) if abs(val - nearest) < 1e-9 else int(np.ceil(val))
    return k if 0 <= k < count else -1


def pixel_of(grid, position):
    """
    (row, col) of the pixel whose angular cell contains `position`.

    Rows count from the top (+z) downward, columns from -x to +x, both
    0-based. Returns None if the point projects outside the grid.
    """
    x, y, z = (float(c) for c in position)
    if y <= 0:
        return None
    col = _cell_index(x / y, grid.half_width, grid.nbar_h)
    row = _cell_index(-z / y, grid.half_height, grid.nbar_v)
    if col < 0 or row < 0:
        return None
    return row, col


def ground_truth_depth(scene, grid, background):
    """
    Rasterize the targets into a depth map on the sensing grid.

    Each pixel holds the smallest target y-coordinate among the targets
    projecting into its cell; empty pixels hold `background` (meters),
    normally the radar's R_max.
    """
    from .depthmap import DepthMap

    values = np.full((grid.nbar_v, grid.nbar_h), float(background))
    for t in scene.targets:
        idx = pixel_of(grid, t.position)
        if idx is None:
            continue
        values[idx] = min(values[idx], t.position[1])
    return DepthMap(values, grid)
