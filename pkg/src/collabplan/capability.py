"""Reachability index and capability maps over a discretised workspace.

Each workspace cell is treated as a small sphere. A set of points is sampled
uniformly on its surface, and a reachability oracle is asked whether the
manipulator can approach the centre from each of them (approach direction =
inward normal). The index ``D`` is the accepted percentage.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Protocol, Sequence, Union, runtime_checkable

import numpy as np

from .model import Point3, Region

DEFAULT_SAMPLES = 200
DEFAULT_MAX_CELLS = 10**7
_FACE_TOL = 1e-9


class CapabilityError(ValueError):
    pass


class RegionClass(str, Enum):
    MOST_SUITABLE = "MostSuitable"
    SUITABLE = "Suitable"
    UNSUITABLE = "Unsuitable"


@runtime_checkable
class ReachabilityOracle(Protocol):
    def accepts(self, target: Point3, approach: np.ndarray) -> bool: ...


# plain callables ``f(target, approach) -> bool`` are accepted as oracles too
OracleLike = Union[ReachabilityOracle, Callable[[Point3, np.ndarray], bool]]


def _accept_mask(oracle: OracleLike, target: Point3, approaches: np.ndarray) -> np.ndarray:
    many = getattr(oracle, "accepts_many", None)
    if many is not None:
        return np.asarray(many(target, approaches), dtype=bool)
    single = oracle.accepts if isinstance(oracle, ReachabilityOracle) else oracle
    return np.fromiter((bool(single(target, u)) for u in approaches), dtype=bool, count=len(approaches))


@dataclass(frozen=True)
class PlanarTwoLinkArm:
    """Two-link arm working in the vertical plane through its target.

    The plane rotates about the base's vertical axis, so the reachable set is
    the spherical shell ``|l1 - l2| <= r <= l1 + l2``. An approach direction is
    accepted when the pre-grasp point ``target - standoff * approach`` is also
    inside the shell, and the approach lies within ``max_tilt_rad`` of the
    distal link for at least one of the two elbow solutions.
    """

    base: Point3
    link1_m: float
    link2_m: float
    max_tilt_rad: float = math.pi / 2
    standoff_m: float = 0.05

    def __post_init__(self) -> None:
        if self.link1_m <= 0 or self.link2_m <= 0:
            raise ValueError("link lengths must be positive")
        if not 0.0 <= self.max_tilt_rad <= math.pi:
            raise ValueError("max_tilt_rad must lie in [0, pi]")
        if self.standoff_m < 0:
            raise ValueError("standoff must be non-negative")

    @property
    def inner_radius(self) -> float:
        return abs(self.link1_m - self.link2_m)

    @property
    def outer_radius(self) -> float:
        return self.link1_m + self.link2_m

    def _in_shell(self, dist: np.ndarray) -> np.ndarray:
        return (dist >= self.inner_radius - 1e-12) & (dist <= self.outer_radius + 1e-12)

    def distal_directions(self, target: Point3) -> np.ndarray | None:
        """Unit vectors along the distal link for both elbow solutions."""
        v = np.subtract(target.as_tuple(), self.base.as_tuple())
        rho = float(np.linalg.norm(v))
        if not self._in_shell(np.array(rho)) or rho == 0.0:
            return None
        vhat = v / rho
        up = np.array([0.0, 0.0, 1.0])
        n = up - vhat * float(vhat @ up)
        if np.linalg.norm(n) < 1e-12:
            n = np.array([1.0, 0.0, 0.0]) - vhat * vhat[0]
        n /= np.linalg.norm(n)
        l1, l2 = self.link1_m, self.link2_m
        a = (l1 * l1 - l2 * l2 + rho * rho) / (2.0 * rho)
        h = math.sqrt(max(l1 * l1 - a * a, 0.0))
        p = np.asarray(target.as_tuple())
        base = np.asarray(self.base.as_tuple())
        elbows = [base + a * vhat + h * n, base + a * vhat - h * n]
        return np.array([(p - e) / l2 for e in elbows])

    def accepts_many(self, target: Point3, approaches: np.ndarray) -> np.ndarray:
        approaches = np.atleast_2d(np.asarray(approaches, dtype=float))
        distal = self.distal_directions(target)
        if distal is None:
            return np.zeros(len(approaches), dtype=bool)
        cos_limit = math.cos(self.max_tilt_rad)
        aligned = (approaches @ distal.T).max(axis=1) >= cos_limit - 1e-12
        pre = np.asarray(target.as_tuple()) - self.standoff_m * approaches
        dist = np.linalg.norm(pre - np.asarray(self.base.as_tuple()), axis=1)
        return aligned & self._in_shell(dist)

    def accepts(self, target: Point3, approach: np.ndarray) -> bool:
        return bool(self.accepts_many(target, np.asarray(approach)[None, :])[0])


def sample_sphere_directions(n: int, seed: int | Sequence[int]) -> np.ndarray:
    """``n`` unit vectors drawn uniformly on the sphere, shape ``(n, 3)``.

    Uses the inverse CDF of ``z`` (uniform on [-1, 1]) and a uniform azimuth.
    """
    if n < 1:
        raise CapabilityError("empty sample")
    rng = np.random.default_rng(seed)
    u = rng.random((n, 2))
    z = 1.0 - 2.0 * u[:, 0]
    phi = 2.0 * math.pi * u[:, 1]
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    out = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def reachability_index(oracle: OracleLike, center: Point3, n: int = DEFAULT_SAMPLES,
                       seed: int | Sequence[int] = 0) -> float:
    """Percentage of sampled surface points from which ``center`` can be approached."""
    dirs = sample_sphere_directions(n, seed)
    accepted = int(_accept_mask(oracle, center, -dirs).sum())
    return 100.0 * accepted / n


def classify_region(d: float) -> RegionClass:
    if not 0.0 <= d <= 100.0:
        raise CapabilityError(f"index out of range: {d}")
    if d > 60.0:
        return RegionClass.MOST_SUITABLE
    if d > 20.0:
        return RegionClass.SUITABLE
    return RegionClass.UNSUITABLE


@dataclass(frozen=True, eq=False)
class CapabilityMap:
    robot_id: str
    origin: Point3
    cell_m: float
    dims: tuple[int, int, int]
    index: np.ndarray
    n_samples: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.cell_m <= 0:
            raise CapabilityError("cell size must be positive")
        if any(d < 1 for d in self.dims):
            raise CapabilityError(f"bad grid dimensions {self.dims}")
        idx = np.array(self.index, dtype=float).reshape(self.dims)
        if np.any((idx < 0) | (idx > 100)) or np.any(np.isnan(idx)):
            raise CapabilityError("reachability index outside [0, 100]")
        idx.flags.writeable = False
        object.__setattr__(self, "index", idx)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CapabilityMap):
            return NotImplemented
        return (
            self.robot_id == other.robot_id
            and self.origin == other.origin
            and self.cell_m == other.cell_m
            and self.dims == other.dims
            and self.n_samples == other.n_samples
            and self.seed == other.seed
            and np.array_equal(self.index, other.index)
        )

    def cell_center(self, i: int, j: int, k: int) -> Point3:
        o = self.origin.as_tuple()
        return Point3(*(o[a] + (c + 0.5) * self.cell_m for a, c in enumerate((i, j, k))))

    def cells(self):
        nx, ny, nz = self.dims
        for i in range(nx):
            for j in range(ny):
                for k in range(nz):
                    yield (i, j, k), self.cell_center(i, j, k), float(self.index[i, j, k])

    def classes(self) -> np.ndarray:
        return np.vectorize(lambda d: classify_region(d).value, otypes=[object])(self.index)


def _grid_for(bounds: Region, cell_m: float) -> tuple[Point3, tuple[int, int, int]]:
    box = bounds.bounding_box()
    lo, hi = box.lo.as_tuple(), box.hi.as_tuple()
    dims, origin = [], []
    for a, b in zip(lo, hi):
        n = max(1, math.ceil((b - a) / cell_m - _FACE_TOL))
        dims.append(n)
        # centre the grid on the extent; a flat axis gets one cell centred on it
        origin.append((a + b) / 2.0 - n * cell_m / 2.0)
    return Point3.of(origin), (dims[0], dims[1], dims[2])


def build_capability_map(oracle: OracleLike, bounds: Region, cell_m: float,
                         n: int = DEFAULT_SAMPLES, seed: int = 0, *, robot_id: str = "robot",
                         max_cells: int = DEFAULT_MAX_CELLS) -> CapabilityMap:
    if cell_m <= 0:
        raise CapabilityError("cell size must be positive")
    if bounds.is_empty:
        raise CapabilityError("empty bounds")
    origin, dims = _grid_for(bounds, cell_m)
    total = dims[0] * dims[1] * dims[2]
    if total > max_cells:
        raise CapabilityError(f"grid too large: {total} cells > {max_cells}")
    index = np.empty(dims)
    o = origin.as_tuple()
    for flat in range(total):
        i, j, k = np.unravel_index(flat, dims)
        center = Point3(o[0] + (i + 0.5) * cell_m, o[1] + (j + 0.5) * cell_m, o[2] + (k + 0.5) * cell_m)
        # per-cell stream keyed on (seed, cell) so evaluation order never matters
        index[i, j, k] = reachability_index(oracle, center, n, (seed, flat))
    return CapabilityMap(robot_id, origin, cell_m, dims, index, n, seed)


def _axis_index(q: float, n: int) -> int:
    k = math.floor(q)
    r = round(q)
    if r > 0 and abs(q - r) <= _FACE_TOL * max(1.0, abs(q)):
        # shared face: the lower-index cell wins
        k = r - 1
    return min(max(k, 0), n - 1)


def lookup_index(cmap: CapabilityMap, p: Point3) -> float:
    idx = []
    for a, (v, o, n) in enumerate(zip(p.as_tuple(), cmap.origin.as_tuple(), cmap.dims)):
        q = (v - o) / cmap.cell_m
        if q < -_FACE_TOL or q > n + _FACE_TOL:
            raise CapabilityError(f"out of map: {p}")
        idx.append(_axis_index(q, n))
    return float(cmap.index[tuple(idx)])


def _meta(cmap: CapabilityMap) -> dict:
    return {
        "robot_id": cmap.robot_id,
        "origin": list(cmap.origin.as_tuple()),
        "cell_m": cmap.cell_m,
        "dims": list(cmap.dims),
        "n_samples": cmap.n_samples,
        "seed": cmap.seed,
    }


def export_map(cmap: CapabilityMap, fmt: str = "csv") -> bytes:
    """Serialise a map. CSV carries the grid metadata on a leading ``#`` line."""
    if fmt == "json":
        doc = _meta(cmap)
        doc["index"] = cmap.index.ravel().tolist()
        return json.dumps(doc, indent=1).encode()
    if fmt != "csv":
        raise CapabilityError(f"unsupported format: {fmt!r}")
    buf = io.StringIO()
    buf.write("# " + json.dumps(_meta(cmap), separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "z", "D", "class"])
    for _, c, d in cmap.cells():
        w.writerow([repr(c.x), repr(c.y), repr(c.z), repr(d), classify_region(d).value])
    return buf.getvalue().encode()


def import_map(data: bytes, fmt: str = "csv") -> CapabilityMap:
    text = data.decode()
    if fmt == "json":
        doc = json.loads(text)
        index = np.array(doc["index"], dtype=float)
    elif fmt == "csv":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise CapabilityError("csv map is missing its metadata line")
        doc = json.loads(lines[0][1:])
        rows = list(csv.DictReader(lines[1:]))
        index = np.array([float(r["D"]) for r in rows])
    else:
        raise CapabilityError(f"unsupported format: {fmt!r}")
    dims = tuple(int(d) for d in doc["dims"])
    return CapabilityMap(
        robot_id=doc["robot_id"],
        origin=Point3.of(doc["origin"]),
        cell_m=float(doc["cell_m"]),
        dims=dims,  # type: ignore[arg-type]
        index=index.reshape(dims),
        n_samples=int(doc["n_samples"]),
        seed=int(doc.get("seed", 0)),
    )
