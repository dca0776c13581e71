"""Base-station and user point sets."""

from dataclasses import dataclass, field

import numpy as np

from .rng import substream


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle, metres."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        vals = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(np.isfinite(vals)):
            raise ValueError("rectangle bounds must be finite")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate rectangle {vals}")

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    @property
    def area(self):
        return self.width * self.height

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.xmin)
            & (pts[:, 0] <= self.xmax)
            & (pts[:, 1] >= self.ymin)
            & (pts[:, 1] <= self.ymax)
        )

    def covers(self, other):
        return (
            other.xmin >= self.xmin
            and other.ymin >= self.ymin
            and other.xmax <= self.xmax
            and other.ymax <= self.ymax
        )

    def sample(self, rng, n):
        u = rng.random((n, 2))
        return np.column_stack(
            (self.xmin + self.width * u[:, 0], self.ymin + self.height * u[:, 1])
        )


@dataclass(frozen=True, eq=False)
class Topology:
    """Base-station layout.

    ``generator`` is one of ``"perturbed_grid"``, ``"ppp"`` or
    ``"explicit"``; ``params`` records the generator arguments.
    """

    bs: np.ndarray
    window: Rect
    analysis_window: Rect
    seed: int = 0
    generator: str = "explicit"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        bs = np.array(self.bs, dtype=float).reshape(-1, 2)
        bs.setflags(write=False)
        object.__setattr__(self, "bs", bs)
        if not np.all(np.isfinite(bs)):
            raise ValueError("base-station coordinates must be finite")
        if not self.window.contains(bs).all():
            raise ValueError("base stations must lie inside the window")
        if not self.window.covers(self.analysis_window):
            raise ValueError("analysis window must lie inside the window")
        if len(np.unique(bs, axis=0)) != len(bs):
            raise ValueError("base-station positions must be pairwise distinct")

    def __len__(self):
        return len(self.bs)

    def translated(self, dx, dy):
        w, a = self.window, self.analysis_window
        return Topology(
            self.bs + np.array([dx, dy]),
            Rect(w.xmin + dx, w.ymin + dy, w.xmax + dx, w.ymax + dy),
            Rect(a.xmin + dx, a.ymin + dy, a.xmax + dx, a.ymax + dy),
            self.seed,
            self.generator,
            dict(self.params),
        )


@dataclass(frozen=True, eq=False)
class UserSet:
    positions: np.ndarray
    seed: int = 0
    k_per_bs: float = None

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.positions)


def generate_perturbed_grid(rows, cols, cell_size, p, seed, guard=None):
    """One BS per grid cell, uniform in the centred ``p x p`` sub-square.

    BS ``r * cols + c`` belongs to the cell in row ``r`` (y) and column
    ``c`` (x).  The analysis window drops a guard ring of ``guard`` metres
    (default one cell) on every side, or is the whole window when the
    grid is too small for a ring.
    """
    if rows * cols < 3:
        raise ValueError("need at least 3 grid cells")
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    if not 0 <= p <= cell_size:
        raise ValueError(f"p must lie in [0, cell_size], got {p}")
    rng = substream(seed, "topology", "perturbed_grid")
    r, c = np.divmod(np.arange(rows * cols), cols)
    centers = np.column_stack(((c + 0.5) * cell_size, (r + 0.5) * cell_size))
    offsets = p * (rng.random((rows * cols, 2)) - 0.5)
    window = Rect(0.0, 0.0, cols * cell_size, rows * cell_size)
    if guard is None:
        guard = cell_size if min(rows, cols) >= 3 else 0.0
    analysis = Rect(guard, guard, window.xmax - guard, window.ymax - guard)
    return Topology(
        centers + offsets,
        window,
        analysis,
        seed,
        "perturbed_grid",
        dict(rows=rows, cols=cols, cell_size=cell_size, p=p),
    )


def generate_ppp(density, window, seed, analysis_window=None):
    """Homogeneous Poisson point process of ``density`` points per m^2."""
    if not density > 0:
        raise ValueError("density must be positive")
    if not isinstance(window, Rect):
        window = Rect(*window)
    rng = substream(seed, "topology", "ppp")
    n = rng.poisson(density * window.area)
    return Topology(
        window.sample(rng, n),
        window,
        analysis_window or window,
        seed,
        "ppp",
        dict(density=density),
    )


def drop_users(topology, count, seed, k_per_bs=None):
    """``count`` i.i.d. uniform users over ``topology.window``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = substream(seed, "users")
    return UserSet(topology.window.sample(rng, int(count)), seed, k_per_bs)


def load_topology(path, window=None, analysis_window=None):
    """Read an ``x y`` per line coordinate file (``#`` starts a comment).

    The window defaults to the bounding box of the points.
    """
    pts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            pts.append((float(parts[0]), float(parts[1])))
    pts = np.array(pts, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError(f"{path}: no coordinates")
    if window is None:
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.where(hi > lo, 0.0, 1.0)
        window = Rect(lo[0] - span[0], lo[1] - span[1], hi[0] + span[0], hi[1] + span[1])
    return Topology(pts, window, analysis_window or window, 0, "explicit", {"path": str(path)})


def save_topology(topology, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {len(topology)} base stations, generator={topology.generator}\n")
        for x, y in topology.bs:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
