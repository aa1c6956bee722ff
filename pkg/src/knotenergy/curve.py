"""Closed polygonal curves: arc geometry, distortion, inversion, generators, I/O.

A curve is stored as an open-ended vertex list with implicit closure
(the first vertex is not repeated).  All distances are Euclidean in R^2
or R^3; the intrinsic metric is the polygon's own arclength.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCurveError, InversionSingularityError
from .summation import chunk_ranges, map_chunks, merge_sums


@dataclass(frozen=True)
class PolyCurve:
    """Closed polygonal curve in R^d, d in {2, 3}, with cyclic indexing.

    Invariants enforced on construction: at least 3 vertices, every edge
    has positive length, and all vertices are pairwise distinct (a
    duplicate vertex means infinite distortion / energy, i.e. a
    self-intersecting polygon).
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            raise InvalidCurveError("vertices must be an (n, 2) or (n, 3) array")
        if len(v) < 3:
            raise InvalidCurveError("a closed curve needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidCurveError("vertices must be finite")
        edges = np.roll(v, -1, axis=0) - v
        if np.any((edges * edges).sum(axis=1) == 0.0):
            raise InvalidCurveError("zero-length edge (consecutive duplicate vertex)",
                                    self_intersection=True)
        if len(np.unique(v, axis=0)) != len(v):
            raise InvalidCurveError("duplicate vertices (self-intersecting polygon)",
                                    self_intersection=True)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def vertex(self, j: int) -> np.ndarray:
        """Vertex with cyclic indexing x_{j +- n} = x_j."""
        return self.vertices[j % self.n]

    def scaled(self, factor: float) -> "PolyCurve":
        return PolyCurve(self.vertices * float(factor))

    def translated(self, offset) -> "PolyCurve":
        return PolyCurve(self.vertices + np.asarray(offset, dtype=float))

    def reversed(self) -> "PolyCurve":
        return PolyCurve(self.vertices[::-1].copy())


@dataclass(frozen=True)
class ArcTable:
    """Cumulative arclength and mid-point cell weights of a polygon.

    ``s[j]`` is the arclength from vertex 0 to vertex j (s[0] = 0),
    ``total`` the full perimeter, and ``delta[j]`` the mid-point weight
    (half the two adjacent edge lengths).  sum(delta) == total.
    """

    s: np.ndarray
    total: float
    delta: np.ndarray
    edge_lengths: np.ndarray = field(repr=False)


def build_arc_table(curve: PolyCurve) -> ArcTable:
    v = curve.vertices
    edges = np.roll(v, -1, axis=0) - v
    el = np.sqrt((edges * edges).sum(axis=1))
    if np.any(el == 0.0):
        raise InvalidCurveError("degenerate (zero-length) edge", self_intersection=True)
    total = float(el.sum())
    s = np.concatenate([[0.0], np.cumsum(el[:-1])])
    delta = 0.5 * (el + np.roll(el, 1))
    for arr in (s, delta, el):
        arr.setflags(write=False)
    return ArcTable(s=s, total=total, delta=delta, edge_lengths=el)


def intrinsic_dist(arc: ArcTable, j: int, k: int) -> float:
    """Shorter-way arclength d_{j,k} between vertices j and k."""
    n = len(arc.s)
    fwd = abs(arc.s[j % n] - arc.s[k % n])
    return float(min(fwd, arc.total - fwd))


def _pair_scan(curve: PolyCurve, kernel, threads: int = 1):
    """Run kernel(lo, hi, chord, arcdist, rowmask) over fixed row chunks.

    chord and arcdist are (hi-lo, n) matrices of chord lengths and
    shorter-way arc distances; rowmask is True off the diagonal.
    Results are returned in chunk order.
    """
    v = curve.vertices
    arc = build_arc_table(curve)
    n = curve.n

    def run(lo, hi):
        diff = v[lo:hi, None, :] - v[None, :, :]
        chord = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        ds = np.abs(arc.s[lo:hi, None] - arc.s[None, :])
        d = np.minimum(ds, arc.total - ds)
        mask = np.ones((hi - lo, n), dtype=bool)
        mask[np.arange(hi - lo), np.arange(lo, hi)] = False
        return kernel(lo, hi, chord, d, mask)

    return map_chunks(run, chunk_ranges(n), threads=threads)


def distortion(curve: PolyCurve, threads: int = 1) -> float:
    """Discrete Gromov distortion: max over vertex pairs of arc / chord.

    Always >= 1 (arc >= chord).  Duplicate vertices are rejected at
    PolyCurve construction, so the maximum is finite here.
    """

    def kernel(lo, hi, chord, d, mask):
        return float(np.max(np.where(mask, d, 0.0) / np.where(mask, chord, 1.0)))

    parts = _pair_scan(curve, kernel, threads=threads)
    return max(parts)


def sphere_inversion(curve: PolyCurve, center, radius: float = 1.0,
                     eps0: float = 1e-8) -> PolyCurve:
    """Vertex-wise inversion x -> c + r^2 (x - c)/|x - c|^2.

    Vertices closer to the center than eps0 * radius are rejected: their
    images would blow up and the inverted polygon becomes meaningless.
    """
    c = np.zeros(curve.dim) if center is None else np.asarray(center, dtype=float)
    if c.shape != (curve.dim,):
        raise InversionSingularityError(f"center must have dimension {curve.dim}")
    if radius <= 0:
        raise InversionSingularityError("inversion radius must be positive")
    d = curve.vertices - c
    r2 = (d * d).sum(axis=1)
    if np.any(r2 <= (eps0 * radius) ** 2):
        raise InversionSingularityError(
            f"vertex within {eps0:g} * radius of the inversion center")
    return PolyCurve(c + radius ** 2 * d / r2[:, None])


def total_curvature(curve: PolyCurve) -> float:
    """Sum of exterior turning angles, each in [0, pi].

    The discrete total curvature of the polygon; equals 2*pi exactly for
    planar convex polygons and converges to the integral of |curvature|
    for fine samplings of C^{1,1} curves.
    """
    v = curve.vertices
    e = np.roll(v, -1, axis=0) - v
    if curve.dim == 2:
        e = np.column_stack([e, np.zeros(curve.n)])
    prev = np.roll(e, 1, axis=0)
    cross = np.cross(prev, e)
    sin_part = np.sqrt((cross * cross).sum(axis=1))
    cos_part = (prev * e).sum(axis=1)
    angles = np.arctan2(sin_part, cos_part)
    return merge_sums(angles.tolist())


# ---------------------------------------------------------------------------
# generators


def _allocate(counts_total: int, weights) -> list[int]:
    """Largest-remainder allocation of counts_total samples to segments."""
    w = np.asarray(weights, dtype=float)
    raw = counts_total * w / w.sum()
    base = np.floor(raw).astype(int)
    rem = counts_total - base.sum()
    order = np.argsort(raw - base)[::-1]
    for i in order[:rem]:
        base[i] += 1
    if np.any(base < 1):
        raise InvalidCurveError("too few samples to cover every segment")
    return base.tolist()


def _sample_segments(segments, n: int) -> np.ndarray:
    """Uniform-by-arclength samples along parametrized segments.

    Each segment is (length, point_fn) with point_fn mapping [0, 1) to
    points; segment start points are always included so geometric corners
    and arc junctions land on samples.
    """
    counts = _allocate(n, [L for L, _ in segments])
    pts = []
    for (length, fn), m in zip(segments, counts):
        t = np.arange(m) / m
        pts.append(fn(t))
    return np.vstack(pts)


def _resample_closed(points: np.ndarray, n: int) -> np.ndarray:
    """Resample a densely sampled closed curve at n uniform arclength values."""
    seg = np.roll(points, -1, axis=0) - points
    ell = np.sqrt((seg * seg).sum(axis=1))
    cs = np.concatenate([[0.0], np.cumsum(ell)])
    total = cs[-1]
    targets = np.arange(n) / n * total
    idx = np.clip(np.searchsorted(cs, targets, side="right") - 1, 0, len(points) - 1)
    frac = (targets - cs[idx]) / ell[idx]
    nxt = (idx + 1) % len(points)
    return points[idx] + frac[:, None] * (points[nxt] - points[idx])


def generate(kind: str, n: int, wavy_k: int = 5, wavy_amp: float = 0.3) -> PolyCurve:
    """Canonical test curves, sampled uniformly by arclength.

    kind: 'circle' (unit), 'square' (max(|x|,|y|) <= 1, corners included),
    'stadion' (two unit semicircles joined by straights of length pi,
    centered at the origin), or 'wavy' (polar r = 1 + amp*cos(k*theta)).
    """
    if n < 3:
        raise InvalidCurveError("need n >= 3")
    if kind == "circle":
        t = 2 * np.pi * np.arange(n) / n
        return PolyCurve(np.column_stack([np.cos(t), np.sin(t)]))
    if kind == "square":
        corners = np.array([[-1., -1.], [1., -1.], [1., 1.], [-1., 1.]])
        segs = []
        for i in range(4):
            a, b = corners[i], corners[(i + 1) % 4]
            segs.append((2.0, lambda t, a=a, b=b: a + t[:, None] * (b - a)))
        return PolyCurve(_sample_segments(segs, n))
    if kind == "stadion":
        h = np.pi / 2  # semicircle centers at (+-h, 0)
        segs = [
            (np.pi, lambda t: np.column_stack(
                [h + np.cos(-np.pi / 2 + np.pi * t), np.sin(-np.pi / 2 + np.pi * t)])),
            (np.pi, lambda t: np.column_stack([h - np.pi * t, np.ones_like(t)])),
            (np.pi, lambda t: np.column_stack(
                [-h + np.cos(np.pi / 2 + np.pi * t), np.sin(np.pi / 2 + np.pi * t)])),
            (np.pi, lambda t: np.column_stack([-h + np.pi * t, -np.ones_like(t)])),
        ]
        return PolyCurve(_sample_segments(segs, n))
    if kind == "wavy":
        dense = max(200 * n, 100_000)
        th = 2 * np.pi * np.arange(dense) / dense
        r = 1.0 + wavy_amp * np.cos(wavy_k * th)
        pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
        return PolyCurve(_resample_closed(pts, n))
    raise InvalidCurveError(f"unknown curve kind {kind!r}")


# ---------------------------------------------------------------------------
# file I/O
#
# Format: plain text, one vertex per line, 2 or 3 whitespace- or
# comma-separated decimal fields.  Lines starting with '#' are comments.
# The dimension is inferred from the column count; closure is implicit.


def _read_rows(path) -> np.ndarray:
    """Parse the shared vertex-per-line text format into an (n, 2|3) array."""
    rows = []
    ncols = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.replace(",", " ").split()
            if ncols is None:
                ncols = len(fields)
                if ncols not in (2, 3):
                    raise InvalidCurveError(
                        f"{path}:{lineno}: expected 2 or 3 columns, got {ncols}")
            elif len(fields) != ncols:
                raise InvalidCurveError(
                    f"{path}:{lineno}: inconsistent column count "
                    f"({len(fields)} vs {ncols})")
            try:
                rows.append([float(x) for x in fields])
            except ValueError as exc:
                raise InvalidCurveError(f"{path}:{lineno}: malformed row: {exc}") from exc
    if len(rows) < 3:
        raise InvalidCurveError(f"{path}: need at least 3 rows")
    return np.asarray(rows, dtype=float)


def read_curve(path) -> PolyCurve:
    return PolyCurve(_read_rows(path))


def write_curve(curve: PolyCurve, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# closed polygonal curve, {curve.n} vertices, dim {curve.dim}\n")
        for row in curve.vertices:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
