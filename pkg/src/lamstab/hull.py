"""The closed curve Gamma, the hexagon H and membership in the set L.

Gamma is assembled in the unit-trace plane from the two optimal branches:
Gamma_alpha is mirrored across {m1 = m2}, Gamma_beta across {m2 = m3}, and
both arcs are rotated by 2pi/3 twice.  The six arcs are stitched into one
counterclockwise polygon; L is the region it encloses.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .curves import curve_arrays, optimal_params
from .errors import StitchFailure
from .spectra import Spectrum3, embed_triple, unembed

DEFAULT_BOUNDARY_TOL = 1e-7
STITCH_TOL = 1e-8
DEDUP_TOL = 1e-10

_R3 = math.sqrt(3.0) / 2.0
# plane isometries in the (u, v) basis of spectra.embed_triple
REFLECT_12 = np.array([[-1.0, 0.0], [0.0, 1.0]])
REFLECT_23 = np.array([[0.5, _R3], [_R3, -0.5]])
REFLECT_13 = np.array([[0.5, -_R3], [-_R3, -0.5]])
ROT_120 = np.array([[-0.5, -_R3], [_R3, -0.5]])
ROT_240 = np.array([[-0.5, _R3], [-_R3, -0.5]])
SYMMETRIES = (np.eye(2), ROT_120, ROT_240, REFLECT_12, REFLECT_23, REFLECT_13)

# integer membership codes used by the vectorized classifier
OUTSIDE, BOUNDARY, INSIDE = 0, 1, 2


class Membership(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"

    @classmethod
    def from_code(cls, code: int) -> "Membership":
        return (cls.OUTSIDE, cls.BOUNDARY, cls.INSIDE)[int(code)]


class _EdgeIndex:
    """Spatial index over the polygon edges.

    Edges are bucketed by their (padded) v-extent for exact winding and
    distance queries.  A coarse uniform grid on top marks the cells that no
    padded edge touches; such a cell lies wholly inside or outside, so points
    falling in it inherit the winding number of the cell centre.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, pad: float, cells: int = 256):
        self.a, self.b = a, b
        vmin = np.minimum(a[:, 1], b[:, 1]) - pad
        vmax = np.maximum(a[:, 1], b[:, 1]) + pad
        self.lo, self.hi = float(vmin.min()), float(vmax.max())
        # quantile breaks: roughly two vertices per bin, also where the boundary runs flat
        vs = np.sort(a[:, 1])
        breaks = np.unique(vs[np.linspace(0, len(vs) - 1, max(8, len(vs) // 2) + 1).astype(np.int64)])
        breaks[0], breaks[-1] = self.lo, self.hi
        self.breaks = breaks
        self.nbins = len(breaks) - 1
        self.edge_ids, self.indptr = _bucket(self._bin(vmin), self._bin(vmax), self.nbins)

        umin = np.minimum(a[:, 0], b[:, 0]) - pad
        umax = np.maximum(a[:, 0], b[:, 0]) + pad
        self.origin = np.array([umin.min(), self.lo])
        self.cell = max(umax.max() - umin.min(), self.hi - self.lo) / cells
        self.cells = cells
        touched = np.zeros((cells, cells), dtype=bool)
        i0, i1 = self._cell(umin, 0), self._cell(umax, 0)
        j0, j1 = self._cell(vmin, 1), self._cell(vmax, 1)
        for di in range(int((i1 - i0).max()) + 1):
            for dj in range(int((j1 - j0).max()) + 1):
                ok = (i0 + di <= i1) & (j0 + dj <= j1)
                touched[(i0 + di)[ok], (j0 + dj)[ok]] = True
        centres = self.origin + (np.stack(np.nonzero(~touched), axis=-1) + 0.5) * self.cell
        self.free_winding = np.zeros((cells, cells), dtype=np.int64)
        w, _ = self._exact(centres)
        self.free_winding[~touched] = w
        self.touched = touched

    def _bin(self, v):
        return np.clip(np.searchsorted(self.breaks, v, side="right") - 1, 0, self.nbins - 1)

    def _cell(self, x, axis):
        return np.clip(((x - self.origin[axis]) / self.cell).astype(np.int64), 0, self.cells - 1)

    def query(self, pts: np.ndarray):
        """Winding numbers and distance to the nearest nearby edge (inf when far)."""
        n = len(pts)
        winding = np.zeros(n, dtype=np.int64)
        dist = np.full(n, np.inf)
        rel = (pts - self.origin) / self.cell
        in_grid = np.all((rel >= 0.0) & (rel < self.cells), axis=1)
        idx = np.nonzero(in_grid)[0]
        ci = rel[idx].astype(np.int64)
        free = ~self.touched[ci[:, 0], ci[:, 1]]
        winding[idx[free]] = self.free_winding[ci[free, 0], ci[free, 1]]
        near = idx[~free]
        if near.size:
            winding[near], dist[near] = self._exact(pts[near])
        return winding, dist

    def _exact(self, pts: np.ndarray):
        n = len(pts)
        winding = np.zeros(n, dtype=np.int64)
        dist = np.full(n, np.inf)
        in_range = (pts[:, 1] >= self.lo) & (pts[:, 1] <= self.hi)
        idx = np.nonzero(in_range)[0]
        if idx.size == 0:
            return winding, dist
        bins = self._bin(pts[idx, 1])
        order = np.argsort(bins, kind="stable")
        idx, bins = idx[order], bins[order]
        cuts = np.nonzero(np.diff(bins))[0] + 1
        for group in np.split(np.arange(idx.size), cuts):
            k = bins[group[0]]
            edges = self.edge_ids[self.indptr[k]:self.indptr[k + 1]]
            if edges.size == 0:
                continue
            a, b = self.a[edges], self.b[edges]
            step = max(1, 2_000_000 // edges.size)
            for i in range(0, group.size, step):
                sel = idx[group[i:i + step]]
                winding[sel], dist[sel] = _winding_and_distance(pts[sel], a, b)
        return winding, dist


def _bucket(i0: np.ndarray, i1: np.ndarray, nbins: int):
    """CSR lists of the items overlapping each bin, item k spanning bins i0[k]..i1[k]."""
    counts = i1 - i0 + 1
    ids = np.repeat(np.arange(len(i0)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    bins = np.repeat(i0, counts) + offsets
    order = np.argsort(bins, kind="stable")
    return ids[order], np.searchsorted(bins[order], np.arange(nbins + 1))


def _winding_and_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    px, py = p[:, None, 0], p[:, None, 1]
    dx, dy = (b - a)[None, :, 0], (b - a)[None, :, 1]
    rx = px - a[None, :, 0]
    ry = py - a[None, :, 1]
    left = dx * ry - rx * dy
    ay, by = a[None, :, 1], b[None, :, 1]
    up = (ay <= py) & (by > py) & (left > 0)
    down = (by <= py) & (ay > py) & (left < 0)
    winding = np.count_nonzero(up, axis=1) - np.count_nonzero(down, axis=1)

    len2 = dx * dx + dy * dy
    s = np.clip((rx * dx + ry * dy) / np.where(len2 > 0, len2, 1.0), 0.0, 1.0)
    ex = rx - s * dx
    ey = ry - s * dy
    dist = np.sqrt((ex * ex + ey * ey).min(axis=1))
    return winding, dist


@dataclass(frozen=True, eq=False)
class HullPolygon:
    """Closed counterclockwise polygon; ``vertices`` lists each vertex once."""

    vertices: np.ndarray
    resolution: int
    boundary_tol: float = DEFAULT_BOUNDARY_TOL
    S: Spectrum3 | None = None
    triples: np.ndarray | None = None
    _index: _EdgeIndex = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if self.triples is not None:
            m = np.asarray(self.triples, dtype=float)
            m.setflags(write=False)
            object.__setattr__(self, "triples", m)
        a = v
        b = np.roll(v, -1, axis=0)
        object.__setattr__(self, "_index", _EdgeIndex(a, b, self.boundary_tol))

    @property
    def closed_vertices(self) -> np.ndarray:
        return np.vstack([self.vertices, self.vertices[:1]])

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def signed_area(self) -> float:
        return _signed_area(self.vertices)

    def max_chord(self) -> float:
        a, b = self.edges
        return float(np.hypot(*(b - a).T).max())

    def with_tolerance(self, boundary_tol: float) -> "HullPolygon":
        return HullPolygon(self.vertices, self.resolution, boundary_tol, self.S, self.triples)

    def spectra(self) -> np.ndarray:
        """Eigenvalue triples (in polygon order, not sorted) of the vertices."""
        return np.array(self.triples) if self.triples is not None else unembed(self.vertices)


def _signed_area(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class Hexagon:
    """Convex hull of the six permutations of S, counterclockwise.

    ``spectra`` holds the permuted triples, ``vertices`` their embeddings.
    """

    vertices: np.ndarray
    spectra: np.ndarray

    def contains_uv(self, uv, tol: float = 1e-12) -> np.ndarray:
        uv = np.atleast_2d(np.asarray(uv, dtype=float))
        a = self.vertices
        b = np.roll(a, -1, axis=0)
        cross = (b[None, :, 0] - a[None, :, 0]) * (uv[:, None, 1] - a[None, :, 1]) \
            - (uv[:, None, 0] - a[None, :, 0]) * (b[None, :, 1] - a[None, :, 1])
        return np.all(cross >= -tol, axis=1)


def hexagon(S: Spectrum3) -> Hexagon:
    perms = np.array(list(itertools.permutations(S.as_array().tolist())))
    uv = embed_triple(perms)
    c = uv.mean(axis=0)
    order = np.argsort(np.arctan2(uv[:, 1] - c[1], uv[:, 0] - c[0]), kind="stable")
    return Hexagon(uv[order], perms[order])


def _dedup_consecutive(rows: np.ndarray, tol: float) -> np.ndarray:
    """Drop rows whose plane point (first two columns) repeats the previous one."""
    keep = np.ones(len(rows), dtype=bool)
    keep[1:] = np.hypot(*np.diff(rows[:, :2], axis=0).T) > tol
    rows = rows[keep]
    if len(rows) > 1 and np.hypot(*(rows[-1, :2] - rows[0, :2])) <= tol:
        rows = rows[:-1]
    return rows


def _gap(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.hypot(*(p[:2] - q[:2])))


def _stitch(arcs: list[np.ndarray]) -> np.ndarray:
    """Chain arcs end to start (reversing where needed) into one closed ring."""
    remaining = list(arcs[1:])
    chain = [arcs[0]]
    end = arcs[0][-1]
    while remaining:
        gaps = []
        for arc in remaining:
            gaps.append((_gap(arc[0], end), False))
            gaps.append((_gap(arc[-1], end), True))
        best = int(np.argmin([g for g, _ in gaps]))
        gap, flip = gaps[best]
        if gap > STITCH_TOL:
            raise StitchFailure(f"no arc starts within {STITCH_TOL} of {end[:2]} (closest {gap:.3e})")
        arc = remaining.pop(best // 2)
        arc = arc[::-1] if flip else arc
        chain.append(arc)
        end = arc[-1]
    closing = _gap(end, arcs[0][0])
    if closing > STITCH_TOL:
        raise StitchFailure(f"stitched curve does not close (gap {closing:.3e})")
    return np.vstack(chain)


def _apply(rows: np.ndarray, iso: np.ndarray, perm: list[int]) -> np.ndarray:
    """Plane isometry on (u, v) together with the matching permutation of (m1, m2, m3)."""
    return np.hstack([rows[:, :2] @ iso.T, rows[:, 2:][:, perm]])


def build_gamma(S: Spectrum3, N: int, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> HullPolygon:
    """Polygonal Gamma with N samples per branch, 12N - 12 distinct vertices.

    Every vertex keeps the (permuted) curve spectrum it came from, so the
    eigenvalue columns are exact rather than read back from the plane.
    """
    if N < 16:
        raise ValueError(f"need at least 16 samples per branch, got {N}")
    optimal_params(S)
    _, _, m_alpha, _ = curve_arrays("alpha", S, N)
    _, _, m_beta, _ = curve_arrays("beta", S, N)
    ga = np.hstack([embed_triple(m_alpha), m_alpha])  # S -> U_alpha
    gb = np.hstack([embed_triple(m_beta), m_beta])    # S -> U_beta
    arc_alpha = np.vstack([_apply(ga, REFLECT_12, [1, 0, 2]), ga[::-1]])  # swap12(S) -> U_alpha -> S
    arc_beta = np.vstack([gb, _apply(gb, REFLECT_23, [0, 2, 1])[::-1]])   # S -> U_beta -> swap23(S)
    arcs = []
    for rot, perm in ((np.eye(2), [0, 1, 2]), (ROT_120, [2, 0, 1]), (ROT_240, [1, 2, 0])):
        arcs.append(_apply(arc_beta, rot, perm))
        arcs.append(_apply(arc_alpha, rot, perm))
    ring = _dedup_consecutive(_stitch(arcs), DEDUP_TOL)
    if _signed_area(ring[:, :2]) < 0:
        ring = ring[::-1]
    # start the ring at S
    start = int(np.argmin(np.hypot(*(ring[:, :2] - embed_triple(S.as_array())).T)))
    ring = np.roll(ring, -start, axis=0)
    return HullPolygon(ring[:, :2].copy(), N, boundary_tol, S, triples=ring[:, 2:].copy())


def locate_uv(L: HullPolygon, uv) -> tuple[np.ndarray, np.ndarray]:
    """Winding numbers and distances to nearby edges for plane points (n, 2).

    Distances are exact up to boundary_tol and may be overestimated (or inf)
    beyond it; use distance_to_boundary for exact far distances.
    """
    return L._index.query(np.atleast_2d(np.asarray(uv, dtype=float)))


def classify_uv(L: HullPolygon, uv) -> tuple[np.ndarray, np.ndarray]:
    """Membership codes and near-edge distances for plane points (n, 2)."""
    winding, dist = locate_uv(L, uv)
    codes = np.where(winding != 0, INSIDE, OUTSIDE)
    codes = np.where(dist <= L.boundary_tol, BOUNDARY, codes)
    return codes, dist


def classify_spectra(L: HullPolygon, m) -> np.ndarray:
    """Membership codes for eigenvalue triples (n, 3); each row is sorted first."""
    m = np.sort(np.atleast_2d(np.asarray(m, dtype=float)), axis=-1)
    codes, _ = classify_uv(L, embed_triple(m))
    return codes


def distance_to_boundary(L: HullPolygon, uv) -> np.ndarray:
    """Exact distance from each point to the polyline (brute force over all edges)."""
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    a, b = L.edges
    out = np.empty(len(uv))
    step = max(1, 2_000_000 // len(a))
    for i in range(0, len(uv), step):
        _, out[i:i + step] = _winding_and_distance(uv[i:i + step], a, b)
    return out


def contains(L: HullPolygon, sp) -> Membership:
    """Inside / Boundary / Outside for a spectrum (any ordering of its entries)."""
    m = sp.as_array() if isinstance(sp, Spectrum3) else np.asarray(sp, dtype=float)
    return Membership.from_code(classify_spectra(L, m[None, :])[0])


def is_simple(L: HullPolygon, chunk: int = 512) -> bool:
    """True when no two non-adjacent edges intersect."""
    a, b = L.edges
    n = len(a)
    idx = np.arange(n)
    for i0 in range(0, n, chunk):
        i = idx[i0:i0 + chunk]
        p, r = a[i][:, None, :], (b[i] - a[i])[:, None, :]
        q, s = a[None, :, :], (b - a)[None, :, :]
        rxs = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
        qp = q - p
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / rxs
            u = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / rxs
        hit = (rxs != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        gap = np.abs(i[:, None] - idx[None, :])
        adjacent = (gap <= 1) | (gap == n - 1)
        if np.any(hit & ~adjacent):
            return False
    return True
