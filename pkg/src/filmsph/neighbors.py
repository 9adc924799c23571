"""Uniform-grid neighbor search with optional periodic axes.

Cells are sized at least as large as the search radius, so scanning the
3x3x3 block of cells around a query point covers the full interaction
sphere.  Particles are grouped per cell in ascending particle id (stable
sort), which pins the accumulation order of SPH sums and keeps repeated
runs bit-for-bit identical.

Membership uses a strict inequality at the search radius (the kernel is
zero there anyway), so a brute-force distance filter reproduces the result
bit for bit.  Periodic axes wrap positions into the box at build time; pair
separations across the seam use the minimum-image convention.  On a periodic axis with
fewer than three cells the block scan deduplicates wrapped cell visits so
no pair is counted twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass
class CellIndex:
    """Immutable snapshot of a binned particle configuration."""

    origin: np.ndarray      # (3,) lower corner of the indexed box [m]
    extent: np.ndarray      # (3,) box edge lengths [m]
    ncells: np.ndarray      # (3,) int64, cells per axis
    cell_size: np.ndarray   # (3,) effective cell edge [m], >= search radius
    periodic: np.ndarray    # (3,) bool
    radius: float           # search radius the grid was sized for [m]
    positions: np.ndarray   # (n, 3) wrapped copy used for distance checks
    cell_start: np.ndarray  # (ntot + 1,) CSR offsets into `order`
    order: np.ndarray       # (n,) particle ids grouped by cell


@njit(cache=True)
def wrap_into_box(pos: np.ndarray, origin: np.ndarray, extent: np.ndarray,
                  periodic: np.ndarray) -> np.ndarray:
    out = pos.copy()
    for ax in range(3):
        if periodic[ax]:
            box = extent[ax]
            lo = origin[ax]
            for i in range(out.shape[0]):
                out[i, ax] = lo + ((out[i, ax] - lo) % box)
    return out


@njit(cache=True)
def minimum_image(delta: np.ndarray, extent: np.ndarray, periodic: np.ndarray) -> np.ndarray:
    out = delta.copy()
    for ax in range(3):
        if periodic[ax]:
            box = extent[ax]
            out[ax] -= box * np.round(out[ax] / box)
    return out


@njit(cache=True)
def _flat_cells(pos: np.ndarray, origin: np.ndarray, cell_size: np.ndarray,
                ncells: np.ndarray, periodic: np.ndarray) -> np.ndarray:
    n = pos.shape[0]
    cids = np.empty(n, np.int64)
    for i in range(n):
        flat = 0
        for ax in range(3):
            c = int(np.floor((pos[i, ax] - origin[ax]) / cell_size[ax]))
            if periodic[ax]:
                c %= ncells[ax]
            else:
                if c < 0:
                    c = 0
                elif c >= ncells[ax]:
                    c = ncells[ax] - 1
            flat = flat * ncells[ax] + c
        cids[i] = flat
    return cids


@njit(cache=True)
def _axis_candidates(x: float, origin: float, cell_size: float, n: int,
                     periodic: bool, out: np.ndarray) -> int:
    """Cell coordinates along one axis overlapping [x - r, x + r]; returns count."""
    c = int(np.floor((x - origin) / cell_size))
    k = 0
    for off in range(-1, 2):
        cc = c + off
        if periodic:
            cc %= n
        elif cc < 0 or cc >= n:
            continue
        dup = False
        for j in range(k):
            if out[j] == cc:
                dup = True
                break
        if not dup:
            out[k] = cc
            k += 1
    return k


@njit(cache=True)
def query_point_core(point: np.ndarray, radius: float, pos: np.ndarray,
                     origin: np.ndarray, cell_size: np.ndarray, ncells: np.ndarray,
                     periodic: np.ndarray, extent: np.ndarray,
                     cell_start: np.ndarray, order: np.ndarray,
                     out_ids: np.ndarray) -> int:
    """Ids strictly within `radius` of `point`, into out_ids; returns count."""
    cx = np.empty(3, np.int64)
    cy = np.empty(3, np.int64)
    cz = np.empty(3, np.int64)
    kx = _axis_candidates(point[0], origin[0], cell_size[0], ncells[0], periodic[0], cx)
    ky = _axis_candidates(point[1], origin[1], cell_size[1], ncells[1], periodic[1], cy)
    kz = _axis_candidates(point[2], origin[2], cell_size[2], ncells[2], periodic[2], cz)
    r2 = radius * radius
    count = 0
    for ix in range(kx):
        for iy in range(ky):
            for iz in range(kz):
                flat = (cx[ix] * ncells[1] + cy[iy]) * ncells[2] + cz[iz]
                for s in range(cell_start[flat], cell_start[flat + 1]):
                    j = order[s]
                    d2 = 0.0
                    for ax in range(3):
                        d = point[ax] - pos[j, ax]
                        if periodic[ax]:
                            box = extent[ax]
                            d -= box * np.round(d / box)
                        d2 += d * d
                    if d2 < r2:
                        out_ids[count] = j
                        count += 1
    return count


def build_cell_index(positions: np.ndarray, radius: float,
                     domain_min, domain_max,
                     periodic=(False, False, False)) -> CellIndex:
    """Bin particles into a uniform grid sized for a given search radius.

    Parameters
    ----------
    positions : ndarray, shape (n, 3)
        Particle positions [m].  On periodic axes they are wrapped into
        the box; on bounded axes, stragglers outside the box land in the
        nearest edge cell and remain findable.
    radius : float
        Search radius the grid must support [m].
    domain_min, domain_max : array_like, shape (3,)
        Box corners.  Each periodic axis uses the box length for wrapping.
    periodic : tuple of bool
        Per-axis periodic flag.

    Returns
    -------
    CellIndex
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise ValueError(f"positions must have shape (n, 3), got {positions.shape}")
    if not np.all(np.isfinite(positions)):
        raise ValueError("positions must be finite")
    if not np.isfinite(radius) or radius <= 0.0:
        raise ValueError(f"search radius must be positive, got {radius}")
    origin = np.asarray(domain_min, dtype=np.float64).copy()
    top = np.asarray(domain_max, dtype=np.float64)
    extent = top - origin
    if np.any(extent <= 0.0):
        raise ValueError("domain_max must exceed domain_min on every axis")
    per = np.asarray(periodic, dtype=np.bool_)
    # floor() keeps every cell edge >= radius; at least one cell per axis
    ncells = np.maximum(np.floor(extent / radius).astype(np.int64), 1)
    cell_size = extent / ncells

    wrapped = wrap_into_box(positions, origin, extent, per)
    cids = _flat_cells(wrapped, origin, cell_size, ncells, per)
    ntot = int(ncells[0] * ncells[1] * ncells[2])
    counts = np.bincount(cids, minlength=ntot)
    cell_start = np.zeros(ntot + 1, dtype=np.int64)
    np.cumsum(counts, out=cell_start[1:])
    order = np.argsort(cids, kind="stable").astype(np.int64)
    return CellIndex(origin=origin, extent=extent, ncells=ncells,
                     cell_size=cell_size, periodic=per, radius=float(radius),
                     positions=wrapped, cell_start=cell_start, order=order)


def query_radius(index: CellIndex, point, radius: float | None = None) -> np.ndarray:
    """Ids of particles strictly within `radius` of `point`, ascending.

    `radius` defaults to the radius the index was built for and must not
    exceed it (the cell grid only guarantees coverage up to that radius).
    """
    r = index.radius if radius is None else float(radius)
    if r > index.radius * (1.0 + 1e-12):
        raise ValueError(f"query radius {r} exceeds index radius {index.radius}")
    point = np.asarray(point, dtype=np.float64)
    out = np.empty(index.positions.shape[0], dtype=np.int64)
    n = query_point_core(point, r, index.positions, index.origin, index.cell_size,
                         index.ncells, index.periodic, index.extent,
                         index.cell_start, index.order, out)
    return np.sort(out[:n])


def neighbors_of(index: CellIndex, i: int, radius: float | None = None) -> np.ndarray:
    """Ids within `radius` of particle `i`, excluding `i` itself, ascending."""
    ids = query_radius(index, index.positions[i], radius)
    return ids[ids != i]


@njit(cache=True)
def _all_neighbors_core(points: np.ndarray, radius: float, exclude_self: bool,
                        pos: np.ndarray, origin: np.ndarray, cell_size: np.ndarray,
                        ncells: np.ndarray, periodic: np.ndarray, extent: np.ndarray,
                        cell_start: np.ndarray, order: np.ndarray):
    n = points.shape[0]
    buf = np.empty(pos.shape[0], np.int64)
    starts = np.zeros(n + 1, np.int64)
    cap = 80 * n + 64
    ids = np.empty(cap, np.int64)
    total = 0
    for i in range(n):
        c = query_point_core(points[i], radius, pos, origin, cell_size, ncells,
                             periodic, extent, cell_start, order, buf)
        if total + c > cap:
            cap = max(2 * cap, total + c)
            grown = np.empty(cap, np.int64)
            grown[:total] = ids[:total]
            ids = grown
        for s in range(c):
            j = buf[s]
            if exclude_self and j == i:
                continue
            ids[total] = j
            total += 1
        starts[i + 1] = total
    return starts, ids[:total].copy()


@njit(cache=True)
def _transpose_core(starts, ids, n_targets):
    tstarts = np.zeros(n_targets + 1, np.int64)
    for k in range(ids.shape[0]):
        tstarts[ids[k] + 1] += 1
    for c in range(n_targets):
        tstarts[c + 1] += tstarts[c]
    fill = tstarts[:-1].copy()
    tids = np.empty(ids.shape[0], np.int64)
    for i in range(starts.shape[0] - 1):
        for k in range(starts[i], starts[i + 1]):
            j = ids[k]
            tids[fill[j]] = i
            fill[j] += 1
    return tstarts, tids


def transpose_neighbors(starts, ids, n_targets: int):
    """Flip CSR neighbor lists: who had j as a neighbor, for each j.

    Given (starts, ids) mapping query points to found ids in 0..n_targets,
    returns (tstarts, tids) mapping each found id to the query points that
    reached it, each list in ascending query order.  Within a strict
    fixed-radius search the relation is symmetric, so this recovers the
    reverse lists at linear cost instead of a second grid search.
    """
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    if starts.ndim != 1 or starts.shape[0] == 0:
        raise ValueError("starts must be a non-empty 1-d offsets array")
    if ids.shape != (int(starts[-1]),):
        raise ValueError("neighbor ids do not match the offsets array")
    if ids.size and (ids.min() < 0 or ids.max() >= n_targets):
        raise ValueError(f"neighbor ids must lie in [0, {n_targets})")
    return _transpose_core(starts, ids, int(n_targets))


def all_neighbors(index: CellIndex, points=None, radius: float | None = None):
    """Neighbor lists for many query points at once, in CSR layout.

    Returns (starts, ids): the neighbors of query point i are
    ids[starts[i]:starts[i + 1]], strictly within `radius`, in no
    particular order.  With `points` omitted the indexed particles query
    themselves and each one is excluded from its own list.
    """
    r = index.radius if radius is None else float(radius)
    if r > index.radius * (1.0 + 1e-12):
        raise ValueError(f"query radius {r} exceeds index radius {index.radius}")
    exclude_self = points is None
    pts = index.positions if points is None else np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"query points must have shape (n, 3), got {pts.shape}")
    return _all_neighbors_core(pts, r, exclude_self, index.positions, index.origin,
                               index.cell_size, index.ncells, index.periodic,
                               index.extent, index.cell_start, index.order)


@dataclass
class TaggedIndex:
    """Cell index over several particle families queried together.

    Rows concatenate the families in sorted kind order; each row keeps its
    (kind, id) tag so query results can be routed back to the owning array.
    """

    kinds: tuple            # sorted kind labels
    kind_code: np.ndarray   # (n,) int64 index into `kinds` per row
    ids: np.ndarray         # (n,) int64 id within the row's family
    grid: CellIndex | None  # None when no particles were indexed
    support_radius: float   # strict search radius [m]


def build_index(tagged_positions: dict, support_radius: float,
                domain_min=None, domain_max=None,
                periodic=(False, False, False)) -> TaggedIndex:
    """Index several particle families for joint neighbor queries.

    Parameters
    ----------
    tagged_positions : dict
        Maps a kind label (e.g. ``"fluid"``, ``"body"``, ``"frontier"``)
        to an (n, 3) position array [m].  Ids are row indices within each
        family.  Empty dicts and empty arrays are allowed.
    support_radius : float
        Strict search radius [m]; cells are sized to cover it.
    domain_min, domain_max : array_like, shape (3,), optional
        Box corners.  Default: data bounds padded by one radius.
    periodic : tuple of bool
        Per-axis periodic flag (requires explicit box corners).

    Returns
    -------
    TaggedIndex
    """
    if not np.isfinite(support_radius) or support_radius <= 0.0:
        raise ValueError(f"support radius must be positive, got {support_radius}")
    kinds = tuple(sorted(tagged_positions.keys()))
    blocks = []
    codes = []
    ids = []
    for code, kind in enumerate(kinds):
        pos = np.ascontiguousarray(tagged_positions[kind], dtype=np.float64)
        if pos.size == 0:
            pos = pos.reshape(0, 3)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions for kind {kind!r} must have shape (n, 3), "
                             f"got {pos.shape}")
        bad = np.nonzero(~np.all(np.isfinite(pos), axis=1))[0]
        if bad.size:
            raise ValueError(f"non-finite position for {kind} particle {int(bad[0])}")
        blocks.append(pos)
        codes.append(np.full(pos.shape[0], code, dtype=np.int64))
        ids.append(np.arange(pos.shape[0], dtype=np.int64))
    n = sum(b.shape[0] for b in blocks)
    if n == 0:
        return TaggedIndex(kinds=kinds, kind_code=np.empty(0, np.int64),
                           ids=np.empty(0, np.int64), grid=None,
                           support_radius=float(support_radius))
    positions = np.vstack(blocks)
    if domain_min is None or domain_max is None:
        if any(periodic):
            raise ValueError("periodic axes require explicit domain corners")
        domain_min = positions.min(axis=0) - support_radius
        domain_max = positions.max(axis=0) + support_radius
    grid = build_cell_index(positions, support_radius, domain_min, domain_max, periodic)
    return TaggedIndex(kinds=kinds, kind_code=np.concatenate(codes),
                       ids=np.concatenate(ids), grid=grid,
                       support_radius=float(support_radius))


def query_neighbors(index: TaggedIndex, center) -> list:
    """All indexed particles strictly within the support radius of `center`.

    Returns a list of ``(kind, id, separation, distance)`` tuples sorted by
    kind then id, where ``separation = center - neighbor_position`` [m]
    (minimum-image on periodic axes).  Exact distance-zero hits are
    dropped, which excludes the query particle itself when `center` is an
    indexed position.
    """
    center = np.asarray(center, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(center)):
        raise ValueError("query center must be finite")
    if index.grid is None:
        return []
    g = index.grid
    out = np.empty(g.positions.shape[0], dtype=np.int64)
    cnt = query_point_core(center, index.support_radius, g.positions, g.origin,
                           g.cell_size, g.ncells, g.periodic, g.extent,
                           g.cell_start, g.order, out)
    rows = out[:cnt]
    if rows.size == 0:
        return []
    delta = center[None, :] - g.positions[rows]
    for ax in range(3):
        if g.periodic[ax]:
            delta[:, ax] -= g.extent[ax] * np.round(delta[:, ax] / g.extent[ax])
    dist = np.sqrt(np.sum(delta ** 2, axis=1))
    keep = dist > 0.0
    rows, delta, dist = rows[keep], delta[keep], dist[keep]
    order = np.lexsort((index.ids[rows], index.kind_code[rows]))
    return [(index.kinds[index.kind_code[rows[s]]], int(index.ids[rows[s]]),
             delta[s], float(dist[s]))
            for s in order]
