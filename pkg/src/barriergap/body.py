"""The one-parameter family of 3D bodies P(nu).

P(nu) is the set of normalized derivative triples (x1, x2, x3) with

    sqrt(x2 - x1^2) / sqrt(nu-1) <= 1 + x1 <= sqrt(nu-1) sqrt(x2 - x1^2)
    sqrt(x2 - x1^2) / sqrt(nu-1) <= 1 - x1 <= sqrt(nu-1) sqrt(x2 - x1^2)
    |x3 - 6 x2 x1 + 4 x1^3|      <= 2 gamma (x2 - x1^2)^(3/2)

Its (x1, x2) projection is a lens bounded by four parabolic arcs, pinched
at the corners (+-(nu-2)/nu, 1); over each projection point the body is a
vertical slab.  P(2) degenerates to the single point (0, 1, 0), and the
family is nested: P(nu) is contained in P(nu') for nu <= nu'.

Scalar predicates have vectorized *_mask companions operating on numpy
arrays; bulk tests and the sampler use those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .calculus import MEMBERSHIP_TOL, gamma_of_nu, _check_nu
from .errors import DomainError, RegionError


class BodyPoint(NamedTuple):
    x1: float
    x2: float
    x3: float


class Slab(NamedTuple):
    """Vertical extent of P(nu) over a projection point (x1, x2)."""

    x1: float
    x2: float
    center: float
    halfwidth: float
    lo: float
    hi: float


def _clamped_gsq(x1, x2):
    """x2 - x1^2 with values in [-MEMBERSHIP_TOL, 0] snapped to 0.

    Keeps lower-arc boundary points from raising spurious domain errors in
    the radicand.
    """
    gsq = x2 - x1 * x1
    return np.where((gsq < 0.0) & (gsq >= -MEMBERSHIP_TOL), 0.0, gsq)


def region_mask(nu: float, x1, x2) -> np.ndarray:
    """Vectorized membership test for the planar feasible region."""
    nu = _check_nu(nu)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = math.sqrt(nu - 1.0)
    tol = MEMBERSHIP_TOL
    gsq = _clamped_gsq(x1, x2)
    ok = gsq >= 0.0
    g = np.sqrt(np.where(ok, gsq, 0.0))
    for mid in (1.0 + x1, 1.0 - x1):
        ok &= (mid >= g / s - tol) & (mid <= s * g + tol)
    return ok


def region_contains(nu: float, x1: float, x2: float) -> bool:
    """True iff (x1, x2) lies in the projection of P(nu), at MEMBERSHIP_TOL."""
    return bool(region_mask(nu, x1, x2))


def slab_bounds(nu: float, x1, x2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (lo, hi) of the x3 slab; caller guarantees region membership."""
    nu = _check_nu(nu)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    gamma = gamma_of_nu(nu)
    gsq = np.maximum(_clamped_gsq(x1, x2), 0.0)
    center = 6.0 * x2 * x1 - 4.0 * x1**3
    half = 2.0 * gamma * gsq**1.5
    return center - half, center + half


def x3_slab(nu: float, x1: float, x2: float) -> Slab:
    """The x3 slab of P(nu) over (x1, x2).

    center = 6 x2 x1 - 4 x1^3, halfwidth = 2 gamma (x2 - x1^2)^(3/2).
    Raises RegionError outside the projection.
    """
    if not region_contains(nu, x1, x2):
        raise RegionError(f"({x1}, {x2}) is outside the region of P({nu})")
    lo, hi = slab_bounds(nu, x1, x2)
    center = 0.5 * (float(lo) + float(hi))
    half = 0.5 * (float(hi) - float(lo))
    return Slab(float(x1), float(x2), center, half, float(lo), float(hi))


def contains_mask(nu: float, pts) -> np.ndarray:
    """Vectorized membership of (n, 3) points in P(nu)."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    x1, x2, x3 = pts[:, 0], pts[:, 1], pts[:, 2]
    mask = region_mask(nu, x1, x2)
    lo, hi = slab_bounds(nu, x1, x2)
    return mask & (x3 >= lo - MEMBERSHIP_TOL) & (x3 <= hi + MEMBERSHIP_TOL)


def contains(nu: float, pt) -> bool:
    """True iff the point lies in P(nu), boundary included at MEMBERSHIP_TOL."""
    return bool(contains_mask(nu, np.asarray(pt, dtype=float))[0])


@dataclass(frozen=True)
class Arc:
    """One parabolic boundary arc: x2 = x1^2 + coeff * (1 - sign*x1)^2.

    orientation 'upper' arcs carry coeff = nu-1, 'lower' arcs 1/(nu-1);
    side names the half of the region (by sign of x1) the arc bounds.
    """

    orientation: str
    side: str
    coeff: float
    sign: int

    def value(self, x1):
        return np.asarray(x1) ** 2 + self.coeff * (1.0 - self.sign * np.asarray(x1)) ** 2


@dataclass(frozen=True)
class FeasibleRegion:
    """The (x1, x2) projection of P(nu) with its bounding arcs and corners."""

    nu: float
    arcs: tuple[Arc, Arc, Arc, Arc]
    x1_extent: tuple[float, float]
    corners: tuple[tuple[float, float], ...]

    def upper_boundary(self, x1):
        x1 = np.asarray(x1, dtype=float)
        return x1**2 + (self.nu - 1.0) * (1.0 - np.abs(x1)) ** 2

    def lower_boundary(self, x1):
        x1 = np.asarray(x1, dtype=float)
        return x1**2 + (1.0 + np.abs(x1)) ** 2 / (self.nu - 1.0)


def feasible_region(nu: float) -> FeasibleRegion:
    """Arc records, x1 extent and corners of the projection of P(nu)."""
    nu = _check_nu(nu)
    e = (nu - 2.0) / nu
    arcs = (
        Arc("upper", "right", nu - 1.0, +1),
        Arc("upper", "left", nu - 1.0, -1),
        Arc("lower", "right", 1.0 / (nu - 1.0), -1),
        Arc("lower", "left", 1.0 / (nu - 1.0), +1),
    )
    corners = ((0.0, nu - 1.0), (0.0, 1.0 / (nu - 1.0)), (-e, 1.0), (e, 1.0))
    return FeasibleRegion(nu, arcs, (-e, e), corners)


@dataclass(frozen=True)
class Grid2D:
    """Origin-anchored square lattice in the (x1, x2) plane.

    The anchor guarantees the x1 = 0 column is always present, matching
    the region's reflection symmetry.  ``bounds`` is the bounding box
    (x1min, x1max, x2min, x2max) the lattice was clipped to; the sampler
    fills it in from the region.
    """

    step: float
    bounds: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if not self.step > 0.0:
            raise DomainError(f"grid step must be positive, got {self.step}")

    def axis_values(self, lo: float, hi: float) -> np.ndarray:
        """Lattice values k*step inside [lo, hi] (1e-12 slack at the ends)."""
        kmin = math.ceil(lo / self.step - 1e-12)
        kmax = math.floor(hi / self.step + 1e-12)
        return np.arange(kmin, kmax + 1, dtype=float) * self.step


@dataclass(frozen=True)
class SurfaceSample:
    """Sampled surface of P(nu): sheet points on the lattice plus
    boundary-clipped arc points, in deterministic emission order."""

    nu: float
    grid: Grid2D
    xyz: np.ndarray
    sheet: np.ndarray  # 'lo' | 'hi' | 'boundary', parallel to xyz rows
    degenerate: bool = False

    def points(self) -> Iterable[BodyPoint]:
        for row in self.xyz:
            yield BodyPoint(*row)


def _boundary_columns(nu: float, region: FeasibleRegion, x1s: np.ndarray):
    """(x1, x2) pairs where lattice columns meet the lower and upper arcs."""
    e = region.x1_extent[1]
    cols = x1s[np.abs(x1s) <= e + 1e-15]
    out = []
    for x1 in cols:
        lo_b = float(region.lower_boundary(x1))
        hi_b = float(region.upper_boundary(x1))
        out.append((float(x1), lo_b))
        if hi_b > lo_b:
            out.append((float(x1), hi_b))
    return out


def _row_crossing(nu: float, x2: float) -> float:
    """Positive x1 where the horizontal line at x2 exits the region."""
    if x2 >= 1.0:
        rad = max(nu * x2 - nu + 1.0, 0.0)
        return ((nu - 1.0) - math.sqrt(rad)) / nu
    rad = max(nu * (nu - 1.0) * x2 - (nu - 1.0), 0.0)
    return (math.sqrt(rad) - 1.0) / nu


def sample_surface(nu: float, grid: Grid2D) -> SurfaceSample:
    """Sample both sheets of P(nu) on the lattice, plus boundary points.

    Lattice nodes inside the region contribute (x1, x2, lo) and
    (x1, x2, hi).  Every lattice column and row that crosses a boundary
    arc contributes the clipped crossing point with its slab endpoints,
    and the four region corners are always included; without those the
    hull would systematically under-approximate near the arcs.

    For nu = 2 the body is the single point (0, 1, 0), returned with the
    degenerate flag set.
    """
    nu = _check_nu(nu)
    if nu == 2.0:
        g = Grid2D(grid.step, (0.0, 0.0, 1.0, 1.0))
        xyz = np.array([[0.0, 1.0, 0.0]])
        return SurfaceSample(nu, g, xyz, np.array(["boundary"]), degenerate=True)

    region = feasible_region(nu)
    e = region.x1_extent[1]
    x2_min, x2_max = 1.0 / (nu - 1.0), nu - 1.0
    g = Grid2D(grid.step, (-e, e, x2_min, x2_max))

    x1s = g.axis_values(-e, e)
    x2s = g.axis_values(x2_min, x2_max)

    rows: list[tuple[float, float]] = []
    if x1s.size and x2s.size:
        X1, X2 = np.meshgrid(x1s, x2s)  # row index = x2, col index = x1
        mask = region_mask(nu, X1, X2)
        rows = list(zip(X1[mask].tolist(), X2[mask].tolist()))

    boundary: list[tuple[float, float]] = []
    boundary.extend(_boundary_columns(nu, region, x1s))
    for x2 in x2s:
        xr = _row_crossing(nu, float(x2))
        xr = max(xr, 0.0)
        boundary.append((-xr, float(x2)))
        boundary.append((xr, float(x2)))
    boundary.extend((c[0], c[1]) for c in region.corners)

    n_sheet = len(rows)
    xy = np.array(rows + boundary, dtype=float).reshape(-1, 2)
    lo, hi = slab_bounds(nu, xy[:, 0], xy[:, 1])

    # Sheet points interleave lo/hi per node (row-major); boundary points
    # follow, also as lo/hi pairs.
    total = 2 * xy.shape[0]
    xyz = np.empty((total, 3))
    xyz[0::2, 0:2] = xy
    xyz[1::2, 0:2] = xy
    xyz[0::2, 2] = lo
    xyz[1::2, 2] = hi
    sheet = np.empty(total, dtype=object)
    sheet[0 : 2 * n_sheet : 2] = "lo"
    sheet[1 : 2 * n_sheet : 2] = "hi"
    sheet[2 * n_sheet :] = "boundary"
    return SurfaceSample(nu, g, xyz, sheet)


def nesting_check(nu_lo: float, nu_hi: float, pts) -> bool:
    """True iff every given point of P(nu_lo) also lies in P(nu_hi).

    Validates the monotone nesting that justifies bisection over nu.
    """
    nu_lo = _check_nu(nu_lo)
    nu_hi = _check_nu(nu_hi)
    if nu_hi < nu_lo:
        raise DomainError(f"need nu_lo <= nu_hi, got {nu_lo} > {nu_hi}")
    pts = np.asarray(pts, dtype=float)
    if pts.size == 0:
        return True
    if pts.ndim == 1:
        pts = pts[None, :]
    inside_lo = contains_mask(nu_lo, pts)
    inside_hi = contains_mask(nu_hi, pts)
    return bool(np.all(inside_hi[inside_lo]))
