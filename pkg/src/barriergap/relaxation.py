"""Minimal enclosing parameter of the convex hull of P(nu).

For a given nu the body is sampled, its convex hull built, and for every
lattice node under the hull's shadow the least parameter whose body slab
swallows the hull slab is found by bisection (the containment predicate
is monotone in the parameter because the family is nested).  The maximum
over nodes estimates nu_tilde(nu); sweeping nu yields the degradation
curve, which is floored by the closed-form bound nu^2/8 + nu/2 + 1/2
coming from the chord of the concave projection arc.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .body import Grid2D, sample_surface
from .calculus import MEMBERSHIP_TOL, _check_nu
from .errors import CapExceededError, DomainError
from .hull import HullMesh, HullSlab, convex_hull_3d, hull_slab, hull_slab_many

__all__ = [
    "analytic_lower_bound",
    "tangency_certificate",
    "nu_tilde_at",
    "nu_tilde",
    "sweep",
    "convergence_study",
    "NuTildeCurve",
    "ConvergenceReport",
    "HullMesh",
    "HullSlab",
    "convex_hull_3d",
    "hull_slab",
    "hull_slab_many",
]

# Bisection bracket cap: gamma grows without bound, so every finite slab
# is eventually contained; 64 is a generous ceiling with a typed error.
DEFAULT_NU_CAP = 64.0
DEFAULT_TOL = 1e-6


def analytic_lower_bound(nu: float) -> float:
    """Closed-form floor of the degradation: nu^2/8 + nu/2 + 1/2.

    The chord x2 = -nu x1 + nu - 1 closing the concave projection arc is
    tangent to the corresponding arc of exactly this larger parameter.
    """
    nu = _check_nu(nu)
    return nu * nu / 8.0 + nu / 2.0 + 0.5


def tangency_certificate(nu: float) -> float:
    """Discriminant certifying the chord/arc tangency; identically zero.

    Substituting the chord into the arc of parameter nu' gives
    nu' x1^2 + (nu - 2 nu' + 2) x1 + (nu' - nu) = 0; at
    nu' = analytic_lower_bound(nu) its discriminant vanishes.
    """
    nu = _check_nu(nu)
    nup = analytic_lower_bound(nu)
    b = nu - 2.0 * nup + 2.0
    return b * b - 4.0 * nup * (nup - nu)


def _containment_mask(nu, x1, x2, lo, hi) -> np.ndarray:
    """Does the body slab of parameter nu at (x1, x2) contain [lo, hi]?

    All arguments broadcast; nu may vary per node.  Mirrors the region
    and slab algebra of :mod:`barriergap.body` for array-valued nu.
    """
    nu = np.asarray(nu, dtype=float)
    tol = MEMBERSHIP_TOL
    s = np.sqrt(nu - 1.0)
    gamma = (nu - 2.0) / s
    gsq = x2 - x1 * x1
    gsq = np.where((gsq < 0.0) & (gsq >= -tol), 0.0, gsq)
    ok = gsq >= 0.0
    g = np.sqrt(np.where(ok, gsq, 0.0))
    for mid in (1.0 + x1, 1.0 - x1):
        ok &= (mid >= g / s - tol) & (mid <= s * g + tol)
    center = 6.0 * x2 * x1 - 4.0 * x1**3
    half = 2.0 * gamma * g**3
    ok &= (center - half <= lo + tol) & (hi <= center + half + tol)
    return ok


def _bisect_containment(
    x1: np.ndarray,
    x2: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    nu_floor: float,
    nu_cap: float,
    tol: float,
) -> np.ndarray:
    """Per-node least parameter whose slab contains [lo, hi], by bisection."""
    n = x1.size
    lo_nu = np.full(n, nu_floor)
    hi_nu = np.full(n, nu_cap)
    at_floor = _containment_mask(nu_floor, x1, x2, lo, hi)
    need = ~at_floor
    if need.any():
        ok_cap = _containment_mask(nu_cap, x1[need], x2[need], lo[need], hi[need])
        if not ok_cap.all():
            bad = np.flatnonzero(need)[~ok_cap][0]
            raise CapExceededError(
                f"slab at ({x1[bad]}, {x2[bad]}) not contained at nu = {nu_cap}"
            )
    steps = max(1, math.ceil(math.log2((nu_cap - nu_floor) / tol)))
    for _ in range(steps):
        mid = 0.5 * (lo_nu + hi_nu)
        ok = _containment_mask(mid, x1, x2, lo, hi)
        hi_nu = np.where(ok, mid, hi_nu)
        lo_nu = np.where(ok, lo_nu, mid)
    return np.where(at_floor, nu_floor, hi_nu)


def nu_tilde_at(
    slab: HullSlab,
    nu_floor: float,
    nu_cap: float = DEFAULT_NU_CAP,
    tol: float = DEFAULT_TOL,
) -> float:
    """Least parameter >= nu_floor whose body contains the given hull slab.

    Requires the projection point to be in the region of the answer and
    the body slab there to cover [slab.lo, slab.hi]; both relax
    monotonically in the parameter, so bisection applies.
    """
    if slab.empty:
        raise DomainError("cannot bound an empty hull slab")
    nu_floor = _check_nu(nu_floor)
    if not nu_cap > nu_floor:
        raise DomainError(f"need nu_cap > nu_floor, got {nu_cap} <= {nu_floor}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    out = _bisect_containment(
        np.array([slab.x1]),
        np.array([slab.x2]),
        np.array([slab.lo]),
        np.array([slab.hi]),
        nu_floor,
        nu_cap,
        tol,
    )
    return float(out[0])


def nu_tilde(
    nu: float,
    step: float,
    tol: float = DEFAULT_TOL,
    nu_cap: float = DEFAULT_NU_CAP,
) -> tuple[float, tuple[float, float]]:
    """Estimate of the minimal enclosing parameter for conv P(nu).

    Samples the body, builds the hull, takes hull slabs on every lattice
    node under the hull's shadow (that includes the nodes between the
    concave arcs and their chords) and returns the largest pointwise
    parameter together with its argmax node.  nu = 2 is exact: the body
    is a point and equals its hull.
    """
    nu = _check_nu(nu)
    if nu == 2.0:
        return 2.0, (0.0, 1.0)
    grid = Grid2D(step)
    sample = sample_surface(nu, grid)
    # The hull is inscribed on the lattice sheet points alone: the grid
    # refinement study measures exactly this inscription error, and the
    # arc-clipped extras would freeze the hull's extreme structure across
    # steps.  Tiny regions at coarse steps can leave the lattice cloud
    # rank-deficient; only then is the boundary-augmented cloud used.
    lattice = sample.xyz[sample.sheet != "boundary"]
    mesh = None
    if lattice.shape[0] >= 4:
        mesh = convex_hull_3d(lattice)
    if mesh is None or mesh.degenerate:
        mesh = convex_hull_3d(sample.xyz)
    if mesh.degenerate:
        raise DomainError(f"hull of P({nu}) is rank-deficient at step {step}")

    x1_lo, x2_lo = mesh.vertices[:, 0].min(), mesh.vertices[:, 1].min()
    x1_hi, x2_hi = mesh.vertices[:, 0].max(), mesh.vertices[:, 1].max()
    x1v = grid.axis_values(x1_lo, x1_hi)
    x2v = grid.axis_values(x2_lo, x2_hi)
    X1, X2 = np.meshgrid(x1v, x2v)  # row-major in x2, then x1
    q1, q2 = X1.ravel(), X2.ravel()
    lo, hi, empty = hull_slab_many(mesh, q1, q2)
    inside = ~empty
    if not inside.any():
        return nu, (0.0, 1.0)
    q1, q2, lo, hi = q1[inside], q2[inside], lo[inside], hi[inside]
    vals = _bisect_containment(q1, q2, lo, hi, nu, nu_cap, tol)
    k = int(np.argmax(vals))
    return float(vals[k]), (float(q1[k]), float(q2[k]))


@dataclass(frozen=True)
class NuTildeCurve:
    """Sampled degradation curve nu -> nu_tilde(nu) with provenance."""

    nu_values: np.ndarray
    nu_tilde_values: np.ndarray
    grid_step: float
    tol: float
    argmax_points: tuple[tuple[float, float], ...]
    failures: tuple[tuple[float, str], ...] = ()


def _nu_tilde_task(args) -> tuple[str, float, object]:
    nu, step, tol, nu_cap = args
    try:
        val, argmax = nu_tilde(nu, step, tol=tol, nu_cap=nu_cap)
        return ("ok", val, argmax)
    except CapExceededError as exc:
        return ("cap", math.nan, str(exc))


def sweep(
    nu_min: float,
    nu_max: float,
    count: int,
    step: float,
    tol: float = DEFAULT_TOL,
    nu_cap: float = DEFAULT_NU_CAP,
    workers: int = 1,
    on_cap: str = "raise",
) -> NuTildeCurve:
    """nu_tilde over ``count`` uniformly spaced values in [nu_min, nu_max].

    Endpoints are included.  ``on_cap`` selects what a CapExceededError at
    a single nu does: 'raise' propagates it, 'partial' records a NaN entry
    and the failure message so the caller can flag partial output.
    Results are assembled in nu order regardless of ``workers``.
    """
    _check_nu(nu_min)
    if nu_max < nu_min:
        raise DomainError(f"need nu_min <= nu_max, got {nu_min} > {nu_max}")
    if count < 1 or (count == 1 and nu_max != nu_min):
        raise DomainError("count must be >= 2 for a non-degenerate range")
    if on_cap not in ("raise", "partial"):
        raise DomainError(f"on_cap must be 'raise' or 'partial', got {on_cap!r}")
    nus = np.linspace(nu_min, nu_max, count)
    tasks = [(float(nu), step, tol, nu_cap) for nu in nus]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_nu_tilde_task, tasks))
    else:
        results = [_nu_tilde_task(t) for t in tasks]

    values = np.empty(count)
    argmaxes: list[tuple[float, float]] = []
    failures: list[tuple[float, str]] = []
    for i, (status, val, info) in enumerate(results):
        if status == "cap":
            if on_cap == "raise":
                raise CapExceededError(info)
            values[i] = math.nan
            argmaxes.append((math.nan, math.nan))
            failures.append((float(nus[i]), str(info)))
        else:
            values[i] = val
            argmaxes.append(info)
    return NuTildeCurve(nus, values, step, tol, tuple(argmaxes), tuple(failures))


@dataclass(frozen=True)
class ConvergenceReport:
    """Sweeps at steps s, 2s and 4s with their worst pointwise deviations."""

    base_step: float
    curve_s: NuTildeCurve
    curve_2s: NuTildeCurve
    curve_4s: NuTildeCurve
    delta_2s: float
    delta_4s: float


def convergence_study(
    nu_min: float,
    nu_max: float,
    count: int,
    base_step: float,
    tol: float = DEFAULT_TOL,
    nu_cap: float = DEFAULT_NU_CAP,
    workers: int = 1,
) -> ConvergenceReport:
    """Grid refinement study of the sweep at steps s, 2s and 4s.

    delta_2s and delta_4s are max_i |nu_tilde_coarse(nu_i) - nu_tilde_s(nu_i)|;
    by continuity of the family these deltas gauge the distance of the
    s-grid curve from the zero-step limit.
    """
    curves = {
        k: sweep(nu_min, nu_max, count, k * base_step, tol=tol, nu_cap=nu_cap, workers=workers)
        for k in (1, 2, 4)
    }
    ref = curves[1].nu_tilde_values
    delta_2s = float(np.max(np.abs(curves[2].nu_tilde_values - ref)))
    delta_4s = float(np.max(np.abs(curves[4].nu_tilde_values - ref)))
    return ConvergenceReport(base_step, curves[1], curves[2], curves[4], delta_2s, delta_4s)
