"""One-dimensional self-concordance calculus on the interval (-1, 1).

Everything downstream reduces to scalar data: the first three derivatives
(p, h, w) of a candidate function at a point x, the parameter map
gamma = (nu - 2) / sqrt(nu - 1), and a point-independent normalization
(p, h, w) -> (x1, x2, x3) that turns admissibility into membership of a
fixed 3D body (module ``body``).  The extremal envelopes p_minus/p_plus
bound the derivative of any admissible function between two nearby points;
``admissibility_report`` combines both families of conditions into a
certification check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import CurvatureError, DomainError, EnvelopeBlowupError

# Absolute slack applied to every scalar inequality; the sets are closed,
# so boundary data must test as feasible.
MEMBERSHIP_TOL = 1e-9

# Central finite differences; balances truncation against rounding for the
# magnitudes that occur on (-1, 1).
DEFAULT_FD_STEP = 1e-4


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not nu >= 2.0:
        raise DomainError(f"parameter nu must be >= 2, got {nu}")
    return nu


def _check_x(x: float) -> float:
    x = float(x)
    if not abs(x) < 1.0:
        raise DomainError(f"point must lie in (-1, 1), got {x}")
    return x


def gamma_of_nu(nu: float) -> float:
    """Map the barrier parameter to gamma = (nu - 2) / sqrt(nu - 1).

    Strictly increasing on [2, inf), with gamma(2) = 0.
    """
    nu = _check_nu(nu)
    return (nu - 2.0) / math.sqrt(nu - 1.0)


def nu_of_gamma(g: float) -> float:
    """Inverse of :func:`gamma_of_nu`.

    Solving g = (nu-2)/sqrt(nu-1) for s = sqrt(nu-1) gives the quadratic
    s^2 - g*s - 1 = 0, whose positive root yields nu = 1 + s^2.
    """
    g = float(g)
    if not g >= 0.0:
        raise DomainError(f"gamma must be >= 0, got {g}")
    s = 0.5 * (g + math.sqrt(g * g + 4.0))
    return 1.0 + s * s


class DerivativeTriple(NamedTuple):
    """Raw derivative data (f', f'', f''') of a candidate function at x."""

    x: float
    p: float
    h: float
    w: float


class NormalizedTriple(NamedTuple):
    """Point-independent image of a derivative triple; a point of R^3."""

    x1: float
    x2: float
    x3: float


def normalize_triple(t: DerivativeTriple) -> NormalizedTriple:
    """Apply the normalizing change of variables at x = t.x.

    x1 = (1-x^2) p - x
    x2 = (1-x^2)^2 h - 2x (1-x^2) p + x^2
    x3 = (1-x^2)^3 w - 6x (1-x^2)^2 h + 6x^2 (1-x^2) p - 2x^3

    The image of an admissible triple lands in the body P(nu) regardless
    of which x it was taken at.
    """
    x, p, h, w = t
    x = _check_x(x)
    q = 1.0 - x * x
    x1 = q * p - x
    x2 = q * q * h - 2.0 * x * q * p + x * x
    x3 = q**3 * w - 6.0 * x * q * q * h + 6.0 * x * x * q * p - 2.0 * x**3
    return NormalizedTriple(x1, x2, x3)


def normalization_residuals(t: DerivativeTriple) -> tuple[float, float]:
    """Both sides of the two algebraic identities behind the normalization.

    Returns (x2 - x1^2) - (1-x^2)^2 (h - p^2) and
    (x3 - 6 x2 x1 + 4 x1^3) - (1-x^2)^3 (w - 6 h p + 4 p^3); both vanish
    identically up to rounding.
    """
    x, p, h, w = t
    x1, x2, x3 = normalize_triple(t)
    q = 1.0 - x * x
    first = (x2 - x1 * x1) - q * q * (h - p * p)
    second = (x3 - 6.0 * x2 * x1 + 4.0 * x1**3) - q**3 * (w - 6.0 * h * p + 4.0 * p**3)
    return first, second


def pointwise_feasible(nu: float, x: float, p: float, h: float) -> bool:
    """Single-point necessary conditions on (f'(x), f''(x)).

    With g = sqrt(h - p^2), both chains must hold (inclusive at
    MEMBERSHIP_TOL):

        g / sqrt(nu-1) <= p + 1/(1+x) <= sqrt(nu-1) * g
        g / sqrt(nu-1) <= -p + 1/(1-x) <= sqrt(nu-1) * g
    """
    nu = _check_nu(nu)
    x = _check_x(x)
    gsq = h - p * p
    if not gsq > 0.0:
        raise CurvatureError(f"h - p^2 must be positive, got {gsq}")
    g = math.sqrt(gsq)
    s = math.sqrt(nu - 1.0)
    tol = MEMBERSHIP_TOL
    for mid in (p + 1.0 / (1.0 + x), -p + 1.0 / (1.0 - x)):
        if mid < g / s - tol or mid > s * g + tol:
            return False
    return True


def p_range_bounds(nu: float, x: float) -> tuple[float, float]:
    """Interval that must contain f'(x) for any admissible f.

    Obtained by playing the two chains of :func:`pointwise_feasible`
    against each other and resolving with respect to p.
    """
    nu = _check_nu(nu)
    x = _check_x(x)
    lo = (1.0 / (1.0 - x)) / nu - (nu - 1.0) / nu / (1.0 + x)
    hi = (nu - 1.0) / nu / (1.0 - x) - (1.0 / (1.0 + x)) / nu
    return lo, hi


def f_range_bounds(nu: float, x: float) -> tuple[float, float]:
    """Integrated form of :func:`p_range_bounds`, anchored at f(0) = 0.

    The lower bound tends to +inf as |x| -> 1 at a logarithmic rate, which
    is what forces the barrier property.
    """
    nu = _check_nu(nu)
    x = _check_x(x)
    a = abs(x)
    w_hi = (nu - 1.0) / nu
    w_lo = 1.0 / nu
    lo = -w_hi * math.log1p(a) - w_lo * math.log1p(-a)
    hi = -w_hi * math.log1p(-a) - w_lo * math.log1p(a)
    return lo, hi


@dataclass(frozen=True)
class EnvelopeInitialData:
    """Initial values (p0, h0) at x0, plus gamma, for the extremal envelopes."""

    x0: float
    p0: float
    h0: float
    gamma: float

    def __post_init__(self):
        _check_x(self.x0)
        if not self.gamma >= 0.0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not self.h0 - self.p0 * self.p0 > 0.0:
            raise CurvatureError(
                f"h0 - p0^2 must be positive, got {self.h0 - self.p0 * self.p0}"
            )

    @property
    def g0(self) -> float:
        return math.sqrt(self.h0 - self.p0 * self.p0)


def _envelope_num_den(side: str, init: EnvelopeInitialData, x: float) -> tuple[float, float]:
    if side not in ("plus", "minus"):
        raise DomainError(f"side must be 'plus' or 'minus', got {side!r}")
    sign = 1.0 if side == "plus" else -1.0
    u = x - init.x0
    p0, g0, gamma = init.p0, init.g0, init.gamma
    num = p0 + u * (g0 * g0 - p0 * p0 - sign * gamma * g0 * p0)
    den = (
        -g0 * g0 * u * u
        + (p0 * u - 1.0) ** 2
        + sign * gamma * g0 * u * (p0 * u - 1.0)
    )
    return num, den


def envelope_p(side: str, init: EnvelopeInitialData, x: float) -> float:
    """Closed-form extremal envelope p_plus or p_minus evaluated at x.

    Both branches pass through (x0, p0) with slope h0; between them lies
    the derivative of every admissible function agreeing with the initial
    data, wherever the branch is defined.  A vanishing denominator means
    the solution left its domain of definition; that raises
    EnvelopeBlowupError rather than returning a wild value.
    """
    x = _check_x(x)
    num, den = _envelope_num_den(side, init, x)
    if den <= 1e-12 * max(1.0, abs(num)):
        raise EnvelopeBlowupError(
            f"envelope p_{side} from x0={init.x0} undefined at x={x} (denominator {den:.3e})"
        )
    return num / den


def envelope_ode_residual(
    side: str, init: EnvelopeInitialData, x: float, fd_step: float = DEFAULT_FD_STEP
) -> float:
    """Finite-difference residual of the extremal ODE at x.

    Checks p'' = 6 p' p - 4 p^3 +/- 2 gamma (p' - p^2)^(3/2) with central
    differences for p' and p''; the magnitude is O(fd_step^2) when the
    closed form is exact.
    """
    if fd_step <= 0.0:
        raise DomainError(f"fd_step must be positive, got {fd_step}")
    pm = envelope_p(side, init, x - fd_step)
    pc = envelope_p(side, init, x)
    pp = envelope_p(side, init, x + fd_step)
    d1 = (pp - pm) / (2.0 * fd_step)
    d2 = (pp - 2.0 * pc + pm) / (fd_step * fd_step)
    sign = 1.0 if side == "plus" else -1.0
    # d1 - pc^2 can dip below zero by fd noise only next to a degenerate
    # envelope; clamp so the 3/2 power stays real.
    radicand = max(d1 - pc * pc, 0.0)
    rhs = 6.0 * d1 * pc - 4.0 * pc**3 + sign * 2.0 * init.gamma * radicand**1.5
    return d2 - rhs


def hilbert_distance(x: float, y: float) -> float:
    """Hilbert metric of the interval (-1, 1): |log of the cross ratio|.

    Convention: no 1/2 factor in front of the logarithm.  Symmetric, zero
    iff x == y, and additive along the interval.
    """
    x = _check_x(x)
    y = _check_x(y)
    return abs(math.log(((1.0 - x) * (1.0 + y)) / ((1.0 + x) * (1.0 - y))))


@dataclass(frozen=True)
class BarrierOracle:
    """Analytic derivative oracle for a candidate barrier on (-1, 1).

    ``derivatives(x)`` must return (f'(x), f''(x), f'''(x)); evaluation is
    expected to be deterministic and total on the points it is queried at.
    Numerical differentiation of sampled values is deliberately not
    offered: a verdict should be attributable to the function, not to
    differencing noise.
    """

    name: str
    derivatives: Callable[[float], tuple[float, float, float]]

    def __call__(self, x: float) -> DerivativeTriple:
        p, h, w = self.derivatives(float(x))
        return DerivativeTriple(float(x), float(p), float(h), float(w))


def symmetric_log_barrier() -> BarrierOracle:
    """f(x) = -1/2 log(1 - x^2); the unique nu = 2 barrier of the interval."""

    def derivs(x: float) -> tuple[float, float, float]:
        q = 1.0 - x * x
        return x / q, (1.0 + x * x) / q**2, (6.0 * x + 2.0 * x**3) / q**3

    return BarrierOracle("symmetric-log", derivs)


def weighted_log_barrier(nu: float) -> BarrierOracle:
    """f(x) = -((nu-1)/nu) log(1-x) - (1/nu) log(1+x).

    Admissible exactly for parameters >= nu; its normalized triple is the
    constant point ((nu-2)/nu, 1, lower slab face).
    """
    nu = _check_nu(nu)
    a = (nu - 1.0) / nu
    b = 1.0 / nu

    def derivs(x: float) -> tuple[float, float, float]:
        r = 1.0 - x
        s = 1.0 + x
        return a / r - b / s, a / r**2 + b / s**2, 2.0 * a / r**3 - 2.0 * b / s**3

    return BarrierOracle(f"weighted-log(nu={nu:g})", derivs)


class Violation(NamedTuple):
    """One failed admissibility condition.

    ``x0`` is None for single-point conditions and names the envelope
    anchor for pairwise ones.  ``residual`` is the (positive) amount by
    which the condition failed.
    """

    x0: float | None
    x: float
    condition: str
    residual: float


def admissibility_report(
    oracle: BarrierOracle,
    nu: float,
    grid: list[float],
    eps: float,
) -> list[Violation]:
    """Certify a candidate barrier on a grid, at parameter nu.

    Per grid point: normalize the oracle's derivative triple and test
    membership in the body P(nu).  Per ordered grid pair (x0, x) within
    Hilbert distance eps: test the envelope bounds
    p_minus(x) <= f'(x) <= p_plus(x) with initial data taken at x0.
    Pairs whose envelope is undefined at x impose no constraint.

    Returns the violations in deterministic grid order; an empty list
    means no violation was found.
    """
    from .body import contains  # local import; body depends on this module

    nu = _check_nu(nu)
    if len(grid) == 0:
        raise DomainError("grid must be nonempty")
    gx = [_check_x(x) for x in grid]
    if any(b <= a for a, b in zip(gx, gx[1:])):
        raise DomainError("grid must be strictly increasing")
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}")

    gamma = gamma_of_nu(nu)
    tol = MEMBERSHIP_TOL
    violations: list[Violation] = []

    triples = [oracle(x) for x in gx]
    curved = [t.h - t.p * t.p > 0.0 for t in triples]

    for t, ok in zip(triples, curved):
        if not ok:
            violations.append(
                Violation(None, t.x, "curvature h - p^2 > 0", t.p * t.p - t.h)
            )
            continue
        pt = normalize_triple(t)
        if not contains(nu, pt):
            # Residual: worst slack over the six scalar membership
            # inequalities at the normalized point.
            violations.append(
                Violation(None, t.x, "membership in P(nu)", _membership_deficit(nu, pt))
            )

    for i, ti in enumerate(triples):
        if not curved[i]:
            continue
        init = EnvelopeInitialData(ti.x, ti.p, ti.h, gamma)
        for j, tj in enumerate(triples):
            if i == j or hilbert_distance(ti.x, tj.x) > eps:
                continue
            try:
                lo = envelope_p("minus", init, tj.x)
                hi = envelope_p("plus", init, tj.x)
            except EnvelopeBlowupError:
                continue
            if tj.p < lo - tol:
                violations.append(
                    Violation(ti.x, tj.x, "envelope lower bound p_minus <= f'", lo - tj.p)
                )
            if tj.p > hi + tol:
                violations.append(
                    Violation(ti.x, tj.x, "envelope upper bound f' <= p_plus", tj.p - hi)
                )
    return violations


def _membership_deficit(nu: float, pt) -> float:
    """Largest violated margin over the scalar inequalities defining P(nu)."""
    x1, x2, x3 = pt
    s = math.sqrt(nu - 1.0)
    gsq = x2 - x1 * x1
    if gsq < 0.0:
        return -gsq
    g = math.sqrt(gsq)
    worst = 0.0
    for m in (1.0 + x1, 1.0 - x1):
        worst = max(worst, g / s - m, m - s * g)
    center = 6.0 * x2 * x1 - 4.0 * x1**3
    half = 2.0 * gamma_of_nu(nu) * gsq**1.5
    worst = max(worst, abs(x3 - center) - half)
    return worst
