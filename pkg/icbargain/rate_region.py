"""
Achievable rate regions of the two-user Gaussian interference channel.

Covers the fixed-split Han-Kobayashi (H-K) polytope, the strong-interference
capacity region (H-K with no private messages), the multiple-access (MAC)
capacity region and the time-division (TDM) region, plus the disagreement
point and the individual rational (IR) efficient frontier of a region.

All powers are linear SNRs (unit noise variance). All rates are in bits per
channel use:
    C(x) = 1/2 * log2(1 + x)

Polytopes are stored as half-planes c1*R1 + c2*R2 <= bound. Their extreme
points are found by intersecting every pair of constraint lines and keeping
the feasible intersections; with at most nine half-planes this is exact.
"""

import itertools
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy.optimize import bisect

from icbargain.errors import DomainError, EmptyFrontierError, PreconditionError
from icbargain.log import logger

# Feasibility and deduplication tolerance for vertices (bits)
TOL = 1e-9

# Bisection tolerance on time fractions; tighter than the 1e-12 the
# frontier inverse needs so that nested solves keep their residuals small
RHO_XTOL = 1e-14

_LN2 = math.log(2.0)


class Regime(StrEnum):
    """Interference regime of a channel."""
    STRONG = "strong"
    WEAK = "weak"
    MIXED = "mixed"


class RegionKind(StrEnum):
    """Shape family of a rate region."""
    HK_POLYTOPE = "hk"
    MAC_POLYTOPE = "mac"
    TDM = "tdm"


class FrontierKind(StrEnum):
    """Representation of an IR efficient frontier."""
    PIECEWISE_LINEAR = "piecewise_linear"
    PARAMETRIC = "parametric"


def _require_finite(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class ChannelParams:
    """Cross gains and power constraints of a two-user Gaussian IC."""
    a: float  # power gain of link 2 -> 1
    b: float  # power gain of link 1 -> 2
    P1: float  # average power of user 1 (linear SNR)
    P2: float  # average power of user 2 (linear SNR)

    def __post_init__(self) -> None:
        for name in ("a", "b", "P1", "P2"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0:
                raise DomainError(f"{name} must be positive, got {value}")

    def swapped(self) -> "ChannelParams":
        """Relabel the users (user 1 becomes user 2)."""
        return ChannelParams(a=self.b, b=self.a, P1=self.P2, P2=self.P1)


@dataclass(frozen=True)
class PowerSplit:
    """Fractions of each user's power spent on its private message."""
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            _require_finite(name, value)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must be in [0, 1], got {value}")

    @property
    def is_zero(self) -> bool:
        """True for HK(0,0): common messages only."""
        return self.alpha == 0.0 and self.beta == 0.0

    def swapped(self) -> "PowerSplit":
        return PowerSplit(alpha=self.beta, beta=self.alpha)


@dataclass(frozen=True)
class RatePair:
    """A rate pair (R1, R2) in bits per channel use."""
    r1: float
    r2: float

    def __post_init__(self) -> None:
        for name in ("r1", "r2"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value < 0:
                raise DomainError(f"{name} must be nonnegative, got {value}")

    def __iter__(self):
        yield self.r1
        yield self.r2

    def rate(self, user: int) -> float:
        """Rate of user 1 or user 2."""
        return self.r1 if user == 1 else self.r2

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2])

    def dominates(self, other: "RatePair", tol: float = 0.0) -> bool:
        """Componentwise >= (within tol)."""
        return self.r1 >= other.r1 - tol and self.r2 >= other.r2 - tol

    def strictly_dominates(self, other: "RatePair", tol: float = 0.0) -> bool:
        """Componentwise > (by more than tol)."""
        return self.r1 > other.r1 + tol and self.r2 > other.r2 + tol

    def distance(self, other: "RatePair") -> float:
        """Max-norm distance."""
        return max(abs(self.r1 - other.r1), abs(self.r2 - other.r2))

    @classmethod
    def from_array(cls, values) -> "RatePair":
        # Clamp round-off below zero; callers only pass first-quadrant points
        return cls(r1=max(float(values[0]), 0.0), r2=max(float(values[1]), 0.0))


@dataclass(frozen=True)
class HkBounds:
    """Right-hand sides of the H-K rate constraints."""
    phi1: float
    phi2: float
    phi3: float
    phi4: float
    phi5: float
    phi31: float
    phi32: float
    phi33: float
    phi6: float | None = None  # sum bound of HK(0,0); only for alpha = beta = 0


@dataclass(frozen=True)
class HalfPlane:
    """Constraint c1*R1 + c2*R2 <= bound."""
    c1: float
    c2: float
    bound: float
    label: str = ""

    def slack(self, point: RatePair) -> float:
        return self.bound - (self.c1 * point.r1 + self.c2 * point.r2)


def capacity(x: float) -> float:
    """
    Gaussian capacity C(x) = 1/2 log2(1 + x).

    Args:
        x: Signal to noise ratio (linear, >= 0)

    Returns:
        Rate in bits per channel use
    """
    if not isinstance(x, (int, float)) or not math.isfinite(x) or x < 0:
        raise DomainError(f"capacity is defined for finite x >= 0, got {x!r}")
    return 0.5 * math.log1p(x) / _LN2


def classify_interference(params: ChannelParams) -> Regime:
    """Strong iff a >= 1 and b >= 1, weak iff both < 1, mixed otherwise."""
    if params.a >= 1 and params.b >= 1:
        return Regime.STRONG
    if params.a < 1 and params.b < 1:
        return Regime.WEAK
    return Regime.MIXED


def default_power_split(params: ChannelParams) -> PowerSplit:
    """
    Near-optimal private power split for the regime.

    Strong: (0, 0). Weak: (min(1/(bP1),1), min(1/(aP2),1)). Mixed with
    a < 1 <= b: (0, min(1/(aP2),1)); the a >= 1 > b orientation is the
    same rule applied to the relabeled channel.
    """
    regime = classify_interference(params)
    if regime is Regime.STRONG:
        return PowerSplit(0.0, 0.0)
    if regime is Regime.WEAK:
        return PowerSplit(
            alpha=min(1.0 / (params.b * params.P1), 1.0),
            beta=min(1.0 / (params.a * params.P2), 1.0),
        )
    if params.a < 1:
        return PowerSplit(alpha=0.0, beta=min(1.0 / (params.a * params.P2), 1.0))
    return default_power_split(params.swapped()).swapped()


def disagreement_point(params: ChannelParams) -> RatePair:
    """Rates when each receiver treats the other full-power signal as noise."""
    return RatePair(
        r1=capacity(params.P1 / (1.0 + params.a * params.P2)),
        r2=capacity(params.P2 / (1.0 + params.b * params.P1)),
    )


def hk_bounds(params: ChannelParams, split: PowerSplit) -> HkBounds:
    """
    Evaluate the H-K rate constraints for a fixed power split.

    phi6 is reported for HK(0,0) as the smallest of the three sum-rate
    candidates, C(P1+aP2), C(bP1+P2) and C(aP2)+C(bP1). The last one is never
    active when a, b >= 1, where this is the strong-interference capacity bound.

    Args:
        params: Channel parameters
        split: Private power fractions (alpha, beta)

    Returns:
        HkBounds with phi1..phi5 and the sum-rate candidates
    """
    a, b, P1, P2 = params.a, params.b, params.P1, params.P2
    al, be = split.alpha, split.beta

    # Interference-plus-noise seen by the private messages at each receiver
    d1 = 1.0 + a * be * P2
    d2 = 1.0 + b * al * P1

    own1_all = capacity((P1 + a * (1.0 - be) * P2) / d1)
    own2_all = capacity((P2 + b * (1.0 - al) * P1) / d2)
    private1 = capacity(al * P1 / d1)
    private2 = capacity(be * P2 / d2)
    cross1 = capacity((al * P1 + a * (1.0 - be) * P2) / d1)
    cross2 = capacity((be * P2 + b * (1.0 - al) * P1) / d2)

    phi31 = own1_all + private2
    phi32 = private1 + own2_all
    phi33 = cross1 + cross2

    bounds = HkBounds(
        phi1=capacity(P1 / d1),
        phi2=capacity(P2 / d2),
        phi3=min(phi31, phi32, phi33),
        phi4=own1_all + private1 + cross2,
        phi5=own2_all + private2 + cross1,
        phi31=phi31,
        phi32=phi32,
        phi33=phi33,
        phi6=min(phi31, phi32, phi33) if split.is_zero else None,
    )
    logger.debug(f"H-K bounds for {params} {split}: {bounds}")
    return bounds


def _nonnegativity() -> tuple[HalfPlane, HalfPlane]:
    return (HalfPlane(-1.0, 0.0, 0.0, "R1>=0"), HalfPlane(0.0, -1.0, 0.0, "R2>=0"))


def enumerate_vertices(constraints: tuple[HalfPlane, ...]) -> tuple[RatePair, ...]:
    """
    Extreme points of a 2-D polytope given as half-planes.

    Every pair of constraint lines is intersected; intersections that satisfy
    all constraints within TOL are kept, deduplicated at TOL and sorted by
    (R1, R2).
    """
    A = np.array([[h.c1, h.c2] for h in constraints], dtype=float)
    B = np.array([h.bound for h in constraints], dtype=float)

    found: list[np.ndarray] = []
    for i, j in itertools.combinations(range(len(constraints)), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue  # parallel lines
        v = np.linalg.solve(M, B[[i, j]])
        if np.all(A @ v <= B + TOL):
            if all(np.max(np.abs(v - u)) > TOL for u in found):
                found.append(v)

    vertices = sorted((RatePair.from_array(v) for v in found), key=lambda p: (p.r1, p.r2))
    return tuple(vertices)


def weakly_efficient(corners: tuple[RatePair, ...]) -> list[RatePair]:
    """
    Corners of a convex polytope that no point of the polytope strictly beats.

    The polytope is a rate region, possibly clipped from below at a point.
    Its only beaten corner is the lower-left one, and the midpoint of the
    topmost and rightmost corners beats it, so testing against all
    midpoints of corner pairs (corners included) is exact. Flat pieces keep
    both their ends.
    """
    if not corners:
        return []
    pts = np.array([v.as_array() for v in corners])
    mids = 0.5 * (pts[:, None, :] + pts[None, :, :]).reshape(-1, 2)
    return [
        v for v in corners
        if not np.any((mids[:, 0] > v.r1 + TOL) & (mids[:, 1] > v.r2 + TOL))
    ]


@dataclass(frozen=True)
class RateRegion:
    """
    A convex, closed 2-D rate region containing the origin.

    Polytope kinds carry their half-planes and extreme points; the TDM kind is
    the parametric set rho -> (R1(rho), R2(1 - rho)) and carries its corner
    points only.
    """
    kind: RegionKind
    params: ChannelParams
    constraints: tuple[HalfPlane, ...] = ()
    vertices: tuple[RatePair, ...] = ()
    split: PowerSplit | None = None

    @property
    def is_polytope(self) -> bool:
        return self.kind is not RegionKind.TDM

    def contains(self, point: RatePair, tol: float = TOL) -> bool:
        """Membership test within tol."""
        if self.is_polytope:
            return all(h.slack(point) >= -tol for h in self.constraints)
        c1 = capacity(self.params.P1)
        if point.r1 > c1 + tol:
            return False
        if point.r1 >= c1:
            return point.r2 <= tol
        rho1 = _rho_for_rate(point.r1, self.params.P1)
        return point.r2 <= _tdm_rate(1.0 - rho1, self.params.P2) + tol

    def boundary(self, samples: int = 200) -> list[RatePair]:
        """Closed boundary polyline (counterclockwise), for plotting."""
        if self.is_polytope:
            cx = sum(v.r1 for v in self.vertices) / len(self.vertices)
            cy = sum(v.r2 for v in self.vertices) / len(self.vertices)
            ring = sorted(self.vertices, key=lambda v: math.atan2(v.r2 - cy, v.r1 - cx))
            return ring + [ring[0]]
        return [RatePair(0.0, 0.0)] + self.frontier_points(samples) + [RatePair(0.0, 0.0)]

    def frontier_points(self, samples: int = 200) -> list[RatePair]:
        """Pareto boundary from (max R1, 0) up to (0, max R2)."""
        if self.is_polytope:
            return sorted(weakly_efficient(self.vertices), key=lambda v: (-v.r1, v.r2))
        # rho1 from 1 to 0 walks from (C(P1), 0) up to (0, C(P2))
        return [tdm_point(float(rho), self.params) for rho in np.linspace(1.0, 0.0, samples)]

    def bounding_box(self) -> tuple[float, float]:
        """Largest R1 and R2 in the region."""
        return max(v.r1 for v in self.vertices), max(v.r2 for v in self.vertices)


def hk_polytope(params: ChannelParams, split: PowerSplit | None = None) -> RateRegion:
    """
    H-K region {R >= 0, R1 <= phi1, R2 <= phi2, R1+R2 <= phi3,
    2R1+R2 <= phi4, R1+2R2 <= phi5}.

    Args:
        params: Channel parameters
        split: Power split (default: regime's near-optimal split)

    Returns:
        RateRegion of kind HK_POLYTOPE
    """
    if split is None:
        split = default_power_split(params)
    phi = hk_bounds(params, split)
    constraints = (
        HalfPlane(1.0, 0.0, phi.phi1, "R1<=phi1"),
        HalfPlane(0.0, 1.0, phi.phi2, "R2<=phi2"),
        HalfPlane(1.0, 1.0, phi.phi3, "R1+R2<=phi3"),
        HalfPlane(2.0, 1.0, phi.phi4, "2R1+R2<=phi4"),
        HalfPlane(1.0, 2.0, phi.phi5, "R1+2R2<=phi5"),
    ) + _nonnegativity()
    return RateRegion(
        kind=RegionKind.HK_POLYTOPE,
        params=params,
        constraints=constraints,
        vertices=enumerate_vertices(constraints),
        split=split,
    )


def mac_params(P1: float, P2: float) -> ChannelParams:
    """Channel parameters of the MAC viewed as an IC with unit cross gains."""
    return ChannelParams(a=1.0, b=1.0, P1=P1, P2=P2)


def mac_polytope(P1: float, P2: float) -> RateRegion:
    """MAC capacity region {Ri <= C(Pi), R1+R2 <= C(P1+P2), R >= 0}."""
    params = mac_params(P1, P2)
    constraints = (
        HalfPlane(1.0, 0.0, capacity(P1), "R1<=C(P1)"),
        HalfPlane(0.0, 1.0, capacity(P2), "R2<=C(P2)"),
        HalfPlane(1.0, 1.0, capacity(P1 + P2), "R1+R2<=phi0"),
    ) + _nonnegativity()
    return RateRegion(
        kind=RegionKind.MAC_POLYTOPE,
        params=params,
        constraints=constraints,
        vertices=enumerate_vertices(constraints),
    )


def _tdm_rate(rho: float, power: float) -> float:
    # rho * C(P / rho), continuously extended with 0 at rho = 0
    if rho <= 0.0:
        return 0.0
    return rho * capacity(power / rho)


def _rho_for_rate(rate: float, power: float) -> float:
    """Time fraction at which rho * C(P/rho) equals rate (strictly increasing in rho)."""
    if rate <= 0.0:
        return 0.0
    if rate >= capacity(power):
        return 1.0
    return bisect(lambda rho: _tdm_rate(rho, power) - rate, 0.0, 1.0, xtol=RHO_XTOL)


def tdm_point(rho1: float, params: ChannelParams) -> RatePair:
    """
    Frontier point of the TDM region when user 1 transmits a fraction rho1.

    Args:
        rho1: Time fraction of user 1 (user 2 gets 1 - rho1)
        params: Channel parameters (only the powers matter)

    Returns:
        (rho1 C(P1/rho1), (1-rho1) C(P2/(1-rho1)))
    """
    _require_finite("rho1", rho1)
    if not 0.0 <= rho1 <= 1.0:
        raise DomainError(f"rho1 must be in [0, 1], got {rho1}")
    return RatePair(_tdm_rate(rho1, params.P1), _tdm_rate(1.0 - rho1, params.P2))


def tdm_region(params: ChannelParams) -> RateRegion:
    """TDM region; its shape does not depend on the cross gains."""
    return RateRegion(
        kind=RegionKind.TDM,
        params=params,
        vertices=(
            RatePair(0.0, 0.0),
            RatePair(0.0, capacity(params.P2)),
            RatePair(capacity(params.P1), 0.0),
        ),
    )


def tdm_share(params: ChannelParams, point: RatePair) -> float:
    """Time fraction rho1 of user 1 that realizes a TDM frontier point."""
    return _rho_for_rate(point.r1, params.P1)


@dataclass(frozen=True)
class Frontier:
    """
    IR efficient frontier of a region for a given disagreement point.

    Piecewise-linear frontiers keep their chain of corner points ordered by
    increasing R1 (R2 non-increasing). Parametric frontiers keep the interval
    of time fractions whose TDM points dominate the disagreement point.
    """
    kind: FrontierKind
    disagreement: RatePair
    domain: tuple[float, float]
    points: tuple[RatePair, ...] = ()
    rho_interval: tuple[float, float] | None = None
    params: ChannelParams | None = None

    @property
    def segments(self) -> list[tuple[RatePair, RatePair]]:
        return list(zip(self.points[:-1], self.points[1:]))

    @property
    def top(self) -> RatePair:
        """End of the frontier with the largest R2."""
        if self.kind is FrontierKind.PIECEWISE_LINEAR:
            return self.points[0]
        return tdm_point(self.rho_interval[0], self.params)

    @property
    def right(self) -> RatePair:
        """End of the frontier with the largest R1."""
        if self.kind is FrontierKind.PIECEWISE_LINEAR:
            return self.points[-1]
        return tdm_point(self.rho_interval[1], self.params)

    def evaluate(self, r1: float) -> float:
        """R2 = f(R1) on the frontier (clamped to the domain)."""
        if self.kind is FrontierKind.PIECEWISE_LINEAR:
            xs = [p.r1 for p in self.points]
            ys = [p.r2 for p in self.points]
            return float(np.interp(r1, xs, ys))
        lo, hi = self.domain
        rho1 = _rho_for_rate(min(max(r1, lo), hi), self.params.P1)
        return _tdm_rate(1.0 - rho1, self.params.P2)

    def inverse(self, r2: float) -> float:
        """R1 = f^-1(R2) on the frontier (clamped to the range)."""
        if self.kind is FrontierKind.PIECEWISE_LINEAR:
            xs = [p.r1 for p in reversed(self.points)]
            ys = [p.r2 for p in reversed(self.points)]
            return float(np.interp(r2, ys, xs))
        lo = self.right.r2
        hi = self.top.r2
        rho2 = _rho_for_rate(min(max(r2, lo), hi), self.params.P2)
        return _tdm_rate(1.0 - rho2, self.params.P1)

    def point_at(self, r1: float) -> RatePair:
        return RatePair(r1, self.evaluate(r1))

    def is_strictly_monotone(self, tol: float = TOL) -> bool:
        """No horizontal or vertical pieces."""
        if self.kind is FrontierKind.PARAMETRIC:
            return True
        return all(q.r1 - p.r1 > tol and p.r2 - q.r2 > tol for p, q in self.segments)

    def sample(self, count: int) -> np.ndarray:
        """count points along the frontier as an array of shape (count, 2)."""
        if self.kind is FrontierKind.PIECEWISE_LINEAR:
            lo, hi = self.domain
            xs = np.linspace(lo, hi, count)
            ys = np.interp(xs, [p.r1 for p in self.points], [p.r2 for p in self.points])
            return np.column_stack([xs, ys])
        rhos = np.linspace(self.rho_interval[0], self.rho_interval[1], count)
        return np.array([tuple(tdm_point(float(rho), self.params)) for rho in rhos])


def ir_frontier(region: RateRegion, disagreement: RatePair) -> Frontier:
    """
    IR efficient frontier of a region.

    Polytopes are clipped to {R >= R0}; the corner points of the clipped
    polygon that no other corner strictly dominates form the frontier chain.
    For TDM, the time-fraction interval where both users beat R0 is found
    by bisection.

    Args:
        region: Rate region
        disagreement: Disagreement point R0 (must lie in the region)

    Returns:
        Frontier

    Raises:
        PreconditionError: R0 is outside the region
        EmptyFrontierError: no feasible point strictly dominates R0
    """
    if not region.contains(disagreement):
        raise PreconditionError(f"disagreement point {disagreement} is outside the {region.kind} region")

    if region.is_polytope:
        clipped = region.constraints + (
            HalfPlane(-1.0, 0.0, -disagreement.r1, "R1>=R1^0"),
            HalfPlane(0.0, -1.0, -disagreement.r2, "R2>=R2^0"),
        )
        corners = enumerate_vertices(clipped)
        chain = weakly_efficient(corners)
        chain.sort(key=lambda p: (p.r1, -p.r2))
        if not chain or not (
            chain[0].r2 > disagreement.r2 + TOL and chain[-1].r1 > disagreement.r1 + TOL
        ):
            raise EmptyFrontierError(f"no rate pair in the {region.kind} region strictly dominates {disagreement}")
        return Frontier(
            kind=FrontierKind.PIECEWISE_LINEAR,
            disagreement=disagreement,
            domain=(chain[0].r1, chain[-1].r1),
            points=tuple(chain),
        )

    params = region.params
    rho_lo = _rho_for_rate(disagreement.r1, params.P1)
    rho_hi = 1.0 - _rho_for_rate(disagreement.r2, params.P2)
    middle = tdm_point(min(max(0.5 * (rho_lo + rho_hi), 0.0), 1.0), params)
    if rho_hi <= rho_lo or not middle.strictly_dominates(disagreement, TOL):
        raise EmptyFrontierError(f"no TDM split strictly dominates {disagreement}")
    return Frontier(
        kind=FrontierKind.PARAMETRIC,
        disagreement=disagreement,
        domain=(_tdm_rate(rho_lo, params.P1), _tdm_rate(rho_hi, params.P1)),
        rho_interval=(rho_lo, rho_hi),
        params=params,
    )
