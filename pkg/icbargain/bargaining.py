"""
Bargaining problems over rate regions and their solutions.

A bargaining problem is a rate region plus a disagreement point. This module
decides whether a problem is worth bargaining over (essential), whether its
alternating-offer game has a unique subgame-perfect equilibrium (regular),
whether the users have an incentive to cooperate with a given scheme at all,
and computes the Nash bargaining solution (NBS) and the equilibrium pair.

Equilibrium pair (R_bar, R_tilde), both on the IR efficient frontier:
    R_tilde1 = (1 - p2) * (R_bar1 - R1^0) + R1^0
    R_bar2   = (1 - p1) * (R_tilde2 - R2^0) + R2^0
R_bar is player 1's standing offer, R_tilde player 2's.
"""

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from icbargain.errors import (
    BracketError,
    DomainError,
    EmptyFrontierError,
    NonRegularError,
    NotEssentialError,
    PreconditionError,
)
from icbargain.log import logger
from icbargain.rate_region import (
    TOL,
    ChannelParams,
    Frontier,
    FrontierKind,
    PowerSplit,
    RatePair,
    RateRegion,
    Regime,
    capacity,
    classify_interference,
    default_power_split,
    disagreement_point,
    hk_bounds,
    hk_polytope,
    ir_frontier,
    mac_params,
    mac_polytope,
    tdm_point,
    tdm_region,
)

# Bisection tolerance on R_bar1 and accepted equilibrium residual (bits)
SPE_XTOL = 1e-12
SPE_RESIDUAL = 1e-9

# Slack when comparing Nash products of candidate points
NBS_SLACK = 1e-12


class Player(StrEnum):
    USER1 = "u1"
    USER2 = "u2"

    @property
    def index(self) -> int:
        return 1 if self is Player.USER1 else 2

    def other(self) -> "Player":
        return Player.USER2 if self is Player.USER1 else Player.USER1


class Scheme(StrEnum):
    """Cooperative transmission scheme."""
    HK = "hk"
    TDM = "tdm"
    MAC = "mac"


@dataclass(frozen=True)
class BreakdownProbs:
    """
    Breakdown risk of the alternating-offer game.

    p1 is the probability that bargaining ends after player 1's offer is
    rejected; p2 the same for player 2's offer.
    """
    p1: float
    p2: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not 0.0 < value < 1.0:
                raise DomainError(f"{name} must be in (0, 1), got {value!r}")

    def of(self, player: Player) -> float:
        return self.p1 if player is Player.USER1 else self.p2


@dataclass(frozen=True)
class BargainingProblem:
    """A rate region plus the disagreement point inside it."""
    region: RateRegion
    disagreement: RatePair

    def __post_init__(self) -> None:
        if not self.region.contains(self.disagreement):
            raise PreconditionError(
                f"disagreement point {self.disagreement} is outside the {self.region.kind} region"
            )

    @cached_property
    def frontier(self) -> Frontier:
        """IR efficient frontier (raises EmptyFrontierError when not essential)."""
        return ir_frontier(self.region, self.disagreement)

    @classmethod
    def hk(cls, params: ChannelParams, split: PowerSplit | None = None) -> "BargainingProblem":
        return cls(hk_polytope(params, split), disagreement_point(params))

    @classmethod
    def tdm(cls, params: ChannelParams) -> "BargainingProblem":
        return cls(tdm_region(params), disagreement_point(params))

    @classmethod
    def mac(cls, P1: float, P2: float) -> "BargainingProblem":
        return cls(mac_polytope(P1, P2), disagreement_point(mac_params(P1, P2)))


@dataclass(frozen=True)
class SpePair:
    """Equilibrium agreements of the alternating-offer game."""
    r_bar: RatePair
    r_tilde: RatePair
    first_mover: Player = Player.USER1

    @property
    def outcome(self) -> RatePair:
        """Agreement reached at round 1."""
        return self.r_bar if self.first_mover is Player.USER1 else self.r_tilde


@dataclass(frozen=True)
class IncentiveResult:
    """Phase-1 verdict for one scheme."""
    proceed: bool
    scheme: Scheme
    reason: str
    split: PowerSplit | None = None
    rho_interval: tuple[float, float] | None = None


def nash_product(point: RatePair, disagreement: RatePair) -> float:
    """(r1 - R1^0) * (r2 - R2^0)"""
    return (point.r1 - disagreement.r1) * (point.r2 - disagreement.r2)


def is_essential(problem: BargainingProblem) -> bool:
    """True iff some feasible rate pair strictly dominates the disagreement point."""
    try:
        problem.frontier
    except EmptyFrontierError:
        return False
    return True


def is_regular_frontier(problem: BargainingProblem) -> bool:
    """True iff essential and the IR frontier has no horizontal or vertical piece."""
    if not is_essential(problem):
        return False
    return problem.frontier.is_strictly_monotone()


def is_regular_ic(params: ChannelParams, split: PowerSplit | None = None) -> bool:
    """
    Closed-form regularity test of the H-K bargaining problem.

    Strong interference is regular only for a = b = 1. Otherwise the
    disagreement point must lie right of the end of the flat top piece
    R2 = phi2 and above the end of the flat right piece R1 = phi1:
        R1^0 >= (min(phi1, phi3 - phi2, (phi4 - phi2)/2, phi5 - 2 phi2))+
        R2^0 >= (min(phi2, phi3 - phi1, (phi5 - phi1)/2, phi4 - 2 phi1))+
    At the default split only some terms can be smallest:
        weak:  R1^0 >= (phi5 - 2 phi2)+  and  R2^0 >= (phi4 - 2 phi1)+
        mixed: R1^0 >= (min(phi5 - 2 phi2, phi3 - phi2))+
               R2^0 >= (min(phi4 - 2 phi1, phi3 - phi1))+
    Both forms are symmetric under relabeling, so they cover either mixed
    orientation.

    Args:
        params: Channel parameters
        split: Power split (default: regime's near-optimal split)

    Returns:
        True if the problem is regular
    """
    regime = classify_interference(params)
    if regime is Regime.STRONG:
        return params.a == 1 and params.b == 1

    if split is None:
        split = default_power_split(params)
    phi = hk_bounds(params, split)
    r0 = disagreement_point(params)

    top_end = min(phi.phi1, phi.phi3 - phi.phi2, (phi.phi4 - phi.phi2) / 2.0, phi.phi5 - 2.0 * phi.phi2)
    right_end = min(phi.phi2, phi.phi3 - phi.phi1, (phi.phi5 - phi.phi1) / 2.0, phi.phi4 - 2.0 * phi.phi1)
    # Flat pieces shorter than TOL are merged away by vertex deduplication
    return r0.r1 >= max(top_end, 0.0) - TOL and r0.r2 >= max(right_end, 0.0) - TOL


def _nonempty_ir(region: RateRegion, r0: RatePair) -> Frontier | None:
    # A region is closed downward, so R0 outside it means no point dominates R0
    if not region.contains(r0):
        return None
    try:
        return ir_frontier(region, r0)
    except EmptyFrontierError:
        return None


def incentive_check(params: ChannelParams, scheme: Scheme) -> IncentiveResult:
    """
    Phase 1: do both users gain from cooperating with this scheme?

    H-K: always under strong interference (with HK(0,0)); under weak
    interference iff aP2 > 1, bP1 > 1 and the IR set at the default split is
    nonempty; under mixed interference iff the weak cross link carries more
    than the noise (aP2 > 1, or bP1 > 1 when a >= 1) and the IR set is
    nonempty. TDM: iff the TDM problem is essential. MAC: always.

    Args:
        params: Channel parameters
        scheme: Cooperative scheme to check

    Returns:
        IncentiveResult; proceed=False is a normal outcome
    """
    r0 = disagreement_point(params)

    if scheme is Scheme.MAC:
        return IncentiveResult(True, scheme, "MAC safe rates are strictly inside the capacity region")

    if scheme is Scheme.TDM:
        frontier = _nonempty_ir(tdm_region(params), r0)
        if frontier is None:
            result = IncentiveResult(False, scheme, "no time split beats the disagreement point for both users")
        else:
            result = IncentiveResult(True, scheme, "TDM problem is essential", rho_interval=frontier.rho_interval)
        logger.info(f"Phase 1 ({scheme}): {result.reason}")
        return result

    regime = classify_interference(params)
    split = default_power_split(params)

    if regime is Regime.STRONG:
        result = IncentiveResult(True, scheme, "strong interference: HK(0,0) always helps", split=split)
        logger.info(f"Phase 1 ({scheme}): {result.reason}")
        return result

    aP2 = params.a * params.P2
    bP1 = params.b * params.P1
    failed = None
    if regime is Regime.WEAK and not (aP2 > 1 and bP1 > 1):
        failed = f"weak interference needs aP2 > 1 and bP1 > 1 (aP2={aP2:.6g}, bP1={bP1:.6g})"
    elif regime is Regime.MIXED and params.a < 1 and not aP2 > 1:
        failed = f"mixed interference needs aP2 > 1 (aP2={aP2:.6g})"
    elif regime is Regime.MIXED and params.a >= 1 and not bP1 > 1:
        failed = f"mixed interference needs bP1 > 1 (bP1={bP1:.6g})"
    elif _nonempty_ir(hk_polytope(params, split), r0) is None:
        failed = f"no H-K rate pair at split ({split.alpha:.6g}, {split.beta:.6g}) beats the disagreement point"

    if failed:
        result = IncentiveResult(False, scheme, failed, split=split)
    else:
        result = IncentiveResult(
            True, scheme,
            f"{regime} interference: HK({split.alpha:.6g},{split.beta:.6g}) helps both users",
            split=split,
        )
    logger.info(f"Phase 1 ({scheme}): {result.reason}")
    return result


def _segment_maximizer(p: RatePair, q: RatePair, r0: RatePair) -> RatePair | None:
    """Interior stationary point of the Nash product on segment p-q, if any."""
    # Product along p + t (q - p) is a quadratic in t
    u1, u2 = p.r1 - r0.r1, p.r2 - r0.r2
    d1, d2 = q.r1 - p.r1, q.r2 - p.r2
    curvature = d1 * d2
    if curvature >= 0:
        return None  # not concave along the segment
    t = -(u1 * d2 + u2 * d1) / (2.0 * curvature)
    if not 0.0 < t < 1.0:
        return None
    return RatePair(p.r1 + t * d1, p.r2 + t * d2)


def nbs(problem: BargainingProblem) -> RatePair:
    """
    Nash bargaining solution: maximizer of the Nash product over the IR set.

    Piecewise-linear frontiers are solved segment by segment in closed form;
    a segment's interior point only wins over a corner if it is better by
    more than NBS_SLACK. TDM frontiers are maximized over the time fraction
    with bounded Brent search.

    Args:
        problem: Essential bargaining problem

    Returns:
        NBS rate pair on the IR efficient frontier

    Raises:
        NotEssentialError: No point strictly dominates the disagreement point
    """
    try:
        frontier = problem.frontier
    except EmptyFrontierError as e:
        raise NotEssentialError(str(e)) from e
    r0 = problem.disagreement

    if frontier.kind is FrontierKind.PARAMETRIC:
        lo, hi = frontier.rho_interval
        found = minimize_scalar(
            lambda rho: -nash_product(tdm_point(rho, frontier.params), r0),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = tdm_point(float(found.x), frontier.params)
        logger.debug(f"NBS on TDM frontier at rho1={found.x:.12f}: {best}")
        return best

    best = max(frontier.points, key=lambda v: nash_product(v, r0))
    best_value = nash_product(best, r0)
    for p, q in frontier.segments:
        candidate = _segment_maximizer(p, q, r0)
        if candidate is None:
            continue
        value = nash_product(candidate, r0)
        if value > best_value + NBS_SLACK:
            best, best_value = candidate, value
    logger.debug(f"NBS {best} with Nash product {best_value:.12g}")
    return best


def spe_linear(total: float, disagreement: RatePair, probs: BreakdownProbs,
               first_mover: Player = Player.USER1) -> SpePair:
    """
    Equilibrium pair when the IR frontier is the single segment R1 + R2 = total.

    Solves the 4x4 linear system of the two equilibrium conditions and the two
    efficiency conditions R_bar1 + R_bar2 = R_tilde1 + R_tilde2 = total.
    """
    p1, p2 = probs.p1, probs.p2
    M = np.array([
        [-(1.0 - p2), 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, -(1.0 - p1)],
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
    ])
    rhs = np.array([p2 * disagreement.r1, p1 * disagreement.r2, total, total])
    x = np.linalg.solve(M, rhs)
    return SpePair(
        r_bar=RatePair.from_array(x[:2]),
        r_tilde=RatePair.from_array(x[2:]),
        first_mover=first_mover,
    )


def spe_mac(P1: float, P2: float, probs: BreakdownProbs,
            first_mover: Player = Player.USER1) -> SpePair:
    """Closed-form equilibrium pair of the MAC bargaining problem with safe rates."""
    r0 = disagreement_point(mac_params(P1, P2))
    return spe_linear(capacity(P1 + P2), r0, probs, first_mover)


def spe(problem: BargainingProblem, probs: BreakdownProbs,
        first_mover: Player = Player.USER1) -> SpePair:
    """
    Equilibrium pair of the alternating-offer game on any regular problem.

    Bisection on x = R_bar1. From x: R_bar2 = f(x), R_tilde2 follows from the
    second equilibrium condition, R_tilde1 = f^-1(R_tilde2), and the residual
        g(x) = R_tilde1 - [(1 - p2) (x - R1^0) + R1^0]
    is driven to zero. The lower end of the bracket is moved up to where
    R_tilde2 reaches the top of the frontier.

    Args:
        problem: Regular bargaining problem
        probs: Breakdown probabilities
        first_mover: Who proposes in round 1

    Returns:
        SpePair

    Raises:
        NonRegularError: Problem is not regular
        BracketError: Residual has no sign change or the solution misses tolerance
    """
    if not is_regular_frontier(problem):
        raise NonRegularError(
            f"{problem.region.kind} problem with disagreement point {problem.disagreement} "
            "is not regular; its equilibrium is not unique"
        )
    f = problem.frontier
    r0 = problem.disagreement
    p1, p2 = probs.p1, probs.p2

    def tilde2(x: float) -> float:
        return (f.evaluate(x) - r0.r2) / (1.0 - p1) + r0.r2

    def residual(x: float) -> float:
        return f.inverse(tilde2(x)) - ((1.0 - p2) * (x - r0.r1) + r0.r1)

    top = f.top.r2
    lo = max(f.domain[0], f.inverse(r0.r2 + (1.0 - p1) * (top - r0.r2)))
    hi = f.domain[1]
    g_lo, g_hi = residual(lo), residual(hi)
    logger.debug(f"SPE bracket [{lo:.12f}, {hi:.12f}] residuals {g_lo:.3e} / {g_hi:.3e}")

    if g_lo == 0.0:
        x = lo
    elif g_hi == 0.0:
        x = hi
    elif g_lo < 0.0 < g_hi:
        x = bisect(residual, lo, hi, xtol=SPE_XTOL)
    else:
        raise BracketError("equilibrium residual does not change sign", lo, hi, g_lo, g_hi)

    r_bar = RatePair(x, f.evaluate(x))
    t2 = tilde2(x)
    r_tilde = RatePair(f.inverse(t2), t2)

    eq1 = r_tilde.r1 - ((1.0 - p2) * (r_bar.r1 - r0.r1) + r0.r1)
    eq2 = r_bar.r2 - ((1.0 - p1) * (r_tilde.r2 - r0.r2) + r0.r2)
    if max(abs(eq1), abs(eq2)) > SPE_RESIDUAL:
        raise BracketError("equilibrium residual above tolerance", lo, hi, eq1, eq2)
    logger.debug(f"SPE R_bar={r_bar} R_tilde={r_tilde} residuals {eq1:.3e} / {eq2:.3e}")

    return SpePair(r_bar=r_bar, r_tilde=r_tilde, first_mover=first_mover)


def on_frontier(problem: BargainingProblem, point: RatePair, tol: float = TOL) -> bool:
    """True if point is on the IR efficient frontier within tol."""
    f = problem.frontier
    lo, hi = f.domain
    if not lo - tol <= point.r1 <= hi + tol:
        return False
    return abs(f.evaluate(point.r1) - point.r2) <= tol
