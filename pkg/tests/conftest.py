"""Shared fixtures for the icbargain test suite."""

import numpy as np
import pytest

from icbargain.bargaining import (
    BargainingProblem,
    BreakdownProbs,
    Scheme,
    incentive_check,
    is_regular_frontier,
)
from icbargain.rate_region import ChannelParams, RateRegion

# Mixed-interference scenario at 10/20 dB used throughout the examples
MIXED_A, MIXED_B, MIXED_P1, MIXED_P2 = 0.2, 1.2, 10.0, 100.0

# MAC at 20/15 dB
MAC_P1, MAC_P2 = 100.0, 10 ** 1.5


@pytest.fixture
def mixed_params() -> ChannelParams:
    return ChannelParams(a=MIXED_A, b=MIXED_B, P1=MIXED_P1, P2=MIXED_P2)


@pytest.fixture
def mixed_problem(mixed_params) -> BargainingProblem:
    return BargainingProblem.hk(mixed_params)


@pytest.fixture
def mac_problem() -> BargainingProblem:
    return BargainingProblem.mac(MAC_P1, MAC_P2)


@pytest.fixture
def half() -> BreakdownProbs:
    return BreakdownProbs(0.5, 0.5)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_params(rng: np.random.Generator, regime: str) -> ChannelParams:
    """Channel at 10-30 dB with gains drawn for the requested regime."""
    low, high = (0.1, 0.9), (1.1, 3.0)
    if regime == "weak":
        a, b = rng.uniform(*low), rng.uniform(*low)
    elif regime == "strong":
        a, b = rng.uniform(*high), rng.uniform(*high)
    elif regime == "mixed":
        a, b = rng.uniform(*low), rng.uniform(*high)
        if rng.random() < 0.5:
            a, b = b, a
    else:
        raise ValueError(regime)
    P1, P2 = 10 ** rng.uniform(1.0, 3.0, size=2)
    return ChannelParams(a=float(a), b=float(b), P1=float(P1), P2=float(P2))


def random_regular_problem(rng: np.random.Generator) -> BargainingProblem:
    """Regular problem drawn from MAC, H-K (weak or mixed) and TDM scenarios."""
    while True:
        kind = rng.choice(["mac", "hk", "tdm"])
        if kind == "mac":
            P1, P2 = 10 ** rng.uniform(-1.0, 3.0, size=2)
            return BargainingProblem.mac(float(P1), float(P2))
        params = random_params(rng, str(rng.choice(["weak", "mixed"])))
        if kind == "tdm":
            if incentive_check(params, Scheme.TDM).proceed:
                return BargainingProblem.tdm(params)
            continue
        phase1 = incentive_check(params, Scheme.HK)
        if not phase1.proceed:
            continue
        problem = BargainingProblem.hk(params, phase1.split)
        if is_regular_frontier(problem):
            return problem


def random_probs(rng: np.random.Generator, low: float = 0.01, high: float = 0.99) -> BreakdownProbs:
    p1, p2 = rng.uniform(low, high, size=2)
    return BreakdownProbs(float(p1), float(p2))


def feasible_mask(region: RateRegion, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """Vectorized membership for polytope regions."""
    mask = np.ones_like(r1, dtype=bool)
    for h in region.constraints:
        mask &= h.c1 * r1 + h.c2 * r2 <= h.bound + 1e-12
    return mask


def tdm_curve(P1: float, P2: float, rho1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized TDM frontier for 0 < rho1 < 1."""
    r1 = 0.5 * rho1 * np.log2(1.0 + P1 / rho1)
    r2 = 0.5 * (1.0 - rho1) * np.log2(1.0 + P2 / (1.0 - rho1))
    return r1, r2
