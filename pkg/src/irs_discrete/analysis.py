"""Large-N received-power law for b-bit phase quantization.

Setting: single-antenna AP, negligible direct link, ``h_r ~ CN(0, rho_h2 I)``
and ``g ~ CN(0, rho_g2 I)``. Each element is co-phased with its cascaded
channel and then rounded to the nearest b-bit level, which leaves a
quantization error uniform on ``[-pi/2^b, pi/2^b)``. The mean received power
is

    P_r(b) = N rho_h2 rho_g2 + N (N - 1) (pi^2 rho_h2 rho_g2 / 16) eta(b)

with ``eta(b) = ((2^b / pi) sin(pi / 2^b))^2``, so ``P_r(b) / P_r(inf)``
tends to ``eta(b)`` and the ``N^2`` growth is kept at any resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .chansim import sample_unit_variance_channels, trial_rng
from .errors import InvalidInputError
from .model import TWO_PI, PhaseShiftVector
from .solver import quantize_phases


def _check_bits(b):
    if b is not None and (int(b) != b or b < 1):
        raise InvalidInputError(f"bits must be a positive integer or None, got {b}")


def amplitude_factor(b: Optional[int]) -> float:
    """Mean of ``exp(1j * err)`` for a uniform b-bit quantization error."""
    _check_bits(b)
    if b is None:
        return 1.0
    K = 2.0 ** b
    return float(K / np.pi * np.sin(np.pi / K))


def eta(b: Optional[int]) -> float:
    """Asymptotic received-power ratio of b-bit to continuous phases."""
    return amplitude_factor(b) ** 2


def eta_db(b: Optional[int]) -> float:
    return float(10.0 * np.log10(eta(b)))


@dataclass(frozen=True)
class ScalingLawParams:
    b: Optional[int]
    N: int
    rho_h2: float = 1.0
    rho_g2: float = 1.0

    def __post_init__(self):
        _check_bits(self.b)
        if int(self.N) != self.N or self.N < 1:
            raise InvalidInputError("N must be a positive integer")
        if not (self.rho_h2 > 0 and self.rho_g2 > 0):
            raise InvalidInputError("channel variances must be positive")


def pr_closed_form(p: ScalingLawParams) -> float:
    """Mean received power for unit transmit power."""
    rho = p.rho_h2 * p.rho_g2
    return p.N * rho + p.N * (p.N - 1) * (np.pi ** 2 * rho / 16.0) * eta(p.b)


class ScalingTrial(NamedTuple):
    power: float
    errors: np.ndarray
    aligned_bound: float


def scaling_trial(h_r: np.ndarray, g: np.ndarray, b: Optional[int]) -> ScalingTrial:
    """Co-phase, quantize and evaluate one single-antenna draw.

    ``aligned_bound`` is ``(sum |h_r,n| |g_n|)^2``, the value reached with
    perfect continuous alignment.
    """
    a = np.conj(h_r)
    target = PhaseShiftVector.continuous(-(np.angle(a) + np.angle(g)))
    theta = target if b is None else quantize_phases(target, b)
    power = float(abs(np.sum(a * theta.unimodular() * g)) ** 2)
    err = np.mod(theta.angles() - target.angles() + np.pi, TWO_PI) - np.pi
    bound = float(np.sum(np.abs(h_r) * np.abs(g)) ** 2)
    return ScalingTrial(power, err, bound)


class MonteCarloEstimate(NamedTuple):
    mean: float
    se: float


def _draw(p: ScalingLawParams, seed: int, trial: int) -> Tuple[np.ndarray, np.ndarray]:
    h_r, g = sample_unit_variance_channels(p.N, trial_rng(seed, trial))
    return h_r * np.sqrt(p.rho_h2), g * np.sqrt(p.rho_g2)


def pr_monte_carlo(p: ScalingLawParams, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Sample mean and standard error of the received power."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    powers = np.array([scaling_trial(*_draw(p, seed, t), p.b).power for t in range(trials)])
    se = powers.std(ddof=1) / np.sqrt(trials) if trials > 1 else float("nan")
    return MonteCarloEstimate(float(powers.mean()), float(se))


def quantization_errors(p: ScalingLawParams, trials: int, seed: int = 0) -> np.ndarray:
    """Pooled per-element quantization errors, in radians."""
    return np.concatenate(
        [scaling_trial(*_draw(p, seed, t), p.b).errors for t in range(trials)]
    )


def power_gain_slope(b: Optional[int], N_list: Sequence[int], trials: int = 1000,
                     seed: int = 0, closed_form: bool = False) -> float:
    """Least-squares slope of log received power against log N.

    Monte Carlo fits need at least three distinct N spanning a decade; the
    closed-form fit accepts two points.
    """
    Ns = np.unique(np.asarray(N_list, dtype=int))
    min_points = 2 if closed_form else 3
    if Ns.size < min_points or Ns.min() < 1 or Ns.max() < 10 * Ns.min():
        raise InvalidInputError(
            f"need >= {min_points} distinct positive N values spanning a decade"
        )
    if closed_form:
        pr = [pr_closed_form(ScalingLawParams(b, int(n))) for n in Ns]
    else:
        pr = [pr_monte_carlo(ScalingLawParams(b, int(n)), trials, seed).mean for n in Ns]
    slope, _ = np.polyfit(np.log(Ns), np.log(pr), 1)
    return float(slope)
