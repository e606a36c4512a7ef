"""Scenario geometry, distance-based path loss and Rayleigh channel draws.

Layout: the AP and the IRS sit ``d0`` meters apart on one line; the user moves
along a parallel line ``dv`` meters away, at horizontal distance ``d`` from
the AP.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidInputError
from .model import ChannelRealization, LinkBudget
from .units import db_to_linear, dbm_to_watts


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation scenario. Defaults follow the reference setup where one is given.

    ``N``, ``d`` and ``trials`` have no reference value; they are
    convenience defaults. ``b=None`` selects continuous phases.
    """

    M: int = 5
    N: int = 40
    b: Optional[int] = 1
    gamma_db: float = 20.0
    sigma2_dbm: float = -80.0
    d0: float = 50.0
    dv: float = 2.0
    d: float = 50.0
    alpha_au: float = 3.4
    alpha_ai: float = 2.2
    alpha_iu: float = 2.8
    ref_loss_db: float = 30.0
    seed: int = 0
    trials: int = 200
    suppress_direct_link: bool = False
    # recorded for completeness; i.i.d. fading makes element positions irrelevant
    ap_array: str = "ULA"
    irs_array: str = "URA"

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise InvalidInputError(f"M must be a positive integer, got {self.M}")
        if int(self.N) != self.N or self.N < 0:
            raise InvalidInputError(f"N must be a non-negative integer, got {self.N}")
        if self.b is not None and (int(self.b) != self.b or self.b < 1):
            raise InvalidInputError(f"b must be a positive integer or None, got {self.b}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if not 0 <= int(self.seed) < 2 ** 64 or int(self.seed) != self.seed:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")
        for name in ("alpha_au", "alpha_ai", "alpha_iu"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        if not self.d0 > 0:
            raise InvalidInputError("d0 must be positive")
        if self.d < 0 or self.dv < 0:
            raise InvalidInputError("d and dv must be non-negative")
        d1, d2 = derived_distances(self)
        if not (d1 > 0 and d2 > 0):
            raise InvalidInputError("user coincides with the AP or the IRS")
        for name in ("gamma_db", "sigma2_dbm", "ref_loss_db"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def gamma(self) -> float:
        return float(db_to_linear(self.gamma_db))

    @property
    def sigma2(self) -> float:
        return float(dbm_to_watts(self.sigma2_dbm))

    def budget(self) -> LinkBudget:
        return LinkBudget(self.gamma, self.sigma2)


def derived_distances(cfg: ScenarioConfig) -> Tuple[float, float]:
    """AP-user and IRS-user distances ``(d1, d2)`` in meters."""
    d1 = float(np.hypot(cfg.d, cfg.dv))
    d2 = float(np.hypot(cfg.d0 - cfg.d, cfg.dv))
    return d1, d2


def path_gain(distance_m: float, alpha: float, ref_loss_db: float = 30.0) -> float:
    """Average linear power gain at ``distance_m``; distances below 1 m clamp to 1 m."""
    dist = max(float(distance_m), 1.0)
    return 10.0 ** (-ref_loss_db / 10.0) * dist ** (-alpha)


def link_gains(cfg: ScenarioConfig) -> Tuple[float, float, float]:
    """Path gains of the AP-user, IRS-user and AP-IRS links."""
    d1, d2 = derived_distances(cfg)
    return (
        path_gain(d1, cfg.alpha_au, cfg.ref_loss_db),
        path_gain(d2, cfg.alpha_iu, cfg.ref_loss_db),
        path_gain(cfg.d0, cfg.alpha_ai, cfg.ref_loss_db),
    )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one Monte Carlo trial.

    The stream depends only on ``(seed, trial)``, so trials can run in any
    order or in separate processes.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian samples."""
    re_im = rng.standard_normal((2,) + tuple(shape))
    return (re_im[0] + 1j * re_im[1]) / np.sqrt(2.0)


def sample_channels(cfg: ScenarioConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw i.i.d. Rayleigh channels scaled by each link's path gain.

    Draw order is fixed (h_d, h_r, G), and the direct link is always drawn
    even when it is suppressed. The small-scale fading for a given trial is
    therefore the same across user positions.
    """
    g_au, g_iu, g_ai = link_gains(cfg)
    h_d = _cn(rng, (cfg.M,)) * np.sqrt(g_au)
    h_r = _cn(rng, (cfg.N,)) * np.sqrt(g_iu)
    G = _cn(rng, (cfg.N, cfg.M)) * np.sqrt(g_ai)
    if cfg.suppress_direct_link:
        h_d = np.zeros_like(h_d)
    return ChannelRealization(h_d, h_r, G)


def sample_unit_variance_channels(N: int, rng: np.random.Generator):
    """Unit-variance ``(h_r, g)`` pair for the single-antenna scaling-law setting."""
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    h_r = _cn(rng, (N,))
    g = _cn(rng, (N,))
    return h_r, g
