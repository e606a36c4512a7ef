"""Domain types and the deterministic link physics.

Channels are stored in column (non-conjugated) form. The received signal is
``(h_r^H Theta G + h_d^H) w`` so every conjugation happens inside the
functions below and nowhere else.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateChannelError,
    InfeasibleLinkError,
    InvalidInputError,
)

TWO_PI = 2.0 * np.pi


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of the AP-user, IRS-user and AP-IRS channels.

    Attributes
    ----------
    h_d : ndarray, shape (M,)
        AP-user channel (column form of ``h_d^H``).
    h_r : ndarray, shape (N,)
        IRS-user channel (column form of ``h_r^H``).
    G : ndarray, shape (N, M)
        AP-IRS channel.
    """

    h_d: np.ndarray
    h_r: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        h_d = np.asarray(self.h_d, dtype=complex)
        h_r = np.asarray(self.h_r, dtype=complex)
        G = np.asarray(self.G, dtype=complex)
        if h_d.ndim != 1 or h_r.ndim != 1:
            raise InvalidInputError("h_d and h_r must be 1-D vectors")
        if G.ndim != 2:
            # N = 0 with a flat empty array is the only shape we repair
            if G.size == 0 and h_r.size == 0:
                G = G.reshape(0, h_d.size)
            else:
                raise InvalidInputError("G must be a 2-D (N, M) matrix")
        if G.shape != (h_r.size, h_d.size):
            raise InvalidInputError(
                f"G has shape {G.shape}, expected ({h_r.size}, {h_d.size})"
            )
        for name, arr in (("h_d", h_d), ("h_r", h_r), ("G", G)):
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} has non-finite entries")
        object.__setattr__(self, "h_d", _frozen(h_d))
        object.__setattr__(self, "h_r", _frozen(h_r))
        object.__setattr__(self, "G", _frozen(G))

    @property
    def M(self) -> int:
        return self.h_d.size

    @property
    def N(self) -> int:
        return self.h_r.size

    def without_direct_link(self) -> "ChannelRealization":
        return ChannelRealization(np.zeros_like(self.h_d), self.h_r, self.G)

    def digest(self) -> str:
        """Short content hash, used to check that schemes share a draw."""
        h = hashlib.sha256()
        for arr in (self.h_d, self.h_r, self.G):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class PhaseShiftVector:
    """Reflection phases of all IRS elements.

    ``bits=None`` means continuous phases and ``values`` holds angles in
    [0, 2*pi). Otherwise ``values`` holds integer level indices in
    ``{0, ..., 2**bits - 1}``.
    """

    values: np.ndarray
    bits: Optional[int] = None

    def __post_init__(self):
        if self.bits is None:
            vals = np.asarray(self.values, dtype=float).reshape(-1)
            if not np.all(np.isfinite(vals)):
                raise InvalidInputError("phase angles must be finite")
            if np.any(vals < 0) or np.any(vals >= TWO_PI):
                raise InvalidInputError("continuous phases must lie in [0, 2*pi)")
        else:
            if int(self.bits) != self.bits or self.bits < 1:
                raise InvalidInputError(f"bits must be a positive integer, got {self.bits}")
            object.__setattr__(self, "bits", int(self.bits))
            raw = np.asarray(self.values).reshape(-1)
            vals = raw.astype(np.int64)
            if raw.size and not np.array_equal(vals, raw):
                raise InvalidInputError("discrete phases must be integer indices")
            if np.any(vals < 0) or np.any(vals >= self.levels):
                raise InvalidInputError(
                    f"level index out of range for {self.bits}-bit phases"
                )
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def continuous(cls, angles) -> "PhaseShiftVector":
        """Continuous phases from arbitrary real angles (wrapped into [0, 2*pi))."""
        wrapped = np.mod(np.asarray(angles, dtype=float), TWO_PI)
        # mod can round up to exactly 2*pi for tiny negative inputs
        wrapped[wrapped >= TWO_PI] = 0.0
        return cls(wrapped, None)

    @classmethod
    def discrete(cls, indices, bits: int) -> "PhaseShiftVector":
        return cls(np.asarray(indices), bits)

    @classmethod
    def zeros(cls, n: int, bits: Optional[int] = None) -> "PhaseShiftVector":
        if bits is None:
            return cls(np.zeros(n), None)
        return cls(np.zeros(n, dtype=np.int64), bits)

    @property
    def is_discrete(self) -> bool:
        return self.bits is not None

    @property
    def levels(self) -> int:
        """Number of phase levels ``K = 2**bits`` (0 for continuous)."""
        return 0 if self.bits is None else 2 ** self.bits

    @property
    def N(self) -> int:
        return self.values.size

    def angles(self) -> np.ndarray:
        if self.bits is None:
            return np.array(self.values, dtype=float)
        return self.values * (TWO_PI / self.levels)

    def unimodular(self) -> np.ndarray:
        """Diagonal of the reflection matrix, ``exp(1j*theta)`` with unit amplitude."""
        return np.exp(1j * self.angles())


@dataclass(frozen=True, eq=False)
class Beamformer:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("beamformer has non-finite entries")
        object.__setattr__(self, "w", _frozen(w))

    @property
    def power(self) -> float:
        return float(np.vdot(self.w, self.w).real)


@dataclass(frozen=True)
class LinkBudget:
    """SNR target ``gamma`` (linear) and noise power ``sigma2`` (watts)."""

    gamma: float
    sigma2: float

    def __post_init__(self):
        if not (self.gamma > 0 and np.isfinite(self.gamma)):
            raise InvalidInputError(f"gamma must be positive, got {self.gamma}")
        if not (self.sigma2 > 0 and np.isfinite(self.sigma2)):
            raise InvalidInputError(f"sigma2 must be positive, got {self.sigma2}")


def _check_theta(ch: ChannelRealization, theta: PhaseShiftVector):
    if theta.N != ch.N:
        raise InvalidInputError(f"{theta.N} phases given for {ch.N} IRS elements")


def combined_channel(ch: ChannelRealization, theta: PhaseShiftVector) -> np.ndarray:
    """Column form ``h`` of the effective channel ``h^H = h_r^H Theta G + h_d^H``."""
    _check_theta(ch, theta)
    row = (np.conj(ch.h_r) * theta.unimodular()) @ ch.G + np.conj(ch.h_d)
    return np.conj(row)


def receive_snr(ch: ChannelRealization, theta: PhaseShiftVector, w: Beamformer,
                sigma2: float) -> float:
    if not sigma2 > 0:
        raise InvalidInputError("sigma2 must be positive")
    h = combined_channel(ch, theta)
    if w.w.size != h.size:
        raise InvalidInputError(f"beamformer has {w.w.size} entries, expected {h.size}")
    # h^H w with h in column form
    return float(abs(np.vdot(h, w.w)) ** 2 / sigma2)


def mrt_beamformer(combined: np.ndarray, power: float) -> Beamformer:
    """Maximum-ratio transmit beamformer ``sqrt(p) * h / ||h||``."""
    if power < 0:
        raise InvalidInputError("power must be non-negative")
    h = np.asarray(combined, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0:
        raise DegenerateChannelError("combined channel is zero; MRT direction undefined")
    return Beamformer(np.sqrt(power) * h / norm)


def required_power(combined: np.ndarray, budget: LinkBudget) -> float:
    """Minimum transmit power (watts) meeting the SNR target with MRT."""
    gain = float(np.vdot(combined, combined).real)
    if gain == 0:
        raise InfeasibleLinkError("zero channel gain: SNR target needs infinite power")
    return budget.gamma * budget.sigma2 / gain
