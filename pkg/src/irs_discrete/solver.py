"""Phase-shift optimization for the power-minimization problem.

For fixed phases the optimal transmit beamformer is MRT and the required
power is ``gamma * sigma2 / ||h||^2``, so all solvers here maximize the
channel gain ``||h_r^H Theta G + h_d^H||^2`` over the phases.

With ``Phi = diag(h_r^H) G``, ``A = Phi Phi^H`` and ``hd_hat = Phi h_d`` the
gain is the quadratic form ``v^T A conj(v) + 2 Re{v^T hd_hat} + ||h_d||^2``
in the unimodular vector ``v = exp(1j*theta)``. Holding all phases but the
n-th fixed, the gain is ``2 Re{exp(1j*theta_n) zeta_n} + const`` and is
maximized by the level closest (on the circle) to ``-arg(zeta_n)``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .errors import InstanceTooLargeError, InvalidInputError
from .model import (
    TWO_PI,
    Beamformer,
    ChannelRealization,
    LinkBudget,
    PhaseShiftVector,
    mrt_beamformer,
    required_power,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_SWEEPS = 100
CONTINUOUS_TOL = 1e-8
MAX_EXHAUSTIVE_BITS = 24


@dataclass(frozen=True, eq=False)
class SolverWorkspace:
    """Precomputed terms of the quadratic channel-gain objective."""

    Phi: np.ndarray
    A: np.ndarray
    hd_hat: np.ndarray
    hd_norm2: float
    h_d: np.ndarray

    @property
    def N(self) -> int:
        return self.Phi.shape[0]

    @property
    def M(self) -> int:
        return self.Phi.shape[1]

    def _row_channel(self, v: np.ndarray) -> np.ndarray:
        return v @ self.Phi + np.conj(self.h_d)

    def combined(self, theta: PhaseShiftVector) -> np.ndarray:
        """Combined channel in column form."""
        self._check(theta)
        return np.conj(self._row_channel(theta.unimodular()))

    def objective(self, theta: PhaseShiftVector) -> float:
        """Channel gain evaluated through the quadratic form."""
        self._check(theta)
        v = theta.unimodular()
        quad = (v @ self.A @ np.conj(v)).real
        return float(quad + 2.0 * (v @ self.hd_hat).real + self.hd_norm2)

    def _check(self, theta: PhaseShiftVector):
        if theta.N != self.N:
            raise InvalidInputError(f"{theta.N} phases given for {self.N} IRS elements")


class SolveResult(NamedTuple):
    theta: PhaseShiftVector
    w: Beamformer
    power_watts: float
    objective: float
    iterations: int
    converged: bool
    objective_trace: np.ndarray


def build_workspace(ch: ChannelRealization) -> SolverWorkspace:
    Phi = np.conj(ch.h_r)[:, None] * ch.G
    A = Phi @ Phi.conj().T
    A = 0.5 * (A + A.conj().T)
    hd_hat = Phi @ ch.h_d
    hd_norm2 = float(np.vdot(ch.h_d, ch.h_d).real)
    for arr in (Phi, A, hd_hat):
        arr.setflags(write=False)
    return SolverWorkspace(Phi, A, hd_hat, hd_norm2, ch.h_d)


def zeta(ws: SolverWorkspace, theta: PhaseShiftVector, n: int) -> complex:
    """Coefficient of ``exp(1j*theta_n)`` in the objective (``n`` is 0-based)."""
    ws._check(theta)
    if not 0 <= n < ws.N:
        raise InvalidInputError(f"element index {n} out of range for N={ws.N}")
    conj_v = np.conj(theta.unimodular())
    others = ws.A[n] @ conj_v - ws.A[n, n] * conj_v[n]
    return complex(others + ws.hd_hat[n])


def alignment_angle(z: complex) -> float:
    """Angle ``phi`` in [0, 2*pi) with ``z = |z| exp(-1j*phi)``."""
    phi = (-math.atan2(z.imag, z.real)) % TWO_PI
    return 0.0 if phi >= TWO_PI else phi


@njit(cache=True)
def _nearest_level(phi, K):
    # circular nearest grid point; exact midpoints go to the smaller index
    step = 2.0 * np.pi / K
    x = (phi % (2.0 * np.pi)) / step
    lo = math.floor(x)
    frac = x - lo
    if frac > 0.5:
        k = lo + 1
    elif frac < 0.5:
        k = lo
    elif lo + 1 == K:
        k = 0
    else:
        k = lo
    return int(k) % K


@njit(cache=True)
def _quantize(angles, K):
    out = np.empty(angles.size, dtype=np.int64)
    for i in range(angles.size):
        out[i] = _nearest_level(angles[i], K)
    return out


@njit(cache=True)
def _ao_sweep(Phi, row_norm2, c, v, theta, idx, levels, trace):
    """One pass over all elements in order; updates state in place.

    ``c`` is the row-form combined channel ``v^T Phi + h_d^H`` and is kept
    consistent with ``v`` so that zeta_n costs O(M) instead of O(N).
    ``levels`` is empty for continuous phases. Returns the number of
    changed elements and the largest circular angle change.
    """
    N, M = Phi.shape
    K = levels.size
    two_pi = 2.0 * np.pi
    n_changed = 0
    max_change = 0.0
    for n in range(N):
        z = 0j
        for m in range(M):
            z += Phi[n, m] * np.conj(c[m])
        z -= row_norm2[n] * np.conj(v[n])
        if z != 0:
            phi = (-math.atan2(z.imag, z.real)) % two_pi
            if phi >= two_pi:
                phi = 0.0
            changed = False
            new_theta = 0.0
            new_v = 0j
            if K > 0:
                k = _nearest_level(phi, K)
                if k != idx[n]:
                    idx[n] = k
                    new_theta = k * two_pi / K
                    new_v = levels[k]
                    changed = True
            elif phi != theta[n]:
                new_theta = phi
                new_v = cmath.exp(1j * phi)
                changed = True
            if changed:
                dv = new_v - v[n]
                for m in range(M):
                    c[m] += dv * Phi[n, m]
                delta = abs(new_theta - theta[n])
                delta = min(delta, two_pi - delta)
                if delta > max_change:
                    max_change = delta
                theta[n] = new_theta
                v[n] = new_v
                n_changed += 1
        obj = 0.0
        for m in range(M):
            obj += c[m].real ** 2 + c[m].imag ** 2
        trace[n] = obj
    return n_changed, max_change


def _finish(ws: SolverWorkspace, theta: PhaseShiftVector, budget: LinkBudget,
            iterations: int, converged: bool, trace) -> SolveResult:
    h = ws.combined(theta)
    objective = float(np.vdot(h, h).real)
    p = required_power(h, budget)
    w = mrt_beamformer(h, p)
    return SolveResult(theta, w, p, objective, iterations, converged,
                       np.asarray(trace, dtype=float))


def _alternate(ws: SolverWorkspace, theta_init: PhaseShiftVector, budget: LinkBudget,
               max_sweeps: int, tol: float) -> SolveResult:
    if max_sweeps < 1:
        raise InvalidInputError("max_sweeps must be >= 1")
    ws._check(theta_init)
    bits = theta_init.bits
    theta = theta_init.angles().copy()
    v = theta_init.unimodular().copy()
    if bits is None:
        idx = np.zeros(ws.N, dtype=np.int64)
        levels = np.zeros(0, dtype=complex)
    else:
        idx = np.array(theta_init.values, dtype=np.int64)
        levels = np.exp(1j * np.arange(theta_init.levels) * (TWO_PI / theta_init.levels))
    Phi = np.ascontiguousarray(ws.Phi)
    row_norm2 = np.ascontiguousarray(ws.A.diagonal().real)
    c = ws._row_channel(v)
    traces = [np.array([np.vdot(c, c).real])]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        buf = np.empty(ws.N)
        n_changed, max_change = _ao_sweep(Phi, row_norm2, c, v, theta, idx, levels, buf)
        traces.append(buf)
        if bits is None:
            converged = max_change < tol
        else:
            converged = n_changed == 0
        if converged:
            break
    if not converged:
        logger.debug("alternating optimization stopped after %d sweeps", sweeps)
    if bits is None:
        result_theta = PhaseShiftVector.continuous(theta)
    else:
        result_theta = PhaseShiftVector.discrete(idx, bits)
    return _finish(ws, result_theta, budget, sweeps, converged, np.concatenate(traces))


def discrete_update(phi: float, b: int) -> int:
    """Index of the ``b``-bit level closest to ``phi`` in circular distance."""
    if int(b) != b or b < 1:
        raise InvalidInputError(f"bits must be a positive integer, got {b}")
    return int(_nearest_level(float(phi), 2 ** int(b)))


def quantize_phases(theta_cont: PhaseShiftVector, b: int) -> PhaseShiftVector:
    """Round every continuous phase to its nearest ``b``-bit level."""
    if theta_cont.is_discrete:
        raise InvalidInputError("quantize_phases expects continuous phases")
    if int(b) != b or b < 1:
        raise InvalidInputError(f"bits must be a positive integer, got {b}")
    return PhaseShiftVector.discrete(_quantize(theta_cont.angles(), 2 ** int(b)), int(b))


def ao_discrete(ws: SolverWorkspace, theta_init: PhaseShiftVector, budget: LinkBudget,
                max_sweeps: int = DEFAULT_MAX_SWEEPS) -> SolveResult:
    """Element-wise alternating optimization over discrete phases.

    Elements are visited in index order; the loop stops after a sweep that
    changes no index, or after ``max_sweeps`` sweeps (``converged=False``).
    """
    if not theta_init.is_discrete:
        raise InvalidInputError("ao_discrete expects discrete initial phases")
    return _alternate(ws, theta_init, budget, max_sweeps, 0.0)


def continuous_phase_solution(ws: SolverWorkspace, theta_init: PhaseShiftVector,
                              budget: LinkBudget, max_sweeps: int = DEFAULT_MAX_SWEEPS,
                              tol: float = CONTINUOUS_TOL) -> SolveResult:
    """Alternating optimization with unquantized phases (continuous benchmark).

    Converged once no element moves by ``tol`` radians or more in a sweep.
    """
    if theta_init.is_discrete:
        raise InvalidInputError("continuous_phase_solution expects continuous phases")
    return _alternate(ws, theta_init, budget, max_sweeps, tol)


def evaluate_phases(ws: SolverWorkspace, theta: PhaseShiftVector,
                    budget: LinkBudget) -> SolveResult:
    """Wrap fixed phases in a SolveResult (MRT beam, required power)."""
    h = ws.combined(theta)
    return _finish(ws, theta, budget, 0, True, [np.vdot(h, h).real])


def exhaustive_search(ws: SolverWorkspace, b: int, budget: LinkBudget,
                      chunk: int = 1 << 16) -> SolveResult:
    """Global optimum over all ``2**(b*N)`` discrete phase vectors.

    Ties go to the lexicographically smallest index vector.
    """
    if int(b) != b or b < 1:
        raise InvalidInputError(f"bits must be a positive integer, got {b}")
    b = int(b)
    N = ws.N
    if b * N > MAX_EXHAUSTIVE_BITS:
        raise InstanceTooLargeError(
            f"exhaustive search over 2^{b * N} vectors refused (limit 2^{MAX_EXHAUSTIVE_BITS})"
        )
    K = 2 ** b
    levels = np.exp(1j * np.arange(K) * (TWO_PI / K))
    place = K ** np.arange(N - 1, -1, -1, dtype=np.int64)
    hd_row = np.conj(ws.h_d)
    total = K ** N
    best_obj = -np.inf
    best_id = 0
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (ids[:, None] // place) % K
        C = levels[digits] @ ws.Phi + hd_row
        obj = np.einsum("ij,ij->i", C.real, C.real) + np.einsum("ij,ij->i", C.imag, C.imag)
        j = int(np.argmax(obj))
        if obj[j] > best_obj:
            best_obj = float(obj[j])
            best_id = int(ids[j])
    best = (best_id // place) % K
    theta = PhaseShiftVector.discrete(best, b)
    return _finish(ws, theta, budget, 1, True, [best_obj])


class PipelineResult(NamedTuple):
    continuous: SolveResult
    initial: Optional[SolveResult]
    final: SolveResult


def solve_pipeline(ws: SolverWorkspace, bits: Optional[int], budget: LinkBudget,
                   max_sweeps: int = DEFAULT_MAX_SWEEPS) -> PipelineResult:
    """Continuous AO from zero phases, then quantization, then discrete AO.

    ``initial`` is the quantized continuous solution (the initialization
    benchmark); it and the discrete stage are skipped when ``bits`` is None.
    """
    cont = continuous_phase_solution(ws, PhaseShiftVector.zeros(ws.N), budget, max_sweeps)
    if bits is None:
        return PipelineResult(cont, None, cont)
    theta0 = quantize_phases(cont.theta, bits)
    init = evaluate_phases(ws, theta0, budget)
    final = ao_discrete(ws, theta0, budget, max_sweeps)
    return PipelineResult(cont, init, final)


def solve_p1(ch: ChannelRealization, bits: Optional[int], budget: LinkBudget,
             max_sweeps: int = DEFAULT_MAX_SWEEPS) -> SolveResult:
    """Minimum-power beamformer and phases for one channel realization.

    ``bits=None`` solves the continuous-phase problem.
    """
    return solve_pipeline(build_workspace(ch), bits, budget, max_sweeps).final
