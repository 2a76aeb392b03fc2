"""Norm-preserving propagation of the time-dependent Schroedinger equation.

The propagator is the exponential-midpoint rule: each step applies the exact
unitary of the Hamiltonian frozen at the step midpoint. Second order accurate
and exactly unitary per step, which phase observables require.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import hilbert
from .errors import DimensionMismatchError, NonHermitianError
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "TimeGrid",
    "HamiltonianSchedule",
    "Trajectory",
    "propagate",
    "expand_in_frame",
    "fidelity",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, t_end] with `steps` intervals."""

    t_end: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not (self.t_end > 0.0 and np.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive and finite, got {self.t_end}")

    @property
    def t_start(self) -> float:
        return 0.0

    @property
    def dt(self) -> float:
        return self.t_end / self.steps

    def nodes(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.steps) + 0.5) * self.dt


@dataclass(frozen=True)
class HamiltonianSchedule:
    """Map t -> Hermitian matrix, with optional vectorized evaluation.

    `evaluate_many`, when given, takes an array of times and returns the
    stacked matrices (len(ts), dim, dim); it must agree with `evaluate`.
    """

    evaluate: Callable[[float], np.ndarray]
    dim: int
    metadata: Mapping = field(default_factory=dict)
    evaluate_many: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate(t)

    def sample(self, ts: np.ndarray) -> np.ndarray:
        if self.evaluate_many is not None:
            return np.asarray(self.evaluate_many(np.asarray(ts, dtype=float)), dtype=complex)
        return np.stack([np.asarray(self.evaluate(t), dtype=complex) for t in np.asarray(ts)])


@dataclass(frozen=True)
class Trajectory:
    """States on the nodes of a time grid; states[k] is psi(t_k)."""

    grid: TimeGrid
    states: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.states, dtype=complex)
        if s.ndim != 2 or s.shape[0] != self.grid.steps + 1:
            raise DimensionMismatchError(
                f"states must have shape (steps+1, dim), got {s.shape} for steps={self.grid.steps}"
            )
        object.__setattr__(self, "states", s)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def norm_drift(self) -> float:
        norms = np.linalg.norm(self.states, axis=1)
        return float(np.max(np.abs(norms - norms[0])))


def _step_unitaries(hams: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(hams)
    phases = np.exp(-1j * evals * (dt / hbar))
    return np.einsum("kij,kj,klj->kil", evecs, phases, evecs.conj())


def _prefix_products(u: np.ndarray) -> np.ndarray:
    """p[k] = u[k] @ u[k-1] @ ... @ u[0], for a stack of square matrices.

    Work-efficient recursive scan (about 2n batched matmuls) instead of a
    Python loop. The balanced re-association keeps unitary round-off growth
    logarithmic in the step count.
    """
    n = u.shape[0]
    if n <= 2:
        out = u.copy()
        if n == 2:
            out[1] = u[1] @ u[0]
        return out
    m = n // 2
    scanned = _prefix_products(np.matmul(u[1 : 2 * m : 2], u[0 : 2 * m : 2]))
    out = np.empty_like(u)
    out[0] = u[0]
    out[1 : 2 * m : 2] = scanned
    out[2 : 2 * m : 2] = np.matmul(u[2 : 2 * m : 2], scanned[:-1])
    if n % 2:
        out[-1] = u[-1] @ scanned[-1]
    return out


# steps per scan block, scaled down with dimension to bound peak memory
_SCAN_BLOCK_ELEMENTS = 1 << 21


def propagate(
    schedule: HamiltonianSchedule,
    psi0,
    grid: TimeGrid,
    hbar: float = 1.0,
    tol: Tolerances = DEFAULT,
) -> Trajectory:
    """Propagate psi0 over the grid: states[k+1] = exp(-i H(t_k + dt/2) dt / hbar) states[k].

    Global error is O(dt^2) against the exact flow; each step is exactly
    unitary, so the norm is preserved to round-off. Raises NonHermitianError
    naming the offending midpoint if the schedule is not Hermitian there.
    """
    psi = hilbert.check_normalized(psi0, tol=tol)
    if psi.size != schedule.dim:
        raise DimensionMismatchError(
            f"state dimension {psi.size} does not match schedule dimension {schedule.dim}"
        )
    mids = grid.midpoints()
    dim = psi.size
    states = np.empty((grid.steps + 1, dim), dtype=complex)
    states[0] = psi
    block = max(16, _SCAN_BLOCK_ELEMENTS // (dim * dim))
    pos = 0
    while pos < grid.steps:
        take = min(block, grid.steps - pos)
        hams = schedule.sample(mids[pos : pos + take])
        defects = np.max(np.abs(hams - hams.conj().transpose(0, 2, 1)), axis=(1, 2))
        scales = np.maximum(1.0, np.max(np.abs(hams), axis=(1, 2)))
        bad = np.nonzero(defects > tol.hermiticity * scales)[0]
        if bad.size:
            k = int(bad[0])
            raise NonHermitianError(
                f"Hamiltonian not Hermitian at t = {mids[pos + k]!r}: defect {defects[k]:.3e}"
            )
        prefixes = _prefix_products(_step_unitaries(hams, grid.dt, hbar))
        np.einsum("kij,j->ki", prefixes, psi, out=states[pos + 1 : pos + take + 1])
        psi = states[pos + take]
        pos += take
    return Trajectory(grid=grid, states=states)


def expand_in_frame(traj: Trajectory, frame) -> np.ndarray:
    """Coefficients b[k, n] = <v_n(t_k) | psi(t_k)> of the trajectory over a moving frame."""
    if frame.dim != traj.dim:
        raise DimensionMismatchError(
            f"frame dimension {frame.dim} does not match trajectory dimension {traj.dim}"
        )
    ts = traj.grid.nodes()
    coeffs = np.empty((ts.size, frame.count), dtype=complex)
    for n in range(frame.count):
        vecs = frame.value_many(n, ts)
        coeffs[:, n] = np.einsum("ki,ki->k", vecs.conj(), traj.states)
    return coeffs


def fidelity(a: Trajectory, b: Trajectory) -> float:
    """min over nodes of |<a_k|b_k>|^2; 1 means the rays coincide everywhere."""
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    overlaps = np.einsum("ki,ki->k", a.states.conj(), b.states)
    return float(np.min(np.abs(overlaps) ** 2))
