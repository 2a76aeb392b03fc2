"""Moving orthonormal frames, local gauge transformations, and holonomy.

A moving frame is a time-parametrized orthonormal set {v_n(t)}. The physics
lives in three derived objects:

* the connection A_n(t) = <v_n | i d/dt v_n>, a real angular velocity;
* the holonomy of a periodic frame, v_n(0)^H v_n(T) * exp(i Int_0^T A_n dt),
  a gauge-invariant complex number whose argument is the geometric phase;
* the effective Hamiltonian matrix over the frame,
  <v_n|H|v_m> - <v_n| i hbar d/dt |v_m>, whose diagonalization yields exact
  phases.

Multiplying v_n by a smooth phase e^{i alpha_n(t)} (a local gauge transform)
shifts the connection by -d(alpha_n)/dt and leaves the holonomy unchanged.
Parallel transport is the gauge choice that zeroes the connection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, NonHermitianError, NormalizationDriftError
from .hilbert import as_operator, hermiticity_defect, inner
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "MovingFrame",
    "GaugeFunction",
    "gauge_transform",
    "connection",
    "parallel_transport_fix",
    "holonomy",
    "eff_hamiltonian_matrix",
    "orthonormality_defect",
    "constant_gauge",
    "linear_gauge",
    "random_periodic_gauge",
]


@dataclass(frozen=True)
class MovingFrame:
    """Time-parametrized orthonormal set of `count` vectors in dimension `dim`.

    Vectors are sampled lazily through `value_fn(n, t)`; no grid is baked in,
    so one frame serves many grids. If `derivative_fn` is None, derivatives
    fall back to a symmetric finite difference with step `fd_step` (callers
    that know a grid should pass h = grid.dt / 8 explicitly). `period` is the
    frame's period T, or None for aperiodic frames.
    """

    dim: int
    count: int
    value_fn: Callable[[int, float], np.ndarray]
    derivative_fn: Callable[[int, float], np.ndarray] | None = None
    period: float | None = None
    fd_step: float | None = None

    def __post_init__(self):
        if not (1 <= self.count <= self.dim):
            raise DimensionMismatchError(
                f"need 1 <= count <= dim, got count={self.count}, dim={self.dim}"
            )

    def _check_index(self, n: int) -> None:
        if not (0 <= n < self.count):
            raise IndexError(f"frame index {n} out of range [0, {self.count})")

    def value(self, n: int, t: float) -> np.ndarray:
        self._check_index(n)
        return np.asarray(self.value_fn(n, float(t)), dtype=complex)

    def value_many(self, n: int, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.stack([self.value(n, t) for t in ts])

    def default_fd_step(self) -> float:
        if self.fd_step is not None:
            return self.fd_step
        return 1e-6 * (self.period if self.period else 1.0)

    def derivative(self, n: int, t: float, h: float | None = None) -> np.ndarray:
        """d/dt v_n at t: analytic callback when present, else symmetric difference."""
        self._check_index(n)
        if self.derivative_fn is not None:
            return np.asarray(self.derivative_fn(n, float(t)), dtype=complex)
        step = h if h is not None else self.default_fd_step()
        return (self.value(n, t + step) - self.value(n, t - step)) / (2.0 * step)


@dataclass(frozen=True)
class GaugeFunction:
    """Smooth per-index phase angles alpha(n, t), with optional analytic d/dt."""

    alpha: Callable[[int, float], float]
    dalpha: Callable[[int, float], float] | None = None
    period: float | None = None

    def periodicity_defect(self, n: int) -> float:
        """Distance of alpha(n, T) - alpha(n, 0) from the nearest multiple of 2 pi."""
        if self.period is None:
            raise ValueError("gauge has no period")
        jump = self.alpha(n, self.period) - self.alpha(n, 0.0)
        return abs(jump - 2.0 * np.pi * round(jump / (2.0 * np.pi)))


def constant_gauge(c: float, period: float | None = None) -> GaugeFunction:
    return GaugeFunction(alpha=lambda n, t: c, dalpha=lambda n, t: 0.0, period=period)


def linear_gauge(rate: float, period: float | None = None) -> GaugeFunction:
    return GaugeFunction(alpha=lambda n, t: rate * t, dalpha=lambda n, t: rate, period=period)


def random_periodic_gauge(
    period: float,
    rng: np.random.Generator,
    n_modes: int = 4,
    scale: float = 1.0,
    max_winding: int = 2,
) -> GaugeFunction:
    """Random smooth gauge, periodic mod 2 pi: Fourier series plus integer winding."""
    a = rng.uniform(-scale, scale, size=n_modes)
    b = rng.uniform(-scale, scale, size=n_modes)
    a0 = rng.uniform(-np.pi, np.pi)
    winding = int(rng.integers(-max_winding, max_winding + 1))
    w = 2.0 * np.pi / period
    ks = np.arange(1, n_modes + 1)

    def alpha(n: int, t: float) -> float:
        return float(
            a0
            + winding * w * t
            + np.sum(a * np.cos(ks * w * t) + b * np.sin(ks * w * t))
        )

    def dalpha(n: int, t: float) -> float:
        return float(
            winding * w + np.sum(ks * w * (-a * np.sin(ks * w * t) + b * np.cos(ks * w * t)))
        )

    return GaugeFunction(alpha=alpha, dalpha=dalpha, period=period)


def gauge_transform(frame: MovingFrame, gauge: GaugeFunction) -> MovingFrame:
    """Frame with v_n replaced by e^{i alpha_n(t)} v_n; orthonormality is preserved exactly.

    The derivative picks up the product-rule term i d(alpha_n)/dt; it stays
    analytic only when both the frame derivative and d(alpha)/dt are supplied.
    """

    def value_fn(n: int, t: float) -> np.ndarray:
        return np.exp(1j * gauge.alpha(n, t)) * frame.value(n, t)

    derivative_fn = None
    if frame.derivative_fn is not None and gauge.dalpha is not None:

        def derivative_fn(n: int, t: float) -> np.ndarray:
            phase = np.exp(1j * gauge.alpha(n, t))
            return phase * (1j * gauge.dalpha(n, t) * frame.value(n, t) + frame.derivative(n, t))

    return MovingFrame(
        dim=frame.dim,
        count=frame.count,
        value_fn=value_fn,
        derivative_fn=derivative_fn,
        period=frame.period,
        fd_step=frame.fd_step,
    )


def _connection_and_drift(frame: MovingFrame, n: int, t: float, h: float | None) -> tuple[float, float]:
    v = frame.value(n, t)
    dv = frame.derivative(n, t, h=h)
    val = inner(v, 1j * dv)
    return float(val.real), float(val.imag)


def connection(
    frame: MovingFrame,
    n: int,
    t: float,
    h: float | None = None,
    tol: Tolerances = DEFAULT,
) -> float:
    """Connection A_n(t) = Re <v_n | i d/dt v_n>, an angular velocity in rad/time.

    For a norm-preserving frame the inner product is purely real; its
    imaginary part measures norm drift and is rejected above tolerance.
    """
    a, drift = _connection_and_drift(frame, n, t, h)
    if abs(drift) > tol.connection_drift * max(1.0, abs(a)):
        raise NormalizationDriftError(
            f"frame vector {n} norm drifts at t={t!r}: Im<v|i dv/dt> = {drift:.3e}"
        )
    return a


def connection_many(
    frame: MovingFrame,
    n: int,
    ts,
    h: float | None = None,
    tol: Tolerances = DEFAULT,
) -> np.ndarray:
    return np.array([connection(frame, n, t, h=h, tol=tol) for t in np.asarray(ts, dtype=float)])


def parallel_transport_fix(
    frame: MovingFrame,
    n: int,
    steps: int = 4096,
    t_end: float | None = None,
    tol: Tolerances = DEFAULT,
) -> MovingFrame:
    """Re-phase vector n so its connection vanishes: v -> exp(i Int_0^t A) v.

    The accumulated phase is tabulated by the composite trapezoid rule on a
    uniform grid over [0, t_end] (default: one period) and completed by a
    local trapezoid segment at off-node times. The returned frame's
    derivative uses the exact rate A(t), so its connection is zero to
    round-off everywhere, not just at the nodes.
    """
    if t_end is None:
        t_end = frame.period
    if t_end is None:
        raise ValueError("parallel transport needs t_end for an aperiodic frame")
    ts = np.linspace(0.0, t_end, steps + 1)
    fd_h = _grid_fd_step(frame, ts)
    rates = connection_many(frame, n, ts, h=fd_h, tol=tol)
    dt = ts[1] - ts[0]
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (rates[1:] + rates[:-1]) * dt)])

    def alpha(m: int, t: float) -> float:
        if m != n:
            return 0.0
        k = int(np.clip(np.floor(t / dt), 0, steps - 1))
        a_t = connection(frame, n, t, h=fd_h, tol=tol)
        return float(cumulative[k] + 0.5 * (t - ts[k]) * (rates[k] + a_t))

    def dalpha(m: int, t: float) -> float:
        if m != n:
            return 0.0
        return connection(frame, n, t, h=fd_h, tol=tol)

    return gauge_transform(
        frame, GaugeFunction(alpha=alpha, dalpha=dalpha if frame.derivative_fn else None, period=frame.period)
    )


def _grid_fd_step(frame: MovingFrame, ts: np.ndarray) -> float | None:
    """Fallback finite-difference step for grid-sampling ops: grid step / 8."""
    if frame.derivative_fn is not None:
        return None
    return float(ts[1] - ts[0]) / 8.0


def holonomy(frame: MovingFrame, n: int, steps: int = 4096, tol: Tolerances = DEFAULT) -> complex:
    """Gauge-invariant holonomy of vector n over one period.

    Returns v_n(0)^H v_n(T) * exp(i Int_0^T A_n dt) with the integral by the
    composite trapezoid rule; for smooth periodic frames the rule is
    spectrally accurate. The modulus never exceeds 1 (up to round-off).
    """
    if frame.period is None:
        raise ValueError("holonomy requires a periodic frame")
    ts = np.linspace(0.0, frame.period, steps + 1)
    rates = connection_many(frame, n, ts, h=_grid_fd_step(frame, ts), tol=tol)
    integral = float(np.trapezoid(rates, dx=ts[1] - ts[0]))
    prefactor = inner(frame.value(n, 0.0), frame.value(n, frame.period))
    return prefactor * np.exp(1j * integral)


def eff_hamiltonian_matrix(
    frame: MovingFrame,
    hamiltonian,
    t: float,
    hbar: float = 1.0,
    h: float | None = None,
    tol: Tolerances = DEFAULT,
) -> np.ndarray:
    """Effective Hamiltonian over the frame: <v_n|H(t)|v_m> - <v_n| i hbar d/dt |v_m>.

    `hamiltonian` may be a schedule object (anything with .evaluate), a
    callable t -> matrix, or a static matrix. Hermitian input is required;
    the output is Hermitian whenever the frame is orthonormal and its
    derivatives are consistent.
    """
    if hasattr(hamiltonian, "evaluate"):
        h_t = hamiltonian.evaluate(t)
    elif callable(hamiltonian):
        h_t = hamiltonian(t)
    else:
        h_t = hamiltonian
    h_t = as_operator(h_t, dim=frame.dim, tol=tol)
    defect = hermiticity_defect(h_t)
    scale = max(1.0, float(np.max(np.abs(h_t))))
    if defect > tol.hermiticity * scale:
        raise NonHermitianError(f"H(t={t!r}) is not Hermitian: defect {defect:.3e}")
    vecs = np.stack([frame.value(n, t) for n in range(frame.count)])
    derivs = np.stack([frame.derivative(n, t, h=h) for n in range(frame.count)])
    return vecs.conj() @ h_t @ vecs.T - 1j * hbar * (vecs.conj() @ derivs.T)


def orthonormality_defect(frame: MovingFrame, ts) -> float:
    """max over sampled times of max|V^H V - I| for the frame matrix V."""
    worst = 0.0
    for t in np.asarray(ts, dtype=float):
        vecs = np.stack([frame.value(n, t) for n in range(frame.count)], axis=1)
        gram = vecs.conj().T @ vecs
        worst = max(worst, float(np.max(np.abs(gram - np.eye(frame.count)))))
    return worst
