"""Dense complex linear algebra for small Hilbert spaces.

State vectors are 1-d complex numpy arrays, operators are square complex
matrices. Everything here is a pure function; nothing is mutated.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NonHermitianError
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "as_state",
    "as_operator",
    "inner",
    "norm",
    "hermiticity_defect",
    "unitarity_defect",
    "expi_hermitian",
    "check_normalized",
]


def as_state(psi, dim: int | None = None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Coerce to a finite 1-d complex vector, optionally enforcing its dimension."""
    a = np.asarray(psi, dtype=complex)
    if a.ndim != 1 or a.size < 1:
        raise DimensionMismatchError(f"state must be a 1-d vector, got shape {a.shape}")
    if a.size > tol.max_dim:
        raise DimensionMismatchError(f"dimension {a.size} exceeds configured cap {tol.max_dim}")
    if dim is not None and a.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {a.size}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("state contains non-finite amplitudes")
    return a


def as_operator(m, dim: int | None = None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"operator must be square, got shape {a.shape}")
    if a.shape[0] > tol.max_dim:
        raise DimensionMismatchError(f"dimension {a.shape[0]} exceeds configured cap {tol.max_dim}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("operator contains non-finite entries")
    return a


def inner(a, b) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def check_normalized(psi, tol: Tolerances = DEFAULT) -> np.ndarray:
    psi = as_state(psi, tol=tol)
    drift = abs(norm(psi) - 1.0)
    if drift > tol.normalized_state:
        raise ValueError(f"state not normalized: | ||psi|| - 1 | = {drift:.3e}")
    return psi


def hermiticity_defect(m) -> float:
    """max|M - M^H|, zero for exactly Hermitian input."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"operator must be square, got shape {a.shape}")
    return float(np.max(np.abs(a - a.conj().T)))


def unitarity_defect(u) -> float:
    """max|U^H U - I|."""
    a = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))


def _require_hermitian(h: np.ndarray, tol: Tolerances) -> None:
    defect = hermiticity_defect(h)
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if defect > tol.hermiticity * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: max|H - H^H| = {defect:.3e} "
            f"(allowed {tol.hermiticity * scale:.3e})"
        )


def expi_hermitian(h, dt: float, hbar: float = 1.0, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Unitary exp(-i H dt / hbar) of a Hermitian H, via eigendecomposition.

    The eigendecomposition route keeps the result unitary to round-off, which
    matters more than speed for phase extraction at these dimensions.
    """
    h = as_operator(h, tol=tol)
    if not np.isfinite(dt):
        raise ValueError(f"dt must be finite, got {dt}")
    _require_hermitian(h, tol)
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * (dt / hbar))
    return (evecs * phases) @ evecs.conj().T
