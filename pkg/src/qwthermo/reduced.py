"""
Coin reduced density matrix and its single-qubit summaries.

Density matrices are plain 2×2 complex arrays in the {|+⟩, |−⟩} basis. The
Bloch convention is ρ = (I + x σx + y σy + z σz) / 2 with the standard Pauli
matrices. Entropies use the natural logarithm and are in units of k_B.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from .walk import WalkerState

__all__ = [
    "PAULI",
    "BlochVector",
    "reduce",
    "bloch",
    "from_bloch",
    "spectrum",
    "von_neumann_entropy",
    "binary_entropy",
    "is_density_matrix",
]

EIGEN_CLAMP = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


def reduce(state: WalkerState) -> NDArray[np.complex128]:
    """
    Trace out position from the walker state.

    ρ_++ = Σ|a_n|², ρ_+− = Σ a_n b_n*, ρ_−− = Σ|b_n|², ρ_−+ = conj(ρ_+−).
    """
    a, b = state.up_amps, state.down_amps
    rho_pp = np.vdot(a, a).real
    rho_mm = np.vdot(b, b).real
    rho_pm = np.vdot(b, a)
    return np.array([[rho_pp, rho_pm], [np.conj(rho_pm), rho_mm]], dtype=np.complex128)


def bloch(rho) -> BlochVector:
    rho = np.asarray(rho)
    off = rho[0, 1]
    return BlochVector(
        float(2.0 * off.real),
        float(-2.0 * off.imag),
        float((rho[0, 0] - rho[1, 1]).real),
    )


def from_bloch(vec) -> NDArray[np.complex128]:
    """Inverse of :func:`bloch`: (I + B·σ) / 2."""
    x, y, z = (float(c) for c in vec)
    return np.array(
        [[(1 + z) / 2, (x - 1j * y) / 2], [(x + 1j * y) / 2, (1 - z) / 2]],
        dtype=np.complex128,
    )


def spectrum(rho) -> tuple[float, float]:
    """
    Eigenvalues (λ+, λ−) = ((1 + |B|)/2, (1 − |B|)/2), clamped into [0, 1].

    λ+ ≥ λ− and λ+ + λ− == 1 hold exactly.
    """
    r = bloch(rho).norm
    lam_minus = min(max((1.0 - r) / 2.0, 0.0), 0.5)
    return 1.0 - lam_minus, lam_minus


def binary_entropy(p: float) -> float:
    """−p ln p − (1−p) ln(1−p) with 0 ln 0 = 0."""
    total = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            total -= q * math.log(q)
    return total


def von_neumann_entropy(rho) -> float:
    """−Σ λ ln λ over the spectrum of ``rho``, in nats; lies in [0, ln 2]."""
    _, lam_minus = spectrum(rho)
    return binary_entropy(lam_minus)


def is_density_matrix(rho, atol: float = 1e-12) -> bool:
    """Hermitian, unit trace and eigenvalues in [−atol, 1 + atol]."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        return False
    if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=atol):
        return False
    if abs(np.trace(rho) - 1.0) > atol:
        return False
    eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return bool(eig.min() >= -atol and eig.max() <= 1.0 + atol)
