"""
Thermodynamic frame of the coin: entanglement Hamiltonian, temperature,
equilibrium state, and the entropy balance along a trajectory.

The asymptotic coin state of a wide walker is the Gibbs state of
H = −ε σ·v with v = (sin θ, 0, cos θ). Its Bloch vector is cos α · v, which
fixes the inverse temperature through tanh(βε) = cos α, i.e.
βε = ln cot(α/2). Generated entropy is computed twice: from the entropy
balance S_vN − βQ, and as a drop in relative entropy to the equilibrium state.
The two agree identically for a pure initial coin state.

All quantities are dimensionless with k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .reduced import PAULI, BlochVector, bloch, von_neumann_entropy
from .walk import ChiralitySpec

__all__ = [
    "ALPHA_MIN",
    "DegenerateTemperature",
    "DegenerateDynamics",
    "SupportMismatch",
    "ThermoContext",
    "TimeSeriesRecord",
    "axis_v",
    "alpha_of",
    "equilibrium_matrix",
    "build_context",
    "internal_energy",
    "heat_cumulative",
    "sgen_balance",
    "relative_entropy",
    "sgen_relent",
    "sgen_asymptotic",
    "rotate_pi",
    "rotation_diagnostic",
    "record",
]

ALPHA_MIN = 1e-3
SUPPORT_EPS = 1e-14
CONTEXT_ATOL = 1e-12


class DegenerateTemperature(ValueError):
    """α too close to 0 or π: the equilibrium state is (nearly) pure."""


class DegenerateDynamics(ValueError):
    """Coin angle for which the walk does not equilibrate (θ = 0 or π/2)."""


class SupportMismatch(ValueError):
    """Relative entropy is infinite: ρ has weight outside the support of σ."""


@dataclass(frozen=True)
class ThermoContext:
    theta: float
    epsilon: float
    alpha: float
    beta: float
    t_ent: float
    axis_v: NDArray[np.float64]
    hamiltonian: NDArray[np.complex128]
    rho_eq: NDArray[np.complex128]

    @property
    def beta_eps(self) -> float:
        return self.beta * self.epsilon


@dataclass(frozen=True)
class TimeSeriesRecord:
    t: int
    norm: float
    s_vn: float
    energy: float
    heat_cum: float
    q_over_t: float
    sgen_balance: float
    sgen_relent: float
    bloch: BlochVector
    cos_alpha_t: float


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < math.pi / 2:
        raise DegenerateDynamics(
            f"thermodynamic analysis needs 0 < theta < pi/2, got {theta!r}"
        )


def axis_v(theta: float) -> NDArray[np.float64]:
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def alpha_of(theta: float, chirality: ChiralitySpec) -> float:
    """Angle between the initial coin Bloch vector and v, in [0, π]."""
    _check_theta(theta)
    g, p = chirality.gamma, chirality.phi
    cos_alpha = math.cos(theta) * math.cos(g) + math.sin(theta) * math.sin(g) * math.cos(p)
    return math.acos(min(1.0, max(-1.0, cos_alpha)))


def equilibrium_matrix(theta: float, alpha: float) -> NDArray[np.complex128]:
    """Asymptotic coin state ½[[1 + cα cθ, cα sθ], [cα sθ, 1 − cα cθ]]."""
    ca = math.cos(alpha)
    c, s = math.cos(theta), math.sin(theta)
    return 0.5 * np.array(
        [[1 + ca * c, ca * s], [ca * s, 1 - ca * c]], dtype=np.complex128
    )


def _check_alpha(alpha: float, alpha_min: float) -> None:
    if not alpha_min < alpha < math.pi - alpha_min:
        raise DegenerateTemperature(
            f"alpha={alpha!r} lies outside the guard band "
            f"({alpha_min}, pi - {alpha_min}); the equilibrium state is too close "
            "to pure for a finite temperature"
        )


def build_context(
    theta: float,
    epsilon: float = 1.0,
    alpha: float = math.pi / 4,
    alpha_min: float = ALPHA_MIN,
) -> ThermoContext:
    """
    Assemble the thermodynamic frame for coin angle ``theta`` and circle ``alpha``.

    Raises
    ------
    DegenerateTemperature
        If ``alpha`` is within ``alpha_min`` of 0 or π.
    DegenerateDynamics
        If ``theta`` is not strictly inside (0, π/2).
    """
    _check_theta(theta)
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    _check_alpha(alpha, alpha_min)

    v = axis_v(theta)
    sigma_v = v[0] * PAULI[0] + v[1] * PAULI[1] + v[2] * PAULI[2]
    hamiltonian = -epsilon * sigma_v
    beta_eps = math.log(1.0 / math.tan(alpha / 2.0))
    beta = beta_eps / epsilon
    t_ent = math.inf if beta_eps == 0.0 else 1.0 / beta

    rho_eq = equilibrium_matrix(theta, alpha)
    gibbs = _gibbs(hamiltonian, beta)
    if not np.allclose(gibbs, rho_eq, rtol=0.0, atol=CONTEXT_ATOL):
        raise AssertionError(
            "Gibbs state of the entanglement Hamiltonian disagrees with the "
            f"asymptotic coin state:\n{gibbs}\nvs\n{rho_eq}"
        )
    return ThermoContext(theta, epsilon, alpha, beta, t_ent, v, hamiltonian, rho_eq)


def _gibbs(hamiltonian, beta):
    # exp(−βH)/Z via the Hermitian eigendecomposition
    w, u = np.linalg.eigh(hamiltonian)
    weights = np.exp(-beta * (w - w.min()))
    weights /= weights.sum()
    return (u * weights) @ u.conj().T


def internal_energy(rho, ctx: ThermoContext) -> float:
    """⟨H⟩ = tr(ρ H) = −ε B·v."""
    return float(np.trace(np.asarray(rho) @ ctx.hamiltonian).real)


def heat_cumulative(e_t: float, e_0: float) -> float:
    return e_t - e_0


def sgen_balance(s_vn: float, heat_cum: float, ctx: ThermoContext) -> float:
    """S_vN(t) − Q_{0→t}/T_ent for a pure initial coin state."""
    return s_vn - ctx.beta * heat_cum


def _eigh_psd(rho):
    rho = np.asarray(rho, dtype=np.complex128)
    w, u = np.linalg.eigh((rho + rho.conj().T) / 2)
    return np.clip(w, 0.0, None), u


def relative_entropy(rho, sigma) -> float:
    """
    D(ρ‖σ) = tr ρ ln ρ − tr ρ ln σ in nats.

    Raises
    ------
    SupportMismatch
        If σ has an eigenvalue below 1e-14 whose eigenvector carries weight
        under ρ.
    """
    p, _ = _eigh_psd(rho)
    q, w = _eigh_psd(sigma)
    # weight of ρ along each eigenvector of σ: ⟨w_j|ρ|w_j⟩
    overlap = np.einsum("ij,ik,kj->j", w.conj(), np.asarray(rho), w).real
    neg_entropy = float(sum(x * math.log(x) for x in p if x > 0.0))
    cross = 0.0
    for qj, mj in zip(q, overlap):
        if qj < SUPPORT_EPS:
            if mj > SUPPORT_EPS:
                raise SupportMismatch(
                    f"sigma eigenvalue {qj:.3e} has rho weight {mj:.3e}"
                )
            continue
        cross += mj * math.log(qj)
    return neg_entropy - cross


def sgen_relent(rho_0, rho_t, ctx: ThermoContext) -> float:
    """D(ρ_0‖ρ_eq) − D(ρ_t‖ρ_eq)."""
    return relative_entropy(rho_0, ctx.rho_eq) - relative_entropy(rho_t, ctx.rho_eq)


def sgen_asymptotic(alpha: float, alpha_min: float = ALPHA_MIN) -> float:
    """ln 2 + cos α · ln tan(α/2) − ln sin α."""
    _check_alpha(alpha, alpha_min)
    return (
        math.log(2.0)
        + math.cos(alpha) * math.log(math.tan(alpha / 2.0))
        - math.log(math.sin(alpha))
    )


def rotate_pi(vec, axis) -> NDArray[np.float64]:
    """Rotate ``vec`` by π about the unit vector ``axis``: 2(b·v)v − b."""
    b = np.asarray(vec, dtype=float)
    v = np.asarray(axis, dtype=float)
    return 2.0 * np.dot(b, v) * v - b


def rotation_diagnostic(bloch_t, bloch_t1, ctx: ThermoContext) -> float:
    """
    Distance between the next Bloch vector and the current one rotated by π
    about v. Small values mean the one-step coin dynamics is close to the
    unitary generated by the entanglement Hamiltonian.
    """
    predicted = rotate_pi(bloch_t, ctx.axis_v)
    return float(np.linalg.norm(np.asarray(bloch_t1, dtype=float) - predicted))


def record(
    t: int,
    rho,
    rho_0,
    energy_0: float,
    norm: float,
    ctx: ThermoContext,
) -> TimeSeriesRecord:
    """Evaluate every thermodynamic column for the coin state ``rho`` at step t."""
    s_vn = von_neumann_entropy(rho)
    energy = internal_energy(rho, ctx)
    heat = heat_cumulative(energy, energy_0)
    b = bloch(rho)
    return TimeSeriesRecord(
        t=t,
        norm=norm,
        s_vn=s_vn,
        energy=energy,
        heat_cum=heat,
        q_over_t=ctx.beta * heat,
        sgen_balance=sgen_balance(s_vn, heat, ctx),
        sgen_relent=sgen_relent(rho_0, rho, ctx),
        bloch=b,
        cos_alpha_t=float(np.dot(b.as_array(), ctx.axis_v)),
    )
