"""
State-vector evolution of the discrete-time quantum walk on the line.

The walker lives in position ⊗ chirality space. A state is stored as two dense
complex arrays of up (|+⟩) and down (|−⟩) amplitudes over a contiguous window
of integer sites starting at ``n_min``. One step applies the coin to every
site's spinor and then moves up-amplitudes one site right and down-amplitudes
one site left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "CoinParams",
    "ChiralitySpec",
    "Gaussian",
    "Uniform",
    "Localized",
    "InitialStateSpec",
    "WalkerState",
    "build_coin",
    "build_initial_state",
    "step",
    "evolve",
]

GAUSSIAN_CUTOFF = 6.0


@dataclass(frozen=True)
class CoinParams:
    """Coin bias angle θ in radians; θ = π/4 is the Hadamard walk."""

    theta: float = math.pi / 4

    def __post_init__(self):
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"coin angle must lie in [0, pi/2], got {self.theta!r}")


@dataclass(frozen=True)
class ChiralitySpec:
    """Initial coin spinor (cos(γ/2), e^{iφ} sin(γ/2))."""

    gamma: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.gamma) or not 0.0 <= self.gamma <= math.pi:
            raise ValueError(f"gamma must lie in [0, pi], got {self.gamma!r}")
        if not math.isfinite(self.phi) or not 0.0 <= self.phi < 2 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi!r}")

    def spinor(self) -> NDArray[np.complex128]:
        return np.array(
            [math.cos(self.gamma / 2), np.exp(1j * self.phi) * math.sin(self.gamma / 2)],
            dtype=np.complex128,
        )


@dataclass(frozen=True)
class Gaussian:
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"Gaussian width must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class Uniform:
    count: int

    def __post_init__(self):
        if isinstance(self.count, bool) or int(self.count) != self.count:
            raise ValueError(f"Uniform count must be an integer, got {self.count!r}")
        if self.count < 1 or self.count % 2 == 0:
            raise ValueError(f"Uniform count must be odd and positive, got {self.count}")


@dataclass(frozen=True)
class Localized:
    site: int = 0

    def __post_init__(self):
        if isinstance(self.site, bool) or int(self.site) != self.site:
            raise ValueError(f"Localized site must be an integer, got {self.site!r}")


Family = Union[Gaussian, Uniform, Localized]


@dataclass(frozen=True)
class InitialStateSpec:
    family: Family
    chirality: ChiralitySpec = field(default_factory=ChiralitySpec)

    def __post_init__(self):
        if not isinstance(self.family, (Gaussian, Uniform, Localized)):
            raise TypeError(f"unknown initial-state family {self.family!r}")


@dataclass
class WalkerState:
    """
    Pure walker state over the sites ``n_min .. n_min + len(up_amps) - 1``.

    Sites outside the window carry zero amplitude.
    """

    n_min: int
    up_amps: NDArray[np.complex128]
    down_amps: NDArray[np.complex128]

    def __post_init__(self):
        self.up_amps = np.asarray(self.up_amps, dtype=np.complex128)
        self.down_amps = np.asarray(self.down_amps, dtype=np.complex128)
        if self.up_amps.ndim != 1 or self.up_amps.shape != self.down_amps.shape:
            raise ValueError("up and down amplitude arrays must be 1-D with equal length")
        self.n_min = int(self.n_min)

    def __len__(self) -> int:
        return self.up_amps.shape[0]

    @property
    def n_max(self) -> int:
        return self.n_min + len(self) - 1

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.n_min, self.n_max + 1)

    def norm(self) -> float:
        """Sum of |a_n|² + |b_n|² over the window."""
        return float(np.vdot(self.up_amps, self.up_amps).real
                     + np.vdot(self.down_amps, self.down_amps).real)

    def support(self) -> Optional[tuple[int, int]]:
        """Leftmost and rightmost occupied sites, or None for the zero vector."""
        occupied = np.flatnonzero((self.up_amps != 0) | (self.down_amps != 0))
        if occupied.size == 0:
            return None
        return self.n_min + int(occupied[0]), self.n_min + int(occupied[-1])

    def amplitude(self, n: int) -> tuple[complex, complex]:
        """(a_n, b_n) at site n; zero outside the window."""
        i = n - self.n_min
        if 0 <= i < len(self):
            return complex(self.up_amps[i]), complex(self.down_amps[i])
        return 0j, 0j

    def copy(self) -> "WalkerState":
        return WalkerState(self.n_min, self.up_amps.copy(), self.down_amps.copy())


def build_coin(params: CoinParams) -> NDArray[np.complex128]:
    """
    Return the real symmetric coin [[cos θ, sin θ], [sin θ, −cos θ]].

    The matrix is both unitary and Hermitian, so applying it twice is the
    identity.
    """
    c, s = math.cos(params.theta), math.sin(params.theta)
    return np.array([[c, s], [s, -c]], dtype=np.complex128)


def build_initial_state(spec: InitialStateSpec) -> WalkerState:
    """
    Build the initial product state profile ⊗ spinor.

    Gaussian profiles are sampled at integer sites in ±ceil(6σ) and
    renormalized, since the continuum prefactor (2πσ²)^{-1/4} only normalizes
    the discrete sum asymptotically.
    """
    family = spec.family
    if isinstance(family, Gaussian):
        half = math.ceil(GAUSSIAN_CUTOFF * family.sigma)
        n = np.arange(-half, half + 1)
        profile = np.exp(-(n.astype(float) ** 2) / (4.0 * family.sigma ** 2))
        profile /= (2.0 * math.pi * family.sigma ** 2) ** 0.25
        profile /= math.sqrt(float(np.sum(profile ** 2)))
        n_min = -half
    elif isinstance(family, Uniform):
        half = family.count // 2
        profile = np.full(family.count, 1.0 / math.sqrt(family.count))
        n_min = -half
    elif isinstance(family, Localized):
        profile = np.ones(1)
        n_min = family.site
    else:
        raise TypeError(f"unknown initial-state family {family!r}")

    up, down = spec.chirality.spinor()
    return WalkerState(n_min, profile * up, profile * down)


def _coin_and_shift(up, down, c, s, out_up, out_down):
    # Coin on each site, then up moves right and down moves left.
    # out arrays are one site longer on each side than the inputs.
    out_up[0] = out_up[1] = 0.0
    out_up[2:] = c * up + s * down
    out_down[-1] = out_down[-2] = 0.0
    out_down[:-2] = s * up - c * down


def step(state: WalkerState, coin: CoinParams) -> WalkerState:
    """Apply one walk step; the returned window grows by one site per side."""
    c, s = math.cos(coin.theta), math.sin(coin.theta)
    size = len(state) + 2
    up = np.empty(size, dtype=np.complex128)
    down = np.empty(size, dtype=np.complex128)
    _coin_and_shift(state.up_amps, state.down_amps, c, s, up, down)
    return WalkerState(state.n_min - 1, up, down)


Observer = Callable[[int, WalkerState], None]


def evolve(
    state: WalkerState,
    coin: CoinParams,
    steps: int,
    observer: Optional[Observer] = None,
) -> WalkerState:
    """
    Evolve ``state`` for ``steps`` walk steps.

    Storage for the whole light cone is allocated once up front. The observer
    is called as ``observer(t, state_t)`` for t = 0, 1, ..., steps; the state
    passed to it is a read-only view into buffers that the next step
    overwrites, so observers that keep it must copy it.

    Returns the final state as an independent copy whose window is the input
    window widened by ``steps`` sites on each side.
    """
    if isinstance(steps, bool) or int(steps) != steps or steps < 0:
        raise ValueError(f"steps must be a nonnegative integer, got {steps!r}")
    steps = int(steps)
    if steps == 0:
        if observer is not None:
            observer(0, _view(state.n_min, state.up_amps, state.down_amps))
        return state.copy()

    c, s = math.cos(coin.theta), math.sin(coin.theta)
    width = len(state)
    total = width + 2 * steps
    # Two buffer pairs, ping-ponged; index = n - (state.n_min - steps).
    bufs = [
        (np.zeros(total, dtype=np.complex128), np.zeros(total, dtype=np.complex128)),
        (np.zeros(total, dtype=np.complex128), np.zeros(total, dtype=np.complex128)),
    ]
    lo, hi = steps, steps + width
    bufs[0][0][lo:hi] = state.up_amps
    bufs[0][1][lo:hi] = state.down_amps
    origin = state.n_min - steps

    if observer is not None:
        observer(0, _view(origin + lo, bufs[0][0][lo:hi], bufs[0][1][lo:hi]))
    for t in range(1, steps + 1):
        src_up, src_down = bufs[(t - 1) % 2]
        dst_up, dst_down = bufs[t % 2]
        _coin_and_shift(src_up[lo:hi], src_down[lo:hi], c, s,
                        dst_up[lo - 1:hi + 1], dst_down[lo - 1:hi + 1])
        lo, hi = lo - 1, hi + 1
        if observer is not None:
            observer(t, _view(origin + lo, dst_up[lo:hi], dst_down[lo:hi]))

    final_up, final_down = bufs[steps % 2]
    return WalkerState(origin, final_up.copy(), final_down.copy())


def _view(n_min, up, down) -> WalkerState:
    up = up.view()
    down = down.view()
    up.flags.writeable = False
    down.flags.writeable = False
    return WalkerState(n_min, up, down)
