import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwthermo.walk import (
    ChiralitySpec,
    CoinParams,
    Gaussian,
    InitialStateSpec,
    Localized,
    Uniform,
    WalkerState,
    build_coin,
    build_initial_state,
    evolve,
    step,
)

from oracles import full_vector, random_state, walk_unitary

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
PLUS = ChiralitySpec(0.0, 0.0)


def test_hadamard_coin():
    np.testing.assert_allclose(build_coin(CoinParams(math.pi / 4)), HADAMARD, atol=1e-15)


def test_swap_coin():
    np.testing.assert_allclose(build_coin(CoinParams(math.pi / 2)), [[0, 1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("theta", [0.0, 0.1, math.pi / 4, 1.2, math.pi / 2])
def test_coin_is_hermitian_involution(theta):
    u = build_coin(CoinParams(theta))
    np.testing.assert_allclose(u @ u, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(u, u.conj().T, atol=0)


@pytest.mark.parametrize("theta", [-0.1, math.pi / 2 + 1e-9, float("nan")])
def test_coin_angle_domain(theta):
    with pytest.raises(ValueError):
        CoinParams(theta)


def test_localized_initial_state():
    s = build_initial_state(InitialStateSpec(Localized(0), PLUS))
    assert s.n_min == 0 and len(s) == 1
    assert s.amplitude(0) == (1 + 0j, 0j)
    assert s.amplitude(3) == (0j, 0j)


def test_uniform_initial_state():
    s = build_initial_state(InitialStateSpec(Uniform(101), PLUS))
    assert (s.n_min, s.n_max) == (-50, 50)
    np.testing.assert_allclose(s.up_amps, 1 / math.sqrt(101), rtol=0, atol=1e-16)
    assert not np.any(s.down_amps)


@pytest.mark.parametrize("chirality", [PLUS, ChiralitySpec(math.pi / 2, 0.0), ChiralitySpec(2.0, 4.0)])
def test_gaussian_initial_state(chirality):
    s = build_initial_state(InitialStateSpec(Gaussian(10.0), chirality))
    assert (s.n_min, s.n_max) == (-60, 60)
    assert abs(s.norm() - 1.0) < 1e-12
    # product state: the profile ratio carries the spinor
    i0 = -s.n_min
    ratio = s.down_amps[i0] / s.up_amps[i0] if chirality.gamma < math.pi else None
    if ratio is not None:
        expected = np.exp(1j * chirality.phi) * math.tan(chirality.gamma / 2)
        assert abs(ratio - expected) < 1e-12
    profile = np.sqrt(abs(s.up_amps) ** 2 + abs(s.down_amps) ** 2)
    n = s.positions
    np.testing.assert_allclose(profile / profile[i0], np.exp(-n ** 2 / 400.0), rtol=1e-12)


def test_gaussian_truncated_mass_is_small():
    sigma = 7.5
    s = build_initial_state(InitialStateSpec(Gaussian(sigma), PLUS))
    half = s.n_max
    n = np.arange(-10 * half, 10 * half + 1)
    w = np.exp(-n ** 2 / (2 * sigma ** 2))
    outside = w[abs(n) > half].sum() / w.sum()
    assert outside < 1e-8


@pytest.mark.parametrize("bad", [
    lambda: Gaussian(0.0),
    lambda: Gaussian(-1.0),
    lambda: Uniform(100),
    lambda: Uniform(0),
    lambda: ChiralitySpec(4.0, 0.0),
    lambda: ChiralitySpec(0.0, 2 * math.pi),
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(ValueError):
        bad()


def test_one_step_from_localized_plus():
    s0 = build_initial_state(InitialStateSpec(Localized(0), PLUS))
    s1 = step(s0, CoinParams(math.pi / 4))
    assert (s1.n_min, s1.n_max) == (-1, 1)
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(s1.up_amps, [0, 0, r], atol=1e-16)
    np.testing.assert_allclose(s1.down_amps, [r, 0, 0], atol=1e-16)


def test_two_steps_from_localized_plus():
    s0 = build_initial_state(InitialStateSpec(Localized(0), PLUS))
    s2 = evolve(s0, CoinParams(math.pi / 4), 2)
    expected = {2: (0.5, 0), 0: (0.5, 0.5), -2: (0, -0.5)}
    for n in range(s2.n_min, s2.n_max + 1):
        a, b = s2.amplitude(n)
        ea, eb = expected.get(n, (0, 0))
        assert abs(a - ea) < 1e-15 and abs(b - eb) < 1e-15, n


def test_evolve_zero_steps_calls_observer_once():
    s0 = build_initial_state(InitialStateSpec(Gaussian(3.0), PLUS))
    seen = []
    out = evolve(s0, CoinParams(), 0, lambda t, s: seen.append((t, s.copy())))
    assert [t for t, _ in seen] == [0]
    np.testing.assert_array_equal(out.up_amps, s0.up_amps)
    np.testing.assert_array_equal(out.down_amps, s0.down_amps)
    assert out.n_min == s0.n_min


def test_evolve_observer_sequence_matches_step(rng):
    s = random_state(rng, 9, n_min=-4)
    coin = CoinParams(0.7)
    seen = []
    evolve(s, coin, 12, lambda t, st_: seen.append((t, st_.copy())))
    assert [t for t, _ in seen] == list(range(13))
    ref = s
    for t, got in seen:
        if t:
            ref = step(ref, coin)
        assert got.n_min == ref.n_min
        np.testing.assert_array_equal(got.up_amps, ref.up_amps)
        np.testing.assert_array_equal(got.down_amps, ref.down_amps)


def test_evolve_final_window_is_light_cone(rng):
    s = random_state(rng, 5, n_min=3)
    out = evolve(s, CoinParams(), 7)
    assert (out.n_min, out.n_max) == (3 - 7, 3 + 4 + 7)


def test_observer_view_is_read_only():
    s = build_initial_state(InitialStateSpec(Localized(0), PLUS))

    def poke(t, st_):
        with pytest.raises(ValueError):
            st_.up_amps[0] = 1.0

    evolve(s, CoinParams(), 3, poke)


@pytest.mark.parametrize("theta", [0.3, math.pi / 4, 1.1])
def test_step_matches_dense_unitary(rng, theta):
    s = random_state(rng, 6, n_min=-2)
    steps = 4
    # embed in a lattice wide enough that nothing reaches the edges
    n_sites = len(s) + 2 * steps + 2
    offset = steps + 1
    psi = np.zeros(2 * n_sites, dtype=complex)
    psi[2 * offset:2 * (offset + len(s))] = full_vector(s)
    u = walk_unitary(n_sites, theta)
    out = evolve(s, CoinParams(theta), steps)
    psi = np.linalg.matrix_power(u, steps) @ psi
    left = offset - steps
    np.testing.assert_allclose(full_vector(out), psi[2 * left:2 * (left + len(out))], atol=1e-14)


def test_evolve_long_gaussian_norm_drift():
    s = build_initial_state(InitialStateSpec(Gaussian(10.0), PLUS))
    out = evolve(s, CoinParams(), 1000)
    assert abs(out.norm() - 1.0) < 1e-12


def test_evolve_deterministic():
    spec = InitialStateSpec(Gaussian(4.0), ChiralitySpec(1.0, 2.0))
    a = evolve(build_initial_state(spec), CoinParams(0.6), 50)
    b = evolve(build_initial_state(spec), CoinParams(0.6), 50)
    assert a.up_amps.tobytes() == b.up_amps.tobytes()
    assert a.down_amps.tobytes() == b.down_amps.tobytes()


def test_evolve_rejects_negative_steps():
    with pytest.raises(ValueError):
        evolve(build_initial_state(InitialStateSpec(Localized(0))), CoinParams(), -1)


amplitudes = st.lists(
    st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)),
    min_size=1, max_size=20,
).filter(lambda xs: sum(a * a + b * b + c * c + d * d for a, b, c, d in xs) > 1e-3)


def _state(xs, n_min=0):
    arr = np.array(xs)
    up = arr[:, 0] + 1j * arr[:, 1]
    down = arr[:, 2] + 1j * arr[:, 3]
    norm = math.sqrt(np.sum(abs(up) ** 2 + abs(down) ** 2))
    return WalkerState(n_min, up / norm, down / norm)


@settings(max_examples=200, deadline=None)
@given(amplitudes, st.floats(0, math.pi / 2), st.integers(-30, 30))
def test_step_is_unitary(xs, theta, n_min):
    s = _state(xs, n_min)
    out = step(s, CoinParams(theta))
    assert abs(out.norm() - s.norm()) < 1e-14


@settings(max_examples=100, deadline=None)
@given(amplitudes, st.floats(0, math.pi / 2), st.integers(0, 10))
def test_light_cone(xs, theta, t):
    s = _state(xs, 5)
    lo, hi = s.support()
    out = evolve(s, CoinParams(theta), t)
    support = out.support()
    if support is not None:
        assert lo - t <= support[0] and support[1] <= hi + t


@settings(max_examples=100, deadline=None)
@given(amplitudes, st.floats(0, math.pi / 2), st.data())
def test_step_locality(xs, theta, data):
    # perturbing site m changes only sites m-1 and m+1 after one step
    s = _state(xs, 0)
    m = data.draw(st.integers(0, len(s) - 1))
    bumped = s.copy()
    bumped.up_amps[m] += 0.3
    bumped.down_amps[m] -= 0.2j
    a, b = step(s, CoinParams(theta)), step(bumped, CoinParams(theta))
    changed = {
        n for n in range(a.n_min, a.n_max + 1)
        if a.amplitude(n) != b.amplitude(n)
    }
    assert changed <= {m - 1, m + 1}
