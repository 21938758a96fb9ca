import math

import numpy as np
import pytest

from dihedral_walk.coin import coin_from_theta, grover_coin
from dihedral_walk.errors import InputError
from dihedral_walk.evolve import build_evolution
from dihedral_walk.fourier import full_spectrum
from dihedral_walk.localize import (
    InitialCondition,
    extremum_offsets,
    grid_local_extrema,
    group_eigenvalues,
    limit_time_avg,
    sweep_n,
    sweep_theta,
    time_average_kernel,
    time_avg_direct,
    time_avg_spectral,
)


def _random_init(rng, n):
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    a /= np.linalg.norm(a)
    return InitialCondition(a, int(rng.integers(2)), int(rng.integers(n)))


def test_t1_is_start_indicator():
    init = InitialCondition.uniform(1, 3)
    res = time_avg_direct(grover_coin(), 7, init, 1)
    expect = np.zeros(14)
    expect[7 + 3] = 1.0
    assert np.allclose(res.pbar, expect, atol=1e-15)


@pytest.mark.parametrize("cls", "XYZW")
def test_probability_sums_to_one(cls, rng):
    coin = coin_from_theta(cls, float(rng.uniform(-np.pi, np.pi)))
    res = time_avg_direct(coin, 9, _random_init(rng, 9), 37)
    assert abs(res.total() - 1.0) <= 1e-12
    assert res.pbar.min() >= 0.0 and res.pbar.max() <= 1.0


def test_grover_start_vertex_above_uniform():
    res = time_avg_direct(grover_coin(), 50, InitialCondition.basis(2, 1, 0), 300)
    assert res.at(1, 0) >= 0.02
    assert set(res.ranked_vertices()[:2]) == {(1, 0), (0, 0)}


@pytest.mark.parametrize("cls", "XYZW")
def test_spectral_matches_direct(cls, rng):
    coin = coin_from_theta(cls, float(rng.uniform(-np.pi, np.pi)))
    spec = full_spectrum(coin, 6)
    for T in (1, 2, 17, 120):
        init = _random_init(rng, 6)
        a = time_avg_direct(coin, 6, init, T).pbar
        b = time_avg_spectral(coin, 6, init, T, spectrum=spec).pbar
        assert np.abs(a - b).max() <= 1e-10


def test_identity_coin_stay_state_never_moves():
    res = limit_time_avg(coin_from_theta("X", 0.0), 8, InitialCondition.basis(1, 0, 2))
    assert res.at(0, 2) == pytest.approx(1.0, abs=1e-10)
    assert abs(res.total() - 1.0) <= 1e-10


def test_limit_close_to_long_direct():
    init = InitialCondition.basis(2, 1, 0)
    lim = limit_time_avg(grover_coin(), 8, init)
    direct = time_avg_direct(grover_coin(), 8, init, 5000)
    assert np.abs(lim.pbar - direct.pbar).max() <= 2e-3
    assert lim.T is None and lim.diagonal_only.shape == (2,)


@pytest.mark.parametrize("n", [8, 16, 50])
def test_grover_limit_localizes(n):
    lim = limit_time_avg(grover_coin(), n, InitialCondition.basis(2, 1, 0))
    assert lim.at(1, 0) > 0.05


def test_kernel_equals_geometric_sum(rng):
    phases = rng.uniform(-np.pi, np.pi, size=5)
    lam = np.exp(1j * np.concatenate([phases, phases[:1], [np.pi, -np.pi + 1e-14]]))
    for T in (1, 3, 50):
        K = time_average_kernel(lam, lam, T)
        z = lam[:, None] * lam.conj()[None, :]
        ref = sum(z**t for t in range(T)) / T
        assert np.abs(K - ref).max() <= 1e-12


def test_grouping_across_seam():
    lam = np.exp(1j * np.array([np.pi, -np.pi + 1e-10, 0.3, 0.3 + 1e-12, 1.0]))
    groups = sorted(sorted(g.tolist()) for g in group_eigenvalues(lam))
    assert groups == [[0, 1], [2, 3], [4]]


def test_sweep_grid_two_gives_endpoints():
    sw = sweep_theta("X", 2, 4, InitialCondition.uniform(), 5, [(0, 0)])
    assert np.allclose(sw.values, [-np.pi, np.pi])
    # both endpoints are the same coin
    a, b = sw.series((0, 0))
    assert a == pytest.approx(b, abs=1e-12)


def test_sweep_theta_ordering_and_range():
    sw = sweep_theta("Y", 9, 5, InitialCondition.uniform(), 20, [(0, 0), (1, 4)], parallel=True)
    assert np.all(np.diff(sw.values) > 0)
    v = np.array([p[1] for p in sw.points])
    assert v.min() >= 0.0 and v.max() <= 1.0


def test_sweep_n_decreasing_for_grover():
    sw = sweep_n("X", np.pi, [50, 10, 20], InitialCondition.uniform(1, 0), 300)
    assert list(sw.values) == [10, 20, 50]
    assert np.all(np.diff(sw.series((1, 0))) < 0)


def test_csv_row_counts():
    res = time_avg_direct(grover_coin(), 4, InitialCondition.uniform(), 3)
    lines = res.to_csv().splitlines()
    assert lines[0] == "theta_or_n,s,r,pbar" and len(lines) == 9
    sw = sweep_theta("X", 3, 4, InitialCondition.uniform(), 3, [(0, 0), (1, 1)])
    assert len(sw.to_csv().splitlines()) == 1 + 3 * 2


def test_grid_local_extrema():
    th = np.linspace(-np.pi, np.pi, 61)
    ext = grid_local_extrema(np.cos(th))
    assert sorted(th[ext].round(6).tolist()) == [-3.141593, 0.0]
    assert grid_local_extrema([0.0, 1.0, 0.5, 2.0], periodic=False).tolist() == [1, 2]


def test_extremum_offsets_requires_theta_sweep():
    sw = sweep_n("X", np.pi, [4], InitialCondition.uniform(), 2)
    with pytest.raises(InputError):
        extremum_offsets(sw, (0, 0), [0.0])


@pytest.mark.parametrize(
    "args",
    [(np.ones(3), 0, 0), (np.array([1, 0]), 0, 0), (np.array([1, 0, 0]), 2, 0), (np.array([1, 0, 0]), 0, -1)],
)
def test_initial_condition_rejects(args):
    with pytest.raises(InputError):
        InitialCondition(*args)


def test_start_outside_graph():
    with pytest.raises(InputError):
        time_avg_direct(grover_coin(), 4, InitialCondition.basis(0, 0, 4), 3)
    with pytest.raises(InputError):
        time_avg_direct(grover_coin(), 4, InitialCondition.basis(0), 0)


def test_direct_matches_dense_powers():
    coin = coin_from_theta("W", 0.7)
    U = build_evolution(coin, 5).matrix
    init = InitialCondition.uniform(0, 1)
    psi = init.state(5).amplitudes
    acc = np.zeros(30)
    for _ in range(11):
        acc += np.abs(psi) ** 2
        psi = U @ psi
    p = (acc / 11).reshape(3, 10).sum(axis=0)
    assert np.abs(p - time_avg_direct(coin, 5, init, 11).pbar).max() <= 1e-13
    assert math.isclose(p.sum(), 1.0)
