import numpy as np
import pytest

from dihedral_walk.polyroots import (
    characteristic_polynomial,
    deflate_by_z2_minus_1,
    newton_polish,
    solve_cubic,
    solve_quartic,
)


def _match(a, b):
    a, b = sorted(a, key=lambda z: (z.real, z.imag)), list(b)
    worst = 0.0
    for z in a:
        i = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(i)))
    return worst


def test_characteristic_polynomial_matches_numpy(rng):
    for _ in range(20):
        M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        assert np.allclose(characteristic_polynomial(M), np.poly(M), atol=1e-9)


def test_deflation_exact_factor():
    roots = [1, -1, 0.5j, 2, -3, 1 + 1j]
    q, r = deflate_by_z2_minus_1(np.poly(roots))
    assert np.abs(r).max() < 1e-12
    assert np.allclose(q, np.poly(roots[2:]))


def test_cubic():
    roots = solve_cubic(0, 0, -8)
    assert _match(roots, [2, -1 + 1j * np.sqrt(3), -1 - 1j * np.sqrt(3)]) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_random_quartic(seed):
    rng = np.random.default_rng(seed)
    target = rng.normal(size=4) + 1j * rng.normal(size=4)
    got = newton_polish(np.poly(target), solve_quartic(np.poly(target)))
    assert _match(got, target) < 1e-10


@pytest.mark.parametrize(
    "target",
    [
        [1, 1, -1, -1],
        [0.3 + 0.2j, 0.3 + 0.2j, 0.3 + 0.2j, -2],
        [1j, -1j, 1j, -1j],
        [2, 2, 2, 2],
    ],
)
def test_repeated_roots(target):
    got = newton_polish(np.poly(target), solve_quartic(np.poly(target)))
    # a root of multiplicity m is only determined to about eps**(1/m)
    assert _match(got, target) < 1e-3
    assert max(abs(np.polyval(np.poly(target), z)) for z in got) < 1e-12
