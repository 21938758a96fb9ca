import json
import math
from fractions import Fraction

import numpy as np
import pytest

from dihedral_walk.coin import coin_from_theta, grover_coin
from dihedral_walk.errors import InputError
from dihedral_walk.evolve import build_evolution
from dihedral_walk.fourier import block_spectra, eigen_numeric, build_Uk
from dihedral_walk.period import (
    PeriodFormulaTerm,
    brute_force_period,
    compare_with_theorem,
    eigenphase_rationals,
    niven_check,
    spectral_period,
    theorem_period,
    verify_period,
)

PI = math.pi
FINITE_TABLE = {
    "X": (0.0, 2 * PI / 3, -2 * PI / 3),
    "Y": (PI, PI / 3, -PI / 3),
    "Z": (0.0, 2 * PI / 3, -2 * PI / 3),
}


@pytest.mark.parametrize("n", [3, 7, 100])
def test_theorem_permutation_period_six(n):
    assert theorem_period("X", 2 * PI / 3, n).tau == 6
    assert theorem_period("X", 4 * PI / 3, n).tau == 6


def test_theorem_identity_n4():
    r = theorem_period("X", 0.0, 4)
    assert r.tau == 4
    assert [t.to_dict() for t in r.terms] == [
        {"k": 1, "m_k": 1, "p_k": 2, "c_k": 2},
        {"k": 2, "m_k": 1, "p_k": 1, "c_k": 2},
        {"k": 3, "m_k": 3, "p_k": 2, "c_k": 2},
    ]


@pytest.mark.parametrize("n", [3, 4, 10])
def test_theorem_grover_aperiodic(n):
    assert theorem_period("X", PI, n).outcome == "aperiodic"


@pytest.mark.parametrize("n", [3, 8])
def test_theorem_z_minus_two_thirds(n):
    assert theorem_period("Z", -2 * PI / 3, n).tau == 4


def test_theorem_near_miss_note():
    r = theorem_period("X", 2 * PI / 3 + 1e-9, 5)
    assert r.outcome == "aperiodic"
    assert r.notes and "1e-12" in r.notes[0]


def test_theorem_large_n_exact():
    # 2k/N for N = 9973 (prime): every p_k = N, so tau = lcm(2, N)
    assert theorem_period("X", 0.0, 9973).tau == 2 * 9973


def test_term_invariants():
    for t in theorem_period("Z", 0.0, 12).terms:
        assert math.gcd(t.m_k, t.p_k) == 1
        assert Fraction(t.m_k, t.p_k) == Fraction(2 * t.k, 12)
        assert t.c_k in (1, 2)
    with pytest.raises(InputError):
        PeriodFormulaTerm(1, 2, 4, 1, Fraction(1, 2))


def test_spectral_grover_aperiodic():
    r = spectral_period(grover_coin(), 4)
    assert r.outcome == "aperiodic"
    assert r.witness.cosine == Fraction(1, 3)


def test_spectral_identity_n6():
    assert spectral_period(coin_from_theta("X", 0.0), 6).tau == 6


def test_spectral_cyclic_n5():
    assert spectral_period(coin_from_theta("X", 2 * PI / 3), 5).tau == 6


def test_spectral_unknown_without_rational_cosine():
    # generic angle: irrational phase with no small-denominator rational cosine
    r = spectral_period(coin_from_theta("Z", 0.123), 5, q_max=50)
    assert r.outcome in ("unknown", "aperiodic")
    if r.outcome == "aperiodic":
        assert not niven_check(float(r.witness.cosine))


def test_spectral_q_max_precondition():
    with pytest.raises(InputError):
        spectral_period(grover_coin(), 4, q_max=1)


def test_brute_examples():
    assert brute_force_period(coin_from_theta("X", 2 * PI / 3), 3, 10).tau == 6
    assert brute_force_period(coin_from_theta("Y", PI), 5, 20).tau == 10
    r = brute_force_period(grover_coin(), 3, 10_000, mode="eigen")
    assert r.outcome == "unknown" and r.cap == 10_000


def test_brute_modes_agree():
    for cls, ths in FINITE_TABLE.items():
        for th in ths:
            c = coin_from_theta(cls, th)
            assert brute_force_period(c, 5, 100).tau == brute_force_period(c, 5, 100, mode="eigen").tau


def test_brute_bad_mode():
    with pytest.raises(InputError):
        brute_force_period(grover_coin(), 3, 5, mode="fast")


def test_niven():
    assert niven_check(0.5) and niven_check(1.0) and niven_check(0.0) and niven_check(-0.5)
    assert not niven_check(1 / 3)
    with pytest.raises(InputError):
        niven_check(1.5)


@pytest.mark.parametrize("cls", sorted(FINITE_TABLE))
@pytest.mark.parametrize("n", range(3, 11))
def test_three_way_cross_validation(cls, n):
    for th in FINITE_TABLE[cls]:
        coin = coin_from_theta(cls, th)
        a = theorem_period(cls, th, n)
        b = spectral_period(coin, n)
        c = brute_force_period(coin, n, 200)
        assert a.tau == b.tau == c.tau, (cls, th, n, a, b, c)
        assert verify_period(coin, n, c.tau)


def test_lemma_consequence():
    coin = coin_from_theta("Z", 0.0)
    tau = spectral_period(coin, 7).tau
    for s in block_spectra(coin, 7):
        assert np.abs(s.eigenvalues**tau - 1).max() <= 1e-8


def test_verify_period_rejects_multiples():
    coin = coin_from_theta("X", 2 * PI / 3)
    assert verify_period(coin, 4, 6)
    assert not verify_period(coin, 4, 12)
    assert not verify_period(coin, 4, 5)


@pytest.mark.parametrize("theta", [PI, PI / 3, -PI / 3])
def test_w_signed_permutations_oracles_agree(theta):
    for row in compare_with_theorem("W", [theta], range(3, 9)):
        assert row.oracles_agree
        assert row.spectral.is_finite


def test_w_theorem_matches_oracles_after_pi_shift():
    rows = compare_with_theorem("W", [PI, PI / 3, -PI / 3], range(3, 9), relabel_shift=-PI)
    for row in rows:
        shifted = theorem_period("W", row.theta - PI, row.n)
        assert shifted.tau == row.brute.tau


def test_w_theorem_angles_not_periodic():
    # the printed W angles are not signed permutations; the oracles find no period
    for th in (0.0, 2 * PI / 3, -2 * PI / 3):
        c = coin_from_theta("W", th)
        assert spectral_period(c, 5).outcome == "aperiodic"
        assert brute_force_period(c, 5, 500).outcome == "unknown"


def test_eq10_identity():
    for th in np.linspace(-PI, PI, 60):
        c = coin_from_theta("X", th)
        lam = eigen_numeric(build_Uk(c, 7, 0)).eigenvalues
        target = (math.cos(th) + 2) / 3
        assert np.min(np.abs(lam.real - target)) <= 1e-10


def test_eigenphase_rationals_verified_flag():
    rats = eigenphase_rationals(block_spectra(coin_from_theta("X", 0.0), 4), 100)
    assert all(r.verified for r in rats)
    assert {r.q for r in rats} <= {1, 2, 4}


def test_json_shape():
    d = json.loads(theorem_period("X", 0.0, 4).to_json())
    assert d["method"] == "theorem" and d["outcome"] == "finite" and d["tau"] == 4
    assert d["terms"][0] == {"k": 1, "m_k": 1, "p_k": 2, "c_k": 2}
    d = json.loads(spectral_period(grover_coin(), 3).to_json())
    assert "witness" in d and "tau" not in d
    d = brute_force_period(grover_coin(), 3, 10).to_dict()
    assert d["cap"] == 10


def test_matrix_power_period_consistency():
    U = build_evolution(coin_from_theta("Y", PI / 3), 4).matrix
    assert np.abs(np.linalg.matrix_power(U, 6) - np.eye(24)).max() <= 1e-9
