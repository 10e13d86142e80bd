import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynframes.disc import (EPS_SEP, DiscSequence, carleson_infimum, carleson_products,
                            log_pseudohyperbolic_matrix, pseudohyperbolic_distance,
                            pseudohyperbolic_matrix, validate_disc_sequence)
from dynframes.errors import NearCollision, PointOutsideDisc

disc_point = st.builds(
    lambda r, t: r * complex(math.cos(t), math.sin(t)),
    st.floats(0.0, 0.999), st.floats(0.0, 2 * math.pi))


def test_simple_distances():
    assert pseudohyperbolic_distance(0.5, -0.5) == pytest.approx(0.8, abs=1e-15)
    assert pseudohyperbolic_distance(0, 0.3j) == pytest.approx(0.3, abs=1e-15)
    assert pseudohyperbolic_distance(0.4, 0.4) == 0.0


@given(disc_point, disc_point)
def test_symmetric_and_below_one(a, b):
    d = pseudohyperbolic_distance(a, b)
    assert 0.0 <= d < 1.0 or (d == 1.0 and abs(a) > 0.99)
    assert d == pytest.approx(pseudohyperbolic_distance(b, a), abs=1e-15)


@given(disc_point, disc_point, disc_point)
@settings(max_examples=200)
def test_mobius_invariance(a, b, c):
    # rotations and disc automorphisms preserve rho
    phi = lambda z: (c - z) / (1 - np.conj(c) * z)
    d0 = pseudohyperbolic_distance(a, b)
    d1 = pseudohyperbolic_distance(phi(a), phi(b))
    assert d1 == pytest.approx(d0, abs=1e-8)


def test_matrix_agrees_with_scalar(rng):
    z = 0.9 * np.sqrt(rng.random(7)) * np.exp(2j * np.pi * rng.random(7))
    M = pseudohyperbolic_matrix(z)
    for i in range(7):
        for j in range(7):
            assert M[i, j] == pytest.approx(pseudohyperbolic_distance(z[i], z[j]), abs=1e-15)
    L = log_pseudohyperbolic_matrix(z)
    assert np.all(np.diag(L) == 0)
    off = ~np.eye(7, dtype=bool)
    assert np.allclose(np.exp(L[off]), M[off], rtol=1e-13)


def test_validation_errors():
    with pytest.raises(PointOutsideDisc):
        validate_disc_sequence([0.1, 1.0])
    with pytest.raises(PointOutsideDisc):
        validate_disc_sequence([complex("nan")])
    with pytest.raises(NearCollision) as info:
        validate_disc_sequence([0.1, 0.5, 0.1 + 1e-14])
    assert info.value.pair == (0, 2)
    assert info.value.distance < EPS_SEP


def test_sequence_is_read_only():
    seq = validate_disc_sequence([0.1, 0.2j], "x")
    with pytest.raises(ValueError):
        seq.points[0] = 0.3
    assert len(seq) == 2 and seq[1] == 0.2j
    assert isinstance(seq[:1], DiscSequence) and len(seq.truncate(1)) == 1
    assert list(seq) == [0.1, 0.2j]
    assert seq.max_modulus == pytest.approx(0.2)


def test_weights_accurate_near_boundary():
    seq = validate_disc_sequence([1 - 1e-12])
    # 1 - r^2 = (1 - r)(1 + r) ~ 2e-12, no cancellation
    assert seq.weights[0] ** 2 == pytest.approx(2e-12, rel=1e-3)


def test_carleson_small_cases(geo05):
    assert carleson_infimum(validate_disc_sequence([0.3])) == (1.0, 0)
    v, n = carleson_infimum(validate_disc_sequence([0, 0.5]))
    assert v == pytest.approx(0.5, abs=1e-15) and n == 0
    v, n = carleson_infimum(geo05)
    assert v == pytest.approx(0.01688683266648814, rel=1e-12)
    assert n == 6


def test_carleson_brute_force(rng):
    z = 0.9 * np.sqrt(rng.random(9)) * np.exp(2j * np.pi * rng.random(9))
    seq = validate_disc_sequence(z)
    direct = [math.prod(abs(z[k] - z[n]) / abs(1 - np.conj(z[k]) * z[n])
                        for k in range(9) if k != n) for n in range(9)]
    assert np.allclose(carleson_products(seq), direct, rtol=1e-12)
    assert carleson_infimum(seq)[0] == pytest.approx(min(direct), rel=1e-12)


@given(st.permutations(list(range(6))))
def test_carleson_permutation_invariant(perm):
    base = np.array([0.1, 0.5j, -0.3, 0.7 + 0.1j, -0.2 - 0.6j, 0.85])
    v0, _ = carleson_infimum(validate_disc_sequence(base))
    v1, _ = carleson_infimum(validate_disc_sequence(base[list(perm)]))
    assert v1 == pytest.approx(v0, rel=1e-12)
