import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from iterdft.errors import InvalidArgumentError, SymmetryViolationError
from iterdft.transform import dft, dft2, idft, idft2

from oracles import naive_dft, naive_dft2, naive_idft, naive_idft2

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(1, 80), elements=finite)


def test_zero_vector():
    np.testing.assert_array_equal(dft([0.0, 0.0, 0.0, 0.0]), np.zeros(4, complex))


def test_constant_vector_concentrates_at_dc():
    np.testing.assert_allclose(dft([1.0, 1.0, 1.0, 1.0]), [4, 0, 0, 0], atol=1e-15)


def test_gaussian_16_matches_oracle(rng):
    x = rng.standard_normal(16)
    assert np.max(np.abs(dft(x) - np.array(naive_dft(x)))) <= 1e-9


def test_idft_zero():
    np.testing.assert_array_equal(idft(np.zeros(4, complex)), np.zeros(4))


def test_round_trip_small():
    np.testing.assert_allclose(idft(dft([3.0, -1.0, 2.0, 5.0])), [3, -1, 2, 5], atol=1e-9)


def test_idft_64_matches_oracle(rng):
    w = dft(rng.standard_normal(64))
    ref = np.array(naive_idft(w))
    assert np.max(np.abs(ref.imag)) < 1e-9
    assert np.max(np.abs(idft(w) - ref.real)) <= 1e-9


def test_idft_returns_real_dtype(rng):
    assert idft(dft(rng.standard_normal(7))).dtype == np.float64


@pytest.mark.parametrize("bad", [[], np.zeros((0,))])
def test_empty_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        dft(bad)
    with pytest.raises(InvalidArgumentError):
        idft(bad)


def test_non_finite_rejected():
    with pytest.raises(InvalidArgumentError):
        dft([1.0, np.nan])
    with pytest.raises(InvalidArgumentError):
        idft([1.0, np.inf])


def test_complex_input_rejected():
    with pytest.raises(InvalidArgumentError):
        dft([1 + 1j, 2])


def test_asymmetric_spectrum_raises():
    with pytest.raises(SymmetryViolationError):
        idft([0, 1, 0, 0])


def test_residue_just_inside_tolerance_accepted():
    w = dft(np.array([1.0, 2.0, 3.0, 4.0]))
    w[1] += 1e-12j
    idft(w)


def test_2d_zero_and_ones():
    np.testing.assert_array_equal(dft2(np.zeros((2, 2))), np.zeros((2, 2), complex))
    expected = np.zeros((4, 4), complex)
    expected[0, 0] = 16
    np.testing.assert_allclose(dft2(np.ones((4, 4))), expected, atol=1e-14)


def test_2d_matches_oracle(rng):
    x = rng.standard_normal((8, 8))
    w = dft2(x)
    assert np.max(np.abs(w - np.array(naive_dft2(x)))) <= 1e-9
    ref = np.array(naive_idft2(w))
    assert np.max(np.abs(idft2(w) - ref.real)) <= 1e-9
    assert np.max(np.abs(idft2(w) - x)) <= 1e-9


def test_2d_non_square(rng):
    x = rng.standard_normal((3, 5))
    assert np.max(np.abs(dft2(x) - np.array(naive_dft2(x)))) <= 1e-9


def test_2d_shape_checked():
    with pytest.raises(InvalidArgumentError):
        dft2(np.ones(4))
    with pytest.raises(InvalidArgumentError):
        dft(np.ones((2, 2)))


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_round_trip_property(x):
    err = np.max(np.abs(idft(dft(x)) - x))
    assert err <= 1e-9 * (1 + np.max(np.abs(x)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_oracle_equivalence_property(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    assert np.max(np.abs(dft(x) - np.array(naive_dft(x)))) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1), finite, finite)
def test_linearity(n, seed, a, b):
    g = np.random.default_rng(seed)
    x, y = g.standard_normal(n), g.standard_normal(n)
    lhs = dft(a * x + b * y)
    rhs = a * dft(x) + b * dft(y)
    scale = 1 + abs(a) + abs(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale * n


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 256), st.integers(0, 2**32 - 1))
def test_parseval(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    energy = np.sum(x ** 2)
    assert np.sum(np.abs(dft(x)) ** 2) / n == pytest.approx(energy, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(vectors)
def test_conjugate_symmetry(x):
    w = dft(x)
    n = x.size
    mirrored = np.conj(w[(-np.arange(n)) % n])
    assert np.max(np.abs(w - mirrored)) <= 1e-9 * (1 + np.max(np.abs(w)))
