import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnslab import numerics
from gnslab.errors import (
    LinearlyDependent,
    NonFinite,
    NotHermitian,
    RankDeficient,
    SpectrumAtMinusOne,
)
from strategies import complex_arrays, seeds

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def _herm(gen, n):
    a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


# eigh ------------------------------------------------------------------------

def test_eigh_diagonal():
    w, _ = numerics.eigh(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(w, [1.0, 3.0])


def test_eigh_sigma_x():
    w, v = numerics.eigh(SX)
    np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
    expected = np.array([[1, 1], [-1, 1]]) / math.sqrt(2)
    for j in range(2):
        assert abs(abs(np.vdot(expected[:, j], v[:, j])) - 1) < 1e-12


@given(seeds())
def test_eigh_spin_hamiltonian_spectrum(seed):
    r = np.random.default_rng(seed).standard_normal(3)
    r /= np.linalg.norm(r)
    h = r[0] * SX + r[1] * SY + r[2] * SZ
    w, _ = numerics.eigh(h)
    np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-12)


def test_eigh_reconstruction_many(gen):
    for _ in range(1000):
        n = int(gen.integers(2, 33))
        m = _herm(gen, n)
        w, v = numerics.eigh(m)
        scale = numerics.operator_norm(m)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - m, 2) <= 1e-10 * scale
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-12
        assert np.max(np.linalg.norm(m @ v - v * w, axis=0)) <= 1e-10 * scale


def test_eigh_phase_convention(gen):
    m = _herm(gen, 6)
    _, v = numerics.eigh(m)
    for j in range(6):
        k = np.argmax(np.abs(v[:, j]))
        assert abs(v[k, j].imag) < 1e-15 and v[k, j].real > 0


def test_eigh_errors():
    with pytest.raises(NotHermitian):
        numerics.eigh(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NonFinite):
        numerics.eigh(np.array([[np.nan, 0], [0, 1]]))


# norms -----------------------------------------------------------------------

def test_operator_norm_examples():
    assert numerics.operator_norm(np.eye(5)) == pytest.approx(1.0)
    assert numerics.operator_norm(np.diag([2.0, -3.0])) == pytest.approx(3.0)


def test_operator_norm_sampling_oracle(gen):
    m = gen.standard_normal((8, 8)) + 1j * gen.standard_normal((8, 8))
    vs = gen.standard_normal((100_000, 8)) + 1j * gen.standard_normal((100_000, 8))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    images = np.linalg.norm(vs @ m.T, axis=1)
    norm = numerics.operator_norm(m)
    # the sampled maximum is a lower bound
    assert images.max() <= norm * (1 + 1e-10)
    # power iteration from the best sample closes the gap
    v = vs[np.argmax(images)]
    for _ in range(200):
        v = m.conj().T @ (m @ v)
        v /= np.linalg.norm(v)
    assert abs(np.linalg.norm(m @ v) - norm) <= 1e-6


def test_trace_norm_examples(gen):
    assert numerics.trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0)
    u = gen.standard_normal(4) + 1j * gen.standard_normal(4)
    v = gen.standard_normal(4) + 1j * gen.standard_normal(4)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert numerics.trace_norm(np.outer(u, v.conj())) == pytest.approx(1.0, abs=1e-12)


@given(seeds())
def test_trace_norm_of_projector_difference(seed):
    gen = np.random.default_rng(seed)
    psi = gen.standard_normal(5) + 1j * gen.standard_normal(5)
    om = gen.standard_normal(5) + 1j * gen.standard_normal(5)
    psi, om = psi / np.linalg.norm(psi), om / np.linalg.norm(om)
    d = numerics.trace_norm(numerics.projector(psi) - numerics.projector(om))
    expected = 2 * math.sqrt(max(0.0, 1 - abs(np.vdot(psi, om)) ** 2))
    assert d == pytest.approx(expected, abs=1e-10)


@given(complex_arrays((4, 4)))
def test_norm_sandwich(m):
    op = numerics.operator_norm(m)
    tr = numerics.trace_norm(m)
    rank = np.linalg.matrix_rank(m)
    assert op <= tr * (1 + 1e-12) + 1e-12
    assert tr <= rank * op * (1 + 1e-12) + 1e-12


# Gram-Schmidt ----------------------------------------------------------------

def test_gram_schmidt_examples():
    es, lam = numerics.gram_schmidt([np.array([1, 0]), np.array([0, 2])])
    np.testing.assert_allclose(es[0], [1, 0])
    np.testing.assert_allclose(es[1], [0, 1])
    np.testing.assert_allclose(lam, np.diag([1, 0.5]))

    es, lam = numerics.gram_schmidt([np.array([1, 0]), np.array([1, 1])])
    np.testing.assert_allclose(es[1], [0, 1], atol=1e-15)
    np.testing.assert_allclose(lam[1], [-1, 1], atol=1e-15)


def test_gram_schmidt_dependent():
    with pytest.raises(LinearlyDependent) as info:
        numerics.gram_schmidt([np.array([1, 0]), np.array([1, 1e-14])], tol=1e-9)
    assert info.value.index == 1


@given(seeds(), st.integers(1, 6))
def test_gram_schmidt_round_trip(seed, n):
    gen = np.random.default_rng(seed)
    vs = list(gen.standard_normal((n, 7)) + 1j * gen.standard_normal((n, 7)))
    es, lam = numerics.gram_schmidt(vs)
    e = np.array(es)
    assert np.allclose(lam, np.tril(lam), atol=0)
    np.testing.assert_allclose(e.conj() @ e.T, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(lam @ np.array(vs), e, atol=1e-12)


# polar, exp, log --------------------------------------------------------------

def test_polar_unitary(gen):
    np.testing.assert_allclose(numerics.polar_unitary(np.eye(3)), np.eye(3), atol=1e-14)
    q, _ = np.linalg.qr(gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4)))
    np.testing.assert_allclose(numerics.polar_unitary(2 * q), q, atol=1e-12)
    m = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
    u = numerics.polar_unitary(m)
    assert numerics.operator_norm(u.conj().T @ u - np.eye(4)) <= 1e-10
    w, v = np.linalg.eigh(m.conj().T @ m)
    abs_m = v @ np.diag(np.sqrt(w)) @ v.conj().T
    assert np.max(np.abs(u @ abs_m - m)) <= 1e-9


def test_polar_rank_deficient():
    with pytest.raises(RankDeficient):
        numerics.polar_unitary(np.diag([1.0, 0.0]))


def _series_exp(m, terms=60):
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_exp_log_examples():
    np.testing.assert_allclose(numerics.matrix_exp(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(numerics.matrix_log_principal(np.eye(3)), 0, atol=1e-15)
    theta = 0.3
    np.testing.assert_allclose(
        numerics.matrix_exp(1j * theta * SZ),
        np.diag([np.exp(1j * theta), np.exp(-1j * theta)]),
        atol=1e-15,
    )


@given(seeds())
def test_exp_matches_series(seed):
    gen = np.random.default_rng(seed)
    h = _herm(gen, 4)
    h /= numerics.operator_norm(h)
    np.testing.assert_allclose(numerics.matrix_exp(1j * h), _series_exp(1j * h), atol=1e-12)


@given(seeds())
def test_log_round_trip(seed):
    gen = np.random.default_rng(seed)
    q, r = np.linalg.qr(gen.standard_normal((5, 5)) + 1j * gen.standard_normal((5, 5)))
    u = q * (np.diag(r) / np.abs(np.diag(r)))
    lg = numerics.matrix_log_principal(u)
    h = -1j * lg
    assert np.max(np.abs(h - h.conj().T)) <= 1e-10
    assert numerics.operator_norm(h) <= math.pi + 1e-12
    np.testing.assert_allclose(numerics.matrix_exp(lg), u, atol=1e-9)


def test_log_minus_one():
    with pytest.raises(SpectrumAtMinusOne):
        numerics.matrix_log_principal(np.diag([1.0, -1.0]))
