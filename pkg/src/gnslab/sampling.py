"""Seeded random generators for vectors, matrices and algebra data."""

import numpy as np


def rng(seed):
    return np.random.default_rng(seed)


def complex_normal(gen, shape):
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def unit_vector(gen, dim):
    v = complex_normal(gen, dim)
    return v / np.linalg.norm(v)


def unit_vectors(gen, count, dim):
    v = complex_normal(gen, (count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def unit_phase(gen):
    return np.exp(2j * np.pi * gen.random())


def hermitian(gen, dim):
    a = complex_normal(gen, (dim, dim))
    return 0.5 * (a + a.conj().T)


def unitary(gen, dim):
    """Haar-distributed unitary (QR with phase correction)."""
    q, r = np.linalg.qr(complex_normal(gen, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def sphere_point(gen):
    v = gen.standard_normal(3)
    return v / np.linalg.norm(v)
