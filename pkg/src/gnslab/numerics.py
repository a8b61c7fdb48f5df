"""Dense complex linear-algebra kernels.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.  All
functions are pure; tolerances default to the active
:mod:`gnslab.policy` profile.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from gnslab import policy
from gnslab.errors import (
    LinearlyDependent,
    NonFinite,
    NotHermitian,
    RankDeficient,
    ShapeMismatch,
    SpectrumAtMinusOne,
)


class EighResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_vector(v):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ShapeMismatch(f"expected a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFinite("vector has non-finite entries")
    return v


def as_matrix(m, square=False):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ShapeMismatch(f"expected a non-empty matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has non-finite entries")
    return m


def dagger(m):
    return np.conj(np.transpose(m))


def inner(x, y):
    """Inner product, antilinear in the first argument."""
    return complex(np.vdot(x, y))


def norm(v):
    return float(np.linalg.norm(v))


def fix_phase(v):
    """Multiply ``v`` by a unit phase making its largest-modulus entry real positive.

    Ties are broken by the lowest index so the result is reproducible.
    """
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    a = v[k]
    if a == 0:
        return v.copy()
    return v * (abs(a) / a)


def _scale(m):
    return max(float(np.max(np.abs(m))), 1.0)


def hermiticity_defect(m):
    """Relative size of the anti-Hermitian part of ``m``."""
    m = np.asarray(m, dtype=complex)
    return operator_norm(m - dagger(m)) / max(operator_norm(m), 1e-300)


def eigh(m, tol=None) -> EighResult:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are returned in ascending order.  Each eigenvector column has
    its largest-modulus entry made real positive.
    """
    m = as_matrix(m, square=True)
    tol = policy.current().hermiticity if tol is None else tol
    mnorm = operator_norm(m)
    if mnorm > 0 and operator_norm(m - dagger(m)) > tol * mnorm:
        raise NotHermitian(f"||m - m*|| exceeds {tol:g} * ||m||")
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    for j in range(v.shape[1]):
        v[:, j] = fix_phase(v[:, j])
    return EighResult(w, v)


def operator_norm(m):
    m = as_matrix(m)
    return float(np.linalg.norm(m, 2))


def trace_norm(m):
    m = as_matrix(m)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def gram_schmidt(vs, tol=1e-10):
    """Orthonormalize ``vs`` in the given order.

    Returns ``(es, lam)`` with ``es[i] = sum_j lam[i, j] * vs[j]`` and ``lam``
    lower triangular.  Raises :class:`LinearlyDependent` with the offending
    index when a residual falls below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vs = [as_vector(v) for v in vs]
    n = len(vs)
    if n and len({v.size for v in vs}) != 1:
        raise ShapeMismatch("vectors have different dimensions")
    es = []
    lam = np.zeros((n, n), dtype=complex)
    for i, v in enumerate(vs):
        r = v.copy()
        coeffs = np.zeros(n, dtype=complex)
        coeffs[i] = 1.0
        # two passes of modified Gram-Schmidt keep orthonormality near 1e-15
        for _ in range(2):
            for k, e in enumerate(es):
                c = np.vdot(e, r)
                r = r - c * e
                coeffs = coeffs - c * lam[k]
        rn = norm(r)
        if rn < tol:
            raise LinearlyDependent(i, rn)
        es.append(r / rn)
        lam[i] = coeffs / rn
    return es, lam


def polar_unitary(m, tol=None):
    """Unitary factor ``U`` of the polar decomposition ``m = U |m|``."""
    m = as_matrix(m, square=True)
    tol = policy.current().rank if tol is None else tol
    w, s, vh = np.linalg.svd(m)
    if s[-1] <= tol * max(s[0], 1e-300):
        raise RankDeficient(f"smallest singular value {s[-1]:.3e} below tolerance")
    return w @ vh


def matrix_exp(m):
    return scipy.linalg.expm(as_matrix(m, square=True))


def matrix_log_principal(u, gap=None):
    """Principal logarithm of a unitary (or normal) matrix.

    The result ``L`` satisfies ``expm(L) = u`` and ``-i L`` is Hermitian with
    norm at most pi.  Raises :class:`SpectrumAtMinusOne` when an eigenvalue lies
    within ``gap`` of -1.
    """
    u = as_matrix(u, square=True)
    gap = policy.current().minus_one_gap if gap is None else gap
    t, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t)
    if np.min(np.abs(lam + 1.0)) < gap:
        raise SpectrumAtMinusOne("eigenvalue at -1; principal logarithm undefined")
    # unitary => Schur form is diagonal; project onto the circle for stability
    phases = np.angle(lam)
    return z @ np.diag(1j * phases) @ dagger(z)


def projector(v):
    """Orthogonal projection onto the line spanned by ``v``."""
    v = as_vector(v)
    v = v / norm(v)
    return np.outer(v, np.conj(v))


def span_projector(vectors, tol=1e-10):
    """Orthogonal projection onto the span of the given vectors."""
    q = orthonormal_basis(vectors, tol)
    return q @ dagger(q)


def orthonormal_basis(vectors, tol=1e-10):
    """Columns forming an orthonormal basis of ``span(vectors)`` (via SVD)."""
    a = np.column_stack([as_vector(v) for v in vectors])
    w, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return w[:, :rank]


def null_space(m, tol=1e-10):
    """Orthonormal columns spanning the numerical kernel of ``m``."""
    m = np.asarray(m, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(scale, 1.0)))
    return dagger(vh[rank:])


def is_unitary(u, tol=1e-10):
    u = np.asarray(u, dtype=complex)
    return operator_norm(dagger(u) @ u - np.eye(u.shape[1])) <= tol
