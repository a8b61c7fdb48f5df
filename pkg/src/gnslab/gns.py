"""GNS construction for finite-dimensional algebras and intertwining unitaries.

The GNS space of a state ``s`` is realized concretely: the Gram form
``G_ab = s(b_a* b_b)`` on the matrix-unit basis is diagonalized, its kernel
spans the Gelfand ideal and the positive part supplies orthonormal
coordinates on the quotient.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from gnslab import algebra as alg_mod
from gnslab import numerics, policy, projgeom
from gnslab.algebra import InnerAutomorphism, PureState
from gnslab.errors import (
    Antipodal,
    NotBlockPreserving,
    NotMultiplicative,
    NumericError,
    SectorMismatch,
)
from gnslab.numerics import dagger

__all__ = [
    "GNSData",
    "InnerAutomorphism",
    "gelfand_ideal",
    "gns_construct",
    "automorphism_to_unitaries",
    "intertwiner",
    "commutant_dimension",
    "ideal_residual",
    "state_is_fixed",
    "ideal_is_invariant",
    "fixes_ray",
]


def _left_mult_matrix(a):
    """Matrix of ``B -> a B`` on matrix-unit coefficients."""
    mats = [np.kron(b, np.eye(b.shape[0])) for b in a.blocks]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    start = 0
    for m in mats:
        d = m.shape[0]
        out[start:start + d, start:start + d] = m
        start += d
    return out


def _gram(s):
    """``G_ab = s(b_a* b_b)`` over matrix units, assembled blockwise.

    For ``b_a = E_ij``, ``b_b = E_kl`` in one block, ``E_ji E_kl = delta_ik E_jl`` so
    ``G = I (x) rho^T`` in row-major coordinates.
    """
    st = s.to_state()
    blocks = [np.kron(np.eye(r.shape[0]), r.T) for r in st.densities]
    n = sum(b.shape[0] for b in blocks)
    g = np.zeros((n, n), dtype=complex)
    start = 0
    for b in blocks:
        d = b.shape[0]
        g[start:start + d, start:start + d] = b
        start += d
    return g


@dataclasses.dataclass(frozen=True, eq=False)
class GNSData:
    algebra: object
    state: object
    ideal_basis: tuple
    hilbert_dim: int
    quotient_matrix: np.ndarray
    rep_basis: tuple
    cyclic: np.ndarray
    _lift: np.ndarray

    def quotient(self, a):
        """Coordinates of ``a + N`` in the GNS space."""
        return self.quotient_matrix @ a.coefficients()

    def rep(self, a):
        """``pi(a)`` as a ``hilbert_dim x hilbert_dim`` matrix."""
        return self.quotient_matrix @ _left_mult_matrix(a) @ self._lift


def gelfand_ideal(s, tol=None):
    """Frobenius-orthonormal basis of ``N_s = {A : s(A* A) = 0}``."""
    tol = policy.current().rank if tol is None else tol
    g = _gram(s)
    w, v = np.linalg.eigh(g)
    alg = s.algebra
    return tuple(alg.from_coefficients(v[:, j]) for j in np.flatnonzero(w <= tol))


def gns_construct(s, tol=None):
    tol = policy.current().rank if tol is None else tol
    alg = s.algebra
    g = _gram(s)
    w, v = np.linalg.eigh(g)
    kernel = w <= tol
    ideal = tuple(alg.from_coefficients(v[:, j]) for j in np.flatnonzero(kernel))
    vp, lp = v[:, ~kernel], w[~kernel]
    q = np.sqrt(lp)[:, None] * dagger(vp)
    lift = vp / np.sqrt(lp)[None, :]
    rep_basis = tuple(q @ _left_mult_matrix(b) @ lift for b in alg.basis())
    cyclic = q @ alg.unit().coefficients()
    q.setflags(write=False)
    return GNSData(alg, s, ideal, int(q.shape[0]), q, rep_basis, cyclic, lift)


def commutant_dimension(mats, tol=1e-9):
    """Dimension of ``{X : [M, X] = 0 for all M in mats}``."""
    d = mats[0].shape[0]
    eye = np.eye(d)
    # row-major vec: vec(MX) = (M (x) I) vec X, vec(XM) = (I (x) M^T) vec X
    rows = [np.kron(m, eye) - np.kron(eye, m.T) for m in mats]
    return int(numerics.null_space(np.vstack(rows), tol).shape[1])


def ideal_residual(elements, ideal_basis):
    """Largest distance from an element to the span of a Frobenius-orthonormal basis."""
    if not elements:
        return 0.0
    if ideal_basis:
        b = np.column_stack([e.coefficients() for e in ideal_basis])
    else:
        b = np.zeros((elements[0].algebra.dim, 0), dtype=complex)
    worst = 0.0
    for e in elements:
        c = e.coefficients()
        r = c - b @ (dagger(b) @ c)
        worst = max(worst, float(np.linalg.norm(r)))
    return worst


def automorphism_to_unitaries(alpha, alg, gen=None, tol=1e-8):
    """Recover block unitaries ``u_k`` with ``alpha(A)_k = u_k A_k u_k*``.

    ``alpha`` is any callable on :class:`AlgebraElement`.  The phase of each
    ``u_k`` makes ``<e_1, u_k e_1>`` real non-negative (falling back to the
    largest-modulus entry of the first column when that entry vanishes).
    """
    gen = np.random.default_rng(0) if gen is None else gen
    basis = alg.basis()
    owner = alg.block_of_coefficient()
    images = [alpha(b) for b in basis]
    for b, img, k in zip(basis, images, owner):
        for kk, blk in enumerate(img.blocks):
            if kk != k and np.max(np.abs(blk), initial=0.0) > tol:
                raise NotBlockPreserving(f"a matrix unit of block {k} is mapped into block {kk}")

    def apply(a):
        c = a.coefficients()
        out = alg.zero()
        for ci, img in zip(c, images):
            if ci != 0:
                out = out + ci * img
        return out

    for _ in range(5):
        a = alg_mod.random_element(alg, gen)
        b = alg_mod.random_element(alg, gen)
        scale = alg_mod.element_norm(a) * alg_mod.element_norm(b)
        if not (apply(a @ b) - apply(a) @ apply(b)).allclose(alg.zero(), tol * scale):
            raise NotMultiplicative("alpha(ab) != alpha(a) alpha(b)")
        if not (apply(a.adjoint()) - apply(a).adjoint()).allclose(alg.zero(), tol * alg_mod.element_norm(a)):
            raise NotMultiplicative("alpha(a*) != alpha(a)*")

    unitaries = []
    offsets = np.concatenate([[0], np.cumsum([n * n for n in alg.block_dims])])
    for k, n in enumerate(alg.block_dims):
        def unit_img(i, j):
            return images[offsets[k] + i * n + j].blocks[k]

        w, v = numerics.eigh(unit_img(0, 0))
        u1 = v[:, -1]
        if abs(u1[0]) > tol:
            u1 = u1 * (abs(u1[0]) / u1[0])
        cols = [unit_img(i, 0) @ u1 for i in range(n)]
        u = np.column_stack(cols)
        if not numerics.is_unitary(u, 1e-8):
            raise NotMultiplicative(f"block {k} image is not implemented by a unitary")
        unitaries.append(u)
    inner = InnerAutomorphism(alg, tuple(unitaries))
    for b, img in zip(basis, images):
        if not inner(b).allclose(img, tol):
            raise NotMultiplicative("alpha is not inner on its blocks")
    return inner


def intertwiner(alpha, omega, psi, gen=None, checks=50):
    """Unitary ``U`` with ``U (A Omega) = alpha(A) Phi`` and ``U Omega = Phi``.

    ``Phi`` is the representative of the pushed-forward state ``alpha_* omega``
    with positive overlap against ``psi``'s vector.  Everything acts in the
    defining representation of the common block.  Returns ``(Phi, U)``.
    """
    if omega.block_index != psi.block_index:
        raise SectorMismatch("alpha_* omega and psi lie in different blocks")
    k = omega.block_index
    u = alpha.unitaries[k]
    pushed = u @ omega.vector
    dist = alg_mod.state_norm_distance(alpha.push_state(omega), psi)
    if dist >= 2.0 - 1e-8:
        raise Antipodal(f"||alpha_* omega - psi|| = {dist:.12f}")
    phi = projgeom.positive_section(psi.vector, projgeom.Ray.of(pushed))
    c = np.vdot(psi.vector, pushed)
    big_u = (np.conj(c) / abs(c)) * u
    if checks:
        gen = np.random.default_rng(12345) if gen is None else gen
        n = omega.algebra.block_dims[k]
        for _ in range(checks):
            a = gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))
            lhs = big_u @ (a @ omega.vector)
            rhs = (u @ a @ dagger(u)) @ phi
            if np.linalg.norm(lhs - rhs) > 1e-9 * max(1.0, np.linalg.norm(a)):
                raise NumericError("intertwiner diagram does not commute")
    return phi, big_u


def state_is_fixed(alpha, omega, tol=1e-9):
    """Whether ``alpha_* omega = omega``."""
    return alg_mod.state_norm_distance(alpha.push_state(omega), omega) <= tol


def ideal_is_invariant(alpha, omega, tol=1e-9):
    """Whether ``alpha`` maps the Gelfand ideal of ``omega`` into itself."""
    ideal = gelfand_ideal(omega.to_state() if isinstance(omega, PureState) else omega)
    return ideal_residual([alpha(b) for b in ideal], ideal) <= tol


def fixes_ray(alpha, omega, tol=1e-9):
    """Whether the block unitary maps ``omega``'s vector into its own ray."""
    v = omega.vector
    w = alpha.unitaries[omega.block_index] @ v
    return abs(abs(np.vdot(v, w)) - 1.0) <= tol

