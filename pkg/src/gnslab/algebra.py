"""Finite-dimensional C*-algebras ``M_{n_1} + ... + M_{n_K}``, their elements and states.

States are stored blockwise as density matrices, so the dual norm of a
difference of states is the sum of blockwise trace norms, and purity is a
rank condition.  The superselection sector of a pure state is its block index.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from gnslab import numerics, policy, sampling
from gnslab.errors import (
    AlgebraMismatch,
    InvalidState,
    NotHermitian,
    NotNormalized,
    ShapeMismatch,
    SpectrumAtMinusOne,
    ZeroVector,
)
from gnslab.numerics import dagger

MAX_TOTAL_DIM = 4096


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True)
class CStarAlgebra:
    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise ShapeMismatch(f"block dimensions must be positive, got {self.block_dims}")
        if sum(n * n for n in dims) > MAX_TOTAL_DIM:
            raise ShapeMismatch(f"total dimension exceeds {MAX_TOTAL_DIM}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def full(cls, n):
        return cls((n,))

    @property
    def dim(self):
        return sum(n * n for n in self.block_dims)

    @property
    def hilbert_dim(self):
        """Dimension of the defining representation on the direct sum of the blocks."""
        return sum(self.block_dims)

    def block_offsets(self):
        return np.concatenate([[0], np.cumsum(self.block_dims)]).astype(int)

    def unit(self):
        return AlgebraElement(self, tuple(np.eye(n) for n in self.block_dims))

    def zero(self):
        return AlgebraElement(self, tuple(np.zeros((n, n)) for n in self.block_dims))

    def element(self, *blocks):
        return AlgebraElement(self, tuple(blocks))

    def from_coefficients(self, c):
        """Element with coordinates ``c`` in the matrix-unit basis (row-major per block)."""
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.dim,):
            raise ShapeMismatch(f"expected {self.dim} coefficients, got {c.shape}")
        blocks, start = [], 0
        for n in self.block_dims:
            blocks.append(c[start:start + n * n].reshape(n, n))
            start += n * n
        return AlgebraElement(self, tuple(blocks))

    def basis(self):
        """Matrix units ``E^(k)_{ij}``; orthonormal for the Frobenius inner product."""
        out = []
        for idx in range(self.dim):
            c = np.zeros(self.dim)
            c[idx] = 1.0
            out.append(self.from_coefficients(c))
        return out

    def block_of_coefficient(self):
        return np.repeat(np.arange(len(self.block_dims)), [n * n for n in self.block_dims])


@dataclasses.dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: CStarAlgebra
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(_frozen(b) for b in self.blocks)
        if len(blocks) != len(self.algebra.block_dims):
            raise ShapeMismatch(f"expected {len(self.algebra.block_dims)} blocks, got {len(blocks)}")
        for b, n in zip(blocks, self.algebra.block_dims):
            if b.shape != (n, n):
                raise ShapeMismatch(f"block of shape {b.shape} where ({n}, {n}) is required")
        object.__setattr__(self, "blocks", blocks)

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatch("elements belong to different algebras")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-a for a in self.blocks))

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(scalar * a for a in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def adjoint(self):
        return AlgebraElement(self.algebra, tuple(dagger(a) for a in self.blocks))

    def coefficients(self):
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    def dense(self):
        """Block-diagonal matrix of the element in the defining representation."""
        n = self.algebra.hilbert_dim
        out = np.zeros((n, n), dtype=complex)
        off = self.algebra.block_offsets()
        for k, b in enumerate(self.blocks):
            out[off[k]:off[k + 1], off[k]:off[k + 1]] = b
        return out

    def allclose(self, other, atol):
        self._check(other)
        return all(np.max(np.abs(a - b), initial=0.0) <= atol
                   for a, b in zip(self.blocks, other.blocks))


def element_norm(a):
    return max(numerics.operator_norm(b) for b in a.blocks)


# ---------------------------------------------------------------- states

@dataclasses.dataclass(frozen=True, eq=False)
class State:
    algebra: CStarAlgebra
    densities: tuple

    def __post_init__(self):
        tol = policy.current().state
        rhos = tuple(_frozen(r) for r in self.densities)
        if len(rhos) != len(self.algebra.block_dims):
            raise ShapeMismatch("one density matrix per block is required")
        total = 0.0
        for r, n in zip(rhos, self.algebra.block_dims):
            if r.shape != (n, n):
                raise ShapeMismatch(f"density of shape {r.shape} where ({n}, {n}) is required")
            if np.max(np.abs(r - dagger(r)), initial=0.0) > tol:
                raise InvalidState("density part is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (r + dagger(r)))[0] < -tol:
                raise InvalidState("density part is not positive semidefinite")
            total += float(np.real(np.trace(r)))
        if abs(total - 1.0) > tol:
            raise InvalidState(f"total trace {total!r} is not 1")
        object.__setattr__(self, "densities", rhos)

    def to_state(self):
        return self


@dataclasses.dataclass(frozen=True, eq=False)
class PureState:
    """Vector state of a unit vector in a single block."""

    algebra: CStarAlgebra
    block_index: int
    vector: np.ndarray

    def __post_init__(self):
        k = int(self.block_index)
        if not 0 <= k < len(self.algebra.block_dims):
            raise ShapeMismatch(f"block index {k} out of range")
        v = numerics.as_vector(self.vector)
        if v.size != self.algebra.block_dims[k]:
            raise ShapeMismatch(f"vector of length {v.size} for block of size {self.algebra.block_dims[k]}")
        if abs(numerics.norm(v) - 1.0) > 1e-12:
            raise NotNormalized(f"||vector|| = {numerics.norm(v)!r}")
        object.__setattr__(self, "block_index", k)
        object.__setattr__(self, "vector", _frozen(v))

    def to_state(self):
        rhos = [np.zeros((n, n), dtype=complex) for n in self.algebra.block_dims]
        rhos[self.block_index] = np.outer(self.vector, np.conj(self.vector))
        return State(self.algebra, tuple(rhos))


def pure_state(alg, block_index, vector, normalize=False):
    v = np.asarray(vector, dtype=complex)
    if normalize:
        nv = np.linalg.norm(v)
        if nv == 0:
            raise ZeroVector("cannot normalize the zero vector")
        v = v / nv
    return PureState(alg, block_index, v)


def _same_algebra(*objs):
    alg = objs[0].algebra
    if any(o.algebra != alg for o in objs[1:]):
        raise AlgebraMismatch("objects belong to different algebras")
    return alg


def evaluate(s, a):
    """``s(a) = sum_k tr(rho_k a_k)``; pure states use ``<v, a_k v>``."""
    _same_algebra(s, a)
    if isinstance(s, PureState):
        v = s.vector
        return complex(np.vdot(v, a.blocks[s.block_index] @ v))
    return complex(sum(np.trace(r @ b) for r, b in zip(s.densities, a.blocks)))


def state_norm_distance(s1, s2):
    """Dual-norm distance ``||s1 - s2||``, computed as a sum of blockwise trace norms."""
    _same_algebra(s1, s2)
    d1, d2 = s1.to_state().densities, s2.to_state().densities
    return float(sum(numerics.trace_norm(a - b) for a, b in zip(d1, d2)))


def is_pure(s, tol=None):
    """Return ``(True, PureState)`` when ``s`` is pure, else ``(False, None)``."""
    if isinstance(s, PureState):
        return True, s
    tol = policy.current().purity if tol is None else tol
    traces = [float(np.real(np.trace(r))) for r in s.densities]
    support = [k for k, t in enumerate(traces) if t > tol]
    if len(support) != 1:
        return False, None
    k = support[0]
    w, v = numerics.eigh(s.densities[k])
    if w.size > 1 and w[-2] >= tol:
        return False, None
    return True, PureState(s.algebra, k, v[:, -1] / np.linalg.norm(v[:, -1]))


def vector_state(alg, v):
    """State of a unit vector in the defining representation ``C^{n_1} + ... + C^{n_K}``.

    Block ``k`` receives ``|v_k><v_k|`` for the (unnormalized) component ``v_k``.
    """
    v = numerics.as_vector(v)
    if v.size != alg.hilbert_dim:
        raise ShapeMismatch(f"vector of length {v.size}; algebra acts on C^{alg.hilbert_dim}")
    nv = numerics.norm(v)
    if nv == 0:
        raise ZeroVector("zero vector has no state")
    if abs(nv - 1.0) > policy.current().normalization:
        raise NotNormalized(f"||v|| = {nv!r}")
    off = alg.block_offsets()
    rhos = tuple(np.outer(v[off[k]:off[k + 1]], np.conj(v[off[k]:off[k + 1]]))
                 for k in range(len(alg.block_dims)))
    return State(alg, rhos)


def quasi_local_perturbation(s, b):
    """The state ``A -> s(b* A b)``; requires ``s(b* b) = 1``.

    A pure input yields a :class:`PureState`, a general state a :class:`State`.
    """
    _same_algebra(s, b)
    nb = evaluate(s, b.adjoint() @ b)
    if abs(nb - 1.0) > policy.current().normalization:
        raise NotNormalized(f"s(b* b) = {nb!r}, expected 1")
    if isinstance(s, PureState):
        w = b.blocks[s.block_index] @ s.vector
        return PureState(s.algebra, s.block_index, w / np.linalg.norm(w))
    rhos = tuple(bk @ r @ dagger(bk) for bk, r in zip(b.blocks, s.densities))
    return State(s.algebra, rhos)


# ---------------------------------------------------------------- automorphisms

@dataclasses.dataclass(frozen=True, eq=False)
class InnerAutomorphism:
    """The automorphism ``A -> u A u*`` given by one unitary per block."""

    algebra: CStarAlgebra
    unitaries: tuple

    def __post_init__(self):
        us = tuple(_frozen(u) for u in self.unitaries)
        for u, n in zip(us, self.algebra.block_dims):
            if u.shape != (n, n):
                raise ShapeMismatch("unitary shape does not match block")
            if not numerics.is_unitary(u, 1e-10):
                raise ShapeMismatch("block map is not unitary")
        if len(us) != len(self.algebra.block_dims):
            raise ShapeMismatch("one unitary per block is required")
        object.__setattr__(self, "unitaries", us)

    @classmethod
    def identity(cls, alg):
        return cls(alg, tuple(np.eye(n) for n in alg.block_dims))

    def __call__(self, a):
        _same_algebra(self, a)
        return AlgebraElement(self.algebra,
                              tuple(u @ b @ dagger(u) for u, b in zip(self.unitaries, a.blocks)))

    def inverse(self):
        return InnerAutomorphism(self.algebra, tuple(dagger(u) for u in self.unitaries))

    def push_state(self, s):
        """``alpha_* s = s o alpha^{-1}``."""
        if isinstance(s, PureState):
            u = self.unitaries[s.block_index]
            return PureState(self.algebra, s.block_index, u @ s.vector)
        return State(self.algebra, tuple(u @ r @ dagger(u) for u, r in zip(self.unitaries, s.densities)))


@dataclasses.dataclass(frozen=True, eq=False)
class Derivation:
    """Symmetric derivation ``delta(A) = i[h, A]`` with Hermitian block generators."""

    algebra: CStarAlgebra
    generators: tuple

    def __post_init__(self):
        hs = tuple(_frozen(h) for h in self.generators)
        if len(hs) != len(self.algebra.block_dims):
            raise ShapeMismatch("one generator per block is required")
        for h, n in zip(hs, self.algebra.block_dims):
            if h.shape != (n, n):
                raise ShapeMismatch("generator shape does not match block")
            if np.max(np.abs(h - dagger(h)), initial=0.0) > policy.current().hermiticity * max(1.0, np.max(np.abs(h))):
                raise NotHermitian("derivation generator is not Hermitian")
        object.__setattr__(self, "generators", hs)

    def __call__(self, a):
        _same_algebra(self, a)
        return AlgebraElement(self.algebra,
                              tuple(1j * (h @ b - b @ h) for h, b in zip(self.generators, a.blocks)))


def exp_derivation(d, t):
    """The automorphism ``exp(t delta)``, realized as ``Ad(exp(i t h))``."""
    return InnerAutomorphism(d.algebra, tuple(numerics.matrix_exp(1j * t * h) for h in d.generators))


# ---------------------------------------------------------------- Cayley transform

def cayley(u, gap=None):
    """``i (I - u)(I + u)^{-1}`` for a unitary element without -1 in its spectrum."""
    gap = policy.current().minus_one_gap if gap is None else gap
    out = []
    for b in u.blocks:
        n = b.shape[0]
        if np.min(np.abs(np.linalg.eigvals(b) + 1.0)) < gap:
            raise SpectrumAtMinusOne("-1 lies in the spectrum")
        eye = np.eye(n)
        x = 1j * np.linalg.solve((eye + b).T, (eye - b).T).T
        out.append(0.5 * (x + dagger(x)))
    return AlgebraElement(u.algebra, tuple(out))


def cayley_inverse(a):
    """``(iI - a)(iI + a)^{-1}`` for a Hermitian element."""
    out = []
    for b in a.blocks:
        eye = np.eye(b.shape[0])
        out.append(np.linalg.solve((1j * eye + b).T, (1j * eye - b).T).T)
    return AlgebraElement(a.algebra, tuple(out))


# ---------------------------------------------------------------- random data

def random_element(alg, gen):
    return AlgebraElement(alg, tuple(sampling.complex_normal(gen, (n, n)) for n in alg.block_dims))


def random_unitary_element(alg, gen):
    return AlgebraElement(alg, tuple(sampling.unitary(gen, n) for n in alg.block_dims))


def random_pure_state(alg, gen, block_index=None):
    k = int(gen.integers(len(alg.block_dims))) if block_index is None else block_index
    return PureState(alg, k, sampling.unit_vector(gen, alg.block_dims[k]))


def random_state(alg, gen, weights: Sequence[float] | None = None):
    """Full-rank random state; block weights drawn uniformly unless given."""
    if weights is None:
        weights = gen.random(len(alg.block_dims)) + 0.1
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    rhos = []
    for n, wgt in zip(alg.block_dims, weights):
        g = sampling.complex_normal(gen, (n, n))
        r = g @ dagger(g)
        rhos.append(wgt * r / np.real(np.trace(r)))
    return State(alg, tuple(rhos))
