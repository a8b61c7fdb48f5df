"""Constructive Kadison transitivity in the defining representation of ``M_d``.

The continuous selections guaranteed abstractly are replaced by explicit,
continuous building blocks: Gram-Schmidt normalization of the source
family, the rank-``n`` interpolant on the orthonormalized family, its
compression to ``span{x, y}``, rotation unitaries ``U_{x,y}`` and the
phase-then-rotation exponential form.
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from gnslab import algebra as alg_mod
from gnslab import numerics, projgeom
from gnslab.errors import (
    Antipodal,
    BranchCut,
    DimensionMismatch,
    NoSelfAdjointSolution,
    NotOrthonormal,
    NoUnitarySolution,
    SectorMismatch,
    TooFar,
)
from gnslab.numerics import dagger


class Flavor(str, enum.Enum):
    GENERAL = "general"
    SELF_ADJOINT = "self_adjoint"
    UNITARY = "unitary"


@dataclasses.dataclass(frozen=True, eq=False)
class InterpolationProblem:
    xs: tuple
    ys: tuple
    flavor: Flavor = Flavor.GENERAL

    def __post_init__(self):
        xs = tuple(numerics.as_vector(x) for x in self.xs)
        ys = tuple(numerics.as_vector(y) for y in self.ys)
        if len(xs) != len(ys) or not xs:
            raise DimensionMismatch("xs and ys must be non-empty and of equal length")
        if len({v.size for v in xs + ys}) != 1:
            raise DimensionMismatch("all vectors must live in the same space")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "flavor", Flavor(self.flavor))

    @property
    def hilbert_dim(self):
        return self.xs[0].size

    @property
    def n(self):
        return len(self.xs)


@dataclasses.dataclass(frozen=True, eq=False)
class NormalizedInterpolant:
    """Data of the normalized problem ``T e_i = z_i`` with ``e = Lambda x``, ``z = Lambda y``."""

    es: tuple
    zs: tuple
    lam: np.ndarray
    interpolant: np.ndarray
    compressed: np.ndarray
    span_projector: np.ndarray


def _check_orthonormal(vs, tol=1e-10):
    g = np.array([[np.vdot(a, b) for b in vs] for a in vs])
    if np.max(np.abs(g - np.eye(len(vs))), initial=0.0) > tol:
        raise NotOrthonormal("family is not orthonormal")


def bounded_interpolant(xs, zs):
    """``T = sum_i z_i <x_i, .>`` for an orthonormal family ``xs``."""
    xs = [numerics.as_vector(x) for x in xs]
    zs = [numerics.as_vector(z) for z in zs]
    _check_orthonormal(xs)
    d = xs[0].size
    t = np.zeros((d, d), dtype=complex)
    for x, z in zip(xs, zs):
        t += np.outer(z, np.conj(x))
    return t


def normalized_interpolant(problem, tol=1e-10):
    es, lam = numerics.gram_schmidt(problem.xs, tol)
    ys = np.array(problem.ys)
    zs = lam @ ys
    t = bounded_interpolant(es, zs)
    p = numerics.span_projector(list(problem.xs) + list(problem.ys), tol)
    return NormalizedInterpolant(tuple(es), tuple(zs), lam, t, p @ t @ p, p)


def _hermitian_basis(k):
    out = []
    for i in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    s = 1.0 / math.sqrt(2.0)
    for i in range(k):
        for j in range(i + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = e[j, i] = s
            out.append(e)
            f = np.zeros((k, k), dtype=complex)
            f[i, j], f[j, i] = -1j * s, 1j * s
            out.append(f)
    return out


def hermitian_least_squares(xs, ys, tol=1e-10):
    """Least-Frobenius-norm Hermitian ``A`` on ``span{xs, ys}`` minimizing ``sum ||A x_i - y_i||^2``.

    Returns ``(A, residual)``.
    """
    q = numerics.orthonormal_basis(list(xs) + list(ys), tol)
    k = q.shape[1]
    xk = dagger(q) @ np.column_stack(xs)
    yk = dagger(q) @ np.column_stack(ys)
    basis = _hermitian_basis(k)
    cols = []
    for h in basis:
        r = (h @ xk).reshape(-1)
        cols.append(np.concatenate([r.real, r.imag]))
    target = yk.reshape(-1)
    rhs = np.concatenate([target.real, target.imag])
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), rhs, rcond=None)
    h = sum(c * b for c, b in zip(coef, basis))
    a = q @ h @ dagger(q)
    a = 0.5 * (a + dagger(a))
    residual = max(float(np.linalg.norm(a @ x - y)) for x, y in zip(xs, ys))
    return a, residual


def kadison_solve(problem, tol=1e-10):
    """An element ``A`` of ``M_d`` with ``A x_i = y_i`` for all ``i``.

    * general: the compressed normalized interpolant ``P T P``;
    * self_adjoint: the least-norm Hermitian solution on ``span{x, y}``;
    * unitary: the inductive rotation product on the orthonormalized frames.
    """
    data = normalized_interpolant(problem, tol)
    xs, ys = problem.xs, problem.ys
    scale = 1.0 + max(numerics.norm(y) for y in ys)
    d = problem.hilbert_dim
    alg = alg_mod.CStarAlgebra.full(d)
    if problem.flavor is Flavor.GENERAL:
        a = data.compressed
    elif problem.flavor is Flavor.SELF_ADJOINT:
        a, residual = hermitian_least_squares(xs, ys, tol)
        if residual > 1e-8 * scale:
            raise NoSelfAdjointSolution(residual)
    else:
        gx = np.array([[np.vdot(u, v) for v in xs] for u in xs])
        gy = np.array([[np.vdot(u, v) for v in ys] for u in ys])
        defect = float(np.max(np.abs(gx - gy)))
        if defect > 1e-8:
            raise NoUnitarySolution(defect)
        zs = [z / numerics.norm(z) for z in data.zs]
        a = frame_unitary(data.es, zs)
    return alg.element(a)


def frame_unitary(es, fs):
    """Unitary mapping the orthonormal family ``es`` onto ``fs``, identity off their span.

    Built by the inductive composition ``W = U_{V e_{k}, f_k} V``.
    """
    d = es[0].size
    w = np.eye(d, dtype=complex)
    for e, f in zip(es, fs):
        w = rotation_unitary(w @ e, f) @ w
    return w


def rotation_unitary(x, y):
    """``U_{x,y}``: maps ``x`` to ``y`` and is the identity on ``span{x, y}^perp``.

    On ``K = span{x, y}`` it acts by ``z -> <y,x> z - <y,z> x + <x,z> y``.
    """
    x = numerics.as_vector(x)
    y = numerics.as_vector(y)
    d = x.size
    r = y - np.vdot(x, y) * x
    rn = numerics.norm(r)
    if rn <= 1e-14:
        pk = np.outer(x, np.conj(x))
    else:
        w = r / rn
        pk = np.outer(x, np.conj(x)) + np.outer(w, np.conj(w))
    m = np.vdot(y, x) * np.eye(d) - np.outer(x, np.conj(y)) + np.outer(y, np.conj(x))
    return np.eye(d) - pk + pk @ m @ pk


def exp_form_unitary(x, y, branch_tol=1e-8):
    """Phase correction followed by rotation, written as ``exp(i G)``.

    With ``alpha = Im Log <x, y>`` the phase step is ``exp(i alpha P_x)``; it
    makes the overlap positive.  The rotation step is ``exp(i T)`` where ``T``
    has matrix ``[[0, i theta], [-i theta, 0]]`` in the basis ``{x', w}``,
    ``theta = arccos <x', y>``.  Returns ``(G, U)`` with ``U = exp(i G)``.
    """
    x = numerics.as_vector(x)
    y = numerics.as_vector(y)
    c = complex(np.vdot(x, y))
    if c.real <= 0 and abs(c.imag) < branch_tol:
        raise BranchCut(f"<x, y> = {c} lies on the non-positive real axis")
    d = x.size
    alpha = math.atan2(c.imag, c.real)
    px = np.outer(x, np.conj(x))
    v = np.eye(d) + (np.exp(1j * alpha) - 1.0) * px
    xp = np.exp(1j * alpha) * x
    cp = float(np.real(np.vdot(xp, y)))
    theta = math.acos(min(1.0, max(-1.0, cp)))
    r = y - cp * xp
    rn = numerics.norm(r)
    if rn <= 1e-14 or theta == 0.0:
        rot_gen = np.zeros((d, d), dtype=complex)
    else:
        w = r / rn
        rot_gen = 1j * theta * np.outer(xp, np.conj(w)) - 1j * theta * np.outer(w, np.conj(xp))
    u = numerics.matrix_exp(1j * rot_gen) @ v
    if theta == 0.0 or rn <= 1e-14:
        gen = alpha * px
    else:
        gen = -1j * numerics.matrix_log_principal(u)
        gen = 0.5 * (gen + dagger(gen))
    return gen, u


def stiefel_delta(eps, n):
    """Admissible radius from the inductive construction: ``delta(eps, 1) = eps``,
    ``delta(eps, n + 1) = min(delta(eps / 3, n), eps / 3)``."""
    if n <= 1:
        return eps
    return min(stiefel_delta(eps / 3.0, n - 1), eps / 3.0)


def stiefel_transport(xs, ys, eps):
    """Unitary with ``U x_i = y_i``, identity off ``span{x, y}``, ``||I - U|| < eps``."""
    xs = [numerics.as_vector(x) for x in xs]
    ys = [numerics.as_vector(y) for y in ys]
    _check_orthonormal(xs)
    _check_orthonormal(ys)
    u = frame_unitary(xs, ys)
    dist = max(numerics.norm(x - y) for x, y in zip(xs, ys))
    delta = stiefel_delta(eps, len(xs))
    if dist >= delta:
        achieved = numerics.operator_norm(np.eye(u.shape[0]) - u)
        raise TooFar(dist, delta, achieved, u)
    return u


def transport_unitary(omega, psi):
    """Unitary element ``U`` with ``U . omega = psi`` (i.e. ``U Omega`` spans ``psi``'s ray).

    Acts as ``exp_form_unitary(Omega, Phi)`` on the common block, where ``Phi``
    is the representative of ``psi`` with positive overlap against ``Omega``,
    and as the identity on all other blocks.
    """
    if omega.algebra != psi.algebra or omega.block_index != psi.block_index:
        raise SectorMismatch("states lie in different blocks")
    dist = alg_mod.state_norm_distance(omega, psi)
    if dist >= 2.0 - 1e-8:
        raise Antipodal(f"||omega - psi|| = {dist:.12f}")
    phi = projgeom.positive_section(omega.vector, projgeom.Ray(psi.vector))
    _, u = exp_form_unitary(omega.vector, phi)
    alg = omega.algebra
    blocks = [np.eye(n, dtype=complex) for n in alg.block_dims]
    blocks[omega.block_index] = u
    return alg_mod.AlgebraElement(alg, tuple(blocks))
