"""Projective Hilbert space: rays, the chordal / Fubini-Study / gap metrics,
affine charts, positive-overlap sections and the ray <-> pure state bridge.

A :class:`Ray` keeps whatever unit representative it was built from; every
function here is written to be invariant under rephasing that representative.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from gnslab import numerics, policy
from gnslab.algebra import PureState
from gnslab.errors import (
    DifferentSectors,
    DimensionMismatch,
    NotNormalized,
    OrthogonalRay,
    ZeroVector,
)


@dataclasses.dataclass(frozen=True, eq=False)
class Ray:
    representative: np.ndarray

    def __post_init__(self):
        v = numerics.as_vector(self.representative)
        if abs(numerics.norm(v) - 1.0) > 1e-12:
            raise NotNormalized(f"ray representative has norm {numerics.norm(v)!r}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "representative", v)

    @classmethod
    def of(cls, v):
        """Ray through a nonzero vector."""
        v = numerics.as_vector(v)
        nv = numerics.norm(v)
        if nv == 0:
            raise ZeroVector("the zero vector spans no ray")
        return cls(v / nv)

    @property
    def dim(self):
        return self.representative.size

    def projector(self):
        v = self.representative
        return np.outer(v, np.conj(v))


@dataclasses.dataclass(frozen=True, eq=False)
class ChartPoint:
    """Point ``tangent`` of the affine chart ``C_base = (C base)^perp``."""

    base: np.ndarray
    tangent: np.ndarray

    def __post_init__(self):
        b = numerics.as_vector(self.base)
        t = numerics.as_vector(self.tangent)
        if b.size != t.size:
            raise DimensionMismatch("base and tangent have different dimensions")
        if abs(np.vdot(b, t)) > 1e-10 * max(1.0, numerics.norm(t)):
            raise ValueError("tangent is not orthogonal to the base vector")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "tangent", t)


def _check_dims(k, l):
    if k.dim != l.dim:
        raise DimensionMismatch(f"rays in C^{k.dim} and C^{l.dim}")


def ray_product(k, l):
    """``|<k, l>|`` for unit representatives, clipped to [0, 1]."""
    _check_dims(k, l)
    return min(1.0, abs(np.vdot(k.representative, l.representative)))


def _sin_angle(k, l):
    """``sqrt(1 - |<k, l>|^2)`` as the norm of the component of ``l`` orthogonal to ``k``.

    Evaluating the square root of ``1 - p^2`` directly loses half the digits
    for nearly equal rays; the orthogonal residual does not.
    """
    _check_dims(k, l)
    x, y = k.representative, l.representative
    return min(1.0, numerics.norm(y - np.vdot(x, y) * x))


def d_chordal(k, l):
    """``sqrt(2 (1 - p))``, evaluated as ``sqrt(2 s^2 / (1 + p))`` with ``s`` the sine of the angle."""
    s = _sin_angle(k, l)
    return math.sqrt(2.0 * s * s / (1.0 + ray_product(k, l)))


def d_fubini_study(k, l):
    """``arccos p``, evaluated as ``atan2(s, p)``."""
    return math.atan2(_sin_angle(k, l), ray_product(k, l))


def d_gap(k, l):
    """``sqrt(1 - p^2)``."""
    return _sin_angle(k, l)


def gap_via_projection(k, l):
    """Gap distance as the operator norm of the difference of rank-one projections."""
    _check_dims(k, l)
    return numerics.operator_norm(k.projector() - l.projector())


def _overlap(psi, l, tol):
    c = complex(np.vdot(psi, l.representative))
    if abs(c) <= tol:
        raise OrthogonalRay(f"ray product {abs(c):.3e} is below {tol:g}")
    return c


def chart_forward(psi, l, tol=None):
    """``tau_psi(C w) = w / <psi, w> - psi``."""
    psi = numerics.as_vector(psi)
    if psi.size != l.dim:
        raise DimensionMismatch("base vector and ray have different dimensions")
    tol = policy.current().orthogonal_ray if tol is None else tol
    c = _overlap(psi, l, tol)
    t = l.representative / c - psi
    t = t - np.vdot(psi, t) * psi
    return ChartPoint(psi, t)


def chart_backward(p):
    """Inverse chart: the ray through ``tangent + base``."""
    return Ray.of(p.tangent + p.base)


def positive_section(psi, l, tol=None):
    """The unit representative ``phi`` of ``l`` with ``<phi, psi>`` real and positive."""
    psi = numerics.as_vector(psi)
    if psi.size != l.dim:
        raise DimensionMismatch("base vector and ray have different dimensions")
    tol = policy.current().orthogonal_ray if tol is None else tol
    c = _overlap(psi, l, tol)
    phi = l.representative * (np.conj(c) / abs(c))
    return phi / numerics.norm(phi)


def ray_to_pure(alg, block_index, l):
    n = alg.block_dims[block_index]
    if l.dim != n:
        raise DimensionMismatch(f"ray in C^{l.dim} for block of size {n}")
    return PureState(alg, block_index, l.representative)


def pure_to_ray(ps):
    return Ray(ps.vector)


def fs_geodesic_distance(ps1, ps2):
    """Fubini-Study distance between pure states in the same sector."""
    if ps1.algebra != ps2.algebra or ps1.block_index != ps2.block_index:
        raise DifferentSectors("pure states lie in different blocks")
    return d_fubini_study(pure_to_ray(ps1), pure_to_ray(ps2))
