"""Non-interacting spin-1/2 lattice at finite truncation.

Each site ``v`` carries ``H_{r_v} = r_v . sigma``; the ground state on a
finite region is the product ``Omega = (x)_v Psi_{r_v}``.  Expectations of
simple tensors factorize, norm distances between product states reduce to
an overlap product, and dense ``2^|Lambda|`` vectors are built only for the
ground-state inequality and the spectrum.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from gnslab import numerics, plots
from gnslab.bundles import PAULI, spin_hamiltonian
from gnslab.errors import NumericError, SiteMismatch, SupportOutsideLattice, TooLarge

MAX_DENSE_SITES = 12


def enumerate_sites(count, d=1):
    """First ``count`` sites of ``Z^d`` ordered by max-norm shell, then lexicographically."""
    if d == 1:
        return tuple((v,) for v in range(count))
    out = []
    radius = 0
    while len(out) < count:
        shell = [p for p in itertools.product(range(-radius, radius + 1), repeat=d)
                 if max(abs(c) for c in p) == radius]
        out.extend(sorted(shell))
        radius += 1
    return tuple(out[:count])


@dataclasses.dataclass(frozen=True, eq=False)
class FieldConfig:
    """Unit field ``r_v`` on an ordered finite set of sites."""

    sites: tuple
    r: np.ndarray

    def __post_init__(self):
        sites = tuple(tuple(int(c) for c in s) for s in self.sites)
        r = np.array(self.r, dtype=float).reshape(len(sites), 3)
        if len(set(sites)) != len(sites):
            raise ValueError("duplicate sites")
        if len(sites) and np.max(np.abs(np.linalg.norm(r, axis=1) - 1.0)) > 1e-12:
            raise ValueError("field vectors must be unit vectors")
        r.setflags(write=False)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "r", r)

    @classmethod
    def constant(cls, sites, r):
        """The diagonal configuration ``Delta(r)`` restricted to ``sites``."""
        return cls(sites, np.tile(np.asarray(r, dtype=float), (len(sites), 1)))

    def __len__(self):
        return len(self.sites)

    def position(self, site):
        return self.sites.index(tuple(site))

    def field(self, site):
        return self.r[self.position(site)]


@dataclasses.dataclass(frozen=True, eq=False)
class ProductGroundState:
    config: FieldConfig
    vectors: np.ndarray

    def vector(self, site):
        return self.vectors[self.config.position(site)]

    def dense(self):
        """``Omega`` as a ``2^n`` vector, first site most significant."""
        out = np.ones(1, dtype=complex)
        for v in self.vectors:
            out = np.kron(out, v)
        return out


def ground_state(config):
    """Per-site lowest eigenvectors of ``H_{r_v}``, phase fixed by :func:`numerics.eigh`."""
    vecs = np.array([numerics.eigh(spin_hamiltonian(r)).eigenvectors[:, 0] for r in config.r])
    vecs = vecs.reshape(len(config), 2)
    return ProductGroundState(config, vecs)


@dataclasses.dataclass(frozen=True, eq=False)
class LocalOperator:
    """Operator on ``(x)_{v in support} C^2``.

    Either a simple tensor (``factors``, one ``2x2`` per supported site) or a
    dense ``2^k x 2^k`` matrix in support order.
    """

    support: tuple
    factors: tuple | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        support = tuple(tuple(int(c) for c in s) for s in self.support)
        if len(set(support)) != len(support):
            raise ValueError("support has duplicate sites")
        object.__setattr__(self, "support", support)
        if (self.factors is None) == (self.matrix is None):
            raise ValueError("give exactly one of factors or matrix")
        if self.factors is not None:
            fs = tuple(numerics.as_matrix(f, square=True) for f in self.factors)
            if len(fs) != len(support) or any(f.shape != (2, 2) for f in fs):
                raise ValueError("need one 2x2 factor per supported site")
            object.__setattr__(self, "factors", fs)
        else:
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (2 ** len(support),) * 2:
                raise ValueError(f"dense matrix must be {2 ** len(support)}-dimensional")
            object.__setattr__(self, "matrix", m)

    @classmethod
    def simple(cls, factors: Mapping):
        items = list(factors.items())
        return cls(tuple(s for s, _ in items), factors=tuple(f for _, f in items))

    @classmethod
    def identity(cls):
        return cls((), factors=())

    def dense_on_support(self):
        if self.matrix is not None:
            return self.matrix
        out = np.ones((1, 1), dtype=complex)
        for f in self.factors:
            out = np.kron(out, f)
        return out

    def norm(self):
        if self.factors is not None:
            return math.prod(numerics.operator_norm(f) for f in self.factors)
        return numerics.operator_norm(self.matrix)


def _positions(config, support):
    pos = []
    for s in support:
        try:
            pos.append(config.position(s))
        except ValueError:
            raise SupportOutsideLattice(f"site {s} is not in the lattice") from None
    return pos


def expectation(state, a):
    """``omega_{r, Lambda}(A)``: a product of one-site expectations for simple tensors."""
    pos = _positions(state.config, a.support)
    psis = [state.vectors[p] for p in pos]
    if a.factors is not None:
        out = 1.0 + 0.0j
        for psi, f in zip(psis, a.factors):
            out *= np.vdot(psi, f @ psi)
        return complex(out)
    omega = np.ones(1, dtype=complex)
    for psi in psis:
        omega = np.kron(omega, psi)
    return complex(np.vdot(omega, a.matrix @ omega))


def apply_local(a, config, vec):
    """``A`` applied to a dense ``2^n`` vector over ``config``'s sites."""
    n = len(config)
    pos = _positions(config, a.support)
    t = np.asarray(vec, dtype=complex).reshape((2,) * n)
    if not pos:
        return t.reshape(-1).copy()
    k = len(pos)
    m = a.dense_on_support().reshape((2,) * (2 * k))
    t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), pos))
    t = np.moveaxis(t, list(range(k)), pos)
    return t.reshape(-1)


def _apply_site(mat, p, n, vec):
    t = vec.reshape((2,) * n)
    t = np.moveaxis(np.tensordot(mat, t, axes=(1, p)), 0, p)
    return t.reshape(-1)


def interaction_distance(c1, c2):
    """``||Phi_r - Phi_r'|| = max_v ||r_v - r'_v||``."""
    if c1.sites != c2.sites:
        raise SiteMismatch("configurations live on different sites")
    best = 0.0
    for a, b in zip(c1.r.tolist(), c2.r.tolist()):
        dx, dy, dz = a[0] - b[0], a[1] - b[1], a[2] - b[2]
        best = max(best, math.sqrt(dx * dx + dy * dy + dz * dz))
    return best


def site_operator_distance(c1, c2):
    """``max_v ||H_{r_v} - H_{r'_v}||`` computed from operator norms."""
    if c1.sites != c2.sites:
        raise SiteMismatch("configurations live on different sites")
    return max((numerics.operator_norm(spin_hamiltonian(a) - spin_hamiltonian(b))
                for a, b in zip(c1.r, c2.r)), default=0.0)


@dataclasses.dataclass(frozen=True)
class DistanceReport:
    exact: float
    bound: float
    overlap: complex


def local_state_distance(s1, s2):
    """Exact ``||omega - omega'||`` from the overlap product, with the site-sum bound.

    ``bound = 2 sum_v min_phase ||Psi_v - e^{it} Psi'_v||``.
    """
    if s1.config.sites != s2.config.sites:
        raise SiteMismatch("states live on different sites")
    overlaps = np.einsum("vi,vi->v", np.conj(s1.vectors), s2.vectors)
    prod = complex(np.prod(overlaps)) if len(overlaps) else 1.0 + 0.0j
    # sin^2 per site from the orthogonal residual; 1 - p^2 itself cancels badly
    resid = s2.vectors - overlaps[:, None] * s1.vectors
    sin2 = np.minimum(1.0, np.sum(np.abs(resid) ** 2, axis=1))
    one_minus = -math.expm1(float(np.sum(np.log1p(-sin2)))) if np.all(sin2 < 1.0) else 1.0
    exact = 2.0 * math.sqrt(max(0.0, min(1.0, one_minus)))
    # min over phases of ||Psi - e^{it} Psi'|| = sqrt(2 - 2|o|) = sqrt(2 sin^2 / (1 + |o|))
    per_site = np.sqrt(2.0 * sin2 / (1.0 + np.minimum(1.0, np.abs(overlaps))))
    bound = 2.0 * float(np.sum(per_site))
    if exact > bound + 1e-12:
        raise NumericError(f"exact distance {exact} exceeds site-sum bound {bound}")
    return DistanceReport(exact, bound, prod)


def ground_state_inequality(state, a):
    """``-i omega(A* delta(A)) = sum_v <A Omega, (H_v + I) A Omega>``; non-negative for ground states.

    Also evaluated as ``omega(A* [H, A])`` and the two are required to agree.
    """
    n = len(state.config)
    if n > MAX_DENSE_SITES:
        raise TooLarge(f"{n} sites exceeds the dense limit {MAX_DENSE_SITES}")
    omega = state.dense()
    phi = apply_local(a, state.config, omega)
    total = 0.0 + 0.0j
    h_phi = np.zeros_like(phi)
    for p, r in enumerate(state.config.r):
        hv = _apply_site(spin_hamiltonian(r), p, n, phi)
        h_phi += hv
        total += np.vdot(phi, hv + phi)
    h_omega = np.zeros_like(omega)
    for p, r in enumerate(state.config.r):
        h_omega += _apply_site(spin_hamiltonian(r), p, n, omega)
    comm = np.vdot(phi, h_phi) - np.vdot(phi, apply_local(a, state.config, h_omega))
    scale = max(1.0, a.norm() ** 2 * max(n, 1))
    if abs(comm - total) > 1e-9 * scale:
        raise NumericError(f"ground-state functional disagrees: {total} vs {comm}")
    return float(total.real)


def hamiltonian_sparse(config):
    n = len(config)
    dim = 2 ** n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for p, r in enumerate(config.r):
        term = sp.kron(sp.identity(2 ** p, format="csr"),
                       sp.kron(sp.csr_matrix(spin_hamiltonian(r)), sp.identity(2 ** (n - p - 1), format="csr")))
        h = h + term
    return h.tocsr()


@dataclasses.dataclass(frozen=True)
class GapReport:
    ground_energy: float
    gap: float
    multiplicity: int


def spectral_gap(config, cluster_tol=1e-8):
    """Ground energy, gap and ground multiplicity of ``H_{r, Lambda}``."""
    n = len(config)
    if n > MAX_DENSE_SITES:
        raise TooLarge(f"{n} sites exceeds the dense limit {MAX_DENSE_SITES}")
    if n == 0:
        return GapReport(0.0, math.inf, 1)
    h = hamiltonian_sparse(config)
    if n <= 10:
        w = np.linalg.eigvalsh(h.toarray())
    else:
        w = np.sort(spla.eigsh(h, k=n + 2, which="SA", return_eigenvectors=False, tol=1e-12))
    e0 = float(w[0])
    mult = int(np.sum(w - e0 <= cluster_tol))
    gap = float(w[mult] - e0) if mult < len(w) else math.inf
    return GapReport(e0, gap, mult)


def hamiltonian_expectation(state):
    """``omega(H_{r, Lambda})`` via one-site expectations."""
    return sum(expectation(state, LocalOperator.simple({s: spin_hamiltonian(r)}))
               for s, r in zip(state.config.sites, state.config.r)).real


@dataclasses.dataclass(frozen=True)
class WitnessReport:
    target: float
    values: tuple
    max_deviation: float


def sector_witness(r, s, site_count=64, d=1):
    """For each prefix ``Lambda`` of size ``0..m`` evaluate ``H_r`` on the next site outside it.

    The value ``|omega_{Delta r}(H_r) - omega_{Delta s}(H_r)|`` stays at
    ``|1 - r . s|`` for every truncation, so no finite region makes the two
    diagonal states agree at infinity.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    sites = enumerate_sites(site_count + 1, d)
    wr = ground_state(FieldConfig.constant(sites, r))
    ws = ground_state(FieldConfig.constant(sites, s))
    target = abs(1.0 - float(np.dot(r, s)))
    values = []
    for m in range(site_count + 1):
        op = LocalOperator.simple({sites[m]: spin_hamiltonian(r)})
        values.append(abs(expectation(wr, op) - expectation(ws, op)))
    dev = max(abs(v - target) for v in values)
    return WitnessReport(target, tuple(values), dev)


def diagonal_path_table(r0, r1, sizes: Sequence[int], ts: Sequence[float], moved=1):
    """Distances along ``r(t)`` (normalized linear interpolation) for growing truncations.

    ``diagonal`` moves every site; ``box`` moves only the first ``moved`` sites.
    Rows: ``(m, t, diagonal_exact, diagonal_bound, box_exact, box_bound)``.
    """
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    rows = []
    for m in sizes:
        sites = enumerate_sites(m)
        base = ground_state(FieldConfig.constant(sites, r0))
        for t in ts:
            rt = (1 - t) * r0 + t * r1
            rt = rt / np.linalg.norm(rt)
            diag = ground_state(FieldConfig.constant(sites, rt))
            rb = np.tile(r0, (m, 1))
            rb[:moved] = rt
            box = ground_state(FieldConfig(sites, rb))
            d1 = local_state_distance(base, diag)
            d2 = local_state_distance(base, box)
            rows.append((m, float(t), d1.exact, d1.bound, d2.exact, d2.bound))
    return rows


def diagonal_path_csv(rows):
    return plots.csv_text(["m", "t", "diagonal_exact", "diagonal_bound", "box_exact", "box_bound"], rows)


def diagonal_path_svg(rows):
    t_fixed = max(r[1] for r in rows)
    series = {
        "diagonal": [(r[0], r[2]) for r in rows if r[1] == t_fixed],
        "box": [(r[0], r[4]) for r in rows if r[1] == t_fixed],
    }
    return plots.line_plot_svg(series, title=f"state distance vs truncation, t = {t_fixed:g}",
                               xlabel="sites", ylabel="norm distance")


__all__ = [
    "PAULI",
    "FieldConfig",
    "ProductGroundState",
    "LocalOperator",
    "enumerate_sites",
    "ground_state",
    "expectation",
    "apply_local",
    "interaction_distance",
    "site_operator_distance",
    "local_state_distance",
    "ground_state_inequality",
    "spectral_gap",
    "hamiltonian_expectation",
    "sector_witness",
    "diagonal_path_table",
]
