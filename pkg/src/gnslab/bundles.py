"""Discretized line bundles over the two-sphere.

The base ``S^2`` is sampled on a latitude/longitude lattice closed by
triangle fans at both poles.  Over each point sits the ground state of
``H_r = r . sigma`` on ``M_2``.  Chern numbers come from summing plaquette
phases of the link variables ``<Psi(a), Psi(b)>`` (field-strength method),
which is manifestly gauge invariant and integer valued.
"""

from __future__ import annotations

import dataclasses
import itertools
import math

import numpy as np

from gnslab import algebra as alg_mod
from gnslab import gns, kadison, plots, policy
from gnslab.errors import CurvatureSaturated, NumericError, UncoveredPoint, VanishingLink
from gnslab.numerics import dagger

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

M2 = alg_mod.CStarAlgebra.full(2)


def spin_hamiltonian(r):
    """``H_r = r_x sigma_x + r_y sigma_y + r_z sigma_z``."""
    return np.tensordot(np.asarray(r, dtype=float), PAULI, axes=1)


def chart_ground_vector(r):
    """Ground vector of ``H_r`` from the two explicit chart formulas.

    Uses ``(-x + iy, z + 1) / sqrt(2 + 2z)`` away from the south pole and
    ``(z - 1, x + iy) / sqrt(2 - 2z)`` on the southern hemisphere.
    """
    x, y, z = (float(c) for c in r)
    if z >= 0:
        return np.array([-x + 1j * y, z + 1.0]) / math.sqrt(2.0 + 2.0 * z)
    return np.array([z - 1.0, x + 1j * y]) / math.sqrt(2.0 - 2.0 * z)


@dataclasses.dataclass(frozen=True)
class SphereGrid:
    n_theta: int
    n_phi: int

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 3:
            raise ValueError("need n_theta >= 1 and n_phi >= 3")

    @property
    def num_points(self):
        return self.n_theta * self.n_phi + 2

    @property
    def north(self):
        return self.n_theta * self.n_phi

    @property
    def south(self):
        return self.n_theta * self.n_phi + 1

    def index(self, i, j):
        return i * self.n_phi + (j % self.n_phi)

    def angles(self):
        """``(theta, phi)`` per point; the poles come last."""
        i, j = np.meshgrid(np.arange(self.n_theta), np.arange(self.n_phi), indexing="ij")
        th = (i.ravel() + 0.5) * math.pi / self.n_theta
        ph = 2.0 * math.pi * j.ravel() / self.n_phi
        th = np.concatenate([th, [0.0, math.pi]])
        ph = np.concatenate([ph, [0.0, 0.0]])
        return th, ph

    def points(self):
        th, ph = self.angles()
        return np.column_stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])

    def plaquettes(self):
        """Vertex loops, counter-clockwise seen from outside.

        Quads ``(i,j) -> (i+1,j) -> (i+1,j+1) -> (i,j+1)`` between rings, then
        the north fan ``N -> (0,j) -> (0,j+1)`` and the south fan
        ``(n-1,j) -> S -> (n-1,j+1)``.
        """
        loops = []
        for i in range(self.n_theta - 1):
            for j in range(self.n_phi):
                loops.append((self.index(i, j), self.index(i + 1, j),
                              self.index(i + 1, j + 1), self.index(i, j + 1)))
        last = self.n_theta - 1
        for j in range(self.n_phi):
            loops.append((self.north, self.index(0, j), self.index(0, j + 1)))
        for j in range(self.n_phi):
            loops.append((self.index(last, j), self.south, self.index(last, j + 1)))
        return loops

    def edges(self):
        """Undirected edges as sorted vertex pairs, in first-seen order."""
        seen = {}
        for loop in self.plaquettes():
            for a, b in zip(loop, loop[1:] + loop[:1]):
                seen.setdefault((min(a, b), max(a, b)), None)
        return list(seen)

    def euler_characteristic(self):
        return self.num_points - len(self.edges()) + len(self.plaquettes())

    def plaquette_cells(self):
        """``(phi0, theta0, phi1, theta1)`` in units of ``(2 pi, pi)`` for plotting."""
        cells = []
        n, m = self.n_theta, self.n_phi
        for i in range(n - 1):
            for j in range(m):
                cells.append((j / m, (i + 0.5) / n, (j + 1) / m, (i + 1.5) / n))
        for j in range(m):
            cells.append((j / m, 0.0, (j + 1) / m, 0.5 / n))
        for j in range(m):
            cells.append((j / m, 1.0 - 0.5 / n, (j + 1) / m, 1.0))
        return cells


@dataclasses.dataclass(frozen=True, eq=False)
class StateSection:
    """A unit vector ``Psi`` in ``C^2`` over every grid point."""

    grid: SphereGrid
    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=complex)
        if v.shape != (self.grid.num_points, 2):
            raise ValueError(f"expected shape {(self.grid.num_points, 2)}, got {v.shape}")
        if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > 1e-12:
            raise ValueError("section vectors must be unit vectors")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def state(self, idx):
        return alg_mod.PureState(M2, 0, self.vectors[idx])

    def regauge(self, phases):
        """Same section of rays with representatives multiplied by ``phases``."""
        return StateSection(self.grid, self.vectors * np.asarray(phases)[:, None])

    def eigen_residual(self):
        """``max ||(H_r + 1) Psi_r||`` over the grid."""
        h = np.einsum("pk,kab->pab", self.grid.points(), PAULI)
        r = np.einsum("pab,pb->pa", h, self.vectors) + self.vectors
        return float(np.max(np.linalg.norm(r, axis=1)))


def ground_section(grid):
    """Lowest eigenvector of ``r . sigma`` at every grid point, largest entry real positive."""
    h = np.einsum("pk,kab->pab", grid.points(), PAULI)
    w, v = np.linalg.eigh(h)
    psi = v[:, :, 0]
    k = np.argmax(np.abs(psi), axis=1)
    lead = psi[np.arange(len(psi)), k]
    psi = psi * (np.abs(lead) / lead)[:, None]
    return StateSection(grid, psi)


@dataclasses.dataclass(frozen=True, eq=False)
class U1Cocycle:
    """Link variables on edges and the resulting plaquette phases."""

    grid: SphereGrid
    power: int
    links: dict
    curvature: np.ndarray

    def chern_real(self):
        return float(np.sum(self.curvature)) / (2.0 * math.pi)


def link_cocycle(section, power=1, link_tol=None, margin=0.1):
    """Unit link variables ``(<Psi(a), Psi(b)> / |.|)^power`` and plaquette phases.

    The plaquette phase is ``F = -arg prod(links)`` around the loop, so that the
    tautological line bundle ``E`` has total curvature ``+2 pi``.
    """
    link_tol = policy.current().link if link_tol is None else link_tol
    psi = section.vectors
    links = {}
    curv = []
    for loop in section.grid.plaquettes():
        prod = 1.0 + 0.0j
        for a, b in zip(loop, loop[1:] + loop[:1]):
            key = (a, b)
            if key not in links:
                c = complex(np.vdot(psi[a], psi[b]))
                if abs(c) <= link_tol:
                    raise VanishingLink(f"|<Psi({a}), Psi({b})>| = {abs(c):.3e}")
                links[key] = (c / abs(c)) ** power
                links[(b, a)] = np.conj(links[key])
            prod *= links[key]
        f = -math.atan2(prod.imag, prod.real)
        if abs(f) >= math.pi - margin:
            raise CurvatureSaturated(f"plaquette {loop} has |F| = {abs(f):.4f}")
        curv.append(f)
    return U1Cocycle(section.grid, power, links, np.array(curv))


def chern_number(section, power=1, tol=1e-9):
    """Integer Chern number of ``E^{(x) power}`` (negative powers are duals)."""
    total = link_cocycle(section, power).chern_real()
    n = round(total)
    if abs(total - n) > tol:
        raise NumericError(f"curvature sum {total!r} is not an integer")
    return int(n)


def curvature_rows(cocycle):
    """``(theta, phi, F)`` at plaquette centers."""
    grid = cocycle.grid
    rows = []
    for (p0, t0, p1, t1), f in zip(grid.plaquette_cells(), cocycle.curvature):
        rows.append((0.5 * (t0 + t1) * math.pi, 0.5 * (p0 + p1) * 2 * math.pi, float(f)))
    return rows


def curvature_csv(cocycle):
    return plots.csv_text(["theta", "phi", "F"], curvature_rows(cocycle))


def curvature_svg(cocycle):
    cells = [(c[0], c[1], c[2], c[3], float(f))
             for c, f in zip(cocycle.grid.plaquette_cells(), cocycle.curvature)]
    return plots.heatmap_svg(cells, title=f"plaquette curvature, power {cocycle.power}")


# chart-level data -----------------------------------------------------------

DEFAULT_CHARTS = (
    np.array([0.0, 1.0], dtype=complex),
    np.array([1.0, 0.0], dtype=complex),
    np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
)


@dataclasses.dataclass(frozen=True, eq=False)
class ChartCocycle:
    """Positive-overlap sections ``P_v`` per chart and transitions ``h_{v,w} = <P_v, P_w>``.

    ``sections[a]`` and ``transitions[(a, b)]`` hold NaN outside the chart
    (respectively the overlap).
    """

    charts: tuple
    member: np.ndarray
    sections: tuple
    transitions: dict

    def overlap(self, a, b):
        return self.member[a] & self.member[b]

    def closure_residual(self):
        """``max |h_vw h_wu - h_vu|`` over all ordered triples and triple overlaps."""
        worst = 0.0
        k = len(self.charts)
        for a, b, c in itertools.product(range(k), repeat=3):
            m = self.member[a] & self.member[b] & self.member[c]
            if m.any():
                d = self.transitions[(a, b)][m] * self.transitions[(b, c)][m] - self.transitions[(a, c)][m]
                worst = max(worst, float(np.max(np.abs(d))))
        return worst

    def relation_residual(self):
        """``max ||P_v - conj(h_vw) P_w||`` on all overlaps."""
        worst = 0.0
        k = len(self.charts)
        for a, b in itertools.product(range(k), repeat=2):
            m = self.overlap(a, b)
            if m.any():
                d = self.sections[a][m] - np.conj(self.transitions[(a, b)][m])[:, None] * self.sections[b][m]
                worst = max(worst, float(np.max(np.linalg.norm(d, axis=1))))
        return worst


def _chart_members(section, charts, cover_tol):
    psi = section.vectors
    member = np.array([np.abs(psi @ np.conj(v)) > cover_tol for v in charts])
    uncovered = np.flatnonzero(~member.any(axis=0))
    if uncovered.size:
        raise UncoveredPoint(f"{uncovered.size} grid points lie in no chart, first index {uncovered[0]}")
    return member


def tautological_cocycle(section, charts=DEFAULT_CHARTS, cover_tol=None):
    cover_tol = policy.current().chart_cover if cover_tol is None else cover_tol
    charts = tuple(np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in charts)
    member = _chart_members(section, charts, cover_tol)
    psi = section.vectors
    sections = []
    for a, v in enumerate(charts):
        c = psi @ np.conj(v)  # <v, Psi>
        p = np.full_like(psi, np.nan)
        m = member[a]
        p[m] = psi[m] * (np.conj(c[m]) / np.abs(c[m]))[:, None]
        sections.append(p)
    transitions = {}
    for a, b in itertools.product(range(len(charts)), repeat=2):
        h = np.full(len(psi), np.nan, dtype=complex)
        m = member[a] & member[b]
        h[m] = np.sum(np.conj(sections[a][m]) * sections[b][m], axis=1)
        transitions[(a, b)] = h
    return ChartCocycle(charts, member, tuple(sections), transitions)


def _gns_chart_unitary(data, p):
    """``U(A + N) = A p`` in the orthonormal GNS coordinates of ``data``."""
    units = data.algebra.basis()
    q = np.column_stack([data.quotient(e) for e in units])
    y = np.column_stack([e.blocks[0] @ p for e in units])
    return y @ np.linalg.pinv(q)


@dataclasses.dataclass(frozen=True, eq=False)
class TransitionReport:
    """Per-overlap transition unitaries and their residuals."""

    unitaries: dict
    scalar_residual: float
    gns_path_residual: float
    closure_residual: float


def gns_bundle_transitions(section, charts=DEFAULT_CHARTS, cocycle=None, gns_stride=1):
    """Transition unitaries ``U_{v, rho} U_{w, rho}^{-1}`` of the GNS Hilbert bundle.

    Built with :func:`gns.intertwiner` for the identity automorphism, from
    ``P_w`` to ``P_v``.  Every transition is compared against
    ``conj(h_vw) I``; every ``gns_stride``-th point is recomputed through
    explicit GNS data as an independent path.
    """
    cocycle = tautological_cocycle(section, charts) if cocycle is None else cocycle
    ident = alg_mod.InnerAutomorphism.identity(M2)
    k = len(cocycle.charts)
    unitaries = {}
    scalar = 0.0
    gns_res = 0.0
    eye = np.eye(2)
    for a, b in itertools.product(range(k), repeat=2):
        idx = np.flatnonzero(cocycle.overlap(a, b))
        mats = np.full((len(section.vectors), 2, 2), np.nan, dtype=complex)
        for n, i in enumerate(idx):
            pv, pw = cocycle.sections[a][i], cocycle.sections[b][i]
            omega = alg_mod.PureState(M2, 0, pw / np.linalg.norm(pw))
            psi = alg_mod.PureState(M2, 0, pv / np.linalg.norm(pv))
            _, u = gns.intertwiner(ident, omega, psi, checks=0)
            mats[i] = u
            h = cocycle.transitions[(a, b)][i]
            scalar = max(scalar, float(np.max(np.abs(u - np.conj(h) * eye))))
            if n % gns_stride == 0:
                data = gns.gns_construct(section.state(i))
                uv = _gns_chart_unitary(data, pv)
                uw = _gns_chart_unitary(data, pw)
                t = uv @ np.linalg.inv(uw)
                gns_res = max(gns_res, float(np.max(np.abs(t - u))))
        unitaries[(a, b)] = mats
    closure = 0.0
    for a, b, c in itertools.product(range(k), repeat=3):
        m = cocycle.member[a] & cocycle.member[b] & cocycle.member[c]
        if m.any():
            d = unitaries[(a, b)][m] @ unitaries[(b, c)][m] - unitaries[(a, c)][m]
            closure = max(closure, float(np.max(np.abs(d))))
    return TransitionReport(unitaries, scalar, gns_res, closure)


@dataclasses.dataclass(frozen=True)
class IdealBundleReport:
    trivialization_residual: float
    transition_residual: float
    reference_residual: float
    ideal_dims: tuple
    checked_pairs: int


def ideal_bundle_check(section, charts=DEFAULT_CHARTS, reference_index=None, stride=1):
    """Trivializations of the Gelfand-ideal bundle over the section.

    For a point ``rho`` in chart ``v`` the trivializing unitary is
    ``g_v(rho) = U_{v, Omega_0} T(rho -> v)``, where ``T`` is
    :func:`kadison.transport_unitary` and ``U_{v, Omega_0}`` the rotation onto
    the reference vector.  ``Ad g_v(rho)`` must carry ``N_rho`` onto
    ``N_ref`` and the transitions ``g_v g_w^{-1}`` must preserve ``N_ref``.
    """
    cocycle = tautological_cocycle(section, charts)
    ref = section.grid.north if reference_index is None else reference_index
    ref_state = section.state(ref)
    ref_ideal = gns.gelfand_ideal(ref_state.to_state())
    chart_states = [alg_mod.PureState(M2, 0, v) for v in cocycle.charts]
    rotations = [kadison.rotation_unitary(v, ref_state.vector) for v in cocycle.charts]
    triv = trans = 0.0
    dims = set()
    pairs = 0
    for i in range(0, section.grid.num_points, stride):
        st = section.state(i)
        ideal = gns.gelfand_ideal(st.to_state())
        dims.add(len(ideal))
        gs = {}
        for a in np.flatnonzero(cocycle.member[:, i]):
            t = kadison.transport_unitary(st, chart_states[a]).blocks[0]
            g = rotations[a] @ t
            gs[a] = g
            alpha = alg_mod.InnerAutomorphism(M2, (g,))
            triv = max(triv, gns.ideal_residual([alpha(b) for b in ideal], ref_ideal))
            pairs += 1
        for a, b in itertools.product(gs, repeat=2):
            alpha = alg_mod.InnerAutomorphism(M2, (gs[a] @ dagger(gs[b]),))
            trans = max(trans, gns.ideal_residual([alpha(x) for x in ref_ideal], ref_ideal))
    # the reference point itself is carried onto its own ray by every chart
    ref_res = 0.0
    omega0 = ref_state.vector
    for a in np.flatnonzero(cocycle.member[:, ref]):
        g = rotations[a] @ kadison.transport_unitary(ref_state, chart_states[a]).blocks[0]
        ref_res = max(ref_res, abs(1.0 - abs(np.vdot(omega0, g @ omega0))))
    return IdealBundleReport(triv, trans, float(ref_res), tuple(sorted(dims)), pairs)
