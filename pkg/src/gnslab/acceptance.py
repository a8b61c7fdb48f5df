"""Acceptance criteria shared by the test suite and ``gnslab selftest``.

Every criterion is a function ``(quick, tol_scale) -> CriterionResult``.
``tol_scale`` multiplies every tolerance; it exists only so that the self-test
can be sabotaged as a negative control.  Sample sizes shrink in quick mode,
tolerances never do.
"""

from __future__ import annotations

import dataclasses
import math
import time
from fractions import Fraction

import numpy as np

from gnslab import algebra as A
from gnslab import bundles, chain, gns, kadison, ktheory, numerics, projgeom, sampling
from gnslab.errors import NoUnitarySolution

SEED = 20240611


@dataclasses.dataclass
class Check:
    label: str
    value: object
    bound: object
    ok: bool


@dataclasses.dataclass
class CriterionResult:
    number: int
    name: str
    checks: list

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def as_dict(self):
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "checks": [
                {"label": c.label, "value": _jsonable(c.value), "bound": _jsonable(c.bound), "ok": c.ok}
                for c in self.checks
            ],
        }

    def line(self):
        failed = [c.label for c in self.checks if not c.ok]
        status = "PASS" if self.passed else "FAIL"
        tail = "" if self.passed else f"  failed: {', '.join(failed)}"
        return f"[{status}] criterion {self.number}: {self.name}{tail}"


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return str(v)


class _Checks(list):
    def __init__(self, tol_scale):
        super().__init__()
        self.s = tol_scale

    def le(self, label, value, tol):
        self.append(Check(label, float(value), tol * self.s, float(value) <= tol * self.s))

    def ge(self, label, value, bound):
        self.append(Check(label, float(value), bound, float(value) >= bound))

    def eq(self, label, value, expected):
        self.append(Check(label, value, expected, value == expected))

    def true(self, label, cond):
        self.append(Check(label, bool(cond), True, bool(cond)))


# ----------------------------------------------------------------------------- 1

def criterion_chern(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    t0 = time.perf_counter()
    results = {}
    for grid in ((40, 80), (80, 160)):
        sec = bundles.ground_section(bundles.SphereGrid(*grid))
        results[grid] = (bundles.chern_number(sec, 1), bundles.chern_number(sec, -2))
        c.le(f"eigen_residual_{grid[0]}x{grid[1]}", sec.eigen_residual(), 1e-10)
        cocycle = bundles.link_cocycle(sec, 1)
        total = cocycle.chern_real()
        c.le(f"integrality_defect_{grid[0]}x{grid[1]}", abs(total - round(total)), 1e-9)
    elapsed = time.perf_counter() - t0
    c.eq("chern_E_40x80", results[(40, 80)][0], 1)
    c.eq("chern_detH_40x80", results[(40, 80)][1], -2)
    c.eq("refinement_80x160_identical", results[(80, 160)], results[(40, 80)])
    c.true("runtime_under_10s", elapsed < 10.0)
    return CriterionResult(1, "Chern numbers of the ground-state bundle", list(c))


# ----------------------------------------------------------------------------- 2

def criterion_transition_probability(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 2)
    count = 1000 if quick else 10_000
    worst = 0.0
    for _ in range(count):
        d = int(gen.integers(2, 33))
        alg = A.CStarAlgebra.full(d)
        psi = A.random_pure_state(alg, gen, 0)
        phi = A.random_pure_state(alg, gen, 0)
        p = projgeom.ray_product(projgeom.pure_to_ray(psi), projgeom.pure_to_ray(phi))
        dist = A.state_norm_distance(psi, phi)
        worst = max(worst, abs(p * p - (1.0 - 0.25 * dist * dist)))
    c.le("max_identity_defect", worst, 1e-10)
    c.eq("pairs", count, count)
    return CriterionResult(2, "transition probability vs state norm distance", list(c))


# ----------------------------------------------------------------------------- 3

def criterion_sector_distance(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 3)
    alg = A.CStarAlgebra((2, 3))
    pairs = 200 if quick else 1000
    worst = 0.0
    for _ in range(pairs):
        psi = A.random_pure_state(alg, gen, 0)
        phi = A.random_pure_state(alg, gen, 1)
        worst = max(worst, abs(A.state_norm_distance(psi, phi) - 2.0))
    c.le("max_deviation_from_2", worst, 1e-12)
    # sampling oracle over contractions: block unitaries u_1 e^{ia} + u_2 e^{ib}
    psi = A.random_pure_state(alg, gen, 0)
    phi = A.random_pure_state(alg, gen, 1)
    best = 0.0
    samples = 2000 if quick else 20_000
    for k in range(samples):
        if k % 2:
            u = A.random_unitary_element(alg, gen)
        else:
            a, b = gen.uniform(0, 2 * np.pi, 2)
            u = alg.element(np.exp(1j * a) * np.eye(2), np.exp(1j * b) * np.eye(3))
        best = max(best, abs(A.evaluate(psi, u) - A.evaluate(phi, u)))
    c.ge("sampled_sup", best, 2.0 - 1e-3)
    return CriterionResult(3, "cross-sector pure states are at distance 2", list(c))


# ----------------------------------------------------------------------------- 4

def criterion_metric_chain(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 4)
    count = 1000 if quick else 10_000
    slack = 1e-12
    viol = 0.0
    gap_defect = 0.0
    chd_defect = 0.0
    k_fs = math.sqrt(2.0) * math.pi / 4.0
    for i in range(count):
        d = int(gen.integers(2, 17))
        x = sampling.unit_vector(gen, d)
        if i % 4 == 0:
            y = x + 10.0 ** gen.uniform(-8, -1) * sampling.complex_normal(gen, d)
            y = y / np.linalg.norm(y) * sampling.unit_phase(gen)
        else:
            y = sampling.unit_vector(gen, d)
        k, l = projgeom.Ray(x), projgeom.Ray.of(y)
        chd, fs, gap = projgeom.d_chordal(k, l), projgeom.d_fubini_study(k, l), projgeom.d_gap(k, l)
        viol = max(viol, chd - fs, fs - k_fs * chd, chd / math.sqrt(2.0) - gap, gap - chd)
        gap_defect = max(gap_defect, abs(gap - projgeom.gap_via_projection(k, l)))
        ov = np.vdot(l.representative, k.representative)
        lam = ov / abs(ov) if abs(ov) > 0 else 1.0
        chd_defect = max(chd_defect, abs(chd - np.linalg.norm(k.representative - lam * l.representative)))
    c.le("max_chain_violation", max(viol, 0.0), slack)
    c.le("gap_formula_vs_projection_norm", gap_defect, 1e-10)
    c.le("chordal_formula_vs_phase_minimizer", chd_defect, 1e-10)
    return CriterionResult(4, "metric equivalence chains on projective space", list(c))


# ----------------------------------------------------------------------------- 5

def criterion_kadison(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 5)
    count = 200 if quick else 1000
    worst_res = 0.0
    worst_chain = 0.0
    for _ in range(count):
        d = int(gen.integers(1, 17))
        n = int(gen.integers(1, min(4, d) + 1))
        xs = list(sampling.complex_normal(gen, (n, d)))
        ys = list(sampling.complex_normal(gen, (n, d)) * gen.uniform(0.1, 3.0))
        prob = kadison.InterpolationProblem(xs, ys)
        a = kadison.kadison_solve(prob).blocks[0]
        worst_res = max(worst_res, max(np.linalg.norm(a @ x - y) for x, y in zip(xs, ys)))
        data = kadison.normalized_interpolant(prob)
        na = numerics.operator_norm(a)
        npt = numerics.operator_norm(data.compressed)
        nt = numerics.operator_norm(data.interpolant)
        bound = math.sqrt(2 * n) * max(np.linalg.norm(z) for z in data.zs)
        scale = 1.0 + bound
        worst_chain = max(worst_chain, (na - npt) / scale, (npt - nt) / scale, (nt - bound) / scale)
    c.le("max_residual", worst_res, 1e-9)
    c.le("max_norm_chain_violation", max(worst_chain, 0.0), 1e-9)

    agree = True
    worst_u = 0.0
    for i in range(count // 2):
        d = int(gen.integers(2, 9))
        n = int(gen.integers(1, min(3, d) + 1))
        xs = list(sampling.complex_normal(gen, (n, d)))
        matched = i % 2 == 0
        if matched:
            q = sampling.unitary(gen, d)
            ys = [q @ x for x in xs]
        else:
            ys = list(sampling.complex_normal(gen, (n, d)))
        try:
            u = kadison.kadison_solve(kadison.InterpolationProblem(xs, ys, "unitary")).blocks[0]
            accepted = True
            worst_u = max(worst_u, max(np.linalg.norm(u @ x - y) for x, y in zip(xs, ys)),
                          numerics.operator_norm(u @ numerics.dagger(u) - np.eye(d)))
        except NoUnitarySolution:
            accepted = False
        agree &= accepted == matched
    c.true("unitary_accepts_exactly_gram_matched", agree)
    c.le("unitary_residual", worst_u, 1e-9)

    worst_rot = 0.0
    for _ in range(count):
        d = int(gen.integers(2, 17))
        x, y = sampling.unit_vector(gen, d), sampling.unit_vector(gen, d)
        u = kadison.rotation_unitary(x, y)
        worst_rot = max(worst_rot, abs(numerics.operator_norm(np.eye(d) - u) - np.linalg.norm(x - y)))
    c.le("rotation_norm_identity", worst_rot, 1e-9)
    return CriterionResult(5, "Kadison interpolation with norm control", list(c))


# ----------------------------------------------------------------------------- 6

def criterion_gns(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 6)
    dims = range(1, 6) if quick else range(1, 9)
    dims_ok = True
    worst_ev = worst_int = worst_nat = 0.0
    comm_ok = True
    for n in dims:
        alg = A.CStarAlgebra.full(n)
        for _ in range(2 if quick else 4):
            omega = A.random_pure_state(alg, gen)
            data = gns.gns_construct(omega.to_state())
            dims_ok &= data.hilbert_dim == n and len(data.ideal_basis) == n * (n - 1)
            for _ in range(10):
                a = A.random_element(alg, gen)
                lhs = np.vdot(data.cyclic, data.rep(a) @ data.cyclic)
                worst_ev = max(worst_ev, abs(lhs - A.evaluate(omega, a)) / (1 + A.element_norm(a)))
            comm_ok &= gns.commutant_dimension(list(data.rep_basis)) == 1
            alpha = A.InnerAutomorphism(alg, (sampling.unitary(gen, n),))
            w = alpha.unitaries[0] @ omega.vector + 0.3 * sampling.unit_vector(gen, n)
            psi = A.PureState(alg, 0, w / np.linalg.norm(w))
            phi, big_u = gns.intertwiner(alpha, omega, psi, gen=gen)
            u = alpha.unitaries[0]
            for _ in range(50):
                a = sampling.complex_normal(gen, (n, n))
                diff = big_u @ (a @ omega.vector) - (u @ a @ numerics.dagger(u)) @ phi
                worst_int = max(worst_int, np.linalg.norm(diff) / max(1.0, np.linalg.norm(a)))
            ideal = gns.gelfand_ideal(omega.to_state())
            pushed = gns.gelfand_ideal(alpha.push_state(omega).to_state())
            worst_nat = max(worst_nat, gns.ideal_residual([alpha(b) for b in ideal], pushed),
                            gns.ideal_residual([alpha.inverse()(b) for b in pushed], ideal))
    c.true("hilbert_dim_n_and_ideal_dim_n(n-1)", dims_ok)
    c.le("cyclic_vector_reproduces_state", worst_ev, 1e-10)
    c.true("commutant_dimension_1", comm_ok)
    c.le("intertwiner_diagram", worst_int, 1e-9)
    c.le("ideal_naturality", worst_nat, 1e-9)
    return CriterionResult(6, "GNS construction and intertwiners", list(c))


# ----------------------------------------------------------------------------- 7

def criterion_bundle_cocycles(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    grid = bundles.SphereGrid(10, 20) if quick else bundles.SphereGrid(20, 40)
    sec = bundles.ground_section(grid)
    gen = sampling.rng(SEED + 7)
    sec = sec.regauge(np.exp(2j * np.pi * gen.random(grid.num_points)))
    cocycle = bundles.tautological_cocycle(sec)
    c.le("cech_closure", cocycle.closure_residual(), 1e-10)
    c.le("section_transition_relation", cocycle.relation_residual(), 1e-10)
    rep = bundles.gns_bundle_transitions(sec, cocycle=cocycle)
    c.le("transition_is_conj_h_identity", rep.scalar_residual, 1e-9)
    c.le("transition_via_gns_data", rep.gns_path_residual, 1e-9)
    c.le("transition_cech_closure", rep.closure_residual, 1e-9)
    ideal = bundles.ideal_bundle_check(sec)
    c.le("ideal_trivialization", ideal.trivialization_residual, 1e-9)
    c.le("ideal_transitions_preserve_reference", ideal.transition_residual, 1e-9)
    c.eq("ideal_dims", ideal.ideal_dims, (2,))
    return CriterionResult(7, "bundle cocycles and trivializations", list(c))


# ----------------------------------------------------------------------------- 8

def criterion_spin_chain(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    gen = sampling.rng(SEED + 8)
    exact = True
    op_path = 0.0
    for _ in range(20):
        m = int(gen.integers(1, 30))
        sites = chain.enumerate_sites(m)
        c1 = chain.FieldConfig(sites, [sampling.sphere_point(gen) for _ in sites])
        c2 = chain.FieldConfig(sites, [sampling.sphere_point(gen) for _ in sites])
        ref = float(np.sqrt(((c1.r - c2.r) ** 2).sum(axis=1)).max())
        exact &= chain.interaction_distance(c1, c2) == ref
        op_path = max(op_path, abs(chain.site_operator_distance(c1, c2) - ref))
    c.true("interaction_distance_sup_formula", exact)
    c.le("interaction_distance_operator_norms", op_path, 1e-12)

    worst_w = 0.0
    for _ in range(3 if quick else 10):
        r, s = sampling.sphere_point(gen), sampling.sphere_point(gen)
        worst_w = max(worst_w, chain.sector_witness(r, s, 64).max_deviation)
    c.le("sector_witness_deviation_m64", worst_w, 1e-12)

    sites = chain.enumerate_sites(6)
    cfg = chain.FieldConfig(sites, [sampling.sphere_point(gen) for _ in sites])
    st = chain.ground_state(cfg)
    lowest = math.inf
    for _ in range(100):
        k = int(gen.integers(1, 4))
        sup = tuple(sites[i] for i in gen.choice(6, size=k, replace=False))
        a = chain.LocalOperator(sup, matrix=sampling.complex_normal(gen, (2 ** k, 2 ** k)))
        lowest = min(lowest, chain.ground_state_inequality(st, a) / (a.norm() ** 2 * len(sites)))
    c.ge("ground_state_inequality_min", lowest, -1e-10 * tol_scale)

    gap_ok = True
    for m in range(1, (8 if quick else 10) + 1):
        cfgm = chain.FieldConfig(chain.enumerate_sites(m), [sampling.sphere_point(gen) for _ in range(m)])
        g = chain.spectral_gap(cfgm)
        gap_ok &= abs(g.ground_energy + m) <= 1e-9 and abs(g.gap - 2.0) <= 1e-9 and g.multiplicity == 1
    c.true("spectral_gap_(-|L|,2,1)", gap_ok)

    bound_ok = True
    for _ in range(50 if quick else 200):
        m = int(gen.integers(1, 15))
        sites = chain.enumerate_sites(m)
        s1 = chain.ground_state(chain.FieldConfig(sites, [sampling.sphere_point(gen) for _ in sites]))
        r2 = np.array(s1.config.r)
        moved = gen.random(m) < 0.5
        for v in np.flatnonzero(moved):
            p = r2[v] + gen.uniform(0.0, 1.0) * sampling.sphere_point(gen)
            r2[v] = p / np.linalg.norm(p)
        s2 = chain.ground_state(chain.FieldConfig(sites, r2))
        rep = chain.local_state_distance(s1, s2)
        bound_ok &= rep.exact <= rep.bound + 1e-12
    c.true("exact_distance_below_site_sum_bound", bound_ok)
    return CriterionResult(8, "non-interacting spin chain", list(c))


# ----------------------------------------------------------------------------- 9

def criterion_uhf(quick=False, tol_scale=1.0):
    c = _Checks(tol_scale)
    delta = ktheory.sn_from_type(ktheory.UHFType((2, 4, 8), {2}))
    c.true("3/8_in_Q(delta)", ktheory.q_contains(delta, Fraction(3, 8)))
    c.true("1/3_not_in_Q(delta)", not ktheory.q_contains(delta, Fraction(1, 3)))
    c.eq("pi1_U", str(ktheory.homotopy_group(1, "U", delta)), "Q(delta)")
    c.eq("pi1_Uomega", str(ktheory.homotopy_group(1, "U_omega", delta)), "Z x Q(delta)")
    evens = {str(ktheory.homotopy_group(2 * k, w, delta)) for k in range(0, 6) for w in ("U", "U_omega")}
    c.eq("pi_even", sorted(evens), ["0"])
    c.eq("K0", str(ktheory.k_theory(0, delta)), "Q(delta)")
    c.eq("K1", str(ktheory.k_theory(1, delta)), "0")
    powers = [2 ** k for k in range(1, 11)]
    ok = all(ktheory.colimit_matrix_check(a, b) for a in powers for b in powers if b % a == 0)
    c.true("colimit_matrix_check_powers_of_2", ok)
    return CriterionResult(9, "UHF supernatural arithmetic and group tables", list(c))


CRITERIA = (
    criterion_chern,
    criterion_transition_probability,
    criterion_sector_distance,
    criterion_metric_chain,
    criterion_kadison,
    criterion_gns,
    criterion_bundle_cocycles,
    criterion_spin_chain,
    criterion_uhf,
)


def run_all(quick=False, tol_scale=1.0, timings=None):
    """Run criteria 1-9; optional ``timings`` list receives ``(number, seconds)``."""
    out = []
    for fn in CRITERIA:
        t0 = time.perf_counter()
        res = fn(quick=quick, tol_scale=tol_scale)
        if timings is not None:
            timings.append((res.number, time.perf_counter() - t0))
        out.append(res)
    return out
