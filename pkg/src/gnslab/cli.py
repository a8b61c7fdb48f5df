"""Command-line front end.

``gnslab run --scenario FILE --out DIR [--seed N] [--csv] [--svg]`` executes a
JSON scenario and writes ``result.json``; ``gnslab selftest --quick|--full``
runs the acceptance criteria.

Exit codes: 0 success, 1 invariant violation, 2 input or schema error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib
import sys
import time
from fractions import Fraction

import jsonschema
import numpy as np

from gnslab import (
    __version__,
    acceptance,
    bundles,
    chain,
    gns,
    kadison,
    ktheory,
    numerics,
    plots,
    policy,
    projgeom,
    sampling,
)
from gnslab import algebra as A
from gnslab.errors import GnslabError, InputError, NumericError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_COMPLEX = {"oneOf": [{"type": "number"},
                      {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_VECTOR = {"type": "array", "items": _COMPLEX, "minItems": 1}
_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}

PARAM_SCHEMAS = {
    "metrics": {
        "type": "object",
        "properties": {
            "pairs": {"type": "array", "items": {"type": "array", "items": _VECTOR, "minItems": 2, "maxItems": 2}},
            "random_pairs": {"type": "integer", "minimum": 0},
            "dim": {"type": "integer", "minimum": 1},
        },
        "additionalProperties": False,
    },
    "gns": {
        "type": "object",
        "properties": {
            "blocks": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "block": {"type": "integer", "minimum": 0},
            "vector": _VECTOR,
            "intertwiner_checks": {"type": "integer", "minimum": 0},
        },
        "required": ["blocks"],
        "additionalProperties": False,
    },
    "kadison": {
        "type": "object",
        "properties": {
            "xs": {"type": "array", "items": _VECTOR, "minItems": 1},
            "ys": {"type": "array", "items": _VECTOR, "minItems": 1},
            "flavor": {"enum": ["general", "self_adjoint", "unitary"]},
        },
        "required": ["xs", "ys"],
        "additionalProperties": False,
    },
    "chern": {
        "type": "object",
        "properties": {
            "n_theta": {"type": "integer", "minimum": 1},
            "n_phi": {"type": "integer", "minimum": 3},
            "powers": {"type": "array", "items": {"type": "integer"}},
            "random_gauge": {"type": "boolean"},
        },
        "required": ["n_theta", "n_phi"],
        "additionalProperties": False,
    },
    "gnsbundle": {
        "type": "object",
        "properties": {
            "n_theta": {"type": "integer", "minimum": 1},
            "n_phi": {"type": "integer", "minimum": 3},
            "charts": {"type": "array", "items": _VECTOR, "minItems": 1},
        },
        "required": ["n_theta", "n_phi"],
        "additionalProperties": False,
    },
    "chain": {
        "type": "object",
        "properties": {
            "r": _VEC3,
            "s": _VEC3,
            "sites": {"type": "integer", "minimum": 1, "maximum": 12},
            "lattice_dim": {"type": "integer", "minimum": 1},
            "witness_sites": {"type": "integer", "minimum": 0, "maximum": 4096},
            "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "ts": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
            "random_operators": {"type": "integer", "minimum": 0},
        },
        "required": ["r", "s"],
        "additionalProperties": False,
    },
    "ktheory": {
        "type": "object",
        "properties": {
            "type_sequence": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
            "infinite_primes": {"type": "array", "items": {"type": "integer", "minimum": 2}},
            "rationals": {"type": "array", "items": {"type": "string"}},
            "k_max": {"type": "integer", "minimum": 0, "maximum": 64},
            "colimit_pairs": {"type": "array",
                              "items": {"type": "array", "items": {"type": "integer", "minimum": 1},
                                        "minItems": 2, "maxItems": 2}},
        },
        "required": ["type_sequence"],
        "additionalProperties": False,
    },
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": sorted(PARAM_SCHEMAS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "parameters": {"type": "object"},
    },
    "required": ["schema_version", "kind", "parameters"],
    "additionalProperties": False,
}


class ScenarioError(InputError):
    pass


def load_scenario(path):
    try:
        data = json.loads(pathlib.Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
        jsonschema.validate(data["parameters"], PARAM_SCHEMAS[data["kind"]])
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"schema error at {list(exc.absolute_path)}: {exc.message}") from exc
    return data


def _cvec(v):
    return np.array([complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in v])


def _cjson(z):
    z = complex(z)
    return [z.real, z.imag]


def _mjson(m):
    return [[_cjson(z) for z in row] for row in np.asarray(m)]


class _Invariants(list):
    def add(self, name, residual, tolerance):
        residual = float(residual)
        self.append({"name": name, "residual": residual, "tolerance": tolerance,
                     "ok": bool(residual <= tolerance)})

    def flag(self, name, ok):
        self.append({"name": name, "residual": 0.0 if ok else 1.0, "tolerance": 0.0, "ok": bool(ok)})


# ----------------------------------------------------------------------------- kinds

def _run_metrics(p, gen, inv, files):
    pairs = [(_cvec(a), _cvec(b)) for a, b in p.get("pairs", [])]
    dim = p.get("dim", 4)
    for _ in range(p.get("random_pairs", 0)):
        pairs.append((sampling.unit_vector(gen, dim), sampling.unit_vector(gen, dim)))
    rows = []
    k_fs = math.sqrt(2.0) * math.pi / 4.0
    chain_viol = gap_def = tp_def = 0.0
    for x, y in pairs:
        if x.size != y.size:
            raise InputError("pair vectors have different dimensions")
        k, l = projgeom.Ray.of(x), projgeom.Ray.of(y)
        chd, fs, gap = projgeom.d_chordal(k, l), projgeom.d_fubini_study(k, l), projgeom.d_gap(k, l)
        gp = projgeom.gap_via_projection(k, l)
        alg = A.CStarAlgebra.full(x.size)
        dist = A.state_norm_distance(projgeom.ray_to_pure(alg, 0, k), projgeom.ray_to_pure(alg, 0, l))
        pr = projgeom.ray_product(k, l)
        chain_viol = max(chain_viol, chd - fs, fs - k_fs * chd, chd / math.sqrt(2) - gap, gap - chd)
        gap_def = max(gap_def, abs(gap - gp))
        tp_def = max(tp_def, abs(pr * pr - (1 - dist * dist / 4)))
        rows.append({"ray_product": pr, "d_chordal": chd, "d_fubini_study": fs, "d_gap": gap,
                     "d_gap_projection": gp, "state_norm_distance": dist})
    inv.add("metric_chain_violation", max(chain_viol, 0.0), 1e-12)
    inv.add("gap_vs_projection_norm", gap_def, 1e-10)
    inv.add("transition_probability_identity", tp_def, 1e-10)
    if "csv" in files:
        files["csv"]["metrics.csv"] = plots.csv_text(
            list(rows[0]) if rows else ["ray_product"], [tuple(r.values()) for r in rows])
    return {"pairs": rows}


def _run_gns(p, gen, inv, files):
    alg = A.CStarAlgebra(tuple(p["blocks"]))
    k = p.get("block", 0)
    if k >= len(alg.block_dims):
        raise InputError(f"block {k} out of range")
    if "vector" in p:
        omega = A.pure_state(alg, k, _cvec(p["vector"]), normalize=True)
    else:
        omega = A.random_pure_state(alg, gen, k)
    data = gns.gns_construct(omega.to_state())
    n = alg.block_dims[k]
    ev = 0.0
    for _ in range(20):
        a = A.random_element(alg, gen)
        ev = max(ev, abs(np.vdot(data.cyclic, data.rep(a) @ data.cyclic) - A.evaluate(omega, a))
                 / (1 + A.element_norm(a)))
    inv.add("cyclic_vector_reproduces_state", ev, 1e-10)
    inv.flag("hilbert_dim_equals_block_dim", data.hilbert_dim == n)
    inv.flag("ideal_dim", len(data.ideal_basis) == alg.dim - n)
    comm = gns.commutant_dimension(list(data.rep_basis))
    inv.flag("irreducible", comm == 1)
    ideal_res = max((abs(A.evaluate(omega, b.adjoint() @ b)) for b in data.ideal_basis), default=0.0)
    inv.add("ideal_annihilated", ideal_res, 1e-10)
    alpha = A.InnerAutomorphism(alg, tuple(sampling.unitary(gen, m) for m in alg.block_dims))
    w = alpha.unitaries[k] @ omega.vector + 0.3 * sampling.unit_vector(gen, n)
    psi = A.PureState(alg, k, w / np.linalg.norm(w))
    phi, big_u = gns.intertwiner(alpha, omega, psi, gen=gen, checks=p.get("intertwiner_checks", 50))
    u = alpha.unitaries[k]
    res = 0.0
    for _ in range(p.get("intertwiner_checks", 50)):
        a = sampling.complex_normal(gen, (n, n))
        res = max(res, np.linalg.norm(big_u @ (a @ omega.vector) - (u @ a @ numerics.dagger(u)) @ phi)
                  / max(1.0, np.linalg.norm(a)))
    inv.add("intertwiner_diagram", res, 1e-9)
    pushed = gns.gelfand_ideal(alpha.push_state(omega).to_state())
    inv.add("ideal_naturality", gns.ideal_residual([alpha(b) for b in data.ideal_basis], pushed), 1e-9)
    return {"hilbert_dim": data.hilbert_dim, "ideal_dim": len(data.ideal_basis),
            "commutant_dim": comm, "cyclic_vector": [_cjson(z) for z in data.cyclic]}


def _run_kadison(p, gen, inv, files):
    xs = [_cvec(v) for v in p["xs"]]
    ys = [_cvec(v) for v in p["ys"]]
    prob = kadison.InterpolationProblem(xs, ys, p.get("flavor", "general"))
    a = kadison.kadison_solve(prob).blocks[0]
    data = kadison.normalized_interpolant(prob)
    scale = 1 + max(np.linalg.norm(y) for y in ys)
    inv.add("interpolation_residual", max(np.linalg.norm(a @ x - y) for x, y in zip(xs, ys)), 1e-9 * scale)
    na = numerics.operator_norm(a)
    npt = numerics.operator_norm(data.compressed)
    nt = numerics.operator_norm(data.interpolant)
    bound = math.sqrt(2 * prob.n) * max(np.linalg.norm(z) for z in data.zs)
    if prob.flavor is kadison.Flavor.GENERAL:
        inv.add("norm_A_le_norm_PTP", max(na - npt, 0.0), 1e-8)
    inv.add("norm_PTP_le_norm_T", max(npt - nt, 0.0), 1e-9)
    inv.add("norm_T_le_sqrt2n_max_z", max(nt - bound, 0.0), 1e-9)
    if prob.flavor is kadison.Flavor.SELF_ADJOINT:
        inv.add("hermitian", numerics.operator_norm(a - numerics.dagger(a)), 1e-10)
    if prob.flavor is kadison.Flavor.UNITARY:
        inv.add("unitary", numerics.operator_norm(a @ numerics.dagger(a) - np.eye(a.shape[0])), 1e-10)
    return {"A": _mjson(a), "norm_A": na, "norm_PTP": npt, "norm_T": nt, "bound": bound}


def _run_chern(p, gen, inv, files):
    grid = bundles.SphereGrid(p["n_theta"], p["n_phi"])
    sec = bundles.ground_section(grid)
    if p.get("random_gauge", False):
        sec = sec.regauge(np.exp(2j * np.pi * gen.random(grid.num_points)))
    inv.add("eigen_residual", sec.eigen_residual(), 1e-10)
    inv.flag("euler_characteristic_2", grid.euler_characteristic() == 2)
    powers = p.get("powers", [1, -1, -2])
    out = {"chern_by_power": {}}
    for k in sorted(set(powers) | {1, -2}):
        coc = bundles.link_cocycle(sec, k)
        total = coc.chern_real()
        inv.add(f"integrality_power_{k}", abs(total - round(total)), 1e-9)
        out["chern_by_power"][str(k)] = int(round(total))
        if k == 1:
            if "csv" in files:
                files["csv"]["curvature.csv"] = bundles.curvature_csv(coc)
            if "svg" in files:
                files["svg"]["curvature.svg"] = bundles.curvature_svg(coc)
    out["chern_E"] = out["chern_by_power"]["1"]
    out["chern_detH"] = out["chern_by_power"]["-2"]
    inv.flag("chern_E_is_1", out["chern_E"] == 1)
    inv.flag("chern_detH_is_-2", out["chern_detH"] == -2)
    return out


def _run_gnsbundle(p, gen, inv, files):
    grid = bundles.SphereGrid(p["n_theta"], p["n_phi"])
    sec = bundles.ground_section(grid)
    charts = tuple(_cvec(v) for v in p["charts"]) if "charts" in p else bundles.DEFAULT_CHARTS
    coc = bundles.tautological_cocycle(sec, charts)
    inv.add("cech_closure", coc.closure_residual(), 1e-10)
    inv.add("section_transition_relation", coc.relation_residual(), 1e-10)
    rep = bundles.gns_bundle_transitions(sec, charts, cocycle=coc)
    inv.add("transition_is_conj_h_identity", rep.scalar_residual, 1e-9)
    inv.add("transition_via_gns_data", rep.gns_path_residual, 1e-9)
    inv.add("transition_cech_closure", rep.closure_residual, 1e-9)
    ideal = bundles.ideal_bundle_check(sec, charts)
    inv.add("ideal_trivialization", ideal.trivialization_residual, 1e-9)
    inv.add("ideal_transitions", ideal.transition_residual, 1e-9)
    inv.add("reference_fixed", ideal.reference_residual, 1e-9)
    inv.flag("ideal_dim_constant_2", ideal.ideal_dims == (2,))
    return {"points": grid.num_points, "charts": len(charts),
            "chart_sizes": [int(m.sum()) for m in coc.member], "ideal_dims": list(ideal.ideal_dims),
            "checked_point_chart_pairs": ideal.checked_pairs}


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise InputError("field vector must be nonzero")
    return v / n


def _run_chain(p, gen, inv, files):
    r, s = _unit(p["r"]), _unit(p["s"])
    m = p.get("sites", 6)
    d = p.get("lattice_dim", 1)
    sites = chain.enumerate_sites(m, d)
    cr = chain.FieldConfig.constant(sites, r)
    cs = chain.FieldConfig.constant(sites, s)
    idist = chain.interaction_distance(cr, cs)
    inv.add("interaction_distance_vs_norm", abs(idist - float(np.linalg.norm(r - s))), 1e-15)
    w = chain.sector_witness(r, s, p.get("witness_sites", 64), d)
    inv.add("sector_witness_constant", w.max_deviation, 1e-12)
    random_cfg = chain.FieldConfig(sites, [sampling.sphere_point(gen) for _ in sites])
    st = chain.ground_state(random_cfg)
    lowest = math.inf
    for _ in range(p.get("random_operators", 100)):
        k = int(gen.integers(1, min(3, m) + 1))
        sup = tuple(sites[i] for i in gen.choice(m, size=k, replace=False))
        a = chain.LocalOperator(sup, matrix=sampling.complex_normal(gen, (2 ** k, 2 ** k)))
        lowest = min(lowest, chain.ground_state_inequality(st, a) / (a.norm() ** 2 * m))
    if math.isfinite(lowest):
        inv.add("ground_state_inequality", max(-lowest, 0.0), 1e-10)
    g = chain.spectral_gap(random_cfg)
    inv.add("ground_energy", abs(g.ground_energy + m), 1e-9)
    inv.add("gap", abs(g.gap - 2.0), 1e-9)
    inv.flag("unique_ground_state", g.multiplicity == 1)
    rows = chain.diagonal_path_table(r, s, p.get("sizes", [1, 2, 4, 8, 16, 32, 64]), p.get("ts", [0.05, 0.1]))
    inv.flag("exact_below_bound", all(row[2] <= row[3] + 1e-12 and row[4] <= row[5] + 1e-12 for row in rows))
    if "csv" in files:
        files["csv"]["distance_vs_truncation.csv"] = chain.diagonal_path_csv(rows)
    if "svg" in files:
        files["svg"]["distance_vs_truncation.svg"] = chain.diagonal_path_svg(rows)
    return {"interaction_distance": idist, "witness_target": w.target,
            "witness_min": min(w.values), "witness_max": max(w.values),
            "ground_energy": g.ground_energy, "gap": g.gap, "multiplicity": g.multiplicity,
            "ground_state_inequality_min_normalized": lowest if math.isfinite(lowest) else None,
            "distance_table": [list(row) for row in rows]}


def _run_ktheory(p, gen, inv, files):
    t = ktheory.UHFType(tuple(p["type_sequence"]), frozenset(p.get("infinite_primes", [])))
    delta = ktheory.sn_from_type(t)
    out = {"delta": str(delta)}
    k_max = p.get("k_max", 4)
    for k in range(k_max + 1):
        out[f"pi{k}_U"] = str(ktheory.homotopy_group(k, "U", delta))
        out[f"pi{k}_Uomega"] = str(ktheory.homotopy_group(k, "U_omega", delta))
    out["K0"] = str(ktheory.k_theory(0, delta))
    out["K1"] = str(ktheory.k_theory(1, delta))
    out["rational_pi1"] = ktheory.rational_pi1_note()
    members = {}
    for q in p.get("rationals", []):
        try:
            members[q] = ktheory.q_contains(delta, Fraction(q))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational {q!r}") from exc
    out["membership"] = members
    seq = t.sequence
    pairs = p.get("colimit_pairs") or [(a, b) for a in seq for b in seq if b % a == 0]
    results = {f"{a},{b}": ktheory.colimit_matrix_check(a, b) for a, b in pairs}
    out["colimit_checks"] = results
    inv.flag("colimit_matrix_identities", all(results.values()))
    return out


RUNNERS = {
    "metrics": _run_metrics,
    "gns": _run_gns,
    "kadison": _run_kadison,
    "chern": _run_chern,
    "gnsbundle": _run_gnsbundle,
    "chain": _run_chain,
    "ktheory": _run_ktheory,
}


def _dump(obj):
    def default(o):
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        if isinstance(o, complex):
            return _cjson(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default, allow_nan=False) + "\n"


def _policy_record():
    return {"profile": policy.profile_name(), **policy.current().as_dict()}


def run_scenario(scenario, seed=None, csv=False, svg=False):
    """Execute a validated scenario.  Returns ``(exit_code, result_dict, extra_files)``."""
    seed = scenario.get("seed", 0) if seed is None else seed
    gen = sampling.rng(seed)
    inv = _Invariants()
    files = {}
    if csv:
        files["csv"] = {}
    if svg:
        files["svg"] = {}
    result = {"schema_version": SCHEMA_VERSION, "gnslab_version": __version__, "kind": scenario["kind"],
              "seed": seed, "policy": _policy_record()}
    try:
        result["results"] = RUNNERS[scenario["kind"]](scenario["parameters"], gen, inv, files)
        code = EXIT_OK if all(i["ok"] for i in inv) else EXIT_INVARIANT
        result["status"] = "ok" if code == EXIT_OK else "invariant_violation"
    except ValueError as exc:
        code = EXIT_INPUT
        result["status"] = "input_error"
        result["error"] = f"{type(exc).__name__}: {exc}"
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code = EXIT_NUMERIC
        result["status"] = "numeric_error"
        result["error"] = f"{type(exc).__name__}: {exc}"
    result["invariants"] = list(inv)
    extra = {}
    for group in files.values():
        extra.update(group)
    return code, result, extra


def cmd_run(args):
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, result, extra = run_scenario(scenario, args.seed, args.csv, args.svg)
    out = pathlib.Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "result.json").write_text(_dump(result))
        for name, text in sorted(extra.items()):
            (out / name).write_text(text)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{scenario['kind']}: {result['status']} -> {out / 'result.json'}")
    return code


def cmd_selftest(args):
    timings = []
    scale = 0.0 if args.sabotage else 1.0
    t0 = time.perf_counter()
    results = acceptance.run_all(quick=not args.full, tol_scale=scale, timings=timings)
    elapsed = time.perf_counter() - t0
    for r in results:
        print(r.line())
    report = {"schema_version": SCHEMA_VERSION, "gnslab_version": __version__,
              "level": "full" if args.full else "quick", "policy": _policy_record(),
              "criteria": [r.as_dict() for r in results],
              "passed": all(r.passed for r in results)}
    if args.out:
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "selftest_report.json").write_text(_dump(report))
        if args.full:
            (out / "selftest_timings.csv").write_text(
                plots.csv_text(["criterion", "seconds"], [(n, float(s)) for n, s in timings]))
    print(f"selftest {'full' if args.full else 'quick'}: "
          f"{'PASS' if report['passed'] else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)}) "
          f"in {elapsed:.1f}s")
    return EXIT_OK if report["passed"] else EXIT_INVARIANT


def build_parser():
    parser = argparse.ArgumentParser(prog="gnslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gnslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("--scenario", required=True, help="path to a JSON scenario")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--csv", action="store_true", help="also write CSV tables")
    run.add_argument("--svg", action="store_true", help="also write SVG figures")
    run.set_defaults(func=cmd_run)
    st = sub.add_parser("selftest", help="run the acceptance criteria")
    level = st.add_mutually_exclusive_group()
    level.add_argument("--quick", action="store_true", help="reduced sample counts (default)")
    level.add_argument("--full", action="store_true", help="full sample counts and a timing CSV")
    st.add_argument("--out", default=None, help="directory for the report (and timings in full mode)")
    st.add_argument("--sabotage", action="store_true", help=argparse.SUPPRESS)
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        policy.profile_name()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except GnslabError as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc, NumericError) else EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
