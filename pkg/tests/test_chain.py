import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnslab import chain, sampling
from gnslab.bundles import PAULI, spin_hamiltonian
from gnslab.chain import FieldConfig, LocalOperator
from gnslab.errors import SiteMismatch, SupportOutsideLattice, TooLarge
from strategies import seeds

SX, SY, SZ = PAULI
ZHAT = np.array([0.0, 0.0, 1.0])
XHAT = np.array([1.0, 0.0, 0.0])


def _random_config(gen, n, d=1):
    r = gen.standard_normal((n, 3))
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    return FieldConfig(chain.enumerate_sites(n, d), r)


def _random_local(gen, sites, k):
    support = [sites[i] for i in gen.choice(len(sites), size=k, replace=False)]
    m = sampling.complex_normal(gen, (2 ** k, 2 ** k))
    return LocalOperator(tuple(support), matrix=m)


def _dense_operator(a, config):
    """Oracle: embed A into the full 2^n space column by column with explicit Kronecker products."""
    n = len(config)
    pos = [config.position(s) for s in a.support]
    m = a.dense_on_support()
    k = len(pos)
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for col in range(2 ** n):
        bits = [(col >> (n - 1 - p)) & 1 for p in range(n)]
        sub_in = sum(bits[p] << (k - 1 - i) for i, p in enumerate(pos))
        for sub_out in range(2 ** k):
            row_bits = list(bits)
            for i, p in enumerate(pos):
                row_bits[p] = (sub_out >> (k - 1 - i)) & 1
            row = sum(b << (n - 1 - p) for p, b in enumerate(row_bits))
            out[row, col] += m[sub_out, sub_in]
    return out


# sites and configurations --------------------------------------------------------

def test_enumerate_sites():
    assert chain.enumerate_sites(3) == ((0,), (1,), (2,))
    sites = chain.enumerate_sites(9, d=2)
    assert sites[0] == (0, 0)
    assert set(sites) == {(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)}


def test_config_validation():
    with pytest.raises(ValueError):
        FieldConfig(((0,), (0,)), np.tile(ZHAT, (2, 1)))
    with pytest.raises(ValueError):
        FieldConfig(((0,),), [[1.0, 1.0, 0.0]])


# interaction distance ------------------------------------------------------------

def test_interaction_distance_examples(gen):
    sites = chain.enumerate_sites(5)
    c = _random_config(gen, 5)
    assert chain.interaction_distance(c, c) == 0.0
    r, s = sampling.sphere_point(gen), sampling.sphere_point(gen)
    d = chain.interaction_distance(FieldConfig.constant(sites, r), FieldConfig.constant(sites, s))
    assert d == pytest.approx(np.linalg.norm(r - s), abs=1e-15)
    flipped = np.tile(ZHAT, (5, 1))
    flipped[2] = -ZHAT
    assert chain.interaction_distance(FieldConfig.constant(sites, ZHAT), FieldConfig(sites, flipped)) == 2.0
    with pytest.raises(SiteMismatch):
        chain.interaction_distance(c, _random_config(gen, 4))


@given(seeds())
def test_site_operator_distance_matches(seed):
    gen = np.random.default_rng(seed)
    c1, c2 = _random_config(gen, 4), _random_config(gen, 4)
    # ||(r - r') . sigma|| = ||r - r'|| for Pauli vectors
    assert chain.site_operator_distance(c1, c2) == pytest.approx(chain.interaction_distance(c1, c2), abs=1e-12)


# ground states and expectations ---------------------------------------------------

@given(seeds(), st.integers(1, 6))
def test_ground_state_eigenvectors(seed, n):
    gen = np.random.default_rng(seed)
    c = _random_config(gen, n)
    gs = chain.ground_state(c)
    for r, v in zip(c.r, gs.vectors):
        assert np.linalg.norm(spin_hamiltonian(r) @ v + v) <= 1e-10
    assert chain.hamiltonian_expectation(gs) == pytest.approx(-n, abs=1e-12)


def test_expectation_examples(gen):
    c = _random_config(gen, 4)
    gs = chain.ground_state(c)
    assert chain.expectation(gs, LocalOperator.identity()) == 1.0
    site = c.sites[2]
    h = LocalOperator.simple({site: spin_hamiltonian(c.field(site))})
    assert chain.expectation(gs, h) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(SupportOutsideLattice):
        chain.expectation(gs, LocalOperator.simple({(99,): SZ}))


@given(seeds())
def test_expectation_matches_dense_oracle(seed):
    gen = np.random.default_rng(seed)
    n = int(gen.integers(1, 9))
    c = _random_config(gen, n)
    gs = chain.ground_state(c)
    omega = gs.dense()
    k = int(gen.integers(1, min(n, 3) + 1))
    a = _random_local(gen, c.sites, k)
    expected = np.vdot(omega, _dense_operator(a, c) @ omega)
    assert abs(chain.expectation(gs, a) - expected) <= 1e-10 * (1 + abs(expected))
    fs = {s: sampling.complex_normal(gen, (2, 2)) for s in c.sites[:k]}
    simple = LocalOperator.simple(fs)
    expected = np.vdot(omega, _dense_operator(simple, c) @ omega)
    assert abs(chain.expectation(gs, simple) - expected) <= 1e-10 * (1 + abs(expected))
    np.testing.assert_allclose(chain.apply_local(a, c, omega), _dense_operator(a, c) @ omega, atol=1e-10)


def test_local_operator_validation():
    with pytest.raises(ValueError):
        LocalOperator(((0,),), factors=(np.eye(2),), matrix=np.eye(2))
    with pytest.raises(ValueError):
        LocalOperator(((0,), (1,)), matrix=np.eye(2))
    assert LocalOperator.simple({(0,): 2 * SZ, (1,): SX}).norm() == pytest.approx(2.0)


@given(seeds())
def test_lipschitz_bound_on_support(seed):
    gen = np.random.default_rng(seed)
    c1 = _random_config(gen, 5)
    r2 = c1.r + 1e-3 * gen.standard_normal((5, 3))
    c2 = FieldConfig(c1.sites, r2 / np.linalg.norm(r2, axis=1, keepdims=True))
    g1, g2 = chain.ground_state(c1), chain.ground_state(c2)
    a = _random_local(gen, c1.sites, 2)
    lhs = abs(chain.expectation(g1, a) - chain.expectation(g2, a))
    pos = [c1.position(s) for s in a.support]
    gauge_dist = [math.sqrt(max(0.0, 2 - 2 * abs(np.vdot(g1.vectors[p], g2.vectors[p])))) for p in pos]
    assert lhs <= 2 * a.norm() * sum(gauge_dist) + 1e-12


# distances --------------------------------------------------------------------

def test_local_state_distance_examples(gen):
    c = _random_config(gen, 6)
    g = chain.ground_state(c)
    assert chain.local_state_distance(g, g).exact <= 1e-14
    r = c.r.copy()
    r[3] = -r[3]
    flipped = chain.ground_state(FieldConfig(c.sites, r))
    assert chain.local_state_distance(g, flipped).exact == pytest.approx(2.0)


@given(seeds(), st.integers(1, 8))
def test_local_state_distance_oracle(seed, n):
    gen = np.random.default_rng(seed)
    c1, c2 = _random_config(gen, n), _random_config(gen, n)
    g1, g2 = chain.ground_state(c1), chain.ground_state(c2)
    rep = chain.local_state_distance(g1, g2)
    assert rep.exact <= rep.bound + 1e-12
    # dense trace norm of the difference of the two rank-one projections
    o1, o2 = g1.dense(), g2.dense()
    dense = np.linalg.svd(np.outer(o1, o1.conj()) - np.outer(o2, o2.conj()), compute_uv=False).sum()
    assert rep.exact == pytest.approx(dense, abs=1e-9)
    assert abs(rep.overlap) ** 2 == pytest.approx(1 - rep.exact ** 2 / 4, abs=1e-10)


def test_diagonal_versus_box():
    rows = chain.diagonal_path_table(ZHAT, XHAT, sizes=[1, 2, 4, 8, 16], ts=[0.1])
    diag = [r[2] for r in rows]
    box = [r[4] for r in rows]
    assert all(b > a for a, b in zip(diag, diag[1:]))
    assert max(box) - min(box) <= 1e-12
    assert all(r[4] <= r[5] + 1e-12 for r in rows)
    csv = chain.diagonal_path_csv(rows)
    assert csv.splitlines()[0] == "m,t,diagonal_exact,diagonal_bound,box_exact,box_bound"
    assert chain.diagonal_path_svg(rows).startswith("<svg")


# ground-state inequality and spectrum -------------------------------------------------

def test_inequality_examples():
    sites = chain.enumerate_sites(3)
    g = chain.ground_state(FieldConfig.constant(sites, ZHAT))
    assert chain.ground_state_inequality(g, LocalOperator.identity()) == pytest.approx(0.0, abs=1e-14)
    sx = LocalOperator.simple({sites[1]: SX})
    assert chain.ground_state_inequality(g, sx) == pytest.approx(2.0, abs=1e-12)
    big = chain.ground_state(FieldConfig.constant(chain.enumerate_sites(13), ZHAT))
    with pytest.raises(TooLarge):
        chain.ground_state_inequality(big, sx)


def test_inequality_random_operators(gen):
    c = _random_config(gen, 6)
    g = chain.ground_state(c)
    omega = g.dense()
    h = sum(_dense_operator(LocalOperator.simple({s: spin_hamiltonian(r)}), c) for s, r in zip(c.sites, c.r))
    w = np.linalg.eigvalsh(h)
    for _ in range(100):
        a = _random_local(gen, c.sites, int(gen.integers(1, 4)))
        value = chain.ground_state_inequality(g, a)
        assert value >= -1e-10 * a.norm() ** 2 * 6
        # oracle: <A Omega, (H - E0) A Omega> from the dense Hamiltonian
        phi = _dense_operator(a, c) @ omega
        expected = np.vdot(phi, h @ phi).real - w[0] * np.vdot(phi, phi).real
        assert value == pytest.approx(expected, abs=1e-9 * (1 + abs(expected)))


def test_spectral_gap_examples(gen):
    rep = chain.spectral_gap(FieldConfig.constant(chain.enumerate_sites(1), ZHAT))
    assert (rep.ground_energy, rep.gap, rep.multiplicity) == (pytest.approx(-1.0), pytest.approx(2.0), 1)
    rep = chain.spectral_gap(_random_config(gen, 3))
    assert rep.ground_energy == pytest.approx(-3.0, abs=1e-9)
    assert rep.gap == pytest.approx(2.0, abs=1e-9)
    assert rep.multiplicity == 1
    with pytest.raises(TooLarge):
        chain.spectral_gap(_random_config(gen, 13))


@pytest.mark.parametrize("n", [5, 11])
def test_spectral_gap_sizes(gen, n):
    rep = chain.spectral_gap(_random_config(gen, n))
    assert rep.ground_energy == pytest.approx(-n, abs=1e-9)
    assert rep.gap == pytest.approx(2.0, abs=1e-8)
    assert rep.multiplicity == 1


# sector witness ---------------------------------------------------------------

def test_sector_witness_examples(gen):
    r = sampling.sphere_point(gen)
    same = chain.sector_witness(r, r, site_count=16)
    assert same.target == pytest.approx(0.0, abs=1e-15) and max(same.values) <= 1e-12
    ortho = chain.sector_witness(ZHAT, XHAT, site_count=16)
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in ortho.values)
    anti = chain.sector_witness(ZHAT, -ZHAT, site_count=16)
    assert all(v == pytest.approx(2.0, abs=1e-12) for v in anti.values)


@given(seeds())
def test_sector_witness_random(seed):
    gen = np.random.default_rng(seed)
    r, s = sampling.sphere_point(gen), sampling.sphere_point(gen)
    rep = chain.sector_witness(r, s, site_count=32, d=2)
    assert rep.target == pytest.approx(abs(1 - r @ s), abs=1e-15)
    assert rep.max_deviation <= 1e-12
    assert len(rep.values) == 33
