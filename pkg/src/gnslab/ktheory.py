"""Exact arithmetic for supernatural numbers and the UHF homotopy/K-theory tables.

A supernatural number is a formal product of prime powers with exponents in
``N u {inf}``.  It determines the subgroup ``Q(n)`` of rationals whose reduced
denominators divide some finite part of ``n``.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction

import sympy

from gnslab.errors import BrokenDivisibilityChain, NotDivisible

INF = float("inf")


def _check_exponent(e):
    if e == INF:
        return INF
    if isinstance(e, bool) or int(e) != e or e < 0:
        raise ValueError(f"exponent must be a natural number or INF, got {e!r}")
    return int(e)


@dataclasses.dataclass(frozen=True)
class SupernaturalNumber:
    """Prime -> exponent map; zero exponents are dropped."""

    exponents: tuple = ()

    def __post_init__(self):
        items = dict(self.exponents)
        clean = {}
        for p, e in items.items():
            p = int(p)
            if not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
            e = _check_exponent(e)
            if e != 0:
                clean[p] = e
        object.__setattr__(self, "exponents", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, mapping):
        return cls(tuple(dict(mapping).items()))

    @classmethod
    def from_int(cls, n):
        if n < 1:
            raise ValueError("need a positive integer")
        return cls(tuple(sympy.factorint(n).items()))

    def exponent(self, p):
        return dict(self.exponents).get(p, 0)

    def infinite_primes(self):
        return frozenset(p for p, e in self.exponents if e == INF)

    def divides(self, other):
        """Exponent-wise ``self <= other``."""
        return all(e <= other.exponent(p) for p, e in self.exponents)

    def __mul__(self, other):
        out = dict(self.exponents)
        for p, e in other.exponents:
            out[p] = out.get(p, 0) + e
        return SupernaturalNumber(tuple(out.items()))

    def __str__(self):
        if not self.exponents:
            return "1"
        return "*".join(f"{p}^inf" if e == INF else f"{p}^{e}" for p, e in self.exponents)


@dataclasses.dataclass(frozen=True)
class UHFType:
    """Finite prefix ``n_0 | n_1 | ...`` plus primes declared to have unbounded exponent."""

    sequence: tuple
    infinite_primes: frozenset = frozenset()

    def __post_init__(self):
        seq = tuple(int(n) for n in self.sequence)
        if not seq or seq[0] < 1:
            raise BrokenDivisibilityChain("type sequence must start with n_0 >= 1")
        for a, b in zip(seq, seq[1:]):
            if b % a != 0 or b <= a:
                raise BrokenDivisibilityChain(f"{a} does not strictly divide {b}")
        inf = frozenset(int(p) for p in self.infinite_primes)
        for p in inf:
            if not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "sequence", seq)
        object.__setattr__(self, "infinite_primes", inf)


def sn_from_type(t: UHFType) -> SupernaturalNumber:
    """Prime exponents are the maxima over the listed ``n_i``, overridden by INF markers."""
    exps = {}
    for n in t.sequence:
        for p, e in sympy.factorint(n).items():
            exps[p] = max(exps.get(p, 0), e)
    for p in t.infinite_primes:
        exps[p] = INF
    return SupernaturalNumber(tuple(exps.items()))


def q_contains(n: SupernaturalNumber, q) -> bool:
    """Whether the rational ``q`` lies in ``Q(n)``."""
    q = Fraction(q)
    return all(e <= n.exponent(p) for p, e in sympy.factorint(q.denominator).items())


def q_isomorphic(n: SupernaturalNumber, m: SupernaturalNumber) -> bool:
    """``Q(n) = Q(m)`` up to isomorphism iff ``n n' = m m'`` for finite ``n', m'``."""
    return n.infinite_primes() == m.infinite_primes()


def union_form_contains(sequence, q) -> bool:
    """Membership in ``U_j n_j^{-1} Z`` for a finite type prefix."""
    d = Fraction(q).denominator
    return any(n % d == 0 for n in sequence)


# symbolic groups --------------------------------------------------------------

_ORDER = {"Z": 0, "Q(delta)": 1}


@dataclasses.dataclass(frozen=True)
class GroupExpr:
    """Finite product of the factors ``Z`` and ``Q(delta)``; the empty product is ``0``."""

    factors: tuple = ()

    def __post_init__(self):
        for f in self.factors:
            if f not in _ORDER:
                raise ValueError(f"unknown factor {f!r}")
        object.__setattr__(self, "factors", tuple(sorted(self.factors, key=_ORDER.__getitem__)))

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "0":
            return cls(())
        return cls(tuple(part.strip() for part in text.split(" x ")))

    def __str__(self):
        return " x ".join(self.factors) if self.factors else "0"

    def rational_rank(self):
        """Rank after tensoring with Q; each factor contributes one."""
        return len(self.factors)


ZERO = GroupExpr(())
Q_DELTA = GroupExpr(("Q(delta)",))
Z_X_Q_DELTA = GroupExpr(("Z", "Q(delta)"))


def homotopy_group(k: int, which: str = "U", delta=None) -> GroupExpr:
    """``pi_k`` of the unitary group ``U`` of a UHF algebra or of the stabilizer ``U_omega``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if which not in ("U", "U_omega"):
        raise ValueError("which must be 'U' or 'U_omega'")
    if k % 2 == 0:
        return ZERO
    if which == "U_omega" and k == 1:
        return Z_X_Q_DELTA
    return Q_DELTA


def k_theory(k: int, delta=None) -> GroupExpr:
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    return Q_DELTA if k == 0 else ZERO


def rational_pi1_note():
    """Rationalized ``pi_1`` ranks: 1 for ``U`` and 2 for ``U_omega``."""
    a = homotopy_group(1, "U").rational_rank()
    b = homotopy_group(1, "U_omega").rational_rank()
    return {"rank_pi1_U": a, "rank_pi1_U_omega": b, "differ": a != b}


def colimit_matrix_check(n_i: int, n_j: int) -> bool:
    """Exact check of ``g_j (g_ij)_* = g_i`` with the 2x2 matrices of the colimit maps."""
    if n_i < 1 or n_j % n_i != 0:
        raise NotDivisible(f"{n_i} does not divide {n_j}")
    nij = n_j // n_i

    def g(n):
        return ((Fraction(1), Fraction(0)), (1 + Fraction(1, n), Fraction(1, n)))

    step = ((Fraction(1), Fraction(0)), (Fraction(nij - 1), Fraction(nij)))
    gj = g(n_j)
    prod = tuple(
        tuple(sum(gj[r][k] * step[k][c] for k in range(2)) for c in range(2)) for r in range(2)
    )
    return prod == g(n_i)
