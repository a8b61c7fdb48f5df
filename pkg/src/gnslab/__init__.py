"""Finite-dimensional laboratory for families of states, GNS data and
Kadison transitivity on C*-algebras ``M_{n_1} + ... + M_{n_K}``.

Submodules: :mod:`numerics`, :mod:`algebra`, :mod:`projgeom`, :mod:`gns`,
:mod:`kadison`, :mod:`bundles`, :mod:`chain`, :mod:`ktheory` and :mod:`cli`.
"""

__version__ = "0.1.0"
