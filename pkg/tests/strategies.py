"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def complex_arrays(draw, shape):
    re = draw(arrays(np.float64, shape, elements=finite))
    im = draw(arrays(np.float64, shape, elements=finite))
    return re + 1j * im


@st.composite
def unit_vectors(draw, dim=None, min_dim=2, max_dim=6):
    n = draw(st.integers(min_dim, max_dim)) if dim is None else dim
    v = draw(complex_arrays((n,)))
    nv = np.linalg.norm(v)
    if nv < 1e-3:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        nv = 1.0
    return v / nv


@st.composite
def seeds(draw):
    return draw(st.integers(0, 2**32 - 1))
