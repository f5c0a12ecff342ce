"""Hypothesis strategies and small shared helpers for the test modules."""
import numpy as np
from hypothesis import strategies as st


@st.composite
def binary_rows(draw, n_min=2, n_max=3):
    n = draw(st.integers(n_min, n_max))
    bits = draw(st.lists(st.integers(0, 1), min_size=2 ** n * n, max_size=2 ** n * n))
    return np.array(bits, dtype=float).reshape(2 ** n, n)


@st.composite
def prob_rows(draw, n_min=1, n_max=3):
    n = draw(st.integers(n_min, n_max))
    vals = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0, 0.1, 0.9]),
                         min_size=2 ** n * n, max_size=2 ** n * n))
    return np.array(vals).reshape(2 ** n, n)


@st.composite
def distributions(draw, n):
    size = 2 ** n
    # exact zeros or weights bounded away from zero; masses near the LP
    # oracle's feasibility tolerance would test the solver, not the EMD
    weight = st.one_of(st.just(0.0), st.floats(0.01, 1))
    w = draw(st.lists(weight, min_size=size, max_size=size))
    w = np.array(w)
    if w.sum() == 0:
        w[0] = 1.0
    return w / w.sum()


def relabel(rows, perm):
    """New node k is old node perm[k]."""
    rows = np.asarray(rows)
    n = rows.shape[1]
    out = np.zeros_like(rows)
    for new in range(2 ** n):
        old = 0
        for k in range(n):
            if (new >> k) & 1:
                old |= 1 << perm[k]
        out[new] = rows[old, list(perm)]
    return out


def relabel_state(state, perm):
    return tuple(state[p] for p in perm)


def basic_rows():
    """OR / AND / XOR network over three nodes."""
    return np.array([
        [0, 0, 0], [0, 0, 1], [1, 0, 1], [1, 0, 0],
        [1, 1, 0], [1, 1, 1], [1, 1, 1], [1, 1, 0],
    ], dtype=float)
