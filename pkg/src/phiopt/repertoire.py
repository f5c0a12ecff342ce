"""Cause/effect repertoires and the Earth Mover's Distance over binary states.

Node sets are bitmasks over the ``D`` nodes.  Repertoire vectors are indexed
little-endian over the purview members in ascending node order.

The EMD uses the Hamming ground metric.  For up to four purview nodes it is
evaluated through the Kantorovich dual: the optimum of ``max f.(p - q)`` over
1-Lipschitz ``f`` is attained at a vertex of that polytope, and the vertices
(integer-valued, ``f(0) = 0``, tight edges forming a connected spanning graph)
are enumerated once per size.  Larger purviews go through an exact
transshipment LP on the hypercube edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import UndefinedRepertoireError
from .netmodel import Network, as_network, state_index, validate_state

CAUSE = "cause"
EFFECT = "effect"
DIRECTIONS = (CAUSE, EFFECT)

# Dual-vertex tables are used up to this many purview nodes.
MAX_DUAL_NODES = 4


def nodeset(*indices: int) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def members(mask: int) -> tuple:
    out = []
    i = 0
    while mask >> i:
        if (mask >> i) & 1:
            out.append(i)
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def as_mask(nodes) -> int:
    """Accept a bitmask int or an iterable of node indices."""
    if isinstance(nodes, (int, np.integer)):
        return int(nodes)
    return nodeset(*nodes)


@dataclass(frozen=True, eq=False)
class Repertoire:
    purview: int
    probabilities: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Repertoire):
            return NotImplemented
        return self.purview == other.purview and np.array_equal(
            self.probabilities, other.probabilities)

    __hash__ = None


# --------------------------------------------------------------------------
# Earth Mover's Distance

def _tight_edges(n: int):
    return [(x, x | (1 << b)) for x in range(2 ** n) for b in range(n) if not (x >> b) & 1]


@lru_cache(maxsize=None)
def dual_vertices(n: int) -> np.ndarray:
    """Vertices of the 1-Lipschitz polytope on the n-cube, pinned at f(0)=0."""
    size = 2 ** n
    funcs = np.zeros((1, 1), dtype=np.int8)
    for x in range(1, size):
        lower = [x ^ (1 << b) for b in range(n) if (x >> b) & 1]
        anchor = funcs[:, lower[0]].astype(np.int16)
        parts = []
        for step in (-1, 0, 1):
            val = anchor + step
            ok = np.ones(len(funcs), dtype=bool)
            for y in lower[1:]:
                ok &= np.abs(val - funcs[:, y]) <= 1
            parts.append(np.column_stack([funcs[ok], val[ok].astype(np.int8)]))
        funcs = np.concatenate(parts)
    edges = _tight_edges(n)
    reach = np.zeros(funcs.shape, dtype=bool)
    reach[:, 0] = True
    tight = [np.abs(funcs[:, a].astype(np.int16) - funcs[:, b]) == 1 for a, b in edges]
    for _ in range(size):
        before = reach.sum()
        for (a, b), t in zip(edges, tight):
            reach[:, b] |= reach[:, a] & t
            reach[:, a] |= reach[:, b] & t
        if reach.sum() == before:
            break
    verts = funcs[reach.all(axis=1)].astype(float)
    verts.setflags(write=False)
    return verts


@lru_cache(maxsize=None)
def _transshipment_matrix(n: int):
    edges = _tight_edges(n)
    size = 2 ** n
    rows, cols, vals = [], [], []
    for k, (a, b) in enumerate(edges):
        # two directed arcs per edge: a->b (column 2k) and b->a (column 2k+1)
        rows += [a, b, b, a]
        cols += [2 * k, 2 * k, 2 * k + 1, 2 * k + 1]
        vals += [1.0, -1.0, 1.0, -1.0]
    return sparse.csr_matrix((vals, (rows, cols)), shape=(size, 2 * len(edges)))


def _lp_emd(diff: np.ndarray, n: int) -> float:
    a_eq = _transshipment_matrix(n)
    res = linprog(np.ones(a_eq.shape[1]), A_eq=a_eq, b_eq=diff, bounds=(0, None),
                  method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise RuntimeError(f"EMD transport solve failed: {res.message}")
    return max(float(res.fun), 0.0)


def hamming_emd_many(ps: np.ndarray, q: np.ndarray) -> np.ndarray:
    """EMD between each row of ``ps`` and ``q`` (all over the same n-node purview)."""
    ps = np.atleast_2d(ps)
    size = ps.shape[1]
    n = size.bit_length() - 1
    if n == 0:
        return np.zeros(len(ps))
    diff = ps - q
    if n <= MAX_DUAL_NODES:
        return np.maximum((diff @ dual_vertices(n).T).max(axis=1), 0.0)
    return np.array([_lp_emd(d, n) for d in diff])


def hamming_emd(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1 or p.size & (p.size - 1):
        raise ValueError("EMD needs two vectors of equal power-of-two length")
    return float(hamming_emd_many(p[None, :], q)[0])


def emd(p: Repertoire, q: Repertoire) -> float:
    """Exact transport cost between two repertoires over the same purview."""
    if p.purview != q.purview:
        raise ValueError("repertoires are over different purviews")
    return hamming_emd(p.probabilities, q.probabilities)


def product_emd(q1: np.ndarray, q2: np.ndarray) -> float:
    """EMD between two product distributions given by per-node ON probabilities.

    Under the Hamming metric the transport decouples across independent nodes.
    """
    return float(np.abs(np.asarray(q1) - np.asarray(q2)).sum())


def product_distribution(on_probs: Iterable[float]) -> np.ndarray:
    """Joint little-endian distribution of independent binary nodes."""
    dists = [np.array([1.0 - q, q]) for q in on_probs]
    if not dists:
        return np.array([1.0])
    return reduce(lambda acc, d: np.kron(d, acc), dists[1:], dists[0])


# --------------------------------------------------------------------------
# Repertoire computation

def _normalize(a: np.ndarray) -> np.ndarray:
    total = a.sum()
    return a if total == 0 else a / total


class RepertoireEngine:
    """Cached repertoire computations for one TPM in one state.

    A cut engine shares cause repertoires with its ``parent`` for mechanisms
    that contain no node whose column the cut changed.
    """

    def __init__(self, rows: np.ndarray, state: tuple, parent: Optional["RepertoireEngine"] = None,
                 changed: int = 0):
        self.rows = rows
        self.n = rows.shape[1]
        self.state = state
        self.parent = parent
        self.changed = changed
        self._factors = {}
        self._cause = {}
        self._cause_flat = {}
        idx = np.arange(2 ** self.n)
        sidx = state_index(state)
        # effect_on[M, p] = P(p ON at t+1 | mechanism M clamped to its state)
        self.effect_on = np.empty((2 ** self.n, self.n))
        for m in range(2 ** self.n):
            self.effect_on[m] = rows[(idx & m) == (sidx & m)].mean(axis=0)

    def shape(self, purview: int) -> tuple:
        return tuple(2 if (purview >> i) & 1 else 1 for i in range(self.n))

    def _factor(self, node: int, purview: int) -> np.ndarray:
        key = (node, purview)
        fac = self._factors.get(key)
        if fac is None:
            col = self.rows[:, node]
            col = col if self.state[node] else 1.0 - col
            nd = col.reshape((2,) * self.n, order="F")
            axes = tuple(i for i in range(self.n) if not (purview >> i) & 1)
            fac = nd.mean(axis=axes, keepdims=True) if axes else nd
            self._factors[key] = fac
        return fac

    def cause_nd(self, mechanism: int, purview: int) -> np.ndarray:
        """Cause repertoire as an n-dimensional array with singleton non-purview axes."""
        if self.parent is not None and not mechanism & self.changed:
            return self.parent.cause_nd(mechanism, purview)
        key = (mechanism, purview)
        rep = self._cause.get(key)
        if rep is None:
            if purview == 0:
                rep = np.ones((1,) * self.n)
            elif mechanism == 0:
                rep = np.full(self.shape(purview), 0.5 ** popcount(purview))
            else:
                joint = np.ones(self.shape(purview))
                for m in members(mechanism):
                    joint = joint * self._factor(m, purview)
                rep = _normalize(joint)
            self._cause[key] = rep
        return rep

    def cause_flat(self, mechanism: int, purview: int) -> np.ndarray:
        if self.parent is not None and not mechanism & self.changed:
            return self.parent.cause_flat(mechanism, purview)
        key = (mechanism, purview)
        rep = self._cause_flat.get(key)
        if rep is None:
            rep = self.cause_nd(mechanism, purview).reshape(-1, order="F")
            self._cause_flat[key] = rep
        return rep

    def effect_probs(self, mechanism: int, purview: int) -> np.ndarray:
        """Per-node ON probabilities over the purview members (ascending)."""
        return self.effect_on[mechanism, list(members(purview))]

    def effect_flat(self, mechanism: int, purview: int) -> np.ndarray:
        return product_distribution(self.effect_probs(mechanism, purview))

    def repertoire(self, direction: str, mechanism: int, purview: int) -> Repertoire:
        if direction == CAUSE:
            probs = self.cause_flat(mechanism, purview)
        elif direction == EFFECT:
            probs = self.effect_flat(mechanism, purview)
        else:
            raise ValueError(f"unknown direction {direction!r}")
        return Repertoire(purview, np.array(probs))


def _engine(network, state) -> RepertoireEngine:
    network = as_network(network)
    state = validate_state(state, network.node_count)
    return RepertoireEngine(network.tpm.rows, state)


def _check_nodes(mask: int, n: int) -> int:
    if mask < 0 or mask >> n:
        raise ValueError(f"node set {mask:#b} is not a subset of {n} nodes")
    return mask


def cause_repertoire(network, state, mechanism, purview) -> Repertoire:
    """Distribution over past purview states given the mechanism's current state.

    Raises UndefinedRepertoireError when the mechanism state cannot occur.
    """
    eng = _engine(network, state)
    rep = eng.repertoire(CAUSE, _check_nodes(as_mask(mechanism), eng.n),
                         _check_nodes(as_mask(purview), eng.n))
    if not rep.probabilities.any():
        raise UndefinedRepertoireError(
            f"mechanism {list(members(as_mask(mechanism)))} in state {tuple(state)} has no possible cause")
    return rep


def effect_repertoire(network, state, mechanism, purview) -> Repertoire:
    """Distribution over next purview states with the mechanism clamped, other inputs noised."""
    eng = _engine(network, state)
    return eng.repertoire(EFFECT, _check_nodes(as_mask(mechanism), eng.n),
                          _check_nodes(as_mask(purview), eng.n))


def unconstrained_repertoire(network, state, purview, direction: str) -> Repertoire:
    eng = _engine(network, state)
    return eng.repertoire(direction, 0, _check_nodes(as_mask(purview), eng.n))


def expand_repertoire(rep: Repertoire, target, network, state, direction: str) -> Repertoire:
    """Extend ``rep`` to a superset purview with the unconstrained repertoire outside it."""
    network = as_network(network)
    n = network.node_count
    target = _check_nodes(as_mask(target), n)
    if rep.purview & ~target:
        raise ValueError("target must contain the repertoire's purview")
    extra = target & ~rep.purview
    if direction == CAUSE:
        other = np.full(2 ** popcount(extra), 0.5 ** popcount(extra))
    elif direction == EFFECT:
        other = _engine(network, state).effect_flat(0, extra)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    own = rep.probabilities.reshape(
        [2 if (rep.purview >> i) & 1 else 1 for i in range(n)], order="F")
    ext = other.reshape([2 if (extra >> i) & 1 else 1 for i in range(n)], order="F")
    joint = _normalize(own * ext)
    return Repertoire(target, joint.reshape(-1, order="F"))
