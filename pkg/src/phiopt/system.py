"""System-level integration: constellations, unidirectional cuts and big Phi."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError
from .mechanism import PRECISION, Concept, MechanismAnalyzer, Mice, purview_order
from .netmodel import (
    Network, SystemState, Tpm, as_network, first_feasible_state, validate_state,
)
from .repertoire import (
    CAUSE, EFFECT, Repertoire, RepertoireEngine, hamming_emd, members, popcount,
    product_distribution,
)

DEFAULT_MAX_NODES = 6


@dataclass(frozen=True)
class SystemCut:
    """Connections from ``severed_from`` into ``severed_to`` are replaced by noise."""

    severed_from: int
    severed_to: int

    def splits(self, mechanism: int) -> bool:
        return bool(mechanism & self.severed_from) and bool(mechanism & self.severed_to)

    def to_json(self) -> dict:
        return {"from": list(members(self.severed_from)), "to": list(members(self.severed_to))}


@dataclass(eq=False)
class Constellation:
    concepts: list
    null_effect_on: np.ndarray = field(repr=False)  # unconstrained ON probability per node
    node_count: int = 0

    @property
    def null_cause(self) -> Repertoire:
        n = self.node_count
        return Repertoire(2 ** n - 1, np.full(2 ** n, 0.5 ** n))

    @property
    def null_effect(self) -> Repertoire:
        return Repertoire(2 ** self.node_count - 1, product_distribution(self.null_effect_on))

    @property
    def mechanisms(self) -> list:
        return [c.mechanism for c in self.concepts]

    def __len__(self):
        return len(self.concepts)

    def to_json(self) -> list:
        return [c.to_json() for c in self.concepts]


@dataclass(eq=False)
class PhiResult:
    big_phi: float
    state: SystemState
    mip_cut: Optional[SystemCut]
    constellation: Constellation
    partitioned_constellation: Constellation

    def to_json(self) -> dict:
        return {
            "big_phi": self.big_phi,
            "state": list(self.state),
            "mip_cut": self.mip_cut.to_json() if self.mip_cut else None,
            "concepts": self.constellation.to_json(),
            "partitioned_concepts": self.partitioned_constellation.to_json(),
        }


def enumerate_cuts(n: int) -> list:
    """All ordered bipartitions, by ascending bitmask of the severed-from side."""
    full = 2 ** n - 1
    return [SystemCut(a, full & ~a) for a in range(1, full)]


def _cut_rows(rows: np.ndarray, cut: SystemCut) -> np.ndarray:
    n = rows.shape[1]
    out = rows.copy()
    axes = tuple(members(cut.severed_from))
    for j in members(cut.severed_to):
        nd = rows[:, j].reshape((2,) * n, order="F")
        avg = np.broadcast_to(nd.mean(axis=axes, keepdims=True), nd.shape)
        out[:, j] = avg.reshape(-1, order="F")
    return out


def apply_cut(network, cut: SystemCut) -> Network:
    """Average each severed-to node's column over the severed-from nodes."""
    network = as_network(network)
    rows = _cut_rows(network.tpm.rows, cut)
    return Network.from_tpm(Tpm(rows, network.node_count))


# --------------------------------------------------------------------------
# Constellation distance

def _cause_expanded(mice: Mice, purview: int, n: int) -> np.ndarray:
    shape = tuple(2 if (purview >> i) & 1 else 1 for i in range(n))
    extra = popcount(purview & ~mice.purview)
    rep = np.broadcast_to(mice.data, shape).reshape(-1, order="F")
    return rep * 0.5 ** extra


def _effect_full(mice: Mice, null_on: np.ndarray) -> np.ndarray:
    out = null_on.copy()
    out[list(members(mice.purview))] = mice.data
    return out


def concept_distance(c1: Concept, null1: np.ndarray, c2: Concept, null2: np.ndarray, n: int) -> float:
    """Cause EMD plus effect EMD, both over the union of the two purviews."""
    union = c1.cause.purview | c2.cause.purview
    cause = hamming_emd(_cause_expanded(c1.cause, union, n), _cause_expanded(c2.cause, union, n))
    effect = np.abs(_effect_full(c1.effect, null1) - _effect_full(c2.effect, null2)).sum()
    return cause + float(effect)


def null_distance(c: Concept, null_on: np.ndarray, n: int) -> float:
    """Distance from a concept to the unconstrained (null) concept."""
    cause_rep = c.cause.data.reshape(-1, order="F")
    cause = hamming_emd(cause_rep, np.full(cause_rep.size, 1.0 / cause_rep.size))
    effect = np.abs(c.effect.data - null_on[list(members(c.effect.purview))]).sum()
    return cause + float(effect)


def same_concept(a: Concept, b: Concept) -> bool:
    return (a.mechanism == b.mechanism and a.phi == b.phi
            and a.cause.same_repertoire(b.cause) and a.effect.same_repertoire(b.effect))


def _transport(supply: np.ndarray, demand: np.ndarray, cost: np.ndarray) -> float:
    ns, nt = cost.shape
    a_eq = np.zeros((ns + nt, ns * nt))
    for i in range(ns):
        a_eq[i, i * nt:(i + 1) * nt] = 1.0
    for j in range(nt):
        a_eq[ns + j, j::nt] = 1.0
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=np.concatenate([supply, demand]),
                  bounds=(0, None), method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise RuntimeError(f"constellation transport failed: {res.message}")
    return float(res.fun)


def constellation_distance(c1: Constellation, c2: Constellation) -> float:
    """Extended EMD between constellations with a null concept absorbing the phi imbalance.

    Concepts present unchanged in both are dropped first.  Mass only moves
    between the two constellations or to/from the null concept.
    """
    if c1.node_count != c2.node_count:
        raise ValueError(f"constellations over {c1.node_count} and {c2.node_count} nodes")
    n = c1.node_count
    only1 = [a for a in c1.concepts if not any(same_concept(a, b) for b in c2.concepts)]
    only2 = [b for b in c2.concepts if not any(same_concept(b, a) for a in c1.concepts)]
    if not only1 or not only2:
        rest, null_on = (only1, c1.null_effect_on) if only1 else (only2, c2.null_effect_on)
        # phi types are kept as produced (builtin for cause, numpy for effect)
        # so the final rounding follows the same rule as the summands.
        dist = sum(c.phi * null_distance(c, null_on, n) for c in rest)
        return float(round(dist, PRECISION))
    phi1 = np.array([c.phi for c in only1])
    phi2 = np.array([c.phi for c in only2])
    surplus = phi1.sum() - phi2.sum()
    cost = np.zeros((len(only1) + 1, len(only2) + 1))
    for i, a in enumerate(only1):
        for j, b in enumerate(only2):
            cost[i, j] = concept_distance(a, c1.null_effect_on, b, c2.null_effect_on, n)
        cost[i, -1] = null_distance(a, c1.null_effect_on, n)
    for j, b in enumerate(only2):
        cost[-1, j] = null_distance(b, c2.null_effect_on, n)
    supply = np.append(phi1, max(0.0, -surplus))
    demand = np.append(phi2, max(0.0, surplus))
    return float(round(_transport(supply, demand, cost), PRECISION))


# --------------------------------------------------------------------------
# Whole-system analysis

class SystemAnalyzer:
    """Constellation of one network in one state, plus its cut variants."""

    def __init__(self, network: Network, state: SystemState):
        self.network = network
        self.state = state
        self.n = network.node_count
        engine = RepertoireEngine(network.tpm.rows, state)
        self.analyzer = MechanismAnalyzer(engine, network.cm)
        self._mice = {}

    def _constellation(self, analyzer: MechanismAnalyzer, mechanisms, reuse=None) -> Constellation:
        concepts = []
        for mech in mechanisms:
            mice = {}
            for direction in (CAUSE, EFFECT):
                cached = reuse(direction, mech) if reuse else None
                mice[direction] = cached or analyzer.core_mice(direction, mech)
                if reuse is None and mice[direction].phi > 0:
                    self._mice[direction, mech] = mice[direction]
            found = analyzer.concept(mech, mice[CAUSE], mice[EFFECT])
            if found is not None:
                concepts.append(found)
        return Constellation(concepts, analyzer.engine.effect_on[0].copy(), self.n)

    def constellation(self) -> Constellation:
        return self._constellation(self.analyzer, purview_order(self.n))

    def cut_constellation(self, cut: SystemCut, original: Constellation) -> Constellation:
        parent = self.analyzer.engine
        rows = _cut_rows(parent.rows, cut)
        changed = 0
        for j in members(cut.severed_to):
            if not np.array_equal(rows[:, j], parent.rows[:, j]):
                changed |= 1 << j
        engine = RepertoireEngine(rows, self.state, parent=parent, changed=changed)
        cm = self.network.cm.copy()
        cm[np.ix_(members(cut.severed_from), members(cut.severed_to))] = 0
        analyzer = MechanismAnalyzer(engine, cm, parent=self.analyzer)

        def reuse(direction, mech):
            mice = self._mice.get((direction, mech))
            if mice is None or cut.splits(mech):
                return None
            src, dst = (mice.purview, mech) if direction == CAUSE else (mech, mice.purview)
            if src & cut.severed_from and dst & cut.severed_to:
                return None
            return mice

        # A cut can only create concepts from mechanisms it splits.
        wanted = set(original.mechanisms)
        wanted.update(m for m in purview_order(self.n) if cut.splits(m))
        mechanisms = [m for m in purview_order(self.n) if m in wanted]
        return self._constellation(analyzer, mechanisms, reuse)

    def is_strongly_connected(self) -> bool:
        n_comp, _ = connected_components(self.network.cm, directed=True, connection="strong")
        return n_comp == 1

    def big_phi(self) -> PhiResult:
        whole = self.constellation()
        if self.n == 1 or not whole.concepts:
            return PhiResult(0.0, self.state, None, whole, whole)
        cuts = enumerate_cuts(self.n)
        if not self.is_strongly_connected():
            cm = self.network.cm
            for cut in cuts:
                if not cm[np.ix_(members(cut.severed_from), members(cut.severed_to))].any():
                    return PhiResult(0.0, self.state, cut, whole, whole)
        best = None
        for cut in cuts:
            parted = self.cut_constellation(cut, whole)
            dist = constellation_distance(whole, parted)
            if best is None or dist < best[0]:
                best = (dist, cut, parted)
            if dist == 0:
                break
        return PhiResult(best[0], self.state, best[1], whole, best[2])


def _check_size(n: int, max_nodes: int):
    if n > max_nodes:
        raise BudgetError(f"{n} nodes exceeds the guardrail of {max_nodes}")


def build_constellation(network, state, max_nodes: int = DEFAULT_MAX_NODES) -> Constellation:
    network = as_network(network)
    _check_size(network.node_count, max_nodes)
    state = validate_state(state, network.node_count)
    return SystemAnalyzer(network, state).constellation()


def big_phi(network, state, max_nodes: int = DEFAULT_MAX_NODES) -> PhiResult:
    """Integrated information of the whole system: the minimum over cuts of the
    constellation distance between the intact and the cut system."""
    network = as_network(network)
    _check_size(network.node_count, max_nodes)
    state = validate_state(state, network.node_count)
    return SystemAnalyzer(network, state).big_phi()


def phi_of_tpm(tpm, max_nodes: int = DEFAULT_MAX_NODES):
    """Phi at the first feasible state, or None when no state is feasible."""
    network = as_network(tpm)
    _check_size(network.node_count, max_nodes)
    report = first_feasible_state(network)
    if not report.feasible:
        return None
    result = SystemAnalyzer(network, report.first_feasible_state).big_phi()
    return result.big_phi, report.first_feasible_state
