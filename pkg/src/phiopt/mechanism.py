"""Mechanism-level irreducibility: partitions, MIP, core cause/effect, concepts."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import UndefinedRepertoireError
from .netmodel import as_network, validate_state
from .repertoire import (
    CAUSE, EFFECT, Repertoire, RepertoireEngine, as_mask, hamming_emd_many, members,
    popcount, product_distribution,
)

# Decimal places kept for small and big phi; also absorbs floating-point dust.
PRECISION = 6


def _round(x: float) -> float:
    return round(float(x), PRECISION)


def _round_np(x) -> np.float64:
    # numpy rounding (scale, round half to even, unscale) settles ties such as
    # 2.3124995 differently from the builtin's exact-decimal rounding; effect
    # phis and sums that involve them use this rule.
    return np.round(np.float64(x), PRECISION)


@dataclass(frozen=True)
class MechanismPartition:
    """Two (mechanism, purview) parts whose repertoires are multiplied together."""

    part1: tuple  # (mechanism mask, purview mask)
    part2: tuple

    def to_json(self) -> dict:
        return {
            "part1": {"mechanism": list(members(self.part1[0])), "purview": list(members(self.part1[1]))},
            "part2": {"mechanism": list(members(self.part2[0])), "purview": list(members(self.part2[1]))},
        }


def _split(mask: int) -> list:
    """Unordered bipartitions of ``mask``; the highest element always lands in the second half."""
    elems = members(mask)
    out = []
    for i in range(2 ** (len(elems) - 1)) if elems else ():
        first = 0
        for k, e in enumerate(elems):
            if (i >> k) & 1:
                first |= 1 << e
        out.append((first, mask & ~first))
    return out


def _directed_split(mask: int) -> list:
    halves = _split(mask)
    return halves + [(b, a) for a, b in reversed(halves)]


@lru_cache(maxsize=None)
def _partition_masks(mechanism: int, purview: int) -> tuple:
    out = []
    for m1, m2 in _split(mechanism):
        for p1, p2 in _directed_split(purview):
            if (m1 or p1) and (m2 or p2):
                out.append((m1, p1, m2, p2))
    return tuple(out)


def enumerate_partitions(mechanism, purview) -> list:
    """All admissible bipartitions of (mechanism, purview).

    The mechanism is split into unordered halves and the purview into ordered
    halves; a candidate is dropped when either part would be entirely empty.
    The uncut pairing (everything on one side) is therefore excluded.
    """
    mechanism, purview = as_mask(mechanism), as_mask(purview)
    if not mechanism or not purview:
        return []
    return [MechanismPartition((m1, p1), (m2, p2))
            for m1, p1, m2, p2 in _partition_masks(mechanism, purview)]


@lru_cache(maxsize=None)
def _effect_sides(mechanism: int, purview: int) -> tuple:
    """Per purview node, the mechanism part each partition pairs it with."""
    arr = np.array(_partition_masks(mechanism, purview))
    return tuple((p, np.where((arr[:, 1] >> p) & 1, arr[:, 0], arr[:, 2]))
                 for p in members(purview))


@lru_cache(maxsize=None)
def purview_order(n: int) -> tuple:
    """Nonempty purviews by size, then lexicographically by members."""
    return tuple(sum(1 << i for i in combo)
                 for r in range(1, n + 1) for combo in combinations(range(n), r))


@dataclass(frozen=True, eq=False)
class Mice:
    """Core cause or effect of a mechanism.

    ``data`` holds the cause repertoire as an n-d array (singleton axes off
    the purview) or, for effects, the per-node ON probabilities over the
    purview members.
    """

    direction: str
    mechanism: int
    purview: int
    phi: float
    mip: Optional[MechanismPartition]
    data: np.ndarray

    @property
    def repertoire(self) -> Repertoire:
        if self.direction == CAUSE:
            return Repertoire(self.purview, self.data.reshape(-1, order="F").copy())
        return Repertoire(self.purview, product_distribution(self.data))

    def same_repertoire(self, other: "Mice") -> bool:
        return self.purview == other.purview and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class Concept:
    mechanism: int
    cause: Mice
    effect: Mice

    @property
    def phi(self) -> float:
        return min(self.cause.phi, self.effect.phi)

    def to_json(self) -> dict:
        return {
            "mechanism": list(members(self.mechanism)),
            "phi": self.phi,
            "phi_cause": self.cause.phi,
            "phi_effect": self.effect.phi,
            "cause_purview": list(members(self.cause.purview)),
            "effect_purview": list(members(self.effect.purview)),
        }


class MechanismAnalyzer:
    """Small-phi computations for one (possibly cut) network in one state.

    ``cm`` restricts candidate purviews: a purview is skipped when some
    purview node has no edge to the mechanism or some mechanism node has no
    edge from the purview (reversed for effects).  Such purviews factorize
    and have phi = 0.
    """

    def __init__(self, engine: RepertoireEngine, cm: np.ndarray,
                 parent: Optional["MechanismAnalyzer"] = None):
        self.engine = engine
        self.parent = parent
        self._mips = {}
        self.n = engine.n
        self.cm = np.asarray(cm)
        self.out_mask = [int(sum(1 << j for j in range(self.n) if self.cm[i, j])) for i in range(self.n)]
        self.in_mask = [int(sum(1 << i for i in range(self.n) if self.cm[i, j])) for j in range(self.n)]

    def _connected(self, direction: str, mechanism: int, purview: int) -> bool:
        src, dst = (purview, mechanism) if direction == CAUSE else (mechanism, purview)
        return (all(self.out_mask[i] & dst for i in members(src))
                and all(self.in_mask[j] & src for j in members(dst)))

    def find_mip(self, direction: str, mechanism: int, purview: int):
        """Return (phi, partition index or None) for the minimum-information partition."""
        if self.parent is not None:
            # Results only depend on the columns of the mechanism (cause) or
            # purview (effect); reuse the uncut answer when those are intact.
            touched = mechanism if direction == CAUSE else purview
            if not touched & self.engine.changed:
                return self.parent.find_mip(direction, mechanism, purview)
        key = (direction, mechanism, purview)
        hit = self._mips.get(key)
        if hit is None:
            hit = self._mips[key] = self._find_mip(direction, mechanism, purview)
        return hit

    def _find_mip(self, direction: str, mechanism: int, purview: int):
        parts = _partition_masks(mechanism, purview)
        if not parts:
            return 0.0, None
        eng = self.engine
        if direction == CAUSE:
            whole = eng.cause_flat(mechanism, purview)
            if not whole.any():
                return 0.0, None
            rows = np.empty((len(parts), whole.size))
            for k, (m1, p1, m2, p2) in enumerate(parts):
                rows[k] = (eng.cause_nd(m1, p1) * eng.cause_nd(m2, p2)).reshape(-1, order="F")
            dists = hamming_emd_many(rows, whole)
            rnd = _round
        else:
            table = eng.effect_on
            dists = np.zeros(len(parts))
            for p, side in _effect_sides(mechanism, purview):
                dists += np.abs(table[mechanism, p] - table[side, p])
            rnd = _round_np
        # Rounding is monotone, so the first rounded minimum lies among the
        # entries within one rounding unit of the raw minimum.
        low = dists.min()
        target = rnd(low)
        for k in np.flatnonzero(dists <= low + 10.0 ** -PRECISION):
            if rnd(dists[k]) == target:
                return target, int(k)
        raise AssertionError("unreachable")

    def mice_for(self, direction: str, mechanism: int, purview: int) -> Mice:
        phi, k = self.find_mip(direction, mechanism, purview)
        mip = None
        if k is not None:
            m1, p1, m2, p2 = _partition_masks(mechanism, purview)[k]
            mip = MechanismPartition((m1, p1), (m2, p2))
        if direction == CAUSE:
            data = self.engine.cause_nd(mechanism, purview)
        else:
            data = self.engine.effect_probs(mechanism, purview)
        return Mice(direction, mechanism, purview, phi, mip, data)

    def core_mice(self, direction: str, mechanism: int) -> Mice:
        """Purview with maximal phi; ties go to the larger purview, then the earlier one."""
        best_phi, best_purview = None, 0
        for purview in purview_order(self.n):
            if not self._connected(direction, mechanism, purview):
                continue
            phi, _ = self.find_mip(direction, mechanism, purview)
            if (best_phi is None or phi > best_phi
                    or (phi == best_phi and popcount(purview) > popcount(best_purview))):
                best_phi, best_purview = phi, purview
        if best_phi is None:
            data = np.ones((1,) * self.n) if direction == CAUSE else np.zeros(0)
            return Mice(direction, mechanism, 0, 0.0, None, data)
        return self.mice_for(direction, mechanism, best_purview)

    def concept(self, mechanism: int, cause: Mice = None, effect: Mice = None) -> Optional[Concept]:
        cause = cause or self.core_mice(CAUSE, mechanism)
        effect = effect or self.core_mice(EFFECT, mechanism)
        found = Concept(mechanism, cause, effect)
        return found if found.phi > 0 else None


def _analyzer(network, state) -> MechanismAnalyzer:
    network = as_network(network)
    state = validate_state(state, network.node_count)
    return MechanismAnalyzer(RepertoireEngine(network.tpm.rows, state), network.cm)


def _require_cause(an: MechanismAnalyzer, mechanism: int, purview: int):
    # The engine keeps the all-zero convention internally; the public API
    # reports it as an error.
    if mechanism and purview and not an.engine.cause_flat(mechanism, purview).any():
        raise UndefinedRepertoireError(
            f"mechanism {list(members(mechanism))} has no possible cause over {list(members(purview))}")


def partitioned_repertoire(network, state, partition: MechanismPartition, direction: str) -> Repertoire:
    """Product of the two parts' repertoires, over the union of their purviews."""
    an = _analyzer(network, state)
    (m1, p1), (m2, p2) = partition.part1, partition.part2
    purview = p1 | p2
    if direction == CAUSE:
        _require_cause(an, m1 | m2, purview)
        eng = an.engine
        joint = eng.cause_nd(m1, p1) * eng.cause_nd(m2, p2)
        joint = np.broadcast_to(joint, eng.shape(purview))
        return Repertoire(purview, joint.reshape(-1, order="F").copy())
    table = an.engine.effect_on
    probs = [table[m1 if (p1 >> p) & 1 else m2, p] for p in members(purview)]
    return Repertoire(purview, product_distribution(probs))


def find_mip(network, state, mechanism, purview, direction: str):
    """Minimum-information partition and its phi (None partition when nothing to cut)."""
    an = _analyzer(network, state)
    if direction == CAUSE:
        _require_cause(an, as_mask(mechanism), as_mask(purview))
    mice = an.mice_for(direction, as_mask(mechanism), as_mask(purview))
    return mice.mip, mice.phi


def core_mice(network, state, mechanism, direction: str) -> Mice:
    an = _analyzer(network, state)
    if direction == CAUSE:
        _require_cause(an, as_mask(mechanism), 2 ** an.n - 1)
    return an.core_mice(direction, as_mask(mechanism))


def build_concept(network, state, mechanism) -> Optional[Concept]:
    mechanism = as_mask(mechanism)
    if not mechanism:
        return None
    an = _analyzer(network, state)
    if not an.engine.cause_flat(mechanism, 2 ** an.n - 1).any():
        return None  # a mechanism state that cannot occur constrains nothing
    return an.concept(mechanism)
