"""Slow, direct reference computations used to check the fast code paths.

Nothing here imports the package's numeric internals; everything is loops
over explicit states.
"""
from itertools import product

import numpy as np
from scipy.optimize import linprog


def bits(index, n):
    return tuple((index >> i) & 1 for i in range(n))


def index(state):
    return sum(b << i for i, b in enumerate(state))


def nodes(mask):
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def cm_by_pairs(rows):
    rows = np.asarray(rows)
    n = rows.shape[1]
    cm = np.zeros((n, n), dtype=int)
    for r in range(2 ** n):
        for i in range(n):
            r2 = r ^ (1 << i)
            for j in range(n):
                if rows[r, j] != rows[r2, j]:
                    cm[i, j] = 1
    return cm


def reachable_by_rows(rows):
    rows = np.asarray(rows)
    n = rows.shape[1]
    out = set()
    for target in range(2 ** n):
        s = bits(target, n)
        for r in range(2 ** n):
            p = 1.0
            for j in range(n):
                p *= rows[r, j] if s[j] else 1 - rows[r, j]
            if p > 0:
                out.add(s)
                break
    return out


def hamming_cost(n):
    size = 2 ** n
    return np.array([[bin(a ^ b).count("1") for b in range(size)] for a in range(size)], dtype=float)


def lp_emd(p, q):
    """Transportation LP on the full N x N plan with Hamming costs."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    size = len(p)
    n = size.bit_length() - 1
    cost = hamming_cost(n)
    a_eq = np.zeros((2 * size, size * size))
    for i in range(size):
        a_eq[i, i * size:(i + 1) * size] = 1
        a_eq[size + i, i::size] = 1
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=np.concatenate([p, q]), bounds=(0, None),
                  method="highs-ds",
                  options={"primal_feasibility_tolerance": 1e-10,
                           "dual_feasibility_tolerance": 1e-10})
    assert res.status == 0
    return res.fun


_POTENTIALS = {}


def lipschitz_potentials(n):
    """Every integer f on the n-cube with f(0) = 0 and |f(x) - f(y)| <= 1 across edges."""
    if n not in _POTENTIALS:
        size = 2 ** n
        grids = np.meshgrid(*[np.arange(-n, n + 1)] * (size - 1), indexing="ij")
        f = np.column_stack([np.zeros(grids[0].size, int)] + [g.ravel() for g in grids])
        ok = np.ones(len(f), bool)
        for x in range(size):
            for b in range(n):
                ok &= np.abs(f[:, x] - f[:, x ^ (1 << b)]) <= 1
        _POTENTIALS[n] = f[ok].astype(float)
    return _POTENTIALS[n]


def dual_emd(p, q):
    """Brute-force Kantorovich dual over all integer 1-Lipschitz potentials (n <= 3)."""
    diff = np.asarray(p, float) - np.asarray(q, float)
    n = len(diff).bit_length() - 1
    assert n <= 3, "brute-force dual is only tractable up to 3 nodes"
    return float((lipschitz_potentials(n) @ diff).max())


def cause_factor(rows, state, m, purview):
    """P(node m in its current state | purview past state), other inputs averaged."""
    rows = np.asarray(rows)
    n = rows.shape[1]
    pv = nodes(purview)
    out = np.zeros(2 ** len(pv))
    for k in range(2 ** len(pv)):
        pstate = bits(k, len(pv))
        total, count = 0.0, 0
        for r in range(2 ** n):
            s = bits(r, n)
            if all(s[node] == pstate[a] for a, node in enumerate(pv)):
                on = rows[r, m]
                total += on if state[m] else 1 - on
                count += 1
        out[k] = total / count
    return out


def cause_repertoire(rows, state, mechanism, purview):
    pv = nodes(purview)
    if not pv:
        return np.array([1.0])
    if not mechanism:
        return np.full(2 ** len(pv), 0.5 ** len(pv))
    joint = np.ones(2 ** len(pv))
    for m in nodes(mechanism):
        joint = joint * cause_factor(rows, state, m, purview)
    return joint / joint.sum() if joint.sum() else joint


def bayes_inversion(rows, state, mechanism):
    """Posterior over full past states given the mechanism's current state, uniform prior."""
    rows = np.asarray(rows)
    n = rows.shape[1]
    like = np.ones(2 ** n)
    for r in range(2 ** n):
        for m in nodes(mechanism):
            like[r] *= rows[r, m] if state[m] else 1 - rows[r, m]
    return like / like.sum()


def effect_on(rows, state, mechanism, p):
    rows = np.asarray(rows)
    n = rows.shape[1]
    vals = [rows[r, p] for r in range(2 ** n)
            if all(bits(r, n)[m] == state[m] for m in nodes(mechanism))]
    return sum(vals) / len(vals)


def effect_repertoire(rows, state, mechanism, purview):
    pv = nodes(purview)
    out = np.ones(2 ** len(pv))
    for k in range(2 ** len(pv)):
        fut = bits(k, len(pv))
        for a, p in enumerate(pv):
            q = effect_on(rows, state, mechanism, p)
            out[k] *= q if fut[a] else 1 - q
    return out


def unordered_partitions(mechanism, purview):
    """Unordered pairs of nonempty (mechanism part, purview part) cells."""
    found = set()
    m_nodes, p_nodes = nodes(mechanism), nodes(purview)
    for m_pick in product((0, 1), repeat=len(m_nodes)):
        for p_pick in product((0, 1), repeat=len(p_nodes)):
            m1 = sum(1 << x for x, b in zip(m_nodes, m_pick) if b)
            p1 = sum(1 << x for x, b in zip(p_nodes, p_pick) if b)
            part1, part2 = (m1, p1), (mechanism & ~m1, purview & ~p1)
            if (part1[0] or part1[1]) and (part2[0] or part2[1]):
                found.add(frozenset([part1, part2]))
    return found


def joint(r1, p1, r2, p2):
    """Product distribution of two repertoires over disjoint purviews, on their union."""
    union = nodes(p1 | p2)
    out = np.zeros(2 ** len(union))
    for k in range(2 ** len(union)):
        s = dict(zip(union, bits(k, len(union))))
        out[k] = r1[index([s[x] for x in nodes(p1)])] * r2[index([s[x] for x in nodes(p2)])]
    return out


def partitioned(rows, state, part1, part2, direction):
    rep_fn = cause_repertoire if direction == "cause" else effect_repertoire
    r1 = rep_fn(rows, state, part1[0], part1[1])
    r2 = rep_fn(rows, state, part2[0], part2[1])
    return joint(r1, part1[1], r2, part2[1])


def mip_phi(rows, state, mechanism, purview, direction):
    rep_fn = cause_repertoire if direction == "cause" else effect_repertoire
    whole = rep_fn(rows, state, mechanism, purview)
    if not whole.any():
        return 0.0
    return min(lp_emd(whole, partitioned(rows, state, a, b, direction))
               for a, b in (tuple(pair) for pair in unordered_partitions(mechanism, purview)))


def cut_rows(rows, severed_from, severed_to):
    rows = np.asarray(rows, float)
    n = rows.shape[1]
    out = rows.copy()
    a_nodes = nodes(severed_from)
    for r in range(2 ** n):
        s = list(bits(r, n))
        for j in nodes(severed_to):
            vals = []
            for assign in product((0, 1), repeat=len(a_nodes)):
                t = list(s)
                for x, v in zip(a_nodes, assign):
                    t[x] = v
                vals.append(rows[index(t), j])
            out[r, j] = sum(vals) / len(vals)
    return out


def transport_cvx(supply, demand, cost):
    import cvxpy as cp

    plan = cp.Variable(cost.shape, nonneg=True)
    cons = [cp.sum(plan, axis=1) == supply, cp.sum(plan, axis=0) == demand]
    prob = cp.Problem(cp.Minimize(cp.sum(cp.multiply(cost, plan))), cons)
    prob.solve()
    return prob.value
