"""Freeze reference Phi for random networks under a random node relabeling.

Requires PyPhi 1.2.  Usage: python tools/make_relabel_golden.py OUT.json
"""
import json
import sys

import numpy as np
import pyphi

from make_golden import first_reachable

pyphi.config.PROGRESS_BARS = False
pyphi.config.PARALLEL_CONCEPT_EVALUATION = False
pyphi.config.PARALLEL_CUT_EVALUATION = False
pyphi.config.CACHE_SIAS = False


def relabel(rows, state, perm):
    """New node k is old node perm[k]."""
    n = rows.shape[1]
    new = np.empty_like(rows)
    inv = [perm.index(i) for i in range(n)]
    for r in range(2 ** n):
        s = [(r >> i) & 1 for i in range(n)]
        old = sum(s[inv[i]] << i for i in range(n))
        new[r] = rows[old][perm]
    return new, tuple(state[p] for p in perm)


def phi(rows, state):
    return pyphi.compute.phi(pyphi.Subsystem(pyphi.Network(rows), state))


def main(path):
    rng = np.random.default_rng(777)
    pairs = []
    for n, count in ((3, 40), (4, 4)):
        for _ in range(count):
            rows = rng.integers(0, 2, size=(2 ** n, n)).astype(float)
            state = first_reachable(pyphi.Network(rows), n)
            perm = [int(p) for p in rng.permutation(n)]
            rows2, state2 = relabel(rows, state, perm)
            pairs.append({
                "tpm": rows.astype(int).tolist(), "state": list(state), "big_phi": phi(rows, state),
                "perm": perm, "tpm_relabeled": rows2.astype(int).tolist(),
                "state_relabeled": list(state2), "big_phi_relabeled": phi(rows2, state2),
            })
            print(pairs[-1]["big_phi"], pairs[-1]["big_phi_relabeled"], flush=True)
    with open(path, "w") as fh:
        json.dump({"reference": f"pyphi {pyphi.__version__}", "pairs": pairs}, fh, indent=1)


if __name__ == "__main__":
    main(sys.argv[1])
