"""Freeze reference Phi values for the oracle-equivalence corpus.

Requires PyPhi 1.2 (not a package dependency). Run with an interpreter that has
it installed:

    python tools/make_golden.py tests/data/pyphi_golden.json
"""
import json
import sys
import time

import numpy as np
import pyphi

pyphi.config.PROGRESS_BARS = False
pyphi.config.PARALLEL_CONCEPT_EVALUATION = False
pyphi.config.PARALLEL_CUT_EVALUATION = False
pyphi.config.PARALLEL_COMPLEX_EVALUATION = False
pyphi.config.CACHE_SIAS = False
pyphi.config.CACHE_REPERTOIRES = True
pyphi.config.WELCOME_OFF = True


def first_reachable(net, n):
    for idx in range(2 ** n):
        state = tuple((idx >> i) & 1 for i in range(n))
        try:
            pyphi.Subsystem(net, state)
        except pyphi.exceptions.StateUnreachableError:
            continue
        return state
    return None


def derive_cm(tpm):
    n = tpm.shape[1]
    rows = np.arange(2 ** n)
    cm = np.zeros((n, n), dtype=int)
    for i in range(n):
        cm[i] = (tpm[rows] != tpm[rows ^ (1 << i)]).any(axis=0)
    return cm


def record(name, tpm, state=None):
    tpm = np.asarray(tpm, dtype=float)
    n = tpm.shape[1]
    net = pyphi.Network(tpm)
    if state is None:
        state = first_reachable(net, n)
    t0 = time.time()
    sub = pyphi.Subsystem(net, state)
    phi = pyphi.compute.phi(sub)
    elapsed = time.time() - t0
    ces = pyphi.compute.ces(sub)
    # Same value must come out when the connectivity matrix is supplied.
    net_cm = pyphi.Network(tpm, cm=derive_cm(tpm))
    phi_cm = pyphi.compute.phi(pyphi.Subsystem(net_cm, state))
    concepts = [
        {
            "mechanism": list(c.mechanism),
            "phi": c.phi,
            "cause_phi": c.cause.phi,
            "effect_phi": c.effect.phi,
            "cause_purview": list(c.cause.purview),
            "effect_purview": list(c.effect.purview),
        }
        for c in ces
    ]
    print(f"{name}: D={n} state={state} phi={phi} phi_cm={phi_cm} "
          f"({elapsed:.1f}s)", flush=True)
    return {
        "name": name,
        "nodes": n,
        "tpm": tpm.astype(int).tolist() if np.all((tpm == 0) | (tpm == 1)) else tpm.tolist(),
        "state": list(state),
        "big_phi": phi,
        "big_phi_with_cm": phi_cm,
        "concepts": concepts,
    }


def main(path):
    cases = []
    cases.append(record("basic_network", pyphi.examples.basic_network().tpm.reshape(8, 3, order="F"), (1, 0, 0)))
    cases.append(record("swap2", [[0, 0], [0, 1], [1, 0], [1, 1]], (1, 0)))
    cases.append(record("identity3", [[(r >> j) & 1 for j in range(3)] for r in range(8)]))
    rng = np.random.default_rng(2024)
    for k in range(25):
        cases.append(record(f"rand3_{k:02d}", rng.integers(0, 2, size=(8, 3))))
    rng = np.random.default_rng(4048)
    for k in range(12):
        cases.append(record(f"rand4_{k:02d}", rng.integers(0, 2, size=(16, 4))))
    payload = {
        "reference": f"pyphi {pyphi.__version__}",
        "config": {
            "MEASURE": pyphi.config.MEASURE,
            "PARTITION_TYPE": pyphi.config.PARTITION_TYPE,
            "PRECISION": pyphi.config.PRECISION,
            "SYSTEM_CUTS": pyphi.config.SYSTEM_CUTS,
        },
        "state_rule": "first reachable state in ascending little-endian index",
        "cases": cases,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


if __name__ == "__main__":
    main(sys.argv[1])
