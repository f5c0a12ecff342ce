"""
Phi of a small logic network
============================

Three nodes: A = OR(B, C), B = AND(A, C), C = XOR(A, B).  We compute the
concepts of the network in state A=1, B=0, C=0 and its big Phi.
"""
import numpy as np

from phiopt import big_phi, derive_cm, members, validate_tpm

# state-by-node TPM; row r is the current state with node 0 as the lowest bit
tpm = validate_tpm([
    [0, 0, 0], [0, 0, 1], [1, 0, 1], [1, 0, 0],
    [1, 1, 0], [1, 1, 1], [1, 1, 1], [1, 1, 0],
])
print("connectivity (row -> column):")
print(derive_cm(tpm))

result = big_phi(tpm, (1, 0, 0))
names = "ABC"


def label(mask):
    return "".join(names[i] for i in members(mask)) or "-"


# each concept: a mechanism, its core cause and effect purviews, and small phi
print(f"\n{'mechanism':>9}  {'phi':>8}  cause  effect")
for c in result.constellation.concepts:
    print(f"{label(c.mechanism):>9}  {c.phi:8.6f}  {label(c.cause.purview):>5}  {label(c.effect.purview):>6}")

cut = result.mip_cut
print(f"\nBig Phi = {result.big_phi}")
print(f"weakest link: cutting {label(cut.severed_from)} -> {label(cut.severed_to)}")

# a network of two disconnected halves integrates nothing
split = np.array([[(r >> i) & 1 for i in range(3)] for r in range(8)], dtype=float)
print("\nidentity network Phi =", big_phi(split, (0, 0, 0)).big_phi)
