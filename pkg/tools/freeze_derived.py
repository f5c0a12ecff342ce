"""Freeze derived expected values used by the test suite.

Everything here is computed without phiopt: Welch statistics in exact
rational arithmetic with mpmath tail probabilities, and grid integers in
plain integer arithmetic.  Usage: python tools/freeze_derived.py OUT.json
"""
import json
import sys
from fractions import Fraction

import mpmath

mpmath.mp.dps = 40

# Two-sample fixture (Welch's test example in common textbooks/encyclopedias).
WELCH_A = [27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4]
WELCH_B = [27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4]
# Second fixture with unequal sizes and variances.
WELCH_C = [19.8, 20.4, 19.6, 17.8, 18.5, 18.9, 18.3, 18.9, 19.5, 22.0]
WELCH_D = [28.2, 26.6, 20.1, 23.3, 25.2, 22.1, 17.7, 27.6, 20.6, 13.7, 23.2, 17.5, 20.6, 18.0, 23.9,
           21.6, 24.3, 20.4, 23.9, 13.3]


def welch(a, b):
    a = [Fraction(str(x)) for x in a]
    b = [Fraction(str(x)) for x in b]
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1) / na
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1) / nb
    mp = lambda f: mpmath.mpf(f.numerator) / f.denominator
    t = mp(ma - mb) / mpmath.sqrt(mp(va + vb))
    dof = mp((va + vb) ** 2 / (va ** 2 / (na - 1) + vb ** 2 / (nb - 1)))
    # two-sided tail of Student's t by direct numerical integration of the density
    dens = lambda x: mpmath.gamma((dof + 1) / 2) / (mpmath.sqrt(dof * mpmath.pi) * mpmath.gamma(dof / 2)) \
        * (1 + x * x / dof) ** (-(dof + 1) / 2)
    p = 2 * mpmath.quad(dens, [abs(t), mpmath.inf])
    return {"t": float(t), "dof": float(dof), "p": float(p)}


def grid_integers(n, total):
    top = 2 ** (2 ** n * n) - 1
    if total == 1:
        return [0]
    return [int(Fraction(k * top, total - 1) + Fraction(1, 2)) for k in range(total)]


def main(path):
    data = {
        "welch_fixture_1": {"a": WELCH_A, "b": WELCH_B, **welch(WELCH_A, WELCH_B)},
        "welch_fixture_2": {"a": WELCH_C, "b": WELCH_D, **welch(WELCH_C, WELCH_D)},
        "grid_d1_t4": grid_integers(1, 4),
        "grid_d2_t7": grid_integers(2, 7),
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
    print(json.dumps(data, indent=1))


if __name__ == "__main__":
    main(sys.argv[1])
