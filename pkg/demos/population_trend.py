"""
Does Phi grow with network size?
================================

Draw random binary networks with 3 and 4 nodes, evaluate Phi at the first
reachable state and compare the group means with Welch's t-test.
"""
import sys

from phiopt import sample_population, welch_t_test

size = int(sys.argv[1]) if len(sys.argv) > 1 else 60

groups = {}
for n in (3, 4):
    groups[n] = sample_population(n, size, seed=20240101)
    g = groups[n]
    print(f"{n} nodes: mean Phi {g.mean:.4f}, 95% CI [{g.ci95[0]:.4f}, {g.ci95[1]:.4f}], "
          f"infeasible {100 * g.infeasible_rate:.1f}%")

report = welch_t_test(groups[3].phi_values, groups[4].phi_values)
print(f"\nt = {report.t_statistic:.3f}, dof = {report.dof:.1f}, p = {report.p_value:.2e}")
print("reject equal means at 0.01" if report.rejects(0.01) else "cannot reject at 0.01")
