"""
How the node-count prior moves
==============================

Start with 30% of the sampling mass on 3 nodes and 70% on 4 nodes, and
watch the prior after each batch of five evaluations.
"""
from phiopt import SearchConfig, prior_guided_search

config = SearchConfig(3, 4, total_iters=40, batch_size=5, learning_rate=0.1,
                      initial_prior=(0.3, 0.7))
result = prior_guided_search(config)

for batch, prior in enumerate(result.prior_history):
    bar = "#" * round(40 * prior.theta[1])
    print(f"batch {batch:2d}  P(3) {prior.theta[0]:.3f}  P(4) {prior.theta[1]:.3f}  {bar}")

# a larger learning rate moves the prior faster
fast = prior_guided_search(SearchConfig(3, 4, 40, 5, learning_rate=1.0, initial_prior=(0.3, 0.7)))
print(f"\nmu = 1.0 ends at P(4) = {fast.prior_history[-1].theta[1]:.3f}")
print(f"best Phi found: {result.best_phi} (mu 0.1), {fast.best_phi} (mu 1.0)")
