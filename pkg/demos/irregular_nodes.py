"""
Irregular identifiers and the separation condition
==================================================

Jittered impulse positions still identify the operator as long as the
exponentials at those positions form a frame and consecutive impulses are
at least the temporal support apart.  When two impulses come too close, an
operator exists that the train cannot see.
"""

import numpy as np

from opsample import (
    DeltaTrain,
    ExponentialFrame,
    apply_train,
    beurling_density,
    frame_bound_curve,
    hs_norm,
    kadec_check,
    kadec_train,
    random_operator,
    reconstruct_irregular,
    separation_counterexample,
)
from opsample.model import aligned_grid

# Nodes k + 0.2 sin(2.7 k) deviate from the integers by less than 1/4.
train = kadec_train(1.0, lambda k: 0.2 * np.sin(2.7 * k), (-64, 63))
print(kadec_check(train.nodes, 1.0))
print("density at h=100:", beurling_density(train.nodes, [100]).D_minus)

# Gram eigenvalues of central sections; the bounds spread as sections grow.
for size, A, B in frame_bound_curve(ExponentialFrame(train.nodes, 0.95), [16, 32, 64, 128]):
    print(f"section {int(size):4d}: A={A:.3e} B={B:.3f}")

# Bandwidth 0.95, temporal support 0.5 < min node gap 0.6.
model = random_operator(1 / 0.95, 0.5, (-32, 32), 32, seed=3)
out = apply_train(model, train, train.nodes)
rep = reconstruct_irregular(out, train.nodes, 0.5, 0.95, section=128, truth=model)
print("irregular max error:", rep.max_error, "rho:", rep.regularization)

# Two nodes only 0.5 apart with temporal support 1: build an invisible operator.
nodes = np.concatenate([-np.arange(16, 0, -1.0), [0.0, 0.5], 0.5 + np.arange(1, 15.0)])
w = np.ones(nodes.size)
ghost = separation_counterexample(nodes, w, 16, 1.0)
y = apply_train(ghost, DeltaTrain(nodes, w, np.zeros(nodes.size, int)), nodes,
                base_grid=aligned_grid(1 / 64, 1.0))
print("ghost HS norm:", hs_norm(ghost), "max output:", np.abs(y.values).max())
