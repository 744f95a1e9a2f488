"""
Identifying an operator with one delta train
============================================

A band-limited time-varying operator is fed a train of equally spaced
impulses.  Because the impulse response has short temporal support, the
responses to neighbouring impulses do not overlap, and the single output
determines the whole operator.
"""

import numpy as np

from opsample import (
    apply_train,
    hs_norm,
    make_filter,
    random_operator,
    reconstruct_uniform,
    uniform_train,
    verify_norm_identity_uniform,
)

# A random operator: bandwidth 1, temporal support 1, 129 sinc columns.
model = random_operator(1.0, 1.0, (-64, 64), 64, seed=1)
print("HS norm:", hs_norm(model))

# Probe with sum_k delta_k and read the output on t_i + n.
out = apply_train(model, uniform_train(1.0, (-70, 70)), np.arange(-64, 65))

# Critical sampling: the filter is a plain sinc and recovery is exact.
rep = reconstruct_uniform(out, 1.0, 1.0, make_filter(1.0, 1.0), truth=model, trim=0)
print("critical max error:", rep.max_error)
print("norm identity residual:", verify_norm_identity_uniform(model, out, 1.0).residual)

# Oversampling: bandwidth 0.8 sampled at rate 1 with a trapezoid filter.
# The filter decays faster than sinc, so longer sample records help quickly.
wide = random_operator(1.25, 1.0, (-64, 64), 8, seed=2)
filt = make_filter(1.0, 0.8)
for pad in (16, 32, 64, 128):
    n = np.arange(-80 - pad, 81 + pad)
    y = apply_train(wide, uniform_train(1.0, (n[0] - 2, n[-1] + 1)), n)
    err = reconstruct_uniform(y, 1.0, 1.0, filt, truth=wide).max_error
    print(f"pad {pad:4d}: interior max error {err:.2e}")
