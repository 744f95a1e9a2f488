"""
Several channels instead of one
===============================

An operator whose temporal support exceeds the impulse spacing can still be
identified if it is probed several times with differently weighted or
shifted trains.
"""

import numpy as np

from opsample import (
    multichannel_outputs,
    pns_general_reconstruct,
    pns_two_channel_reconstruct,
    random_operator,
    reconstruct_multichannel_dft,
    reconstruct_multichannel_general,
)
from opsample.multichannel import (
    derivative_outputs,
    derivative_two_channel_reconstruct,
    pns_outputs,
    random_mixing_coefficients,
)

# Four DFT-weighted trains on the grid n/2 for bandwidth 2, support 2.
model = random_operator(0.5, 2.0, (-32, 32), 16, seed=4)
outs = multichannel_outputs(model, 2, 2)
rep = reconstruct_multichannel_dft(outs, 2, 2, truth=model)
print("DFT channels: error", rep.max_error, "norm residual", rep.norm_residual)

# Any periodic weights work if every mixing matrix is invertible.
c = random_mixing_coefficients(2, 2, seed=4)
rep = reconstruct_multichannel_general(multichannel_outputs(model, 2, 2, c), c, 2, 2, truth=model)
print("general mixing: error", rep.max_error, "condition", rep.condition)

# Two interleaved trains delta_{2k} and delta_{2k+0.37}.
m2 = random_operator(1.0, 2.0, (-32, 32), 8, seed=5)
for pad in (256, 2048):
    outs = pns_outputs(m2, (0.0, 0.37), 2.0, pad)
    a = pns_two_channel_reconstruct(outs, 0.37, truth=m2)
    b = pns_general_reconstruct(outs, (0.0, 0.37), 1, 2, truth=m2)
    print(f"pad {pad}: closed form {a.max_error:.2e}, polyphase {b.max_error:.2e}")

# Values and x-derivatives at the even integers.
o0, o1 = derivative_outputs(m2, 2048)
print("derivative sampling:", derivative_two_channel_reconstruct(o0, o1, truth=m2).max_error)
