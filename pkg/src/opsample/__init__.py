"""Sampling and identification of band-limited time-varying operators."""

from .errors import PreconditionError, SingularSystemError
from .identifiers import (
    DeltaTrain,
    derivative_train,
    dft_train,
    kadec_train,
    load_train,
    periodic_nonuniform_train,
    save_train,
    uniform_train,
)
from .irregular import (
    DensityReport,
    ExponentialFrame,
    beurling_density,
    dual_solve,
    frame_bound_curve,
    frame_bounds,
    kadec_check,
    reconstruct_irregular,
    sampling_bounds,
    separation_counterexample,
)
from .model import (
    HaarModel,
    OperatorModel,
    SampledOutput,
    TimeGrid,
    aligned_grid,
    apply_train,
    eval_eta,
    eval_h,
    eval_sigma,
    hs_norm,
    load_model,
    load_output,
    random_haar_operator,
    random_operator,
    save_model,
    save_output,
)
from .multichannel import (
    MixingMatrix,
    derivative_two_channel_reconstruct,
    dft_mixing_matrix,
    multichannel_outputs,
    pns_general_reconstruct,
    pns_two_channel_reconstruct,
    reconstruct_multichannel_dft,
    reconstruct_multichannel_general,
)
from .report import ReconReport
from .uniform import (
    Filter,
    WindowFunction,
    haar_reconstruct,
    make_filter,
    reconstruct_uniform,
    verify_norm_identity_uniform,
    wks_reconstruct,
)

__version__ = "0.1.0"
