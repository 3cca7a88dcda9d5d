"""Tucker decomposition by Riemannian preconditioned coordinate descent."""

from .algorithms import (
    ConvergenceTrace,
    DecomposeConfig,
    DivergenceError,
    TraceRecord,
    TuckerModel,
    core_of,
    decompose,
    euclid_cd,
    hooi,
    hosvd,
    init_factors,
    reconstruct,
    rel_error_exact,
    rel_error_fast,
    rpcd,
    rpcd_plus,
    rpcd_step,
    st_hosvd,
)
from .linalg import NumericalError, RankDeficientError
from .synth import SynthSpec, gen_lowrank, gen_noisy
from .tensor import (
    DenseTensor,
    fold,
    frobenius_norm,
    inner,
    mode_product,
    multi_mode_product_except,
    unfold,
)

__all__ = [
    "ConvergenceTrace",
    "DecomposeConfig",
    "DenseTensor",
    "DivergenceError",
    "NumericalError",
    "RankDeficientError",
    "SynthSpec",
    "TraceRecord",
    "TuckerModel",
    "core_of",
    "decompose",
    "euclid_cd",
    "fold",
    "frobenius_norm",
    "gen_lowrank",
    "gen_noisy",
    "hooi",
    "hosvd",
    "init_factors",
    "inner",
    "mode_product",
    "multi_mode_product_except",
    "reconstruct",
    "rel_error_exact",
    "rel_error_fast",
    "rpcd",
    "rpcd_plus",
    "rpcd_step",
    "st_hosvd",
    "unfold",
]
