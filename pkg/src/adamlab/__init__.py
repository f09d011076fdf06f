"""adamlab: a laboratory for adaptive sign-based optimizers.

Core pieces: normalized moving averages and schedules (:mod:`adamlab.core`),
the optimizer direction maps (:mod:`adamlab.optim`), numeric checkers for
their closed-form identities (:mod:`adamlab.identities`), the online Gaussian
mean/variance estimator with an independent oracle (:mod:`adamlab.vi`), a
block-rotated quadratic benchmark (:mod:`adamlab.quadbench`), a signal-filter
view of the direction maps (:mod:`adamlab.filters`), and a CLI harness
(:mod:`adamlab.cli`).
"""

from .core import (
    ClipConfig,
    EmaBuffer,
    InitMode,
    Schedule,
    beta_grid,
    bias_correct,
    cclip,
    ema_update,
    gclip,
    lr_at,
)
from .optim import (
    EpsilonPlacement,
    OptimizerConfig,
    OptimizerKind,
    OptimizerState,
    UpdateTrace,
    apply_step,
    delta_estimate,
    direction,
    init_state,
    trace_step,
)

__version__ = "0.1.0"

__all__ = [
    "ClipConfig",
    "EmaBuffer",
    "EpsilonPlacement",
    "InitMode",
    "OptimizerConfig",
    "OptimizerKind",
    "OptimizerState",
    "Schedule",
    "UpdateTrace",
    "apply_step",
    "beta_grid",
    "bias_correct",
    "cclip",
    "delta_estimate",
    "direction",
    "ema_update",
    "gclip",
    "init_state",
    "lr_at",
    "trace_step",
    "__version__",
]
