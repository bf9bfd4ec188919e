"""
The :mod:`regularizers` module implements the sparsity mechanisms of the
representation layer: (Set-)KL distributional penalties, l1/l2 penalties,
dropout, k-sparse and winner-take-all truncation.
"""
from .divergences import (
    skl_exponential,
    skl_exponential_grad,
    kl_exponential,
    kl_exponential_grad,
    kl_bernoulli,
    kl_bernoulli_grad,
    skl_bernoulli,
    skl_bernoulli_grad,
    kl_exponential_quadrature,
    ExponentialFamily,
    EXPONENTIAL,
    BERNOULLI,
    bregman_kl,
    set_kl,
)
from .masks import (
    ksparse_indicator,
    ksparse_mask,
    wta_indicator,
    wta_mask,
    dropout_mask,
    ksparse_schedule,
)
from .penalties import (
    RegularizerKind,
    RegularizerSpec,
    NodeStatistics,
    activation_penalty,
    weight_penalty,
    distributional_penalty,
    RepresentationRegularizer,
    inference_sparsifier,
)

__all__ = [
    "skl_exponential",
    "skl_exponential_grad",
    "kl_exponential",
    "kl_exponential_grad",
    "kl_bernoulli",
    "kl_bernoulli_grad",
    "skl_bernoulli",
    "skl_bernoulli_grad",
    "kl_exponential_quadrature",
    "ExponentialFamily",
    "EXPONENTIAL",
    "BERNOULLI",
    "bregman_kl",
    "set_kl",
    "ksparse_indicator",
    "ksparse_mask",
    "wta_indicator",
    "wta_mask",
    "dropout_mask",
    "ksparse_schedule",
    "RegularizerKind",
    "RegularizerSpec",
    "NodeStatistics",
    "activation_penalty",
    "weight_penalty",
    "distributional_penalty",
    "RepresentationRegularizer",
    "inference_sparsifier",
]
