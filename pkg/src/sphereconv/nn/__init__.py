from .checkpoint import (
    CheckpointChecksumError,
    CheckpointFormatError,
    load_checkpoint,
    restore_parameters,
    save_checkpoint,
)
from .core import Parameter, Tensor, check_unique_names
from .gradcheck import numeric_gradient, sampled_gradient_error
from .layers import (
    AvgPool2x2,
    BilinearUpsample2x,
    Conv2d,
    ReLU,
    SubpixelUpsample2x,
    concat_channels,
    pad_wrap_replicate,
    pad_wrap_replicate_adjoint,
    split_channels,
)
from .losses import berhu_loss, berhu_loss_grad, latent_match_loss_grad
from .optim import Adam

__all__ = [
    "Adam",
    "AvgPool2x2",
    "BilinearUpsample2x",
    "CheckpointChecksumError",
    "CheckpointFormatError",
    "Conv2d",
    "Parameter",
    "ReLU",
    "SubpixelUpsample2x",
    "Tensor",
    "berhu_loss",
    "berhu_loss_grad",
    "check_unique_names",
    "concat_channels",
    "latent_match_loss_grad",
    "load_checkpoint",
    "numeric_gradient",
    "pad_wrap_replicate",
    "pad_wrap_replicate_adjoint",
    "restore_parameters",
    "sampled_gradient_error",
    "save_checkpoint",
    "split_channels",
]
