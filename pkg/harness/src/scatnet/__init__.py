"""Two-network learned surrogate for split-profile scattering."""

from .data import DatasetInfo, ScatterDataset, load_info, train_test_split
from .eval import predict_and_eval, relative_error
from .model import CascadeModel, ScatteringLift, UNet2d
from .pairs import PairConfig
from .train import (
    TrainConfig,
    build_model,
    cascade_losses,
    frobenius_batch_loss,
    overfit_single_sample,
    set_determinism,
    train,
)

__version__ = "0.1.0"
