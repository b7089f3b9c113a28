from .augment import AugmentationConfig, augment
from .features import DEFAULT_SUBSET, TORSO_LANDMARKS, normalize
from .network import SignNetwork
from .serialize import ModelFormatError, load_model, save_model
from .training import (
    Distribution,
    ModelConfig,
    TrainConfig,
    TrainedModel,
    predict,
    predict_batch,
    train,
)

__all__ = [
    "AugmentationConfig",
    "augment",
    "DEFAULT_SUBSET",
    "TORSO_LANDMARKS",
    "normalize",
    "SignNetwork",
    "ModelFormatError",
    "load_model",
    "save_model",
    "Distribution",
    "ModelConfig",
    "TrainConfig",
    "TrainedModel",
    "predict",
    "predict_batch",
    "train",
]
