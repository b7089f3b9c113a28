"""Model configuration, training loop, and inference entry points."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..catalog import VocabularyCatalog
from ..pose import PoseSequence
from .augment import AugmentationConfig, augment
from .features import DEFAULT_SUBSET, feature_dim, normalize
from .network import SignNetwork

log = logging.getLogger("signdict.recognizer")


@dataclass(frozen=True)
class ModelConfig:
    landmark_subset: tuple[int, ...] = DEFAULT_SUBSET
    hidden: int | None = None  # None -> 2 * |subset|
    num_layers: int = 6
    num_heads: int = 9
    max_frames: int = 204
    dropout: float = 0.0

    @property
    def hidden_dim(self) -> int:
        return self.hidden if self.hidden is not None else feature_dim(self.landmark_subset)

    def __post_init__(self):
        if not self.landmark_subset:
            raise ValueError("landmark_subset must be non-empty")
        if self.num_layers < 1 or self.num_heads < 1 or self.max_frames < 1:
            raise ValueError("layers, heads, and max_frames must be positive")
        if self.hidden_dim % self.num_heads != 0:
            raise ValueError(
                f"hidden dim {self.hidden_dim} not divisible by {self.num_heads} heads"
            )


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 1e-3
    batch_size: int = 128
    plateau_factor: float = 0.1
    plateau_patience: int = 5
    seed: int = 0
    augmentation: AugmentationConfig | None = field(default_factory=AugmentationConfig)

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate <= 0 or not (0 < self.plateau_factor < 1):
            raise ValueError("bad optimizer settings")


@dataclass
class Distribution:
    """Class-probability vector aligned with catalog class indices."""

    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1 or len(self.probs) < 1:
            raise ValueError("probs must be a non-empty vector")
        if np.min(self.probs) < 0 or not np.isclose(self.probs.sum(), 1.0, atol=1e-6):
            raise ValueError("probs must be non-negative and sum to 1")

    def top(self) -> int:
        return int(np.argmax(self.probs))


@dataclass
class TrainedModel:
    network: SignNetwork
    model_config: ModelConfig
    train_config: TrainConfig
    num_classes: int
    catalog_fingerprint: str
    loss_history: list[float]

    def matches_catalog(self, catalog: VocabularyCatalog) -> bool:
        return (
            self.num_classes == len(catalog)
            and self.catalog_fingerprint == catalog.fingerprint()
        )


def _as_coords(data) -> np.ndarray:
    if isinstance(data, PoseSequence):
        return data.data
    arr = np.asarray(data)
    if arr.ndim != 3:
        raise ValueError(f"expected (T, 75, C) coords, got shape {arr.shape}")
    return arr


def _fit_length(feats: np.ndarray, max_frames: int) -> np.ndarray:
    # uniform temporal resampling for clips longer than the model window
    t = feats.shape[0]
    if t <= max_frames:
        return feats
    idx = np.linspace(0, t - 1, max_frames).round().astype(np.int64)
    return feats[idx]


def train(
    coords: np.ndarray,
    labels: np.ndarray,
    catalog: VocabularyCatalog,
    model_cfg: ModelConfig | None = None,
    train_cfg: TrainConfig | None = None,
    progress_cb=None,
) -> TrainedModel:
    """Train a classifier over catalog classes on (N, T, 75, C) samples.

    Shuffling, augmentation, and weight init all derive from
    train_cfg.seed, so a fixed machine reproduces runs bit for bit.
    """
    model_cfg = model_cfg or ModelConfig()
    train_cfg = train_cfg or TrainConfig()
    coords = np.asarray(coords)
    labels = np.asarray(labels, dtype=np.int64)
    if coords.ndim != 4 or coords.shape[0] != labels.shape[0]:
        raise ValueError(f"bad dataset shapes {coords.shape} / {labels.shape}")
    if coords.shape[1] > model_cfg.max_frames:
        raise ValueError(
            f"training clips have {coords.shape[1]} frames > max_frames {model_cfg.max_frames}"
        )
    if labels.min() < 0 or labels.max() >= len(catalog):
        raise ValueError("labels out of catalog range")

    torch.manual_seed(train_cfg.seed)
    net = SignNetwork(
        in_dim=feature_dim(model_cfg.landmark_subset),
        hidden=model_cfg.hidden_dim,
        num_classes=len(catalog),
        num_layers=model_cfg.num_layers,
        num_heads=model_cfg.num_heads,
        max_frames=model_cfg.max_frames,
        dropout=model_cfg.dropout,
    )
    opt = torch.optim.Adam(net.parameters(), lr=train_cfg.learning_rate)
    sched = torch.optim.lr_scheduler.ReduceLROnPlateau(
        opt, mode="min", factor=train_cfg.plateau_factor, patience=train_cfg.plateau_patience
    )
    loss_fn = nn.CrossEntropyLoss()
    rng = np.random.default_rng(train_cfg.seed)
    n = coords.shape[0]
    xy = coords[:, :, :, :2].astype(np.float64)
    history: list[float] = []

    net.train()
    for epoch in range(train_cfg.epochs):
        started = time.monotonic()
        order = rng.permutation(n)
        total, seen = 0.0, 0
        for lo in range(0, n, train_cfg.batch_size):
            idx = order[lo : lo + train_cfg.batch_size]
            feats = np.empty(
                (len(idx), coords.shape[1], feature_dim(model_cfg.landmark_subset)),
                dtype=np.float32,
            )
            for j, i in enumerate(idx):
                track = xy[i]
                if train_cfg.augmentation is not None:
                    track = augment(track, train_cfg.augmentation, rng)
                feats[j] = normalize(track, model_cfg.landmark_subset)
            x = torch.from_numpy(feats)
            y = torch.from_numpy(labels[idx])
            opt.zero_grad()
            loss = loss_fn(net(x), y)
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(idx)
            seen += len(idx)
        epoch_loss = total / seen
        history.append(epoch_loss)
        sched.step(epoch_loss)
        lr = opt.param_groups[0]["lr"]
        log.info(
            "epoch %d/%d loss %.4f lr %.2g (%.1fs)",
            epoch + 1, train_cfg.epochs, epoch_loss, lr, time.monotonic() - started,
        )
        if progress_cb is not None:
            progress_cb(epoch + 1, train_cfg.epochs, epoch_loss)

    net.eval()
    return TrainedModel(
        network=net,
        model_config=model_cfg,
        train_config=train_cfg,
        num_classes=len(catalog),
        catalog_fingerprint=catalog.fingerprint(),
        loss_history=history,
    )


def predict_batch(model: TrainedModel, coords: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """Probabilities for (N, T, 75, C) samples as an (N, classes) array."""
    coords = np.asarray(coords)
    if coords.ndim != 4:
        raise ValueError(f"expected (N, T, 75, C) coords, got {coords.shape}")
    cfg = model.model_config
    out = np.empty((coords.shape[0], model.num_classes), dtype=np.float64)
    model.network.eval()
    with torch.no_grad():
        for lo in range(0, coords.shape[0], batch_size):
            chunk = coords[lo : lo + batch_size]
            feats = np.stack(
                [
                    _fit_length(normalize(c, cfg.landmark_subset), cfg.max_frames)
                    for c in chunk
                ]
            )
            logits = model.network(torch.from_numpy(feats))
            out[lo : lo + chunk.shape[0]] = torch.softmax(logits, dim=1).numpy()
    return out


def predict(model: TrainedModel, sample: PoseSequence | np.ndarray) -> Distribution:
    """Class distribution for a single clip."""
    coords = _as_coords(sample)
    probs = predict_batch(model, coords[None, ...])
    return Distribution(probs[0])
