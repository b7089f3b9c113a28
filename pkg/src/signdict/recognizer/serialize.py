"""Binary model container.

Layout: 4-byte magic, little-endian u32 format version, u32 header
length, a JSON header (configs, class count, catalog fingerprint, loss
history, parameter manifest), then raw little-endian float32 parameter
data in manifest order. Writing the same trained model twice produces
identical bytes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch

from .augment import AugmentationConfig
from .network import SignNetwork
from .training import ModelConfig, TrainConfig, TrainedModel

MAGIC = b"SGNM"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when bytes do not decode to a supported model container."""


def save_model(model: TrainedModel, path: str | Path) -> None:
    state = model.network.state_dict()
    manifest = [[name, list(t.shape)] for name, t in state.items()]
    header = {
        "model_config": asdict(model.model_config),
        "train_config": asdict(model.train_config),
        "num_classes": model.num_classes,
        "catalog_fingerprint": model.catalog_fingerprint,
        "loss_history": model.loss_history,
        "params": manifest,
        "dtype": "float32",
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", FORMAT_VERSION, len(header_bytes)))
        f.write(header_bytes)
        for _, t in state.items():
            f.write(np.ascontiguousarray(t.detach().numpy(), dtype="<f4").tobytes())


def load_model(path: str | Path) -> TrainedModel:
    blob = Path(path).read_bytes()
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise ModelFormatError("not a recognizer model file")
    version, header_len = struct.unpack("<II", blob[4:12])
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    if len(blob) < 12 + header_len:
        raise ModelFormatError("model file truncated in header")
    try:
        header = json.loads(blob[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError("corrupt model header") from exc

    mc = dict(header["model_config"])
    mc["landmark_subset"] = tuple(mc["landmark_subset"])
    model_cfg = ModelConfig(**mc)
    tc = dict(header["train_config"])
    if tc.get("augmentation") is not None:
        tc["augmentation"] = AugmentationConfig(**tc["augmentation"])
    train_cfg = TrainConfig(**tc)

    net = SignNetwork(
        in_dim=2 * len(model_cfg.landmark_subset),
        hidden=model_cfg.hidden_dim,
        num_classes=header["num_classes"],
        num_layers=model_cfg.num_layers,
        num_heads=model_cfg.num_heads,
        max_frames=model_cfg.max_frames,
        dropout=model_cfg.dropout,
    )
    offset = 12 + header_len
    state = {}
    for name, shape in header["params"]:
        count = int(np.prod(shape)) if shape else 1
        end = offset + 4 * count
        if end > len(blob):
            raise ModelFormatError("model file truncated in parameter data")
        arr = np.frombuffer(blob[offset:end], dtype="<f4").reshape(shape)
        state[name] = torch.from_numpy(arr.copy())
        offset = end
    if offset != len(blob):
        raise ModelFormatError("trailing bytes after parameter data")
    net.load_state_dict(state)
    net.eval()
    return TrainedModel(
        network=net,
        model_config=model_cfg,
        train_config=train_cfg,
        num_classes=header["num_classes"],
        catalog_fingerprint=header["catalog_fingerprint"],
        loss_history=list(header["loss_history"]),
    )
