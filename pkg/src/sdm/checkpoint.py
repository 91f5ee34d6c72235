"""Checkpoint archive: config echo plus named weight arrays in one npz."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .encoding.config import EncoderConfig
from .net import SdmNet

CKPT_VERSION = "sdm-ckpt-1"


class CheckpointError(Exception):
    pass


def save_checkpoint(path, net: torch.nn.Module, config: EncoderConfig,
                    extra: dict | None = None) -> None:
    meta = {"version": CKPT_VERSION, "config": config.to_dict()}
    if extra:
        meta.update(extra)
    arrays = {f"w/{k}": v.detach().cpu().numpy() for k, v in net.state_dict().items()}
    arrays["__meta__"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"),
                                       dtype=np.uint8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path):
    """Returns (meta dict, {param name: array})."""
    try:
        with np.load(path) as z:
            if "__meta__" not in z:
                raise CheckpointError(f"{path}: not a checkpoint archive")
            meta = json.loads(bytes(z["__meta__"]).decode("utf-8"))
            arrays = {k[2:]: z[k] for k in z.files if k.startswith("w/")}
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if meta.get("version") != CKPT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {meta.get('version')!r}")
    return meta, arrays


def restore_net(path) -> tuple[SdmNet, dict]:
    """Rebuild an SdmNet from an archive; shape mismatches raise."""
    meta, arrays = load_checkpoint(path)
    config = EncoderConfig.from_dict(meta["config"])
    net = SdmNet(config)
    state = {k: torch.from_numpy(v.copy()) for k, v in arrays.items()}
    try:
        net.load_state_dict(state)
    except RuntimeError as exc:
        raise CheckpointError(f"checkpoint incompatible with config: {exc}") from exc
    net.eval()
    return net, meta
