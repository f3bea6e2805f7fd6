"""Model configuration, training schedule and the JSON config file."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..errors import ConfigError

SOURCES = ("form", "upos")


class UnknownKey(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


@dataclass(frozen=True)
class Channel:
    """One input embedding table: its vocabulary source and width."""

    source: str
    dim: int


@dataclass(frozen=True)
class ModelConfig:
    channels: tuple[Channel, ...] = (Channel("form", 256),)
    lstm_layers: int = 2
    lstm_dim: int = 256
    head_hidden_dim: int = 2048
    qk_dim: int = 512
    case_fold: bool = False
    seed: int = 42

    def __post_init__(self):
        if not self.channels:
            raise ConfigError("at least one input channel is required")
        for ch in self.channels:
            if ch.source not in SOURCES:
                raise ConfigError(f"channel source must be one of {SOURCES}, got {ch.source!r}")
            if ch.dim < 1:
                raise ConfigError(f"channel dim must be >= 1, got {ch.dim}")
        if self.lstm_layers < 0:
            raise ConfigError("lstm_layers must be >= 0")
        for name in ("lstm_dim", "head_hidden_dim", "qk_dim"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    @property
    def use_gold_upos(self) -> bool:
        return any(ch.source == "upos" for ch in self.channels)

    @property
    def input_dim(self) -> int:
        return sum(ch.dim for ch in self.channels)

    @property
    def encoder_dim(self) -> int:
        return 2 * self.lstm_dim if self.lstm_layers else self.input_dim

    def to_dict(self) -> dict:
        d = asdict(self)
        d["channels"] = [asdict(ch) for ch in self.channels]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        if "channels" in d:
            d["channels"] = tuple(Channel(**ch) for ch in d["channels"])
        return cls(**d)


@dataclass(frozen=True)
class TrainSchedule:
    frozen_epochs: int = 10
    frozen_lr: float = 1e-3
    main_epochs: int = 30
    batches_per_epoch: int = 1000
    batch_size: int = 32
    peak_lr: float = 2e-5
    warmup_epochs: int = 2

    def __post_init__(self):
        for name in ("frozen_epochs", "main_epochs", "batches_per_epoch", "batch_size", "warmup_epochs"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.warmup_epochs > self.main_epochs:
            raise ConfigError("warmup_epochs cannot exceed main_epochs")
        if self.frozen_lr <= 0 or self.peak_lr <= 0:
            raise ConfigError("learning rates must be positive")

    @property
    def main_steps(self) -> int:
        return self.main_epochs * self.batches_per_epoch

    @property
    def warmup_steps(self) -> int:
        return self.warmup_epochs * self.batches_per_epoch

    def lr(self, step: int) -> float:
        """Fine-tuning learning rate at batch ``step`` (0-based).

        Linear from 0 to ``peak_lr`` over the warmup batches, then a cosine
        decay that reaches exactly 0 on the final batch.
        """
        warmup, last = self.warmup_steps, self.main_steps - 1
        if step < warmup:
            return self.peak_lr * step / warmup
        if last <= warmup:
            return self.peak_lr if step < last else 0.0
        progress = (step - warmup) / (last - warmup)
        return 0.5 * self.peak_lr * (1.0 + math.cos(math.pi * progress))


_MODEL_KEYS = {f.name: f for f in fields(ModelConfig)}
_SCHEDULE_KEYS = {f.name: f for f in fields(TrainSchedule)}
_TYPES = {
    "lstm_layers": int, "lstm_dim": int, "head_hidden_dim": int, "qk_dim": int,
    "case_fold": bool, "seed": int, "use_gold_upos": bool,
    "frozen_epochs": int, "frozen_lr": float, "main_epochs": int,
    "batches_per_epoch": int, "batch_size": int, "peak_lr": float, "warmup_epochs": int,
}
DEFAULT_UPOS_DIM = 64


def _check_type(key: str, value, expected: type):
    if expected is bool:
        ok = isinstance(value, bool)
    elif expected is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not ok:
        raise ConfigTypeError(f"{key}: expected {expected.__name__}, got {type(value).__name__}")
    return float(value) if expected is float else value


def _parse_channels(value) -> tuple[Channel, ...]:
    if not isinstance(value, list):
        raise ConfigTypeError("channels: expected a list")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, dict) or set(item) - {"source", "dim"} or "source" not in item or "dim" not in item:
            raise ConfigTypeError(f"channels[{i}]: expected {{'source': ..., 'dim': ...}}")
        if not isinstance(item["source"], str):
            raise ConfigTypeError(f"channels[{i}].source: expected str")
        out.append(Channel(item["source"], _check_type(f"channels[{i}].dim", item["dim"], int)))
    return tuple(out)


def config_from_dict(d: dict) -> tuple[ModelConfig, TrainSchedule]:
    """Build a config pair from flat keys; omitted keys take the defaults."""
    if not isinstance(d, dict):
        raise ConfigTypeError("config must be a JSON object")
    model_kw, sched_kw = {}, {}
    use_gold_upos = None
    for key, value in d.items():
        if key == "channels":
            model_kw["channels"] = _parse_channels(value)
        elif key == "use_gold_upos":
            use_gold_upos = _check_type(key, value, bool)
        elif key in _MODEL_KEYS:
            model_kw[key] = _check_type(key, value, _TYPES[key])
        elif key in _SCHEDULE_KEYS:
            sched_kw[key] = _check_type(key, value, _TYPES[key])
        else:
            raise UnknownKey(f"unknown config key {key!r}")

    channels = model_kw.get("channels", ModelConfig.channels)
    has_upos = any(ch.source == "upos" for ch in channels)
    if use_gold_upos and not has_upos:
        model_kw["channels"] = tuple(channels) + (Channel("upos", DEFAULT_UPOS_DIM),)
    elif use_gold_upos is False and has_upos:
        raise ConfigError("use_gold_upos is false but a 'upos' channel is configured")
    return ModelConfig(**model_kw), TrainSchedule(**sched_kw)


def load_config(path: str | Path) -> tuple[ModelConfig, TrainSchedule]:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return ModelConfig(), TrainSchedule()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: {err}") from None
    return config_from_dict(data)
