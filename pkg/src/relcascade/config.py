"""Model and training configuration, with a flat key=value file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


@dataclass
class ModelConfig:
    # encoder
    encoder: str = "toy"            # "toy" or "pretrained"
    d: int = 128                    # encoder output dimension (768 for pretrained)
    embedding_dim: int = 64         # toy encoder token embedding size
    # decoders
    relation_emb_dim: int = 300
    lstm_hidden: int = 384          # per direction, all four tagger stacks
    pos_emb_dim: int = 64
    max_rel_distance: int = 64      # distance buckets; +1 sentinel for "no start yet"
    delta: float = 0.5              # relation confidence threshold (strict >)
    span_threshold: float = 0.5     # start/end tag threshold (strict >)
    # training
    dropout: float = 0.4
    learning_rate: float = 2e-5
    batch_size: int = 8
    grad_clip: float = 5.0          # max gradient norm; 0 disables clipping
    max_epochs: int = 100
    patience: int = 10              # early-stopping patience, in evaluations
    eval_every: int = 1             # epochs between dev evaluations
    negative_relation_sampling: bool = False
    span_fallback_single_token: bool = False

    def validate(self) -> None:
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not (0.0 < self.span_threshold < 1.0):
            raise ValueError(f"span_threshold must be in (0, 1), got {self.span_threshold}")
        if not (0.0 <= self.dropout < 1.0):
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")
        for name in ("d", "embedding_dim", "relation_emb_dim", "lstm_hidden",
                     "pos_emb_dim", "max_rel_distance", "batch_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _coerce(value: str, target_type: type):
    if target_type is bool:
        return value.strip().lower() in ("1", "true", "yes", "on")
    return target_type(value.strip())


def load_config(path: str | Path) -> ModelConfig:
    """Parse ``key = value`` lines; '#' starts a comment."""
    fields = {f.name: f.type for f in dataclasses.fields(ModelConfig)}
    types = {f.name: type(getattr(ModelConfig(), f.name)) for f in dataclasses.fields(ModelConfig)}
    kwargs = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        kwargs[key] = _coerce(value, types[key])
    cfg = ModelConfig(**kwargs)
    cfg.validate()
    return cfg


def save_config(cfg: ModelConfig, path: str | Path) -> None:
    lines = [f"{f.name} = {getattr(cfg, f.name)}" for f in dataclasses.fields(cfg)]
    Path(path).write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")
