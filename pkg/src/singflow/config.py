"""Configuration dataclasses, flat key-value config files, and env overrides.

Config files are flat ``section.key = value`` text.  Environment variables
prefixed ``TCS2_`` override file values, e.g. ``TCS2_FLOW_D_MODEL=32`` maps
to ``flow.d_model``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Bad or missing configuration key."""


@dataclass
class CorpusConfig:
    n_singers: int = 20
    n_scores: int = 200
    min_units: int = 4
    max_units: int = 10
    min_duration: int = 2
    max_duration: int = 6
    language_mix: tuple = (0.25, 0.25, 0.25, 0.25)
    # Vibrato rate range kept narrow so the oscillation is learnable at
    # desk scale; must stay inside the profile bound [4, 7] Hz.
    vibrato_rate_range: tuple = (5.5, 5.5)
    vibrato_depth_range: tuple = (0.4, 0.6)
    breathiness_range: tuple = (0.02, 0.12)


@dataclass
class BbcConfig:
    mask_width: int = 8  # m
    mask_seed: int = 0


@dataclass
class CodecConfig:
    hidden: int = 384
    layers: int = 3
    kernel: int = 5
    latent_channels: int = 20
    tau_c: float = 0.07
    disc_layers: int = 4
    disc_hidden: int = 32


@dataclass
class FlowConfig:
    n_blocks: int = 4
    d_model: int = 768
    n_heads: int = 8
    train_timesteps: int = 1000
    infer_steps: int = 25
    cfg_scale: float = 3.0
    rope_on_prompt: bool = True


@dataclass
class MoeConfig:
    n_experts: int = 4
    alpha: float = 0.1
    tau_start: float = 2.0
    tau_end: float = 0.3
    anneal_fraction: float = 0.8


@dataclass
class TrainConfig:
    stage: str = "svs"  # codec | svs
    lr: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    warmup_steps: int = 10000
    total_steps: int = 100000
    batch_size: int = 8
    seed: int = 0
    prompt_dropout_p: float = 0.2
    log_every: int = 50
    holdout: int = 16


@dataclass
class Config:
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    bbc: BbcConfig = field(default_factory=BbcConfig)
    codec: CodecConfig = field(default_factory=CodecConfig)
    flow: FlowConfig = field(default_factory=FlowConfig)
    moe: MoeConfig = field(default_factory=MoeConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @classmethod
    def desk(cls) -> "Config":
        """Small preset: full acceptance suite on one CPU in minutes."""
        cfg = cls()
        cfg.codec.hidden = 64
        cfg.codec.latent_channels = 8
        cfg.flow.n_blocks = 2
        cfg.flow.d_model = 64
        cfg.flow.n_heads = 4
        cfg.moe.n_experts = 2
        cfg.train.lr = 1e-3
        cfg.train.warmup_steps = 100
        cfg.train.total_steps = 2000
        return cfg

    def set_key(self, key: str, raw: str) -> None:
        try:
            section_name, field_name = key.split(".", 1)
        except ValueError:
            raise ConfigError(f"config key {key!r} is not of the form section.key")
        try:
            section = getattr(self, section_name)
        except AttributeError:
            raise ConfigError(f"unknown config section {section_name!r}")
        if not hasattr(section, field_name):
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(section, field_name)
        setattr(section, field_name, _coerce(raw, current, key))

    def to_text(self) -> str:
        lines = []
        for section_name in ("corpus", "bbc", "codec", "flow", "moe", "train"):
            section = getattr(self, section_name)
            for f in dataclasses.fields(section):
                value = getattr(section, f.name)
                if isinstance(value, tuple):
                    value = ",".join(str(v) for v in value)
                lines.append(f"{section_name}.{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _coerce(raw: str, current, key: str):
    raw = raw.strip()
    try:
        if isinstance(current, bool):
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, tuple):
            return tuple(float(v) for v in raw.split(","))
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r} for key {key!r}")


def parse_config_text(text: str, base: Config | None = None) -> Config:
    cfg = base if base is not None else Config.desk()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        cfg.set_key(key.strip(), raw)
    return cfg


def load_config(path: str | None, apply_env: bool = True) -> Config:
    cfg = Config.desk()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read(), cfg)
    if apply_env:
        apply_env_overrides(cfg)
    return cfg


def apply_env_overrides(cfg: Config, environ=None) -> None:
    environ = os.environ if environ is None else environ
    for name, raw in sorted(environ.items()):
        if not name.startswith("TCS2_"):
            continue
        rest = name[len("TCS2_"):]
        if "_" not in rest:
            raise ConfigError(f"cannot map env var {name} to a config key")
        section, field_name = rest.split("_", 1)
        cfg.set_key(f"{section.lower()}.{field_name.lower()}", raw)
