"""Run configuration: defaults, flat key=value config files, CLI overrides.

Precedence is defaults < config file < command-line flags. One seed
propagates to every stochastic component (shuffles, embedding, forest).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any

from .embed import SkipgramConfig
from .forest import Hyperparams


class ConfigError(ValueError):
    """A config file or option value is unusable."""


@dataclass
class RunConfig:
    repos: tuple[str, ...] = ()
    extensions: tuple[str, ...] = (".java",)
    seed: int = 0
    out_dir: str = "out"
    data_path: str = ""
    model_dir: str = ""
    rev_range: str = ""
    split: float = 0.7
    correlation_threshold: float = 0.8
    rule_threshold: float = 0.05
    calibration_bins: int = 10
    include_comment_only: bool = True
    return_feature: str = "code"
    grammar: str = "curly"
    grid_search: bool = False
    # embedding knobs
    embedding_dim: int = 100
    window_radius: int = 2
    negative_samples: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    # forest knobs
    n_trees: int = 200
    criterion: str = "gini"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    feature_subset: str = "sqrt"

    def validate(self) -> None:
        if not 0.0 < self.split < 1.0:
            raise ConfigError("split must be strictly between 0 and 1")
        if not 0.0 < self.correlation_threshold <= 1.0:
            raise ConfigError("correlation_threshold must be in (0, 1]")
        if self.rule_threshold < 0.0:
            raise ConfigError("rule_threshold must be non-negative")
        if self.calibration_bins < 1:
            raise ConfigError("calibration_bins must be at least 1")
        if self.return_feature not in ("code", "tag"):
            raise ConfigError("return_feature must be 'code' or 'tag'")
        self.skipgram_config().validate()
        self.hyperparams().validate()

    def skipgram_config(self) -> SkipgramConfig:
        return SkipgramConfig(
            window_radius=self.window_radius,
            embedding_dim=self.embedding_dim,
            negative_samples=self.negative_samples,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            seed=self.seed,
        )

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            n_trees=self.n_trees,
            criterion=self.criterion,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
            feature_subset=self.feature_subset,
            seed=self.seed,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key: str, raw: str) -> Any:
    raw = raw.strip()
    if key in ("repos", "extensions"):
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    if key == "max_depth":
        return None if raw.lower() in ("none", "") else int(raw)
    if key in ("include_comment_only", "grid_search"):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    annotation = str(_FIELD_TYPES.get(key, "str"))
    try:
        if "int" in annotation:
            return int(raw)
        if "float" in annotation:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    return raw


def load_config_file(path: str) -> dict[str, Any]:
    """Parse a flat key=value file; # starts a comment, blanks ignored."""
    known = {f.name for f in fields(RunConfig)}
    values: dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}: line {lineno}: expected key=value")
            key, raw = text.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ConfigError(f"{path}: line {lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    return values


def build_config(
    file_values: dict[str, Any] | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Layer config-file values and CLI overrides over the defaults."""
    config = RunConfig()
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            setattr(config, key, value)
    config.validate()
    return config
