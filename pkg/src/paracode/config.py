"""Pipeline configuration: versioned JSON with an explicit, closed schema.

Unknown keys anywhere in the file are rejected at load time so typos fail
fast instead of silently running with defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifiers import HYPER_TYPES, HyperParams, LearnerKind
from .embedding import (
    DEFAULT_EXTERNAL_DIM,
    DEFAULT_HASHING_FEATURES,
    DEFAULT_HASHING_SEED,
    EmbeddingProvider,
    FileProvider,
    HashingProvider,
    ServiceProvider,
)
from .ensemble import DEFAULT_THRESHOLD, check_threshold
from .errors import ConfigError

CONFIG_VERSION = 1

_PROVIDER_KEYS = {
    "hashing": {"kind", "n_features", "seed"},
    "external_file": {"kind", "path"},
    "external_service": {"kind", "url", "dim"},
}


@dataclass(frozen=True)
class PipelineConfig:
    provider: dict = field(default_factory=lambda: {"kind": "hashing"})
    threshold: int = DEFAULT_THRESHOLD
    seed: int = 42
    include_near_miss: bool = False
    hyper: HyperParams = field(default_factory=HyperParams)
    paths: dict = field(default_factory=dict)

    def build_provider(self) -> EmbeddingProvider:
        spec = self.provider
        kind = spec.get("kind", "hashing")
        if kind == "hashing":
            return HashingProvider(
                n_features=spec.get("n_features", DEFAULT_HASHING_FEATURES),
                seed=spec.get("seed", DEFAULT_HASHING_SEED),
            )
        if kind == "external_file":
            if "path" not in spec:
                raise ConfigError("external_file provider requires a path")
            return FileProvider(spec["path"])
        if kind == "external_service":
            if "url" not in spec:
                raise ConfigError("external_service provider requires a url")
            return ServiceProvider(spec["url"], dim=spec.get("dim", DEFAULT_EXTERNAL_DIM))
        raise ConfigError(f"unknown provider kind {kind!r}")


def _parse_hyper(raw: dict) -> HyperParams:
    overrides = {}
    for kind_name, settings in raw.items():
        try:
            kind = LearnerKind(kind_name)
        except ValueError:
            raise ConfigError(f"unknown learner kind in hyper block: {kind_name!r}") from None
        if not isinstance(settings, dict):
            raise ConfigError(f"hyper.{kind_name} must be an object")
        try:
            overrides[kind.value] = HYPER_TYPES[kind](**settings)
        except TypeError as exc:
            raise ConfigError(f"bad hyper settings for {kind_name}: {exc}") from None
    return HyperParams(**overrides)


def parse_config(raw: dict) -> PipelineConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"version", "provider", "threshold", "seed", "include_near_miss", "hyper", "paths"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    version = raw.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r}")

    provider = raw.get("provider", {"kind": "hashing"})
    if not isinstance(provider, dict):
        raise ConfigError("provider must be an object")
    kind = provider.get("kind", "hashing")
    allowed = _PROVIDER_KEYS.get(kind)
    if allowed is None:
        raise ConfigError(f"unknown provider kind {kind!r}")
    extra = set(provider) - allowed
    if extra:
        raise ConfigError(f"unknown provider keys for {kind}: {sorted(extra)}")

    threshold = raw.get("threshold", DEFAULT_THRESHOLD)
    check_threshold(threshold)

    paths = raw.get("paths", {})
    if not isinstance(paths, dict):
        raise ConfigError("paths must be an object")

    return PipelineConfig(
        provider=dict(provider),
        threshold=threshold,
        seed=int(raw.get("seed", 42)),
        include_near_miss=bool(raw.get("include_near_miss", False)),
        hyper=_parse_hyper(raw.get("hyper", {})),
        paths=dict(paths),
    )


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    return parse_config(raw)


def config_to_dict(config: PipelineConfig) -> dict:
    return {
        "version": CONFIG_VERSION,
        "provider": dict(config.provider),
        "threshold": config.threshold,
        "seed": config.seed,
        "include_near_miss": config.include_near_miss,
        "hyper": {
            kind.value: dataclasses.asdict(config.hyper.for_kind(kind))
            for kind in LearnerKind
        },
        "paths": dict(config.paths),
    }
