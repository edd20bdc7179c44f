"""Versioned binary container for the ten trained models.

The bundle is a ZIP archive holding one ``manifest.json`` plus one ``.npy``
member per parameter array. Members are stored uncompressed with a fixed
timestamp and sorted names, so identical models always serialize to
byte-identical files. The manifest records hyperparameters, seeds,
objective histories, the embedding-provider fingerprint, and a checksum of
the training data.
"""

from __future__ import annotations

import hashlib
import io
import json
import zipfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .base import ALL_KINDS, HYPER_TYPES, LearnerKind, TrainedModel, TrainingSet
from ..corpus import DIMENSIONS
from ..errors import IncompleteBundle

BUNDLE_FORMAT = "paracode-model-bundle"
BUNDLE_VERSION = 1
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def _npy_bytes(arr: np.ndarray) -> bytes:
    # np.asarray, not ascontiguousarray: the latter promotes 0-d scalars to 1-d
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.asarray(arr), allow_pickle=False)
    return buf.getvalue()


def model_to_bytes(model: TrainedModel) -> bytes:
    """Canonical byte serialization of one model (JSON header + sorted arrays)."""
    header = json.dumps(
        {
            "kind": model.kind.value,
            "dim": model.dim,
            "seed": model.seed,
            "hyper": asdict(model.hyper),
            "objective_history": list(model.objective_history),
            "arrays": sorted(model.params),
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    chunks = [len(header).to_bytes(8, "little"), header]
    for name in sorted(model.params):
        blob = _npy_bytes(np.asarray(model.params[name]))
        chunks.append(len(blob).to_bytes(8, "little"))
        chunks.append(blob)
    return b"".join(chunks)


@dataclass
class ModelBundle:
    """All trained models keyed by (label dimension, learner kind)."""

    seed: int
    provider_fingerprint: bytes = b"\x00" * 32
    train_checksum: bytes = b"\x00" * 32
    models: dict[tuple[str, LearnerKind], TrainedModel] = field(default_factory=dict)

    def put(self, dimension: str, model: TrainedModel):
        self.models[(dimension, model.kind)] = model

    def get(self, dimension: str, kind: LearnerKind | str) -> TrainedModel:
        key = (dimension, LearnerKind(kind))
        if key not in self.models:
            raise IncompleteBundle(f"bundle is missing model {key[0]}/{key[1].value}")
        return self.models[key]

    def ensure_complete(self, dimensions: Iterable[str] = DIMENSIONS):
        missing = [
            f"{dim}/{kind.value}"
            for dim in dimensions
            for kind in ALL_KINDS
            if (dim, kind) not in self.models
        ]
        if missing:
            raise IncompleteBundle(f"bundle is missing models: {missing}")


def save_bundle(bundle: ModelBundle, path: str | Path):
    members: dict[str, bytes] = {}
    manifest_models = {}
    for (dimension, kind), model in sorted(
        bundle.models.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
    ):
        slot = f"{dimension}.{kind.value}"
        manifest_models[slot] = {
            "kind": kind.value,
            "dim": model.dim,
            "seed": model.seed,
            "hyper": asdict(model.hyper),
            "objective_history": list(model.objective_history),
            "arrays": sorted(model.params),
        }
        for name in sorted(model.params):
            members[f"arrays/{slot}.{name}.npy"] = _npy_bytes(np.asarray(model.params[name]))

    manifest = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "seed": bundle.seed,
        "provider_fingerprint": bundle.provider_fingerprint.hex(),
        "train_checksum": bundle.train_checksum.hex(),
        "models": manifest_models,
    }
    members["manifest.json"] = json.dumps(
        manifest, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")

    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(members):
            info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
            zf.writestr(info, members[name])


def load_bundle(path: str | Path) -> ModelBundle:
    with zipfile.ZipFile(path, "r") as zf:
        manifest = json.loads(zf.read("manifest.json").decode("utf-8"))
        if manifest.get("format") != BUNDLE_FORMAT:
            raise ValueError(f"{path} is not a model bundle")
        if manifest.get("version") != BUNDLE_VERSION:
            raise ValueError(f"unsupported bundle version {manifest.get('version')}")
        bundle = ModelBundle(
            seed=manifest["seed"],
            provider_fingerprint=bytes.fromhex(manifest["provider_fingerprint"]),
            train_checksum=bytes.fromhex(manifest["train_checksum"]),
        )
        for slot, meta in manifest["models"].items():
            dimension, _ = slot.split(".", 1)
            kind = LearnerKind(meta["kind"])
            params = {}
            for name in meta["arrays"]:
                raw = zf.read(f"arrays/{slot}.{name}.npy")
                params[name] = np.lib.format.read_array(io.BytesIO(raw), allow_pickle=False)
            bundle.put(
                dimension,
                TrainedModel(
                    kind=kind,
                    dim=meta["dim"],
                    params=params,
                    hyper=HYPER_TYPES[kind](**meta["hyper"]),
                    seed=meta["seed"],
                    objective_history=tuple(meta["objective_history"]),
                ),
            )
    return bundle


def training_checksum(datasets: dict[str, tuple[list[str], TrainingSet]]) -> bytes:
    """SHA-256 over paragraph ids, labels and features of every dimension."""
    h = hashlib.sha256()
    for dimension in sorted(datasets):
        para_ids, data = datasets[dimension]
        h.update(dimension.encode("utf-8"))
        for pid in para_ids:
            h.update(pid.encode("utf-8"))
        h.update(data.y.astype("<i8").tobytes())
        h.update(data.X.astype("<f8").tobytes())
    return h.digest()
