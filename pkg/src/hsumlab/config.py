"""Experiment configuration stored as a single JSON document."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import _GENERATORS, WEIGHT_NAMES, CorpusEntry, default_corpus
from .errors import UsageError


@dataclass
class LambdaGrid:
    min: float = 1e-3
    max: float = 1e4
    count: int = 281
    log_spaced: bool = True

    def values(self) -> np.ndarray:
        if self.log_spaced:
            return np.logspace(np.log10(self.min), np.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass
class ExperimentConfig:
    grid_size: int = 2048
    n_max: int = 128
    alphas: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])
    lambda_grid: LambdaGrid = field(default_factory=LambdaGrid)
    whitney_depth: int = 8
    whitney_levels: list[float] = field(default_factory=lambda: [2.0, 8.0])
    abel_ns: list[int] = field(default_factory=lambda: [4, 16, 64, 256])
    corpus: list[CorpusEntry] | None = None
    weights: list[str] = field(default_factory=lambda: ["unit", "power"])
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        if self.corpus is None:
            self.corpus = default_corpus(self.seed)
        self.validate()

    def validate(self) -> None:
        N = self.grid_size
        if N < 256 or N & (N - 1):
            raise UsageError("grid_size must be a power of two >= 256")
        if not 1 <= self.n_max <= N // 2 - 1:
            raise UsageError(f"n_max must lie in 1..{N // 2 - 1}")
        if max(self.abel_ns) - 1 > N // 2 - 1 or min(self.abel_ns) < 2:
            raise UsageError("abel_ns must lie in 2..grid_size/2")
        if not all(0 < a <= 2 for a in self.alphas):
            raise UsageError("alphas must lie in (0, 2]")
        lg = self.lambda_grid
        if not (0 < lg.min < lg.max and lg.count >= 2):
            raise UsageError("lambda grid needs 0 < min < max and count >= 2")
        if self.whitney_depth < 0:
            raise UsageError("whitney_depth must be >= 0")
        for e in self.corpus:
            if e.kind not in _GENERATORS:
                raise UsageError(f"unknown corpus kind {e.kind!r}")
        for w in self.weights:
            if w not in WEIGHT_NAMES:
                raise UsageError(f"unknown weight {w!r}")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["corpus"] = [dataclasses.asdict(e) for e in self.corpus]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise UsageError(f"unknown config fields: {sorted(extra)}")
        if "lambda_grid" in d:
            d["lambda_grid"] = LambdaGrid(**d["lambda_grid"])
        if d.get("corpus") is not None:
            d["corpus"] = [CorpusEntry(**e) for e in d["corpus"]]
        try:
            return cls(**d)
        except TypeError as exc:
            raise UsageError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(d)

    def config_hash(self) -> str:
        """sha256 prefix of the canonical JSON, ignoring where output goes."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]
