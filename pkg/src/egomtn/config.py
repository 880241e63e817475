"""Run configuration: a flat TOML document, overridable from the command line."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

PATH_KEYS = ("transfers", "labels", "ego_tags", "allowlist", "out_dir")


@dataclass
class RunConfig:
    transfers: str | None = None
    transfers_format: str | None = None
    labels: str | None = None
    ego_tags: str | None = None
    allowlist: str | None = None
    window_start: str | None = None
    window_end: str | None = None
    group_entities: bool = True
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 200
    alpha: float = 0.001
    resolution: str = "month"
    louvain_resolution: float = 1.0
    seed: int = 42
    rbo_p: float = 0.9
    top_k: int = 10
    group: list[str] | None = None
    out_dir: str = "out"

    def validate(self) -> "RunConfig":
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.resolution not in ("day", "month", "year"):
            raise ValueError(f"resolution must be day, month or year, got {self.resolution!r}")
        if not self.louvain_resolution > 0:
            raise ValueError("louvain_resolution must be positive")
        if not 0.0 < self.rbo_p < 1.0:
            raise ValueError(f"rbo_p must lie in (0, 1), got {self.rbo_p}")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.transfers_format not in (None, "csv", "jsonl"):
            raise ValueError("transfers_format must be csv or jsonl")
        return self

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        for key in PATH_KEYS:
            if data.get(key) is not None and not Path(data[key]).is_absolute():
                data[key] = str((path.parent / data[key]).resolve())
        if isinstance(data.get("group"), str):
            data["group"] = [data["group"]]
        return cls(**data)

    def merged(self, **overrides) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)

    def to_toml(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if value is None:
                continue
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, (int, float)):
                text = repr(value)
            else:
                # JSON string/array syntax is valid TOML for these values
                text = json.dumps(value, ensure_ascii=False)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"
