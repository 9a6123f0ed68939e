"""Run configuration: JSON files plus dotted-key overrides."""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ConfigError

DEFAULTS: dict = {
    "seed": 0,
    "corpus": {"preset": "standard", "n_functions": 500, "path": None},
    "split": {"ratios": [0.8, 0.1, 0.1], "seed": 0},
    "embedding": {
        "provider": "hashed",
        "dim": 256,
        "positional": True,
        "seed": 0,
        "endpoint": None,
    },
    "localizer": {
        "attn_dim": 128,
        "batch_size": 32,
        "lr": 1e-3,
        "epochs": 30,
        "patience": 5,
        "seed": 0,
        "use_line_mask": False,
        "structural_end_mask": True,
        "scale_logits": False,
    },
    "adjuster": {
        "enabled": False,
        "lr": 1e-2,
        "epochs": 200,
        "batch_size": 64,
        "patience": 25,
        "holdout": 0.1,
        "seed": 0,
        "single_embedding": False,
    },
    "fixer": {
        "style": "P3",
        "budget": 1,
        "max_new_tokens": 256,
        "temperature": 0.8,
        "seed": 0,
        "retries": 3,
        "backoff": 0.25,
        "use_oracle_regions": False,
        "use_comment": False,
        "max_in_flight": 8,
        "backend": "noisy",
        "eps": 0.02,
        "line_start_failure": 0.0,
        "endpoint": None,
    },
    "evaluate": {"ks": [10, 30, 50, 100, 200], "raw": False},
}


def deep_update(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_update(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | Path | None) -> dict:
    """Defaults merged with the JSON file at `path`, if given."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be an object: {path}")
    return deep_update(DEFAULTS, data)


def parse_override(expr: str) -> tuple[list[str], object]:
    """Splits "a.b.c=value"; the value parses as JSON when it can."""
    if "=" not in expr:
        raise ConfigError(f"override must look like key.path=value, got {expr!r}")
    key, raw = expr.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override has an empty key: {expr!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_overrides(cfg: dict, exprs: list[str]) -> dict:
    out = copy.deepcopy(cfg)
    for expr in exprs:
        keys, value = parse_override(expr)
        node = out
        for k in keys[:-1]:
            nxt = node.get(k)
            if not isinstance(nxt, dict):
                nxt = {}
                node[k] = nxt
            node = nxt
        node[keys[-1]] = value
    return out


def write_resolved(cfg: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")
