"""System configuration files: JSON documents naming a preset or raw branches.

Example::

    {
      "preset": {"name": "cantor", "alpha": 0.3183098861837907,
                 "weights": [0.5, 0.5]},
      "defaults": {"N": 200, "T": 1000000, "T0": 10000,
                   "replicas": 8, "seed": 1}
    }

or, with explicit branches::

    {
      "name": "my-system",
      "branches": [
        {"map": "0.25*x - 0.75", "weight": "log(0.5)", "label": "left"},
        {"map": "0.25*x + 0.75", "weight": "log(0.5)", "label": "right"}
      ]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import expr
from .system import Branch, IFSSystem, preset_cantor, preset_gauss_restricted

__all__ = ["SystemConfig", "ConfigError", "load_config"]

DEFAULTS = {"N": 128, "T": 1_000_000, "T0": 10_000, "replicas": 8, "seed": 1}


class ConfigError(ValueError):
    """Malformed system configuration."""


@dataclass(frozen=True)
class SystemConfig:
    system: IFSSystem
    defaults: dict
    raw: dict

    @property
    def canonical(self) -> str:
        """Canonical JSON used for cache keys."""
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def cantor_ratio(self) -> float | None:
        """Contraction ratio r for equal-weight cantor presets, else None."""
        preset = self.raw.get("preset")
        if not preset or preset.get("name") != "cantor":
            return None
        weights = preset.get("weights", [0.5, 0.5])
        if len(weights) != 2 or weights[0] != weights[1]:
            return None
        return (1.0 - float(preset["alpha"])) / 2.0


def _build_preset(spec: dict) -> IFSSystem:
    name = spec.get("name")
    if name == "cantor":
        if "alpha" not in spec:
            raise ConfigError("cantor preset needs 'alpha'")
        return preset_cantor(float(spec["alpha"]), tuple(spec.get("weights", (0.5, 0.5))))
    if name == "gauss":
        if "digits" not in spec:
            raise ConfigError("gauss preset needs 'digits'")
        return preset_gauss_restricted(
            [int(d) for d in spec["digits"]], spec.get("potential", "neg_geometric")
        )
    raise ConfigError(f"unknown preset {name!r} (expected 'cantor' or 'gauss')")


def _build_branches(specs: list) -> IFSSystem:
    branches = []
    for i, item in enumerate(specs):
        try:
            branch = Branch(
                map=expr.parse(item["map"]),
                weight=expr.parse(item["weight"]),
                label=item.get("label", f"branch{i}"),
            )
        except KeyError as missing:
            raise ConfigError(f"branch {i} is missing key {missing}") from None
        except expr.ParseError as bad:
            raise ConfigError(f"branch {i}: {bad}") from None
        branches.append(branch)
    return IFSSystem(tuple(branches))


def load_config(path) -> SystemConfig:
    """Load and validate a system configuration file."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as bad:
        raise ConfigError(f"{path}: not valid JSON: {bad}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    has_preset = "preset" in raw
    has_branches = "branches" in raw
    if has_preset == has_branches:
        raise ConfigError(f"{path}: exactly one of 'preset' or 'branches' required")
    try:
        system = _build_preset(raw["preset"]) if has_preset else _build_branches(raw["branches"])
    except (ValueError, TypeError) as bad:
        if isinstance(bad, ConfigError):
            raise
        raise ConfigError(f"{path}: {bad}") from None
    if "name" in raw:
        system = IFSSystem(system.branches, name=str(raw["name"]))
    system.validate_ranges()

    defaults = dict(DEFAULTS)
    extra = raw.get("defaults", {})
    unknown = set(extra) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"{path}: unknown defaults {sorted(unknown)}")
    defaults.update({k: int(v) for k, v in extra.items()})
    return SystemConfig(system=system, defaults=defaults, raw=raw)
