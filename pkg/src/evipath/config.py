"""Engine configuration and the flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field, fields
from pathlib import Path

from .scoring import PruneConfig

logger = logging.getLogger(__name__)

MODES = ("full", "hydra-e")


@dataclass
class EngineConfig:
    w_max: int = 3
    w1: int = 100
    w2: int = 20
    d_max: int = 3
    lambda_sem: float = 0.7
    alpha_cross: float = 0.7
    alpha_1: float = 1 / 3
    alpha_2: float = 1 / 3
    alpha_3: float = 1 / 3
    rho_kg: float = 1.0
    rho_wiki: float = 0.8
    rho_web: float = 0.7
    gamma: float = 0.80
    entity_match: float = 0.85
    injection: float = 0.75
    temperature_explore: float = 0.4
    temperature_decide: float = 0.0
    max_tokens: int = 256
    predictions: int = 3
    mode: str = "full"
    seed: int = 0
    verification: bool = True
    embedder: str = "hashing"
    embed_dim: int = 256
    embed_base_url: str = ""
    embed_model: str = ""
    llm_base_url: str = ""
    llm_model: str = ""
    llm_api_key_env: str = "EVIPATH_API_KEY"
    kg_sources: list[str] = field(default_factory=lambda: ["freebase", "wikikg"])

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.d_max < 1 or self.predictions < 1 or self.max_tokens < 1:
            raise ValueError("d_max, predictions and max_tokens must be >= 1")
        for name in ("entity_match", "injection", "temperature_explore", "temperature_decide"):
            if not 0.0 <= getattr(self, name) <= 2.0:
                raise ValueError(f"{name} out of range")
        self.prune_config()  # validates weights, priors and widths

    def prune_config(self) -> PruneConfig:
        return PruneConfig(lambda_sem=self.lambda_sem, lambda_ent=1.0 - self.lambda_sem,
                           alpha=(self.alpha_1, self.alpha_2, self.alpha_3), alpha_cross=self.alpha_cross,
                           gamma=self.gamma, rho_kg=self.rho_kg, rho_wiki=self.rho_wiki, rho_web=self.rho_web,
                           w1=self.w1, w2=self.w2, w_max=self.w_max, verification=self.verification)

    def replace(self, **changes) -> EngineConfig:
        return dataclasses.replace(self, **changes)

    def dumps(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ", ".join(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _coerce(name: str, raw: str, default) -> object:
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, list):
        return [x.strip() for x in raw.split(",") if x.strip()]
    return raw


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment line."""
    defaults = EngineConfig()
    known = {f.name for f in fields(EngineConfig)}
    out: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{origin}:{lineno}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{origin}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value, getattr(defaults, key))
        except ValueError as exc:
            raise ValueError(f"{origin}:{lineno}: {exc}") from None
    return out


def load_config(path: str | Path | None = None, overrides: Mapping[str, object] | None = None) -> EngineConfig:
    """Defaults, then the file at ``path``, then non-None ``overrides``."""
    values: dict[str, object] = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8"), str(path)))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    return EngineConfig(**values)
