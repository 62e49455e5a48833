# walkpool/schemas/config.py
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.errors import ConfigError
from ..utils.keyvalue import read_key_values

FeatureGroup = Literal["omega", "node", "link", "graph"]
FEATURE_GROUPS: Tuple[str, ...] = ("omega", "node", "link", "graph")


def _split_csv(v: Any) -> Any:
    if isinstance(v, str):
        return tuple(part.strip() for part in v.split(",") if part.strip())
    return v


class TrainConfig(BaseModel):
    """WalkPool training hyperparameters; defaults reproduce the attribute-free setup"""

    # Subgraph sampling
    k_hops: int = Field(2, ge=1)
    max_per_hop: int = Field(100, ge=0, description="0 disables the per-hop cap")

    # Walk profile
    tau_c: int = Field(7, ge=2)
    heads: int = Field(2, ge=1)
    exclude: Tuple[FeatureGroup, ...] = Field(())

    # Node representation
    init_mode: Literal["ones", "dl", "file"] = "ones"
    init_dim: int = Field(32, ge=1)
    gcn_hidden: int = Field(32, ge=1)
    gcn_out: int = Field(32, ge=1)
    attention_mlp_hidden: int = Field(32, ge=1)
    attention_mlp_out: int = Field(32, ge=1)
    classifier_ratios: Tuple[int, ...] = Field((20, 20, 10, 1))

    # Optimization
    lr: float = Field(5e-5, gt=0)
    weight_decay: float = Field(0.0, ge=0)
    adam_beta1: float = Field(0.9, ge=0, lt=1)
    adam_beta2: float = Field(0.999, ge=0, lt=1)
    adam_eps: float = Field(1e-8, gt=0)
    batch_size: int = Field(32, ge=1)
    epochs: int = Field(50, ge=1)
    select: Literal["best_val", "final"] = "best_val"

    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)

    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("exclude", "classifier_ratios", mode="before")
    @classmethod
    def parse_lists(cls, v):
        return _split_csv(v)

    @field_validator("exclude")
    @classmethod
    def dedupe_groups(cls, v):
        return tuple(g for g in FEATURE_GROUPS if g in set(v))

    @field_validator("classifier_ratios")
    @classmethod
    def positive_ratios(cls, v):
        if not v or any(r < 1 for r in v):
            raise ValueError("classifier_ratios must be a non-empty list of positive integers")
        return v

    @model_validator(mode="after")
    def check_consistency(self):
        if len(self.exclude) == len(FEATURE_GROUPS):
            raise ValueError("exclude removes every feature group")
        if self.init_mode == "dl" and self.init_dim < 4:
            raise ValueError("init_dim must be >= 4 for distance labels")
        return self

    @property
    def included_groups(self) -> Tuple[str, ...]:
        return tuple(g for g in FEATURE_GROUPS if g not in self.exclude)

    def with_overrides(self, **overrides) -> "TrainConfig":
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return build_config(values)


class HeuristicParams(BaseModel):
    """Katz decay, PageRank restart and power-iteration controls"""

    beta: float = Field(0.001, ge=0)
    l_max: int = Field(32, ge=1)
    alpha: float = Field(0.85, gt=0, lt=1)
    iters: int = Field(1000, ge=1)
    tol: float = Field(1e-8, gt=0)

    model_config = ConfigDict(extra="forbid", frozen=True)


def _raise_config_error(exc: ValidationError, source: str) -> None:
    keys = []
    details = []
    for err in exc.errors():
        key = ".".join(str(part) for part in err.get("loc", ())) or "<config>"
        keys.append(key)
        details.append(f"{key}: {err.get('msg')}")
    raise ConfigError(f"invalid configuration in {source}: " + "; ".join(details), keys) from exc


def build_config(values: Mapping[str, Any], source: str = "arguments") -> TrainConfig:
    try:
        return TrainConfig.model_validate(dict(values))
    except ValidationError as exc:
        _raise_config_error(exc, source)


def load_config(path: Optional[Union[str, Path]] = None, **overrides) -> TrainConfig:
    """Defaults <- key=value file <- explicit overrides (None values skipped)"""
    values: Dict[str, Any] = {}
    source = "arguments"
    if path is not None:
        values.update(read_key_values(path))
        source = str(path)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(values, source)


def build_heuristic_params(values: Mapping[str, Any], source: str = "arguments") -> HeuristicParams:
    try:
        return HeuristicParams.model_validate({k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        _raise_config_error(exc, source)
