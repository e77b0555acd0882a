"""Run configuration: one flat key = value file covering every tunable default.

The effective configuration is echoed verbatim into generated scene
containers so any dataset can be replayed from its own metadata.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .augment import ObjectAugmentConfig
from .errors import InvalidInput


@dataclass(frozen=True)
class RunConfig:
    # object augmentation
    object_size_min: float = 0.5
    object_size_max: float = 2.0
    object_drop_ratio_max: float = 0.2
    object_jitter_sigma: float = 0.01
    object_jitter_clip: float = 0.05
    object_rotation_enabled: bool = True
    # layout
    max_iter: int = 100
    gravity_sort: bool = True
    skip_forced: bool = False
    # confounders
    floor_wall_enabled: bool = True
    wall_height: float = 2.5
    confounder_density: float = 500.0
    # scene augmentation
    scene_rotation_enabled: bool = True
    scene_drop_ratio_max: float = 0.2
    scene_jitter_sigma: float = 0.01
    scene_jitter_clip: float = 0.05
    # assembly
    point_budget: int = 40000
    min_instance_points: int = 5
    objects_min: int = 12
    objects_max: int = 18
    # catalog ingestion
    min_object_points: int = 32
    # contrastive loss
    tau: float = 0.1
    exclude_self: bool = True
    encoder_width: int = 64
    encoder_depth: int = 3
    encoder_seed: int = 0
    projection_dim: int = 128
    head_seed: int = 0

    def validate(self) -> None:
        self.object_augment_config().validate()
        if self.point_budget < 1:
            raise InvalidInput("point_budget must be at least 1")
        if not 1 <= self.objects_min <= self.objects_max:
            raise InvalidInput("need 1 <= objects_min <= objects_max")
        if self.min_instance_points < 1:
            raise InvalidInput("min_instance_points must be at least 1")
        if self.wall_height <= 0 or self.confounder_density < 0:
            raise InvalidInput("confounder parameters must be positive")
        if self.tau <= 0:
            raise InvalidInput("temperature must be positive")
        if not 0.0 <= self.scene_drop_ratio_max < 1.0:
            raise InvalidInput("scene_drop_ratio_max must be in [0, 1)")
        if self.scene_jitter_sigma < 0 or self.scene_jitter_clip < self.scene_jitter_sigma:
            raise InvalidInput("scene jitter requires clip >= sigma >= 0")

    def object_augment_config(self) -> ObjectAugmentConfig:
        return ObjectAugmentConfig(
            size_min=self.object_size_min,
            size_max=self.object_size_max,
            drop_ratio_max=self.object_drop_ratio_max,
            jitter_sigma=self.object_jitter_sigma,
            jitter_clip=self.object_jitter_clip,
            rotation_enabled=self.object_rotation_enabled,
        )

    def to_text(self) -> str:
        """Render as 'key = value' lines in declaration order."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **kwargs) -> "RunConfig":
        cfg = replace(self, **kwargs)
        cfg.validate()
        return cfg


def _parse_value(name: str, raw: str, target_type: type):
    raw = raw.strip()
    if target_type is bool:
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise InvalidInput(f"config key {name}: expected a boolean, got {raw!r}")
    try:
        return target_type(raw)
    except ValueError as exc:
        raise InvalidInput(f"config key {name}: {exc}") from exc


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse 'key = value' lines; '#' starts a comment, unknown keys are errors."""
    cfg = base or RunConfig()
    by_name = {f.name: f for f in fields(RunConfig)}
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidInput(f"config line {lineno}: expected 'key = value', got {line!r}")
        name, raw = (part.strip() for part in stripped.split("=", 1))
        if name not in by_name:
            raise InvalidInput(f"config line {lineno}: unknown key {name!r}")
        overrides[name] = _parse_value(name, raw, type(getattr(cfg, name)))
    return cfg.with_overrides(**overrides)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base=base)
