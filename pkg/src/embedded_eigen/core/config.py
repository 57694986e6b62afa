"""Configuratie-objecten voor een run, geladen uit een enkel TOML-bestand."""

from __future__ import annotations

import hashlib
import json
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from embedded_eigen.data_access.exceptions import ConfigError, DataFileNotFoundError

logger = logging.getLogger(__name__)

_LINE_COLUMN = re.compile(r"line (\d+), column (\d+)")


@dataclass(slots=True)
class OperatorSpec:
    """Ongestoorde periodieke operator: continue potentiaal of Jacobi-rijen."""

    kind: str = "continuous"
    potential: str = "zero"
    amp: float = 0.0
    freq: int = 1
    mean: float = 0.0
    cos: list[float] = field(default_factory=list)
    sin: list[float] = field(default_factory=list)
    a: list[float] = field(default_factory=lambda: [1.0])
    b: list[float] = field(default_factory=lambda: [0.0])


@dataclass(slots=True)
class TargetSpec:
    """Doel-eigenwaarden: expliciete lijst of posities binnen een band."""

    eigenvalues: list[float] = field(default_factory=list)
    angles: list[float] = field(default_factory=list)
    band: int = 0
    band_fractions: list[float] = field(default_factory=list)


@dataclass(slots=True)
class BandsSpec:
    """Scanbereik voor ``bands`` en voor het opsommen van eigenwaarden."""

    e_min: float = -1.0
    e_max: float = 50.0
    samples_per_band: int = 20


@dataclass(slots=True)
class ScalingPolicy:
    """Schaalbeleid voor stages en schema's.

    ``decay_exponent`` is D, ``ratio_base``/``epoch_base`` vervangen de bases
    4 en 1000 van de schemavoorwaarden, ``p``/``p_prime`` de exponenten van het
    epoch-contract.
    """

    decay_exponent: float = 2.0
    epoch_base: int = 4
    ratio_base: float = 1.25
    c_min: int = 4
    t0: int = 1000
    p: float = 2.0
    p_prime: float = 2.0
    k_min: float = 1000.0
    increment_every: int = 1
    h_margin: float = 1.0
    l2_ratio_bound: float = 0.5
    slope_slack: float = 0.1
    lower_bound_slack: float = 0.5
    envelope_bound: float = 100.0
    angular_tol: float = 1e-6
    rtol: float = 1e-10
    root_tol: float = 1e-10
    points_per_unit: int = 400
    probes: int = 8
    rational_tol: float = 1e-13


@dataclass(slots=True)
class RunSettings:
    """Modus, experiment en uitvoer."""

    mode: str = "finite"
    epochs: int = 4
    experiment: str = "embedding_finite"
    horizon: float = 1e5
    start: float = 10.0
    output_dir: str = "out"
    output_stride: int = 1
    strict: bool = False
    envelope: str = "log"
    envelope_scale: float = 1.0
    log_level: str = "INFO"


@dataclass(slots=True)
class PerturbationSpec:
    """Storing voor het no-embedding experiment: amplitude·sin(frequency·x)/(1+x)."""

    kind: str = "zero"
    amplitude: float = 0.1
    frequency: float = 2.0


_SECTIONS: dict[str, type] = {
    "operator": OperatorSpec,
    "targets": TargetSpec,
    "bands": BandsSpec,
    "policy": ScalingPolicy,
    "run": RunSettings,
    "perturbation": PerturbationSpec,
}

_CHOICES: dict[tuple[str, str], tuple[str, ...]] = {
    ("operator", "kind"): ("continuous", "jacobi"),
    ("operator", "potential"): ("zero", "cosine", "fourier"),
    ("run", "mode"): ("finite", "infinite"),
    ("run", "experiment"): ("embedding_finite", "embedding_infinite", "no_embedding"),
    ("run", "envelope"): ("log", "loglog", "sqrt", "constant"),
    ("perturbation", "kind"): ("zero", "sin"),
}


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    """Regelnummer van een sectie of van key binnen die sectie, indien te vinden."""
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            current = line.strip("[] ")
            if key is None and current == section:
                return number
            continue
        if key is not None and current == section and re.match(rf"{re.escape(key)}\s*=", line):
            return number
    return None


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    """Controleer het type van value tegen de default; int wordt float waar nodig."""
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, int | float) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, list):
        ok = isinstance(value, list) and all(
            isinstance(v, int | float) and not isinstance(v, bool) for v in value
        )
        value = [float(v) for v in value] if ok else value
    else:
        ok = True
    if not ok:
        raise TypeError(f"{section}.{key} expects {type(default).__name__}, got {value!r}")
    choices = _CHOICES.get((section, key))
    if choices is not None and value not in choices:
        raise ValueError(f"{section}.{key} must be one of {', '.join(choices)}, got {value!r}")
    return value


@dataclass(slots=True)
class RunConfig:
    """Volledige configuratie van een run."""

    operator: OperatorSpec = field(default_factory=OperatorSpec)
    targets: TargetSpec = field(default_factory=TargetSpec)
    bands: BandsSpec = field(default_factory=BandsSpec)
    policy: ScalingPolicy = field(default_factory=ScalingPolicy)
    run: RunSettings = field(default_factory=RunSettings)
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    source: Path | None = None

    @classmethod
    def from_dict(
        cls, data: dict[str, Any], source: Path | None = None, text: str = ""
    ) -> RunConfig:
        """Bouw een RunConfig; onbekende secties en keys worden geweigerd.

        Raises
        ------
        ConfigError:
            Bij onbekende keys, verkeerde types of ongeldige keuzes.
        """
        built: dict[str, Any] = {}
        for section, values in data.items():
            if section not in _SECTIONS:
                raise ConfigError(source, f"unknown section [{section}]", _line_of(text, section))
            if not isinstance(values, dict):
                raise ConfigError(source, f"[{section}] must be a table", _line_of(text, section))
            section_type = _SECTIONS[section]
            defaults = section_type()
            allowed = {f.name for f in fields(section_type)}
            kwargs: dict[str, Any] = {}
            for key, value in values.items():
                line = _line_of(text, section, key)
                if key not in allowed:
                    raise ConfigError(source, f"unknown key '{key}' in [{section}]", line)
                try:
                    kwargs[key] = _coerce(section, key, value, getattr(defaults, key))
                except (TypeError, ValueError) as e:
                    raise ConfigError(source, str(e), line) from e
            built[section] = section_type(**kwargs)
        config = cls(**built, source=source)
        config.validate()
        return config

    @classmethod
    def load(cls, path: Path) -> RunConfig:
        """Lees een TOML-bestand en bouw de RunConfig.

        Raises
        ------
        DataFileNotFoundError:
            Als het bestand niet bestaat.
        ConfigError:
            Bij TOML-syntaxfouten (met regel/kolom) of ongeldige inhoud.
        """
        if not path.exists():
            logger.error(f"Config file not found: {path}")
            raise DataFileNotFoundError(path, f"Config file not found: {path}")
        logger.info(f"Loading config from: {path}")
        text = path.read_text(encoding="utf-8")
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            match = _LINE_COLUMN.search(str(e))
            line = int(match.group(1)) if match else None
            column = int(match.group(2)) if match else None
            logger.error(f"Failed to parse TOML config: {e}")
            raise ConfigError(path, f"invalid TOML: {e}", line, column) from e
        return cls.from_dict(data, source=path, text=text)

    def validate(self) -> None:
        """Semantische controles die niet per key uit te drukken zijn."""
        t = self.targets
        if t.angles and t.eigenvalues and len(t.angles) != len(t.eigenvalues):
            raise ConfigError(self.source, "targets.angles must match targets.eigenvalues")
        if self.operator.kind == "jacobi" and len(self.operator.a) != len(self.operator.b):
            raise ConfigError(self.source, "operator.a and operator.b must have equal length")
        if self.operator.kind == "jacobi" and any(v <= 0.0 for v in self.operator.a):
            raise ConfigError(self.source, "operator.a must be positive")
        if self.run.epochs < 1:
            raise ConfigError(self.source, "run.epochs must be >= 1")
        if self.policy.t0 < 1 or self.policy.c_min < 2:
            raise ConfigError(self.source, "policy.t0 must be >= 1 and policy.c_min >= 2")

    def with_overrides(
        self,
        *,
        mode: str | None = None,
        epochs: int | None = None,
        output_dir: str | None = None,
        policy: dict[str, str] | None = None,
    ) -> RunConfig:
        """Kopie met CLI-overrides. policy-keys zijn "key" (policy) of "section.key"."""
        data = self.to_dict()
        if mode is not None:
            data["run"]["mode"] = mode
        if epochs is not None:
            data["run"]["epochs"] = epochs
        if output_dir is not None:
            data["run"]["output_dir"] = output_dir
        for dotted, raw in (policy or {}).items():
            section, _, key = dotted.rpartition(".")
            data.setdefault(section or "policy", {})[key] = parse_scalar(raw)
        return replace(RunConfig.from_dict(data), source=self.source)

    def to_dict(self) -> dict[str, Any]:
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}

    def config_hash(self) -> str:
        """Eerste 12 hex-tekens van SHA-256 over de canonieke JSON."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def parse_scalar(raw: str) -> Any:
    """Interpreteer een CLI-waarde als TOML-waarde; valt terug op een string."""
    try:
        return tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        return raw


__all__ = [
    "OperatorSpec",
    "TargetSpec",
    "BandsSpec",
    "ScalingPolicy",
    "RunSettings",
    "PerturbationSpec",
    "RunConfig",
    "parse_scalar",
]
