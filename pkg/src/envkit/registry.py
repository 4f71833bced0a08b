"""Strictly versioned environment catalog.

Environment identity is a ``Name-vN`` id. Any behavior change to an
environment requires a new id, so logged results stay comparable; the
enforcement point is ``register``, which refuses duplicate ids. Construction
through ``make`` wraps every instance in a :class:`~envkit.monitor.Monitor`
by default.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .core import Environment, EnvDescriptor, EnvKitError
from .monitor import Monitor, ThresholdSpec
from .version import __version__

_ID_RE = re.compile(r"^([A-Za-z0-9]+)-v(0|[1-9][0-9]*)$")


class MalformedId(EnvKitError):
    """Text does not match the ``Name-vN`` grammar."""


class DuplicateId(EnvKitError):
    """An id was registered twice."""


class UnknownId(EnvKitError):
    """Lookup of an id that was never registered."""


class UnknownConfigKey(EnvKitError):
    """An override key is not in the environment's config schema."""


@dataclass(frozen=True)
class EnvId:
    name: str
    version: int

    def __str__(self) -> str:
        return f"{self.name}-v{self.version}"


def parse_id(text: str) -> EnvId:
    """Parse ``Name-vN``; name is case-sensitive over [A-Za-z0-9]."""
    m = _ID_RE.match(text)
    if m is None:
        raise MalformedId(f"not a valid environment id: {text!r}")
    return EnvId(m.group(1), int(m.group(2)))


@dataclass(frozen=True)
class EnvSpec:
    """Registry entry: identity, interface, construction and config schema."""

    id: EnvId
    descriptor: EnvDescriptor
    constructor: Callable[[dict], Environment]
    config_schema: tuple[tuple[str, object], ...] = ()
    threshold: Optional[ThresholdSpec] = None

    def build_raw(self, overrides: Optional[Sequence[tuple[str, object]] | dict] = None) -> Environment:
        """Construct an unwrapped instance with resolved config."""
        return self.constructor(self.resolve_config(overrides))

    def resolve_config(
        self, overrides: Optional[Sequence[tuple[str, object]] | dict] = None
    ) -> dict:
        config = {key: default for key, default in self.config_schema}
        if overrides:
            items = overrides.items() if isinstance(overrides, dict) else overrides
            for key, value in items:
                if key not in config:
                    raise UnknownConfigKey(
                        f"{self.id} has no config key {key!r}; "
                        f"known keys: {sorted(config)}"
                    )
                config[key] = _coerce(value, config[key])
        return config


def _coerce(value: object, default: object) -> object:
    """Coerce a CLI-style string override to the type of the schema default."""
    if not isinstance(value, str) or isinstance(default, str):
        return value
    if isinstance(default, bool):
        lowered = value.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {value!r}")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


@dataclass
class Registry:
    """Immutable-after-registration map from :class:`EnvId` to :class:`EnvSpec`."""

    _entries: dict[EnvId, EnvSpec] = field(default_factory=dict)

    def register(self, spec: EnvSpec) -> None:
        if spec.id in self._entries:
            raise DuplicateId(
                f"{spec.id} is already registered; environment changes "
                f"require a new version number"
            )
        self._entries[spec.id] = spec

    def spec(self, env_id: EnvId | str) -> EnvSpec:
        if isinstance(env_id, str):
            env_id = parse_id(env_id)
        try:
            return self._entries[env_id]
        except KeyError:
            raise UnknownId(f"no environment registered as {env_id}") from None

    def ids(self) -> list[str]:
        """All registered ids, lexicographic."""
        return sorted(str(i) for i in self._entries)

    def make(
        self,
        env_id: EnvId | str,
        overrides: Optional[Sequence[tuple[str, object]] | dict] = None,
        *,
        monitor: bool = True,
        log_path: Optional[str | Path] = None,
    ) -> Monitor | Environment:
        """Construct a fresh instance, monitor-wrapped unless disabled."""
        spec = self.spec(env_id)
        config = spec.resolve_config(overrides)
        env = spec.constructor(config)
        if not monitor:
            return env
        recorded = {key: str(value) for key, value in (dict(overrides or {})).items()}
        return Monitor(
            env,
            env_id=str(spec.id),
            overrides=recorded,
            log_path=log_path,
            toolkit_version=__version__,
        )
