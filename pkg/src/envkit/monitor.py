"""Episode instrumentation: per-episode records, persistent logs, metrics.

Log file format (UTF-8, one JSON record per line):

  line 1    manifest: {"env": "<id>", "overrides": {...}, "obs_space": "<text>",
            "act_space": "<text>", "seed": <int|null>, "toolkit_version": "<semver>"}
  line 2..  episode:  {"ep": <i>, "r": <total_reward>, "len": <length>,
            "trunc": <bool>, "seed": <int|null>, "ms": <int>}

Numbers are serialized with full round-trip precision, so
serialize -> parse -> serialize is byte-identical. Two evaluation metrics are
computed from a log: final performance (mean total reward over a tail of
episodes) and sample complexity (episodes until a windowed mean exceeds a
threshold).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import Environment, EnvKitError, StepOutcome
from .spaces import Value

DEFAULT_WINDOW = 100


class NoOpenEpisode(EnvKitError):
    """A step was recorded with no episode open."""


class EmptyLog(EnvKitError):
    """The operation needs at least one completed episode."""


class InsufficientEpisodes(EnvKitError):
    """The log holds fewer episodes than the requested tail."""


class MalformedLog(EnvKitError):
    """A log line failed to parse; ``line_number`` is 1-based."""

    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class EpisodeRecord:
    """One completed episode: the monitor's unit of persistence."""

    index: int
    total_reward: float
    length: int
    seed: Optional[int]
    truncated: bool
    wall_time_ms: int


@dataclass(frozen=True)
class ThresholdSpec:
    """Per-environment definition of "solved": windowed mean must exceed target."""

    target: float
    window: int = DEFAULT_WINDOW


@dataclass
class Manifest:
    env_id: str
    overrides: dict[str, str]
    obs_space: str
    act_space: str
    seed: Optional[int]
    toolkit_version: str


@dataclass
class MonitorLog:
    manifest: Manifest
    episodes: list[EpisodeRecord] = field(default_factory=list)

    def rewards(self) -> list[float]:
        return [ep.total_reward for ep in self.episodes]


# -- serialization ------------------------------------------------------------


def _manifest_line(m: Manifest) -> str:
    return json.dumps(
        {
            "env": m.env_id,
            "overrides": m.overrides,
            "obs_space": m.obs_space,
            "act_space": m.act_space,
            "seed": m.seed,
            "toolkit_version": m.toolkit_version,
        }
    )


def _episode_line(ep: EpisodeRecord) -> str:
    return json.dumps(
        {
            "ep": ep.index,
            "r": ep.total_reward,
            "len": ep.length,
            "trunc": ep.truncated,
            "seed": ep.seed,
            "ms": ep.wall_time_ms,
        }
    )


def serialize_log(log: MonitorLog) -> str:
    lines = [_manifest_line(log.manifest)]
    lines.extend(_episode_line(ep) for ep in log.episodes)
    return "\n".join(lines) + "\n"


def parse_log(text: str) -> MonitorLog:
    """Parse a serialized log. Raises :class:`MalformedLog` with the offending line."""
    lines = text.splitlines()
    if not lines:
        raise MalformedLog("empty log, missing manifest", 1)

    def fail(msg: str, n: int) -> MalformedLog:
        return MalformedLog(msg, n)

    try:
        head = json.loads(lines[0])
        manifest = Manifest(
            env_id=head["env"],
            overrides=dict(head["overrides"]),
            obs_space=head["obs_space"],
            act_space=head["act_space"],
            seed=head["seed"],
            toolkit_version=head["toolkit_version"],
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise fail(f"bad manifest ({exc})", 1) from exc

    episodes = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            episodes.append(
                EpisodeRecord(
                    index=int(rec["ep"]),
                    total_reward=float(rec["r"]),
                    length=int(rec["len"]),
                    seed=rec["seed"],
                    truncated=bool(rec["trunc"]),
                    wall_time_ms=int(rec["ms"]),
                )
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise fail(f"bad episode record ({exc})", n) from exc
    return MonitorLog(manifest, episodes)


def read_log(path: str | Path) -> MonitorLog:
    return parse_log(Path(path).read_text(encoding="utf-8"))


# -- the wrapper --------------------------------------------------------------


class Monitor:
    """Records every reset and step of the wrapped environment.

    Presents the same reset/step/seed/render surface as the wrapped
    environment and is behavior-transparent: it never consumes randomness or
    alters outcomes. Completed episodes accumulate in memory and, when a
    ``log_path`` is given, are appended to the file as they finish so another
    process can tail it. A reset that interrupts an open episode discards the
    partial episode.
    """

    def __init__(
        self,
        env: Environment,
        env_id: str = "",
        overrides: Optional[dict[str, str]] = None,
        log_path: Optional[str | Path] = None,
        toolkit_version: str = "0.1.0",
    ) -> None:
        self.env = env
        self._env_id = env_id
        self._overrides = dict(overrides or {})
        self._toolkit_version = toolkit_version
        self._master_seed: Optional[int] = None
        self._log_path = Path(log_path) if log_path is not None else None
        self._file = None
        self._episodes: list[EpisodeRecord] = []
        self._open = False
        self._ep_reward = 0.0
        self._ep_length = 0
        self._ep_seed: Optional[int] = None
        self._ep_start = 0.0

    # pass-through surface

    @property
    def descriptor(self):
        return self.env.descriptor

    @property
    def observation_space(self):
        return self.env.observation_space

    @property
    def action_space(self):
        return self.env.action_space

    @property
    def reward_range(self):
        return self.env.reward_range

    @property
    def max_episode_steps(self):
        return self.env.max_episode_steps

    @property
    def phase(self):
        return self.env.phase

    @property
    def last_reset_seed(self):
        return self.env.last_reset_seed

    def render(self) -> str:
        return self.env.render()

    def seed(self, seed: int) -> None:
        self._master_seed = seed
        self.env.seed(seed)

    def reset(self, seed: Optional[int] = None) -> Value:
        observation = self.env.reset(seed=seed)
        self.record_reset(self.env.last_reset_seed)
        return observation

    def step(self, action: Value) -> StepOutcome:
        outcome = self.env.step(action)
        self.record_step(outcome)
        return outcome

    # recording

    def record_reset(self, seed: Optional[int] = None) -> None:
        """Open a new episode; an unfinished one is discarded."""
        self._open = True
        self._ep_reward = 0.0
        self._ep_length = 0
        self._ep_seed = seed
        self._ep_start = time.monotonic()

    def record_step(self, outcome: StepOutcome) -> None:
        """Accumulate one step; on ``done`` the episode record is flushed."""
        if not self._open:
            raise NoOpenEpisode("record_step before any recorded reset")
        self._ep_reward += outcome.reward
        self._ep_length += 1
        if outcome.done:
            elapsed_ms = int((time.monotonic() - self._ep_start) * 1000)
            record = EpisodeRecord(
                index=len(self._episodes),
                total_reward=self._ep_reward,
                length=self._ep_length,
                seed=self._ep_seed,
                truncated=outcome.info.get("truncated") == "true",
                wall_time_ms=elapsed_ms,
            )
            self._episodes.append(record)
            self._open = False
            self._flush(record)

    # persistence

    def _manifest(self) -> Manifest:
        return Manifest(
            env_id=self._env_id,
            overrides=self._overrides,
            obs_space=self.env.observation_space.to_text(),
            act_space=self.env.action_space.to_text(),
            seed=self._master_seed,
            toolkit_version=self._toolkit_version,
        )

    def _flush(self, record: EpisodeRecord) -> None:
        if self._log_path is None:
            return
        if self._file is None:
            self._file = open(self._log_path, "w", encoding="utf-8")
            self._file.write(_manifest_line(self._manifest()) + "\n")
        self._file.write(_episode_line(record) + "\n")
        self._file.flush()

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    @property
    def log(self) -> MonitorLog:
        return MonitorLog(self._manifest(), list(self._episodes))

    @property
    def episode_count(self) -> int:
        return len(self._episodes)


# -- metrics ------------------------------------------------------------------


def learning_curve(log: MonitorLog, window: int) -> list[tuple[int, float]]:
    """Moving average of episode reward: entry i covers episodes [i-window+1, i].

    Indices below window-1 are omitted, so the result has
    max(0, episodes - window + 1) entries.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    rewards = log.rewards()
    if not rewards:
        raise EmptyLog("learning_curve needs at least one episode")
    curve = []
    running = 0.0
    for i, r in enumerate(rewards):
        running += r
        if i >= window:
            running -= rewards[i - window]
        if i >= window - 1:
            curve.append((i, running / window))
    return curve


def episodes_to_threshold(log: MonitorLog, spec: ThresholdSpec) -> Optional[int]:
    """Episodes until the windowed mean strictly exceeds the target.

    Returns i+1 for the smallest episode index i whose trailing window mean
    exceeds ``spec.target``, or None when the threshold is never reached.
    """
    rewards = log.rewards()
    running = 0.0
    for i, r in enumerate(rewards):
        running += r
        if i >= spec.window:
            running -= rewards[i - spec.window]
        if i >= spec.window - 1 and running / spec.window > spec.target:
            return i + 1
    return None


def final_performance(log: MonitorLog, tail: int) -> float:
    """Mean total reward over the last ``tail`` episodes."""
    if tail < 1:
        raise ValueError(f"tail must be >= 1, got {tail}")
    rewards = log.rewards()
    if len(rewards) < tail:
        raise InsufficientEpisodes(f"log has {len(rewards)} episodes, need {tail}")
    return sum(rewards[-tail:]) / tail
