"""Episodic environment abstraction.

An environment runs reset/step episodes. ``reset`` samples a fresh initial
state and returns the first observation; ``step`` advances the simulation by
one action and returns a :class:`StepOutcome` whose ``done`` flag marks the
terminal step. Stepping a terminal episode is a hard error, never a no-op.

All stochasticity flows through explicit seeded generators so that
``(seed, action sequence)`` fully determines a trajectory.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .spaces import Space, Value

# Episode seeds derived from the ambient stream live in [0, 2**63).
_SEED_BOUND = 2**63


class EnvKitError(Exception):
    """Base class for all toolkit errors."""


class IllegalPhase(EnvKitError):
    """step was called outside an in-progress episode."""


class InvalidAction(EnvKitError):
    """The action is not a member of the environment's action space."""


class EpisodePhase(enum.Enum):
    NEEDS_RESET = "needs_reset"
    IN_PROGRESS = "in_progress"
    TERMINAL = "terminal"


class StepOutcome(NamedTuple):
    """One step's result: observation, reward, done flag, diagnostic info.

    ``info`` maps short string keys to strings and is diagnostic only; agents
    must not read control signals from it. A capped episode carries
    ``info["truncated"] == "true"`` on its final step.
    """

    observation: Value
    reward: float
    done: bool
    info: dict[str, str]


@dataclass(frozen=True)
class EnvDescriptor:
    """Static description of an environment's interface and limits."""

    observation_space: Space
    action_space: Space
    reward_range: tuple[float, float]
    max_episode_steps: Optional[int]


class Environment:
    """Base class implementing the episode lifecycle and seeding contract.

    Subclasses provide the dynamics through two hooks:

    - ``_reset_state(rng) -> observation``: sample the initial state.
    - ``_transition(action, rng) -> (observation, reward, done, info)``:
      advance one step. ``action`` has already been validated against the
      action space.

    The base class owns phase tracking, action validation, step counting and
    truncation at ``max_episode_steps``. Randomness comes from a per-episode
    generator: an explicit ``reset(seed=...)`` keys the episode directly,
    otherwise the episode seed is drawn from the ambient stream installed by
    ``seed()``. Instances are single-owner and not thread-safe.
    """

    def __init__(self, descriptor: EnvDescriptor) -> None:
        self._descriptor = descriptor
        self._ambient_rng = np.random.default_rng()
        self._episode_rng: Optional[np.random.Generator] = None
        self._phase = EpisodePhase.NEEDS_RESET
        self._steps = 0
        self._last_reset_seed: Optional[int] = None

    # -- static interface ---------------------------------------------------

    @property
    def descriptor(self) -> EnvDescriptor:
        return self._descriptor

    @property
    def observation_space(self) -> Space:
        return self._descriptor.observation_space

    @property
    def action_space(self) -> Space:
        return self._descriptor.action_space

    @property
    def reward_range(self) -> tuple[float, float]:
        return self._descriptor.reward_range

    @property
    def max_episode_steps(self) -> Optional[int]:
        return self._descriptor.max_episode_steps

    @property
    def phase(self) -> EpisodePhase:
        return self._phase

    @property
    def last_reset_seed(self) -> Optional[int]:
        """Seed that keyed the current episode (explicit or ambient-derived)."""
        return self._last_reset_seed

    # -- lifecycle ----------------------------------------------------------

    def seed(self, seed: int) -> None:
        """Key all subsequent stochasticity to a deterministic stream."""
        self._ambient_rng = np.random.default_rng(seed)

    def reset(self, seed: Optional[int] = None) -> Value:
        """Start a new episode and return its first observation.

        Legal in any phase. An explicit ``seed`` takes precedence over the
        ambient stream for this episode; without one, the episode seed is
        drawn from the ambient stream so a single ``seed()`` call reproduces
        every following episode.
        """
        if seed is None:
            seed = int(self._ambient_rng.integers(_SEED_BOUND))
        self._episode_rng = np.random.default_rng(seed)
        self._last_reset_seed = seed
        self._steps = 0
        observation = self._reset_state(self._episode_rng)
        self._phase = EpisodePhase.IN_PROGRESS
        return observation

    def step(self, action: Value) -> StepOutcome:
        """Advance one step. Only legal while an episode is in progress."""
        if self._phase is EpisodePhase.NEEDS_RESET:
            raise IllegalPhase("step before reset; call reset() first")
        if self._phase is EpisodePhase.TERMINAL:
            raise IllegalPhase("step after a terminal step; call reset() first")
        if not self.action_space.contains(action):
            raise InvalidAction(f"action {action!r} not in {self.action_space!r}")

        observation, reward, done, info = self._transition(action, self._episode_rng)
        self._steps += 1
        cap = self._descriptor.max_episode_steps
        if not done and cap is not None and self._steps >= cap:
            done = True
            info = dict(info)
            info["truncated"] = "true"
        if done:
            self._phase = EpisodePhase.TERMINAL
        return StepOutcome(observation, float(reward), done, info)

    def render(self) -> str:
        """One-line plain-text view of the current state, for debugging."""
        raise NotImplementedError

    # -- subclass hooks -----------------------------------------------------

    def _reset_state(self, rng: np.random.Generator) -> Value:
        raise NotImplementedError

    def _transition(
        self, action: Value, rng: np.random.Generator
    ) -> tuple[Value, float, bool, dict[str, str]]:
        raise NotImplementedError
