#!/usr/bin/env python3
"""Twin Delayed DDPG: twin critics, target smoothing, delayed actor updates."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from src.monitoring.metrics import metrics, timed_operation
from src.monitoring.structured_logging import get_structured_logger
from src.publisher.artifacts import TrainingLogWriter
from src.td3.mlp import Mlp, MlpGrads, OutputActivation
from src.td3.optim import Adam
from src.td3.replay_buffer import Batch, ReplayBuffer

logger = logging.getLogger(__name__)
structured = get_structured_logger(__name__)

Array = NDArray[np.float64]


class Environment(Protocol):
    """Step-then-observe contract the trainer drives."""
    observation_size: int
    action_size: int
    action_low: float
    action_high: float

    def reset(self, seed: Optional[int] = None) -> Array: ...

    def step(self, action: Array) -> Tuple[Array, float, bool, Dict[str, Any]]: ...


@dataclass
class Td3Config:
    """Noise scales are fractions of the action range (action_high - action_low)."""
    gamma: float = 0.99
    rho: float = 0.995
    expl_noise: float = 0.1
    smooth_noise: float = 0.2
    noise_clip: float = 0.2
    policy_delay: int = 2
    batch_size: int = 64
    buffer_size: int = 100_000
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    warmup_steps: int = 500
    hidden_sizes: Tuple[int, ...] = (400, 300)
    action_low: float = 0.0
    action_high: float = 1.0
    episodes: int = 200
    updates_per_step: int = 1
    eval_episodes: int = 10

    @property
    def action_range(self) -> float:
        return self.action_high - self.action_low

    def validate(self) -> List[str]:
        issues = []
        if not 0 <= self.gamma < 1:
            issues.append("td3.gamma must be in [0, 1)")
        if not 0 < self.rho < 1:
            issues.append("td3.rho must be in (0, 1)")
        if self.noise_clip <= 0:
            issues.append("td3.noise_clip must be > 0")
        if self.expl_noise < 0 or self.smooth_noise < 0:
            issues.append("td3 noise scales must be >= 0")
        if self.policy_delay < 1:
            issues.append("td3.policy_delay must be >= 1")
        if self.batch_size < 1:
            issues.append("td3.batch_size must be >= 1")
        if self.buffer_size < self.batch_size:
            issues.append("td3.buffer_size must be >= td3.batch_size")
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            issues.append("td3 learning rates must be > 0")
        if self.warmup_steps < 0:
            issues.append("td3.warmup_steps must be >= 0")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            issues.append("td3.hidden_sizes must be non-empty positive sizes")
        if not self.action_high > self.action_low:
            issues.append("td3.action_high must be > td3.action_low")
        if self.episodes < 1:
            issues.append("td3.episodes must be >= 1")
        if self.updates_per_step < 1:
            issues.append("td3.updates_per_step must be >= 1")
        if self.eval_episodes < 1:
            issues.append("td3.eval_episodes must be >= 1")
        return issues


@dataclass
class Td3Params:
    """Online networks, their target copies and optimizer state."""
    actor: Mlp
    critic1: Mlp
    critic2: Mlp
    actor_target: Mlp
    critic1_target: Mlp
    critic2_target: Mlp
    actor_opt: Adam
    critic1_opt: Adam
    critic2_opt: Adam
    updates: int = 0

    @classmethod
    def from_networks(cls, actor: Mlp, critic1: Mlp, critic2: Mlp, cfg: Td3Config) -> "Td3Params":
        """Targets start as exact copies of the online networks."""
        return cls(
            actor=actor,
            critic1=critic1,
            critic2=critic2,
            actor_target=actor.copy(),
            critic1_target=critic1.copy(),
            critic2_target=critic2.copy(),
            actor_opt=Adam.for_params(actor.parameters(), cfg.actor_lr),
            critic1_opt=Adam.for_params(critic1.parameters(), cfg.critic_lr),
            critic2_opt=Adam.for_params(critic2.parameters(), cfg.critic_lr),
        )

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, cfg: Td3Config, rng: np.random.Generator) -> "Td3Params":
        hidden = tuple(cfg.hidden_sizes)
        actor = Mlp.initialize(
            (obs_dim, *hidden, action_dim), rng,
            OutputActivation.SQUASH, cfg.action_low, cfg.action_high,
        )
        critic1 = Mlp.initialize((obs_dim + action_dim, *hidden, 1), rng)
        critic2 = Mlp.initialize((obs_dim + action_dim, *hidden, 1), rng)
        return cls.from_networks(actor, critic1, critic2, cfg)

    @property
    def obs_dim(self) -> int:
        return self.actor.input_size

    @property
    def action_dim(self) -> int:
        return self.actor.output_size

    def act(self, obs: Array) -> Array:
        """Deterministic policy action."""
        return self.actor(obs)


def _q(critic: Mlp, states: Array, actions: Array) -> Array:
    return critic(np.concatenate([states, actions], axis=1))[:, 0]


def smoothed_target_action(
    params: Td3Params,
    next_states: Array,
    cfg: Td3Config,
    noise: Array,
) -> Array:
    """clip(mu_target(s') + clip(noise, -c, c), low, high)"""
    clip = cfg.noise_clip * cfg.action_range
    mu = params.actor_target(next_states)
    return np.clip(mu + np.clip(noise, -clip, clip), cfg.action_low, cfg.action_high)


def td_target(
    rewards: Array,
    dones: Array,
    next_states: Array,
    cfg: Td3Config,
    params: Td3Params,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[Array] = None,
) -> Array:
    """y = r + gamma (1 - d) min(Q_target1, Q_target2)(s', a'(s'))

    Smoothing noise is drawn from rng unless given explicitly.
    """
    next_states = np.atleast_2d(next_states)
    if noise is None:
        rng = rng or np.random.default_rng()
        noise = rng.normal(
            0.0, cfg.smooth_noise * cfg.action_range,
            size=(next_states.shape[0], params.action_dim),
        )
    next_actions = smoothed_target_action(params, next_states, cfg, noise)
    q_min = np.minimum(
        _q(params.critic1_target, next_states, next_actions),
        _q(params.critic2_target, next_states, next_actions),
    )
    return np.asarray(rewards, dtype=np.float64) + cfg.gamma * (1.0 - np.asarray(dones)) * q_min


def critic_loss_and_grads(critic: Mlp, batch: Batch, y: Array) -> Tuple[float, MlpGrads]:
    """Mean squared TD error and its parameter gradients."""
    q, cache = critic.forward(np.concatenate([batch.states, batch.actions], axis=1))
    err = q[:, 0] - y
    loss = float(np.mean(err ** 2))
    grads, _ = critic.backward(cache, (2.0 / len(y)) * err[:, None])
    return loss, grads


def critic_update(
    batch: Batch,
    params: Td3Params,
    cfg: Td3Config,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[Array] = None,
) -> float:
    """One optimizer step for both critics; returns the mean of their losses."""
    y = td_target(batch.rewards, batch.dones, batch.next_states, cfg, params, rng, noise)
    losses = []
    for critic, opt in ((params.critic1, params.critic1_opt), (params.critic2, params.critic2_opt)):
        loss, grads = critic_loss_and_grads(critic, batch, y)
        opt.step(critic.parameters(), grads.arrays())
        losses.append(loss)
    params.updates += 1
    return float(np.mean(losses))


def policy_gradient_step(params: Td3Params, states: Array, dq_da: Array) -> None:
    """Ascend mean Q by chaining dQ/da (one row per state) through the actor."""
    _, cache = params.actor.forward(states)
    grads, _ = params.actor.backward(cache, dq_da / states.shape[0])
    params.actor_opt.step(params.actor.parameters(), grads.scaled(-1.0).arrays())


def actor_update(batch: Batch, params: Td3Params, cfg: Td3Config) -> float:
    """Delayed branch: one actor ascent step on Q1(s, mu(s)), then polyak targets.

    Returns the mean Q1 value before the step.
    """
    states = batch.states
    actions = params.actor(states)
    q, cache = params.critic1.forward(np.concatenate([states, actions], axis=1))
    _, dx = params.critic1.backward(cache, np.ones_like(q))
    policy_gradient_step(params, states, dx[:, params.obs_dim:])

    polyak_update(params.actor_target, params.actor, cfg.rho)
    polyak_update(params.critic1_target, params.critic1, cfg.rho)
    polyak_update(params.critic2_target, params.critic2, cfg.rho)
    return float(np.mean(q))


def polyak_update(target: Mlp, online: Mlp, rho: float) -> None:
    """target <- rho * target + (1 - rho) * online, in place."""
    for t, o in zip(target.parameters(), online.parameters()):
        t *= rho
        t += (1.0 - rho) * o


def episode_seed(seed: int, episode: int) -> int:
    return int(np.random.SeedSequence([seed, episode]).generate_state(1)[0])


@dataclass
class EpisodeLog:
    episode: int
    steps: int
    episode_return: float
    critic_loss_mean: Optional[float]


@dataclass
class TrainingResult:
    params: Td3Params
    episodes: List[EpisodeLog] = field(default_factory=list)
    actions_in_range: bool = True

    @property
    def returns(self) -> List[float]:
        return [e.episode_return for e in self.episodes]


@timed_operation("td3.train")
def train(
    env: Environment,
    cfg: Td3Config,
    seed: int = 0,
    episodes: Optional[int] = None,
    log_path: Optional[Path | str] = None,
    params: Optional[Td3Params] = None,
    progress: bool = False,
) -> TrainingResult:
    """Run TD3 for a budget of episodes.

    The first cfg.warmup_steps actions are uniform random; afterwards actions
    are the policy output plus clipped Gaussian noise. Critics update every
    round, the actor and targets every cfg.policy_delay rounds. Everything is
    reproducible from `seed`; episode k resets the environment with a seed
    derived from (seed, k).
    """
    budget = episodes if episodes is not None else cfg.episodes
    rng = np.random.default_rng(seed)
    params = params or Td3Params.create(env.observation_size, env.action_size, cfg, rng)
    buffer = ReplayBuffer(cfg.buffer_size, env.observation_size, env.action_size)
    result = TrainingResult(params)
    total_steps = 0

    with TrainingLogWriter(log_path) as log:
        for episode in tqdm(range(budget), desc="td3", disable=not progress):
            obs = env.reset(seed=episode_seed(seed, episode))
            done = False
            episode_return, steps, losses = 0.0, 0, []
            while not done:
                if total_steps < cfg.warmup_steps:
                    action = rng.uniform(cfg.action_low, cfg.action_high, size=env.action_size)
                else:
                    noise = rng.normal(0.0, cfg.expl_noise * cfg.action_range, size=env.action_size)
                    action = np.clip(params.act(obs) + noise, cfg.action_low, cfg.action_high)
                if np.any(action < cfg.action_low) or np.any(action > cfg.action_high):
                    result.actions_in_range = False

                next_obs, reward, done, _ = env.step(action)
                buffer.add(obs, action, reward, next_obs, done)
                obs = next_obs
                episode_return += reward
                steps += 1
                total_steps += 1

                if total_steps > cfg.warmup_steps and len(buffer) >= cfg.batch_size:
                    for _ in range(cfg.updates_per_step):
                        batch = buffer.sample(cfg.batch_size, rng)
                        losses.append(critic_update(batch, params, cfg, rng))
                        if params.updates % cfg.policy_delay == 0:
                            actor_update(batch, params, cfg)

            loss_mean = float(np.mean(losses)) if losses else None
            log.write(episode, steps, episode_return, loss_mean)
            metrics.record_value("td3.episode_return", episode_return)
            result.episodes.append(EpisodeLog(episode, steps, episode_return, loss_mean))
            structured.debug(
                "Training episode finished",
                episode=episode, steps=steps, episode_return=episode_return,
                critic_loss_mean=loss_mean,
            )

    tail = result.returns[-50:]
    structured.info(
        "Training finished",
        episodes=budget,
        total_steps=total_steps,
        updates=params.updates,
        final_mean_return=float(np.mean(tail)) if tail else None,
    )
    return result


@dataclass
class Evaluation:
    """Greedy rollouts: per-seed returns, per-step concentration, rollout logs."""
    returns: List[float]
    concentration: List[List[float]]
    rollouts: List[List[Dict[str, Any]]]

    @property
    def mean_return(self) -> float:
        return float(np.mean(self.returns)) if self.returns else 0.0

    @property
    def mean_concentration(self) -> float:
        values = [c for episode in self.concentration for c in episode]
        return float(np.mean(values)) if values else 0.0


def evaluate_policy(env: Environment, params: Td3Params, seeds: Sequence[int]) -> Evaluation:
    """Roll out the deterministic actor once per reset seed."""
    returns, concentration, rollouts = [], [], []
    for seed in seeds:
        obs = env.reset(seed=seed)
        done, total, per_step = False, 0.0, []
        while not done:
            obs, reward, done, info = env.step(params.act(obs))
            total += reward
            per_step.append(float(info.get('concentration', 0.0)))
        returns.append(total)
        concentration.append(per_step)
        rollouts.append(list(getattr(env, 'rollout', [])))
    return Evaluation(returns, concentration, rollouts)
