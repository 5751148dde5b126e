"""Twin Delayed DDPG agent built on :mod:`semiactive.nn`.

Actions are coil voltages in ``[0, 3]`` V. The actor ends in a range-mapped
tanh; the critics take ``concat(observation, action)`` and end linear.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import nn
from .damper import V_MAX, V_MIN

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "semiactive-td3-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Td3Config:
    gamma: float = 0.8
    actor_lr: float = 0.002
    critic_lr: float = 0.002
    tau: float = 0.006
    policy_delay: int = 2
    explore_sigma: float = 0.3
    explore_sigma_final: float = 0.05
    target_sigma: float = 0.2
    noise_clip: float = 0.5
    batch_size: int = 100
    buffer_capacity: int = 200_000
    warmup_steps: int = 1000
    episodes: int = 60
    hidden: tuple = (400, 300)
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.batch_size < 1 or self.buffer_capacity < 1:
            raise ValueError("batch_size and buffer_capacity must be >= 1")
        if min(self.explore_sigma, self.explore_sigma_final, self.target_sigma, self.noise_clip) < 0:
            raise ValueError("noise scales must be >= 0")
        if not (self.actor_lr > 0 and self.critic_lr > 0):
            raise ValueError("learning rates must be > 0")
        if self.episodes < 0 or self.warmup_steps < 0:
            raise ValueError("episodes and warmup_steps must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Td3Config":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown td3 keys: {sorted(unknown)}")
        d = dict(d)
        if "hidden" in d:
            d["hidden"] = tuple(d["hidden"])
        return cls(**d)


@dataclass
class Transition:
    s: np.ndarray
    a: float
    r: float
    s_next: np.ndarray
    terminal: bool = False


@dataclass
class Batch:
    s: np.ndarray
    a: np.ndarray
    r: np.ndarray
    s_next: np.ndarray
    terminal: np.ndarray

    def __len__(self):
        return self.r.shape[0]

    @classmethod
    def from_transitions(cls, items: list[Transition]) -> "Batch":
        return cls(np.array([t.s for t in items], dtype=np.float64),
                   np.array([[t.a] for t in items], dtype=np.float64),
                   np.array([t.r for t in items], dtype=np.float64),
                   np.array([t.s_next for t in items], dtype=np.float64),
                   np.array([t.terminal for t in items], dtype=bool))


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform sampling with replacement."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = int(capacity)
        self.s = np.zeros((self.capacity, obs_dim))
        self.a = np.zeros((self.capacity, 1))
        self.r = np.zeros(self.capacity)
        self.s_next = np.zeros((self.capacity, obs_dim))
        self.terminal = np.zeros(self.capacity, dtype=bool)
        self.cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def add(self, tr: Transition) -> None:
        i = self.cursor
        self.s[i] = tr.s
        self.a[i, 0] = tr.a
        self.r[i] = tr.r
        self.s_next[i] = tr.s_next
        self.terminal[i] = tr.terminal
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample_indices(self, k: int, rng: np.random.Generator) -> np.ndarray:
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        return rng.integers(0, self.size, size=k)

    def sample(self, k: int, rng: np.random.Generator) -> Batch:
        idx = self.sample_indices(k, rng)
        return Batch(self.s[idx], self.a[idx], self.r[idx], self.s_next[idx], self.terminal[idx])


@dataclass
class Td3Agent:
    config: Td3Config
    obs_dim: int
    actor: nn.Mlp
    actor_target: nn.Mlp
    critic1: nn.Mlp
    critic2: nn.Mlp
    critic1_target: nn.Mlp
    critic2_target: nn.Mlp
    actor_opt: nn.AdamState
    critic1_opt: nn.AdamState
    critic2_opt: nn.AdamState
    rng: np.random.Generator
    critic_updates: int = 0
    actor_updates: int = 0
    env_steps: int = 0

    def networks(self) -> dict[str, nn.Mlp]:
        return {"actor": self.actor, "actor_target": self.actor_target,
                "critic1": self.critic1, "critic2": self.critic2,
                "critic1_target": self.critic1_target, "critic2_target": self.critic2_target}

    def checksum(self) -> float:
        """Order-sensitive parameter fingerprint, for determinism checks."""
        total = 0.0
        for i, net in enumerate(self.networks().values()):
            for j, p in enumerate(net.params()):
                total += (i + 1) * (j + 1) * float(np.sum(p * np.arange(1, p.size + 1).reshape(p.shape)))
        return total


def make_agent(obs_dim: int, cfg: Td3Config = Td3Config()) -> Td3Agent:
    rng = np.random.default_rng(cfg.seed)
    actor = nn.init_mlp([obs_dim, *cfg.hidden, 1], rng, "tanh_range", V_MIN, V_MAX)
    critic1 = nn.init_mlp([obs_dim + 1, *cfg.hidden, 1], rng)
    critic2 = nn.init_mlp([obs_dim + 1, *cfg.hidden, 1], rng)
    return Td3Agent(cfg, obs_dim, actor, actor.copy(), critic1, critic2, critic1.copy(), critic2.copy(),
                    nn.AdamState.for_net(actor), nn.AdamState.for_net(critic1), nn.AdamState.for_net(critic2), rng)


def _sa(s: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.concatenate([s, a.reshape(-1, 1)], axis=1)


def select_action(agent: Td3Agent, s, explore: bool = False, rng=None, sigma: float | None = None) -> float:
    """Deterministic actor output, optionally plus Gaussian exploration noise, clamped to [0, 3] V."""
    a = float(nn.forward(agent.actor, s)[0])
    if explore:
        sigma = agent.config.explore_sigma if sigma is None else sigma
        if sigma > 0:
            a += float((rng or agent.rng).normal(0.0, sigma))
    return min(max(a, V_MIN), V_MAX)


def smoothed_target_action(agent: Td3Agent, s_next, rng=None) -> np.ndarray:
    """Target-actor action with clipped Gaussian smoothing noise, shape ``(batch, 1)``."""
    s_next = np.atleast_2d(s_next)
    a = nn.forward(agent.actor_target, s_next)
    cfg = agent.config
    if cfg.target_sigma > 0:
        noise = (rng or agent.rng).normal(0.0, cfg.target_sigma, size=a.shape)
        a = a + np.clip(noise, -cfg.noise_clip, cfg.noise_clip)
    return np.clip(a, V_MIN, V_MAX)


def compute_targets(agent: Td3Agent, batch: Batch, rng=None) -> np.ndarray:
    """Clipped double-Q targets ``r + gamma * min(Q1', Q2')``; terminal rows get ``r``."""
    a_next = smoothed_target_action(agent, batch.s_next, rng)
    sa = _sa(batch.s_next, a_next)
    q = np.minimum(nn.forward(agent.critic1_target, sa)[:, 0], nn.forward(agent.critic2_target, sa)[:, 0])
    return batch.r + agent.config.gamma * np.where(batch.terminal, 0.0, q)


def critic_loss_and_grad(critic: nn.Mlp, batch: Batch, y: np.ndarray) -> tuple[float, nn.GradientSet]:
    sa = _sa(batch.s, batch.a)
    q, cache = nn.forward_cached(critic, sa)
    err = q[:, 0] - y
    grads, _ = nn.backward(critic, sa, (2.0 / len(y)) * err[:, None], cache)
    return float(np.mean(err * err)), grads


def update_critics(agent: Td3Agent, batch: Batch, rng=None) -> tuple[float, float]:
    """One Adam descent step on each critic's mean squared error; returns the pre-step losses."""
    y = compute_targets(agent, batch, rng)
    losses = []
    for critic, opt in ((agent.critic1, agent.critic1_opt), (agent.critic2, agent.critic2_opt)):
        loss, grads = critic_loss_and_grad(critic, batch, y)
        nn.adam_step(critic, grads, opt, agent.config.critic_lr, "descent")
        losses.append(loss)
    agent.critic_updates += 1
    return losses[0], losses[1]


def actor_objective_and_grad(agent: Td3Agent, states: np.ndarray) -> tuple[float, nn.GradientSet]:
    """Mean ``Q1(s, mu(s))`` and its gradient w.r.t. the actor parameters."""
    a, actor_cache = nn.forward_cached(agent.actor, states)
    sa = _sa(states, a)
    q, critic_cache = nn.forward_cached(agent.critic1, sa)
    k = states.shape[0]
    _, dq_dsa = nn.backward(agent.critic1, sa, np.full((k, 1), 1.0 / k), critic_cache, param_grads=False)
    grads, _ = nn.backward(agent.actor, states, dq_dsa[:, -1:], actor_cache)
    return float(np.mean(q[:, 0])), grads


def update_actor(agent: Td3Agent, batch: Batch) -> float:
    """One Adam ascent step of the actor on mean ``Q1(s, mu(s))``; returns the pre-step objective."""
    j, grads = actor_objective_and_grad(agent, batch.s)
    nn.adam_step(agent.actor, grads, agent.actor_opt, agent.config.actor_lr, "ascent")
    agent.actor_updates += 1
    return j


def soft_update(agent: Td3Agent, tau: float | None = None) -> None:
    tau = agent.config.tau if tau is None else tau
    nn.soft_update(agent.critic1_target, agent.critic1, tau)
    nn.soft_update(agent.critic2_target, agent.critic2, tau)
    nn.soft_update(agent.actor_target, agent.actor, tau)


def train_step(agent: Td3Agent, batch: Batch) -> dict:
    """Critic update every call; actor and targets every ``policy_delay`` critic updates."""
    l1, l2 = update_critics(agent, batch)
    out = {"critic1_loss": l1, "critic2_loss": l2}
    if agent.critic_updates % agent.config.policy_delay == 0:
        out["actor_objective"] = update_actor(agent, batch)
        soft_update(agent)
    return out


def exploration_sigma(cfg: Td3Config, episode: int) -> float:
    """Linear decay from ``explore_sigma`` to ``explore_sigma_final`` across the episodes."""
    if cfg.episodes <= 1:
        return cfg.explore_sigma
    frac = min(episode / (cfg.episodes - 1), 1.0)
    return cfg.explore_sigma + frac * (cfg.explore_sigma_final - cfg.explore_sigma)


def train(env, cfg: Td3Config = Td3Config(), agent: Td3Agent | None = None,
          buffer: ReplayBuffer | None = None) -> tuple[Td3Agent, list[float]]:
    """Run ``cfg.episodes`` training episodes on ``env``.

    ``env`` needs ``reset() -> obs`` and ``step(a) -> (obs, reward, done, info)``.
    The first ``warmup_steps`` actions are uniform in [0, 3] V; learning
    starts once warmup is over and the buffer holds a full batch. Episodes
    end on the time limit, so transitions are stored as non-terminal.
    """
    obs = np.asarray(env.reset(), dtype=np.float64)
    if agent is None:
        agent = make_agent(obs.size, cfg)
    if buffer is None:
        buffer = ReplayBuffer(cfg.buffer_capacity, agent.obs_dim)
    returns = []
    for episode in range(cfg.episodes):
        obs = np.asarray(env.reset(), dtype=np.float64)
        sigma = exploration_sigma(cfg, episode)
        total, done = 0.0, False
        while not done:
            if agent.env_steps < cfg.warmup_steps:
                a = float(agent.rng.uniform(V_MIN, V_MAX))
            else:
                a = select_action(agent, obs, explore=True, sigma=sigma)
            obs_next, r, done, _ = env.step(a)
            obs_next = np.asarray(obs_next, dtype=np.float64)
            buffer.add(Transition(obs, a, r, obs_next, False))
            agent.env_steps += 1
            total += r
            obs = obs_next
            if agent.env_steps >= cfg.warmup_steps and len(buffer) >= cfg.batch_size:
                train_step(agent, buffer.sample(cfg.batch_size, agent.rng))
        returns.append(total)
        log.info("episode %d return %.4f sigma %.3f", episode, total, sigma)
    return agent, returns


class Td3Controller:
    """Deterministic policy wrapper for :func:`semiactive.sim.simulate`."""

    def __init__(self, agent: Td3Agent):
        self.agent = agent

    def reset(self):
        pass

    def __call__(self, m) -> float:
        return select_action(self.agent, m.obs, explore=False)


def agent_to_dict(agent: Td3Agent) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "td3": agent.config.to_dict(),
        "obs_dim": agent.obs_dim,
        "seed": agent.config.seed,
        "networks": {k: nn.net_to_dict(v) for k, v in agent.networks().items()},
        "optimizers": {"actor": nn.adam_to_dict(agent.actor_opt),
                       "critic1": nn.adam_to_dict(agent.critic1_opt),
                       "critic2": nn.adam_to_dict(agent.critic2_opt)},
        "counters": {"critic_updates": agent.critic_updates, "actor_updates": agent.actor_updates,
                     "env_steps": agent.env_steps},
        "rng_state": agent.rng.bit_generator.state,
    }


def agent_from_dict(d: dict) -> Td3Agent:
    if d.get("format") != CHECKPOINT_FORMAT:
        raise ValueError("not a TD3 checkpoint")
    if d.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {d.get('version')}")
    cfg = Td3Config.from_dict(d["td3"])
    nets = {k: nn.net_from_dict(v) for k, v in d["networks"].items()}
    rng = np.random.default_rng()
    rng.bit_generator.state = d["rng_state"]
    return Td3Agent(cfg, int(d["obs_dim"]), nets["actor"], nets["actor_target"], nets["critic1"], nets["critic2"],
                    nets["critic1_target"], nets["critic2_target"],
                    nn.adam_from_dict(d["optimizers"]["actor"], nets["actor"]),
                    nn.adam_from_dict(d["optimizers"]["critic1"], nets["critic1"]),
                    nn.adam_from_dict(d["optimizers"]["critic2"], nets["critic2"]),
                    rng, **d["counters"])
