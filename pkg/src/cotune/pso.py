"""Scalar global-best particle swarm minimizer.

Deliberately small: one dimension, box bounds, seeded uniform initialization,
zero initial velocities, positions clamped to the bounds every step. Personal
and global bests update only on strict improvement, so ties keep the
incumbent and the whole trajectory is a deterministic function of
(objective, config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PsoConfig:
    particles: int = 10
    iterations: int = 20
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        if self.particles < 2:
            raise ConfigError("particles must be >= 2")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not self.lower < self.upper:
            raise ConfigError(f"invalid bounds: lower={self.lower} must be < upper={self.upper}")


@dataclass(frozen=True)
class PsoResult:
    x_best: float
    f_best: float
    evaluations: int


def minimize_scalar(
    objective: Callable[[float], float],
    cfg: PsoConfig | None = None,
    seed: int = 0,
    init_positions: Sequence[float] | None = None,
) -> PsoResult:
    """Minimize objective on [cfg.lower, cfg.upper].

    init_positions, when given, overrides the first len(init_positions)
    seeded starting positions (clipped to bounds); useful for warm-starting
    the swarm at known reference points. Total objective evaluations are
    always particles * (iterations + 1).
    """
    cfg = cfg or PsoConfig()
    rng = np.random.default_rng(seed)

    x = rng.uniform(cfg.lower, cfg.upper, cfg.particles)
    if init_positions is not None:
        if len(init_positions) > cfg.particles:
            raise ConfigError("more init_positions than particles")
        for i, p in enumerate(init_positions):
            x[i] = min(max(float(p), cfg.lower), cfg.upper)
    v = np.zeros(cfg.particles)

    f = np.array([objective(float(xi)) for xi in x])
    pbest_x = x.copy()
    pbest_f = f.copy()
    g = int(np.argmin(pbest_f))  # first index at the minimum
    gbest_x = float(pbest_x[g])
    gbest_f = float(pbest_f[g])

    evaluations = cfg.particles
    for _ in range(cfg.iterations):
        r1 = rng.uniform(size=cfg.particles)
        r2 = rng.uniform(size=cfg.particles)
        v = cfg.inertia * v + cfg.cognitive * r1 * (pbest_x - x) + cfg.social * r2 * (gbest_x - x)
        x = np.clip(x + v, cfg.lower, cfg.upper)
        for i in range(cfg.particles):
            fi = objective(float(x[i]))
            evaluations += 1
            if fi < pbest_f[i]:
                pbest_f[i] = fi
                pbest_x[i] = x[i]
                if fi < gbest_f:
                    gbest_f = float(fi)
                    gbest_x = float(x[i])

    return PsoResult(x_best=gbest_x, f_best=gbest_f, evaluations=evaluations)
