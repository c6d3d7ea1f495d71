"""Round-synchronous update rules and the simulation engine.

Three update rules share one protocol (decide, observe the revealed loss,
gossip, update):

* gradient-free: two zeroth-order queries per agent build the sphere-sampling
  gradient estimate (dim/delta) * (f(x + delta*u) - f(x)) * u, the gossip
  intermediate takes a step against it, and the result is projected onto the
  shrunk box so every query point stays feasible;
* projection-free: a linear minimization oracle picks a box vertex against
  the exact gradient and the new decision is the gossip intermediate plus a
  line-search (or fixed) multiple of the vertex direction -- no projection;
* projected gradient descent: the classical baseline, gossip then a projected
  exact-gradient step.

Within a round every agent reads only the previous round's global state and
its own RNG stream, so per-agent updates are order-independent; the round
boundary is a hard barrier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationOutsideBaseSet, OutOfFeasibleSet
from .geometry import BoxSet, ShrunkSet, ball_batch, lmo, sample_unit_sphere
from .linesearch import golden_section
from .objectives import ObjectiveStream, round_optimum
from .trace import Trace

LINE_SEARCH_TOL = 1e-10


def splitmix64(value: int) -> int:
    """One step of the splitmix64 mixer; maps any 64-bit value to a well-mixed one."""
    z = (value + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def agent_rngs(master_seed: int, n: int) -> list[np.random.Generator]:
    """One independent generator per agent: seed XOR agent index, mixed."""
    master = int(master_seed) & 0xFFFFFFFFFFFFFFFF
    return [
        np.random.default_rng(splitmix64(master ^ (i + 1)))
        for i in range(n)
    ]


@dataclass(frozen=True)
class StepSchedule:
    """alpha_t = c / t**p; constant when p = 0."""

    c: float
    p: float = 0.0

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("step scale must be positive")
        if self.p < 0.0:
            raise ValueError("step exponent must be >= 0 (non-increasing schedule)")

    def __call__(self, t: int) -> float:
        return self.c / t**self.p

    @property
    def constant(self) -> bool:
        return self.p == 0.0


ALGORITHM_KINDS = ("gradient_free", "projection_free", "projected_gd")
LINE_SEARCH_MODES = ("exact_1d", "fixed_alpha0")


@dataclass(frozen=True)
class AlgorithmConfig:
    kind: str
    step: StepSchedule | None = None
    delta: float | None = None
    line_search: str = "fixed_alpha0"
    alpha0: float | None = None
    clamp_to_feasible: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        if self.kind in ("gradient_free", "projected_gd") and self.step is None:
            raise ValueError(f"{self.kind} requires a step schedule")
        if self.kind == "gradient_free":
            if self.delta is None or self.delta <= 0.0:
                raise ValueError("gradient_free requires a positive smoothing delta")
        if self.kind == "projection_free":
            if self.line_search not in LINE_SEARCH_MODES:
                raise ValueError(f"unknown line-search mode {self.line_search!r}")
            if self.line_search == "fixed_alpha0":
                if self.alpha0 is None or not 0.0 < self.alpha0 < 1.0:
                    raise ValueError("fixed_alpha0 mode requires alpha0 in (0, 1)")


@dataclass
class AgentStates:
    """Stacked per-agent state: decisions, last gossip intermediates, error norms."""

    x: np.ndarray         # (n, d)
    z: np.ndarray         # (n, d)
    eps_norm: np.ndarray  # (n,)

    @classmethod
    def initial(cls, x0: np.ndarray) -> "AgentStates":
        # Convention: before any gossip has happened, z := x so the carried
        # consensus error starts at zero.
        x0 = np.asarray(x0, dtype=float)
        return cls(x=x0.copy(), z=x0.copy(), eps_norm=np.zeros(x0.shape[0]))


@dataclass(frozen=True)
class EstimatorRecord:
    """Realized randomness of one gradient-free round."""

    u: np.ndarray  # (n, d) sphere draws
    g: np.ndarray  # (n, d) gradient estimates


def gradient_estimate(
    stream: ObjectiveStream, i: int, t: int, x: np.ndarray, delta: float, u: np.ndarray
) -> np.ndarray:
    """Two-point sphere-sampling gradient estimate at x with draw u.

    Uses only zeroth-order queries.  Raises if the perturbed point x + delta*u
    leaves the base box, which would indicate a broken shrunk set.
    """
    probe = x + delta * u
    if not stream.box.contains(probe, tol=1e-9):
        raise EvaluationOutsideBaseSet(
            f"agent {i} round {t}: perturbed query {probe} outside the box"
        )
    diff = stream.value(i, t, probe, check=False) - stream.value(i, t, x, check=False)
    return (stream.d / delta) * diff * u


@dataclass(frozen=True)
class SmoothedValue:
    value: float
    stderr: float


def smoothed_value(
    stream: ObjectiveStream,
    i: int,
    t: int,
    x,
    delta: float,
    rng: np.random.Generator,
    mc_samples: int,
) -> SmoothedValue:
    """Monte Carlo estimate of the delta-smoothed loss: mean of f(x + delta*v) over ball draws."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    shrunk = ShrunkSet(stream.box, delta)
    if not shrunk.contains(x):
        raise OutOfFeasibleSet("smoothing point must lie in the shrunk set")
    draws = ball_batch(rng, mc_samples, stream.d)
    vals = np.array(
        [stream.value(i, t, x + delta * v, check=False) for v in draws]
    )
    return SmoothedValue(
        value=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / np.sqrt(mc_samples)) if mc_samples > 1 else np.inf,
    )


def gradient_free_step(
    states: AgentStates,
    stream: ObjectiveStream,
    wm,
    shrunk: ShrunkSet,
    t: int,
    alpha_t: float,
    rngs: list[np.random.Generator],
) -> tuple[AgentStates, EstimatorRecord]:
    """One bandit-feedback round: estimate, gossip, step, project onto the shrunk box."""
    n, d = states.x.shape
    u = np.empty((n, d))
    g = np.empty((n, d))
    for i in range(n):
        u[i] = sample_unit_sphere(rngs[i], d)
        g[i] = gradient_estimate(stream, i, t, states.x[i], shrunk.delta, u[i])
    z_new = wm.w @ states.x
    x_new = np.empty_like(states.x)
    for i in range(n):
        x_new[i] = shrunk.project(z_new[i] - alpha_t * g[i])
    eps = np.linalg.norm(x_new - z_new, axis=1)
    return AgentStates(x=x_new, z=z_new, eps_norm=eps), EstimatorRecord(u=u, g=g)


def _line_coefficient(
    stream: ObjectiveStream, i: int, t: int, base: np.ndarray, direction: np.ndarray
) -> float:
    """Exact minimizer of alpha -> f_i^t(base + alpha*direction) over [0, 1]."""
    if float(np.dot(direction, direction)) == 0.0:
        return 0.0
    if hasattr(stream, "line_minimum_coefficient"):
        raw = stream.line_minimum_coefficient(i, t, base, direction)
        return float(min(1.0, max(0.0, raw)))
    return golden_section(
        lambda a: stream.value(i, t, base + a * direction, check=False),
        0.0,
        1.0,
        tol=LINE_SEARCH_TOL,
    )


def projection_free_step(
    states: AgentStates,
    stream: ObjectiveStream,
    wm,
    box: BoxSet,
    t: int,
    line_search: str = "exact_1d",
    alpha0: float | None = None,
    clamp_to_feasible: bool = False,
) -> AgentStates:
    """One projection-free round: vertex oracle, gossip, move along the vertex direction.

    The update x_new = z_new + alpha*(v - x_old) is applied verbatim; it is
    not guaranteed to stay in the box when z_new != x_old, so an optional
    clamp is available (off by default).
    """
    n, _ = states.x.shape
    v = np.empty_like(states.x)
    for i in range(n):
        v[i] = lmo(box, stream.gradient(i, t, states.x[i], check=False))
    z_new = wm.w @ states.x
    x_new = np.empty_like(states.x)
    for i in range(n):
        h = v[i] - states.x[i]
        if line_search == "fixed_alpha0":
            coeff = alpha0
        else:
            coeff = _line_coefficient(stream, i, t, z_new[i], h)
        x_new[i] = z_new[i] + coeff * h
        if clamp_to_feasible:
            x_new[i] = box.project(x_new[i])
    eps = np.linalg.norm(x_new - z_new, axis=1)
    return AgentStates(x=x_new, z=z_new, eps_norm=eps)


def projected_gradient_step(
    states: AgentStates,
    stream: ObjectiveStream,
    wm,
    box: BoxSet,
    t: int,
    alpha_t: float,
) -> AgentStates:
    """One baseline round: gossip, exact-gradient step, projection onto the box."""
    z_new = wm.w @ states.x
    x_new = np.empty_like(states.x)
    for i in range(states.x.shape[0]):
        grad = stream.gradient(i, t, states.x[i], check=False)
        x_new[i] = box.project(z_new[i] - alpha_t * grad)
    eps = np.linalg.norm(x_new - z_new, axis=1)
    return AgentStates(x=x_new, z=z_new, eps_norm=eps)


def run(
    stream: ObjectiveStream,
    wm,
    box: BoxSet,
    cfg: AlgorithmConfig,
    T: int,
    x0: np.ndarray | None = None,
    debug_checks: bool = False,
    config_snapshot: dict | None = None,
) -> Trace:
    """Advance all agents through rounds 1..T and record a complete trace.

    Each round is recorded before its update (decision-then-reveal order);
    the update applied at the final round contributes only the epilogue
    consensus errors.  Identical (config, seed) pairs produce bit-identical
    traces.
    """
    if T < 1:
        raise ValueError("horizon must be >= 1")
    if wm.n != stream.n:
        raise ValueError(f"network has {wm.n} agents, stream has {stream.n}")
    n, d = stream.n, stream.d

    shrunk = None
    if cfg.kind == "gradient_free":
        shrunk = ShrunkSet(box, cfg.delta)
        feasible = shrunk
    else:
        feasible = box

    if x0 is None:
        x0 = np.tile(feasible.project(np.zeros(d)), (n, 1))
    else:
        x0 = np.asarray(x0, dtype=float).reshape(n, d).copy()
        for i in range(n):
            if not feasible.contains(x0[i]):
                raise OutOfFeasibleSet(f"initial decision of agent {i} is infeasible")

    states = AgentStates.initial(x0)
    rngs = agent_rngs(cfg.seed, n) if cfg.kind == "gradient_free" else None

    x_hist = np.empty((T, n, d))
    z_hist = np.empty((T, n, d))
    eps_hist = np.empty((T, n))
    loss_self = np.empty((T, n))
    loss_global = np.empty((T, n))
    x_star = np.empty((T, d))
    f_star = np.empty(T)
    g_norm = np.zeros((T, n))

    for t in range(1, T + 1):
        row = t - 1
        x_hist[row] = states.x
        z_hist[row] = states.z
        eps_hist[row] = states.eps_norm
        opt = round_optimum(stream, t, box)
        x_star[row] = opt.x_star
        f_star[row] = opt.f_star
        for i in range(n):
            loss_self[row, i] = stream.value(i, t, states.x[i], check=False)
            loss_global[row, i] = stream.average_value(t, states.x[i], check=False)

        if debug_checks:
            for i in range(n):
                if cfg.kind != "projection_free" and not feasible.contains(states.x[i]):
                    raise OutOfFeasibleSet(
                        f"round {t}: agent {i} decision left the feasible set"
                    )

        if cfg.kind == "gradient_free":
            states, record = gradient_free_step(
                states, stream, wm, shrunk, t, cfg.step(t), rngs
            )
            g_norm[row] = np.linalg.norm(record.g, axis=1)
        elif cfg.kind == "projection_free":
            states = projection_free_step(
                states,
                stream,
                wm,
                box,
                t,
                line_search=cfg.line_search,
                alpha0=cfg.alpha0,
                clamp_to_feasible=cfg.clamp_to_feasible,
            )
        else:
            states = projected_gradient_step(states, stream, wm, box, t, cfg.step(t))

    snapshot = {
        "algorithm": cfg.kind,
        "seed": cfg.seed,
        "n": n,
        "d": d,
        "T": T,
    }
    if config_snapshot:
        snapshot.update(config_snapshot)
    return Trace(
        algorithm=cfg.kind,
        seed=cfg.seed,
        config=snapshot,
        x=x_hist,
        z=z_hist,
        eps_norm=eps_hist,
        loss_self=loss_self,
        loss_global=loss_global,
        x_star=x_star,
        f_star=f_star,
        g_norm=g_norm,
        final_eps_norm=states.eps_norm.copy(),
    )
