"""Time-varying per-agent convex loss streams.

A stream is a pure function of (agent, round, point): ``value`` and
``gradient`` evaluators plus the constants that the regret bounds consume:

    L    bound on the gradient norm over the feasible box
    L_s  smoothness (curvature) constant
    L_1  bound on the absolute loss value over the box

Agents are indexed 0..n-1; rounds are 1-based because the round index enters
the loss formulas directly.  Evaluators stay defined for every round >= 1
(``horizon`` is the nominal experiment length, not a hard domain bound), which
lets optimum-path diagnostics look one round past the end of a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IndexOutOfRange, OracleDisagreement, OutOfFeasibleSet
from .geometry import BoxSet, ShrunkSet
from .linesearch import golden_section

MEMBERSHIP_TOL = 1e-9
ORACLE_TOL = 1e-5


class ObjectiveStream:
    """Base class; subclasses implement ``_value`` and ``_gradient``.

    The public evaluators validate indices and (optionally) feasibility, then
    delegate.  ``check=False`` skips the membership test for callers that own
    feasibility semantics, e.g. the round engine recording a step rule that
    can leave the box by design.
    """

    def __init__(self, n, d, horizon, box: BoxSet, L, L_s, L_1):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.n = int(n)
        self.d = int(d)
        self.horizon = int(horizon)
        self.box = box
        self.L = float(L)
        self.L_s = float(L_s)
        self.L_1 = float(L_1)

    def _check(self, i: int, t: int, x: np.ndarray, check: bool) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"agent {i} not in range(0, {self.n})")
        if t < 1:
            raise IndexOutOfRange(f"round {t} must be >= 1")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.d,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.d},)")
        if check and not self.box.contains(x, tol=MEMBERSHIP_TOL):
            raise OutOfFeasibleSet(f"point {x} outside the feasible box")
        return x

    def value(self, i: int, t: int, x, check: bool = True) -> float:
        x = self._check(i, t, x, check)
        return float(self._value(i, t, x))

    def gradient(self, i: int, t: int, x, check: bool = True) -> np.ndarray:
        x = self._check(i, t, x, check)
        return np.asarray(self._gradient(i, t, x), dtype=float)

    def average_value(self, t: int, x, check: bool = True) -> float:
        """Average of all agents' losses at a single point."""
        return sum(self.value(i, t, x, check=check) for i in range(self.n)) / self.n

    def batch_average_value(self, t: int, points: np.ndarray) -> np.ndarray:
        """Average loss at many points, shape (count,); no membership checks."""
        return np.array(
            [self.average_value(t, p, check=False) for p in points]
        )

    def _value(self, i, t, x):  # pragma: no cover - interface
        raise NotImplementedError

    def _gradient(self, i, t, x):  # pragma: no cover - interface
        raise NotImplementedError


def power_path(amplitude: float, power: float) -> Callable[[int], float]:
    """Target path t -> amplitude / t**power."""
    return lambda t: amplitude / t**power


class QuadraticTrackingFamily(ObjectiveStream):
    """Losses f_i^t(x) = ||a_i * x - c(t)||^2 with per-agent scale a_i > 0.

    ``target`` maps a round to the common target value (scalar, broadcast to
    every coordinate, or a length-d vector).  Closed forms: the gradient is
    2 a_i (a_i x - c(t)); the unconstrained minimizer of the average loss is
    (sum a_i) c(t) / (sum a_i^2) per coordinate, and the box-constrained
    optimum is its clamp because the average loss is separable.
    """

    def __init__(self, scales, target, box: BoxSet, horizon: int):
        scales = np.atleast_1d(np.asarray(scales, dtype=float))
        if np.any(scales <= 0.0):
            raise ValueError("agent scales must be positive")
        if callable(target):
            self._target = target
        else:
            amplitude, power = target
            self._target = power_path(float(amplitude), float(power))
        self.scales = scales
        L, L_s, L_1 = self._constants(scales, box, horizon)
        super().__init__(
            n=scales.size, d=box.d, horizon=horizon, box=box, L=L, L_s=L_s, L_1=L_1
        )

    def target(self, t: int) -> np.ndarray:
        c = np.asarray(self._target(t), dtype=float)
        if c.ndim == 0:
            c = np.full(self.box.d, float(c))
        return c

    def _target_d(self, t: int, d: int) -> np.ndarray:
        c = np.asarray(self._target(t), dtype=float)
        return np.full(d, float(c)) if c.ndim == 0 else c

    def _constants(self, scales, box, horizon):
        # Worst case over box corners and rounds 1..horizon; exact for fixed t
        # because the per-coordinate deviation maximum is attained at a corner.
        ts = np.arange(1, horizon + 1)
        worst_sq = np.zeros(scales.size)
        for t in ts:
            c = self._target_d(int(t), box.d)
            dev_lo = np.abs(scales[:, None] * box.lower[None, :] - c[None, :])
            dev_hi = np.abs(scales[:, None] * box.upper[None, :] - c[None, :])
            worst_sq = np.maximum(
                worst_sq, np.sum(np.maximum(dev_lo, dev_hi) ** 2, axis=1)
            )
        L = float(np.max(2.0 * scales * np.sqrt(worst_sq)))
        L_s = float(np.max(2.0 * scales**2))
        L_1 = float(np.max(worst_sq))
        return L, L_s, L_1

    def _value(self, i, t, x):
        residual = self.scales[i] * x - self.target(t)
        return float(np.dot(residual, residual))

    def _gradient(self, i, t, x):
        return 2.0 * self.scales[i] * (self.scales[i] * x - self.target(t))

    def unconstrained_optimum(self, t: int) -> np.ndarray:
        """Stationary point of the average loss, before box clamping."""
        return (
            float(np.sum(self.scales)) / float(np.sum(self.scales**2))
        ) * self.target(t)

    def batch_average_value(self, t: int, points: np.ndarray) -> np.ndarray:
        residual = self.scales[None, :, None] * points[:, None, :] - self.target(t)[None, None, :]
        return np.sum(residual**2, axis=2).mean(axis=1)

    def line_minimum_coefficient(self, i: int, t: int, base, direction) -> float:
        """Unclamped minimizer of alpha -> f_i^t(base + alpha * direction)."""
        base = np.atleast_1d(np.asarray(base, dtype=float))
        direction = np.atleast_1d(np.asarray(direction, dtype=float))
        a = self.scales[i]
        denom = a * float(np.dot(direction, direction))
        if denom == 0.0:
            return 0.0
        return float(np.dot(self.target(t) - a * base, direction)) / denom


def paper_tracking_stream(horizon: int = 1000) -> QuadraticTrackingFamily:
    """The built-in 4-agent target-tracking benchmark.

    Scales (1, 2, 3, 6), common target 60/t^2, feasible interval [-10, 10].
    The resulting constants are L = 1440, L_s = 72, L_1 = 14400 (the round-1
    target dominates because the path decays).
    """
    return QuadraticTrackingFamily(
        scales=(1.0, 2.0, 3.0, 6.0),
        target=(60.0, 2.0),
        box=BoxSet.symmetric(10.0, d=1),
        horizon=horizon,
    )


@dataclass(frozen=True)
class RoundOptimum:
    t: int
    x_star: np.ndarray
    f_star: float


def round_optimum_grid(stream: ObjectiveStream, t: int, set_=None, pitch: float | None = None) -> RoundOptimum:
    """Brute-force uniform-grid minimizer of the average loss (oracle path).

    Grid pitch defaults to 1e-3 of the box width per coordinate.  Supported
    for d <= 2; higher dimensions would need infeasibly many grid points.
    """
    set_ = stream.box if set_ is None else set_
    if stream.d > 2:
        raise ValueError("grid oracle supported for d <= 2 only")
    lower, upper = np.asarray(set_.lower), np.asarray(set_.upper)
    axes = []
    for k in range(stream.d):
        width = upper[k] - lower[k]
        step = pitch if pitch is not None else 1e-3 * width
        count = int(np.floor(width / step)) + 1
        axis = lower[k] + step * np.arange(count)
        if axis[-1] < upper[k] - 1e-15:
            axis = np.append(axis, upper[k])
        axes.append(axis)
    if stream.d == 1:
        points = axes[0][:, None]
    else:
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        points = np.column_stack([g0.ravel(), g1.ravel()])
    values = stream.batch_average_value(t, points)
    best = int(np.argmin(values))
    return RoundOptimum(t=t, x_star=points[best].copy(), f_star=float(values[best]))


def _search_optimum(stream: ObjectiveStream, t: int, set_) -> np.ndarray:
    """Minimize the average loss without a closed form.

    Golden-section per the single coordinate in d=1; projected gradient
    descent with a diminishing-then-fixed step otherwise (driven to gradient
    norm 1e-10).
    """
    if stream.d == 1:
        lo, hi = float(set_.lower[0]), float(set_.upper[0])
        x = golden_section(
            lambda v: stream.average_value(t, np.array([v]), check=False), lo, hi
        )
        return np.array([x])
    x = set_.project(np.zeros(stream.d))
    step = 1.0 / max(stream.L_s, 1e-12)
    for _ in range(100_000):
        grad = np.mean(
            [stream.gradient(i, t, x, check=False) for i in range(stream.n)], axis=0
        )
        if np.linalg.norm(grad) <= 1e-10:
            break
        x = set_.project(x - step * grad)
    return x


def round_optimum(
    stream: ObjectiveStream,
    t: int,
    set_=None,
    cross_check: bool = False,
    pitch: float | None = None,
) -> RoundOptimum:
    """Per-round minimizer of the average loss over the set (default: the stream's box).

    Quadratic families use their clamped closed form; other streams fall back
    to search.  With ``cross_check`` the result is compared against the grid
    oracle and a disagreement in optimal value beyond 1e-5 raises.
    """
    if t < 1:
        raise IndexOutOfRange(f"round {t} must be >= 1")
    set_ = stream.box if set_ is None else set_
    if isinstance(stream, QuadraticTrackingFamily):
        x_star = set_.project(stream.unconstrained_optimum(t))
    else:
        x_star = _search_optimum(stream, t, set_)
    f_star = stream.average_value(t, x_star, check=False)
    result = RoundOptimum(t=t, x_star=x_star, f_star=float(f_star))
    if cross_check:
        oracle = round_optimum_grid(stream, t, set_, pitch=pitch)
        if abs(oracle.f_star - result.f_star) > ORACLE_TOL:
            raise OracleDisagreement(
                f"round {t}: closed-form value {result.f_star} vs grid {oracle.f_star}"
            )
    return result


@dataclass(frozen=True)
class AssumptionReport:
    samples: int
    convexity_violation: float
    smoothness_violation: float
    value_excess: float
    gradient_excess: float
    passed: bool


def verify_assumptions(
    stream: ObjectiveStream,
    set_,
    sample_count: int,
    rng: np.random.Generator,
    probe_horizon: int | None = None,
    L: float | None = None,
    L_s: float | None = None,
    L_1: float | None = None,
    tol: float = 1e-9,
) -> AssumptionReport:
    """Monte Carlo audit of convexity, smoothness, and the stream's constants.

    Violations are the worst observed amounts by which an inequality failed
    (0 when it held everywhere).  Constants can be overridden to probe a
    deliberately wrong bound.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    L = stream.L if L is None else L
    L_s = stream.L_s if L_s is None else L_s
    L_1 = stream.L_1 if L_1 is None else L_1
    probe = min(stream.horizon, 64) if probe_horizon is None else probe_horizon
    conv_bad = smooth_bad = value_bad = grad_bad = 0.0
    for _ in range(sample_count):
        x = set_.sample(rng)
        y = set_.sample(rng)
        i = int(rng.integers(stream.n))
        t = int(rng.integers(1, probe + 1))
        fx = stream.value(i, t, x)
        fy = stream.value(i, t, y)
        gx = stream.gradient(i, t, x)
        inner = float(np.dot(gx, y - x))
        conv_bad = max(conv_bad, fx + inner - fy)
        smooth_bad = max(
            smooth_bad, (fy - fx) - inner - 0.5 * L_s * float(np.dot(y - x, y - x))
        )
        value_bad = max(value_bad, abs(fx) - L_1)
        grad_bad = max(grad_bad, float(np.linalg.norm(gx)) - L)
    return AssumptionReport(
        samples=sample_count,
        convexity_violation=conv_bad,
        smoothness_violation=smooth_bad,
        value_excess=value_bad,
        gradient_excess=grad_bad,
        passed=max(conv_bad, smooth_bad, value_bad, grad_bad) <= tol,
    )
