"""Forgetting-factor regret, consensus diagnostics, and regret-bound evaluators.

The central metric discounts each round's average optimality gap by
rho^(T-t), so late rounds dominate:

    R_T = sum_t rho^(T-t) * mean_i [f_t(x_i^t) - f_t(x_*^t)].

All horizon-indexed sums are evaluated with the stable recurrence
S_t = rho*S_{t-1} + a_t instead of explicit powers, which avoids underflow
for long horizons and yields the whole running sequence in one pass.

The bound evaluators assemble, term by term, the theoretical upper bounds for
the gradient-free algorithm (time-varying and constant step) and the
projection-free algorithm, given measured input sequences and the problem
constants.  They require the forgetting factor to exceed the network mixing
rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RhoNotGreaterThanLambda, RhoOutOfRange
from .network import MixingConstants
from .objectives import ObjectiveStream, round_optimum
from .trace import Trace


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 < rho < 1.0:
        raise RhoOutOfRange(f"forgetting factor must lie in (0, 1), got {rho}")
    return rho


def forgetting_weighted_series(values, rho: float) -> np.ndarray:
    """Running discounted sums S_t = sum_{s<=t} rho^(t-s) * values_s, shape (T,)."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    acc = 0.0
    for t in range(values.size):
        acc = rho * acc + values[t]
        out[t] = acc
    return out


def forgetting_sum_limit(level: float, rho: float) -> float:
    """Horizon limit of sum_t rho^(T-t) a_t when a_t converges to ``level``."""
    return level / (1.0 - _check_rho(rho))


def dffr_series(trace: Trace, rho: float) -> np.ndarray:
    """Running forgetting-factor regret at every horizon 1..T."""
    rho = _check_rho(rho)
    return forgetting_weighted_series(trace.gaps, rho)


def dffr(trace: Trace, rho: float) -> float:
    """Forgetting-factor regret of the full trace."""
    return float(dffr_series(trace, rho)[-1])


def final_round_gap(trace: Trace) -> float:
    """Average optimality gap of the last round; never exceeds the regret."""
    return float(trace.gaps[-1])


def cumulative_regret(trace: Trace) -> np.ndarray:
    """Unweighted running regret sum_t m_t (the classical comparator)."""
    return np.cumsum(trace.gaps)


def consensus_diameter_series(trace: Trace) -> np.ndarray:
    """Per-round max over coordinates of (max_i - min_i) of the decisions."""
    spread = trace.x.max(axis=1) - trace.x.min(axis=1)
    return spread.max(axis=1)


def consensus_diameter(trace: Trace, t: int) -> float:
    return float(consensus_diameter_series(trace)[t - 1])


def tracking_error_series(trace: Trace) -> np.ndarray:
    """Per-round worst agent distance to the round optimum."""
    return np.linalg.norm(trace.x - trace.x_star[:, None, :], axis=2).max(axis=1)


def first_time_below(series, threshold: float) -> int | None:
    """First 1-based round where the series dips below the threshold."""
    idx = np.flatnonzero(np.asarray(series) < threshold)
    return int(idx[0]) + 1 if idx.size else None


def persistent_time_below(series, threshold: float) -> int | None:
    """First 1-based round from which the series stays below the threshold."""
    series = np.asarray(series)
    above = np.flatnonzero(series >= threshold)
    if above.size == 0:
        return 1
    last = int(above[-1])
    if last == series.size - 1:
        return None
    return last + 2


def consensus_time(trace: Trace, threshold: float) -> int | None:
    """First round after which the decision diameter stays below the threshold."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    return persistent_time_below(consensus_diameter_series(trace), threshold)


def tracking_time(trace: Trace, threshold: float) -> int | None:
    """First round after which every agent stays within the threshold of the optimum."""
    if threshold <= 0.0:
        raise ValueError("threshold must be positive")
    return persistent_time_below(tracking_error_series(trace), threshold)


def power_spike_gaps(T: int, base: int = 3) -> np.ndarray:
    """Gap sequence that is 1 exactly at rounds base, base^2, ... and 0 elsewhere.

    Its average regret vanishes like log(T)/T while the forgetting-weighted
    regret stays pinned near 1 along the spike subsequence, which is the
    discrimination the weighted metric exists for.
    """
    gaps = np.zeros(T)
    spike = base
    while spike <= T:
        gaps[spike - 1] = 1.0
        spike *= base
    return gaps


def optimum_path_lengths(stream: ObjectiveStream, set_, T: int) -> np.ndarray:
    """theta_t = ||x*_{t} - x*_{t+1}|| over the given set, for t = 1..T."""
    optima = np.stack(
        [round_optimum(stream, t, set_).x_star for t in range(1, T + 2)]
    )
    return np.linalg.norm(np.diff(optima, axis=0), axis=1)


@dataclass(frozen=True)
class BoundInputs:
    """Measured sequences and constants consumed by the bound evaluators.

    ``F`` holds |change of consensus-error norm| per round/agent, ``theta``
    the optimum path increments over the evaluation set, ``nu`` the average
    distance to the optimum, ``eps`` the consensus-error norms produced by
    each round's update.  ``sigma`` is derived:

        sigma = (4 + 5 d) L + 2 L (1 + d) rho^-2 / (1 - lam/rho),

    which requires rho > lam.
    """

    F: np.ndarray
    theta: np.ndarray
    nu: np.ndarray
    eps: np.ndarray
    init_norms: np.ndarray
    d: int
    L: float
    L_s: float
    L_1: float
    M: float
    r: float
    gamma: float
    lam: float
    rho: float
    delta: float
    sigma: float = field(init=False)

    def __post_init__(self):
        rho = _check_rho(self.rho)
        if rho <= self.lam:
            raise RhoNotGreaterThanLambda(
                f"need rho > lambda, got rho={rho}, lambda={self.lam}"
            )
        sigma = (4.0 + 5.0 * self.d) * self.L + (
            2.0 * self.L * (1.0 + self.d) * rho**-2
        ) / (1.0 - self.lam / rho)
        object.__setattr__(self, "sigma", sigma)

    @property
    def T(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]

    @classmethod
    def from_traces(
        cls,
        traces: list[Trace],
        stream: ObjectiveStream,
        mixing: MixingConstants,
        rho: float,
        delta: float = 0.0,
        path_set=None,
        lam_override: float | None = None,
    ) -> "BoundInputs":
        """Average the measured sequences over traces (expectation estimate).

        ``path_set`` is the set the optimum path is measured over (the shrunk
        box for the gradient-free bound); it defaults to the stream's box.
        """
        if not traces:
            raise ValueError("need at least one trace")
        F = np.mean([tr.eps_increments() for tr in traces], axis=0)
        eps = np.mean([tr.eps_seq() for tr in traces], axis=0)
        nu = np.mean([tr.nu for tr in traces], axis=0)
        init_norms = np.mean([tr.initial_norms() for tr in traces], axis=0)
        T = traces[0].T
        theta = optimum_path_lengths(stream, path_set or stream.box, T)
        return cls(
            F=F,
            theta=theta,
            nu=nu,
            eps=eps,
            init_norms=init_norms,
            d=stream.d,
            L=stream.L,
            L_s=stream.L_s,
            L_1=stream.L_1,
            M=stream.box.M,
            r=stream.box.r,
            gamma=mixing.gamma,
            lam=lam_override if lam_override is not None else mixing.lam,
            rho=rho,
            delta=delta,
        )


def _lam_powers(inputs: BoundInputs) -> np.ndarray:
    """lam^(t-2) for t = 1..T (t=1 gives lam^-1, exactly as the bounds read)."""
    t = np.arange(1, inputs.T + 1, dtype=float)
    return inputs.lam ** (t - 2.0)


def gradient_free_regret_bound(inputs: BoundInputs, schedule) -> np.ndarray:
    """Upper bound on the expected regret of the gradient-free algorithm, per horizon.

    Six terms: initial-condition mixing, the F increments, the sigma^2 step
    term, the smoothing-bias term delta/r * L_1, the optimum-path term with
    theta_t / alpha_t, and the terminal 2 M^2 / alpha_T.
    """
    rho = inputs.rho
    T = inputs.T
    alphas = np.array([schedule(t) for t in range(1, T + 1)], dtype=float)
    rec = lambda a: forgetting_weighted_series(a, rho)
    x1 = float(np.sum(inputs.init_norms))
    term1 = 2.0 * inputs.L * (1.0 + inputs.d) * inputs.gamma * x1 * rec(_lam_powers(inputs))
    term2 = (4.0 * inputs.L * (1.0 + inputs.d) / inputs.n) * rec(inputs.F.sum(axis=1))
    term3 = (inputs.n * inputs.sigma**2 / 2.0) * rec(alphas)
    term4 = (inputs.delta / inputs.r) * inputs.L_1 * rec(np.ones(T))
    term5 = 2.0 * inputs.M * rec(inputs.theta / alphas)
    term6 = 2.0 * inputs.M**2 / alphas
    return term1 + term2 + term3 + term4 + term5 + term6


def gradient_free_constant_step_bound(inputs: BoundInputs, alpha: float) -> np.ndarray:
    """Constant-step specialization of the gradient-free bound, per horizon."""
    if alpha <= 0.0:
        raise ValueError("step size must be positive")
    rho = inputs.rho
    T = inputs.T
    rec = lambda a: forgetting_weighted_series(a, rho)
    x1 = float(np.sum(inputs.init_norms))
    term1 = 2.0 * inputs.L * (1.0 + inputs.d) * inputs.gamma * x1 * rec(_lam_powers(inputs))
    term2 = (4.0 * inputs.L * (1.0 + inputs.d) / inputs.n) * rec(inputs.F.sum(axis=1))
    term3 = (inputs.sigma**2 * alpha * inputs.n / 2.0) * rec(np.ones(T))
    term4 = (inputs.delta / inputs.r) * inputs.L_1 * rec(np.ones(T))
    term5 = (2.0 * inputs.M / alpha) * rec(inputs.theta)
    term6 = 2.0 * inputs.M**2 / alpha
    return term1 + term2 + term3 + term4 + term5 + term6


def constant_step_asymptote(inputs: BoundInputs, alpha: float) -> float:
    """Horizon limit of the constant-step bound when the F and theta terms vanish."""
    one_minus = 1.0 - inputs.rho
    return (
        alpha * inputs.sigma**2 * inputs.n / (2.0 * one_minus)
        + inputs.delta * inputs.L_1 / (inputs.r * one_minus)
        + 2.0 * inputs.M**2 / alpha
    )


def optimal_constant_step(inputs: BoundInputs) -> float:
    """Minimizer of the two-term step tradeoff in the constant-step asymptote."""
    return 2.0 * inputs.M * np.sqrt((1.0 - inputs.rho) / (inputs.sigma**2 * inputs.n))


def projection_free_regret_bound(inputs: BoundInputs, alpha0: float) -> np.ndarray:
    """Upper bound on the regret of the projection-free algorithm, per horizon.

    The F term enters as a per-agent average (the tighter rendering of the
    two equivalent groupings).
    """
    if not 0.0 < alpha0 < 1.0:
        raise ValueError("alpha0 must lie in (0, 1)")
    rho = inputs.rho
    T = inputs.T
    rec = lambda a: forgetting_weighted_series(a, rho)
    x1 = float(np.sum(inputs.init_norms))
    L, L_s, M = inputs.L, inputs.L_s, inputs.M
    term1 = L * rec(inputs.nu)
    term2 = (2.0 * L * alpha0 * M + 2.0 * L_s * alpha0**2 * M**2) * rec(np.ones(T))
    term3 = (8.0 * L / inputs.n) * rec(inputs.F.sum(axis=1))
    term4 = 4.0 * L * inputs.gamma * x1 * rec(_lam_powers(inputs))
    coeff5 = 9.0 * L / inputs.n + (4.0 * L / inputs.n) * rho**-2 / (1.0 - inputs.lam / rho)
    term5 = coeff5 * rec(inputs.eps.sum(axis=1))
    return term1 + term2 + term3 + term4 + term5


def projection_free_asymptote(inputs: BoundInputs, alpha0: float) -> float:
    """Horizon limit of the projection-free bound when nu, F, eps all vanish."""
    return (
        2.0 * inputs.L * alpha0 * inputs.M
        + 2.0 * inputs.L_s * alpha0**2 * inputs.M**2
    ) / (1.0 - inputs.rho)


@dataclass(frozen=True)
class DecompositionReport:
    max_excess: float
    worst_round: int
    worst_agent: int
    passed: bool


def consensus_error_decomposition_check(
    trace: Trace, mc: MixingConstants, tol: float = 1e-9
) -> DecompositionReport:
    """Check the per-agent deviation-from-mean decomposition on a trace.

    For every agent and round, the distance to the network mean must be
    covered by the mixing decay of the initial conditions plus three
    consensus-error sums.  Reports the worst slack (negative when the
    inequality holds everywhere with margin).
    """
    gamma, lam = mc.gamma, mc.lam
    x1_sum = float(np.sum(trace.initial_norms()))
    eps_prev = trace.eps_norm          # row t: ||eps_{i,t-1}||
    eps_by_round = trace.eps_seq()     # row t: ||eps_{i,t}||
    S = eps_by_round.sum(axis=1)       # S_s = sum_j ||eps_{j,s}||
    max_excess = -np.inf
    worst = (0, 0)
    G = 0.0  # running sum_{s<=t-2} lam^(t-s-2) * S_s
    for t in range(1, trace.T + 1):
        row = t - 1
        if t >= 3:
            G = lam * G + S[t - 3]
        xbar = trace.x[row].mean(axis=0)
        lhs = np.linalg.norm(trace.x[row] - xbar, axis=1)
        base = (
            gamma * lam ** (t - 2.0) * x1_sum
            + eps_prev[row].mean()
            + gamma * G
        )
        rhs = base + eps_prev[row]
        excess = lhs - rhs
        i = int(np.argmax(excess))
        if excess[i] > max_excess:
            max_excess = float(excess[i])
            worst = (t, i)
    return DecompositionReport(
        max_excess=max_excess,
        worst_round=worst[0],
        worst_agent=worst[1],
        passed=max_excess <= tol,
    )
