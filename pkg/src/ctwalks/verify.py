"""Verification sweeps: truncation bounds, disorder universality, oracles.

These drive the exact propagator against the shortest-path predictions
over whole graphs, pair by pair and grid point by grid point.  All sweeps
are deterministic: random draws are keyed by ``(seed, realization)`` so
execution order (or a worker pool) cannot change results, and reductions
run in fixed index order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .asymptotics import (
    ErrorEnvelope,
    FitResult,
    default_fit_window,
    error_bound,
    fit_exponent,
    interaction_entry_estimate,
    leading_amplitude_series,
    log_grid,
    shortest_sum_coefficients,
    timescale,
    transition_probability_series,
)
from .errors import DomainError
from .generators import Generator, InteractionGenerator, StaticGenerator, ctqw_generator, gaussian_potential
from .graphs import Graph, distances_and_counts
from .linalg import propagate, spectral_norm

#: Absolute slack granted to the exact-propagation oracle when checking
#: the strict truncation inequalities.
ORACLE_SLACK = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Worst residual versus envelope for one ordered pair over a grid."""

    source: int
    target: int
    distance: Optional[int]
    max_residual: float
    max_bound: float
    violated: bool

    def to_json_dict(self) -> dict:
        return {
            "pair": [self.source, self.target],
            "distance": self.distance,
            "max_residual": self.max_residual,
            "max_bound": self.max_bound,
            "violated": self.violated,
        }


def _pairs_or_all(g: Graph, pairs) -> list:
    if pairs is None or pairs == "all":
        return [(s, t) for s in range(g.n) for t in range(g.n)]
    return [(g.check_vertex(s), g.check_vertex(t)) for s, t in pairs]


def verify_norm_bound(
    gen: Generator,
    g: Graph,
    ts: Sequence[float],
    pairs=None,
    slack: float = ORACLE_SLACK,
    tol: float = 1e-10,
) -> list:
    """Check ``|X(t)[m,n] - sum_p Phi_p(t)| <= envelope(t) + slack``.

    The plain norm-timescale envelope with no diagonal split; the exact
    side comes from full propagation, the amplitude side from the
    shortest-path sums.  Unreachable pairs are skipped (the exponent law
    is undefined there).
    """
    ts = np.asarray(ts, dtype=float)
    tau = timescale(gen, horizon=float(ts[-1]), mode="norm")
    states = propagate(gen, ts, tol).states
    reports = []
    want = _pairs_or_all(g, pairs)
    by_source: dict[int, list] = {}
    for s, t in want:
        by_source.setdefault(s, []).append(t)
    for source, targets in sorted(by_source.items()):
        dist, _, coeff, _ = shortest_sum_coefficients(gen, g, source)
        for target in targets:
            d = dist[target]
            if d is None:
                continue
            if gen.is_static:
                approx = coeff[target] * ts**d / math.factorial(d)
            else:
                approx = leading_amplitude_series(gen, g, source, target, ts)
            exact = states[:, target, source]
            residual = np.abs(exact - approx)
            env = ErrorEnvelope(tau=tau, lambda_shift=0.0, distance=d)
            bounds = np.array([error_bound(env, t) for t in ts])
            reports.append(
                BoundReport(
                    source,
                    target,
                    d,
                    float(np.max(residual)),
                    float(np.max(bounds)),
                    bool(np.any(residual > bounds + slack)),
                )
            )
    return reports


def verify_split_bound(
    matrix: np.ndarray,
    g: Graph,
    ts: Sequence[float],
    pairs=None,
    slack: float = ORACLE_SLACK,
    tol: float = 1e-10,
) -> list:
    """Diagonal-split (interaction picture) version of the bound check.

    The static ``M = V + Mhat`` is compared against
    ``e^{V_m t} sum_p Phi_p[Mhat(t)]`` with the tighter timescale
    ``1/(||A|| max|Mhat|)`` and the shift ``lam = max(0, max Re V)``.
    """
    ts = np.asarray(ts, dtype=float)
    gen = StaticGenerator(np.asarray(matrix, dtype=complex))
    inter = InteractionGenerator(gen.diagonal_vector(), gen.offdiag_part())
    tau = timescale(gen, mode="offdiag")
    lam = max(0.0, float(np.max(gen.diagonal_vector().real)))
    states = propagate(gen, ts, tol).states
    reports = []
    want = _pairs_or_all(g, pairs)
    dists = {s: distances_and_counts(g, s)[0] for s in sorted({s for s, _ in want})}
    for source, target in want:
        d = dists[source][target]
        if d is None:
            continue
        approx = interaction_entry_estimate(inter, g, source, target, ts)
        exact = states[:, target, source]
        residual = np.abs(exact - approx)
        env = ErrorEnvelope(tau=tau, lambda_shift=lam, distance=d)
        bounds = np.array([error_bound(env, t) for t in ts])
        reports.append(
            BoundReport(
                source,
                target,
                d,
                float(np.max(residual)),
                float(np.max(bounds)),
                bool(np.any(residual > bounds + slack)),
            )
        )
    return reports


def any_violation(reports: Sequence[BoundReport]) -> bool:
    return any(r.violated for r in reports)


# -- exponent fits and the distance oracle -----------------------------------


def fitted_probability_law(
    gen: Generator,
    source: int,
    target: int,
    tau: Optional[float] = None,
    window: Optional[tuple] = None,
    points: int = 20,
    classical: bool = False,
) -> FitResult:
    """Fit the power law of the exact transition probability.

    The window defaults to ``[1e-3 tau, 1e-2 tau]`` on a log grid of
    ``points`` samples.
    """
    if tau is None:
        tau = timescale(gen, horizon=1.0, mode="norm")
    if window is None:
        window = default_fit_window(tau)
    ts = log_grid(window[0], window[1], points)
    probs = transition_probability_series(gen, source, target, ts, classical=classical)
    return fit_exponent(list(zip(ts, probs)), window)


def infer_distance(slope: float, classical: bool) -> int:
    """Distance read off a fitted exponent: d for diffusive, 2d for coherent."""
    return round(slope) if classical else round(slope / 2.0)


# -- disorder universality protocol ------------------------------------------


@dataclass(frozen=True)
class DisorderResult:
    """Per-realization fits plus the rescaled diagonal collapse data.

    ``slopes``/``coefficients`` have shape (realizations, len(pairs));
    ``taus`` the per-realization norm timescales; ``collapse[pair]`` is the
    (t/tau, probability) diagonal sequence across realizations.
    """

    pairs: tuple
    taus: np.ndarray
    slopes: np.ndarray
    coefficients: np.ndarray
    collapse: dict

    def spread(self) -> np.ndarray:
        """(max - min) / mean of fitted slopes per pair."""
        return (self.slopes.max(axis=0) - self.slopes.min(axis=0)) / self.slopes.mean(axis=0)


def _disorder_one(args) -> tuple:
    g, pairs, seed, k, points, decades, collapse_x = args
    v = gaussian_potential(g.n, seed, k)
    gen = ctqw_generator(g, v)
    tau = 1.0 / spectral_norm(gen.matrix)
    window = (decades[0] * tau, decades[1] * tau)
    ts = log_grid(window[0], window[1], points)
    slopes = []
    coeffs = []
    collapse_vals = []
    for s, t in pairs:
        probs = transition_probability_series(gen, s, t, ts)
        fit = fit_exponent(list(zip(ts, probs)), window)
        slopes.append(fit.slope)
        coeffs.append(math.exp(fit.intercept))
        collapse_vals.append(
            float(transition_probability_series(gen, s, t, np.array([collapse_x * tau]))[0])
        )
    return tau, slopes, coeffs, collapse_vals


def disorder_experiment(
    g: Graph,
    pairs: Sequence[tuple],
    seed: int,
    realizations: int = 75,
    points: int = 20,
    decades: tuple = (1e-3, 1e-2),
    collapse_range: tuple = (0.5e-5, 1.5),
    workers: int = 1,
) -> DisorderResult:
    """Universality protocol over seeded Gaussian on-site potentials.

    Realization ``k`` draws its potential from the stream ``(seed, k)``,
    normalizes time by its own ``tau_k = 1/||A + V_k||``, fits the
    power law of every requested pair on the standard window, and
    contributes one diagonally-sampled point ``(x_k, p_k(x_k tau_k))``
    with ``x_k`` log-spaced over ``collapse_range`` to the collapse data.
    """
    if realizations < 1:
        raise DomainError("need at least one realization")
    pairs = tuple((g.check_vertex(s), g.check_vertex(t)) for s, t in pairs)
    xs = np.geomspace(collapse_range[0], collapse_range[1], realizations)
    jobs = [(g, pairs, seed, k, points, decades, float(xs[k])) for k in range(realizations)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_disorder_one, jobs))
    else:
        rows = [_disorder_one(job) for job in jobs]
    taus = np.array([r[0] for r in rows])
    slopes = np.array([r[1] for r in rows])
    coefficients = np.array([r[2] for r in rows])
    collapse = {
        pair: (xs.copy(), np.array([rows[k][3][i] for k in range(realizations)]))
        for i, pair in enumerate(pairs)
    }
    return DisorderResult(pairs, taus, slopes, coefficients, collapse)
