"""Short-time power laws of transition amplitudes on graphs.

For a generator ``M(t)`` whose support graph is G, the entry
``<m| X(t) |n>`` of the propagator opens with the sum of path amplitudes
over the shortest directed paths from n to m; the truncation error is
controlled by the envelope ``e^{lam t} e^{t/tau} (t/tau)^{d+1}/(d+1)!``.
This module computes the amplitudes (closed form for static generators,
divided differences of exponentials for the diagonal-split families, a
triangular ODE chain for anything time-dependent), the timescales, the
envelopes, and the log-log exponent fits that read graph distance off
simulated data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import AccuracyError, DomainError
from .generators import Generator, InteractionGenerator, RotatingFrameGenerator
from .graphs import Graph, distances_and_counts, enumerate_shortest_paths
from .linalg import integrate_linear_ode, propagator_column, spectral_norm

#: Relative threshold below which a shortest-path amplitude sum counts as
#: an exact interference zero rather than rounding.
CANCELLATION_RTOL = 1e-12

#: Fitted series values below this are discarded as float underflow.
UNDERFLOW_CUTOFF = 1e-30

#: Extra walk orders probed after a cancelled leading order.
CANCELLATION_PROBE_DEPTH = 4


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order law of one source -> target transition.

    The amplitude opens as ``amplitude_coefficient * t**amplitude_exponent``
    and the transition probability as
    ``probability_coefficient * t**probability_exponent``.  When the
    shortest-path amplitudes interfere to zero, ``cancelled`` is set and
    the exponents/coefficients describe the first non-vanishing walk
    order instead (probed up to ``distance + 4``).
    """

    source: int
    target: int
    distance: Optional[int]
    path_count: int
    amplitude_coefficient: complex
    probability_coefficient: float
    amplitude_exponent: Optional[int]
    probability_exponent: Optional[int]
    tau: float
    lambda_shift: float
    cancelled: bool

    @property
    def reachable(self) -> bool:
        return self.distance is not None

    def to_json_dict(self, classical: bool = False) -> dict:
        """JSON form; classical walks report the entry exponent d, coherent
        ones the probability exponent 2d."""
        return {
            "source": self.source,
            "target": self.target,
            "distance": self.distance,
            "count": self.path_count,
            "amplitude_coefficient": [
                self.amplitude_coefficient.real,
                self.amplitude_coefficient.imag,
            ],
            "probability_coefficient": self.probability_coefficient,
            "exponent": self.amplitude_exponent if classical else self.probability_exponent,
            "tau": self.tau,
            "cancelled": self.cancelled,
        }


@dataclass(frozen=True)
class ErrorEnvelope:
    """Parameters of the truncation bound ``e^{lam t} e^{t/tau} (t/tau)^{d+1}/(d+1)!``."""

    tau: float
    lambda_shift: float
    distance: int


class FitResult(NamedTuple):
    slope: float
    intercept: float
    residual: float


# -- timescales ------------------------------------------------------------


def timescale(gen: Generator, horizon: Optional[float] = None, mode: str = "norm") -> float:
    """Reciprocal norm timescale of a generator.

    mode "norm"
        ``1 / max_{0<=t<=horizon} ||M(t)||``; static generators ignore the
        horizon, time-dependent ones maximize on a refining grid until the
        maximum is stable.
    mode "offdiag"
        ``1 / (||A|| max|Mhat|)`` with A the 0/1 support of the
        off-diagonal part; the tighter diagonal-split timescale.
    mode "degree"
        ``1 / (d_max max|Mhat|)``, bounding ``||A||`` by the highest
        degree; requires a symmetric support.

    A zero generator yields ``math.inf``.
    """
    if mode == "norm":
        if gen.is_static:
            nrm = spectral_norm(gen.matrix)
        else:
            if horizon is None or horizon <= 0:
                raise DomainError("time-dependent timescale needs a horizon T > 0")
            nrm = _max_norm_on_horizon(gen, horizon)
        return math.inf if nrm == 0.0 else 1.0 / nrm
    mhat = gen.offdiag_part()
    mmax = float(np.max(np.abs(mhat))) if mhat.size else 0.0
    if mmax == 0.0:
        return math.inf
    support = (mhat != 0).astype(float)
    if mode == "offdiag":
        return 1.0 / (spectral_norm(support) * mmax)
    if mode == "degree":
        if not np.array_equal(support, support.T):
            raise DomainError("the degree bound needs a symmetric off-diagonal support")
        dmax = float(np.max(support.sum(axis=0)))
        return 1.0 / (dmax * mmax)
    raise DomainError(f"unknown timescale mode {mode!r}")


def _max_norm_on_horizon(gen: Generator, horizon: float, rtol: float = 1e-10) -> float:
    best = -1.0
    points = 9
    while points <= 1 << 14:
        grid = np.linspace(0.0, horizon, points)
        cur = max(spectral_norm(gen.evaluate(t)) for t in grid)
        if best >= 0 and abs(cur - best) <= rtol * max(cur, 1e-300):
            return cur
        best = cur
        points = 2 * points - 1
    raise AccuracyError("norm maximization on the horizon did not settle", best)


# -- path amplitudes -------------------------------------------------------


def divided_difference_exp(nodes: Sequence[complex], ts: np.ndarray) -> np.ndarray:
    """Divided difference of ``x -> exp(x t)`` over the given nodes.

    Equals the ordered integral
    ``int_{0<=s_1<=..<=s_d<=t} exp(a_d(t-s_d)) ... exp(a_0 s_1) ds`` and is
    evaluated for every t at once.  Partial fractions are used for
    well-separated nodes; clustered or repeated nodes fall back to the
    exact bidiagonal-matrix exponential, which handles confluence.
    """
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    ts = np.asarray(ts, dtype=float)
    d = nodes.size - 1
    if d < 0:
        raise DomainError("divided difference needs at least one node")
    if d == 0:
        return np.exp(nodes[0] * ts)
    diffs = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diffs, 1.0)
    dens = np.prod(diffs, axis=1)
    if np.all(np.abs(dens) > 1e-6):
        return np.exp(np.outer(ts, nodes)) @ (1.0 / dens)
    z = np.diag(nodes) + np.diag(np.ones(d), 1)
    return np.array([scipy.linalg.expm(z * t)[0, d] for t in ts])


def _path_edge_factors(gen: Generator, path: Sequence[int]) -> np.ndarray:
    """Constant edge factors Mhat[p_{k+1}, p_k] along a path; validates edges."""
    mhat = gen.offdiag_part()
    factors = []
    for a, b in zip(path, path[1:]):
        w = mhat[b, a]
        if w == 0:
            raise DomainError(f"({a},{b}) is not an edge of the generator support")
        factors.append(w)
    return np.asarray(factors, dtype=complex)


def path_amplitude_series(
    gen: Generator, path: Sequence[int], ts: Sequence[float], method: str = "auto"
) -> np.ndarray:
    """Amplitude of one directed path for every time in ``ts``.

    The amplitude is the iterated time-ordered integral of the generator
    entries along the path.  Methods:

    * static generators: exact closed form ``prod(entries) t^d / d!``;
    * "divided": divided-difference closed form, for the diagonal-split
      families (interaction and rotating frames);
    * "ode": the triangular chain ``phi_0 = 1``,
      ``dphi_k/dt = M(t)[p_k, p_{k-1}] phi_{k-1}``, integrated adaptively
      to 1e-10 -- works for any generator and is the oracle the closed
      forms are checked against.
    """
    ts = np.asarray(ts, dtype=float)
    path = [gen._check_vertex(p) for p in path]
    d = len(path) - 1
    if d < 0:
        raise DomainError("a path needs at least one vertex")
    if d == 0:
        return np.ones(ts.size, dtype=complex)
    if method == "auto":
        method = "closed" if gen.is_static else "ode"
    if gen.is_static and method == "closed":
        factors = _path_edge_factors(gen, path)
        return np.prod(factors) * ts**d / math.factorial(d)
    if method == "divided":
        nodes = _split_nodes(gen, path)
        factors = _path_edge_factors(gen, path)
        return np.prod(factors) * np.exp(-nodes[-1] * ts) * divided_difference_exp(nodes, ts)
    if method == "ode":
        return ode_chain_amplitude(gen, path, ts)
    raise DomainError(f"unknown path amplitude method {method!r}")


def path_amplitude(gen: Generator, path: Sequence[int], t: float, method: str = "auto") -> complex:
    """Single-time convenience wrapper around :func:`path_amplitude_series`."""
    return complex(path_amplitude_series(gen, path, [t], method)[0])


def _split_nodes(gen: Generator, path: Sequence[int]) -> np.ndarray:
    """Diagonal nodes entering the divided-difference form, per path vertex."""
    if isinstance(gen, InteractionGenerator):
        return gen.v_diag[list(path)]
    if isinstance(gen, RotatingFrameGenerator):
        return -1j * gen.omega[list(path)]
    if gen.is_static:
        return gen.diagonal_vector()[list(path)] * 0.0
    raise DomainError("no divided-difference form for this generator kind")


def ode_chain_amplitude(
    gen: Generator, path: Sequence[int], ts: Sequence[float], tol: float = 1e-10
) -> np.ndarray:
    """Path amplitude via the triangular ODE chain, to local tolerance ``tol``."""
    ts = np.asarray(ts, dtype=float)
    path = list(path)
    d = len(path) - 1
    _path_edge_factors(gen, path)  # edge validation
    dim = d + 1

    def chain_matrix(s: float) -> np.ndarray:
        c = np.zeros((dim, dim), dtype=complex)
        for k in range(1, dim):
            c[k, k - 1] = gen.entry(path[k], path[k - 1], s)
        return c

    y0 = np.zeros(dim, dtype=complex)
    y0[0] = 1.0
    states, _ = integrate_linear_ode(chain_matrix, y0, ts, tol)
    return states[:, d]


# -- shortest-path sums ----------------------------------------------------


def shortest_sum_coefficients(gen: Generator, g: Graph, source: int):
    """Per-target sums of shortest-path entry products, by DAG dynamic
    programming.

    Returns ``(dist, counts, coeff, abs_coeff)`` where
    ``coeff[v] = sum over shortest source->v paths of prod M(0) entries``
    and ``abs_coeff`` accumulates the products of entry moduli (the
    cancellation reference).
    """
    if g.n != gen.dimension:
        raise DomainError("graph order does not match generator dimension")
    dist, counts = distances_and_counts(g, source)
    order = sorted((v for v in range(g.n) if dist[v] is not None), key=lambda v: dist[v])
    coeff = np.zeros(g.n, dtype=complex)
    abs_coeff = np.zeros(g.n)
    coeff[source] = 1.0
    abs_coeff[source] = 1.0
    for u in order:
        for v in g.out_neighbors(u):
            if dist[v] == dist[u] + 1:
                w = gen.entry(v, u, 0.0)
                coeff[v] += coeff[u] * w
                abs_coeff[v] += abs_coeff[u] * abs(w)
    return dist, counts, coeff, abs_coeff


def leading_amplitude_series(
    gen: Generator, g: Graph, source: int, target: int, ts: Sequence[float]
) -> np.ndarray:
    """``sum_p Phi_p(t)`` over all shortest source -> target paths.

    Static generators use one DAG pass; the diagonal-split families sum
    divided-difference amplitudes path by path.
    """
    ts = np.asarray(ts, dtype=float)
    if gen.is_static:
        dist, _, coeff, _ = shortest_sum_coefficients(gen, g, source)
        d = dist[target]
        if d is None:
            return np.zeros(ts.size, dtype=complex)
        return coeff[target] * ts**d / math.factorial(d)
    pset = enumerate_shortest_paths(g, source, target)
    if not pset.reachable:
        return np.zeros(ts.size, dtype=complex)
    total = np.zeros(ts.size, dtype=complex)
    method = "divided" if isinstance(gen, (InteractionGenerator, RotatingFrameGenerator)) else "ode"
    for path in pset.paths:
        total += path_amplitude_series(gen, path, ts, method=method)
    return total


def interaction_entry_estimate(
    gen: InteractionGenerator, g: Graph, source: int, target: int, ts: Sequence[float]
) -> np.ndarray:
    """Leading diagonal-split estimate of ``<target| exp((V + Mhat) t) |source>``.

    Equals ``e^{V_target t} sum_p Phi_p[Mhat(t)]``; the phase prefactor
    cancels against the divided-difference form, leaving a plain sum of
    ``prod(Mhat entries) * dd_exp(V along path)`` over shortest paths.
    """
    ts = np.asarray(ts, dtype=float)
    pset = enumerate_shortest_paths(g, source, target)
    if not pset.reachable:
        return np.zeros(ts.size, dtype=complex)
    total = np.zeros(ts.size, dtype=complex)
    for path in pset.paths:
        factors = _path_edge_factors(gen, path)
        nodes = gen.v_diag[list(path)]
        total += np.prod(factors) * divided_difference_exp(nodes, ts)
    return total


def higher_order_coefficient(
    matrix: np.ndarray, source: int, target: int, distance: int, probe_depth: int = CANCELLATION_PROBE_DEPTH
):
    """First non-vanishing walk order past a cancelled leading order.

    Sums amplitudes of *walks* (not just geodesics) of length
    ``distance+1, distance+2, ...`` through matrix powers, stopping at the
    first order whose total survives the cancellation threshold.  Returns
    ``(order, coefficient)`` or ``(None, 0j)`` if nothing shows up within
    ``probe_depth`` extra orders.
    """
    m = np.asarray(matrix, dtype=complex)
    power = np.linalg.matrix_power(m, distance)
    abs_power = np.linalg.matrix_power(np.abs(m), distance)
    for k in range(distance + 1, distance + probe_depth + 1):
        power = m @ power
        abs_power = np.abs(m) @ abs_power
        total = power[target, source]
        reference = abs_power[target, source]
        if reference > 0 and abs(total) >= CANCELLATION_RTOL * reference:
            return k, complex(total / math.factorial(k))
    return None, 0.0 + 0.0j


# -- predictions -----------------------------------------------------------


def predict(
    gen: Generator, g: Graph, source: int, target: int, t: float
) -> tuple[AsymptoticPrediction, complex]:
    """Leading-order prediction and exact leading amplitude for one pair.

    ``leading_amplitude = sum_p Phi_p(t)`` over the shortest paths of the
    support graph; the prediction records the coefficients, exponents
    (amplitude d, probability 2d), the norm timescale and the
    interference-cancellation flag.
    """
    source, target = g.check_vertex(source), g.check_vertex(target)
    tau = timescale(gen, horizon=max(t, 1.0), mode="norm")
    dist, counts, coeff, abs_coeff = shortest_sum_coefficients(gen, g, source)
    d = dist[target]
    if d is None:
        pred = AsymptoticPrediction(
            source, target, None, 0, 0.0j, 0.0, None, None, tau, 0.0, False
        )
        return pred, 0.0 + 0.0j
    total = complex(coeff[target])
    reference = float(abs_coeff[target])
    cancelled = abs(total) < CANCELLATION_RTOL * reference
    amp_exp: Optional[int] = d
    amp_coeff = total / math.factorial(d)
    if cancelled:
        amp_coeff = 0.0 + 0.0j
        if gen.is_static:
            order, c = higher_order_coefficient(gen.matrix, source, target, d)
            if order is not None:
                amp_exp = order
                amp_coeff = c
    prob_exp = None if amp_exp is None else 2 * amp_exp
    pred = AsymptoticPrediction(
        source=source,
        target=target,
        distance=d,
        path_count=counts[target],
        amplitude_coefficient=amp_coeff,
        probability_coefficient=abs(amp_coeff) ** 2,
        amplitude_exponent=amp_exp,
        probability_exponent=prob_exp,
        tau=tau,
        lambda_shift=0.0,
        cancelled=cancelled,
    )
    leading = complex(leading_amplitude_series(gen, g, source, target, np.array([t]))[0])
    return pred, leading


def error_bound(env: ErrorEnvelope, t: float) -> float:
    """Truncation envelope ``e^{lam t} e^{t/tau} (t/tau)^{d+1} / (d+1)!``."""
    if t < 0:
        raise DomainError("the error bound is defined for t >= 0")
    if not math.isfinite(env.tau):
        return 0.0
    x = t / env.tau
    d = env.distance
    return math.exp(env.lambda_shift * t) * math.exp(x) * x ** (d + 1) / math.factorial(d + 1)


# -- exact transition series ------------------------------------------------


def transition_entry_series(
    gen: Generator, source: int, target: int, ts: Sequence[float], tol: float = 1e-10
) -> np.ndarray:
    """Exact propagator entries ``X(t)[target, source]`` over a grid.

    Static generators route through the relative-accurate hybrid column
    propagator; time-dependent ones through the adaptive integrator.
    """
    ts = np.asarray(ts, dtype=float)
    if gen.is_static:
        return propagator_column(gen.matrix, source, ts, tol)[:, target]
    y0 = np.zeros(gen.dimension, dtype=complex)
    y0[source] = 1.0
    states, _ = integrate_linear_ode(gen.evaluate, y0, ts, tol)
    return states[:, target]


def transition_probability_series(
    gen: Generator, source: int, target: int, ts: Sequence[float],
    classical: bool = False, tol: float = 1e-10,
) -> np.ndarray:
    """Exact transition probabilities over a grid.

    ``classical`` reads the propagator entry itself (diffusive walks);
    otherwise the squared modulus of the amplitude is returned.
    """
    entries = transition_entry_series(gen, source, target, ts, tol)
    return entries.real if classical else np.abs(entries) ** 2


# -- exponent fitting --------------------------------------------------------


def fit_exponent(series, window: tuple) -> FitResult:
    """Least-squares power-law fit ``ln(value) ~ slope * ln(t) + intercept``.

    ``series`` is a sequence of (t, value) pairs; only points with
    ``window[0] <= t <= window[1]`` enter the fit.  Nonpositive values in
    the window are a domain error (shrink the window); values below
    :data:`UNDERFLOW_CUTOFF` are silently dropped as underflow.  At least
    three usable points are required.
    """
    lo, hi = window
    ts, vals = [], []
    for t, v in series:
        if lo <= t <= hi:
            if t <= 0:
                raise DomainError("power-law fits need positive times")
            if v <= 0:
                raise DomainError(
                    f"nonpositive value {v!r} at t={t!r} inside the fit window"
                )
            if v < UNDERFLOW_CUTOFF:
                continue
            ts.append(t)
            vals.append(v)
    if len(ts) < 3:
        raise DomainError(f"need at least 3 usable points in the window, got {len(ts)}")
    x = np.log(np.asarray(ts))
    y = np.log(np.asarray(vals))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(float(slope), float(intercept), residual)


def default_fit_window(tau: float, decades: tuple = (1e-3, 1e-2)) -> tuple:
    """The standard fitting window ``[1e-3 tau, 1e-2 tau]``."""
    if not math.isfinite(tau):
        raise DomainError("no finite timescale to anchor the fit window")
    return (decades[0] * tau, decades[1] * tau)


def log_grid(lo: float, hi: float, points: int = 20) -> np.ndarray:
    if lo <= 0 or hi <= lo:
        raise DomainError("log grids need 0 < lo < hi")
    if points < 2:
        raise DomainError("grids need at least 2 points")
    return np.geomspace(lo, hi, points)
