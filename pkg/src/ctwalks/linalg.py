"""Dense complex matrix services used by every walk family.

Exact propagation of ``dX/dt = M(t) X`` is the brute-force oracle the
short-time predictions are verified against, so this module favors
accuracy over scale: dense algebra only, dimension capped at
:data:`MAX_DIM`, eigendecomposition fast paths for (anti-)Hermitian
generators, a scaling-and-squaring rational approximant for general
static ones, and an adaptive embedded Runge-Kutta pair for
time-dependent ones.

For very small ``t`` the entries of ``exp(Mt)`` are dominated by float
cancellation when evaluated through a spectral decomposition; the
truncated power series of a single column is perfectly conditioned
there.  :func:`propagator_column` switches between the two regimes so
transition amplitudes keep full *relative* accuracy down to the bottom
of any fitting window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import AccuracyError, CapacityError, DomainError

#: Largest matrix dimension accepted by the dense routines.
MAX_DIM = 256

_EPS = np.finfo(float).eps


def _as_square(m: np.ndarray, op: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"{op} requires a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise CapacityError(
            f"dimension {m.shape[0]} exceeds the dense-algebra budget {MAX_DIM}"
        )
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{op} does not admit NaN/Inf entries")
    return m


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``trace(a^+ b)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DomainError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return math.sqrt(max(hs_inner(a, a).real, 0.0))


def symmetry_kind(m: np.ndarray, rtol: float = 1e-12) -> str:
    """Classify ``m`` as "hermitian", "antihermitian" or "general".

    The test is relative in Hilbert-Schmidt norm, so tiny constructive
    rounding does not disable the eigendecomposition fast path.
    """
    m = np.asarray(m, dtype=complex)
    scale = hs_norm(m)
    if scale == 0.0:
        return "hermitian"
    mh = m.conj().T
    if hs_norm(m - mh) < rtol * scale:
        return "hermitian"
    if hs_norm(m + mh) < rtol * scale:
        return "antihermitian"
    return "general"


def spectral_norm(m: np.ndarray) -> float:
    """Operator norm ``max ||M psi|| / ||psi||``.

    Largest eigenvalue magnitude for (anti-)Hermitian input, largest
    singular value otherwise.
    """
    m = _as_square(m, "spectral_norm")
    kind = symmetry_kind(m)
    if kind == "hermitian":
        return float(np.max(np.abs(scipy.linalg.eigvalsh(m))))
    if kind == "antihermitian":
        return float(np.max(np.abs(scipy.linalg.eigvalsh(1j * m))))
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class PropagationResult:
    """Solution states of ``dX/dt = M(t) X`` on a time grid."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), n, n)
    estimated_error: np.ndarray

    def entry(self, row: int, col: int) -> np.ndarray:
        return self.states[:, row, col]


def _validate_grid(t_grid: Sequence[float]) -> np.ndarray:
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise DomainError("time grid must be a non-empty 1-d sequence")
    if ts[0] < 0:
        raise DomainError("time grid must start at t >= 0")
    if np.any(np.diff(ts) < 0):
        raise DomainError("time grid must be sorted")
    return ts


def _static_matrix_of(gen) -> np.ndarray:
    if isinstance(gen, np.ndarray):
        return gen
    return gen.matrix


def _is_static(gen) -> bool:
    if isinstance(gen, np.ndarray):
        return True
    return bool(getattr(gen, "is_static", False))


def expm_states(m: np.ndarray, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``exp(m t)`` for every t, with a per-point error heuristic."""
    m = _as_square(m, "expm_states")
    n = m.shape[0]
    kind = symmetry_kind(m)
    states = np.empty((ts.size, n, n), dtype=complex)
    if kind in ("hermitian", "antihermitian"):
        h = m if kind == "hermitian" else 1j * m
        evals, vecs = scipy.linalg.eigh(h)
        factor = 1.0 if kind == "hermitian" else -1j
        for i, t in enumerate(ts):
            if t == 0.0:
                states[i] = np.eye(n)
                continue
            phases = np.exp(factor * evals * t)
            states[i] = (vecs * phases) @ vecs.conj().T
        growth = np.exp(np.maximum(np.max(evals) * ts, 0.0)) if kind == "hermitian" else 1.0
        err = 4.0 * n * _EPS * np.broadcast_to(growth, ts.shape).astype(float)
    else:
        nrm = spectral_norm(m)
        for i, t in enumerate(ts):
            states[i] = np.eye(n) if t == 0.0 else scipy.linalg.expm(m * t)
        err = 4.0 * n * _EPS * np.exp(nrm * ts)
    return states, np.asarray(err, dtype=float)


# -- adaptive Dormand-Prince 5(4) for time-dependent generators ----------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def integrate_linear_ode(
    rhs_matrix,
    y0: np.ndarray,
    t_grid: np.ndarray,
    tol: float,
    max_steps: int = 200_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``dY/dt = M(t) Y`` from t=0 through every grid point.

    Embedded Dormand-Prince 5(4) with standard step control; each
    accepted step keeps its local error estimate below ``tol`` and the
    running sum of those estimates is reported per grid point.  Raises
    :class:`AccuracyError` when the step budget runs out.
    """
    ts = _validate_grid(t_grid)
    y = np.array(y0, dtype=complex)
    out = np.empty((ts.size,) + y.shape, dtype=complex)
    errs = np.zeros(ts.size)
    t = 0.0
    acc_err = 0.0
    h = None
    steps = 0
    for i, t_target in enumerate(ts):
        while t < t_target:
            if steps >= max_steps:
                raise AccuracyError(
                    f"step budget {max_steps} exhausted before t={t_target}", acc_err
                )
            if h is None:
                h = min(t_target - t, 1e-2 / max(1.0, float(np.linalg.norm(rhs_matrix(t)))))
            h = min(h, t_target - t)
            k = [rhs_matrix(t) @ y]
            for s in range(1, 7):
                ys = y + h * sum(a * k[j] for j, a in enumerate(_DP_A[s]) if a != 0.0)
                k.append(rhs_matrix(t + _DP_C[s] * h) @ ys)
            y5 = y + h * sum(b * k[j] for j, b in enumerate(_DP_B5) if b != 0.0)
            y4 = y + h * sum(b * k[j] for j, b in enumerate(_DP_B4) if b != 0.0)
            # a step cannot certify an error below float resolution of the
            # state, no matter how small the difference of the two orders
            resolution = 4.0 * _EPS * float(np.max(np.abs(y5)))
            local = max(float(np.max(np.abs(y5 - y4))), resolution)
            steps += 1
            if local <= tol:
                t += h
                y = y5
                acc_err += local
            elif h < 1e-13 * max(t_target, 1.0):
                raise AccuracyError(
                    f"step size underflow at t={t:.6g} chasing tol={tol:g}", local
                )
            factor = 0.9 * (tol / local) ** 0.2 if local > 0 else 5.0
            h *= min(5.0, max(0.2, factor))
        out[i] = np.array(y0, dtype=complex) if t_target == 0.0 else y
        errs[i] = acc_err
    return out, errs


def propagate(gen, t_grid: Sequence[float], tol: float = 1e-10) -> PropagationResult:
    """Solve ``dX/dt = M(t) X`` with ``X(0) = I`` on a sorted grid.

    Static generators use the exact matrix exponential (eigendecomposition
    when (anti-)Hermitian, scaling-and-squaring otherwise); time-dependent
    ones are integrated adaptively to local tolerance ``tol``.
    """
    ts = _validate_grid(t_grid)
    if _is_static(gen):
        m = _as_square(_static_matrix_of(gen), "propagate")
        states, err = expm_states(m, ts)
        if np.any(err > tol):
            raise AccuracyError(
                f"static propagation cannot reach tol={tol:g} at the requested times",
                float(np.max(err)),
            )
        return PropagationResult(ts, states, err)
    n = gen.dimension
    if n > MAX_DIM:
        raise CapacityError(f"dimension {n} exceeds the dense-algebra budget {MAX_DIM}")
    states, errs = integrate_linear_ode(gen.evaluate, np.eye(n, dtype=complex), ts, tol)
    return PropagationResult(ts, states, errs)


# -- relative-accurate single-column propagation --------------------------

#: t*||M|| below which the truncated power series is used.
SERIES_THRESHOLD = 0.5


def expm_column_series(
    m: np.ndarray, source: int, ts: np.ndarray, max_terms: int = 120
) -> np.ndarray:
    """Column ``exp(m t)[:, source]`` by direct power series.

    Intended for ``t * ||m|| <~ 1`` where the series has no cancellation
    and every entry converges to full relative accuracy; the term count
    adapts until the rigorous tail bound is negligible.
    """
    m = _as_square(m, "expm_column_series")
    n = m.shape[0]
    tmax = float(np.max(ts))
    nrm_inf = float(np.linalg.norm(m, np.inf))
    w = np.zeros(n, dtype=complex)
    w[source] = 1.0
    vecs = [w]
    bound = 1.0
    for k in range(1, max_terms):
        w = m @ w
        vecs.append(w)
        bound *= tmax * nrm_inf / k
        if bound < 1e-60:
            break
    coeffs = np.array(vecs)  # (K, n)
    powers = np.empty((ts.size, coeffs.shape[0]))
    term = np.ones(ts.size)
    for k in range(coeffs.shape[0]):
        powers[:, k] = term
        term = term * ts / (k + 1)
    return powers @ coeffs


def propagator_column(
    m: np.ndarray, source: int, ts: Sequence[float], tol: float = 1e-10
) -> np.ndarray:
    """``X(t)[:, source]`` for static ``m``, accurate in relative terms.

    Small times (``t ||m|| <`` :data:`SERIES_THRESHOLD`) go through the
    power series, the rest through :func:`expm_states`.
    """
    ts = _validate_grid(ts)
    m = _as_square(m, "propagator_column")
    nrm = spectral_norm(m)
    out = np.empty((ts.size, m.shape[0]), dtype=complex)
    small = ts * nrm < SERIES_THRESHOLD
    if np.any(small):
        out[small] = expm_column_series(m, source, ts[small])
    if np.any(~small):
        states, err = expm_states(m, ts[~small])
        if np.any(err > tol):
            raise AccuracyError(
                f"cannot reach tol={tol:g} at the largest requested times",
                float(np.max(err)),
            )
        out[~small] = states[:, :, source]
    return out
