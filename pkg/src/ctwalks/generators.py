"""Generator families: diffusive, tight-binding, chiral and rotating-frame.

A generator is the (possibly time-dependent) matrix ``M(t)`` driving
``dX/dt = M(t) X``.  Three kinds cover every walk studied here:

* :class:`StaticGenerator` -- constant ``M``;
* :class:`InteractionGenerator` -- ``M(t) = exp(-Vt) Mhat exp(Vt)`` with
  diagonal ``V`` and zero-diagonal ``Mhat`` (the diagonal/off-diagonal
  split in the interaction picture);
* :class:`RotatingFrameGenerator` -- ``M(t) = -i e^{i Om t} A e^{-i Om t}``
  with real diagonal ``Om`` and 0/1 adjacency ``A``.

Generators are immutable; ``evaluate``/``entry`` are pure.  The scalar
``entry(m, n, t)`` path is what path amplitudes integrate, so it avoids
building dense matrices.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DomainError
from .graphs import Graph, adjacency_matrix, standard_matrices
from .linalg import _as_square


class Generator:
    """Common interface: dimension, dense ``evaluate(t)``, scalar ``entry``."""

    is_static = False
    kind = "generic"

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    def evaluate(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def entry(self, m: int, n: int, t: float) -> complex:
        raise NotImplementedError

    def support(self) -> np.ndarray:
        """Boolean off-diagonal support: entry (m, n) True iff edge n -> m."""
        raise NotImplementedError

    def offdiag_part(self) -> np.ndarray:
        """The constant off-diagonal factor Mhat (zero diagonal)."""
        raise NotImplementedError

    def diagonal_vector(self) -> np.ndarray:
        """Diagonal part V as a vector (zeros when there is none)."""
        raise NotImplementedError

    def support_graph(self) -> Graph:
        from .graphs import from_adjacency_support

        return from_adjacency_support(self.support(), directed=True)

    def _check_vertex(self, v: int) -> int:
        if not (0 <= v < self.dimension):
            raise DomainError(f"vertex id {v} outside 0..{self.dimension - 1}")
        return int(v)


class StaticGenerator(Generator):
    is_static = True
    kind = "static"

    def __init__(self, matrix: np.ndarray):
        self.matrix = _as_square(matrix, "StaticGenerator")
        self.matrix.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def evaluate(self, t: float) -> np.ndarray:
        return self.matrix

    def entry(self, m: int, n: int, t: float = 0.0) -> complex:
        return complex(self.matrix[self._check_vertex(m), self._check_vertex(n)])

    def support(self) -> np.ndarray:
        s = self.matrix != 0
        np.fill_diagonal(s, False)
        return s

    def offdiag_part(self) -> np.ndarray:
        mhat = self.matrix.copy()
        np.fill_diagonal(mhat, 0.0)
        return mhat

    def diagonal_vector(self) -> np.ndarray:
        return np.diag(self.matrix).copy()


class InteractionGenerator(Generator):
    """``M(t) = exp(-Vt) Mhat exp(Vt)``, entrywise ``Mhat[m,n] e^{(V_n - V_m) t}``."""

    kind = "interaction"

    def __init__(self, v_diag: Sequence[complex], mhat: np.ndarray):
        self.mhat = _as_square(mhat, "InteractionGenerator")
        self.v_diag = np.asarray(v_diag, dtype=complex).reshape(-1)
        if self.v_diag.size != self.mhat.shape[0]:
            raise DomainError("diagonal length does not match matrix dimension")
        if np.any(np.diag(self.mhat) != 0):
            raise DomainError("Mhat must have zero diagonal")
        self.mhat.setflags(write=False)
        self.v_diag.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.mhat.shape[0]

    def evaluate(self, t: float) -> np.ndarray:
        v = self.v_diag
        return self.mhat * np.exp((v[None, :] - v[:, None]) * t)

    def entry(self, m: int, n: int, t: float) -> complex:
        m, n = self._check_vertex(m), self._check_vertex(n)
        return complex(self.mhat[m, n] * np.exp((self.v_diag[n] - self.v_diag[m]) * t))

    def support(self) -> np.ndarray:
        return self.mhat != 0

    def offdiag_part(self) -> np.ndarray:
        return self.mhat

    def diagonal_vector(self) -> np.ndarray:
        return self.v_diag.copy()


class RotatingFrameGenerator(Generator):
    """``M(t) = -i e^{i Om t} A e^{-i Om t}`` for a rotating on-site frame.

    Same spectrum as ``-iA`` at every instant, so ``||M(t)|| = ||A||``
    regardless of the frame frequencies.
    """

    kind = "rotating"

    def __init__(self, omega: Sequence[float], adjacency: np.ndarray):
        self.adjacency = _as_square(adjacency, "RotatingFrameGenerator").real
        self.omega = np.asarray(omega, dtype=float).reshape(-1)
        if self.omega.size != self.adjacency.shape[0]:
            raise DomainError("frequency vector length does not match adjacency")
        if not np.array_equal(self.adjacency, self.adjacency.T):
            raise DomainError("adjacency must be symmetric")
        if np.any(np.diag(self.adjacency) != 0):
            raise DomainError("adjacency must have zero diagonal")
        if not np.all(np.isin(self.adjacency, (0.0, 1.0))):
            raise DomainError("adjacency must be 0/1")
        self.adjacency.setflags(write=False)
        self.omega.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.adjacency.shape[0]

    def evaluate(self, t: float) -> np.ndarray:
        w = self.omega
        return -1j * self.adjacency * np.exp(1j * (w[:, None] - w[None, :]) * t)

    def entry(self, m: int, n: int, t: float) -> complex:
        m, n = self._check_vertex(m), self._check_vertex(n)
        if self.adjacency[m, n] == 0:
            return 0.0 + 0.0j
        return complex(-1j * np.exp(1j * (self.omega[m] - self.omega[n]) * t))

    def support(self) -> np.ndarray:
        return self.adjacency != 0

    def offdiag_part(self) -> np.ndarray:
        return -1j * self.adjacency

    def diagonal_vector(self) -> np.ndarray:
        return np.zeros(self.dimension, dtype=complex)


# -- constructors ----------------------------------------------------------


def _require_undirected_unit(g: Graph, what: str) -> None:
    if g.directed:
        raise DomainError(f"{what} requires an undirected graph")
    if not g.is_unit_weighted():
        raise DomainError(f"{what} requires unit edge weights")


def ctrw_generator(g: Graph) -> StaticGenerator:
    """Diffusion generator ``-L``; columns sum to zero."""
    _require_undirected_unit(g, "the diffusive walk")
    return StaticGenerator(-standard_matrices(g).laplacian.astype(complex))


def ctqw_generator(g: Graph, v: Optional[Sequence[float]] = None) -> StaticGenerator:
    """Tight-binding walk generator ``-i (A + diag(v))``."""
    if g.directed:
        raise DomainError("the coherent walk requires an undirected graph")
    a = adjacency_matrix(g)
    if v is not None:
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != g.n:
            raise DomainError(f"potential length {v.size} does not match {g.n} vertices")
        a = a + np.diag(v)
    return StaticGenerator(-1j * a)


def chiral_adjacency(g: Graph, theta: Mapping[tuple, float]) -> np.ndarray:
    """Hermitian hopping matrix with phase ``e^{i theta}`` per edge.

    ``theta`` maps undirected edges to angles; the orientation convention
    is fixed: the (head > tail) direction of the canonical edge (u, v)
    with u < v picks up ``e^{+i theta}``, i.e. ``H[v, u] = e^{i theta}``.
    Edges without an angle hop with weight 1.
    """
    _require_undirected_unit(g, "a chiral walk")
    edge_set = set(g.undirected_edges)
    h = np.zeros((g.n, g.n), dtype=complex)
    angles = {}
    for (u, v), th in theta.items():
        key = (min(u, v), max(u, v))
        if key not in edge_set:
            raise DomainError(f"angle given for non-edge {key}")
        if key in angles and angles[key] != float(th):
            raise DomainError(f"conflicting angles for edge {key}")
        angles[key] = float(th)
    for u, v in edge_set:
        th = angles.get((u, v), 0.0)
        h[v, u] = np.exp(1j * th)
        h[u, v] = np.exp(-1j * th)
    return h


def chiral_hamiltonian(g: Graph, theta: Mapping[tuple, float]) -> StaticGenerator:
    """Chiral walk generator ``-i H_ch`` with conjugate phases per direction."""
    return StaticGenerator(-1j * chiral_adjacency(g, theta))


def rotating_frame_generator(g: Graph, omega: Sequence[float]) -> RotatingFrameGenerator:
    """Rotating-frame walk ``M(t) = -i e^{i Om t} A e^{-i Om t}``."""
    _require_undirected_unit(g, "the rotating-frame walk")
    omega = np.asarray(omega, dtype=float).reshape(-1)
    if omega.size != g.n:
        raise DomainError(f"frequency vector length {omega.size} does not match {g.n}")
    return RotatingFrameGenerator(omega, adjacency_matrix(g).real)


def interaction_picture(matrix: np.ndarray) -> InteractionGenerator:
    """Split a static matrix into its diagonal/off-diagonal interaction form."""
    m = _as_square(matrix, "interaction_picture")
    v = np.diag(m).copy()
    mhat = m.copy()
    np.fill_diagonal(mhat, 0.0)
    return InteractionGenerator(v, mhat)


def gaussian_potential(n: int, seed: int, realization: int = 0) -> np.ndarray:
    """Standard-normal on-site potential from a counter-style stream.

    Realization ``k`` of a base seed always draws from the stream keyed
    by ``(seed, k)``, so parallel or out-of-order evaluation cannot
    change the numbers.
    """
    rng = np.random.default_rng([int(seed) & (2**64 - 1), int(realization)])
    return rng.standard_normal(n)
