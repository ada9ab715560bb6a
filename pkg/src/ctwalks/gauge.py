"""Gauge trivialization of chiral walk Hamiltonians.

A Hermitian hopping matrix ``H`` with unit-modulus phases on its entries
is gauge-equivalent to the phase-free matrix ``R = |H|`` (entrywise
modulus) exactly when every directed cycle of its support graph carries
total phase 1.  The diagonal unitary doing the job is built
constructively along a spanning tree; the first cycle violating the
condition is returned as a witness otherwise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .linalg import _as_square, hs_norm

#: Default tolerance on |cycle phase - 1|; phases accumulate rounding
#: over O(n) multiplications.
DEFAULT_GAUGE_TOL = 1e-9


@dataclass(frozen=True)
class GaugeResult:
    """Outcome of a gauge-trivialization attempt.

    ``lam`` holds the unit-modulus diagonal with
    ``diag(lam)^+ H diag(lam) = |H|`` when ``trivializable``; otherwise
    ``witness_cycle`` is a closed vertex sequence whose accumulated
    phase ``witness_phase`` differs from 1 by more than the tolerance.
    """

    trivializable: bool
    lam: Optional[np.ndarray] = None
    witness_cycle: Optional[tuple[int, ...]] = None
    witness_phase: Optional[complex] = None


def cycle_phase(h: np.ndarray, cycle) -> complex:
    """Product of hopping phases along a closed vertex sequence."""
    phase = 1.0 + 0.0j
    for a, b in zip(cycle, cycle[1:]):
        w = h[b, a]
        if w == 0:
            raise DomainError(f"({a},{b}) is not an edge of the support graph")
        phase *= w / abs(w)
    return phase


def gauge_trivialize(
    h: np.ndarray, tol: float = DEFAULT_GAUGE_TOL, root: Optional[int] = None
) -> GaugeResult:
    """Decide gauge-equivalence of ``h`` to its entrywise modulus.

    Builds a BFS spanning tree per connected component (rooted at
    ``root`` where applicable, else at the smallest vertex), fixes the
    gauge to 1 at each root, propagates it along tree edges, then checks
    the induced cycle of every non-tree edge.  Trees therefore always
    trivialize.
    """
    h = _as_square(h, "gauge_trivialize")
    n = h.shape[0]
    scale = hs_norm(h)
    if scale > 0 and hs_norm(h - h.conj().T) > 1e-10 * scale:
        raise DomainError("gauge trivialization requires a Hermitian matrix")
    if root is not None and not (0 <= root < n):
        raise DomainError(f"root {root} outside 0..{n - 1}")

    lam = np.zeros(n, dtype=complex)
    parent: list[Optional[int]] = [None] * n
    comp = [-1] * n
    for c, start in enumerate(_component_starts(h, root)):
        lam[start] = 1.0
        comp[start] = c
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in range(n):
                if v != u and h[v, u] != 0 and comp[v] == -1:
                    comp[v] = c
                    parent[v] = u
                    # lam[v] is chosen so conj(lam[u]) H[u,v] lam[v] is
                    # real positive, i.e. it accumulates the phase of the
                    # child<-parent hop along the tree path from the root
                    lam[v] = lam[u] * h[v, u] / abs(h[v, u])
                    queue.append(v)

    for u in range(n):
        for v in range(u + 1, n):
            if h[v, u] == 0 or parent[v] == u or parent[u] == v:
                continue
            residual = lam[u].conjugate() * (h[u, v] / abs(h[u, v])) * lam[v]
            if abs(residual - 1.0) > tol:
                cycle = _fundamental_cycle(parent, u, v)
                return GaugeResult(
                    trivializable=False,
                    witness_cycle=cycle,
                    witness_phase=complex(cycle_phase(h, cycle)),
                )
    return GaugeResult(trivializable=True, lam=lam)


def apply_gauge(h: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """``diag(lam)^+ h diag(lam)``."""
    return lam.conjugate()[:, None] * h * lam[None, :]


def _component_starts(h: np.ndarray, root: Optional[int]):
    n = h.shape[0]
    seen = [False] * n
    starts = []
    candidates = ([root] if root is not None else []) + list(range(n))
    for s in candidates:
        if seen[s]:
            continue
        starts.append(s)
        queue = deque([s])
        seen[s] = True
        while queue:
            u = queue.popleft()
            for v in range(n):
                if v != u and h[v, u] != 0 and not seen[v]:
                    seen[v] = True
                    queue.append(v)
    return starts


def _fundamental_cycle(parent, u: int, v: int) -> tuple[int, ...]:
    """Closed sequence u -> v -> (tree path back to u)."""
    anc_u = _ancestry(parent, u)
    anc_v = _ancestry(parent, v)
    common = set(anc_u) & set(anc_v)
    # walk v upwards until the first common ancestor with u
    path_v = []
    for x in anc_v:
        path_v.append(x)
        if x in common:
            lca = x
            break
    up_u = []
    for x in anc_u:
        if x == lca:
            break
        up_u.append(x)
    # u -> v (the non-tree edge), v -> ... -> lca, lca -> ... -> u; the
    # sequence is closed because up_u starts at u (or lca already is u)
    return tuple([u] + path_v + list(reversed(up_u)))


def _ancestry(parent, x: int) -> list[int]:
    out = [x]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out
