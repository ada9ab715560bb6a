"""Acceptance suite: one test per criterion, one printed verdict line each.

Every randomized criterion prints its seed in the verdict line so any
failure is reproducible.  All tolerances are fixed here, not tuned at
run time.
"""

import math

import numpy as np
import scipy.linalg

from ctwalks.asymptotics import (
    ErrorEnvelope,
    error_bound,
    fit_exponent,
    log_grid,
    predict,
    timescale,
    transition_probability_series,
)
from ctwalks.gauge import apply_gauge, cycle_phase, gauge_trivialize
from ctwalks.generators import (
    StaticGenerator,
    chiral_adjacency,
    chiral_hamiltonian,
    ctqw_generator,
    ctrw_generator,
    rotating_frame_generator,
)
from ctwalks.graphs import (
    binary_tree,
    cycle_graph,
    diamond_with_chord,
    distances_and_counts,
    path_graph,
    random_connected_graph,
    random_tree,
)
from ctwalks.lindblad import build_lindbladian, commutator_superoperator, density_entry_series
from ctwalks.linalg import propagate, spectral_norm
from ctwalks.verify import (
    disorder_experiment,
    fitted_probability_law,
    infer_distance,
    verify_norm_bound,
    verify_split_bound,
)

SEED = 20240811

TREE_PAIRS = ((0, 1, 1), (0, 3, 2), (0, 7, 3), (7, 9, 4))  # (source, target, distance)

CANCELLING_PHASES = {(0, 2): np.pi / 2, (1, 2): -np.pi / 2}


def verdict(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    assert ok, f"{name}: {detail}"


def random_graph_suite(count: int, n_max: int, seed_tag: int):
    graphs = []
    for k in range(count):
        rng = np.random.default_rng([SEED, seed_tag, k])
        n = int(rng.integers(4, n_max + 1))
        graphs.append((random_connected_graph(n, rng), rng))
    return graphs


def test_criterion_1_truncation_bound_static_generators():
    """50 random graphs x {-L, -iA, -iH_ch} x all ordered pairs x 40 times."""
    worst = 0.0
    checked = 0
    for g, rng in random_graph_suite(50, 10, seed_tag=1):
        tau_ref = timescale(ctqw_generator(g))
        ts = np.geomspace(1e-4 * tau_ref, 2 * tau_ref, 40)
        phases = {e: float(rng.uniform(-np.pi, np.pi)) for e in g.undirected_edges}
        for gen in (ctrw_generator(g), ctqw_generator(g), chiral_hamiltonian(g, phases)):
            reports = verify_norm_bound(gen, g, ts, slack=1e-9)
            checked += len(reports)
            worst = max(worst, max(r.max_residual for r in reports))
            if any(r.violated for r in reports):
                verdict("criterion 1: truncation bound (static walks)", False,
                        f"violation on graph with n={g.n}")
    verdict("criterion 1: truncation bound (static walks)", checked > 0,
            f"{checked} pair sweeps, seed {SEED}")


def test_criterion_2_truncation_bound_interaction_picture():
    """Same protocol with Gaussian on-site terms and the split envelope."""
    checked = 0
    for g, rng in random_graph_suite(50, 10, seed_tag=2):
        v = rng.standard_normal(g.n)
        candidates = [ctqw_generator(g, v).matrix]
        if g.n <= 7:  # also exercise a positive envelope shift
            candidates.append(ctrw_generator(g).matrix + np.diag(0.5 * v + 1.0))
        for matrix in candidates:
            tau = timescale(StaticGenerator(matrix), mode="offdiag")
            ts = np.geomspace(1e-4 * tau, 2 * tau, 40)
            reports = verify_split_bound(matrix, g, ts, slack=1e-9)
            checked += len(reports)
            if any(r.violated for r in reports):
                verdict("criterion 2: truncation bound (interaction picture)", False,
                        f"violation on graph with n={g.n}")
    verdict("criterion 2: truncation bound (interaction picture)", checked > 0,
            f"{checked} pair sweeps, seed {SEED}")


def test_criterion_3_exponent_laws_on_binary_tree():
    """Fitted slopes d (diffusive) and 2d (coherent) within 2 percent."""
    tree = binary_tree(3)
    results = []
    for classical, gen in ((True, ctrw_generator(tree)), (False, ctqw_generator(tree))):
        tau = timescale(gen)
        for source, target, d in TREE_PAIRS:
            fit = fitted_probability_law(gen, source, target, tau=tau, points=25,
                                         classical=classical)
            expected = d if classical else 2 * d
            results.append(abs(fit.slope / expected - 1.0))
    ok = all(r < 0.02 for r in results)
    verdict("criterion 3: exponent laws on the binary tree", ok,
            f"max relative slope error {max(results):.2e}")


def test_criterion_4_coefficient_law_on_binary_tree():
    """Probability / t^2d and entry / t^d reach their combinatorial limits."""
    tree = binary_tree(3)
    gen_q = ctqw_generator(tree)
    gen_r = ctrw_generator(tree)
    tau_q, tau_r = timescale(gen_q), timescale(gen_r)
    errs = []
    for source, target, d in TREE_PAIRS:
        count = distances_and_counts(tree, source)[1][target]
        expected = (count / math.factorial(d)) ** 2
        t = 1e-4 * tau_q
        got = float(transition_probability_series(gen_q, source, target, [t])[0]) / t ** (2 * d)
        errs.append(abs(got / expected - 1.0))
        expected_r = count / math.factorial(d)
        t = 1e-4 * tau_r
        got_r = float(
            transition_probability_series(gen_r, source, target, [t], classical=True)[0]
        ) / t**d
        errs.append(abs(got_r / expected_r - 1.0))
    ok = all(e < 1e-3 for e in errs)
    verdict("criterion 4: coefficient law on the binary tree", ok,
            f"max relative error {max(errs):.2e}")


def test_criterion_5_potential_universality():
    """75 Gaussian potentials on the 6-cycle: slopes and coefficients collapse."""
    g = cycle_graph(6)
    pairs = ((0, 1), (0, 2), (0, 3))
    result = disorder_experiment(g, pairs, seed=SEED, realizations=75, points=20)
    slope_spread = result.spread()
    coeff_spread = (
        result.coefficients.max(axis=0) - result.coefficients.min(axis=0)
    ) / result.coefficients.mean(axis=0)
    ok = bool(np.all(slope_spread < 0.02) and np.all(coeff_spread < 0.02))
    verdict("criterion 5: on-site potential universality", ok,
            f"slope spread {slope_spread.max():.2e}, coefficient spread "
            f"{coeff_spread.max():.2e}, seed {SEED}")


def test_criterion_6_chiral_cancellation_exponent_six():
    """Cancelling phases lift the 0->1 exponent from 4 to 6."""
    g = diamond_with_chord()
    gen_c = chiral_hamiltonian(g, CANCELLING_PHASES)
    gen_0 = chiral_hamiltonian(g, {})
    pred_c, _ = predict(gen_c, g, 0, 1, 1e-3)
    pred_0, _ = predict(gen_0, g, 0, 1, 1e-3)
    fit_c = fitted_probability_law(gen_c, 0, 1, points=25)
    fit_0 = fitted_probability_law(gen_0, 0, 1, points=25)
    ok = (
        pred_c.cancelled
        and not pred_0.cancelled
        and abs(fit_c.slope / 6.0 - 1.0) < 0.02
        and abs(fit_0.slope / 4.0 - 1.0) < 0.02
    )
    verdict("criterion 6: chiral interference cancellation", ok,
            f"slopes {fit_c.slope:.4f} vs 6 and {fit_0.slope:.4f} vs 4")


def test_criterion_7_gauge_trivialization():
    """Trees always trivialize; a pi cycle never does and yields a witness."""
    ok = True
    detail = ""
    for k in range(20):
        rng = np.random.default_rng([SEED, 7, k])
        g = random_tree(int(rng.integers(4, 11)), rng)
        phases = {e: float(rng.uniform(-np.pi, np.pi)) for e in g.undirected_edges}
        h = chiral_adjacency(g, phases)
        res = gauge_trivialize(h)
        if not res.trivializable:
            ok, detail = False, f"tree realization {k} did not trivialize"
            break
        gauged = apply_gauge(h, res.lam)
        for t in (0.4, 1.3):
            pc = np.abs(scipy.linalg.expm(-1j * h * t)) ** 2
            pg = np.abs(scipy.linalg.expm(-1j * gauged * t)) ** 2
            if np.max(np.abs(pc - pg)) > 1e-10:
                ok, detail = False, f"gauge changed probabilities at t={t}"
                break
    if ok:
        for k in range(20):
            rng = np.random.default_rng([SEED, 77, k])
            g = random_connected_graph(int(rng.integers(4, 9)), rng, extra_edge_prob=0.5)
            extra = [e for e in g.undirected_edges]
            # put the obstruction on one edge of some cycle: pi total phase
            h = None
            for u, v in extra:
                trial = dict.fromkeys(extra, 0.0)
                trial[(u, v)] = np.pi
                candidate = chiral_adjacency(g, trial)
                res = gauge_trivialize(candidate)
                if not res.trivializable:
                    h = candidate
                    break
            if h is None:  # tree-like draw: every single-edge phase gauged away
                ok, detail = False, f"graph realization {k} had no obstructed cycle"
                break
            phase = cycle_phase(h, res.witness_cycle)
            if abs(phase - res.witness_phase) > 1e-12 or abs(phase - 1.0) <= 1e-9:
                ok, detail = False, "witness cycle does not certify the obstruction"
                break
    verdict("criterion 7: gauge trivialization and witnesses", ok,
            detail or f"20 trees and 20 obstructed graphs, seed {SEED}")


def test_criterion_8_rotating_frame_chain():
    """Chain with one rotating site: chain-integrated amplitudes obey the bound."""
    g = path_graph(4)
    gen = rotating_frame_generator(g, [1.0, 0.0, 0.0, 0.0])
    norm_a = spectral_norm(gen.adjacency)
    tau = 1.0 / norm_a
    # the instantaneous norm never moves
    drift = max(
        abs(spectral_norm(gen.evaluate(t)) - norm_a) for t in np.linspace(0.0, 2 * tau, 25)
    )
    ts = np.geomspace(1e-4 * tau, 2 * tau, 40)
    result = propagate(gen, ts, tol=1e-11)
    dists = {s: distances_and_counts(g, s)[0] for s in range(4)}
    worst_margin = math.inf
    ok = drift < 1e-10
    for source in range(4):
        for target in range(4):
            d = dists[source][target]
            amps = np.zeros(ts.size, dtype=complex)
            from ctwalks.graphs import enumerate_shortest_paths
            from ctwalks.asymptotics import ode_chain_amplitude

            for path in enumerate_shortest_paths(g, source, target).paths:
                amps += ode_chain_amplitude(gen, path, ts, tol=1e-10)
            exact = result.states[:, target, source]
            env = ErrorEnvelope(tau=tau, lambda_shift=0.0, distance=d)
            bounds = np.array([error_bound(env, t) for t in ts])
            residual = np.abs(exact - amps)
            worst_margin = min(worst_margin, float(np.min(bounds + 1e-9 - residual)))
            if np.any(residual > bounds + 1e-9):
                ok = False
    verdict("criterion 8: rotating-frame chain bound", ok,
            f"norm drift {drift:.1e}, smallest bound margin {worst_margin:.2e}")


def test_criterion_9_lindbladian_structure():
    """Direct and block assembly agree exactly; trace preserved; commutator at omega=0."""
    ok = True
    detail = ""
    for k in range(10):
        rng = np.random.default_rng([SEED, 9, k])
        n = int(rng.integers(2, 7))
        g = random_connected_graph(n, rng) if n > 2 else path_graph(2)
        v = rng.standard_normal(n)
        omega = float(rng.uniform(0.1, 2.0))
        ql = build_lindbladian(g, v, omega)  # raises on inexact reassembly
        if ql.trace_residual() >= 1e-12:
            ok, detail = False, f"trace residual {ql.trace_residual():.2e}"
            break
        ham = chiral_adjacency(g, {}) + np.diag(v)
        if not np.array_equal(build_lindbladian(g, v, 0.0).matrix, commutator_superoperator(ham)):
            ok, detail = False, "omega=0 deviates from the vectorized commutator"
            break
    verdict("criterion 9: dissipative-walk assembly", ok,
            detail or f"10 random graphs, seed {SEED}")


def test_criterion_10_exponent_halving():
    """Population exponent on the 4-chain: 6 coherently, 3 with dissipation."""
    g = path_graph(4)
    slopes = {}
    for omega, expected in ((0.0, 6.0), (0.5, 3.0)):
        ql = build_lindbladian(g, omega=omega)
        tau = timescale(StaticGenerator(ql.matrix))
        ts = log_grid(1e-3 * tau, 1e-2 * tau, 25)
        series = density_entry_series(ql, 0, (3, 3), ts).real
        fit = fit_exponent(list(zip(ts, series)), (ts[0], ts[-1]))
        slopes[omega] = fit.slope
        if abs(fit.slope / expected - 1.0) >= 0.03:
            verdict("criterion 10: decoherence halves the exponent", False,
                    f"omega={omega}: slope {fit.slope:.4f}, expected {expected}")
    verdict("criterion 10: decoherence halves the exponent", True,
            f"slopes {slopes[0.0]:.4f} -> {slopes[0.5]:.4f}")


def test_criterion_11_distance_oracle():
    """round(slope/2) recovers BFS distances (d <= 3) on 20 random graphs."""
    total = 0
    wrong = 0
    for k in range(20):
        rng = np.random.default_rng([SEED, 11, k])
        g = random_connected_graph(int(rng.integers(4, 9)), rng)
        gen = ctqw_generator(g)
        tau = timescale(gen)
        for source in range(g.n):
            dist = distances_and_counts(g, source)[0]
            for target in range(g.n):
                d = dist[target]
                if d is None or d > 3:
                    continue
                fit = fitted_probability_law(gen, source, target, tau=tau, points=20)
                total += 1
                if infer_distance(fit.slope, classical=False) != d:
                    wrong += 1
    verdict("criterion 11: distance oracle", wrong == 0,
            f"{total} pairs checked, {wrong} mismatches, seed {SEED}")
