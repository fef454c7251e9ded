"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.  Tolerances are pinned here and nowhere else.

Criterion 1 note: the reference values for the isolated large river
(1.109 at Q=0.05, 0.768 at Q=0.09) correspond to a hostile downstream
end, not to the free-flow label they are usually quoted with.  The
independent transcendental oracle below gives 1.1711 / 0.7955 for
free-flow and 1.1112 / 0.7700 for zero-flux/hostile, and this library
matches the oracle to four decimals in both configurations; only the
hostile-downstream numbers land within +/- 0.02 of the references.  The
suite therefore asserts the reference values on ZF-H and pins the ZF-FF
solution against the oracle.
"""

import copy
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.optimize import brentq

import rivernet as rn
from rivernet import (
    Extinct,
    FieldState,
    GrowthModel,
    SharedParams,
    assemble,
    build_grid,
    growth_potential,
    interval_R0,
    interval_lambda_star,
    net_reproductive_rate,
    preset,
    principal_eigenvalue,
    sign_consistency,
    steady_state,
    step,
    total_mass,
)
from rivernet.dynamics import simulate
from rivernet.graph import BoundaryCondition, EdgeParams, build_network
from rivernet.oracle import lambda_star_dense
from rivernet.runner import csv_body, load_config, run, sweep

DAY = 86400.0


@contextmanager
def criterion(num, label):
    try:
        yield
    except BaseException:
        print(f"criterion {num:>2}: FAIL - {label}")
        raise
    print(f"criterion {num:>2}: PASS - {label}")


# -- independent continuum oracle for constant-coefficient intervals ---------

def r0_interval_continuum(D, v, r, m, L, bc):
    """R0 from the transcendental phase condition, no shared solver code.

    Writing the eigenfunction as exp(v x / 2D) cos(k x + phi), the boundary
    conditions fix phi and the admissible k; then
    R0 = r / (m + v^2/(4D) + D k^2).
    """
    if bc == "H-H":
        k0 = np.pi / L
    else:
        def phase(k):
            phi = -np.arctan2(v / 2.0, D * k)  # zero-flux upstream
            if bc == "ZF-FF":
                return k * L + phi - np.arctan2(v / (2.0 * D), k)
            if bc == "ZF-H":
                return k * L + phi - np.pi / 2.0
            raise ValueError(bc)
        k0 = brentq(phase, 1e-14, np.pi / L * 0.999999, xtol=1e-15)
    return r / (m + v * v / (4.0 * D) + D * k0 * k0)


def fig5_config(Q, boundary="ZF-H", task="r0", target_h=2.0):
    return {
        "scenario_id": f"isolated-large-river-q{Q}",
        "task": task,
        "network": {"preset": "1", "branch_length": 1600.0},
        "params": {"D": 0.6, "r": 0.8 / DAY, "m": 0.06 / DAY},
        "boundary": boundary,
        "grid": {"target_h": target_h},
        "hydrology": {"n": 0.2, "S0": 1e-6, "B": 20.0, "Q": {"0": Q}},
    }


def fig7_config(q2_over_q1=0.4, boundary="H-H", task="r0", target_h=2.0):
    return {
        "scenario_id": "merging-network-3a",
        "task": task,
        "network": {"preset": "3-a", "branch_length": 800.0},
        "params": {"D": 0.6, "r": 0.8 / DAY, "m": 0.06 / DAY,
                   "per_edge": {"1": {"D": 0.72, "r": 1.2 * 0.8 / DAY}}},
        "boundary": boundary,
        "grid": {"target_h": target_h},
        "hydrology": {"n": 0.2, "S0": 1e-6, "B": {"0": 20.0, "1": 4.0, "2": 20.0},
                      "Q": {"0": 0.05, "1": 0.05 * q2_over_q1}},
    }


def _r0_from_csv(path):
    line = csv_body(path).splitlines()[1]
    return float(line.split(",")[1])


def test_criterion_01_isolated_river_published_values(tmp_path):
    with criterion(1, "isolated large river R0 at Q=0.05 and Q=0.09"):
        reference = {0.05: 1.109, 0.09: 0.768}
        for Q, target in reference.items():
            start = time.perf_counter()
            code, files = run(load_config(fig5_config(Q)), out_dir=tmp_path / str(Q))
            elapsed = time.perf_counter() - start
            assert code == 0
            got = _r0_from_csv(files[0])
            assert got == pytest.approx(target, abs=0.02), (Q, got)
            assert elapsed < 5.0, f"runtime {elapsed:.2f} s at Q={Q}"

        # the literal free-flow label: solver against the independent oracle
        from rivernet.hydrology import ChannelSpec, uniform_flow
        for Q in (0.05, 0.09):
            sc = load_config(fig5_config(Q, boundary="ZF-FF"))
            got = net_reproductive_rate(sc.network, sc.grid).value
            v, _ = uniform_flow(ChannelSpec(B=20.0, n=0.2, S0=1e-6, Q=Q))
            want = r0_interval_continuum(0.6, v, 0.8 / DAY, 0.06 / DAY, 1600.0,
                                         "ZF-FF")
            assert got == pytest.approx(want, rel=1e-3), (Q, got, want)
            # free-flow genuinely misses the reference values by > 0.02
            assert abs(got - reference[Q]) > 0.02


def test_criterion_02_merging_network_extinction(tmp_path):
    with criterion(2, "network 3-a at Q2=0.4 Q1, hostile ends: R0 and extinction"):
        sc = load_config(fig7_config())
        r0 = net_reproductive_rate(sc.network, sc.grid)
        assert r0.value == pytest.approx(0.9301, abs=0.02)
        out = steady_state(sc.network, sc.grid, sc.growth)
        assert isinstance(out, Extinct)
        assert out.lambda_star < 0

        code, files = run(load_config(fig7_config(task="steady")),
                          out_dir=tmp_path)
        assert code == 0
        lines = csv_body(files[0]).splitlines()
        assert lines[0] == "status,R0,lambda_star"
        assert lines[1].startswith("extinct,")


def test_criterion_03_closed_form_convergence():
    with criterion(3, "hostile-interval lambda* and R0 converge at order >= 1.9"):
        D, v, L = 1.0, 0.1, 100.0
        r, m = 0.02, 0.005
        lam_exact = interval_lambda_star(D, v, r - m, L)
        r0_exact = interval_R0(D, v, r, m, L)
        params = [EdgeParams(D=D, v=v, A=1.0, r=r, m=m)]
        bmap = {0: BoundaryCondition.hostile(), 1: BoundaryCondition.hostile()}
        net = build_network([0, 1], [(0, 1, L)], params, bmap)
        errs_l, errs_r = [], []
        for n in (100, 200, 400):
            grid = build_grid(net, L / n)
            lam = principal_eigenvalue(
                assemble(net, grid, growth_potential(net, grid)))
            r0 = net_reproductive_rate(net, grid)
            errs_l.append(abs(lam.value - lam_exact))
            errs_r.append(abs(r0.value - r0_exact))
        for errs in (errs_l, errs_r):
            orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
            assert min(orders) >= 1.9, (errs, orders)
        assert errs_l[-1] / abs(lam_exact) < 1e-3
        assert errs_r[-1] / r0_exact < 1e-3


def _random_scenario(rng, max_cells, max_length=800.0, max_peclet=30.0):
    """Random preset scenario in river-like parameter ranges.

    Per-edge biology is jittered so branches are never exactly identical
    (degenerate spectra are not representative and make eigenvector
    comparisons ill-conditioned), and draws whose edge Peclet number
    exceeds max_peclet are rejected; the physical scenarios here sit
    around 10.
    """
    presets = ["1", "3-a", "3-b", "4-a", "4-b", "5-a", "5-b", "7-a", "7-b"]
    boundaries = ["ZF-FF", "ZF-H", "H-H"]
    while True:
        name = presets[rng.integers(len(presets))]
        shared = SharedParams(
            D=float(np.exp(rng.uniform(np.log(0.05), np.log(2.0)))),
            r=float(np.exp(rng.uniform(np.log(0.1), np.log(2.0)))) / DAY,
            m=float(np.exp(rng.uniform(np.log(0.02), np.log(1.0)))) / DAY,
            v=float(rng.uniform(0.0, 0.005)),
            A=1.0,
            regime=("A-fixed", "v-fixed")[rng.integers(2)],
            boundary=boundaries[rng.integers(3)],
        )
        branch = float(rng.uniform(100, max_length))
        net = preset(name, branch, shared)
        jittered = [
            EdgeParams(D=p.D * float(rng.uniform(0.8, 1.25)), v=p.v, A=p.A,
                       r=p.r * float(rng.uniform(0.8, 1.25)),
                       m=p.m * float(rng.uniform(0.8, 1.25)), K=p.K)
            for p in net.params
        ]
        net = net.with_params(jittered)
        if max(p.v * e.length / p.D
               for e, p in zip(net.edges, net.params)) > max_peclet:
            continue
        cells_per_edge = int(rng.integers(12, max(13, max_cells // net.n_edges + 1)))
        return net, build_grid(net, branch / cells_per_edge)


def test_criterion_04_dense_oracle_equivalence():
    with criterion(4, "power iteration equals symmetrized dense spectrum"):
        rng = np.random.default_rng(41)
        checked = 0
        while checked < 22:
            net, grid = _random_scenario(rng, max_cells=120)
            if grid.n_nodes > 400:
                continue
            op = assemble(net, grid, growth_potential(net, grid))
            pi = principal_eigenvalue(op)
            lam_dense, psi_dense = lambda_star_dense(op)
            assert abs(pi.value - lam_dense) < 1e-8, (checked, pi.value, lam_dense)
            assert np.max(np.abs(pi.psi - psi_dense)) < 1e-8, checked
            checked += 1
        assert checked >= 20


def test_criterion_05_sign_consistency():
    with criterion(5, "sign(R0 - 1) = sign(lambda*) on 50 random scenarios"):
        rng = np.random.default_rng(55)
        for k in range(50):
            net, grid = _random_scenario(rng, max_cells=300)
            report = sign_consistency(net, grid)
            assert report.consistent, (k, report)


def test_criterion_06_trivial_exactness():
    with criterion(6, "uniform stationary regime is reproduced exactly"):
        r, m, K = 2e-5, 1e-5, 1.0
        for name in ["1", "3-a", "3-b", "4-a", "4-b", "5-a", "5-b", "7-a", "7-b"]:
            shared = SharedParams(D=0.4, r=r, m=m, K=K, v=0.0,
                                  regime="v-fixed", boundary="ZF-FF")
            net = preset(name, 250.0, shared)
            grid = build_grid(net, 25.0)
            lam = principal_eigenvalue(
                assemble(net, grid, growth_potential(net, grid)))
            assert abs(lam.value - (r - m)) < 1e-8, name
            r0 = net_reproductive_rate(net, grid)
            assert abs(r0.value - r / m) < 1e-8, name
            ss = steady_state(net, grid)
            assert isinstance(ss, FieldState), name
            assert np.max(np.abs(ss.values - K * (1 - m / r))) < 1e-8, name


def test_criterion_07_radial_reduction():
    with criterion(7, "radial 3-a is spectrally an interval of 2/3 the length"):
        ell = 400.0
        shared = SharedParams(D=0.35, r=0.45 / DAY, m=0.06 / DAY, v=0.0015,
                              regime="v-fixed", A=1.0, boundary="ZF-FF")
        params = [EdgeParams(D=0.35, v=0.0015, A=1.0, r=0.45 / DAY, m=0.06 / DAY)]
        bmap = {0: BoundaryCondition.zero_flux(), 1: BoundaryCondition.free_flow()}
        neti = build_network([0, 1], [(0, 1, 2 * ell)], params, bmap)

        lam_net, lam_int = [], []
        for h in (2.0, 1.0):
            net3 = preset("3-a", ell, shared)
            g3 = build_grid(net3, h)
            gi = build_grid(neti, h)
            lam_net.append(principal_eigenvalue(
                assemble(net3, g3, growth_potential(net3, g3))).value)
            lam_int.append(principal_eigenvalue(
                assemble(neti, gi, growth_potential(neti, gi))).value)
        rich_net = (4 * lam_net[1] - lam_net[0]) / 3
        rich_int = (4 * lam_int[1] - lam_int[0]) / 3
        assert abs(rich_net - rich_int) / abs(rich_int) < 1e-4


def test_criterion_08_dynamics_property_suite():
    with criterion(8, "positivity, ordering, subhomogeneity, relaxation, "
                      "uniqueness, conservation"):
        rng = np.random.default_rng(88)

        # mass conservation over 1e3 steps
        net = build_network(
            [0, 1], [(0, 1, 50.0)],
            [EdgeParams(D=0.02, v=0.004, A=2.0, r=0.0, m=0.0)],
            {0: BoundaryCondition.zero_flux(), 1: BoundaryCondition.zero_flux()})
        grid = build_grid(net, 1.0)
        op = assemble(net, grid, 0.0)
        growth = GrowthModel.from_network(net)
        state = FieldState(values=rng.uniform(0.2, 1.0, grid.n_nodes), time=0.0)
        m0 = total_mass(state, op)
        for _ in range(1000):
            state = step(state, op, growth, dt=25.0)
            assert np.all(state.values >= 0.0)
        assert abs(total_mass(state, op) - m0) / m0 < 1e-9

        # ordering, subhomogeneity, monotone relaxation on a branching network
        net3 = preset("3-a", 50.0, SharedParams(D=0.05, r=6e-4, m=1e-4, v=0.001,
                                               regime="A-fixed", boundary="ZF-H"))
        g3 = build_grid(net3, 2.0)
        op3 = assemble(net3, g3, 0.0)
        gr3 = GrowthModel.from_network(net3)
        free = ~op3.hostile_mask

        lo = np.where(free, rng.uniform(0.05, 0.4, g3.n_nodes), 0.0)
        hi = lo + np.where(free, rng.uniform(0.0, 0.5, g3.n_nodes), 0.0)
        a, b = FieldState(lo, 0.0), FieldState(hi, 0.0)
        for _ in range(40):
            a = step(a, op3, gr3, dt=300.0)
            b = step(b, op3, gr3, dt=300.0)
            assert np.all(a.values <= b.values + 1e-12)
            assert np.all(a.values >= 0.0)

        for gamma in (0.25, 0.5, 0.9):
            u0 = np.where(free, rng.uniform(0.1, 1.0, g3.n_nodes), 0.0)
            x = FieldState(gamma * u0, 0.0)
            y = FieldState(u0.copy(), 0.0)
            for _ in range(40):
                x = step(x, op3, gr3, dt=300.0)
                y = step(y, op3, gr3, dt=300.0)
                assert np.all(x.values >= gamma * y.values - 1e-12), gamma

        u = FieldState(np.where(free, 1.0, 0.0), 0.0)
        prev = u.values.copy()
        for _ in range(40):
            u = step(u, op3, gr3, dt=300.0)
            assert np.all(u.values <= prev + 1e-12)
            prev = u.values.copy()

        # attractor uniqueness when the population persists
        a = FieldState(np.where(free, rng.uniform(0.01, 0.2, g3.n_nodes), 0.0), 0.0)
        b = FieldState(np.where(free, rng.uniform(0.5, 2.0, g3.n_nodes), 0.0), 0.0)
        for _ in range(400):
            a = step(a, op3, gr3, dt=400.0)
            b = step(b, op3, gr3, dt=400.0)
        assert np.max(np.abs(a.values - b.values)) < 1e-6


def test_criterion_09_qualitative_trends(tmp_path):
    with criterion(9, "length, topology, and discharge trends match"):
        start = time.perf_counter()

        length_doc = {
            "task": "sweep",
            "network": {"preset": "1", "total_length": 1000.0},
            "params": {"D": 0.35, "r": 0.45 / DAY, "m": 0.06 / DAY},
            "flow": {"regime": "A-fixed", "v": 0.0015, "A": 1.0},
            "boundary": "ZF-FF",
            "grid": {"target_h": 5.0},
            "sweep": {"axes": [
                {"path": "network.preset", "values": ["1", "3-a", "7-a"],
                 "label": "preset"},
                {"path": "network.total_length", "start": 400.0, "stop": 4800.0,
                 "count": 12, "label": "L"},
            ]},
        }
        code, files = run(load_config(length_doc), out_dir=tmp_path / "len",
                          jobs=4)
        assert code == 0
        lines = csv_body(files[0]).splitlines()[1:]
        curves = {}
        for line in lines:
            parts = line.split(",")
            assert parts[-1] == "ok"
            curves.setdefault(parts[0], []).append(float(parts[2]))
        for name, vals in curves.items():
            assert len(vals) >= 10
            assert all(x < y for x, y in zip(vals, vals[1:])), name
        for a, b, c in zip(curves["1"], curves["3-a"], curves["7-a"]):
            assert a >= b >= c

        discharge_doc = {
            "task": "sweep",
            "network": {"preset": "3-a", "branch_length": 800.0},
            "params": {"D": 0.6, "r": 0.8 / DAY, "m": 0.06 / DAY},
            "boundary": "ZF-FF",
            "grid": {"target_h": 4.0},
            "hydrology": {"n": 0.2, "S0": 1e-6,
                          "B": {"0": 20.0, "1": 4.0, "2": 20.0},
                          "Q": {"0": 0.05, "1": 0.02}},
            "sweep": {"axes": [
                {"path": "hydrology.Q.0", "start": 0.01, "stop": 0.15,
                 "count": 10, "label": "Q1"},
                {"path": "hydrology.Q.1", "start": 0.01, "stop": 0.15,
                 "count": 10, "label": "Q2"},
            ]},
        }
        code, files = run(load_config(discharge_doc), out_dir=tmp_path / "q",
                          jobs=4)
        assert code == 0
        rows = csv_body(files[0]).splitlines()[1:]
        grid_vals = np.array([float(r.split(",")[2]) for r in rows]).reshape(10, 10)
        assert np.all(np.diff(grid_vals, axis=0) < 0)  # decreasing in Q1
        assert np.all(np.diff(grid_vals, axis=1) < 0)  # decreasing in Q2

        elapsed = time.perf_counter() - start
        assert elapsed < 120.0, f"{elapsed:.1f} s with 4 workers"


def test_criterion_10_determinism(tmp_path):
    with criterion(10, "repeated runs produce byte-identical CSV bodies"):
        scenarios = [
            ("fig5", fig5_config(0.05)),
            ("fig7-steady", fig7_config(task="steady")),
            ("simulate", {**fig5_config(0.09, task="simulate", target_h=20.0),
                          "simulate": {"t_end": 20 * DAY, "dt": DAY,
                                       "samples": 3, "u0": 0.05}}),
            ("sweep", {
                "task": "sweep",
                "network": {"preset": "3-a", "branch_length": 800.0},
                "params": {"D": 0.6, "r": 0.8 / DAY, "m": 0.06 / DAY},
                "boundary": "ZF-FF",
                "grid": {"target_h": 8.0},
                "hydrology": {"n": 0.2, "S0": 1e-6,
                              "B": {"0": 20.0, "1": 4.0, "2": 20.0},
                              "Q": {"0": 0.05, "1": 0.02}},
                "sweep": {"axes": [{"path": "hydrology.Q.0", "start": 0.02,
                                    "stop": 0.12, "count": 4, "label": "Q1"}]},
            }),
        ]
        for name, doc in scenarios:
            bodies = []
            for attempt in ("first", "second"):
                out = tmp_path / name / attempt
                code, files = run(load_config(copy.deepcopy(doc)), out_dir=out,
                                  jobs=2 if name == "sweep" else 1)
                assert code == 0, name
                bodies.append("".join(csv_body(f) for f in files))
            assert bodies[0] == bodies[1], name
