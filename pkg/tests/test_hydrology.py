import numpy as np
import pytest

from rivernet import (
    ChannelSpec,
    MissingUpstreamDischarge,
    PropagationConflict,
    SharedParams,
    apply_hydrology,
    normal_depth,
    preset,
    uniform_flow,
)

# closed-form values evaluated at 30-digit precision and frozen
Y_Q005_B20 = 0.65975395538644713
Y_Q009_B20 = 0.93874039335956941
V_Q005_B20 = 0.0037892914162759952
A_Q005_B20 = 13.195079107728943


def test_normal_depth_unit_inputs():
    assert normal_depth(ChannelSpec(B=1.0, n=1.0, S0=1.0, Q=1.0)) == 1.0


@pytest.mark.parametrize("Q,expected", [
    (0.05, Y_Q005_B20),
    (0.09, Y_Q009_B20),
])
def test_normal_depth_frozen_values(Q, expected):
    y = normal_depth(ChannelSpec(B=20.0, n=0.2, S0=1e-6, Q=Q))
    np.testing.assert_allclose(y, expected, rtol=1e-14)


def test_uniform_flow_frozen_values():
    v, A = uniform_flow(ChannelSpec(B=20.0, n=0.2, S0=1e-6, Q=0.05))
    np.testing.assert_allclose(v, V_Q005_B20, rtol=1e-14)
    np.testing.assert_allclose(A, A_Q005_B20, rtol=1e-14)
    v1, A1 = uniform_flow(ChannelSpec(B=1.0, n=1.0, S0=1.0, Q=1.0))
    assert (v1, A1) == (1.0, 1.0)


def test_width_doubling_exponents():
    # y scales by 2^(-3/5) and v by 2^(-2/5) when B doubles
    base = ChannelSpec(B=7.0, n=0.15, S0=3e-5, Q=0.4)
    wide = ChannelSpec(B=14.0, n=0.15, S0=3e-5, Q=0.4)
    np.testing.assert_allclose(normal_depth(wide) / normal_depth(base),
                               2.0 ** (-0.6), rtol=1e-13)
    np.testing.assert_allclose(uniform_flow(wide)[0] / uniform_flow(base)[0],
                               2.0 ** (-0.4), rtol=1e-13)


def test_normal_depth_monotonicity():
    base = dict(B=10.0, n=0.2, S0=1e-5, Q=0.1)
    y0 = normal_depth(ChannelSpec(**base))
    for key, factor, direction in (("Q", 2.0, +1), ("n", 2.0, +1),
                                   ("B", 2.0, -1), ("S0", 2.0, -1)):
        changed = dict(base)
        changed[key] *= factor
        y1 = normal_depth(ChannelSpec(**changed))
        assert (y1 - y0) * direction > 0, key


def _specs(net, B, Q=None):
    out = {}
    for e in net.edges:
        b = B[e.id] if isinstance(B, (list, tuple)) else B
        q = None if Q is None or e.id not in Q else Q[e.id]
        out[e.id] = ChannelSpec(B=b, n=0.2, S0=1e-6, Q=q)
    return out


def test_discharge_additivity_3a():
    net = preset("3-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    wet = apply_hydrology(net, _specs(net, 20.0, {0: 0.05, 1: 0.02}))
    # Q3 = 0.07 exactly; v, A follow the closed form
    v2, A2 = uniform_flow(ChannelSpec(B=20.0, n=0.2, S0=1e-6, Q=0.07))
    np.testing.assert_allclose(wet.params[2].v, v2, rtol=1e-14)
    np.testing.assert_allclose(wet.params[2].A, A2, rtol=1e-14)


def test_discharge_additivity_4a():
    net = preset("4-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    wet = apply_hydrology(net, _specs(net, 20.0, {0: 0.05, 1: 0.01, 2: 0.01}))
    v4, A4 = uniform_flow(ChannelSpec(B=20.0, n=0.2, S0=1e-6, Q=0.07))
    np.testing.assert_allclose(wet.params[3].v, v4, rtol=1e-14)
    np.testing.assert_allclose(wet.params[3].A, A4, rtol=1e-14)


def test_fig7_scenario_triples():
    # large river B=20 with Q1=0.05 joined by a narrow B=4 branch at 0.4*Q1
    net = preset("3-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    wet = apply_hydrology(net, _specs(net, [20.0, 4.0, 20.0],
                                      {0: 0.05, 1: 0.02}))
    np.testing.assert_allclose(
        [p.v for p in wet.params],
        [0.0037892914162759952, 0.005, 0.0043352008219056172], rtol=1e-14)
    np.testing.assert_allclose(
        [p.A for p in wet.params],
        [13.195079107728943, 4.0, 16.146887508945944], rtol=1e-14)


def test_junction_flux_closes_to_machine_precision():
    net = preset("5-a", 300.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    wet = apply_hydrology(net, _specs(net, [20.0, 4.0, 20.0, 6.0, 22.0],
                                      {0: 0.05, 1: 0.02, 3: 0.03}))
    for junc in wet.junctions():
        total = sum(wet.d(junc.id, e.id) * wet.params[e.id].A * wet.params[e.id].v
                    for e in wet.incident_edges(junc.id))
        scale = sum(abs(wet.params[e.id].A * wet.params[e.id].v)
                    for e in wet.incident_edges(junc.id))
        assert abs(total) < 1e-15 * scale


def test_missing_upstream_discharge():
    net = preset("3-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    with pytest.raises(MissingUpstreamDischarge):
        apply_hydrology(net, _specs(net, 20.0, {0: 0.05}))


def test_inconsistent_downstream_discharge():
    net = preset("3-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    with pytest.raises(PropagationConflict):
        apply_hydrology(net, _specs(net, 20.0, {0: 0.05, 1: 0.02, 2: 0.1}))


def test_consistent_downstream_discharge_accepted():
    net = preset("3-a", 800.0, SharedParams(D=0.6, r=1e-5, m=1e-6))
    wet = apply_hydrology(net, _specs(net, 20.0, {0: 0.05, 1: 0.02, 2: 0.07}))
    assert wet.params[2].A > 0
