import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bestsim.conduction import (
    Construction,
    Layer,
    RcNetwork,
    SingularNetwork,
    UnstableStep,
    discretized_network,
    fine_grid_network,
    fine_grid_oracle,
    steady_flux,
    step_boundary,
    two_node_network,
    wall_response,
)

HEAVY = Construction((Layer(0.2, 1.4, 2000.0, 900.0),))

layers = st.builds(Layer, st.floats(0.005, 0.3), st.floats(0.02, 3.0),
                   st.floats(0.0, 2500.0), st.floats(0.0, 1500.0))
constructions = st.builds(Construction, st.lists(layers, min_size=1, max_size=5).map(tuple))


def analytic_totals(c):
    return (sum(l.density * l.specific_heat * l.thickness for l in c.layers),
            sum(l.thickness / l.conductivity for l in c.layers))


class TestTwoNode:
    def test_hand_example(self):
        net = two_node_network(Construction((Layer(0.2, 0.5, 1000.0, 1000.0),)))
        assert net.node_capacitances == (100000.0, 100000.0)
        assert net.conductances == ((0, 1, 2.5),)

    def test_steady_hand_example(self):
        net = two_node_network(Construction((Layer(0.2, 0.5, 1000.0, 1000.0),)))
        assert steady_flux(net, 30.0, 20.0) == pytest.approx(25.0, rel=1e-12)

    def test_massless_is_pure_resistor(self):
        c = Construction((Layer(0.1, 0.04), Layer(0.02, 0.16)))
        net = two_node_network(c)
        assert net.node_capacitances == (0.0, 0.0)
        assert steady_flux(net, 10.0, 0.0) == pytest.approx(10.0 / (0.1 / 0.04 + 0.02 / 0.16), rel=1e-12)


class TestDiscretized:
    def test_three_layers_seven_nodes(self):
        c = Construction((Layer(0.009, 0.14, 530, 900), Layer(0.0615, 0.04, 10, 1400),
                          Layer(0.1, 0.51, 1400, 1000)))
        assert discretized_network(c).n_nodes == 7

    def test_one_layer_three_nodes(self):
        net = discretized_network(Construction((Layer(0.2, 0.5, 1000.0, 1000.0),)))
        assert net.n_nodes == 3
        assert net.node_capacitances == (50000.0, 100000.0, 50000.0)
        assert net.conductances == ((0, 1, 5.0), (1, 2, 5.0))

    def test_interface_nodes_share_neighbouring_layers(self):
        c = Construction((Layer(0.1, 1.0, 1000, 1000), Layer(0.2, 1.0, 500, 1000)))
        caps = discretized_network(c).node_capacitances
        assert caps[2] == pytest.approx(100000 / 4 + 100000 / 4)


@settings(max_examples=100, deadline=None)
@given(constructions)
def test_networks_match_analytic_totals(c):
    cap, res = analytic_totals(c)
    for net in (two_node_network(c), discretized_network(c)):
        assert math.isclose(net.total_capacitance, cap, rel_tol=1e-12, abs_tol=1e-9)
        assert math.isclose(net.terminal_resistance(), res, rel_tol=1e-12)


@settings(max_examples=50, deadline=None)
@given(constructions, st.floats(-30, 50), st.floats(-30, 50))
def test_steady_flux_identical_across_models(c, t_ext, t_int):
    _, res = analytic_totals(c)
    expected = (t_ext - t_int) / res
    fluxes = [steady_flux(n, t_ext, t_int) for n in
              (two_node_network(c), discretized_network(c), fine_grid_network(c, 31))]
    for f in fluxes:
        assert f == pytest.approx(expected, rel=1e-9, abs=1e-9)


class TestSteadyFlux:
    def test_zero_difference(self):
        assert steady_flux(discretized_network(HEAVY), 21.0, 21.0) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        net = RcNetwork((0.0, 0.0, 0.0), ((0, 1, 5.0), (1, 2, 5.0)))  # 0.4 m2K/W in total
        assert steady_flux(net, 30.0, 20.0) == pytest.approx(25.0, rel=1e-12)

    def test_linear_in_temperature_difference(self):
        net = discretized_network(HEAVY)
        assert steady_flux(net, 40.0, 20.0) == pytest.approx(2 * steady_flux(net, 30.0, 20.0), rel=1e-12)

    def test_disconnected(self):
        net = RcNetwork((0.0, 0.0, 0.0, 0.0), ((0, 1, 1.0), (2, 3, 1.0)))
        with pytest.raises(SingularNetwork):
            steady_flux(net, 1.0, 0.0)


class TestFineGridOracle:
    def test_totals_exact(self):
        c = Construction((Layer(0.013, 0.16, 950, 840), Layer(0.07, 0.04, 12, 840)))
        net = fine_grid_network(c, 41)
        cap, res = analytic_totals(c)
        assert net.total_capacitance == pytest.approx(cap, rel=1e-12)
        assert net.terminal_resistance() == pytest.approx(res, rel=1e-12)

    def test_constant_equal_boundaries(self):
        b = lambda t: (18.0, 18.0)
        _, y = fine_grid_oracle(HEAVY, 11, 60.0, b, 6 * 3600)
        assert np.all(np.abs(y - 18.0) < 1e-12)

    def test_step_converges_to_linear_profile(self):
        b = step_boundary((20.0, 20.0), (30.0, 20.0))
        _, y = fine_grid_oracle(HEAVY, 11, 60.0, b, 30 * 86400, h_ext=25.0, h_int=8.0)
        total = 1 / 25.0 + 0.2 / 1.4 + 1 / 8.0
        expected = 20.0 + 10.0 * (1 / 8.0) / total
        assert abs(y[-1] - expected) < 1e-6

    def test_self_convergence(self):
        b = step_boundary((20.0, 20.0), (30.0, 20.0))
        _, coarse = fine_grid_oracle(HEAVY, 11, 60.0, b, 86400)
        _, fine = fine_grid_oracle(HEAVY, 21, 30.0, b, 86400)
        rms = np.sqrt(np.mean((coarse - fine[1::2]) ** 2))
        scale = np.sqrt(np.mean((coarse - 20.0) ** 2))
        assert rms / scale < 0.005

    def test_unstable_step(self):
        with pytest.raises(UnstableStep) as err:
            fine_grid_oracle(HEAVY, 11, 600.0, lambda t: (20.0, 20.0), 3600)
        assert 0 < err.value.dt_max < 600.0
        fine_grid_oracle(HEAVY, 11, err.value.dt_max, lambda t: (20.0, 20.0), 3600)

    def test_needs_eleven_nodes(self):
        with pytest.raises(ValueError):
            fine_grid_oracle(HEAVY, 5, 1.0, lambda t: (20.0, 20.0), 10.0)


class TestWallResponse:
    def test_steady_initial_state_stays_put(self):
        b = lambda t: (0.0, 20.0)
        _, y = wall_response(discretized_network(HEAVY), b, 86400, 3600.0)
        total = 1 / 25.0 + 0.2 / 1.4 + 1 / 8.0
        assert np.allclose(y, 20.0 - 20.0 * (1 / 8.0) / total, atol=1e-9)

    def test_matches_oracle_for_fine_network(self):
        # the implicit solver on the oracle's own grid should approach the explicit result
        b = step_boundary((20.0, 20.0), (30.0, 20.0))
        _, ref = fine_grid_oracle(HEAVY, 21, 30.0, b, 86400)
        _, y = wall_response(fine_grid_network(HEAVY, 21), b, 86400, 30.0)
        assert np.max(np.abs(y - ref)) < 0.01


def test_heavy_wall_model_order_fidelity():
    b = step_boundary((20.0, 20.0), (30.0, 20.0))
    _, ref = fine_grid_oracle(HEAVY, 101, 2.0, b, 48 * 3600)
    ref_hourly = ref[1799::1800]
    errs = {}
    for name, net in (("two_node", two_node_network(HEAVY)), ("discretized", discretized_network(HEAVY))):
        _, y = wall_response(net, b, 48 * 3600, 60.0)
        errs[name] = np.sqrt(np.mean((y[59::60] - ref_hourly) ** 2))
    assert errs["discretized"] < 0.5 * errs["two_node"]
