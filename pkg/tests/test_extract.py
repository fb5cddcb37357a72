"""Circuit-to-coupled-mode extraction and the OFF-state residual."""
from dataclasses import replace

import pytest

from qmemsim.dynamics import TWO_PI
from qmemsim.extract import (
    extract_coupled_mode_params,
    full_accumulation_inductance,
    off_state_residual_coupling,
)
from tests.conftest import ANCHOR, Q_C, TARGETS


class TestExtraction:
    def test_resonant_at_crossing(self, cell_system):
        assert cell_system.omega_a == pytest.approx(cell_system.omega_b, abs=TWO_PI * 1e5)

    def test_coupling_is_a_few_hundred_megahertz(self, cell_system):
        assert TWO_PI * 100e6 <= cell_system.g_on <= TWO_PI * 500e6

    def test_external_rate_matches_coupling_q(self, cell_system):
        q_c_rate = TWO_PI * TARGETS[0] / Q_C
        assert cell_system.kappa_ext == pytest.approx(q_c_rate, rel=0.02)

    def test_internal_rates_positive_for_lossy_cell(self, cell_system):
        assert cell_system.kappa_int_a > 0
        assert cell_system.gamma_b > 0
        assert cell_system.kappa_int_a < 0.1 * cell_system.kappa_ext

    def test_lossless_cell_has_zero_internal_rates(self, cell, crossing):
        system = extract_coupled_mode_params(cell.lossless(), crossing.l_cross, fit=crossing)
        assert system.kappa_int_a == 0.0
        assert system.gamma_b == 0.0

    def test_l_on_outside_sweep_rejected(self, cell, crossing):
        import numpy as np

        with pytest.raises(Exception, match="outside"):
            extract_coupled_mode_params(
                cell, 900e-12, fit=crossing, l_grid=np.linspace(10e-12, 500e-12, 5)
            )


class TestResidualCoupling:
    def test_default_cell_is_finite_and_small(self, cell, cell_system):
        res = off_state_residual_coupling(cell, kappa_a=cell_system.kappa_ext)
        assert not res.below_resolution
        assert 0.0 < res.g_off < 1e-3 * cell_system.g_on
        assert res.kappa_sc_ext > 0.0
        assert res.f_sc == pytest.approx(TARGETS[0], rel=5e-3)

    def test_no_coupling_capacitor_means_no_path(self, cell):
        tiny = replace(cell, c_couple=1e-19)
        res = off_state_residual_coupling(tiny, kappa_a=1e7)
        assert res.g_off == 0.0

    def test_open_junction_decouples(self, cell):
        open_jj = replace(cell, jj=replace(cell.jj, r_off=1e12, c_j=0.0))
        res = off_state_residual_coupling(open_jj, kappa_a=1e7)
        ref = off_state_residual_coupling(cell, kappa_a=1e7)
        assert res.kappa_sc_ext < 1e-6 * ref.kappa_sc_ext

    def test_purcell_inversion_consistency(self, cell):
        res = off_state_residual_coupling(cell, kappa_a=2e7)
        assert 4.0 * res.g_off**2 / res.kappa_a == pytest.approx(res.kappa_sc_ext, rel=1e-9)


def test_full_accumulation_inductance(cell):
    assert full_accumulation_inductance(cell) == pytest.approx(ANCHOR, rel=1e-9)
