import numpy as np
import pytest

from qmemsim.array import build_array, _cell_models
from qmemsim.calibrate import CalibrationTargets, calibrate_geometry
from qmemsim.config import example_template
from qmemsim.extract import extract_coupled_mode_params
from qmemsim.modemap import fit_avoided_crossing, mode_map

TARGETS = (6.55e9, 6.65e9, 6.70e9, 6.75e9)
ANCHOR = 220e-12
Q_C = 2000.0


@pytest.fixture(scope="session")
def template():
    return example_template()


@pytest.fixture(scope="session")
def cell(template):
    """The calibrated 6.55 GHz example cell; computed once per session."""
    return calibrate_geometry(
        CalibrationTargets(f_sc=TARGETS[0], l_anchor=ANCHOR, q_c=Q_C), template
    )


@pytest.fixture(scope="session")
def standard_map(cell):
    """61-point mode map over the full 10-500 pH sweep."""
    return mode_map(cell, np.linspace(10e-12, 500e-12, 61))


@pytest.fixture(scope="session")
def crossing(standard_map):
    return fit_avoided_crossing(standard_map)


@pytest.fixture(scope="session")
def cell_system(cell, crossing):
    """Reduced coupled-mode system of the example cell at its crossing."""
    return extract_coupled_mode_params(cell, crossing.l_cross, fit=crossing)


@pytest.fixture(scope="session")
def array(template):
    """Four-cell multiplexed array calibrated to the band plan."""
    return build_array(TARGETS, template, l_anchor=ANCHOR, q_c=Q_C)


@pytest.fixture(scope="session")
def array_models(array):
    return _cell_models(array)
