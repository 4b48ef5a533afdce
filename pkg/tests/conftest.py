import math

import pytest

from surftrap.config import loads_config
from surftrap.constants import SurfaceMaterial, rb87_default
from surftrap.potentials import EvanescentBeam, MagneticTrap, TrapConfiguration


@pytest.fixture(scope="session")
def fig2():
    return loads_config("", preset="paper-fig2").trap_configuration()


@pytest.fixture(scope="session")
def harmonic_cfg():
    w = 2 * math.pi * 100.0
    return TrapConfiguration(rb87_default(), SurfaceMaterial(c4_override=0.0), EvanescentBeam(),
                             MagneticTrap(w, w, w, z0=300e-6), ew_enabled=False)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
