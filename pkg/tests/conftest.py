import numpy as np
import pytest

from scamdyn import _kernels
from scamdyn.model import NOMINAL_PARAMS


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger JIT compilation once so timed tests measure the algorithms
    y0 = np.array([10.0, 1.0, 0.0, 1.0, 0.0])
    p = NOMINAL_PARAMS.as_array()
    _kernels.nsfd_orbit(y0, p, 0.9, 2, True)
    _kernels.rk4_orbit(y0, p, 0.5, 2)
