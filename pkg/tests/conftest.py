import numpy as np
import pytest

from s3decomp import kernels
from s3decomp.orientations import count_orientations_bruteforce_batch
from s3decomp.pairing import all_partners_array


@pytest.fixture(scope="session")
def n3_partners():
    return all_partners_array(3, 4)


@pytest.fixture(scope="session")
def n3_y(n3_partners):
    return count_orientations_bruteforce_batch(n3_partners, 3, 4).astype(np.int64)


@pytest.fixture(scope="session")
def n3_cycles(n3_partners):
    return np.array([kernels.cycle_census((row // 4).reshape(3, 4), 3)[1:] for row in n3_partners])


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
