import pytest

from mubsearch import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay the one-time JIT cost up front so per-test timings stay honest
    _kernels.warm_up(2, 2)
