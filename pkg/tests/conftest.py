import pytest

from gridfair import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jit kernels once so timed tests measure compute, not JIT."""
    _kernels.warmup()
