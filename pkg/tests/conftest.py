import pytest

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None


@pytest.fixture(scope="session", autouse=True)
def single_threaded_blas():
    # BLAS pools oversubscribe badly on the small matrices used here; one
    # thread is both faster and keeps wall-clock measurements comparable.
    if threadpool_limits is None:
        yield
    else:
        with threadpool_limits(limits=1):
            yield
