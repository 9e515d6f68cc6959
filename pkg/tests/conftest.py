import warnings

import pytest

from fraclap.domain import Domain


@pytest.fixture(scope="session")
def unit():
    return Domain.interval(0.0, 1.0)


@pytest.fixture(autouse=True)
def _quiet_truncation():
    from fraclap.extension import TruncationWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield
