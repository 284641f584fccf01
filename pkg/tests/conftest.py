import logging
import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import numpy as np
import pytest

from error_models import ErrorConfig
from nr_timing import Numerology


@pytest.fixture(autouse=True)
def _log_to_captured_stderr(capsys):
    # Loggers keep the stream they were created with; point them at this test's stderr.
    for logger in logging.Logger.manager.loggerDict.values():
        if getattr(logger, "_sync_sim_configured", False):
            for handler in logger.handlers:
                if type(handler) is logging.StreamHandler:
                    # setStream would flush the previous test's closed capture buffer
                    handler.stream = sys.stderr
    yield


@pytest.fixture
def num15():
    return Numerology(mu=0)


@pytest.fixture
def num30():
    return Numerology(mu=1)


@pytest.fixture
def zero_errors():
    """Every error source off and a zero path delay: deliveries are exact."""
    return ErrorConfig.zero(true_pd_ns=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
