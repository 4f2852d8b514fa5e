"""Shared fixtures and cache wiring for the test suite.

Heavy runs (ground states, long dynamics, fine references) are cached on
disk keyed by their full parameter set.  Pointing NLSE_NONLOCAL_CACHE at
the repository cache lets the acceptance tests reuse results across runs
instead of recomputing multi-minute flows every time.
"""

import os
import pathlib

_REPO = pathlib.Path(__file__).resolve().parent.parent
os.environ.setdefault("NLSE_NONLOCAL_CACHE", str(_REPO / ".cache"))
pathlib.Path(os.environ["NLSE_NONLOCAL_CACHE"]).mkdir(parents=True, exist_ok=True)

import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260825)


@pytest.fixture(autouse=True)
def _clear_operator_cache():
    """Keep the in-process operator cache from leaking between tests."""
    yield
    from nlse_nonlocal import solvers

    solvers.clear_operator_cache()
