"""
Test configuration and fixtures for the test suite.
"""
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.models.tensor import ConvShape, InputBatch, KernelBank


@pytest.fixture(scope="session")
def test_client():
    """Create a test client for the FastAPI application."""
    from app.main import app
    return TestClient(app)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def small_shape():
    """3×3 single-channel image, one 2×2 filter, stride 1, no padding."""
    return ConvShape(N=1, H=3, W=3, C=1, R=2, S=2, M=1)


@pytest.fixture
def grid_input():
    """1×3×3×1 image holding 1..9 row-major."""
    return InputBatch(np.arange(1, 10, dtype=float).reshape(1, 3, 3, 1))


@pytest.fixture
def ones_kernel():
    return KernelBank(np.ones((2, 2, 1, 1)))


@pytest.fixture
def write_tensor(tmp_path):
    """Write an array as a tensor JSON file and return its path."""
    def _write(name, arr):
        arr = np.asarray(arr, dtype=float)
        path = tmp_path / name
        path.write_text(json.dumps({"shape": list(arr.shape), "data": arr.ravel().tolist()}))
        return str(path)
    return _write
