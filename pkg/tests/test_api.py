"""
Tests for the HTTP API endpoints.
"""
import numpy as np
import pytest


def _tensor(arr):
    arr = np.asarray(arr, dtype=float)
    return {"shape": list(arr.shape), "data": arr.ravel().tolist()}


@pytest.fixture
def ones_body():
    return {"input": _tensor(np.ones((1, 3, 3, 1))), "kernel": _tensor(np.ones((2, 2, 1, 1)))}


@pytest.mark.api
class TestHealth:
    def test_healthz(self, test_client):
        response = test_client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"ok": True}


@pytest.mark.api
class TestConvolutionAPI:
    """The convolution endpoints."""

    def test_convolve(self, test_client, ones_body):
        response = test_client.post("/convolution/convolve", json=ones_body)
        assert response.status_code == 200
        assert response.json() == {"shape": [1, 2, 2, 1], "data": [4.0, 4.0, 4.0, 4.0]}

    def test_convolve_shape_error(self, test_client, ones_body):
        ones_body["kernel"] = _tensor(np.ones((2, 2, 2, 1)))
        response = test_client.post("/convolution/convolve", json=ones_body)
        assert response.status_code == 422
        assert "channels" in response.json()["detail"]

    def test_payload_length_checked(self, test_client, ones_body):
        ones_body["input"]["data"] = [1.0]
        response = test_client.post("/convolution/convolve", json=ones_body)
        assert response.status_code == 422

    def test_qconvolve_exact(self, test_client, ones_body):
        response = test_client.post("/convolution/qconvolve", json=ones_body)
        assert response.status_code == 200
        body = response.json()
        assert body["max_abs_error"] <= 1e-10
        assert body["estimated"]["shape"] == [1, 2, 2, 1]

    def test_qconvolve_sampled(self, test_client, ones_body):
        ones_body.update(mode="sampled", shots=100, seed=8)
        first = test_client.post("/convolution/qconvolve", json=ones_body).json()
        second = test_client.post("/convolution/qconvolve", json=ones_body).json()
        assert first["estimated"] == second["estimated"]
        assert first["shots_used"] == 400

    def test_qconvolve_missing_seed(self, test_client, ones_body):
        ones_body["mode"] = "sampled"
        response = test_client.post("/convolution/qconvolve", json=ones_body)
        assert response.status_code == 422

    def test_batched_swap_rejected(self, test_client, ones_body):
        ones_body.update(batched=True, circuit="swap")
        response = test_client.post("/convolution/qconvolve", json=ones_body)
        assert response.status_code == 422


@pytest.mark.api
class TestReshapeAPI:
    def test_dbt(self, test_client, ones_body):
        response = test_client.post("/reshape", json={"kernel": ones_body["kernel"], "height": 3, "width": 3})
        assert response.status_code == 200
        body = response.json()
        assert body["stats"] == {"nnz": 16, "row_nnz_max": 4, "density": pytest.approx(16 / 36)}
        assert body["reshape_cost"] == 4

    def test_toeplitz_needs_input(self, test_client, ones_body):
        response = test_client.post("/reshape", json={"kernel": ones_body["kernel"], "height": 3,
                                                      "width": 3, "baseline": "toeplitz"})
        assert response.status_code == 422


@pytest.mark.api
class TestResourcesAPI:
    def test_small(self, test_client):
        response = test_client.post("/resources", json={"H": 3, "W": 3, "R": 2, "S": 2, "copies": 16})
        assert response.status_code == 200
        body = response.json()
        assert body["qubits"]["total"] == 7
        aqram = next(s for s in body["strategies"] if s["strategy"] == "aqram")
        assert aqram["formula_cost"] == 32

    def test_kernel_too_large(self, test_client):
        response = test_client.post("/resources", json={"H": 2, "W": 2, "R": 3, "S": 3})
        assert response.status_code == 422
