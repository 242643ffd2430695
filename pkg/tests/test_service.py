"""HTTP service endpoints exercised in-process."""

import math

import pytest
from fastapi.testclient import TestClient

from autophage.service import create_app

client = TestClient(create_app())

CAUCHY = {"kind": "sym_stable", "alpha": 1.0, "scale": 1.0, "dim": 1}


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_cofactor_endpoint():
    response = client.post("/gaussian/cofactor", json={"P": [[1.0]], "T": [[0.5]]})
    assert response.status_code == 200
    body = response.json()
    assert body["S"][0][0] == pytest.approx(math.sqrt(0.75), abs=1e-14)
    assert body["residual"] <= 1e-10


def test_cofactor_rejects_bad_contraction():
    response = client.post(
        "/gaussian/cofactor",
        json={"P": [[1.0, 0.0], [0.0, 2.0]], "T": [[0.5, 0.3], [0.0, 0.5]]},
    )
    assert response.status_code == 422
    assert "detail" in response.json()


def test_stationary_endpoint():
    r = 2.0**-0.5
    response = client.post(
        "/gaussian/stationary",
        json={"T": [[r, 0.0], [0.0, r]], "S": [[r, 0.0], [0.0, r]]},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["dimension"] == 3
    assert len(body["basis"]) == 3


def test_verify_autophage_endpoint():
    s = math.sqrt(0.75)
    good = client.post(
        "/verify/autophage",
        json={
            "model": {"kind": "gaussian", "form": [[1.0]]},
            "first": [[0.5]],
            "second": [[s]],
        },
    )
    assert good.status_code == 200
    assert good.json()["passed"] is True
    bad = client.post(
        "/verify/autophage",
        json={"model": CAUCHY, "first": [[0.5]], "second": [[0.6]]},
    )
    assert bad.status_code == 200
    assert bad.json()["passed"] is False
    assert bad.json()["residual"] > 1e-10


def test_verify_semistable_endpoint():
    two = client.post(
        "/verify/semistable",
        json={"model": CAUCHY, "contraction": [[0.5]], "n": 2},
    )
    assert two.status_code == 200
    assert two.json()["passed"] is True
    assert two.json()["autophage_with_self"] is True
    three = client.post(
        "/verify/semistable",
        json={"model": CAUCHY, "contraction": [[1.0 / 3.0]], "n": 3},
    )
    assert three.status_code == 200
    assert three.json()["passed"] is True
    assert three.json()["autophage_with_self"] is False


def test_verify_fullness_endpoint():
    singular = client.post(
        "/verify/fullness",
        json={"model": {"kind": "gaussian", "form": [[1.0, 0.0], [0.0, 0.0]]}},
    )
    assert singular.status_code == 200
    assert singular.json()["full"] is False
    assert singular.json()["witness"] is not None
    definite = client.post(
        "/verify/fullness",
        json={"model": {"kind": "gaussian", "form": [[1.0, 0.0], [0.0, 2.0]]}},
    )
    assert definite.status_code == 200
    assert definite.json()["full"] is True
    assert definite.json()["witness"] is None


def test_fullness_accepts_word_product_model():
    nested = {
        "kind": "word_product",
        "base": {"kind": "gaussian", "form": [[1.0, 0.0], [0.0, 2.0]]},
        "words": [[[0.5, 0.0], [0.0, 0.5]]],
    }
    response = client.post("/verify/fullness", json={"model": nested})
    assert response.status_code == 200
    assert response.json()["full"] is True


def test_decay_exponent_endpoint():
    response = client.post("/decay/exponent", json={"norms": [0.5, 0.5]})
    assert response.status_code == 200
    assert response.json()["r"] == pytest.approx(1.0, abs=1e-12)
    short = client.post("/decay/exponent", json={"norms": [0.5]})
    assert short.status_code == 422


def test_decay_profile_endpoint():
    response = client.post(
        "/decay/profile",
        json={"model": CAUCHY, "first": [[0.5]], "second": [[0.5]]},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["t"] == pytest.approx(0.5)
    assert body["s"] == pytest.approx(0.5)
    assert body["r"] == pytest.approx(1.0, abs=1e-12)
    assert body["c"] == pytest.approx(1.0, abs=1e-9)
    assert body["sampled"] is True


def test_decay_bound_endpoint():
    ok = client.post(
        "/decay/bound",
        json={"model": CAUCHY, "r": 1.0, "c": 1.0, "rays": 8, "radii": 16},
    )
    assert ok.status_code == 200
    assert ok.json()["ok"] is True
    assert ok.json()["violations"] == 0
    assert ok.json()["integrability_bound"] == pytest.approx(2.0 + 2.0 / math.e, rel=1e-9)
    bad = client.post(
        "/decay/bound",
        json={"model": CAUCHY, "r": 1.0, "c": 1.05, "rays": 8, "radii": 16},
    )
    assert bad.status_code == 200
    assert bad.json()["ok"] is False
    assert bad.json()["violations"] > 0


def test_density_endpoint():
    response = client.post("/density/invert", json={"model": CAUCHY})
    assert response.status_code == 200
    body = response.json()
    assert body["origin_density"] == pytest.approx(1.0 / math.pi, abs=1e-4)
    assert body["x_spacing"] == pytest.approx(math.pi / 40.0)
    aliased = client.post(
        "/density/invert", json={"model": CAUCHY, "half_width": 5.0, "per_axis": 512}
    )
    assert aliased.status_code == 422


def test_sample_endpoint_deterministic():
    request = {
        "first": [[0.5]],
        "second": [[0.5]],
        "seed": {"kind": "gaussian", "covariance": [[1.0]]},
        "depth": 5,
        "count": 64,
        "rng_seed": 3,
    }
    a = client.post("/sample/tree", json=request)
    b = client.post("/sample/tree", json=request)
    assert a.status_code == 200
    assert a.json()["points"] == b.json()["points"]
    assert a.json()["count"] == 64
    point_seed = client.post(
        "/sample/tree",
        json={
            "first": [[0.5]],
            "second": [[0.5]],
            "seed": {"kind": "point", "location": [1.0]},
            "depth": 0,
            "count": 3,
        },
    )
    assert point_seed.json()["points"] == [[1.0], [1.0], [1.0]]


def test_sample_endpoint_maps_library_errors():
    response = client.post(
        "/sample/tree",
        json={
            "first": [[0.5]],
            "second": [[0.5]],
            "seed": {"kind": "gaussian"},
            "depth": 2,
            "count": 4,
        },
    )
    assert response.status_code == 422


def test_infinitesimal_endpoint():
    response = client.post(
        "/sample/infinitesimal",
        json={
            "first": [[0.5]],
            "second": [[0.5]],
            "seed": {"kind": "gaussian", "covariance": [[1.0]]},
            "count": 2000,
        },
    )
    assert response.status_code == 200
    p = response.json()["p"]
    assert len(p) == 21
    assert p[0] == pytest.approx(0.92, abs=0.03)
    assert p[-1] <= 0.01


def test_padic_endpoint():
    stable = client.post("/padic/verify", json={})
    assert stable.status_code == 200
    assert stable.json()["passed"] is True
    assert stable.json()["unit_modulus"]["full"] is True
    haar = client.post("/padic/verify", json={"measure": "haar", "p": 5})
    assert haar.status_code == 200
    body = haar.json()
    assert body["passed"] is False
    assert body["residual"] == pytest.approx(0.8, abs=1e-12)
    assert body["unit_modulus"]["subgroup_order"] == 5**4


def test_model_payload_validation():
    response = client.post(
        "/verify/fullness",
        json={"model": {"kind": "sym_stable", "alpha": 2.5}},
    )
    assert response.status_code == 422
