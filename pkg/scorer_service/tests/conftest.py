from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from scorer_service import ServiceConfig, build_fixture_model, create_app


@pytest.fixture(scope="session")
def fixture_model_dir(tmp_path_factory) -> Path:
    return build_fixture_model(tmp_path_factory.mktemp("model") / "fixture", seed=0)


@pytest.fixture(scope="session")
def service_config(fixture_model_dir) -> ServiceConfig:
    return ServiceConfig(model_path=fixture_model_dir)


@pytest.fixture(scope="session")
def client(service_config) -> TestClient:
    app = create_app(service_config)
    with TestClient(app) as test_client:
        yield test_client
