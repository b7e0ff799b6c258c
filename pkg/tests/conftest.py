import json

import pytest

from core.config import get_settings
from app.potentials import Potential, WellData, quadratic_from_well, separable_example


@pytest.fixture(autouse=True)
def _quiet(monkeypatch):
    monkeypatch.setenv("ISOFLOW_VERBOSE", "0")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def radial_well() -> WellData:
    return WellData.diagonal(1.0, 1.0)


@pytest.fixture
def radial_pot(radial_well) -> Potential:
    """W = |p|^2."""
    return quadratic_from_well(radial_well)


@pytest.fixture
def aniso_well() -> WellData:
    return WellData.diagonal(1.0, 2.0)


@pytest.fixture
def aniso_pot(aniso_well) -> Potential:
    return quadratic_from_well(aniso_well)


@pytest.fixture
def separable_pot() -> Potential:
    return separable_example()


@pytest.fixture
def quartic_radial_pot() -> Potential:
    """W = r^2 + r^4 / 2 inside the unit disc."""
    return Potential(kind="radial-analytic-one-well", wells=[(0.0, 0.0)],
                     params={"coeffs": [0.0, 0.5], "lam": 1.0, "radius": 1.0})


@pytest.fixture
def separable_json(tmp_path):
    path = tmp_path / "separable.json"
    path.write_text(json.dumps({"kind": "separable-double-well", "wells": [[-1, 0], [1, 0]],
                                "params": {"profile": "piecewise"}}))
    return path
