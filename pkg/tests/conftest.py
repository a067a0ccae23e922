import json
import functools
import pytest
import numpy as np
import kdiv


def pytest_addoption(parser):
    parser.addoption("--run_slow_tests", action="store_true", default=False,
                     help="Run all tests, including slow ones")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: marks tests as slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run_slow_tests"):
        return
    skip_slow = pytest.mark.skip(reason="need --run_slow_tests option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_runtest_setup(item):
    if 'slow' in item.keywords and not item.config.getoption("--run_slow_tests"):
        pytest.skip("Need `--run_slow_tests` command-line argument to run")


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep every test away from the user's kdiv configuration"""
    monkeypatch.setenv("KDIVCONFIGDIR", str(tmp_path / "kdiv-config"))
    monkeypatch.delenv("KDIV_THREADS", raising=False)
    kdiv.utilities.kdiv_directory.cache_clear()
    yield
    kdiv.utilities.kdiv_directory.cache_clear()


@pytest.fixture
def eps():
    return np.finfo(float).eps


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def uniform_grid(t_max, step):
    return step * np.arange(int(round(t_max / step)) + 1)


@functools.lru_cache()
def get_eternal_trajectory(t_max=2.0, step=0.01):
    return kdiv.dynamics.integrate(kdiv.dynamics.eternal(), uniform_grid(t_max, step))


@functools.lru_cache()
def get_semigroup_trajectory(t_max=1.0, step=0.05):
    return kdiv.dynamics.integrate(kdiv.dynamics.semigroup(), uniform_grid(t_max, step))


@pytest.fixture
def eternal_trajectory():
    return get_eternal_trajectory()


@pytest.fixture
def short_eternal_trajectory():
    return get_eternal_trajectory(0.6, 0.05)


@pytest.fixture
def semigroup_trajectory():
    return get_semigroup_trajectory()


def pauli_diamond_value(probabilities1, probabilities2, p=0.5):
    """Distinguishability of two Pauli channels with a maximally entangled probe"""
    return float(np.sum(np.abs((1 - p) * np.asarray(probabilities1) - p * np.asarray(probabilities2))))


def write_scenario(path, document):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=4)
    return path


def semigroup_scenario(task="monotonicity", **params):
    return {
        "kdiv_format": "scenario",
        "_comment": "constant Pauli rates",
        "task": task,
        "generator": {"preset": "semigroup"},
        "grid": {"t_max": 0.5, "step": 0.05},
        "channels": {
            "phi1": {"kind": "preset", "name": "identity", "params": {"dim": 2}},
            "phi2": {"kind": "preset", "name": "completely_depolarizing"},
        },
        "params": dict({"k": 2, "restarts": 4}, **params),
        "seed": 7,
    }
