import sys
import json
import time
import pathlib
import pytest
import numpy as np
import kdiv
from kdiv.utilities.errors import ValidationError, SingularMapError, IntegrationDriftError


@pytest.mark.parametrize("persistent", (True, False))
def test_kdiv_directory_bad_directory_name(persistent):
    with pytest.raises(ValueError):
        kdiv.utilities.kdiv_directory("cache", persistent=persistent)


@pytest.mark.parametrize("persistent", (True, False), ids=("persistent", "temporary"))
def test_kdiv_directory_env(persistent, tmp_path, monkeypatch):
    kdiv.utilities.kdiv_directory.cache_clear()
    with monkeypatch.context() as mp:
        mp.setattr(pathlib.Path, "home", lambda: tmp_path)
        mp.setenv("KDIVCONFIGDIR", str(tmp_path))
        kdiv_dir = kdiv.utilities.kdiv_directory("config", persistent=persistent)
    assert isinstance(kdiv_dir, pathlib.Path)
    if persistent:
        assert str(tmp_path) == str(kdiv_dir)
    else:
        assert str(tmp_path) != str(kdiv_dir)
    assert kdiv_dir.exists()
    p = kdiv_dir / "hello.txt"
    p.write_text("hi there")
    assert p.read_text() == "hi there"


@pytest.mark.parametrize("platform", ("linux", "freebsd"))
def test_kdiv_directory_linux(platform, tmp_path, monkeypatch):
    d1 = tmp_path / "sub1"
    d1.mkdir()
    d2 = tmp_path / "sub2"
    d2.mkdir()

    with monkeypatch.context() as mp:
        mp.setattr(sys, "platform", platform)
        mp.setattr(pathlib.Path, "home", lambda: d1)
        mp.delenv("KDIVCONFIGDIR", raising=False)
        mp.setenv("XDG_CONFIG_HOME", str(d2))
        kdiv.utilities.kdiv_directory.cache_clear()
        assert str(kdiv.utilities.kdiv_directory("config")) == str(d2 / "kdiv")

        mp.delenv("XDG_CONFIG_HOME")
        kdiv.utilities.kdiv_directory.cache_clear()
        assert str(kdiv.utilities.kdiv_directory("config")) == str(d1 / ".config" / "kdiv")


@pytest.mark.skipif(sys.platform.startswith("win") or not hasattr(sys, "getuid") or sys.getuid() == 0,
                    reason="permissions are not enforced")
def test_kdiv_directory_unwritable(tmp_path, monkeypatch):
    import stat

    d = tmp_path / "unwritable"
    d.mkdir(mode=0o000)
    assert stat.filemode(d.stat().st_mode) == "d---------"

    with monkeypatch.context() as mp:
        mp.setattr(pathlib.Path, "home", lambda: d)
        mp.setenv("KDIVCONFIGDIR", str(d / "kdiv"))
        kdiv.utilities.kdiv_directory.cache_clear()
        with pytest.warns(UserWarning):
            kdiv_dir = kdiv.utilities.kdiv_directory("config", persistent=True)
        assert str(d) not in str(kdiv_dir)
        assert kdiv_dir.is_dir()

    d.chmod(0o777)
    time.sleep(0.1)


def test_read_write_config():
    assert not kdiv.utilities.read_config()
    kdiv.utilities.write_config(NONSENSEGARBAGE=123)
    read = kdiv.utilities.read_config()
    assert len(read) == 1
    assert read["NONSENSEGARBAGE"] == 123
    assert kdiv.utilities.read_config("NONSENSEGARBAGE", 345) == 123
    assert kdiv.utilities.read_config("NONSENSEGARBAGEJUNK", 345) == 345
    kdiv.utilities.write_config(NONSENSEGARBAGEJUNK=345)
    assert kdiv.utilities.read_config("NONSENSEGARBAGE", 345) == 123
    assert kdiv.utilities.read_config("NONSENSEGARBAGEJUNK", 567) == 345


def test_default_threads_precedence(monkeypatch):
    assert kdiv.utilities.default_threads() == 1
    kdiv.utilities.write_config(threads=3)
    assert kdiv.utilities.default_threads() == 3
    monkeypatch.setenv("KDIV_THREADS", "5")
    assert kdiv.utilities.default_threads() == 5


@pytest.mark.parametrize("value", ("0", "-2", "many"))
def test_default_threads_rejects(value, monkeypatch):
    monkeypatch.setenv("KDIV_THREADS", value)
    with pytest.raises(ValidationError) as excinfo:
        kdiv.utilities.default_threads()
    assert str(excinfo.value).startswith("KDIV_THREADS")


@pytest.mark.parametrize("threads", (1, 2, 7))
def test_map_ordered_keeps_order(threads):
    def slow_square(x):
        time.sleep(0.002 * ((7 - x) % 3))
        return x * x
    assert kdiv.utilities.map_ordered(slow_square, range(12), threads=threads) == [x * x for x in range(12)]
    assert kdiv.utilities.map_ordered(slow_square, [], threads=threads) == []


def test_map_ordered_with_progress():
    assert kdiv.utilities.map_ordered(str, range(3), threads=2, progress=True, desc="test") == ["0", "1", "2"]


def test_index_of_increases():
    y = np.array([1.0, 0.9, 0.9 + 2e-7, 0.9 + 2.5e-7, 0.5, 0.6])
    flags = kdiv.utilities.index_of_increases(y, 1e-7)
    assert flags.tolist() == [False, True, False, False, True, False]
    assert kdiv.utilities.index_of_increases(np.array([1.0]), 1e-7).tolist() == [False]


def test_largest_increase():
    assert kdiv.utilities.largest_increase(np.array([3.0, 2.0, 1.0])) == 0.0
    assert np.isclose(kdiv.utilities.largest_increase(np.array([1.0, 1.5, 1.2, 2.0])), 0.8)
    assert kdiv.utilities.largest_increase(np.array([])) == 0.0


def test_forward_differences():
    t = np.linspace(0, 1, 11)
    dydt = kdiv.utilities.forward_differences(3 * t + 1, t)
    assert np.allclose(dydt, 3.0)
    assert kdiv.utilities.forward_differences([2.0], [0.0]).tolist() == [0.0]


def test_file_format(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"kdiv_format": "scenario"}))
    assert kdiv.utilities.file_format(path) == "scenario"
    path.write_text(json.dumps([1, 2]))
    assert kdiv.utilities.file_format(path) is None
    path.write_text("not json {")
    with pytest.raises(ValueError):
        kdiv.utilities.file_format(path)
    with pytest.raises(FileNotFoundError):
        kdiv.utilities.file_format(tmp_path / "missing.json")


def test_file_format_hdf5(tmp_path):
    import h5py
    path = tmp_path / "archive.h5"
    with h5py.File(path, "w") as f:
        f.attrs["kdiv_format"] = "trajectory_h5"
    assert kdiv.utilities.file_format(path) == "trajectory_h5"


def test_fit_to_console():
    text = kdiv.utilities.fit_to_console({"b": list(range(30)), "a": 1}, subsequent_indent="  ", width=40)
    lines = text.splitlines()
    assert lines[0].startswith("{'a': 1")
    assert all(len(line) <= 40 for line in lines)
    assert all(line.startswith("  ") for line in lines[1:])


def test_error_messages():
    e = ValidationError("must lie in [0, 1]", field="params.p")
    assert str(e) == "params.p: must lie in [0, 1]"
    assert isinstance(e, ValueError)
    assert str(ValidationError("plain")) == "plain"
    singular = SingularMapError("singular", cond=1e14, time=0.5)
    assert isinstance(singular, ArithmeticError)
    assert (singular.cond, singular.time) == (1e14, 0.5)
    drift = IntegrationDriftError("drift", time=1.0, drift=1e-6, substep=1e-3)
    assert isinstance(drift, kdiv.utilities.NumericalError)
    assert (drift.time, drift.drift, drift.substep) == (1.0, 1e-6, 1e-3)


def test_version_info():
    info = kdiv.utilities.version_info()
    assert "python" in info
    assert info["numpy"] == np.__version__
