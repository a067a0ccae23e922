"""Functions to find user-specific config directories and read settings"""

import functools


def read_config(key=None, default=None):
    """Read variable from kdiv configuration file

    The configuration file is named `config.json` and is stored in the directory
    returned by `kdiv_directory("config")`.

    Parameters
    ----------
    key : {None, str}
        If None (the default), the entire configuration file is returned as a
        dictionary.  Otherwise, this is used as a key for this dictionary.
    default : Any
        An arbitrary object that is returned if the `key` is not found in the
        dictionary.

    Returns
    -------
    config : {dict, Any}
        If `key` is None (the default), the entire configuration dictionary is
        returned.  Otherwise, the value indexed by that key in the configuration
        file is returned.

    """
    import json
    config_path = kdiv_directory("config") / "config.json"
    if config_path.exists():
        with config_path.open("r") as f:
            config = json.load(f)
    else:
        config = {}
    if key is None:
        return config
    else:
        return config.get(key, default)


def write_config(**kwargs):
    """Write variables to kdiv configuration file

    All parameters must be passed as keyword arguments, as in

        write_config(key=value)

    which are then inserted as `key:value` pairs into the config dictionary and
    written into the `config.json` file.

    Useful settings include

      * `write_config(threads=4)`, default cap on worker threads
      * `write_config(restarts=64)`, default number of random seesaw restarts
      * `write_config(progress=True)`, to show progress bars in long scans

    """
    import json
    config_path = kdiv_directory("config") / "config.json"
    if config_path.exists():
        with config_path.open("r") as f:
            config = json.load(f)
    else:
        config = {}
    config.update(**kwargs)
    with config_path.open("w") as c:
        json.dump(config, c, indent=4, separators=(',', ': '))


def default_threads():
    """Thread cap from the environment or configuration

    The `KDIV_THREADS` environment variable takes precedence over the `threads`
    key of the configuration file; the fallback is a single thread.

    """
    import os
    from .errors import ValidationError
    value = os.getenv("KDIV_THREADS")
    if value is None:
        value = read_config("threads", 1)
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"thread cap must be an integer, not {value!r}", field="KDIV_THREADS")
    if threads < 1:
        raise ValidationError(f"thread cap must be at least 1, not {threads}", field="KDIV_THREADS")
    return threads


@functools.lru_cache()
def kdiv_directory(directory_type="config", persistent=True):
    """Return the kdiv config directory, creating it if necessary

    Parameters
    ----------
    directory_type : {"config"}
        The type of user directory to be found.  Only configuration is stored.
    persistent : bool
        If True (the default) try to return a persistent directory; otherwise,
        return a temporary directory that will be deleted when the calling python
        process exits.

    Returns
    -------
    directory : pathlib.Path

    Notes
    -----
    This function's return value is cached after the first call in a given python
    session.  To clear that cache, execute `kdiv_directory.cache_clear()`.

    In order of priority, if `persistent` is True, this function will choose one of

      1) Environment variable 'KDIVCONFIGDIR'
      2) On 'linux' or 'freebsd' platforms, `$XDG_CONFIG_HOME/kdiv`, defaulting to
         '~/.config/kdiv'
      3) The '.kdiv' directory in the user's home directory

    If the chosen directory cannot be created or written, or if `persistent` is
    False, a temporary directory is used instead.

    """
    import warnings
    import sys
    import os
    import atexit
    import shutil
    import tempfile
    from pathlib import Path

    if directory_type != "config":
        raise ValueError(f"Can only find the 'config' directory, not '{directory_type}'")

    if persistent:
        kdiv_dir = os.getenv("KDIVCONFIGDIR", default=False)
        if kdiv_dir:
            kdiv_dir = Path(kdiv_dir).expanduser().resolve()
        elif sys.platform.startswith(("linux", "freebsd")):
            xdg_base = os.environ.get("XDG_CONFIG_HOME")
            if xdg_base is None:
                xdg_base = Path.home() / ".config"
            kdiv_dir = Path(xdg_base).expanduser().resolve() / "kdiv"
        else:
            kdiv_dir = Path.home() / ".kdiv"

        try:
            kdiv_dir.mkdir(parents=True, exist_ok=True)
        except OSError:
            pass
        else:
            if os.access(str(kdiv_dir), os.W_OK) and kdiv_dir.is_dir():
                return kdiv_dir

        unwritable_dir = kdiv_dir

    tmpdir = tempfile.mkdtemp(prefix="kdiv-")
    atexit.register(shutil.rmtree, tmpdir, ignore_errors=True)
    kdiv_dir = Path(tmpdir)
    if persistent:
        # noinspection PyUnboundLocalVariable
        warnings.warn(
            f"\nThe `kdiv` module created a temporary config directory at {kdiv_dir}\n"
            f"because the default path ({unwritable_dir}) is not a writable directory;\n"
            f"set the KDIVCONFIGDIR environment variable to a writable directory to keep settings."
        )
    return kdiv_dir
