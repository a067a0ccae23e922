"""Functions to facilitate generic handling of kdiv-format data files"""

import contextlib


def kdiv_handler(format_string):
    """Find an object to load from or save to files in the given format

    Parameters
    ----------
    format_string : str
        One of "scenario", "report", or "trajectory.h5" (also accepted with
        an underscore, or as plain "trajectory").

    Returns
    -------
    handler : object
        This object will have (at least) two attributes: `load` and `save`, which
        can be called as `handler.load(file, **kwargs)` and `handler.save(obj,
        file, **kwargs)`.

    See Also
    --------
    kdiv_loader : Returns the function that will load a given file
    kdiv.utilities.file_format : Returns just the string found in the file

    """
    from . import dynamics
    from .cli import scenario, report

    if not format_string:
        raise ValueError("Empty string cannot be associated with a handler")
    elif format_string.lower() == "scenario":
        return scenario
    elif format_string.lower() == "report":
        return report
    elif format_string.lower().startswith("trajectory"):
        return dynamics.formats.get(format_string.lower(), dynamics.formats[None])
    raise ValueError(f"Format '{format_string}' is unknown to the `kdiv` package; maybe you need to update `kdiv`")


def kdiv_loader(file):
    """Find the function that will load the given file

    The format is read from the top-level member (JSON) or attribute (HDF5)
    named "kdiv_format".  Untagged files are recognized by suffix: `.h5` is a
    trajectory archive and `.json` a scenario.

    Returns
    -------
    load : callable
        This function can be called as `load(file, **kwargs)`.

    """
    import pathlib
    from .utilities import file_format
    format_string = file_format(file)
    if format_string is None:
        suffix = pathlib.Path(file).suffix.lower()
        if suffix in (".h5", ".hdf5"):
            format_string = "trajectory.h5"
        elif suffix == ".json":
            format_string = "scenario"
        else:
            raise ValueError(f"File '{file}' contains no recognized format information")
    handler = kdiv_handler(format_string)
    return handler.load


def load(location, **kwargs):
    """Load a scenario, report, or trajectory archive

    Parameters
    ----------
    location : {str, pathlib.Path}
        Path to a local file.  A missing suffix is filled in with `.json` or
        `.h5` when such a file exists.

    Keyword Parameters
    ------------------
    All remaining parameters are passed to the `load` function responsible for the
    requested data.

    """
    import pathlib
    path = pathlib.Path(location).expanduser()
    if not path.exists():
        for suffix in (".json", ".h5"):
            if path.with_suffix(suffix).exists():
                path = path.with_suffix(suffix)
                break
        else:
            raise FileNotFoundError(f"Could not find '{location}'")
    loader = kdiv_loader(path)
    return loader(path, **kwargs)


@contextlib.contextmanager
def loadcontext(*args, **kwargs):
    """Context manager yielding `load(*args, **kwargs)`"""
    yield load(*args, **kwargs)
