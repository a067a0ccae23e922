"""Function to inspect file formats"""


def file_format(file):
    """Return format stored in file

    Scenario and report files are JSON documents with a top-level member named
    "kdiv_format"; trajectory archives are HDF5 files with an attribute of the
    same name.  If neither exists, return None; the calling function should check
    for this possibility.

    Parameters
    ----------
    file : string or pathlib.Path

    Returns
    -------
    format : {None, str}

    """
    from pathlib import Path
    import json
    import h5py
    path = Path(file).expanduser().resolve()
    if not path.exists():
        raise FileNotFoundError(f"Could not find {path}")
    if h5py.is_hdf5(str(path)):
        with h5py.File(str(path), "r") as f:
            value = f.attrs.get("kdiv_format", None)
            if isinstance(value, bytes):
                value = value.decode("utf-8")
            return value
    try:
        with path.open("r", encoding="utf-8") as f:
            document = json.load(f)
    except Exception as e:
        raise ValueError(f"Failed to interpret '{path}' as HDF5 or JSON file") from e
    if not isinstance(document, dict):
        return None
    return document.get("kdiv_format", None)
