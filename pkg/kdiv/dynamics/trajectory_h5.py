"""File I/O for HDF5 archives of sampled dynamical maps"""

format_tag = "trajectory.h5"


def save(trajectory, file):
    """Save a `MapTrajectory` or `StochasticTrajectory` as an HDF5 archive

    The file holds a `times` dataset and a `maps` dataset of shape
    `(len(times), D, D)` (superoperators for quantum trajectories, transition
    matrices for classical ones), with the generator's configuration stored as a
    JSON string attribute.

    Parameters
    ----------
    trajectory : kdiv.dynamics.MapTrajectory or kdiv.dynamics.StochasticTrajectory
    file : file-like object, string, or pathlib.Path
        Path to the file on disk or a file-like object to be written by h5py.File.

    See Also
    --------
    kdiv.dynamics.trajectory_h5.load : load the output file format

    """
    import json
    import h5py
    from .classical import StochasticTrajectory

    classical = isinstance(trajectory, StochasticTrajectory)
    data = trajectory.matrices if classical else trajectory.superops
    with h5py.File(file, "w") as f:
        f.attrs["kdiv_format"] = format_tag
        f.attrs["kind"] = "classical" if classical else "quantum"
        f.attrs["dim"] = trajectory.dim
        if trajectory.max_substep is not None:
            f.attrs["max_substep"] = trajectory.max_substep
        if trajectory.source is not None:
            f.attrs["source"] = json.dumps(trajectory.source.to_config(), sort_keys=True)
        f.create_dataset("times", data=trajectory.grid)
        f.create_dataset("maps", data=data, shuffle=True, compression="gzip", chunks=(1,) + data.shape[1:])
        f.create_dataset("drift", data=trajectory.drift)


def load(file):
    """Load an HDF5 trajectory archive

    The generator is rebuilt from the stored configuration when present, so the
    returned object is equivalent to the one that was saved.

    Returns
    -------
    trajectory : kdiv.dynamics.MapTrajectory or kdiv.dynamics.StochasticTrajectory

    """
    import json
    import h5py
    from .trajectory import MapTrajectory
    from .classical import StochasticTrajectory, kolmogorov_from_config
    from .generators import generator_from_config

    with h5py.File(file, "r") as f:
        kdiv_format = f.attrs.get("kdiv_format", format_tag)
        if isinstance(kdiv_format, bytes):
            kdiv_format = kdiv_format.decode("utf-8")
        if kdiv_format != format_tag:
            raise ValueError(
                f"\nAttribute 'kdiv_format' found in '{file}' is '{kdiv_format}'.\n"
                f"This function only accepts '{format_tag}' files.\n"
                f"Use `kdiv.load` to auto-detect the format."
            )
        kind = f.attrs.get("kind", "quantum")
        max_substep = f.attrs.get("max_substep", None)
        source = f.attrs.get("source", None)
        times = f["times"][:]
        data = f["maps"][:]
        drift = f["drift"][:] if "drift" in f else None
    if isinstance(kind, bytes):
        kind = kind.decode("utf-8")
    if source is not None:
        source = json.loads(source)
    max_substep = None if max_substep is None else float(max_substep)
    if kind == "classical":
        source = None if source is None else kolmogorov_from_config(source)
        return StochasticTrajectory(times, data, source=source, max_substep=max_substep, drift=drift)
    source = None if source is None else generator_from_config(source)
    return MapTrajectory(times, data, source=source, max_substep=max_substep, drift=drift)
