"""Deterministic fan-out of independent evaluations over worker threads"""


def map_ordered(function, items, threads=1, progress=False, desc=None):
    """Apply `function` to each of `items`, returning results in input order

    With `threads <= 1` this is a plain loop.  Otherwise the items are spread
    over a thread pool; numpy and scipy release the GIL inside LAPACK calls,
    which is where the time goes for these small dense problems.  Results are
    always collected in the order of `items`, so reductions over them are
    reproducible regardless of the number of threads.

    Parameters
    ----------
    function : callable
    items : iterable
    threads : int, optional
        Largest number of worker threads.  Defaults to 1.
    progress : bool, optional
        Show a `tqdm` progress bar.  Defaults to False.
    desc : str, optional
        Label for the progress bar.

    """
    items = list(items)
    if progress:
        from tqdm.auto import tqdm
        bar = tqdm(total=len(items), desc=desc, dynamic_ncols=True)
        inner = function

        def function(item):
            result = inner(item)
            bar.update(1)
            return result
    try:
        if threads is None or threads <= 1 or len(items) <= 1:
            return [function(item) for item in items]
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=min(threads, len(items))) as executor:
            return list(executor.map(function, items))
    finally:
        if progress:
            bar.close()
