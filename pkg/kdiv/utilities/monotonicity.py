"""Functions to locate increases in sampled values along a time grid"""

import numpy as np
from . import jit


@jit
def index_of_increases(y, threshold):
    """Flag every step at which `y` grows by more than `threshold`

    The flag at index `i` refers to the step from `y[i]` to `y[i+1]`; the last
    entry is always False because there is no following step.

    """
    length = y.size
    increases = np.zeros(length, dtype=np.bool_)
    for i in range(length - 1):
        if y[i + 1] - y[i] > threshold:
            increases[i] = True
    return increases


@jit
def largest_increase(y):
    """Largest single-step increase of `y` (zero if `y` never grows)"""
    largest = 0.0
    for i in range(y.size - 1):
        step = y[i + 1] - y[i]
        if step > largest:
            largest = step
    return largest


def forward_differences(y, t):
    """Finite-difference derivative of `y` with respect to `t`

    Forward differences are used at every point but the last, which reuses the
    final backward difference.  A single sample has derivative zero.

    """
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    if y.size < 2:
        return np.zeros_like(y)
    dydt = np.empty_like(y)
    dydt[:-1] = np.diff(y) / np.diff(t)
    dydt[-1] = dydt[-2]
    return dydt
