"""Scalar functions of time used as Hamiltonian coefficients and relaxation rates

Each function is a small immutable object that evaluates on floats or arrays
and serializes to a `{"kind": ..., "params": {...}}` block.  Functions can be
added together and scaled by constants.

"""

import numpy as np

from ..utilities import jit
from ..utilities.errors import ValidationError


class RateFunction(object):
    kind = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        values = self._evaluate(np.atleast_1d(t).ravel()).reshape(t.shape)
        return float(values) if values.ndim == 0 else values

    def _evaluate(self, t):  # pragma: no cover
        raise NotImplementedError()

    @property
    def params(self):  # pragma: no cover
        raise NotImplementedError()

    def to_config(self):
        return {"kind": self.kind, "params": self.params}

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(other)
        if not isinstance(other, RateFunction):
            return NotImplemented
        return Sum([self, other])

    __radd__ = __add__

    def __neg__(self):
        return Scaled(self, -1.0)

    def __mul__(self, factor):
        if not isinstance(factor, (int, float)):
            return NotImplemented
        return Scaled(self, factor)

    __rmul__ = __mul__

    def __repr__(self):
        arguments = ", ".join(f"{key}={value!r}" for key, value in self.params.items())
        return f"{type(self).__name__}({arguments})"


class Constant(RateFunction):
    kind = "constant"

    def __init__(self, value):
        self.value = float(value)

    def _evaluate(self, t):
        return np.full(t.shape, self.value)

    @property
    def params(self):
        return {"value": self.value}


class Polynomial(RateFunction):
    """`Σ cᵢ tⁱ` with coefficients in ascending order of power"""
    kind = "polynomial"

    def __init__(self, coefficients):
        self.coefficients = tuple(float(c) for c in coefficients)
        if not self.coefficients:
            raise ValidationError("needs at least one coefficient", field="coefficients")

    def _evaluate(self, t):
        return np.polynomial.polynomial.polyval(t, self.coefficients)

    @property
    def params(self):
        return {"coefficients": list(self.coefficients)}


class Tanh(RateFunction):
    """`amplitude · tanh(scale · t + shift) + offset`"""
    kind = "tanh"

    def __init__(self, amplitude=1.0, scale=1.0, shift=0.0, offset=0.0):
        self.amplitude, self.scale, self.shift, self.offset = map(float, (amplitude, scale, shift, offset))

    def _evaluate(self, t):
        return self.amplitude * np.tanh(self.scale * t + self.shift) + self.offset

    @property
    def params(self):
        return {"amplitude": self.amplitude, "scale": self.scale, "shift": self.shift, "offset": self.offset}


class Sin(RateFunction):
    """`amplitude · sin(frequency · t + phase) + offset`"""
    kind = "sin"
    _function = staticmethod(np.sin)

    def __init__(self, amplitude=1.0, frequency=1.0, phase=0.0, offset=0.0):
        self.amplitude, self.frequency, self.phase, self.offset = map(float, (amplitude, frequency, phase, offset))

    def _evaluate(self, t):
        return self.amplitude * self._function(self.frequency * t + self.phase) + self.offset

    @property
    def params(self):
        return {"amplitude": self.amplitude, "frequency": self.frequency, "phase": self.phase, "offset": self.offset}


class Cos(Sin):
    """`amplitude · cos(frequency · t + phase) + offset`"""
    kind = "cos"
    _function = staticmethod(np.cos)


class Piecewise(RateFunction):
    """Right-continuous step function

    Takes `values[0]` for `t < breakpoints[0]`, `values[j]` on
    `[breakpoints[j-1], breakpoints[j])`, and `values[-1]` from the last
    breakpoint on.

    """
    kind = "piecewise"

    def __init__(self, breakpoints, values):
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.values = tuple(float(v) for v in values)
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValidationError(
                f"needs one more value than breakpoints, got {len(self.values)} and {len(self.breakpoints)}",
                field="values",
            )
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValidationError("breakpoints must be strictly increasing", field="breakpoints")

    def _evaluate(self, t):
        return np.asarray(self.values)[np.searchsorted(self.breakpoints, t, side="right")]

    @property
    def params(self):
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}


@jit
def _transition_inplace(y, x, x0, x1, y0, y1, msquared):
    m = np.sqrt(msquared)
    Δy = (y1 - y0) / 2
    Δx = (x1 - x0) / 2
    ȳ = (y0 + y1) / 2
    x̄ = (x0 + x1) / 2
    for i in range(x.size):
        x̂ = (x[i] - x̄) / Δx
        # The second conditions guard against roundoff in `x̂`
        if x̂ <= -1 or x[i] <= x0:
            y[i] = y0
        elif x̂ >= 1 or x[i] >= x1:
            y[i] = y1
        else:
            y[i] = ȳ + Δy * np.tanh(m * x̂ / (1 - x̂**2))
    return y


class Transition(RateFunction):
    """Smooth switch from `y0` (for `t ≤ t0`) to `y1` (for `t ≥ t1`)

    The switch is a compactified tanh: constant outside `(t0, t1)`, monotonic,
    and infinitely differentiable everywhere.  `msquared` sets the slope at the
    midpoint to `√msquared · (y1 - y0) / (t1 - t0)`.

    """
    kind = "transition"

    def __init__(self, t0, t1, y0=0.0, y1=1.0, msquared=3.0):
        self.t0, self.t1, self.y0, self.y1, self.msquared = map(float, (t0, t1, y0, y1, msquared))
        if not self.t0 < self.t1:
            raise ValidationError(f"needs t0 < t1, got ({self.t0}, {self.t1})", field="t1")

    def _evaluate(self, t):
        return _transition_inplace(np.empty_like(t), t, self.t0, self.t1, self.y0, self.y1, self.msquared)

    @property
    def params(self):
        return {"t0": self.t0, "t1": self.t1, "y0": self.y0, "y1": self.y1, "msquared": self.msquared}


class Scaled(RateFunction):
    kind = "scaled"

    def __init__(self, term, factor):
        self.term = term if isinstance(term, RateFunction) else rate_from_config(term)
        self.factor = float(factor)

    def _evaluate(self, t):
        return self.factor * self.term._evaluate(t)

    @property
    def params(self):
        return {"term": self.term.to_config(), "factor": self.factor}


class Sum(RateFunction):
    kind = "sum"

    def __init__(self, terms):
        self.terms = tuple(term if isinstance(term, RateFunction) else rate_from_config(term) for term in terms)
        if not self.terms:
            raise ValidationError("needs at least one term", field="terms")

    def _evaluate(self, t):
        return sum(term._evaluate(t) for term in self.terms)

    @property
    def params(self):
        return {"terms": [term.to_config() for term in self.terms]}


kinds = {cls.kind: cls for cls in (Constant, Polynomial, Tanh, Sin, Cos, Piecewise, Transition, Scaled, Sum)}


def rate_from_config(block, name="rate"):
    """Build a rate function from a number or a `{"kind": ..., "params": {...}}` block"""
    if isinstance(block, RateFunction):
        return block
    if isinstance(block, (int, float)) and not isinstance(block, bool):
        return Constant(block)
    if not isinstance(block, dict) or "kind" not in block:
        raise ValidationError("expected a number or an object with a 'kind' member", field=name)
    kind = str(block["kind"]).lower()
    if kind not in kinds:
        raise ValidationError(f"unknown kind {block['kind']!r}; choose from {sorted(kinds)}", field=name)
    params = block.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params must be an object", field=name)
    try:
        return kinds[kind](**params)
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"bad params for kind {kind!r}: {e}", field=name) from e
