"""Lifted circle diffeomorphisms, gauge functions, and anomaly densities.

The change of variables that trades a position-dependent velocity for a
homogeneous one is a diffeomorphism of the circle; its lift to the real
line satisfies F(x + L) = F(x) + L with F' > 0.  This module constructs the
three maps a scenario needs (velocity map f, thermal map g, gauge function
h), provides their inverses and derivatives, and evaluates the Schwarzian
anomaly densities and the Bott cocycle that govern the quantum corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PositivityViolated
from .numerics import (
    QuadratureSpec, TrigSeries, integrate, invert_monotone_array, periodic_mean,
)
from .profiles import Circle, Line, Profile, product


class CircleMap:
    """A lifted orientation-preserving circle diffeomorphism.

    ``forward`` and the derivative callables must be vectorised; the inverse
    is evaluated on demand by monotone Newton iteration with the winding
    reduced through the lift property F(y + nL) -> F(y) + nL.
    """

    def __init__(self, period, forward, derivs, validate=True):
        self.period = float(period)
        self._forward = forward
        self._derivs = tuple(derivs)  # orders 1..3
        L = self.period
        self._f_lo = float(self.forward(np.array([-0.5 * L]))[0])
        if validate:
            self._validate()

    def forward(self, x):
        return self._forward(np.asarray(x, dtype=float))

    def derivative(self, x, order=1):
        if not 1 <= order <= len(self._derivs):
            raise ValueError(f"derivative order {order} unavailable")
        return self._derivs[order - 1](np.asarray(x, dtype=float))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        L = self.period
        n = np.floor((y - self._f_lo) / L)
        y_red = y - n * L
        x = invert_monotone_array(
            lambda u: self.forward(u), lambda u: self.derivative(u, 1),
            y_red, -0.5 * L, 0.5 * L,
        )
        return x + n * L

    def _validate(self):
        L = self.period
        x = np.linspace(-0.5 * L, 0.5 * L, 33)
        if np.max(np.abs(self.forward(x + L) - self.forward(x) - L)) > 1e-10 * max(1.0, L):
            raise ValueError("map violates the lift property F(x+L) = F(x) + L")
        grid = np.linspace(-0.5 * L, 0.5 * L, 4096, endpoint=False)
        if np.min(self.derivative(grid, 1)) <= 0:
            raise ValueError("map is not orientation preserving (F' <= 0)")
        y = np.linspace(-2 * L, 2 * L, 33)
        if np.max(np.abs(self.forward(self.inverse(y)) - y)) > 1e-10 * max(1.0, L):
            raise ValueError("inverse round trip failed")

    @classmethod
    def from_displacement(cls, series: TrigSeries, validate=True):
        """Map x + P(x) - P(0) for a periodic displacement series P."""
        p0 = float(series(np.array([0.0]))[0])

        def fwd(x):
            return x + series(x) - p0

        derivs = [
            lambda x: 1.0 + series(x, order=1),
            lambda x: series(x, order=2),
            lambda x: series(x, order=3),
        ]
        return cls(series.period, fwd, derivs, validate=validate)


class LineMap:
    """Increasing diffeomorphism of the line with unit slope outside a window.

    Used for transport scenarios where the velocity equals a constant
    asymptote outside [-X, X]: the displacement Q(x) = integral of
    (vbar / v - 1) is constant beyond the window, so forward and inverse are
    explicit there and Newton iteration is only needed inside.
    """

    def __init__(self, window, forward_in, derivs, q_left, q_right, validate=True):
        self.window = float(window)
        self._forward_in = forward_in
        self._derivs = tuple(derivs)
        self.q_left = float(q_left)
        self.q_right = float(q_right)
        if validate:
            self._validate()

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        xi = np.clip(x, -self.window, self.window)
        inner = self._forward_in(xi)
        out = np.where(x > self.window, x + self.q_right, inner)
        out = np.where(x < -self.window, x + self.q_left, out)
        return out

    def derivative(self, x, order=1):
        return self._derivs[order - 1](np.asarray(x, dtype=float))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        X = self.window
        lo, hi = -X + self.q_left, X + self.q_right
        out = np.where(y >= hi, y - self.q_right, y - self.q_left)
        inside = (y > lo) & (y < hi)
        if np.any(inside):
            out = np.array(out, dtype=float)
            out[inside] = invert_monotone_array(
                lambda u: self.forward(u), lambda u: self.derivative(u, 1),
                y[inside], -X, X,
            )
        return out

    def _validate(self):
        X = self.window
        grid = np.linspace(-X, X, 4096)
        if np.min(self.derivative(grid, 1)) <= 0:
            raise ValueError("line map is not increasing")
        y = np.linspace(-3 * X, 3 * X, 33)
        if np.max(np.abs(self.forward(self.inverse(y)) - y)) > 1e-10 * max(1.0, X):
            raise ValueError("line map inverse round trip failed")


@dataclass
class GaugeFunction:
    """Periodic gauge function h with first-derivative access."""

    period: float
    series: TrigSeries  # zero-mean periodic antiderivative representation
    slope: object       # closed-form h'(x)
    offset: float = 0.0

    def __call__(self, x):
        return self.series(np.asarray(x, dtype=float)) + self.offset

    def derivative(self, x):
        return self.slope(np.asarray(x, dtype=float))

    def validate(self):
        L = self.period
        x = np.linspace(-0.5 * L, 0.5 * L, 33)
        if np.max(np.abs(self(x + L) - self(x))) > 1e-10:
            raise ValueError("gauge function is not periodic")


@dataclass(frozen=True)
class ScenarioConstants:
    """Reference constants fixed by circle averages of the profiles."""

    v0: float
    beta0: float
    mu0: float
    c: float
    kappa: float
    L: float

    def __post_init__(self):
        if not (self.v0 > 0 and self.beta0 > 0 and self.c > 0 and self.kappa > 0):
            raise ValueError("v0, beta0, c, kappa must all be positive")

    def check_means(self, v, beta, mu, tol=1e-10):
        """Verify the defining mean relations by independent quadrature."""
        spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=4000)
        L = self.L

        def avg(f):
            return integrate(f, -0.5 * L, 0.5 * L, spec) / L

        resid = [
            abs(avg(lambda x: 1.0 / v(x)) - 1.0 / self.v0),
            abs(avg(lambda x: 1.0 / (v(x) * beta(x))) - 1.0 / (self.v0 * self.beta0)),
        ]
        if mu is not None:
            resid.append(abs(avg(lambda x: mu(x) / v(x)) - self.mu0 / self.v0))
        worst = max(resid)
        if worst > tol:
            raise ValueError(f"scenario constants violate mean relations ({worst:.2e})")
        return worst


# ---------------------------------------------------------------------------
# map builders
# ---------------------------------------------------------------------------

def _check_positive(p: Profile, what):
    L = p.domain.period
    grid = np.linspace(-0.5 * L, 0.5 * L, 4096, endpoint=False)
    if np.min(p(grid)) <= 0:
        raise PositivityViolated(f"{what} must be positive everywhere")


def build_f(v: Profile):
    """Velocity map f(x) = int_0^x v0 / v dx' and the constant v0.

    v0 is fixed by requiring unit mean slope, which makes the lift property
    hold by construction.  The periodic part of f(x) - x is obtained by
    termwise integration of the Fourier series of (v0 / v - 1); derivatives
    come from the closed form f' = v0 / v, not from the quadrature output.
    """
    if not isinstance(v.domain, Circle):
        raise ValueError("build_f needs a circle profile")
    _check_positive(v, "velocity profile")
    L = v.domain.period
    inv_v = TrigSeries.from_function(lambda x: 1.0 / v(x), L)
    v0 = 1.0 / inv_v.mean
    series = TrigSeries(L, 0.0, inv_v.k, v0 * inv_v.amp).antiderivative()
    p0 = float(series(np.array([0.0]))[0])

    def fwd(x):
        return x + series(x) - p0

    def d1(x):
        return v0 / v(x)

    def d2(x):
        return -v0 * v(x, order=1) / v(x) ** 2

    def d3(x):
        u, u1, u2 = v(x), v(x, order=1), v(x, order=2)
        return v0 * (2 * u1 ** 2 - u * u2) / u ** 3

    return CircleMap(L, fwd, [d1, d2, d3]), v0


def build_g(v: Profile, beta: Profile):
    """Thermal map g(x) = int_0^x v0 b0 / (v beta) dx' and the product v0 b0."""
    return build_f(product(v, beta, name="v*beta"))


def build_line_map(p: Profile, reference, pad=1.25) -> LineMap:
    """Line diffeomorphism F(x) = x + int_0^x (reference / p - 1) dx'.

    ``p`` must equal ``reference`` outside its window on both sides, so the
    displacement integrand is compactly concentrated; it is fitted by a
    Fourier series on a padded window (the periodized extension is smooth
    to working precision because the integrand vanishes at the seam) and
    integrated termwise.  Derivatives come from F' = reference / p.
    """
    if not isinstance(p.domain, Line):
        raise ValueError("build_line_map needs a line profile")
    for asym in (p.domain.value_left, p.domain.value_right):
        if abs(asym - reference) > 1e-12 * abs(reference):
            raise ValueError("profile asymptotes must equal the reference value")
    grid = np.linspace(-p.domain.window, p.domain.window, 4096)
    if np.min(p(grid)) <= 0:
        raise PositivityViolated("line-map profile must be positive")
    X = pad * p.domain.window
    s = TrigSeries.from_function(lambda x: reference / p(x) - 1.0, 2 * X)
    m = s.mean
    tilted = TrigSeries(2 * X, 0.0, s.k, s.amp).antiderivative()
    t0 = float(tilted(np.array([0.0]))[0])

    def fwd_in(x):
        return x * (1.0 + m) + tilted(x) - t0

    def d1(x):
        return reference / p(x)

    def d2(x):
        return -reference * p(x, order=1) / p(x) ** 2

    def d3(x):
        u, u1, u2 = p(x), p(x, order=1), p(x, order=2)
        return reference * (2 * u1 ** 2 - u * u2) / u ** 3

    q_left = float(fwd_in(np.array([-X]))[0]) - (-X)
    q_right = float(fwd_in(np.array([X]))[0]) - X
    return LineMap(X, fwd_in, [d1, d2, d3], q_left, q_right)


def build_h(v: Profile, beta: Profile, mu: Profile):
    """Gauge function h(x) = int_0^x [mu beta - mu0 b0] / (v beta) dx' and mu0.

    The choice of mu0 makes the integrand zero-mean, hence h periodic.
    """
    if not isinstance(v.domain, Circle):
        raise ValueError("build_h needs circle profiles")
    L = v.domain.period
    inv_v = TrigSeries.from_function(lambda x: 1.0 / v(x), L)
    v0 = 1.0 / inv_v.mean
    inv_vb = TrigSeries.from_function(lambda x: 1.0 / (v(x) * beta(x)), L)
    v0b0 = 1.0 / inv_vb.mean
    mu_over_v = TrigSeries.from_function(lambda x: mu(x) / v(x), L)
    mu0 = v0 * mu_over_v.mean
    mu0b0 = mu0 * v0b0 / v0

    def slope(x):
        return (mu(x) * beta(x) - mu0b0) / (v(x) * beta(x))

    w = TrigSeries.from_function(slope, L)
    series = TrigSeries(L, 0.0, w.k, w.amp).antiderivative()
    offset = -float(series(np.array([0.0]))[0])
    h = GaugeFunction(L, series, slope, offset)
    h.validate()
    return h, mu0


# ---------------------------------------------------------------------------
# map algebra (used heavily by the cocycle and composition-law tests)
# ---------------------------------------------------------------------------

def compose_maps(F1: CircleMap, F2: CircleMap, validate=False) -> CircleMap:
    """The lifted composition x -> F1(F2(x))."""

    def fwd(x):
        return F1.forward(F2.forward(x))

    def d1(x):
        return F1.derivative(F2.forward(x), 1) * F2.derivative(x, 1)

    def d2(x):
        y = F2.forward(x)
        a, b = F2.derivative(x, 1), F2.derivative(x, 2)
        return F1.derivative(y, 2) * a ** 2 + F1.derivative(y, 1) * b

    def d3(x):
        y = F2.forward(x)
        a, b, g = F2.derivative(x, 1), F2.derivative(x, 2), F2.derivative(x, 3)
        return (F1.derivative(y, 3) * a ** 3
                + 3 * F1.derivative(y, 2) * a * b
                + F1.derivative(y, 1) * g)

    return CircleMap(F1.period, fwd, [d1, d2, d3], validate=validate)


def inverse_map(F: CircleMap, validate=False) -> CircleMap:
    """The inverse diffeomorphism as a map with closed-form derivatives."""

    def fwd(y):
        return F.inverse(y)

    def d1(y):
        return 1.0 / F.derivative(F.inverse(y), 1)

    def d2(y):
        x = F.inverse(y)
        return -F.derivative(x, 2) / F.derivative(x, 1) ** 3

    def d3(y):
        x = F.inverse(y)
        a, b, g = (F.derivative(x, 1), F.derivative(x, 2), F.derivative(x, 3))
        return (3 * b ** 2 - a * g) / a ** 5

    return CircleMap(F.period, fwd, [d1, d2, d3], validate=validate)


def identity_map(period) -> CircleMap:
    return CircleMap(
        period,
        lambda x: x,
        [lambda x: np.ones_like(x), lambda x: np.zeros_like(x),
         lambda x: np.zeros_like(x)],
        validate=False,
    )


def random_trig_map(period, rng, n_harmonics=3, strength=0.25) -> CircleMap:
    """A random smooth lifted diffeomorphism for property tests.

    Amplitudes are rescaled so the displacement slope stays below
    ``strength`` < 1, keeping the map orientation preserving.
    """
    k = np.arange(1, n_harmonics + 1)
    amp = (rng.random(n_harmonics) - 0.5) + 1j * (rng.random(n_harmonics) - 0.5)
    slope_bound = np.sum(np.abs(amp) * 2 * np.pi * k / period)
    amp *= strength / slope_bound
    series = TrigSeries(period, 0.0, k, amp)
    return CircleMap.from_displacement(series)


# ---------------------------------------------------------------------------
# Schwarzian derivative, anomaly densities, Bott cocycle
# ---------------------------------------------------------------------------

def schwarzian(F: CircleMap, x):
    """F'''/F' - (3/2)(F''/F')^2 at x (vanishes exactly for affine maps)."""
    x = np.asarray(x, dtype=float)
    a = F.derivative(x, 1)
    b = F.derivative(x, 2)
    g = F.derivative(x, 3)
    return g / a - 1.5 * (b / a) ** 2


def velocity_anomaly(v: Profile, c, x):
    """Static anomaly density sourced by the curvature of v(x).

    Equals c v^2 {f, x} / 12 pi for the velocity map f, a cross-check the
    test suite enforces.
    """
    x = np.asarray(x, dtype=float)
    u, u1, u2 = v(x), v(x, order=1), v(x, order=2)
    return -c * u ** 2 / (12 * np.pi) * (u2 / u - 0.5 * (u1 / u) ** 2)


def temperature_anomaly(v: Profile, beta: Profile, c, x):
    """Initial-state anomaly density sourced by the curvature of beta(x)."""
    x = np.asarray(x, dtype=float)
    u, u1 = v(x), v(x, order=1)
    b, b1, b2 = beta(x), beta(x, order=1), beta(x, order=2)
    return -c * u ** 2 / (12 * np.pi) * (
        b2 / b - 0.5 * (b1 / b) ** 2 + (u1 / u) * (b1 / b)
    )


def bott_cocycle(F1: CircleMap, F2: CircleMap, tol=1e-12):
    """Group 2-cocycle (1/2) int [log F2']' log F1'(F2(x)) dx over one period.

    The integrand is smooth and periodic, so trapezoidal sums on doubling
    grids converge spectrally.
    """
    if abs(F1.period - F2.period) > 1e-12 * F1.period:
        raise ValueError("maps must share a period")
    L = F1.period

    def integrand(x):
        return (F2.derivative(x, 2) / F2.derivative(x, 1)
                * np.log(F1.derivative(F2.forward(x), 1)))

    return 0.5 * L * periodic_mean(integrand, L, tol=tol)
