"""Smooth spatial profiles with derivative access.

A :class:`Profile` represents one of the smooth inputs of a scenario: the
velocity v(x), the inverse temperature beta(x), the chemical potential
mu(x), or the kink shape W(x) used for transport perturbations.  Profiles
live either on a circle of given period or on the line with declared
asymptotes, and expose derivatives up to third order (closed forms where
available, spectral interpolation for sampled data).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _erf

from .errors import OrderUnavailable, PositivityViolated
from .numerics import SampledPeriodic, integrate, QuadratureSpec


@dataclass(frozen=True)
class Circle:
    period: float


@dataclass(frozen=True)
class Line:
    value_left: float
    value_right: float
    window: float  # profile equals its asymptote (to working precision) for |x| > window


class Profile:
    """A smooth function with derivatives up to order 3.

    ``derivs`` is a sequence of vectorised callables [p, p', p'', p''']; a
    shorter sequence means higher orders are unavailable (eval raises
    :class:`OrderUnavailable`).
    """

    def __init__(self, domain, derivs, positivity_required=False, name="",
                 validate=True):
        self.domain = domain
        self._derivs = tuple(derivs)
        self.positivity_required = positivity_required
        self.name = name
        if validate:
            self._validate()

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x, order=0):
        if order < 0 or order > 3:
            raise OrderUnavailable("derivative order must be 0..3")
        if order >= len(self._derivs):
            raise OrderUnavailable(
                f"profile {self.name or '<anonymous>'} provides derivatives "
                f"only up to order {len(self._derivs) - 1}"
            )
        return self._derivs[order](np.asarray(x, dtype=float))

    @property
    def max_order(self):
        return len(self._derivs) - 1

    # -- validation ---------------------------------------------------------

    def _validate(self):
        if isinstance(self.domain, Circle):
            L = self.domain.period
            x = np.linspace(-0.5 * L, 0.5 * L, 65)
            a, b = self(x), self(x + L)
            scale = max(1.0, float(np.max(np.abs(a))))
            if np.max(np.abs(a - b)) > 1e-10 * scale:
                raise ValueError(f"profile {self.name!r} is not {L}-periodic")
            grid = np.linspace(-0.5 * L, 0.5 * L, 4096, endpoint=False)
        else:
            X = self.domain.window
            for mult, target in ((2.0, None), (4.0, None)):
                for sgn, asym in ((-1, self.domain.value_left),
                                  (1, self.domain.value_right)):
                    val = float(self(sgn * mult * X))
                    tol = 1e-12 * max(1.0, abs(asym))
                    if abs(val - asym) > tol:
                        raise ValueError(
                            f"profile {self.name!r} misses its asymptote at "
                            f"x = {sgn * mult * X}"
                        )
            grid = np.linspace(-2.0 * X, 2.0 * X, 4096)
        if self.positivity_required and np.min(self(grid)) <= 0:
            raise PositivityViolated(
                f"profile {self.name!r} must stay positive"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_sampled(cls, sampled: SampledPeriodic, positivity_required=False,
                     name=""):
        """Circle profile backed by spectral interpolation of samples."""
        derivs = [
            (lambda k: (lambda x: sampled.evaluate(x, order=k)))(k)
            for k in range(4)
        ]
        return cls(Circle(sampled.period), derivs,
                   positivity_required=positivity_required, name=name)


def eval_profile(p: Profile, x, derivative_order=0):
    """Functional alias for ``p(x, order)``."""
    return p(x, order=derivative_order)


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------

def constant(value, domain, positivity_required=False, name=""):
    value = float(value)
    derivs = [
        lambda x, v=value: np.full_like(x, v, dtype=float),
        lambda x: np.zeros_like(x, dtype=float),
        lambda x: np.zeros_like(x, dtype=float),
        lambda x: np.zeros_like(x, dtype=float),
    ]
    return Profile(domain, derivs, positivity_required, name or f"const({value})")


def trig(period, mean, terms, positivity_required=False, name=""):
    """Circle profile mean + sum_k [a_k cos(2 pi k x/L + phi_k)].

    ``terms`` is a sequence of (harmonic k, amplitude a, phase phi).
    """
    terms = [(int(k), float(a), float(phi)) for k, a, phi in terms]
    L = float(period)

    def deriv(order):
        def f(x):
            out = np.full_like(x, mean if order == 0 else 0.0, dtype=float)
            for k, a, phi in terms:
                w = 2 * np.pi * k / L
                arg = w * x + phi + order * np.pi / 2  # cos -> -sin -> -cos ...
                out = out + a * w ** order * np.cos(arg)
            return out
        return f

    return Profile(Circle(L), [deriv(o) for o in range(4)],
                   positivity_required, name or "trig")


def gaussian_bump(amplitude, sigma, window=None, name=""):
    """Line profile a * exp(-x^2 / 2 sigma^2), asymptote zero on both sides."""
    a = float(amplitude)
    s = float(sigma)
    if window is None:
        # amplitude * exp(-X^2/2s^2) below 1e-13 absolute
        window = s * math.sqrt(2.0 * max(math.log(max(abs(a), 1e-300) / 1e-13), 1.0))

    def g(x):
        return a * np.exp(-x * x / (2 * s * s))

    derivs = [
        g,
        lambda x: -(x / s ** 2) * g(x),
        lambda x: (x * x / s ** 4 - 1.0 / s ** 2) * g(x),
        lambda x: (-x ** 3 / s ** 6 + 3 * x / s ** 4) * g(x),
    ]
    return Profile(Line(0.0, 0.0, window), derivs, name=name or "gaussian_bump")


# ---------------------------------------------------------------------------
# combinators (all preserve derivative order and update line asymptotes)
# ---------------------------------------------------------------------------

def _combine_domain(d1, d2):
    if type(d1) is not type(d2):
        raise ValueError("profiles live on different domain types")
    if isinstance(d1, Circle):
        if abs(d1.period - d2.period) > 1e-12 * d1.period:
            raise ValueError("profiles have different periods")
        return d1
    return Line(0.0, 0.0, max(d1.window, d2.window))  # asymptotes filled by caller


def add(p1: Profile, p2: Profile, name=""):
    dom = _combine_domain(p1.domain, p2.domain)
    if isinstance(dom, Line):
        dom = Line(p1.domain.value_left + p2.domain.value_left,
                   p1.domain.value_right + p2.domain.value_right, dom.window)
    n = min(p1.max_order, p2.max_order)
    derivs = [
        (lambda k: (lambda x: p1(x, order=k) + p2(x, order=k)))(k)
        for k in range(n + 1)
    ]
    return Profile(dom, derivs, name=name or "sum", validate=False)


def affine(p: Profile, scale=1.0, offset=0.0, positivity_required=False, name=""):
    """offset + scale * p(x)."""
    dom = p.domain
    if isinstance(dom, Line):
        dom = Line(offset + scale * dom.value_left,
                   offset + scale * dom.value_right, dom.window)
    derivs = [lambda x: offset + scale * p(x)]
    derivs += [
        (lambda k: (lambda x: scale * p(x, order=k)))(k)
        for k in range(1, p.max_order + 1)
    ]
    prof = Profile(dom, derivs, positivity_required=positivity_required,
                   name=name or "affine", validate=False)
    if positivity_required:
        prof._validate()
    return prof


def product(p1: Profile, p2: Profile, positivity_required=False, name=""):
    dom = _combine_domain(p1.domain, p2.domain)
    if isinstance(dom, Line):
        dom = Line(p1.domain.value_left * p2.domain.value_left,
                   p1.domain.value_right * p2.domain.value_right, dom.window)
    n = min(p1.max_order, p2.max_order)

    def deriv(k):
        def f(x):
            out = np.zeros_like(np.asarray(x, dtype=float))
            for j in range(k + 1):
                out = out + math.comb(k, j) * p1(x, order=j) * p2(x, order=k - j)
            return out
        return f

    return Profile(dom, [deriv(k) for k in range(n + 1)],
                   positivity_required=positivity_required,
                   name=name or "product", validate=False)


def reciprocal(p: Profile, positivity_required=False, name=""):
    """1 / p(x) with derivatives up to order 3; p must be nonvanishing."""
    dom = p.domain
    if isinstance(dom, Line):
        dom = Line(1.0 / dom.value_left, 1.0 / dom.value_right, dom.window)

    def d0(x):
        return 1.0 / p(x)

    def d1(x):
        u, u1 = p(x), p(x, order=1)
        return -u1 / u ** 2

    def d2(x):
        u, u1, u2 = p(x), p(x, order=1), p(x, order=2)
        return (2 * u1 ** 2 - u * u2) / u ** 3

    def d3(x):
        u, u1, u2, u3 = (p(x), p(x, order=1), p(x, order=2), p(x, order=3))
        return (-u3 * u ** 2 + 6 * u2 * u1 * u - 6 * u1 ** 3) / u ** 4

    derivs = [d0, d1, d2, d3][: p.max_order + 1]
    return Profile(dom, derivs, positivity_required=positivity_required,
                   name=name or f"1/({p.name})", validate=False)


# ---------------------------------------------------------------------------
# kink profiles
# ---------------------------------------------------------------------------

# exponential-tail shapes reach their asymptote to 1e-12 inside these radii;
# the arctan tail is only O(w/x), so its window is the radius where the
# deviation falls below 5e-13
_KINK_WINDOWS = {"tanh": 15.0, "erf": 6.0, "arctan": 1.0 / (math.pi * 5e-13)}


@dataclass
class KinkProfile:
    """Monotone step from +1/2 (left) to -1/2 (right) with width scale w."""

    base: Profile
    width: float

    def __call__(self, x, order=0):
        return self.base(x, order=order)

    @property
    def window(self):
        return self.base.domain.window


def make_smooth_kink(w, shape="tanh") -> KinkProfile:
    """Build a unit kink of the requested shape and width.

    Shapes: 'tanh' -> -tanh(x/w)/2, 'arctan' -> -arctan(x/w)/pi,
    'erf' -> -erf(x/w)/2.  The derivative -W' integrates to one.
    """
    w = float(w)
    if w <= 0:
        raise ValueError("kink width must be positive")

    if shape == "tanh":
        def d0(x):
            return -0.5 * np.tanh(x / w)

        def d1(x):
            t = np.tanh(x / w)
            return -0.5 * (1 - t * t) / w

        def d2(x):
            t = np.tanh(x / w)
            return t * (1 - t * t) / w ** 2

        def d3(x):
            t = np.tanh(x / w)
            return (1 - t * t) * (1 - 3 * t * t) / w ** 3
    elif shape == "arctan":
        def d0(x):
            return -np.arctan(x / w) / np.pi

        def d1(x):
            u = x / w
            return -1.0 / (np.pi * w * (1 + u * u))

        def d2(x):
            u = x / w
            return 2 * u / (np.pi * w ** 2 * (1 + u * u) ** 2)

        def d3(x):
            u = x / w
            return 2 * (1 - 3 * u * u) / (np.pi * w ** 3 * (1 + u * u) ** 3)
    elif shape == "erf":
        def d0(x):
            return -0.5 * _erf(x / w)

        def d1(x):
            return -np.exp(-(x / w) ** 2) / (w * math.sqrt(np.pi))

        def d2(x):
            u = x / w
            return 2 * u * np.exp(-u * u) / (w ** 2 * math.sqrt(np.pi))

        def d3(x):
            u = x / w
            return (2 - 4 * u * u) * np.exp(-u * u) / (w ** 3 * math.sqrt(np.pi))
    else:
        raise ValueError(f"unknown kink shape {shape!r}")

    window = w * _KINK_WINDOWS[shape]
    base = Profile(Line(0.5, -0.5, window), [d0, d1, d2, d3],
                   name=f"{shape}-kink", validate=False)
    kink = KinkProfile(base, w)
    _validate_kink(kink, shape)
    return kink


def _validate_kink(kink: KinkProfile, shape):
    w = kink.width
    # asymptote approach (tail decay is polynomial for arctan, so test there
    # at its own 1e-10 radius instead of 20 w)
    if shape == "arctan":
        r = w / (math.pi * 1e-10)
    else:
        r = 20.0 * w
    if abs(float(kink(-r)) - 0.5) > 1e-10 or abs(float(kink(r)) + 0.5) > 1e-10:
        raise ValueError("kink does not reach its asymptotes")
    grid = np.linspace(-25 * w, 25 * w, 2001)
    if np.max(kink(grid, order=1)) > 0:
        raise ValueError("kink derivative must be <= 0 everywhere")
    # -W' integrates to one over the line
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=8000)
    norm = integrate(lambda x: -kink(x, order=1), -kink.window, kink.window, spec)
    tail = 1.0 - (float(kink(-kink.window)) - float(kink(kink.window)))
    if abs(norm + tail - 1.0) > 1e-10:
        raise ValueError("kink derivative does not integrate to one")


def perturb(base_value, kink: KinkProfile, height, positivity_required=False,
            name="") -> Profile:
    """Line profile base_value + height * W(x)."""
    prof = affine(kink.base, scale=float(height), offset=float(base_value),
                  name=name or "perturbed")
    if positivity_required:
        grid = np.linspace(-2 * kink.window, 2 * kink.window, 4096)
        if np.min(prof(grid)) <= 0:
            raise PositivityViolated(
                "perturbed profile crosses zero but must stay positive"
            )
        prof.positivity_required = True
    return prof
