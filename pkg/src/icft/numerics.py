"""Shared numerical kernels: adaptive quadrature, monotone root-finding,
and spectral differentiation of periodic samples.

All routines are pure functions of their inputs and are safe to call
concurrently.  Integrands passed to :func:`integrate` must accept numpy
arrays (panels are evaluated in batches).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BracketInvalid, NonConvergent, UnderResolved

# Gauss-Kronrod (G7, K15) abscissae and weights on [-1, 1].
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# full symmetric node/weight tables
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])            # 15 nodes, ascending
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])  # Gauss nodes sit at odd slots


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy contract for adaptive integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_subdivisions >= 1):
            raise ValueError("rel_tol, abs_tol must be > 0 and max_subdivisions >= 1")


def _panel_rule(f, a, b):
    """Evaluate K15/G7 on a batch of panels.

    a, b: arrays of panel endpoints.  Returns (K15, err, width) arrays where
    err is the QUADPACK-style error estimate per panel.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    resk = fx @ _WEIGHTS_K * half
    resg = fx @ _WEIGHTS_G * half
    resabs = np.abs(fx) @ _WEIGHTS_K * np.abs(half)
    mean = resk / (b - a + np.finfo(float).tiny)
    resasc = np.abs(fx - mean[:, None]) @ _WEIGHTS_K * np.abs(half)
    err = np.abs(resk - resg)
    scale = np.ones_like(err)
    mask = (resasc != 0) & (err != 0)
    scale[mask] = np.minimum(1.0, (200.0 * err[mask] / resasc[mask]) ** 1.5)
    err = np.where(mask, resasc * scale, err)
    floor = 50.0 * np.finfo(float).eps * resabs
    err = np.maximum(err, floor)
    return resk, err, floor


def integrate(f, a, b, spec=QuadratureSpec()):
    """Adaptive Gauss-Kronrod integration of ``f`` over [a, b].

    The returned value I satisfies (estimated error) <= max(abs_tol,
    rel_tol * |I|).  Panels failing their share of the error budget are
    bisected until the budget is met or ``max_subdivisions`` is exhausted,
    in which case :class:`NonConvergent` is raised carrying the best
    estimate and its bound.
    """
    a = float(a)
    b = float(b)
    if a > b:
        raise ValueError("integrate requires a <= b")
    if a == b:
        return 0.0

    total_width = b - a
    lo = np.array([a])
    hi = np.array([b])
    banked_val = 0.0
    banked_err = 0.0
    n_subdiv = 0

    vals, errs, floors = _panel_rule(f, lo, hi)
    for _ in range(200):  # depth guard; the real budget is max_subdivisions
        estimate = banked_val + vals.sum()
        bound = banked_err + errs.sum()
        tol = max(spec.abs_tol, spec.rel_tol * abs(estimate))
        if bound <= tol:
            return estimate
        # bank panels meeting a width-proportional budget share, and panels
        # that hit the round-off floor (splitting cannot improve them)
        widths = hi - lo
        ok = (errs <= tol * widths / total_width) | (errs <= 2.0 * floors)
        banked_val += vals[ok].sum()
        banked_err += errs[ok].sum()
        lo, hi = lo[~ok], hi[~ok]
        vals, errs = vals[~ok], errs[~ok]
        if lo.size == 0:
            return banked_val
        if bound <= tol:
            return banked_val + vals.sum()
        if n_subdiv + lo.size > spec.max_subdivisions:
            raise NonConvergent(
                f"quadrature needs more than {spec.max_subdivisions} subdivisions "
                f"(estimate {estimate:.17g}, bound {bound:.3g})",
                estimate=estimate, error_bound=bound,
            )
        n_subdiv += lo.size
        mid = 0.5 * (lo + hi)
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        vals, errs, floors = _panel_rule(f, lo, hi)

    estimate = banked_val + vals.sum()
    bound = banked_err + errs.sum()
    raise NonConvergent(
        "quadrature did not converge within the depth guard",
        estimate=estimate, error_bound=bound,
    )


def find_root_monotone(F, y, bracket, dF=None, rtol=1e-12):
    """Solve F(x) = y for strictly increasing F on ``bracket`` = (lo, hi).

    Newton iteration (when ``dF`` is supplied) with a bisection fallback that
    guarantees convergence; without ``dF`` a secant/bisection hybrid is used.
    The result satisfies |F(x) - y| <= rtol * max(1, |y|).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        raise BracketInvalid("bracket must satisfy lo <= hi")
    flo, fhi = float(F(lo)), float(F(hi))
    if not (flo <= y <= fhi):
        raise BracketInvalid(
            f"target {y!r} outside [F(lo), F(hi)] = [{flo!r}, {fhi!r}]"
        )
    tol = rtol * max(1.0, abs(y))
    if abs(flo - y) <= tol:
        return lo
    if abs(fhi - y) <= tol:
        return hi

    x = 0.5 * (lo + hi)
    fx = float(F(x))
    xp, fp = lo, flo  # previous point for secant steps
    for _ in range(200):
        if abs(fx - y) <= tol:
            return x
        if fx < y:
            lo = x
        else:
            hi = x
        if dF is not None:
            d = float(dF(x))
            step_ok = d > 0
            xn = x - (fx - y) / d if step_ok else None
        else:
            denom = fx - fp
            step_ok = denom != 0
            xn = x - (fx - y) * (x - xp) / denom if step_ok else None
        if not step_ok or not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        xp, fp = x, fx
        x = xn
        fx = float(F(x))
    raise BracketInvalid("root iteration failed to converge")  # pragma: no cover


def invert_monotone_array(F, dF, y, lo, hi, rtol=1e-13, max_newton=60):
    """Vectorised F^{-1}(y) for strictly increasing F on [lo, hi].

    Newton from the bracket midpoint with per-element bracket updates;
    elements that stall are finished by bisection.  Used by the map
    inversion hot paths so they stay array-valued.
    """
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel()
    a = np.full_like(y, lo)
    b = np.full_like(y, hi)
    x = 0.5 * (a + b)
    for _ in range(max_newton):
        fx = np.asarray(F(x)) - y
        tol = rtol * np.maximum(1.0, np.abs(y))
        active = np.abs(fx) > tol
        if not active.any():
            break
        below = active & (fx < 0)
        above = active & (fx > 0)
        a = np.where(below, x, a)
        b = np.where(above, x, b)
        d = np.asarray(dF(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / d
        bad = ~np.isfinite(xn) | (xn <= a) | (xn >= b)
        xn = np.where(bad, 0.5 * (a + b), xn)
        x = np.where(active, xn, x)
    else:
        # stragglers: plain bisection, unconditionally convergent
        for _ in range(120):
            fx = np.asarray(F(x)) - y
            a = np.where(fx < 0, x, a)
            b = np.where(fx > 0, x, b)
            x = 0.5 * (a + b)
    return x.reshape(shape)


def gauss_panels(a, b, n_panels, n_nodes=12):
    """Composite Gauss-Legendre nodes and weights over [a, b]."""
    xg, wg = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def periodic_mean(f, period, tol=1e-12, n0=64, nmax=1 << 17):
    """Mean of a smooth periodic function over one period.

    Trapezoidal sums on doubling grids converge spectrally for smooth
    periodic integrands; iteration stops when the estimate is stable.
    """
    n = n0
    prev = None
    while n <= nmax:
        x = -0.5 * period + period * np.arange(n) / n
        cur = float(np.mean(np.asarray(f(x), dtype=float)))
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
        n *= 2
    return prev


class TrigSeries:
    """Compact real trigonometric series c0 + Re sum_k A_k exp(2 pi i k x / L).

    Negligible modes are trimmed at construction, which keeps arbitrary-point
    evaluation cheap; derivatives multiply the amplitudes by (2 pi i k / L).
    """

    def __init__(self, period, mean, wavenumbers, amplitudes, trim=1e-16):
        self.period = float(period)
        self.mean = float(mean)
        wavenumbers = np.asarray(wavenumbers, dtype=float)
        amplitudes = np.asarray(amplitudes, dtype=complex)
        scale = max(np.max(np.abs(amplitudes), initial=0.0), abs(mean), 1e-300)
        keep = np.abs(amplitudes) > trim * scale
        self.k = wavenumbers[keep]
        self.amp = amplitudes[keep]

    @classmethod
    def from_function(cls, f, period, n=None):
        """Fit by FFT on a uniform grid x_j = -L/2 + j L / N; if ``n`` is
        None the grid doubles from 256 until the spectrum decays."""
        sp = SampledPeriodic.from_function(f, period, n=n)
        return cls.from_sampled(sp)

    @classmethod
    def from_sampled(cls, sp: "SampledPeriodic"):
        n = sp.samples.size
        c = sp.coefficients
        k = np.arange(1, n // 2)
        # grid starts at -L/2: fold the half-period phase into the amplitude
        signs = np.where(k % 2 == 0, 1.0, -1.0)
        amp = 2.0 * c[1:n // 2] * signs
        return cls(sp.period, float(c[0].real), k, amp)

    def __call__(self, x, order=0):
        x = np.asarray(x, dtype=float)
        if self.k.size == 0:
            base = self.mean if order == 0 else 0.0
            return np.full_like(x, base, dtype=float)
        ik = 2j * np.pi * self.k / self.period
        amp = self.amp * ik ** order
        flat = np.atleast_1d(x).ravel()
        out = np.empty(flat.size)
        step = max(1, (1 << 21) // max(1, self.k.size))  # cap the outer product
        for i in range(0, flat.size, step):
            block = flat[i:i + step]
            out[i:i + step] = np.real(np.exp(np.multiply.outer(block, ik)) @ amp)
        out = out.reshape(np.shape(x)) if np.ndim(x) else out[0]
        if order == 0:
            out = out + self.mean
        return out

    def antiderivative(self):
        """Zero-mean periodic antiderivative of (this series minus its mean)."""
        ik = 2j * np.pi * self.k / self.period
        return TrigSeries(self.period, 0.0, self.k, self.amp / ik)


# ---------------------------------------------------------------------------
# periodic samples with spectral derivatives
# ---------------------------------------------------------------------------

_SPECTRAL_DECAY = 1e-10


@dataclass
class SampledPeriodic:
    """Uniform samples of a smooth periodic function plus cached spectrum.

    Samples live on the grid x_j = -L/2 + j L/N with N a power of two.
    """

    period: float
    samples: np.ndarray
    coefficients: np.ndarray = field(default=None)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        n = self.samples.size
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("need at least 16 samples and a power-of-two count")
        if self.coefficients is None:
            self.coefficients = np.fft.fft(self.samples) / n

    @classmethod
    def from_function(cls, f, period, n=None):
        """Sample ``f``; if ``n`` is None, double from 256 until the spectrum
        decays (capped at 16384)."""
        if n is not None:
            x = -0.5 * period + period * np.arange(n) / n
            return cls(period, np.asarray(f(x), dtype=float))
        n = 256
        while True:
            x = -0.5 * period + period * np.arange(n) / n
            p = cls(period, np.asarray(f(x), dtype=float))
            if p.well_resolved or n >= 16384:
                return p
            n *= 2

    @property
    def grid(self):
        n = self.samples.size
        return -0.5 * self.period + self.period * np.arange(n) / n

    @property
    def well_resolved(self):
        """True when the trailing third of the spectrum is negligible."""
        mag = np.abs(self.coefficients)
        peak = mag.max()
        if peak == 0:
            return True
        n = mag.size
        k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
        tail = mag[k >= n // 3]
        return tail.max() <= _SPECTRAL_DECAY * peak

    def _wavenumbers(self):
        n = self.samples.size
        return 2j * np.pi * np.fft.fftfreq(n, d=self.period / n)

    def evaluate(self, x, order=0):
        """Trigonometric interpolation of the ``order``-th derivative at x."""
        x = np.asarray(x, dtype=float)
        n = self.samples.size
        c = self.coefficients.copy()
        if order > 0:
            ik = self._wavenumbers()
            c = c * ik ** order
            if order % 2 == 1:
                c[n // 2] = 0.0  # Nyquist mode has no odd derivative
        k = np.fft.fftfreq(n, d=1.0 / n)
        # grid origin is -L/2, so the phase references x + L/2
        phase = np.exp(
            2j * np.pi * np.multiply.outer(x + 0.5 * self.period, k) / self.period
        )
        return np.real(phase @ c)


def spectral_derivative(p: SampledPeriodic, order: int) -> SampledPeriodic:
    """Differentiate a periodic sample set in Fourier space.

    Multiplies the spectrum by (2 pi i k / L)^order.  Emits an
    :class:`UnderResolved` warning when the input spectrum has not decayed.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if not p.well_resolved:
        warnings.warn(
            "spectral derivative of an under-resolved sample set", UnderResolved,
            stacklevel=2,
        )
    n = p.samples.size
    c = p.coefficients * p._wavenumbers() ** order
    if order % 2 == 1:
        c[n // 2] = 0.0
    samples = np.real(np.fft.ifft(c * n))
    return SampledPeriodic(p.period, samples, coefficients=c)
