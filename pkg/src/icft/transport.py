"""Frequency-dependent conductivities for a velocity bump on the line.

The conductivity matrix splits into ballistic Drude weights (universal,
independent of the inhomogeneity) and regular parts that are nonzero only
when the velocity actually varies.  Three mutually independent routes are
implemented and cross-checked:

* ``closed_form``   -- the explicit result, with the spectral overlap
  integral I(omega) done by adaptive quadrature;
* ``green_kubo_regular`` -- equilibrium current-current correlations,
  reduced semi-analytically (contour-shifted sinh integrals, then a
  position-space kernel integral);
* ``dynamical_conductivity`` / ``dynamical_drude`` -- a quench from
  kink-perturbed thermal profiles, time-integrated with damping and
  extrapolated to the undamped limit.

Conventions: index 1 = charge channel, 2 = heat channel; the perturbed
state variables are mu_1 = beta mu and mu_2 = -beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridUnderResolved, OmegaZero, PoleOnContour
from .numerics import QuadratureSpec, gauss_panels, integrate
from .circlemaps import build_line_map
from .observables import Scenario, mean_values_time_derivative
from .profiles import (
    KinkProfile, Line, Profile, affine, constant, gaussian_bump, make_smooth_kink,
    reciprocal,
)

_QUAD = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=30000)


@dataclass
class TransportSpec:
    """Inputs for the conductivity computations.

    ``v_line`` must equal ``vbar`` outside its window on both sides; the
    kink ``W`` sets the spatial shape of the thermodynamic perturbations.
    """

    v_line: Profile
    W: KinkProfile
    beta: float
    mu: float
    c: float
    kappa: float
    omega_grid: np.ndarray
    vbar: float

    def __post_init__(self):
        self.omega_grid = np.asarray(self.omega_grid, dtype=float)
        if not isinstance(self.v_line.domain, Line):
            raise ValueError("v_line must live on the line")
        for asym in (self.v_line.domain.value_left, self.v_line.domain.value_right):
            if abs(asym - self.vbar) > 1e-12 * abs(self.vbar):
                raise ValueError("v_line asymptotes must equal vbar")
        if not (self.beta > 0 and self.c > 0 and self.kappa > 0 and self.vbar > 0):
            raise ValueError("beta, c, kappa, vbar must be positive")
        if not np.all(np.isfinite(self.omega_grid)) or np.any(self.omega_grid < 0):
            raise ValueError("omega grid must be finite and nonnegative")

    # -- geometry helpers ----------------------------------------------------

    @cached_property
    def fmap(self):
        """Line map with slope vbar / v (unit slope outside the window)."""
        return build_line_map(self.v_line, self.vbar)

    @cached_property
    def kink_radius(self):
        """Radius beyond which the kink derivative is numerically zero."""
        r = self.W.width
        while abs(float(self.W(r, order=1))) > 1e-15 and r < self.W.window:
            r *= 1.5
        return min(1.05 * r + 3 * self.W.width, self.W.window)

    def travel_time(self, x):
        """int_0^x dx'' / v(x''), evaluated through the line map."""
        return self.fmap.forward(x) / self.vbar

    @cached_property
    def _ratio_series(self):
        """Spectral fit of v(finv(y))/vbar - 1 on its (padded) support.

        Map inversion is the expensive primitive; fitting the compactly
        concentrated deviation once makes kernel evaluations cheap.
        """
        from .numerics import TrigSeries
        X = self.v_line.domain.window
        half = 1.25 * float(self.fmap.forward(np.array([X]))[0])
        finv = self.fmap.inverse
        series = TrigSeries.from_function(
            lambda y: self.v_line(finv(y)) / self.vbar - 1.0, 2 * half
        )
        return series, half

    def velocity_ratio(self, y):
        """v(finv(y)) / vbar; exactly 1 outside the mapped window."""
        series, half = self._ratio_series
        y = np.asarray(y, dtype=float)
        out = np.ones_like(y)
        inside = np.abs(y) < half
        if np.any(inside):
            out[inside] += series(y[inside])
        return out


def gaussian_bump_spec(amplitude=0.5, sigma=1.0, vbar=1.0, beta=1.0, mu=0.0,
                       c=1.0, kappa=1.0, kink_width=1.0, kink_shape="tanh",
                       omega_grid=(0.5, 1.0, 2.0)) -> TransportSpec:
    """Standard test scenario: 1 - vbar / v(x) = amplitude * exp(-x^2/2 sigma^2)."""
    bump = gaussian_bump(amplitude, sigma)
    v = affine(reciprocal(affine(bump, scale=-1.0, offset=1.0)), scale=vbar,
               positivity_required=True, name="bump velocity")
    kink = make_smooth_kink(kink_width, kink_shape)
    return TransportSpec(v, kink, beta, mu, c, kappa, np.asarray(omega_grid),
                         vbar)


def constant_v_spec(vbar=1.0, beta=1.0, mu=0.0, c=1.0, kappa=1.0,
                    kink_width=1.0, omega_grid=(0.5, 1.0, 2.0)) -> TransportSpec:
    """Homogeneous velocity: all regular parts vanish, only Drude remains."""
    v = constant(vbar, Line(vbar, vbar, 5.0), positivity_required=True)
    kink = make_smooth_kink(kink_width, "tanh")
    return TransportSpec(v, kink, beta, mu, c, kappa, np.asarray(omega_grid),
                         vbar)


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------

def inhomogeneity_spectrum(spec: TransportSpec, omega):
    """The overlap integral I(omega) controlling every regular part.

    I = iint (1 - vbar/v(x)) (-W'(x')) cos(omega [A(x) - A(x')]) dx dx'
    with A the travel-time coordinate.  The cosine separates, so two 1D
    integrals per factor suffice; both integrands vanish outside explicit
    windows.
    """
    omega = float(omega)
    X = spec.v_line.domain.window
    XW = spec.kink_radius

    def v_factor(x):
        return 1.0 - spec.vbar / spec.v_line(x)

    def w_factor(x):
        return -spec.W(x, order=1)

    cv = integrate(lambda x: v_factor(x) * np.cos(omega * spec.travel_time(x)),
                   -X, X, _QUAD)
    cw = integrate(lambda x: w_factor(x) * np.cos(omega * spec.travel_time(x)),
                   -XW, XW, _QUAD)
    if omega == 0.0:
        return cv * cw
    sv = integrate(lambda x: v_factor(x) * np.sin(omega * spec.travel_time(x)),
                   -X, X, _QUAD)
    sw = integrate(lambda x: w_factor(x) * np.sin(omega * spec.travel_time(x)),
                   -XW, XW, _QUAD)
    return cv * cw + sv * sw


def drude_matrix(spec: TransportSpec):
    """Universal ballistic weights (independent of the inhomogeneity)."""
    v, b, m = spec.vbar, spec.beta, spec.mu
    d11 = v * spec.kappa / (np.pi * b)
    d12 = v * spec.kappa * m / (np.pi * b)
    d22 = np.pi * v * spec.c / (3 * b ** 3) + v * spec.kappa * m ** 2 / (np.pi * b)
    return np.array([[d11, d12], [d12, d22]])


def regular_matrix_from_spectrum(spec: TransportSpec, omega, spectrum_value):
    """Assemble Re kappa^reg_mn(omega) from a value of I(omega)."""
    b, m = spec.beta, spec.mu
    base = spec.kappa / (2 * np.pi * b) * spectrum_value
    heat = (np.pi * spec.c / (6 * b ** 3)
            * (1 + (omega * b / (2 * np.pi)) ** 2) * spectrum_value)
    return np.array([[base, m * base], [m * base, heat + m ** 2 * base]])


@dataclass
class ConductivityResult:
    """Drude matrix plus per-frequency regular parts and diagnostics."""

    omega: np.ndarray
    drude: np.ndarray            # (2, 2)
    regular: np.ndarray          # (n_omega, 2, 2)
    I_values: np.ndarray         # (n_omega,)
    wf_drude_ratio: float
    wf_regular_ratio: np.ndarray  # (n_omega,)

    def __post_init__(self):
        if abs(self.drude[0, 1] - self.drude[1, 0]) != 0.0:
            raise ValueError("Drude matrix must be symmetric")
        if np.any(self.regular[:, 0, 1] != self.regular[:, 1, 0]):
            raise ValueError("regular parts must be symmetric")


def closed_form(spec: TransportSpec) -> ConductivityResult:
    """Exact conductivities on the requested frequency grid."""
    omegas = spec.omega_grid
    I_vals = np.array([inhomogeneity_spectrum(spec, w) for w in omegas])
    regular = np.stack([
        regular_matrix_from_spectrum(spec, w, I)
        for w, I in zip(omegas, I_vals)
    ])
    drude = drude_matrix(spec)
    te = thermal_electrical_parts(drude, regular, omegas, spec.beta, spec.mu,
                                  spec.c, spec.kappa)
    return ConductivityResult(omegas, drude, regular, I_vals,
                              te.wf_drude_ratio, te.wf_regular_ratio)


@dataclass
class ThermalElectrical:
    """Responses to temperature and chemical-potential gradients."""

    D_th: float
    kappa_th_reg: np.ndarray
    D_el: float
    sigma_el_reg: np.ndarray
    wf_drude_ratio: float
    wf_regular_ratio: np.ndarray


def thermal_electrical_parts(drude, regular, omegas, beta, mu, c, kappa):
    """Change of variables from (mu_1, mu_2) = (beta mu, -beta) responses.

    d/d(1/beta) = -mu beta^2 d/d mu_1 + beta^2 d/d mu_2 and
    d/d mu = beta d/d mu_1, applied to the rows of the matrices.
    """
    regular = np.asarray(regular)
    D_th = -mu * beta ** 2 * drude[1, 0] + beta ** 2 * drude[1, 1]
    D_el = beta * drude[0, 0]
    th = -mu * beta ** 2 * regular[:, 1, 0] + beta ** 2 * regular[:, 1, 1]
    el = beta * regular[:, 0, 0]
    wf_drude = (kappa / c) * D_th / D_el
    with np.errstate(divide="ignore", invalid="ignore"):
        wf_reg = (kappa / c) * th / el
    return ThermalElectrical(D_th, th, D_el, el, wf_drude, wf_reg)


def thermal_electrical(result: ConductivityResult, beta, mu, c=None, kappa=None):
    """Thermal/electrical conductivities from a conductivity-matrix result.

    ``c`` and ``kappa`` enter only the Wiedemann-Franz ratios; they default
    to 1 so the ratio fields reproduce (kappa/c) * ratio when supplied.
    """
    c = 1.0 if c is None else c
    kappa = 1.0 if kappa is None else kappa
    return thermal_electrical_parts(result.drude, result.regular, result.omega,
                                    beta, mu, c, kappa)


# ---------------------------------------------------------------------------
# contour-shifted sinh integrals (the analytic backbone of the Green-Kubo
# reduction) and the position-space kernel
# ---------------------------------------------------------------------------

def sinh_fourier(a, b, power):
    """int dxi e^{i b xi} / sinh^power(xi + i a) for power in {2, 4}.

    Closed form: power 4 gives pi (b^3 + 4 b)/3 * e^{b [a]} / (e^{b pi} - 1)
    and power 2 gives -2 pi b * the same exponential ratio, with [a] the
    representative of a in [0, pi).  The b -> 0 limits are 4/3 and -2.
    """
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    a = float(a)
    b = float(b)
    frac = a - math.pi * math.floor(a / math.pi)  # [a] in [0, pi)
    if min(frac, math.pi - frac) < 1e-10:
        raise PoleOnContour(f"a = {a} puts a pole on the integration contour")
    if b == 0.0:
        return complex(4.0 / 3.0) if power == 4 else complex(-2.0)
    ratio = math.exp(b * frac) / math.expm1(b * math.pi)
    if power == 4:
        return complex(math.pi * (b ** 3 + 4 * b) / 3 * ratio)
    return complex(-2 * math.pi * b * ratio)


def sinh_fourier_thermal_average(b, power, beta=1.0):
    """int_0^beta sinh_fourier(r pi tau / beta, b, power) d tau (either r).

    The exponential ratio integrates to beta / (b pi) independent of the
    sweep direction, so the average is beta (b^2 + 4)/3 for power 4 and
    -2 beta for power 2.  This is the analytic tau-integration step of the
    Green-Kubo reduction; the test suite checks it against quadrature.
    """
    if power == 4:
        return beta * (b * b + 4.0) / 3.0
    if power == 2:
        return -2.0 * beta
    raise ValueError("power must be 2 or 4")


@dataclass
class KernelData:
    """Velocity-kink correlation kernel k(y) and its spectrum.

    k(y) -> 1 as |y| -> infinity; the deviation delta_k = k - 1 is compactly
    concentrated and carries all regular-part information.
    """

    k_of_y: object
    p: np.ndarray
    delta_k_hat: np.ndarray
    support: float

    def __iter__(self):  # (k_of_y, spectrum) unpacking
        yield self.k_of_y
        yield (self.p, self.delta_k_hat)


def _kernel_nodes(spec: TransportSpec):
    """Gauss nodes/weights over the kink support in map coordinates."""
    yw = float(spec.fmap.forward(np.array([spec.kink_radius]))[0])
    yl = float(spec.fmap.forward(np.array([-spec.kink_radius]))[0])
    width = min(spec.W.width, 1.0)
    n_panels = max(48, int(math.ceil((yw - yl) / (0.5 * width))))
    return gauss_panels(yl, yw, n_panels, 10)


def kernel_k(spec: TransportSpec) -> KernelData:
    """Correlation of the velocity ratio with the mapped kink derivative.

    k(y) = int dy' [v(finv(y + y')) / vbar] d/dy'[-W(finv(y'))]; constant
    velocity gives k = 1 identically.  The returned spectrum samples
    delta_k(p), the Fourier transform of k - 1 (the unit background is the
    delta peak, removed analytically).
    """
    nodes, weights = _kernel_nodes(spec)
    finv = spec.fmap.inverse
    xk = finv(nodes)
    q = -spec.W(xk, order=1) * spec.v_line(xk) / spec.vbar  # d/dy'[-W(finv)]

    def k_of_y(y):
        y = np.asarray(y, dtype=float)
        pts = y[..., None] + nodes
        u = spec.velocity_ratio(pts.ravel()).reshape(pts.shape)
        return u @ (weights * q)

    yu = float(spec.fmap.forward(np.array([spec.v_line.domain.window]))[0])
    support = yu + max(abs(nodes[0]), abs(nodes[-1]))
    n = 4096
    ys = np.linspace(-support, support, n, endpoint=False)
    dy = ys[1] - ys[0]
    dk = k_of_y(ys) - 1.0
    p = 2 * np.pi * np.fft.fftfreq(n, d=dy)
    hat = np.fft.fft(dk) * dy * np.exp(-1j * p * ys[0])
    return KernelData(k_of_y, np.fft.fftshift(p), np.fft.fftshift(hat), support)


def delta_I1(spec: TransportSpec, omega, kernel: KernelData | None = None):
    """Re Delta I_1(omega): the regular spectral weight, Green-Kubo style.

    Evaluated in position space by integrating the kernel deviation along
    diagonals: Re Delta I_1 = vbar * int ds [k(vbar s) - 1] cos(omega s).
    Must agree with :func:`inhomogeneity_spectrum`.
    """
    if kernel is None:
        kernel = kernel_k(spec)
    s_max = kernel.support / spec.vbar

    def integrand(s):
        return (kernel.k_of_y(spec.vbar * np.asarray(s)) - 1.0) * np.cos(omega * np.asarray(s))

    quad = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=30000)
    return spec.vbar * integrate(integrand, -s_max, s_max, quad)


def green_kubo_regular(spec: TransportSpec, omega, kernel: KernelData | None = None):
    """Regular conductivity matrix from equilibrium correlations.

    Pipeline: (i) the imaginary-time and contour integrals are done
    analytically (:func:`sinh_fourier` / its thermal average), which turns
    the four-fold correlation integral into frequency weights; (ii) the
    remaining spatial structure is the position-space kernel integral
    Re Delta I_1(omega); (iii) the matrix is assembled with the same
    weights as the closed form, whose equivalence the reduction proves.
    """
    omega = float(omega)
    if omega == 0.0:
        raise OmegaZero("omega = 0 carries only the Drude delta peak")
    value = delta_I1(spec, omega, kernel=kernel)
    return regular_matrix_from_spectrum(spec, omega, value)


# ---------------------------------------------------------------------------
# dynamical route
# ---------------------------------------------------------------------------

_DELTA_MU = 1e-4


def _perturbed_scenarios(spec: TransportSpec):
    """Four line scenarios: central differences in mu_1 and mu_2 kinks.

    Channel 1 shifts beta*mu, channel 2 shifts -beta; profiles are rebuilt
    exactly (mu(x) = mu_1(x)/beta(x)) so the response includes every
    anomaly term.
    """
    window = max(spec.v_line.domain.window, spec.W.window)
    scenarios = {}
    for channel in (1, 2):
        for sgn in (+1, -1):
            eps = sgn * _DELTA_MU
            if channel == 1:
                beta_p = constant(spec.beta, Line(spec.beta, spec.beta, window),
                                  positivity_required=True)
                mu_p = affine(spec.W.base, scale=eps / spec.beta, offset=spec.mu,
                              name="mu perturbed")
            else:
                beta_p = affine(spec.W.base, scale=-eps, offset=spec.beta,
                                positivity_required=True, name="beta perturbed")
                mu_p = affine(reciprocal(beta_p), scale=spec.beta * spec.mu,
                              name="mu back-reaction")
            scenarios[(channel, sgn)] = Scenario.build_line(
                spec.v_line, beta_p, mu_p, c=spec.c, kappa=spec.kappa
            )
    return scenarios


def _response_windows(spec: TransportSpec, t):
    """x-intervals where the response integrand can be nonzero at time t."""
    A = max(spec.v_line.domain.window, spec.kink_radius) + 2 * spec.W.width
    f = spec.fmap
    fa, fb = (float(f.forward(np.array([-A]))[0]),
              float(f.forward(np.array([A]))[0]))
    vt = spec.vbar * t
    windows = []
    for shift in (+vt, -vt):  # minus / plus light-cone branches
        lo = float(f.inverse(np.array([fa + shift]))[0])
        hi = float(f.inverse(np.array([fb + shift]))[0])
        windows.append((lo, hi))
    windows.sort()
    if windows[0][1] >= windows[1][0]:  # overlapping: merge
        return [(windows[0][0], max(windows[0][1], windows[1][1]))]
    return windows


@dataclass
class _ResponseSamples:
    t_nodes: np.ndarray
    t_weights: np.ndarray
    kappa_t: np.ndarray   # (nt, 2, 2)
    plateau: np.ndarray   # (2, 2)
    t_end: float


def _response_samples(spec: TransportSpec, refine=1) -> _ResponseSamples:
    """Sample the response matrix kappa_mn(t) on a Gauss grid.

    kappa_mn(t) is the mu_n-derivative of the space-integrated growth rate
    of current m; it is frequency independent, so one sweep serves every
    omega.  After the fronts clear the inhomogeneity the response is
    constant: that plateau is the Drude matrix.
    """
    scenarios = _perturbed_scenarios(spec)
    A = max(spec.v_line.domain.window, spec.kink_radius) + 2 * spec.W.width
    t_end = 2.4 * A / spec.vbar
    dx = min(spec.W.width, 1.0) / (2.0 * refine)
    n_t_panels = int(math.ceil(t_end / (0.5 * dx)))
    t_nodes, t_weights = gauss_panels(0.0, t_end, n_t_panels, 12)

    kappa_t = np.zeros((t_nodes.size, 2, 2))
    for j, t in enumerate(t_nodes):
        segs = _response_windows(spec, t)
        xs, ws = [], []
        for lo, hi in segs:
            n_panels = max(8, int(math.ceil((hi - lo) / dx)))
            nx, wx = gauss_panels(lo, hi, n_panels, 12)
            xs.append(nx)
            ws.append(wx)
        x = np.concatenate(xs)
        w = np.concatenate(ws)
        for channel in (1, 2):
            dplus = mean_values_time_derivative(scenarios[(channel, +1)], x, t)
            dminus = mean_values_time_derivative(scenarios[(channel, -1)], x, t)
            # dheat, dcharge per scenario; rows are current index m
            heat = (dplus[0] - dminus[0]) @ w / (2 * _DELTA_MU)
            charge = (dplus[1] - dminus[1]) @ w / (2 * _DELTA_MU)
            kappa_t[j, 0, channel - 1] = charge
            kappa_t[j, 1, channel - 1] = heat
    settled = t_nodes > 0.8 * t_end
    plateau = (t_weights[settled, None, None] * kappa_t[settled]).sum(axis=0)
    plateau /= t_weights[settled].sum()
    return _ResponseSamples(t_nodes, t_weights, kappa_t, plateau, t_end)


def dynamical_drude(spec: TransportSpec, check_resolution=False,
                    samples: _ResponseSamples | None = None):
    """Drude matrix as the late-time plateau of the quench response.

    The constant-in-time component of kappa_mn(t) is the coefficient of the
    delta peak; it is read off by averaging over the settled stretch after
    the fronts have left the inhomogeneity window.
    """
    if samples is None:
        samples = _response_samples(spec)
    if check_resolution:
        fine = _response_samples(spec, refine=2)
        drift = np.max(np.abs(fine.plateau - samples.plateau))
        if drift > 5e-7 * max(1.0, np.max(np.abs(samples.plateau))):
            raise GridUnderResolved(f"Drude plateau moved by {drift:.2e} on refinement")
    return samples.plateau


def dynamical_conductivity(spec: TransportSpec, omega, check_resolution=False,
                           samples: _ResponseSamples | None = None):
    """Regular parts from the damped Fourier transform of the response.

    The transform \int_0^inf e^{(i omega - eta) t} kappa(t) dt is evaluated
    with the sampled response plus the analytic plateau tail, for a ladder
    of dampings eta; polynomial extrapolation to eta = 0 removes both the
    damping bias and the leaking Drude pole.
    """
    omega = float(omega)
    if omega == 0.0:
        raise OmegaZero("omega = 0 carries only the Drude delta peak")
    if samples is None:
        samples = _response_samples(spec)

    def damped(eta, smp):
        phase = np.exp((1j * omega - eta) * smp.t_nodes)
        num = np.tensordot(smp.t_weights * phase, smp.kappa_t, axes=(0, 0))
        tail = smp.plateau * np.exp((1j * omega - eta) * smp.t_end) / (eta - 1j * omega)
        return np.real(num + tail)

    etas = np.array([omega / 50, omega / 100, omega / 200])

    def extrapolate(smp):
        vals = np.stack([damped(e, smp) for e in etas])
        out = np.empty((2, 2))
        for i in range(2):
            for j in range(2):
                out[i, j] = np.polyfit(etas, vals[:, i, j], 2)[-1]
        return out

    result = extrapolate(samples)
    if check_resolution:
        fine = _response_samples(spec, refine=2)
        drift = np.max(np.abs(extrapolate(fine) - result))
        if drift > 1e-3 * max(np.max(np.abs(result)), 1e-6):
            raise GridUnderResolved(f"regular parts moved by {drift:.2e} on refinement")
    return result
