"""Exact expectation values: densities, currents, correlators, fermions.

Everything here evaluates closed forms.  A :class:`Scenario` packages the
three input profiles with the maps and constants derived from them; the
observable functions then combine profile values at the two light-cone
points with the anomaly densities.  No operator algebra is represented --
only the resulting c-number expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CoincidentPoints, CouplingOutOfRange
from .circlemaps import (
    CircleMap, GaugeFunction, LineMap, ScenarioConstants,
    build_f, build_g, build_h, build_line_map,
    velocity_anomaly, temperature_anomaly,
)
from .lightcone import LightConeFrame
from .profiles import Circle, Line, Profile, product

_COINCIDENT_TOL = 1e-8


@dataclass
class Scenario:
    """Profiles plus derived maps/constants for one non-equilibrium setup.

    ``g_scale`` rescales the internal thermal-map normalization (g and
    v0 beta0 together); physical outputs must not depend on it, and the
    verification suite checks exactly that.
    """

    v: Profile
    beta: Profile
    mu: Profile
    constants: ScenarioConstants
    f: object                      # CircleMap or LineMap
    g: object | None
    h: GaugeFunction | None
    frame: LightConeFrame
    g_scale: float = 1.0

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, v, beta, mu, c=1.0, kappa=1.0):
        """Circle scenario: maps and constants from the profile averages."""
        if not isinstance(v.domain, Circle):
            raise ValueError("Scenario.build expects circle profiles")
        L = v.domain.period
        f, v0 = build_f(v)
        g, v0b0 = build_g(v, beta)
        h, mu0 = build_h(v, beta, mu)
        constants = ScenarioConstants(v0, v0b0 / v0, mu0, c, kappa, L)
        frame = LightConeFrame(f, v0, period=L)
        return cls(v, beta, mu, constants, f, g, h, frame)

    @classmethod
    def build_line(cls, v, beta, mu, c=1.0, kappa=1.0):
        """Line scenario (thermodynamic limit).

        The velocity must reach the same asymptote vbar on both sides; the
        thermal map exists only when v*beta does too (it is not needed for
        densities and currents).
        """
        if not isinstance(v.domain, Line):
            raise ValueError("Scenario.build_line expects line profiles")
        if abs(v.domain.value_left - v.domain.value_right) > 1e-12:
            raise ValueError("line scenario needs equal velocity asymptotes")
        vbar = v.domain.value_left
        f = build_line_map(v, vbar)
        vb = product(v, beta, name="v*beta")
        g = None
        v0b0 = vbar * 0.5 * (beta.domain.value_left + beta.domain.value_right)
        if abs(vb.domain.value_left - vb.domain.value_right) <= 1e-12 * abs(vb.domain.value_left):
            v0b0 = vb.domain.value_left
            g = build_line_map(vb, v0b0)
        constants = ScenarioConstants(vbar, v0b0 / vbar, 0.0, c, kappa, math.inf)
        frame = LightConeFrame(f, vbar, period=None)
        return cls(v, beta, mu, constants, f, g, None, frame)

    # -- helpers ------------------------------------------------------------

    @property
    def on_circle(self):
        return isinstance(self.v.domain, Circle)

    def reduce(self, x):
        """Fold a light-cone point into the fundamental domain (circle only)."""
        if not self.on_circle:
            return x
        L = self.constants.L
        return (np.asarray(x) + 0.5 * L) % L - 0.5 * L

    def rescaled(self, lam_f=1.0, lam_g=1.0):
        """Same physics, different internal (v0, beta0) normalization."""
        return replace(self, frame=self.frame.rescaled(lam_f),
                       g_scale=self.g_scale * lam_g)

    def g_lift(self, x):
        """Unreduced thermal-map lift (winding kept), including the scale."""
        if self.g is None:
            raise ValueError("scenario has no thermal map g")
        return self.g_scale * self.g.forward(x)

    @property
    def v0b0(self):
        return self.g_scale * self.constants.v0 * self.constants.beta0

    def flux_energy(self, xr):
        """F(x) = pi c / 6 beta^2 + kappa mu^2 / 2 pi - (beta anomaly)."""
        cst = self.constants
        b = self.beta(xr)
        m = self.mu(xr)
        return (np.pi * cst.c / (6 * b * b)
                + cst.kappa * m * m / (2 * np.pi)
                - temperature_anomaly(self.v, self.beta, cst.c, xr))

    def flux_energy_slope(self, xr):
        """d/dx of :meth:`flux_energy` from closed-form profile derivatives."""
        cst = self.constants
        v, v1, v2 = self.v(xr), self.v(xr, order=1), self.v(xr, order=2)
        b, b1, b2, b3 = (self.beta(xr), self.beta(xr, order=1),
                         self.beta(xr, order=2), self.beta(xr, order=3))
        m, m1 = self.mu(xr), self.mu(xr, order=1)
        base = -np.pi * cst.c * b1 / (3 * b ** 3) + cst.kappa * m * m1 / np.pi
        # derivative of the curvature bracket in the beta anomaly
        br = b2 / b - 0.5 * (b1 / b) ** 2 + (v1 / v) * (b1 / b)
        dbr = (b3 / b - b2 * b1 / b ** 2
               - (b1 / b) * (b2 / b - (b1 / b) ** 2)
               + (v2 / v - (v1 / v) ** 2) * (b1 / b)
               + (v1 / v) * (b2 / b - (b1 / b) ** 2))
        danom = -cst.c / (12 * np.pi) * (2 * v * v1 * br + v * v * dbr)
        return base - danom

    def flux_charge(self, xr):
        """G(x) = kappa mu / pi."""
        return self.constants.kappa * self.mu(xr) / np.pi

    def flux_charge_slope(self, xr):
        return self.constants.kappa * self.mu(xr, order=1) / np.pi


def mean_values(s: Scenario, x, t):
    """Energy density, heat current, charge density, charge current.

    Vectorised over broadcastable (x, t).  The light-cone points feed the
    flux functions; the velocity anomaly subtracts from the energy density
    at the observation point.
    """
    x = np.asarray(x, dtype=float)
    xm, xp = s.frame.coordinates(x, t)
    rm, rp = s.reduce(xm), s.reduce(xp)
    Fm, Fp = s.flux_energy(rm), s.flux_energy(rp)
    Gm, Gp = s.flux_charge(rm), s.flux_charge(rp)
    vx = s.v(s.reduce(x))
    anomaly = velocity_anomaly(s.v, s.constants.c, s.reduce(x))
    energy = (Fm + Fp) / (2 * vx) - anomaly / vx
    heat = 0.5 * (Fm - Fp)
    density = (Gm + Gp) / (2 * vx)
    charge = 0.5 * (Gm - Gp)
    return energy, heat, density, charge


def mean_values_time_derivative(s: Scenario, x, t):
    """Exact d/dt of the heat and charge currents (via the characteristics).

    d/dt of any u(x tilde) is -sign * v(x tilde) u'(x tilde), so no finite
    differencing is needed; used by the dynamical conductivity route.
    """
    x = np.asarray(x, dtype=float)
    xm, xp = s.frame.coordinates(x, t)
    rm, rp = s.reduce(xm), s.reduce(xp)
    dheat = -0.5 * (s.v(rm) * s.flux_energy_slope(rm)
                    + s.v(rp) * s.flux_energy_slope(rp))
    dcharge = -0.5 * (s.v(rm) * s.flux_charge_slope(rm)
                      + s.v(rp) * s.flux_charge_slope(rp))
    return dheat, dcharge


_CC_KINDS = ("JJ_heat", "jj_charge", "Jj", "jJ")


def current_current(s: Scenario, kind, x1, t1, x2, t2):
    """Connected current-current correlator in the thermodynamic limit.

    kind: 'JJ_heat' (heat-heat), 'jj_charge' (charge-charge), 'Jj'
    (heat-charge), 'jJ' (charge-heat).  Thermal-map differences are taken
    on the unreduced lift so arbitrary time separations wind correctly;
    profile factors use the folded points.
    """
    if kind not in _CC_KINDS:
        raise ValueError(f"kind must be one of {_CC_KINDS}")
    cst = s.constants
    a1m, a1p = s.frame.coordinates(np.asarray(x1, dtype=float), t1)
    a2m, a2p = s.frame.coordinates(np.asarray(x2, dtype=float), t2)
    total = 0.0
    for a1, a2 in ((a1m, a2m), (a1p, a2p)):
        arg = np.pi * (s.g_lift(a1) - s.g_lift(a2)) / s.v0b0
        if np.any(np.abs(arg) < _COINCIDENT_TOL):
            raise CoincidentPoints(
                "correlator evaluated at coincident light-cone points"
            )
        b1, b2 = s.beta(s.reduce(a1)), s.beta(s.reduce(a2))
        sh2 = np.sinh(arg) ** 2
        if kind == "JJ_heat":
            m1, m2 = s.mu(s.reduce(a1)), s.mu(s.reduce(a2))
            term = (np.pi ** 2 * cst.c / (8 * b1 ** 2 * b2 ** 2 * sh2 ** 2)
                    - cst.kappa * m1 * m2 / (4 * b1 * b2 * sh2))
        elif kind == "jj_charge":
            term = -cst.kappa / (4 * b1 * b2 * sh2)
        elif kind == "Jj":
            m1 = s.mu(s.reduce(a1))
            term = -cst.kappa * m1 / (4 * b1 * b2 * sh2)
        else:  # jJ
            m2 = s.mu(s.reduce(a2))
            term = -cst.kappa * m2 / (4 * b1 * b2 * sh2)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# interacting-fermion data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LuttingerCouplings:
    """Dimensionless interaction strengths and the bare Fermi velocity."""

    g2: float
    g4: float
    vF: float = 1.0

    def __post_init__(self):
        if not self.vF > 0:
            raise CouplingOutOfRange("Fermi velocity must be positive")
        if not abs(self.g2) < 2.0 + self.g4:
            raise CouplingOutOfRange(
                f"need |g2| < 2 + g4, got g2={self.g2}, g4={self.g4}"
            )


@dataclass(frozen=True)
class PrimaryFieldSpec:
    """Conformal weights and gauge charges of a primary field."""

    delta_plus: float
    delta_minus: float
    tau_plus: float
    tau_minus: float
    ell_tilde: float = 1.0

    def check_sugawara(self, kappa, tol=1e-12):
        """(tau)^2 = 2 kappa Delta must hold for both chiralities."""
        for tau, delta in ((self.tau_plus, self.delta_plus),
                           (self.tau_minus, self.delta_minus)):
            if abs(tau * tau - 2 * kappa * delta) > tol * max(1.0, abs(delta)):
                raise ValueError(
                    f"weights violate the Sugawara relation: tau^2={tau*tau}, "
                    f"2*kappa*delta={2*kappa*delta}"
                )


def luttinger_params(couplings: LuttingerCouplings):
    """Renormalized velocity and interaction parameter (v, K)."""
    g2, g4, vF = couplings.g2, couplings.g4, couplings.vF
    v = vF * math.sqrt((1 + g4 / 2) ** 2 - (g2 / 2) ** 2)
    K = math.sqrt((1 + (g4 - g2) / 2) / (1 + (g4 + g2) / 2))
    return v, K


def luttinger_field(K, r, annihilation=True, ell_tilde=1.0) -> PrimaryFieldSpec:
    """Weights of the renormalized fermion field of chirality r = +-1.

    ``annihilation`` selects the field whose gauge charges are
    -(1 +- r K)/2; the adjoint flips their sign.  Both satisfy the Sugawara
    relation with kappa = K, which is checked here.
    """
    if r not in (+1, -1):
        raise ValueError("chirality r must be +1 or -1")
    dp = (1 + r * K) ** 2 / (8 * K)
    dm = (1 - r * K) ** 2 / (8 * K)
    sign = -1.0 if annihilation else 1.0
    field = PrimaryFieldSpec(dp, dm, sign * (1 + r * K) / 2,
                             sign * (1 - r * K) / 2, ell_tilde)
    field.check_sugawara(K)
    return field


def fermion_two_point(s: Scenario, field: PrimaryFieldSpec, x1, t1, x2, t2,
                      r=+1, r_prime=None):
    """Fermion two-point function <psi^+_r(x1;t1) psi^-_r'(x2;t2)>.

    Vanishes identically for r != r_prime.  The gauge phase uses the exact
    decomposition mu/v = h' + (mu0/v0) g', so the integral between
    light-cone points is a difference of map values; the two sinh factors
    are raised to 2*Delta with the principal branch.
    """
    if r_prime is None:
        r_prime = r
    if r != r_prime:
        return 0.0 + 0.0j
    if s.g is None or s.h is None:
        raise ValueError("fermion correlators need the thermal and gauge maps")
    field.check_sugawara(s.constants.kappa)
    cst = s.constants
    ell = field.ell_tilde
    a1m, a1p = s.frame.coordinates(np.asarray(x1, dtype=float), t1)
    a2m, a2p = s.frame.coordinates(np.asarray(x2, dtype=float), t2)

    def mu_over_v_integral(b, a):
        # int_a^b mu/v dx' on the lift
        return (s.h(b) - s.h(a)
                + (cst.mu0 / cst.v0) * (s.g.forward(b) - s.g.forward(a)))

    phase = np.exp(1j * (field.tau_plus * mu_over_v_integral(a1m, a2m)
                         - field.tau_minus * mu_over_v_integral(a1p, a2p)))
    v1, v2 = s.v(s.reduce(x1)), s.v(s.reduce(x2))
    out = phase / (2 * np.pi * ell)
    for (b1x, b2x, delta, unit) in (
        (a1m, a2m, field.delta_plus, 1j),
        (a1p, a2p, field.delta_minus, -1j),
    ):
        if delta == 0:
            continue
        arg = np.pi * (s.g_lift(b1x) - s.g_lift(b2x)) / s.v0b0
        if np.any(np.abs(arg) < _COINCIDENT_TOL):
            raise CoincidentPoints("fermion correlator at coincident points")
        root = np.sqrt(v1 * v2 * s.beta(s.reduce(b1x)) * s.beta(s.reduce(b2x)))
        base = unit / (root / (np.pi * ell) * np.sinh(arg))
        out = out * base ** (2 * delta)
    return out


# ---------------------------------------------------------------------------
# homogeneous equilibrium reference values (infinite volume)
# ---------------------------------------------------------------------------

_EQ_KINDS = ("T_mean", "J_mean", "TT_same", "TT_cross", "JJ_same", "JJ_cross",
             "TJ_same", "TJ_cross")


def equilibrium_reference(kind, separation, v0, beta0, mu0, c, kappa):
    """Tabulated equilibrium expectations of the chiral densities.

    One-point: 'T_mean', 'J_mean'.  Connected two-point at spatial
    separation d: 'TT_same', 'JJ_same', 'TJ_same' for equal chirality and
    the '_cross' variants (identically zero) for opposite chirality.
    """
    if kind not in _EQ_KINDS:
        raise ValueError(f"kind must be one of {_EQ_KINDS}")
    vb = v0 * beta0
    if kind == "T_mean":
        return math.pi * c / (12 * vb ** 2) + kappa * mu0 ** 2 / (4 * math.pi * v0 ** 2)
    if kind == "J_mean":
        return kappa * mu0 / (2 * math.pi * v0)
    if kind.endswith("_cross"):
        return 0.0
    d = separation
    arg = math.pi * d / vb
    if abs(arg) < _COINCIDENT_TOL:
        raise CoincidentPoints("two-point reference at coincident points")
    sh2 = math.sinh(arg) ** 2
    if kind == "TT_same":
        return (math.pi ** 2 * c / (8 * vb ** 4 * sh2 ** 2)
                - kappa * mu0 ** 2 / (v0 ** 2 * 4 * vb ** 2 * sh2))
    if kind == "JJ_same":
        return -kappa / (4 * vb ** 2 * sh2)
    # TJ_same
    return -kappa * mu0 / (v0 * 4 * vb ** 2 * sh2)
