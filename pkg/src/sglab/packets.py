"""Analytic Gaussian branch packets for the splitting stage.

The incoming state is a product of three identical one dimensional Gaussians
of width ``sigma0`` carrying longitudinal momentum ``hbar*ky`` along y.  In
the linear-gradient field the two spin branches acquire opposite transverse
momenta ``+-hbar*kz`` and opposite center displacements ``+-vz*tau/2`` while
the envelope spreads through the complex width

    s_t = sigma0 * (1 + i*hbar*t / (2*mass*sigma0**2)),   sigma_t = |s_t|.

Each branch wave function stays an exact product of one dimensional complex
Gaussians at all times, here represented by :class:`GaussianFactor`:

    f(u) = (2*pi*s**2)**(-1/4) * exp(-(u - c)**2 / (4*sigma0*s))
                               * exp(i*(k*u + phase))

The full packet is ``f_x(x) * f_y(y) * f_z(z)``.  ``psi_at_exit`` evaluates
the branch state at the magnet exit (time ``tau``), ``psi_free`` the same
branch after an additional free flight ``t1 >= 0``; the exit form is exactly
the ``t1 = 0`` case of the free form and shares its code path.

Conventions.  The Plus branch (spin up along z) deflects toward +z.  The
phase constant common to both branches and the branch-odd constant
``moment*b0*tau/hbar`` match the standard printed solutions for this setup;
constants drop out of every overlap modulus, so all metrics downstream are
insensitive to them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .params import SGParams, derive


class Branch(enum.Enum):
    """Spin branch label; the sign is the z deflection direction."""

    PLUS = +1
    MINUS = -1

    @property
    def sign(self) -> int:
        return self.value


@dataclass(frozen=True)
class ComplexWidth:
    """Complex Gaussian width parameter at a given time."""

    s: complex

    @property
    def sigma(self) -> float:
        """Physical (modulus) width."""
        return abs(self.s)


def complex_width(t: float, params: SGParams) -> ComplexWidth:
    """Width parameter s_t after free spreading for time ``t >= 0``."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    u = params.hbar * t / (2.0 * params.mass * params.sigma0**2)
    return ComplexWidth(params.sigma0 * (1.0 + 1j * u))


@dataclass(frozen=True)
class GaussianFactor:
    """One dimensional complex Gaussian factor of a branch packet."""

    center: float
    s: complex
    sigma0: float
    wavenumber: float = 0.0
    phase: float = 0.0

    @property
    def sigma(self) -> float:
        return abs(self.s)

    def __call__(self, u):
        u = np.asarray(u)
        pref = (2.0 * np.pi * self.s**2) ** (-0.25)
        envelope = np.exp(-((u - self.center) ** 2) / (4.0 * self.sigma0 * self.s))
        return pref * envelope * np.exp(1j * (self.wavenumber * u + self.phase))

    def modulus(self, u):
        """|f(u)| without evaluating the oscillatory phase."""
        u = np.asarray(u)
        pref = (2.0 * np.pi * self.sigma**2) ** (-0.25)
        return pref * np.exp(-((u - self.center) ** 2) / (4.0 * self.sigma**2))

    @property
    def chirp_rate(self) -> float:
        """Local wavenumber growth per unit distance from the center.

        The envelope contributes a position dependent phase
        Im(-(u-c)**2/(4*sigma0*s)); its derivative grows linearly away from
        the center at this rate.  Needed by quadrature node-density guards.
        """
        return 2.0 * abs((1.0 / (4.0 * self.sigma0 * self.s)).imag)


def initial_factors(params: SGParams) -> tuple[GaussianFactor, ...]:
    """Factors of the packet entering the magnet (t = 0)."""
    d = derive(params)
    s0 = params.sigma0 + 0j
    return (
        GaussianFactor(0.0, s0, params.sigma0),
        GaussianFactor(0.0, s0, params.sigma0, wavenumber=d.ky),
        GaussianFactor(0.0, s0, params.sigma0),
    )


def branch_factors(params: SGParams, t1: float,
                   branch: Branch) -> tuple[GaussianFactor, ...]:
    """Factors of one branch after transit tau plus free flight t1 >= 0.

    The y factor is branch independent.  All constant phases are carried by
    the z factor: the kinetic-plus-potential constant common to both
    branches and the branch-odd uniform-field phase.
    """
    if t1 < 0:
        raise ValueError(f"free flight time must be nonnegative, got {t1!r}")
    d = derive(params)
    sign = branch.sign
    total = params.tau + t1
    s = complex_width(total, params).s
    phase_const = (sign * params.moment * params.b0 * params.tau / params.hbar
                   + params.mass**2 * d.vz**2 * params.tau**2
                   / (6.0 * params.hbar**2))
    fx = GaussianFactor(0.0, s, params.sigma0)
    fy = GaussianFactor(params.vy * total, s, params.sigma0, wavenumber=d.ky,
                        phase=-d.ky * params.vy * total / 2.0)
    fz = GaussianFactor(sign * (d.vz * params.tau / 2.0 + d.vz * t1), s,
                        params.sigma0, wavenumber=sign * d.kz,
                        phase=-d.kz * d.vz * t1 / 2.0 - phase_const)
    return fx, fy, fz


def initial_packet(x, y, z, params: SGParams):
    """Evaluate the incoming packet on broadcastable coordinate arrays."""
    fx, fy, fz = initial_factors(params)
    return fx(x) * fy(y) * fz(z)


def psi_free(x, y, z, t1: float, branch: Branch, params: SGParams):
    """Evaluate one branch after free flight ``t1`` past the magnet exit."""
    fx, fy, fz = branch_factors(params, t1, branch)
    return fx(x) * fy(y) * fz(z)


def psi_at_exit(x, y, z, branch: Branch, params: SGParams):
    """Evaluate one branch at the magnet exit (free flight of zero)."""
    return psi_free(x, y, z, 0.0, branch, params)


def packet_center(params: SGParams, t1: float, branch: Branch) -> np.ndarray:
    """Envelope center (x, y, z) of one branch at exit plus ``t1``."""
    fx, fy, fz = branch_factors(params, t1, branch)
    return np.array([fx.center, fy.center, fz.center])


def peak_momentum(branch: Branch, params: SGParams) -> np.ndarray:
    """Momentum expectation (0, mass*vy, +-mass*vz) of one branch."""
    d = derive(params)
    return np.array([0.0, params.mass * params.vy,
                     branch.sign * params.mass * d.vz])
