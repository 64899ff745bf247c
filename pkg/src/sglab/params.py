"""Setup parameters for a single-magnet spin-splitting stage.

A run is described by the particle (mass, magnitude of the magnetic moment),
the magnet (uniform field component along z, linear gradient, transit time)
and the incoming Gaussian packet (width, longitudinal speed along y).  All
quantities are stored in SI units together with the value of hbar in use;
passing hbar = 1 (and unit mass, moment, width) gives dimensionless runs on
the exact same code path.

The derived quantities bundle everything downstream physics depends on:
the transverse splitting speed ``vz = moment * gradient * tau / mass``, the
wavenumbers ``ky``/``kz``, the two dimensionless separation groups

    p_sep = vz * tau / sigma0          (position separation at magnet exit)
    k_sep = mass * vz * sigma0 / hbar  (momentum separation, in width units)

the gradient-to-uniform field ratio and the natural spreading time
``t_spread = 2 * mass * sigma0**2 / hbar``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

HBAR_SI = 1.054571817e-34
"""Reduced Planck constant, J s."""

NEUTRON_MASS = 1.674927e-27
"""Default particle mass, kg."""

NEUTRON_MOMENT = 9.6623651e-27
"""Default magnetic moment magnitude, J/T."""


@dataclass(frozen=True)
class SGParams:
    """Physical inputs for one splitting stage.

    Parameters
    ----------
    mass : float
        Particle mass, kg.  Must be positive.
    moment : float
        Magnitude of the magnetic moment, J/T.  The sign convention of the
        coupling lives in the dynamics (spin-up deflects toward +z), so the
        stored value is a magnitude and must be positive.
    b0 : float
        Uniform field component along z inside the magnet, T.  Nonnegative.
    gradient : float
        Field gradient along z inside the magnet, T/m.  Nonnegative.
    tau : float
        Transit time through the magnet, s.  Nonnegative.
    sigma0 : float
        Initial Gaussian width of the packet, m.  Positive.
    vy : float
        Longitudinal beam speed along y, m/s.  Nonnegative.
    hbar : float
        Reduced Planck constant in the unit system of the other fields.
    """

    mass: float = NEUTRON_MASS
    moment: float = NEUTRON_MOMENT
    b0: float = 0.0
    gradient: float = 0.0
    tau: float = 0.0
    sigma0: float = 1e-4
    vy: float = 0.0
    hbar: float = HBAR_SI

    def __post_init__(self) -> None:
        checks = [
            ("mass", self.mass, self.mass > 0),
            ("moment", self.moment, self.moment > 0),
            ("b0", self.b0, self.b0 >= 0),
            ("gradient", self.gradient, self.gradient >= 0),
            ("tau", self.tau, self.tau >= 0),
            ("sigma0", self.sigma0, self.sigma0 > 0),
            ("vy", self.vy, self.vy >= 0),
            ("hbar", self.hbar, self.hbar > 0),
        ]
        for name, value, ok in checks:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value) or not ok:
                raise ValueError(f"invalid {name} = {value!r}")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from :class:`SGParams`, SI units unless noted."""

    vz: float
    """Transverse speed acquired over the transit, m/s."""
    ky: float
    """Longitudinal wavenumber mass*vy/hbar, 1/m."""
    kz: float
    """Transverse wavenumber mass*vz/hbar, 1/m."""
    p_sep: float
    """Position separation group vz*tau/sigma0, dimensionless."""
    k_sep: float
    """Momentum separation group mass*vz*sigma0/hbar, dimensionless."""
    field_ratio: float
    """gradient*sigma0/b0, dimensionless; +inf when b0 = 0."""
    t_spread: float
    """Packet spreading time 2*mass*sigma0**2/hbar, s."""


def derive(params: SGParams) -> DerivedParams:
    """Compute the derived quantities for one parameter set."""
    vz = params.moment * params.gradient * params.tau / params.mass
    ky = params.mass * params.vy / params.hbar
    kz = params.mass * vz / params.hbar
    p_sep = vz * params.tau / params.sigma0
    k_sep = params.mass * vz * params.sigma0 / params.hbar
    if params.b0 > 0:
        field_ratio = params.gradient * params.sigma0 / params.b0
    else:
        field_ratio = math.inf
    t_spread = 2.0 * params.mass * params.sigma0**2 / params.hbar
    return DerivedParams(vz, ky, kz, p_sep, k_sep, field_ratio, t_spread)


def natural(b0: float = 0.0, gradient: float = 0.0, tau: float = 0.0,
            vy: float = 0.0) -> SGParams:
    """Dimensionless parameter set with mass = moment = sigma0 = hbar = 1."""
    return SGParams(mass=1.0, moment=1.0, b0=b0, gradient=gradient,
                    tau=tau, sigma0=1.0, vy=vy, hbar=1.0)


def neutron(b0: float, gradient: float, tau: float, sigma0: float,
            vy: float) -> SGParams:
    """SI parameter set using the default neutron mass and moment."""
    return SGParams(b0=b0, gradient=gradient, tau=tau, sigma0=sigma0, vy=vy)


def from_groups(p_sep: float, k_sep: float, b0: float = 0.0,
                vy: float = 0.0) -> SGParams:
    """Dimensionless parameter set realizing given separation groups.

    In natural units vz = k_sep and tau = p_sep / k_sep, so the gradient is
    k_sep**2 / p_sep.  Both groups must be positive, or both zero (the
    physics ties them: a nonzero ``p_sep`` needs a nonzero splitting speed).
    """
    if p_sep == 0.0 and k_sep == 0.0:
        return natural(b0=b0, tau=1.0, vy=vy)
    if p_sep <= 0.0 or k_sep <= 0.0:
        raise ValueError(
            f"separation groups must both be positive or both zero, "
            f"got p_sep={p_sep!r} k_sep={k_sep!r}")
    return natural(b0=b0, gradient=k_sep**2 / p_sep, tau=p_sep / k_sep, vy=vy)


def to_natural(params: SGParams) -> tuple[SGParams, float, float]:
    """Rescale to units where mass = hbar = sigma0 = moment = 1.

    Returns ``(scaled, length_scale, time_scale)`` where lengths divide by
    ``length_scale = sigma0`` and times divide by
    ``time_scale = mass * sigma0**2 / hbar``.  The separation groups and
    every dimensionless metric are invariant under this map.
    """
    ls = params.sigma0
    ts = params.mass * params.sigma0**2 / params.hbar
    field_to_energy = params.moment * ts / params.hbar
    return (
        SGParams(
            mass=1.0,
            moment=1.0,
            b0=params.b0 * field_to_energy,
            gradient=params.gradient * ls * field_to_energy,
            tau=params.tau / ts,
            sigma0=1.0,
            vy=params.vy * ts / ls,
            hbar=1.0,
        ),
        ls,
        ts,
    )
