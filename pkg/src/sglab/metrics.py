"""Overlap metrics and the no-signaling constraint between spin branches.

Two routes are kept deliberately separate for every metric.  The closed
forms express everything through the separation groups,

    I   = exp(-p_sep**2/8 - 2*k_sep**2)        branch distinguishability
    M_t = exp(-vz**2*(tau + 2*t1)**2 / (8*sigma_{tau+t1}**2))
    M_s = exp(-2*k_sep**2)                      late-time limit of M_t

while the numeric route integrates the analytic branch packets directly with
a fixed-node trapezoid rule (node-halving Richardson check attached).  The
closed inner product is time invariant after exit, the position-space
overlap M_t falls monotonically to its saturated value M_s, and

    M_s >= I    with equality exactly at p_sep = 0,

which is the operational bound audited throughout this package: were the
saturated overlap ever smaller than the distinguishability, downstream spin
statistics could signal.  Violations beyond the comparison slack are
reported as the Forbidden regime and treated as implementation bugs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ForbiddenRegimeError, QuadratureConvergenceError
from .packets import Branch, GaussianFactor, branch_factors, complex_width
from .params import SGParams, derive

EXP_UNDERFLOW = -700.0
"""Exponent below which closed forms return exactly zero and flag it."""

CONSTRAINT_SLACK = 1e-12
"""Absolute slack used in every >= comparison between metrics."""


def _exp_flagged(arg: float) -> tuple[float, bool]:
    if arg < EXP_UNDERFLOW:
        return 0.0, True
    return math.exp(arg), False


# ---------------------------------------------------------------------------
# closed forms


def inner_log(params: SGParams) -> float:
    """Log of the branch distinguishability, -p_sep**2/8 - 2*k_sep**2."""
    d = derive(params)
    return -d.p_sep**2 / 8.0 - 2.0 * d.k_sep**2


def inner_product_closed(params: SGParams) -> float:
    """Modulus of the exit-time branch inner product (time invariant)."""
    return _exp_flagged(inner_log(params))[0]


def inner_product_complex(params: SGParams) -> complex:
    """Inner product <psi_plus | psi_minus> including its constant phase.

    Only the uniform-field phase survives the conjugation, so the argument
    is 2*moment*b0*tau/hbar.
    """
    phase = 2.0 * params.moment * params.b0 * params.tau / params.hbar
    return inner_product_closed(params) * complex(math.cos(phase),
                                                  math.sin(phase))


def overlap_m_log(params: SGParams, t1: float) -> float:
    """Log of the position-space modulus overlap after free flight t1."""
    if t1 < 0:
        raise ValueError(f"free flight time must be nonnegative, got {t1!r}")
    d = derive(params)
    sigma = complex_width(params.tau + t1, params).sigma
    return -d.vz**2 * (params.tau + 2.0 * t1) ** 2 / (8.0 * sigma**2)


def overlap_M_closed(params: SGParams, t1: float) -> float:
    """Position-space overlap of the branch moduli after free flight t1."""
    return _exp_flagged(overlap_m_log(params, t1))[0]


def m_saturated_log(params: SGParams) -> float:
    return -2.0 * derive(params).k_sep**2


def M_saturated(params: SGParams) -> float:
    """Late-time limit of the position-space overlap, exp(-2*k_sep**2)."""
    return _exp_flagged(m_saturated_log(params))[0]


def metrics_underflowed(params: SGParams, t1: float = 0.0) -> bool:
    """True when any closed-form metric at this point underflowed to zero."""
    return (inner_log(params) < EXP_UNDERFLOW
            or m_saturated_log(params) < EXP_UNDERFLOW
            or overlap_m_log(params, t1) < EXP_UNDERFLOW)


# ---------------------------------------------------------------------------
# quadrature route


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the fixed-node trapezoid quadratures.

    The window on each axis covers both envelope centers plus
    ``extent_widths`` physical widths on either side.  ``nodes`` is the
    baseline node count per axis; it doubles automatically until the node
    spacing resolves the integrand's largest local wavenumber
    (spacing * wavenumber < 0.5).  Every result is recomputed with halved
    spacing; a shift beyond ``richardson_tol`` raises
    :class:`~sglab.errors.QuadratureConvergenceError`.
    """

    extent_widths: float = 12.0
    nodes: int = 2048
    richardson_tol: float = 1e-9
    max_doublings: int = 10

    def __post_init__(self) -> None:
        if self.extent_widths < 6.0:
            raise ValueError(f"extent_widths must be >= 6, got {self.extent_widths!r}")
        if self.nodes < 64:
            raise ValueError(f"nodes must be >= 64, got {self.nodes!r}")
        if self.richardson_tol <= 0:
            raise ValueError("richardson_tol must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()


def _trapezoid(values: np.ndarray, dx: float):
    return dx * (values.sum() - 0.5 * (values[0] + values[-1]))


def _axis_window(f1: GaussianFactor, f2: GaussianFactor,
                 spec: QuadratureSpec) -> tuple[float, float]:
    pad = spec.extent_widths * max(f1.sigma, f2.sigma)
    return (min(f1.center, f2.center) - pad, max(f1.center, f2.center) + pad)


def _axis_nodes(f1: GaussianFactor, f2: GaussianFactor, lo: float, hi: float,
                spec: QuadratureSpec, oscillatory: bool) -> int:
    n = spec.nodes
    if not oscillatory:
        return n
    # integrand wavenumber: plane-wave mismatch plus the center-offset chirp
    k_int = abs(f2.wavenumber - f1.wavenumber) + abs(f2.center - f1.center) * max(
        f1.chirp_rate, f2.chirp_rate)
    for _ in range(spec.max_doublings):
        if (hi - lo) / (n - 1) * k_int < 0.5:
            break
        n = 2 * n
    return n


def _axis_integral(f1: GaussianFactor, f2: GaussianFactor, spec: QuadratureSpec,
                   moduli: bool):
    """Trapezoid of conj(f1)*f2 (or |f1||f2|) with a halved-spacing check."""
    lo, hi = _axis_window(f1, f2, spec)
    n = _axis_nodes(f1, f2, lo, hi, spec, oscillatory=not moduli)

    def at(nodes: int):
        u = np.linspace(lo, hi, nodes)
        if moduli:
            vals = f1.modulus(u) * f2.modulus(u)
        else:
            vals = np.conj(f1(u)) * f2(u)
        return _trapezoid(vals, u[1] - u[0])

    coarse = at(n)
    fine = at(2 * n - 1)
    if abs(fine - coarse) > spec.richardson_tol:
        raise QuadratureConvergenceError(
            f"axis quadrature moved by {abs(fine - coarse):.3e} "
            f"(tol {spec.richardson_tol:.1e}) between {n} and {2 * n - 1} nodes",
            coarse=coarse, fine=fine)
    return fine


def inner_product_numeric(params: SGParams, t1: float = 0.0,
                          spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """Quadrature of <psi_plus | psi_minus> after free flight t1.

    Axis factorization is exact for these product states, so the three
    dimensional integral is the product of three one dimensional ones.
    """
    plus = branch_factors(params, t1, Branch.PLUS)
    minus = branch_factors(params, t1, Branch.MINUS)
    out = complex(1.0)
    for f_p, f_m in zip(plus, minus):
        out *= _axis_integral(f_p, f_m, spec, moduli=False)
    return out


def overlap_M_numeric(params: SGParams, t1: float = 0.0,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Quadrature of the modulus overlap integral after free flight t1."""
    plus = branch_factors(params, t1, Branch.PLUS)
    minus = branch_factors(params, t1, Branch.MINUS)
    out = 1.0
    for f_p, f_m in zip(plus, minus):
        out *= float(np.real(_axis_integral(f_p, f_m, spec, moduli=True)))
    return out


# ---------------------------------------------------------------------------
# saturation


@dataclass(frozen=True)
class SaturationResult:
    """Earliest free flight time with M within rel_tol of its limit."""

    t_s: float
    already_saturated: bool
    rel_tol: float


def saturation_time(params: SGParams, rel_tol: float = 1e-3) -> SaturationResult:
    """Find the saturation onset by doubling plus bisection on the closed form.

    M_t approaches M_s monotonically from above, so the relative deviation
    ``expm1(log M_t - log M_s)`` has a single crossing of ``rel_tol``.  The
    bisection resolves the crossing to 1e-3 spreading times.  A setup with
    no splitting speed is saturated from the start (M_t and M_s are both 1).
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    ms_log = m_saturated_log(params)

    def deviation(t1: float) -> float:
        return math.expm1(overlap_m_log(params, t1) - ms_log)

    if derive(params).vz == 0.0 or deviation(0.0) <= rel_tol:
        return SaturationResult(0.0, True, rel_tol)

    t_spread = derive(params).t_spread
    lo, hi = 0.0, t_spread
    for _ in range(200):
        if deviation(hi) <= rel_tol:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise QuadratureConvergenceError("saturation bracket did not close")

    resolution = 1e-3 * t_spread
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if deviation(mid) <= rel_tol:
            hi = mid
        else:
            lo = mid
    return SaturationResult(hi, False, rel_tol)


# ---------------------------------------------------------------------------
# half-plane probabilities


@dataclass(frozen=True)
class HalfPlaneProbs:
    """Detection probabilities of the Plus branch in the two z half spaces.

    ``alpha2`` is the y > 0, z < 0 probability (the deflected-up branch
    caught on the wrong side), ``beta2`` the y > 0, z > 0 probability and
    ``y_mass`` the total y > 0 weight that splits between them.
    """

    alpha2: float
    beta2: float
    y_mass: float


def half_plane_probs(params: SGParams, t1: float = 0.0) -> HalfPlaneProbs:
    """Half-plane probabilities via the normal distribution function.

    The branch densities are products of one dimensional Gaussians, so each
    probability is a product of two error-function factors; double precision
    accuracy comes from the platform distribution function.  The mirror
    identity (Plus branch mass at z < 0 equals Minus branch mass at z > 0)
    is asserted across two independent floating point routes.
    """
    _, fy, fz = branch_factors(params, t1, Branch.PLUS)
    sigma = fz.sigma
    y_mass = float(ndtr(fy.center / sigma))
    z_neg = float(ndtr(-fz.center / sigma))
    z_pos = float(ndtr(fz.center / sigma))

    _, _, fz_minus = branch_factors(params, t1, Branch.MINUS)
    mirror = 1.0 - float(ndtr(-fz_minus.center / sigma))
    if abs(mirror - z_neg) > 1e-14:
        raise AssertionError(
            f"mirror identity violated: {mirror!r} vs {z_neg!r}")

    return HalfPlaneProbs(alpha2=y_mass * z_neg, beta2=y_mass * z_pos,
                          y_mass=y_mass)


def _half_line_density(factor: GaussianFactor, lo: float, hi: float,
                       spec: QuadratureSpec) -> float:
    """Trapezoid of |f|**2 on [lo, hi] with one Richardson level.

    Hard integration edges leave an O(spacing**2) trapezoid error, so one
    halved-spacing Richardson combination is applied to reach the accuracy
    the distribution-function route is checked against.
    """
    def at(nodes: int) -> float:
        u = np.linspace(lo, hi, nodes)
        return float(_trapezoid(factor.modulus(u) ** 2, u[1] - u[0]))

    coarse = at(spec.nodes)
    fine = at(2 * spec.nodes - 1)
    result = (4.0 * fine - coarse) / 3.0
    if abs(fine - coarse) > 1e-6:
        raise QuadratureConvergenceError(
            f"half-line quadrature moved by {abs(fine - coarse):.3e}",
            coarse=coarse, fine=fine)
    return result


def half_plane_probs_quadrature(params: SGParams, t1: float = 0.0,
                                spec: QuadratureSpec = DEFAULT_QUADRATURE
                                ) -> HalfPlaneProbs:
    """Half-plane probabilities by direct density quadrature (check route)."""
    _, fy, fz = branch_factors(params, t1, Branch.PLUS)
    pad = spec.extent_widths * fz.sigma
    y_mass = _half_line_density(fy, 0.0, max(fy.center, 0.0) + pad, spec)
    z_neg = _half_line_density(fz, min(-fz.center, 0.0) - pad, 0.0, spec)
    z_pos = _half_line_density(fz, 0.0, max(fz.center, 0.0) + pad, spec)
    return HalfPlaneProbs(alpha2=y_mass * z_neg, beta2=y_mass * z_pos,
                          y_mass=y_mass)


# ---------------------------------------------------------------------------
# constraint verdicts


class Regime(enum.Enum):
    """Classification of a parameter point against the overlap bound."""

    IDEAL = "ideal"
    GENERAL_NONIDEAL = "general_nonideal"
    FORBIDDEN = "forbidden"


@dataclass(frozen=True)
class ConstraintVerdict:
    i_value: float
    m_sat: float
    margin: float
    ok: bool
    regime: Regime


def check_constraint(params: SGParams, epsilon: float = 1e-3,
                     raise_on_forbidden: bool = True) -> ConstraintVerdict:
    """Evaluate the overlap bound M_s >= I at one parameter point.

    Ideal means both metrics sit below ``epsilon``; any point satisfying the
    bound with either metric at or above ``epsilon`` is classified as
    general nonideal.  A violation beyond the fixed comparison slack is the
    Forbidden regime and raises by default, since the bound is a theorem.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    i_value = inner_product_closed(params)
    m_sat = M_saturated(params)
    margin = m_sat - i_value
    ok = i_value <= m_sat + CONSTRAINT_SLACK
    if not ok:
        regime = Regime.FORBIDDEN
        if raise_on_forbidden:
            raise ForbiddenRegimeError(
                f"distinguishability {i_value!r} exceeds saturated overlap "
                f"{m_sat!r} beyond slack {CONSTRAINT_SLACK:g}")
    elif i_value < epsilon and m_sat < epsilon:
        regime = Regime.IDEAL
    else:
        regime = Regime.GENERAL_NONIDEAL
    return ConstraintVerdict(i_value, m_sat, margin, ok, regime)


# ---------------------------------------------------------------------------
# Cauchy-Schwarz property


@dataclass(frozen=True)
class SchwarzResult:
    lhs: float
    rhs: float
    margin: float
    ok: bool


def cauchy_schwarz(f: np.ndarray, g: np.ndarray, dx: float,
                   slack: float = 1e-10) -> SchwarzResult:
    """Check integral |f||g| >= |integral conj(f) g| on sampled functions.

    This is the inequality that orders the modulus overlap above the inner
    product modulus for any pair of states, evaluated with the same
    trapezoid primitive the metric quadratures use.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError("f and g must be 1d arrays of equal length")
    lhs = float(np.real(_trapezoid(np.abs(f) * np.abs(g), dx)))
    rhs = abs(_trapezoid(np.conj(f) * g, dx))
    margin = lhs - rhs
    return SchwarzResult(lhs, rhs, margin, margin >= -slack)


# ---------------------------------------------------------------------------
# record assembly


@dataclass(frozen=True)
class MetricsRecord:
    """Every metric evaluated at one parameter point and free flight time."""

    t1: float
    i_value: float
    inner_complex: complex
    m_t: float
    m_sat: float
    alpha2: float
    beta2: float
    y_mass: float
    t_s: float
    already_saturated: bool
    regime: Regime
    constraint_ok: bool
    underflow: bool


def metrics_record(params: SGParams, t1: float = 0.0, epsilon: float = 1e-3,
                   rel_tol: float = 1e-3,
                   raise_on_forbidden: bool = True) -> MetricsRecord:
    """Assemble the closed-form metric set for one point."""
    verdict = check_constraint(params, epsilon, raise_on_forbidden)
    sat = saturation_time(params, rel_tol)
    probs = half_plane_probs(params, t1)
    return MetricsRecord(
        t1=t1,
        i_value=verdict.i_value,
        inner_complex=inner_product_complex(params),
        m_t=overlap_M_closed(params, t1),
        m_sat=verdict.m_sat,
        alpha2=probs.alpha2,
        beta2=probs.beta2,
        y_mass=probs.y_mass,
        t_s=sat.t_s,
        already_saturated=sat.already_saturated,
        regime=verdict.regime,
        constraint_ok=verdict.ok,
        underflow=metrics_underflowed(params, t1),
    )
