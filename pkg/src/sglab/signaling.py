"""Remote spin statistics for a singlet pair with one nonideal splitter.

One particle of a spin singlet flies through the splitting stage, the other
to a distant observer measuring a spin observable A.  With perfectly
distinguishable branches the remote statistics are isotropic,
<A> = (A_uu + A_dd)/2.  Residual branch overlap adds the cross term

    delta = <psi_minus | psi_plus> * A_ud

to the remote expectation, so |delta| is bounded by the branch
distinguishability I times |A_ud|, and by I itself for any unit spin
direction.  The audit in this module drives that bound against the
saturated position overlap: no-signaling holds exactly when M_s >= I.

The literal cross term above is not Hermitian-symmetrized; the symmetrized
variant 2*Re(inner * A_ud) is reported alongside it, and every verdict uses
moduli only, where the two coincide in bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrics import (CONSTRAINT_SLACK, M_saturated, check_constraint,
                      inner_product_complex, overlap_M_closed)
from .params import SGParams

_HERMITICITY_TOL = 1e-12


class SpinObservable:
    """A 2x2 Hermitian observable in the z-spin basis."""

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, atol=_HERMITICITY_TOL, rtol=0.0):
            raise ValueError("observable must be Hermitian")
        self.matrix = m

    @classmethod
    def from_direction(cls, nx: float, ny: float, nz: float) -> "SpinObservable":
        """Unit-direction spin observable n . sigma (eigenvalues +-1)."""
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("direction must be a finite nonzero vector")
        nx, ny, nz = nx / norm, ny / norm, nz / norm
        return cls([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]])

    @property
    def a_uu(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def a_dd(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def a_ud(self) -> complex:
        return complex(self.matrix[0, 1])

    def __repr__(self) -> str:
        return f"SpinObservable({self.matrix.tolist()!r})"


def expectation_sg(observable: SpinObservable) -> float:
    """Remote expectation with the splitter alone (isotropic mixture)."""
    return 0.5 * (observable.a_uu + observable.a_dd)


def _check_inner(inner: complex) -> complex:
    inner = complex(inner)
    if abs(inner) > 1.0 + CONSTRAINT_SLACK:
        raise ValueError(f"branch inner product modulus exceeds 1: {inner!r}")
    return inner


def expectation_sg_sf(observable: SpinObservable, inner: complex) -> complex:
    """Remote expectation including the branch-overlap cross term.

    ``inner`` is <psi_minus | psi_plus>.  The literal cross term makes this
    complex in general; the observable part is its real content.
    """
    inner = _check_inner(inner)
    return expectation_sg(observable) + inner * observable.a_ud


@dataclass(frozen=True)
class SignalReport:
    """Shift of one remote observable due to residual branch overlap."""

    expectation_plain: float
    expectation_overlap: complex
    delta: complex
    delta_abs: float
    delta_symmetrized: float
    bound: float
    within_bound: bool


def delta(observable: SpinObservable, inner: complex) -> SignalReport:
    """Cross-term shift of one observable, with its modulus bound."""
    inner = _check_inner(inner)
    plain = expectation_sg(observable)
    shifted = expectation_sg_sf(observable, inner)
    shift = shifted - plain
    bound = abs(inner) * abs(observable.a_ud)
    return SignalReport(
        expectation_plain=plain,
        expectation_overlap=shifted,
        delta=shift,
        delta_abs=abs(shift),
        delta_symmetrized=2.0 * (inner * observable.a_ud).real,
        bound=bound,
        within_bound=abs(shift) <= bound + CONSTRAINT_SLACK,
    )


def delta_max_exact(inner: complex) -> float:
    """Largest |delta| over unit spin directions.

    |A_ud| for n . sigma is sqrt(nx**2 + ny**2) <= 1, saturated by any
    equatorial direction, so the supremum is |inner|.
    """
    return abs(_check_inner(inner))


def max_delta_over_directions(inner: complex, n_directions: int = 1000,
                              seed: int = 0) -> tuple[float, np.ndarray]:
    """Brute-force |delta| maximization over random unit directions.

    Directions are drawn uniformly on the sphere from a seeded generator.
    Returns the best |delta| and the direction attaining it.
    """
    inner = _check_inner(inner)
    if n_directions < 1:
        raise ValueError("need at least one direction")
    rng = np.random.default_rng(seed)
    best_val = -1.0
    best_dir = np.array([1.0, 0.0, 0.0])
    for _ in range(n_directions):
        vec = rng.normal(size=3)
        while float(np.dot(vec, vec)) < 1e-12:
            vec = rng.normal(size=3)
        vec = vec / np.linalg.norm(vec)
        obs = SpinObservable.from_direction(*vec)
        val = abs(inner * obs.a_ud)
        if val > best_val:
            best_val = val
            best_dir = vec
    return best_val, best_dir


@dataclass(frozen=True)
class AuditReport:
    """No-signaling audit of one parameter point."""

    i_value: float
    m_t: float
    m_sat: float
    delta_max: float
    bound_ok: bool
    regime: str
    equatorial: SignalReport


def signaling_audit(params: SGParams, t1: float = 0.0,
                    epsilon: float = 1e-3) -> AuditReport:
    """Check that the saturated overlap bounds the worst-case shift.

    The worst case over unit directions is attained on the equator; the
    attached report shows it realized concretely on the x-direction
    observable, whose |A_ud| is 1.
    """
    verdict = check_constraint(params, epsilon)
    inner = np.conj(inner_product_complex(params))
    d_max = delta_max_exact(inner)
    report = delta(SpinObservable.from_direction(1.0, 0.0, 0.0), inner)
    return AuditReport(
        i_value=verdict.i_value,
        m_t=overlap_M_closed(params, t1),
        m_sat=M_saturated(params),
        delta_max=d_max,
        bound_ok=d_max <= verdict.m_sat + CONSTRAINT_SLACK,
        regime=verdict.regime.value,
        equatorial=report,
    )
