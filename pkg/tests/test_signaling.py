import cmath
import math

import numpy as np
import pytest

from sglab.metrics import inner_product_complex
from sglab.params import from_groups, natural
from sglab.signaling import (SpinObservable, delta, delta_max_exact,
                             expectation_sg, expectation_sg_sf,
                             max_delta_over_directions, signaling_audit)

P2K1 = natural(gradient=0.5, tau=2.0)

SIGMA_X = SpinObservable([[0, 1], [1, 0]])
SIGMA_Y = SpinObservable([[0, -1j], [1j, 0]])
SIGMA_Z = SpinObservable([[1, 0], [0, -1]])


def random_inner(rng):
    """Branch inner product of a random splitting stage, conjugated into
    the <psi_minus | psi_plus> convention the signaling layer uses."""
    params = from_groups(rng.uniform(0.1, 3.0), rng.uniform(0.05, 1.0),
                         b0=rng.uniform(0.0, 1.0))
    return np.conj(inner_product_complex(params))


def random_observable(rng) -> SpinObservable:
    return SpinObservable.from_direction(*rng.normal(size=3))


# ---------------------------------------------------------------------------
# observable container


def test_observable_validation():
    with pytest.raises(ValueError):
        SpinObservable([[0, 1], [2, 0]])          # not Hermitian
    with pytest.raises(ValueError):
        SpinObservable([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        SpinObservable.from_direction(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        SpinObservable.from_direction(math.inf, 0.0, 0.0)


def test_from_direction_normalizes():
    a = SpinObservable.from_direction(3.0, 0.0, 0.0)
    np.testing.assert_allclose(a.matrix, SIGMA_X.matrix, atol=1e-15)


def test_direction_observable_entries():
    assert SIGMA_X.a_uu == 0 and SIGMA_X.a_dd == 0 and SIGMA_X.a_ud == 1
    assert SIGMA_Z.a_uu == 1 and SIGMA_Z.a_dd == -1 and SIGMA_Z.a_ud == 0
    assert SIGMA_Y.a_ud == -1j


def test_direction_observable_unit_spectrum(rng):
    for _ in range(10):
        obs = random_observable(rng)
        np.testing.assert_allclose(np.linalg.eigvalsh(obs.matrix),
                                   [-1.0, 1.0], atol=1e-12)


# ---------------------------------------------------------------------------
# expectations and shifts


def test_plain_expectation_is_isotropic_mixture():
    assert expectation_sg(SIGMA_Z) == 0.0
    assert expectation_sg(SIGMA_X) == 0.0
    assert expectation_sg(SpinObservable([[3, 0], [0, 1]])) == 2.0


def test_diagonal_observable_never_shifts(rng):
    for inner in (0.3, -0.5 + 0.2j, 0.999):
        report = delta(SIGMA_Z, inner)
        assert report.delta == 0
        assert report.delta_abs == 0.0
        assert report.bound == 0.0
        assert report.within_bound


def test_literal_cross_term():
    inner = 0.25 * cmath.exp(0.4j)
    report = delta(SIGMA_X, inner)
    assert report.delta == inner          # A_ud = 1
    assert report.expectation_overlap == expectation_sg(SIGMA_X) + inner
    assert report.delta_abs == pytest.approx(abs(inner), rel=1e-15)
    assert report.delta_symmetrized == pytest.approx(2.0 * inner.real,
                                                     rel=1e-13)


def test_shift_modulus_saturates_bound(rng):
    for _ in range(20):
        inner = random_inner(rng)
        obs = random_observable(rng)
        report = delta(obs, inner)
        assert report.delta_abs == pytest.approx(report.bound, abs=1e-15)
        assert report.bound <= abs(inner) + 1e-15
        assert report.within_bound


def test_rejects_overlong_inner():
    with pytest.raises(ValueError):
        expectation_sg_sf(SIGMA_X, 1.0 + 1e-6)
    with pytest.raises(ValueError):
        delta(SIGMA_X, 1.1j)


def test_delta_max_exact_is_modulus():
    assert delta_max_exact(0.0) == 0.0
    assert delta_max_exact(0.3 - 0.4j) == pytest.approx(0.5, rel=1e-15)
    # attained by any equatorial direction
    report = delta(SIGMA_X, 0.3 - 0.4j)
    assert report.delta_abs == pytest.approx(0.5, rel=1e-15)


def test_direction_search_approaches_supremum():
    inner = 0.6 * cmath.exp(-1.1j)
    best, direction = max_delta_over_directions(inner, n_directions=1000,
                                                seed=0)
    assert best <= abs(inner) + 1e-15
    assert best == pytest.approx(abs(inner), rel=1e-3)
    # the argmax must sit close to the equator
    assert abs(direction[2]) < 0.05
    assert np.linalg.norm(direction) == pytest.approx(1.0, rel=1e-12)


def test_direction_search_validation():
    with pytest.raises(ValueError):
        max_delta_over_directions(0.5, n_directions=0)


def test_direction_search_deterministic():
    a = max_delta_over_directions(0.4 + 0.1j, n_directions=64, seed=7)
    b = max_delta_over_directions(0.4 + 0.1j, n_directions=64, seed=7)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])


# ---------------------------------------------------------------------------
# partial-trace oracles
#
# The branch states live in an explicit two dimensional path space:
# psi_minus = (1, 0), psi_plus = (inner, sqrt(1 - |inner|**2)), so that
# <psi_minus | psi_plus> = inner by construction.  The reduced state of the
# remote spin is computed by an explicit einsum partial trace, with no code
# under test involved.


def _path_states(inner):
    psi_minus = np.array([1.0, 0.0], dtype=complex)
    psi_plus = np.array([inner, math.sqrt(1.0 - abs(inner) ** 2)],
                        dtype=complex)
    return psi_minus, psi_plus


def test_true_singlet_marginal_never_shifts(rng):
    # full state |u>|d>|psi_minus> - |d>|u>|psi_plus> over spin1 x spin2 x
    # path: the orthogonal spin-2 tag makes the remote marginal exactly
    # maximally mixed whatever the path overlap is
    for _ in range(20):
        inner = random_inner(rng)
        psi_minus, psi_plus = _path_states(inner)
        state = np.zeros((2, 2, 2), dtype=complex)
        state[0, 1, :] = psi_minus / math.sqrt(2.0)
        state[1, 0, :] = -psi_plus / math.sqrt(2.0)
        rho1 = np.einsum("iab,jab->ij", state, state.conj())
        np.testing.assert_allclose(rho1, np.eye(2) / 2.0, atol=1e-14)
        obs = random_observable(rng)
        marginal = float(np.real(np.trace(rho1 @ obs.matrix)))
        assert marginal == pytest.approx(expectation_sg(obs), abs=1e-13)


def test_pointer_trace_matches_symmetrized_shift(rng):
    # dropping the orthogonal tag leaves |u>|psi_minus> + |d>|psi_plus|
    # over spin1 x path; its reduced-state shift is the Hermitian content
    # of the literal cross term at half weight
    for _ in range(20):
        inner = random_inner(rng)
        psi_minus, psi_plus = _path_states(inner)
        state = np.zeros((2, 2), dtype=complex)
        state[0, :] = psi_minus / math.sqrt(2.0)
        state[1, :] = psi_plus / math.sqrt(2.0)
        rho1 = np.einsum("ia,ja->ij", state, state.conj())
        assert np.trace(rho1).real == pytest.approx(1.0, abs=1e-14)
        obs = random_observable(rng)
        shift = float(np.real(np.trace(rho1 @ obs.matrix))) - expectation_sg(obs)
        report = delta(obs, inner)
        assert shift == pytest.approx(report.delta_symmetrized / 2.0,
                                      abs=1e-12)
        assert shift == pytest.approx(report.delta.real, abs=1e-12)


# ---------------------------------------------------------------------------
# audit


def test_audit_reference_point():
    report = signaling_audit(P2K1, t1=0.0)
    assert report.i_value == math.exp(-2.5)
    assert report.m_sat == math.exp(-2.0)
    assert report.m_t == pytest.approx(math.exp(-0.25), rel=1e-13)
    assert report.delta_max == pytest.approx(math.exp(-2.5), rel=1e-14)
    assert report.bound_ok
    assert report.regime == "general_nonideal"
    assert report.equatorial.delta_abs == pytest.approx(report.delta_max,
                                                        rel=1e-14)


def test_audit_bound_across_plane():
    for p in (0.1, 0.5, 1.0, 2.0, 4.0):
        for k in (0.05, 0.3, 1.0, 2.5):
            report = signaling_audit(from_groups(p, k))
            assert report.bound_ok
            assert report.delta_max <= report.m_sat + 1e-12


def test_audit_uniform_field_does_not_change_maximum():
    plain = signaling_audit(natural(gradient=0.5, tau=2.0))
    biased = signaling_audit(natural(b0=1.3, gradient=0.5, tau=2.0))
    assert biased.delta_max == pytest.approx(plain.delta_max, rel=1e-14)
    assert biased.m_sat == plain.m_sat
