import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglab.params import (HBAR_SI, NEUTRON_MASS, NEUTRON_MOMENT, SGParams,
                          derive, from_groups, natural, neutron, to_natural)


def test_defaults_are_neutron_si():
    p = SGParams()
    assert p.mass == NEUTRON_MASS
    assert p.moment == NEUTRON_MOMENT
    assert p.hbar == HBAR_SI


@pytest.mark.parametrize("field,value", [
    ("mass", 0.0), ("mass", -1.0),
    ("moment", 0.0),
    ("b0", -0.1),
    ("gradient", -1e-3),
    ("tau", -1.0),
    ("sigma0", 0.0),
    ("vy", -2.0),
    ("hbar", 0.0),
    ("tau", math.nan),
    ("sigma0", math.inf),
])
def test_rejects_bad_values(field, value):
    base = dict(mass=1.0, moment=1.0, sigma0=1.0, hbar=1.0)
    base[field] = value
    with pytest.raises(ValueError):
        SGParams(**base)


def test_rejects_bool():
    with pytest.raises(ValueError):
        SGParams(mass=1.0, moment=1.0, sigma0=1.0, hbar=1.0, tau=True)


def test_frozen():
    p = natural()
    with pytest.raises(Exception):
        p.tau = 3.0


def test_derive_natural_units():
    # moment*gradient*tau/mass with unit prefactors
    p = natural(gradient=0.5, tau=2.0)
    d = derive(p)
    assert d.vz == 1.0
    assert d.kz == 1.0
    assert d.p_sep == 2.0
    assert d.k_sep == 1.0
    assert d.t_spread == 2.0
    assert d.field_ratio == math.inf


def test_derive_field_ratio_finite():
    p = natural(b0=2.0, gradient=0.5, tau=1.0)
    assert derive(p).field_ratio == 0.25


def test_neutron_groups_order_of_magnitude():
    # a realistic bench: 100 G/cm over 10 us, 0.1 mm packet
    p = neutron(b0=1e-2, gradient=1.0, tau=1e-5, sigma0=1e-4, vy=100.0)
    d = derive(p)
    assert d.vz == pytest.approx(
        NEUTRON_MOMENT * 1.0 * 1e-5 / NEUTRON_MASS, rel=1e-15)
    assert d.p_sep > 0
    assert d.k_sep > 0


@given(p_sep=st.floats(0.05, 8.0), k_sep=st.floats(0.05, 8.0))
def test_from_groups_roundtrip(p_sep, k_sep):
    d = derive(from_groups(p_sep, k_sep))
    assert d.p_sep == pytest.approx(p_sep, rel=1e-12)
    assert d.k_sep == pytest.approx(k_sep, rel=1e-12)


def test_from_groups_zero_pair():
    d = derive(from_groups(0.0, 0.0))
    assert d.p_sep == 0.0 and d.k_sep == 0.0


@pytest.mark.parametrize("p,k", [(1.0, 0.0), (0.0, 1.0), (-1.0, 1.0)])
def test_from_groups_rejects_mixed_zero(p, k):
    with pytest.raises(ValueError):
        from_groups(p, k)


def test_to_natural_preserves_groups():
    p = neutron(b0=1e-2, gradient=1.0, tau=1e-5, sigma0=1e-4, vy=100.0)
    scaled, ls, ts = to_natural(p)
    assert scaled.mass == 1.0 and scaled.hbar == 1.0
    assert scaled.sigma0 == 1.0 and scaled.moment == 1.0
    assert ls == p.sigma0
    assert ts == p.mass * p.sigma0**2 / p.hbar
    d0, d1 = derive(p), derive(scaled)
    assert d1.p_sep == pytest.approx(d0.p_sep, rel=1e-12)
    assert d1.k_sep == pytest.approx(d0.k_sep, rel=1e-12)
    assert d1.field_ratio == pytest.approx(d0.field_ratio, rel=1e-12)
    # times divide by ts
    assert scaled.tau == pytest.approx(p.tau / ts, rel=1e-12)


def test_to_natural_identity_on_natural():
    p = natural(b0=0.3, gradient=0.7, tau=1.5, vy=2.0)
    scaled, ls, ts = to_natural(p)
    assert ls == 1.0 and ts == 1.0
    assert scaled == p
