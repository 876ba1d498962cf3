import dataclasses
import random
from fractions import Fraction

import pytest

from eisq.errors import PrecisionError, ValidationError
from eisq.modforms import (
    QSeries,
    delta_cusp_constants,
    delta_series,
    eisenstein_e,
    eisenstein_eigencheck,
    hecke_t,
    hecke_u,
    sigma,
    sigma_prime,
)


def test_sigma_examples():
    assert sigma(6) == 12
    assert sigma(1) == 1
    assert sigma_prime(10, 5) == 3
    assert [sigma(m) for m in range(1, 9)] == [1, 3, 4, 7, 6, 12, 8, 15]
    with pytest.raises(ValidationError):
        sigma(0)


def test_delta_series_examples():
    d5 = delta_series(5, 40)
    assert d5.coeffs[0] == 0
    assert d5.coeffs[1:8] == (1, 3, 4, 7, 0, 12, 8)
    assert all(d5.coeffs[5 * m] == 0 for m in range(1, 9))
    assert d5.coeffs[1] == 1


def test_delta_identity_with_eisenstein_pair():
    # construction asserts delta = (e(pz) - e(z))/24 internally; exercise it
    for p in (5, 7, 11, 13):
        delta_series(p, 500)


def test_hecke_examples():
    d5 = delta_series(5, 200)
    t2 = hecke_t(d5, 2)
    assert t2.coeffs[1:5] == (3, 9, 12, 21)
    assert t2.agrees_with(d5.scale(3)) is None
    assert hecke_u(d5, 5).is_zero()
    t3 = hecke_t(d5, 3)
    assert t3.agrees_with(d5.scale(4)) is None
    with pytest.raises(ValidationError):
        hecke_t(d5, 5)
    with pytest.raises(ValidationError):
        hecke_u(d5, 3)
    with pytest.raises(ValidationError):
        hecke_t(d5, 4)


def test_hecke_linear_and_commuting():
    rng = random.Random(6)
    level = 101
    for _ in range(25):
        prec = 120
        f = QSeries(level, tuple(rng.randrange(-9, 10) for _ in range(prec + 1)))
        g = QSeries(level, tuple(rng.randrange(-9, 10) for _ in range(prec + 1)))
        for ell in (2, 3):
            lhs = hecke_t(f, ell) + hecke_t(g, ell)
            rhs = hecke_t(f + g, ell)
            assert lhs.agrees_with(rhs) is None
        a = hecke_t(hecke_t(f, 2), 3)
        b = hecke_t(hecke_t(f, 3), 2)
        assert a.agrees_with(b) is None


def test_eigencheck_passes():
    for p in (5, 7, 11, 13):
        rep = eisenstein_eigencheck(p, 200)
        assert rep.ok
        checked = {r.ell for r in rep.results if r.status == "pass"}
        assert {2, 3, 5, 7, 11, 13} - {p} <= checked | set(rep.insufficient)


def test_eigencheck_insufficient_precision():
    rep = eisenstein_eigencheck(7, 40)
    assert rep.insufficient and 13 in rep.insufficient
    with pytest.raises(PrecisionError):
        eisenstein_eigencheck(7, 10, primes=[13])


def test_eigencheck_negative_control():
    d = delta_series(5, 120)
    bad = dataclasses.replace(d, coeffs=d.coeffs[:9] + (d.coeffs[9] + 1,) + d.coeffs[10:])
    t2 = hecke_t(bad, 2)
    idx = t2.agrees_with(bad.scale(3))
    assert idx is not None


def test_cusp_constants():
    assert delta_cusp_constants(5) == (Fraction(1, 5), Fraction(-4, 5))
    assert delta_cusp_constants(7) == (Fraction(2, 7), Fraction(-12, 7))
    assert delta_cusp_constants(11) == (Fraction(5, 11), Fraction(-50, 11))


def test_level_mismatch_rejected():
    with pytest.raises(ValidationError):
        eisenstein_e(5, 10) + delta_series(5, 10)


def test_precision_bookkeeping():
    d = delta_series(7, 100)
    assert hecke_t(d, 3).prec == 33
    assert hecke_u(d, 7).prec == 14
