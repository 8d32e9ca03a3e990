import itertools
import random
from fractions import Fraction

import pytest

from artifact.charp import CharPElem, PrecisionWindow, random_element
from artifact.errors import NotInConvergenceDomain, PrecisionMismatch
from artifact.gamma import (
    GammaElem, act_period, act_series, check_equivariance, dgamma, dgamma_closed,
)
from artifact.numbers import INF
from artifact.series import SeriesElem, log_one_plus_pi
from artifact.wittperiod import CycloRing, WittElem, theta_eval, theta_ring, teichmuller


def test_group_axioms_exhaustive():
    p, A = 2, 2
    elems = [GammaElem(g0, (n,), A) for g0 in (1, 3) for n in range(4)]
    e = GammaElem.identity(1, A)
    for g in elems:
        assert g.compose(e, p) == g == e.compose(g, p)
        assert g.compose(g.inverse(p), p) == e == g.inverse(p).compose(g, p)
        for h, k in itertools.product(elems, repeat=2):
            assert g.compose(h, p).compose(k, p) == g.compose(h.compose(k, p), p)


def test_composition_examples():
    p, A = 3, 4
    g = GammaElem(4, (0,), A)
    nu = GammaElem(1, (5,), A)
    assert g.compose(nu, p) == GammaElem(4, (20,), A)
    x = GammaElem(7, (5,), A)
    inv = x.inverse(p)
    g0inv = pow(7, -1, 81)
    assert inv == GammaElem(g0inv, (-g0inv * 5 % 81,), A)
    with pytest.raises(PrecisionMismatch):
        g.compose(GammaElem(1, (0,), 5), p)


def test_unit_membership():
    assert GammaElem(5, (4, 8), 6).in_U(2, 2)
    assert not GammaElem(3, (4, 8), 6).in_U(2, 2)
    assert not GammaElem(5, (2, 0), 6).in_U(2, 2)


def test_cyclotomic_examples():
    p = 3
    R = CycloRing(p, 1, 3, rank=1, tden=1)
    z = R.zeta(1)
    assert act_period(GammaElem(1 + p * p, (0,), 3), z) == z
    t = R.toric((Fraction(1, p),))
    assert act_period(GammaElem(1, (1,), 3), t) == z * t
    assert act_period(GammaElem.identity(1, 3), z + t) == z + t


def _random_cyclo(R, rng):
    out = R.zero()
    for _ in range(3):
        out = out + (R.zeta(rng.randrange(R.order)) * R.toric((Fraction(rng.randrange(-4, 5), R.p ** R.tden),))
                     ).scale(rng.randrange(R.mod))
    return out


def test_cyclotomic_action_is_homomorphic():
    p, A = 2, 4
    R = CycloRing(p, 3, 3, rank=1, tden=3)
    rng = random.Random(3)
    for _ in range(100):
        x, y = _random_cyclo(R, rng), _random_cyclo(R, rng)
        g = GammaElem(rng.randrange(1, 16, 2), (rng.randrange(16),), A)
        h = GammaElem(rng.randrange(1, 16, 2), (rng.randrange(16),), A)
        assert act_period(g.compose(h, p), x) == act_period(g, act_period(h, x))
        assert act_period(g, x * y) == act_period(g, x) * act_period(g, y)


def test_witt_action_is_homomorphic():
    p, A = 2, 8
    w = PrecisionWindow(p, p, 1, 0, 6, 32, (0,))
    rng = random.Random(4)
    for _ in range(100):
        x = WittElem([random_element(w, rng, 2, max_pibar=1) for _ in range(2)])
        g = GammaElem(rng.randrange(1, 256, 2), (rng.randrange(256),), A)
        h = GammaElem(rng.randrange(1, 256, 2), (rng.randrange(256),), A)
        assert act_period(g.compose(h, p), x).agrees(act_period(g, act_period(h, x)))


def test_series_action_is_homomorphic():
    p, A = 2, 10
    ring = SeriesElem.ring(p, 1, 12)
    rng = random.Random(5)
    for _ in range(100):
        x = ring._like({(rng.randrange(4), (rng.randrange(-2, 3),)): rng.randrange(1, 9) for _ in range(3)}, INF)
        g = GammaElem(1 + 4 * rng.randrange(8), (4 * rng.randrange(8),), A)
        h = GammaElem(1 + 4 * rng.randrange(8), (4 * rng.randrange(8),), A)
        assert act_series(g.compose(h, p), x).agrees(act_series(g, act_series(h, x)))


def test_theta_and_phi_equivariance():
    p, N = 2, 2
    w = PrecisionWindow(p, p, 1, 0, 8, 16, (0,))
    rng = random.Random(0)
    pairs = []
    for _ in range(50):
        x = WittElem([random_element(w, rng, 2, max_pibar=1) for _ in range(N)])
        pairs.append((GammaElem(rng.randrange(1, 256, 2), (rng.randrange(256),), 8), x))
    report = check_equivariance(pairs, theta_precision=N)
    assert report["count"] == 50
    assert report["theta"] >= N
    assert report["phi"] >= 9
    trivial = check_equivariance([(GammaElem.identity(1, 4), WittElem.one(w, 2))], theta_precision=2)
    assert trivial["theta"] is INF and trivial["phi"] is INF


def test_theta_equivariance_on_roots():
    p, N = 3, 2
    w = PrecisionWindow(p, p, 1, 0, 9, 9, (0,))
    x = teichmuller(CharPElem.monomial(w, 0, (Fraction(1, 3),)), N)
    g = GammaElem(1, (1,), 4)
    lhs = theta_eval(act_period(g, x), N)
    R = theta_ring(w, N)
    assert lhs == R.zeta(R.order // p) * R.toric((Fraction(1, 3),))


def test_dgamma_examples():
    ring = SeriesElem.ring(2, 1, 24)
    g0 = GammaElem(5, (0,), 12)
    assert dgamma(g0, ring.one(), 6).is_zero()
    one_plus = ring.one() + ring.pi()
    assert dgamma(g0, one_plus, 12).agrees(dgamma_closed(g0, one_plus))
    assert dgamma(g0, one_plus, 12).floor >= 8
    nu = GammaElem(1, (4,), 12)
    T = ring.monomial(0, (1,))
    closed = dgamma_closed(nu, T)
    assert closed.agrees((log_one_plus_pi(ring, 24) * T).scale(4))
    assert dgamma(nu, T, 12).agrees(closed)


def test_dgamma_mixed_element_matches_derived_formula():
    ring = SeriesElem.ring(2, 1, 24)
    g = GammaElem(5, (4,), 12)
    x = ring.pi() ** 2 + ring.monomial(1, (1,)).scale(3)
    assert dgamma(g, x, 12).agrees(dgamma_closed(g, x))


def test_dgamma_domain():
    ring = SeriesElem.ring(2, 1, 8)
    with pytest.raises(NotInConvergenceDomain):
        dgamma(GammaElem(3, (0,), 6), ring.pi(), 4)
    w = PrecisionWindow(2, 2, 0, 0, 4, 4, (0,))
    with pytest.raises(TypeError):
        dgamma(GammaElem(5, (0,), 6), CharPElem.one(w), 4)


def test_dgamma_leibniz():
    ring = SeriesElem.ring(2, 1, 16)
    rng = random.Random(6)
    g = GammaElem(5, (4,), 12)
    for _ in range(50):
        x = ring._like({(rng.randrange(3), (rng.randrange(-1, 2),)): rng.randrange(1, 5) for _ in range(2)}, INF)
        y = ring._like({(rng.randrange(3), (rng.randrange(-1, 2),)): rng.randrange(1, 5) for _ in range(2)}, INF)
        lhs = dgamma(g, x * y, 10)
        rhs = dgamma(g, x, 10) * y + x * dgamma(g, y, 10)
        assert lhs.agrees(rhs)
