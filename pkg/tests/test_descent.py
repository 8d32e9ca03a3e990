import random
from fractions import Fraction

import pytest

from artifact.charp import (
    CharPElem, MuClass, PrecisionWindow, gamma_act_charp, mu_decompose, one_plus_pibar_power,
    random_element,
)
from artifact.descent import (
    DescentFrame, act_on_index, base_gamma, class_components, class_multiplier, deperfect_module,
    descend_matrix, evaluate_at, fourier_decompose, fourier_loss, fourier_resum,
    invert_gamma_minus_one, inversion_loss, mat_agrees, mat_sub, mat_valuation, split_element,
    split_refinement, trivial_class_projection,
)
from artifact.errors import CommutationFailure, DominanceFailure, PrecisionExhausted, PreconditionError
from artifact.gamma import GammaElem
from artifact.wittperiod import CycloRing
from builders import RANK0, RANK1, class_element, near_identity, perturbed_module
from oracles import class_preimage_rank0, fourier_by_grouping

F0, F1 = DescentFrame(RANK0), DescentFrame(RANK1)
HALF0 = one_plus_pibar_power(RANK0, Fraction(1, 2))
HALF1 = one_plus_pibar_power(RANK1, Fraction(1, 2))


def _applied(frame, i, h, z):
    T = frame.power(i, h)
    return gamma_act_charp(T, z) - z


# -- inversion -------------------------------------------------------------

def test_invert_zero():
    assert invert_gamma_minus_one(0, 0, CharPElem.zero(RANK0), F0).is_zero()


def test_invert_worked_example():
    x = CharPElem.monomial(RANK0, 2) * HALF0
    assert (invert_gamma_minus_one(0, 0, x, F0) - HALF0).is_zero()


def test_multiplier_of_half_class_is_pibar_squared():
    m = class_multiplier(F0.power(0, 0), MuClass(Fraction(1, 2), ()), RANK0)
    assert m == CharPElem.monomial(RANK0, 2)


@pytest.mark.parametrize("frame,i", [(F0, 0), (F1, 0), (F1, 1)])
def test_invert_roundtrip(frame, i):
    rng = random.Random(10 + i)
    for _ in range(50):
        x = class_element(frame.window, rng, i, 0)
        z = invert_gamma_minus_one(i, 0, x, frame)
        assert (_applied(frame, i, 0, z) - x).is_zero()
        assert all(mu.index() == i for mu in mu_decompose(z))


def test_invert_matches_dense_oracle():
    rng = random.Random(3)
    w = PrecisionWindow(2, 2, 1, -4, 12, 0)
    frame = DescentFrame(w)
    D, p, H = w.den, w.p, w.hi_num
    T = frame.power(0, 0)
    for _ in range(20):
        x = class_element(w, rng, 0, 4)
        z = invert_gamma_minus_one(0, 0, x, frame)
        expected = class_preimage_rank0({a: c for (a, _), c in x.terms.items()}, T.gamma0 % p ** T.A, p, D, 1, H)
        for a in range(H + 1):
            if w.key_val(a, ()) >= z.floor:
                break
            assert z.terms.get((a, ()), 0) == expected.get(a, 0)


def test_invert_rejects_wrong_index():
    x = CharPElem.monomial(RANK1, 1, (Fraction(1, 2),))
    with pytest.raises(PreconditionError):
        invert_gamma_minus_one(0, 0, x, F1)


def test_trivial_class_is_not_invertible():
    with pytest.raises(DominanceFailure):
        class_multiplier(F0.power(0, 0), MuClass(0, ()), RANK0)


def test_class_not_fixed_for_small_h():
    w = PrecisionWindow(2, 2, 3, -4, 8, 0)
    with pytest.raises(DominanceFailure):
        class_multiplier(DescentFrame(w).power(0, 0), MuClass(Fraction(1, 8), ()), w)


def test_dominance_failure_when_gain_too_small():
    frame = DescentFrame(RANK0)
    frame._gains[(0, 0)] = Fraction(4)  # no better than the multiplier pibar^2
    with pytest.raises(DominanceFailure):
        invert_gamma_minus_one(0, 0, CharPElem.monomial(RANK0, 2) * HALF0, frame)


def test_multiplier_beyond_window():
    w = PrecisionWindow(2, 2, 1, -1, 1, 0)
    with pytest.raises(PrecisionExhausted):
        class_multiplier(DescentFrame(w).power(0, 0), MuClass(Fraction(1, 2), ()), w)


# -- splitting -------------------------------------------------------------

def test_split_lower_index_is_fixed():
    rng = random.Random(0)
    x = class_element(RANK1, rng, 0, 0)
    y, z = split_element(1, 0, x, F1)
    assert y == x and z.is_zero()


def test_split_pure_class_reduces_to_inverse():
    x = CharPElem.monomial(RANK0, 2) * HALF0
    y, z = split_element(0, 0, x, F0)
    assert y.is_zero() and (z - HALF0).is_zero()


def test_split_mixed_matches_per_class():
    s = CharPElem.monomial(RANK1, 0, (Fraction(1, 2),))
    a = CharPElem.monomial(RANK1, 3) * s
    b = CharPElem.monomial(RANK1, 4) * HALF1 * s
    y, z = split_element(1, 0, a + b, F1)
    za = invert_gamma_minus_one(1, 0, a, F1)
    zb = invert_gamma_minus_one(1, 0, b, F1)
    assert y.is_zero()
    assert (z - za - zb).is_zero()


@pytest.mark.parametrize("i", [0, 1])
def test_split_recombines(i):
    rng = random.Random(40 + i)
    T = F1.power(i, 0)
    for _ in range(100):
        x = random_element(RANK1, rng, nterms=4, max_pibar=6)
        y, z = split_element(i, 0, x, F1)
        assert (y + gamma_act_charp(T, z) - z - x).is_zero()
        assert not any(mu.index() == i for mu in mu_decompose(y))
        inside = class_components(x, i)[0]
        if not z.is_zero():
            assert z.valuation() >= inside.valuation() - inversion_loss(i, 0, inside, F1)


# -- matrices --------------------------------------------------------------

def test_descend_identity():
    one = [[CharPElem.one(RANK0)]]
    res = descend_matrix(one, 0, 0, frame=F0)
    assert res.U == one and res.residual == one and res.certified


def test_descend_one_by_one():
    G = [[CharPElem.one(RANK0) + CharPElem.monomial(RANK0, 6) * HALF0]]
    res = descend_matrix(G, 0, 0, frame=F0)
    assert res.certified and len(res.log) <= 30
    assert [v for _, v in res.log] == sorted({v for _, v in res.log})
    assert class_components(res.residual[0][0], 0)[0].is_zero()
    assert mat_valuation(mat_sub(res.U, [[CharPElem.one(RANK0)]])) >= 12 - res.loss


def test_descend_margin_is_enforced():
    G = [[CharPElem.one(RANK0) + CharPElem.monomial(RANK0, 2) * HALF0]]
    with pytest.raises(DominanceFailure):
        descend_matrix(G, 0, 0, frame=F0)


def test_descend_diagonal_matches_entries():
    rng = random.Random(5)
    G = near_identity(RANK0, rng, 2, 0, 5, diagonal=True)
    res = descend_matrix(G, 0, 0, frame=F0)
    assert res.certified
    for k in range(2):
        single = descend_matrix([[G[k][k]]], 0, 0, frame=F0)
        assert (single.U[0][0] - res.U[k][k]).is_zero()
        assert (single.residual[0][0] - res.residual[k][k]).is_zero()


@pytest.mark.parametrize("size,frame,i", [(1, F0, 0), (2, F0, 0), (2, F1, 1), (2, F1, 0)])
def test_descend_random(size, frame, i):
    rng = random.Random(size * 7 + i)
    for _ in range(3):
        G = near_identity(frame.window, rng, size, i, 5)
        res = descend_matrix(G, i, 0, frame=frame)
        assert res.certified
        vals = [v for _, v in res.log]
        assert all(a < b for a, b in zip(vals, vals[1:]))


# -- modules ---------------------------------------------------------------

def _identity(w, r):
    return [[CharPElem.one(w) if a == b else CharPElem.zero(w) for b in range(r)] for a in range(r)]


def test_deperfect_already_imperfect():
    one = _identity(RANK1, 2)
    out = deperfect_module(one, [one, one], F1)
    assert out.passes == 0 and mat_agrees(out.U, one)


def test_deperfect_single_index():
    V = [[CharPElem.one(RANK1) + CharPElem.monomial(RANK1, 5) * HALF1]]
    F, Gs = perturbed_module(V, F1)
    out = deperfect_module(F, Gs, F1)
    assert [i for i, _ in out.h_used] == [0]
    for M in [out.F] + out.gammas:
        x = M[0][0]
        assert (trivial_class_projection(x) - x).is_zero()


def test_deperfect_two_indices():
    s = CharPElem.monomial(RANK1, 0, (Fraction(1, 2),))
    V = [[CharPElem.one(RANK1) + CharPElem.monomial(RANK1, 5) * HALF1 + CharPElem.monomial(RANK1, 6) * s]]
    F, Gs = perturbed_module(V, F1)
    out = deperfect_module(F, Gs, F1)
    assert [i for i, _ in out.h_used] == [1, 0]
    for M in [out.F] + out.gammas:
        assert all(x.has_integer_exponents() for row in M for x in row)


def test_deperfect_two_by_two():
    rng = random.Random(8)
    V = near_identity(RANK1, rng, 2, 0, 5)
    F, Gs = perturbed_module(V, F1)
    out = deperfect_module(F, Gs, F1)
    for M in [out.F] + out.gammas:
        for row in M:
            for x in row:
                assert (trivial_class_projection(x) - x).is_zero()


def test_deperfect_rejects_incompatible():
    one = _identity(RANK1, 1)
    bad = [[CharPElem.one(RANK1) + CharPElem.monomial(RANK1, 5) * HALF1]]
    with pytest.raises(CommutationFailure):
        deperfect_module(one, [bad, one], F1)


# -- Fourier ---------------------------------------------------------------

R = CycloRing(2, 2, 3, 2, 2)


def _random_doubled(rng, ring=R):
    terms = {}
    for _ in range(4):
        q = rng.randrange(ring.p ** ring.tden)
        terms[(rng.randrange(ring.dim), (q, rng.randrange(-4, 5)))] = rng.randrange(ring.mod)
    return ring.elem(terms)


def test_fourier_constant_along_characters():
    x = R.toric((0, Fraction(3, 4))) * R.zeta(1) + R.const(3)
    comps = fourier_decompose(x, 2)
    assert [c.nu for c in comps] == [(0,)]


def test_fourier_single_character():
    comps = fourier_decompose(R.toric((Fraction(1, 4), 0)), 2)
    assert [(c.nu, c.value) for c in comps] == [((1,), comps[0].value.ring.one())]


def test_fourier_matches_grouping_oracle():
    rng = random.Random(2)
    for _ in range(30):
        x = _random_doubled(rng)
        comps = {c.nu: c.value for c in fourier_decompose(x, 2)}
        expected = fourier_by_grouping(x.terms, 1, R.p, R.tden, 2)
        base = next(iter(comps.values())).ring if comps else None
        assert set(comps) == {nu for nu, t in expected.items() if base is None or not base.elem(t).is_zero()}
        for nu, t in expected.items():
            if nu in comps:
                assert comps[nu] == base.elem(t)


def test_fourier_resum_and_loss():
    rng = random.Random(4)
    for m, ring in [(1, CycloRing(3, 1, 2, 2, 1)), (2, R)]:
        for _ in range(10):
            x = _random_doubled(rng, ring)
            assert fourier_resum(fourier_decompose(x, m), ring, m) == x
            assert fourier_loss(x, m) <= m


def test_fourier_level_too_high():
    with pytest.raises(PrecisionExhausted):
        fourier_decompose(R.one(), 3)


def test_fourier_equivariance():
    rng = random.Random(6)
    for _ in range(20):
        x = _random_doubled(rng)
        g = GammaElem(rng.choice([1, 3, 5, 7]), (rng.randrange(4), rng.randrange(4)), 4)
        gx, gb = x.gamma_act(g), base_gamma(g)
        for lam in range(4):
            nu = act_on_index(g, (lam,), 2, 2)
            assert evaluate_at(x, (lam,)).gamma_act(gb) == evaluate_at(gx, nu)


def test_split_refinement_examples():
    a, b = R.toric((0, Fraction(1, 2))) * 3, R.zeta(1) * R.toric((0, -1))
    root = R.toric((Fraction(1, 2), 0))
    assert split_refinement(a) == a
    assert split_refinement(root).is_zero()
    assert split_refinement(a + b * root) == a


def test_split_refinement_properties():
    rng = random.Random(9)
    for _ in range(100):
        x = _random_doubled(rng) + R.toric((1, 0)) * rng.randrange(1, 8)
        a = R.toric((0, Fraction(rng.randrange(-4, 5), 4))) * R.zeta(rng.randrange(4))
        s = split_refinement(x)
        assert split_refinement(s) == s
        assert split_refinement(a * x) == a * s
        assert s.is_zero() or s.p_valuation() >= x.p_valuation()
