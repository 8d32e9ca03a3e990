import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from artifact.cones import (
    Cone, Frame, Lattice, ToricMap, dual_cone, framed_graph, gauss_valuation, hilbert_basis,
    is_toric_refinement, projective_space_fan, tropicalize, Fan,
)
from artifact.errors import DimensionMismatch, DimensionTooLarge, IncompatibleCones
from artifact.numbers import INF
from oracles import CONE_CATALOG, brute_hilbert_basis, cone_membership


def cone(gens, n=None):
    return Cone.of(gens, n)


def test_orthant_is_self_dual():
    for n in (1, 2, 3):
        assert dual_cone(Cone.orthant(n)) == Cone.orthant(n)


def test_dual_of_zero_cone_is_whole_space():
    d = dual_cone(Cone.zero(2))
    assert d.is_full_lattice()
    assert sorted(hilbert_basis(d).hilbert_basis) == sorted([(1, 0), (-1, 0), (0, 1), (0, -1)])


def test_dual_worked_example():
    assert set(dual_cone(cone([(1, 0), (1, 2)])).generators) == {(0, 1), (2, -1)}


@pytest.mark.parametrize("n,gens", CONE_CATALOG)
def test_dual_against_grid(n, gens):
    d = dual_cone(cone(gens, n))
    member = cone_membership(list(d.generators))
    for x in product(range(-6, 7), repeat=n):
        expected = all(sum(a * b for a, b in zip(x, g)) >= 0 for g in gens)
        assert member(x) == expected, x


@pytest.mark.parametrize("n,gens", [c for c in CONE_CATALOG if c[0] == len(c[1]) or c[0] < 3])
def test_double_dual(n, gens):
    c = cone(gens, n)
    assert dual_cone(dual_cone(c)) == c


def test_hilbert_basis_examples():
    assert hilbert_basis(Cone.orthant(2)).hilbert_basis == ((0, 1), (1, 0))
    assert set(hilbert_basis(cone([(0, 1), (2, -1)])).hilbert_basis) == {(0, 1), (1, 0), (2, -1)}


@pytest.mark.parametrize("n,gens", CONE_CATALOG)
def test_hilbert_basis_matches_brute_force(n, gens):
    mon = hilbert_basis(cone(gens, n))
    assert sorted(mon.hilbert_basis) == brute_hilbert_basis(gens, n)
    assert mon.verify(bound=4 if n == 3 else 8)


def test_hilbert_basis_rank_bound():
    with pytest.raises(DimensionTooLarge):
        hilbert_basis(Cone.orthant(7))


def test_generators_are_normalized():
    c = cone([(2, 0), (1, 0), (0, 3)])
    assert set(c.generators) == {(1, 0), (0, 1)}


def test_gauss_valuation_examples():
    assert gauss_valuation({(1, 1): 1}, (1, 2)) == 3
    assert gauss_valuation({}, (1, 2)) is INF
    assert gauss_valuation({(1, 0): 1, (0, 1): 1}, (2, 5)) == 2
    with pytest.raises(DimensionMismatch):
        gauss_valuation({(1, 0): 1}, (1, 2, 3))


monomials = st.dictionaries(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), st.integers(1, 6),
                            min_size=1, max_size=4)
weights = st.tuples(st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))


def _mul(x, y):
    out = {}
    for s, a in x.items():
        for t, b in y.items():
            k = (s[0] + t[0], s[1] + t[1])
            out[k] = out.get(k, 0) + a * b
    return {k: v for k, v in out.items() if v}


def _add(x, y):
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


@settings(max_examples=200, deadline=None)
@given(monomials, monomials, weights)
def test_gauss_valuation_is_a_valuation(x, y, w):
    # over Q with the p-adic part included, the weighted Gauss valuation is multiplicative
    p = 7
    vx, vy = gauss_valuation(x, w, p), gauss_valuation(y, w, p)
    assert gauss_valuation(_mul(x, y), w, p) == vx + vy
    s = _add(x, y)
    if s:
        assert gauss_valuation(s, w, p) >= min(vx, vy)


def test_tropicalize():
    f = Frame.laurent(2, (1, 2))
    assert tropicalize(f, (1, 1)) == 3
    assert tropicalize(f, (0, 0)) == 0
    assert tropicalize(Frame.laurent(2), (5, -3)) == 0


def _proj(n_src, n_tgt):
    return ToricMap(Lattice(n_src), Lattice(n_tgt), tuple(tuple(int(i == j) for j in range(n_src)) for i in range(n_tgt)))


def test_refinement_examples():
    ok, t = is_toric_refinement(_proj(2, 1), Frame.polynomial(2), Frame.polynomial(1))
    assert ok and len(t) == 1
    ok, _ = is_toric_refinement(ToricMap(Lattice(1), Lattice(1), ((2,),)), Frame.polynomial(1), Frame.polynomial(1))
    assert not ok
    ok, t = is_toric_refinement(ToricMap(Lattice(2), Lattice(2), ((1, 0), (0, 1))),
                                Frame.polynomial(2), Frame.polynomial(2))
    assert ok and t == ()


def test_refinement_rejects_incompatible_cones():
    m = ToricMap(Lattice(1), Lattice(1), ((-1,),))
    with pytest.raises(IncompatibleCones):
        is_toric_refinement(m, Frame.polynomial(1), Frame.polynomial(1))


def test_diagonal_sum_map():
    m = ToricMap(Lattice(2), Lattice(1), ((1, 1),))
    assert is_toric_refinement(m, Frame.laurent(2), Frame.laurent(1))[0]
    assert not is_toric_refinement(m, Frame.polynomial(2), Frame.polynomial(1))[0]


def test_framed_graph_examples():
    g, p1, p2 = framed_graph(Frame.polynomial(1), Frame.polynomial(1))
    assert g.sigma == Cone.orthant(2)
    assert p1.matrix == ((1, 0),) and p2.matrix == ((0, 1),)
    g, _, _ = framed_graph(Frame.laurent(1), Frame.polynomial(1))
    assert set(g.sigma.generators) == {(0, 1)}


def _random_frame(rng, n):
    kind = rng.choice(["laurent", "polynomial", "mixed", "cone"])
    w = tuple(Fraction(rng.randrange(-3, 4), rng.choice([1, 2])) for _ in range(n))
    if kind == "laurent":
        return Frame.laurent(n, w)
    if kind == "polynomial":
        return Frame.polynomial(n, w)
    if kind == "mixed":
        return Frame(Cone.of([tuple(int(i == j) for j in range(n)) for i in range(rng.randrange(n + 1))], n), w)
    if n == 2:
        return Frame(cone([(1, 0), (1, 2)]), w)
    return Frame.polynomial(n, w)


def test_framed_graph_projections_are_refinements():
    rng = random.Random(7)
    for _ in range(20):
        f1 = _random_frame(rng, rng.randrange(1, 3))
        f2 = _random_frame(rng, rng.randrange(1, 4 - f1.rank))
        g, p1, p2 = framed_graph(f1, f2)
        assert g.rank == f1.rank + f2.rank
        assert g.weight == f1.weight + f2.weight
        assert is_toric_refinement(p1, g, f1)[0]
        assert is_toric_refinement(p2, g, f2)[0]


def test_projective_plane_fan():
    assert projective_space_fan(2).is_compatible()
    bad = Fan([cone([(1, 0), (0, 1)]), cone([(1, 1), (-1, 2)])])
    assert not bad.is_compatible()


def test_frame_json_roundtrip():
    f = Frame(cone([(1, 0), (1, 2)]), (Fraction(1, 2), 3))
    assert Frame.from_json(f.to_json()) == f
    assert Frame.laurent(2).boundary_free and not f.boundary_free
