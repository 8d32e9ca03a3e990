"""Random inputs for the descent tests and the acceptance suite."""

from fractions import Fraction

from artifact.charp import CharPElem, PrecisionWindow, frobenius, random_element
from artifact.descent import (
    DescentFrame, act_matrix, class_components, invert_near_identity, mat_map, mat_mul,
)

RANK0 = PrecisionWindow(2, 2, 1, -4, 24, 0)
RANK1 = PrecisionWindow(2, 2, 1, -4, 16, 6, (Fraction(0),))


def class_element(window, rng, i, shift, nterms=3):
    """Nonzero index-i element times pibar^shift."""
    while True:
        x = random_element(window, rng, nterms=nterms, max_pibar=3)
        inside, _ = class_components(x, i)
        if not inside.is_zero():
            return inside * CharPElem.monomial(window, shift)


def near_identity(window, rng, size, i, shift, diagonal=False):
    one, zero = CharPElem.one(window), CharPElem.zero(window)
    G = []
    for a in range(size):
        row = []
        for b in range(size):
            if a != b and diagonal:
                row.append(zero)
                continue
            e = class_element(window, rng, i, shift)
            row.append(one + e if a == b else e)
        G.append(row)
    return G


def perturbed_module(V, frame):
    """Frobenius and gamma matrices of the trivial module in the basis V."""
    Vi = invert_near_identity(V)
    F = mat_mul(Vi, mat_map(frobenius, V))
    Gs = [mat_mul(Vi, act_matrix(g, V)) for g in frame.generators]
    return F, Gs


def frame(window):
    return DescentFrame(window)
