"""Property batches run by the `suite` command. Each batch draws its inputs
from a seeded generator and returns how many checks ran and which failed."""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb

from .charp import (
    CharPElem, PrecisionWindow, analyticity_constant, frobenius, gamma_act_charp, gamma_bound,
    mu_decompose, one_plus_pibar_power, random_element, standard_samples,
)
from .cones import Cone, dual_cone, hilbert_basis
from .descent import (
    DescentFrame, class_components, descend_matrix, fourier_decompose, fourier_resum,
    split_element, split_refinement,
)
from .fields import GaloisRing
from .gamma import GammaElem
from .phimod import ExactScalars, PhiModule, koszul_from_operators, newton_slopes, trivialize, twist
from .wittperiod import (
    CycloRing, WittElem, pi_elem, t_functional_defect, teichmuller, theta_eval, theta_ring,
    twist_multiplier, z_elem,
)


@dataclass
class BatchReport:
    module: str
    checks: int = 0
    failures: list = field(default_factory=list)

    def check(self, name, ok):
        self.checks += 1
        if not ok:
            self.failures.append(name)

    def to_json(self):
        return {"module": self.module, "checks": self.checks, "failures": list(self.failures)}


def _cones(rng, rep):
    for gens in ([(1, 0), (1, 2)], [(2, 1), (1, 2)], [(1, 0, 0), (0, 1, 0), (1, 1, 2)]):
        c = Cone.of(gens)
        rep.check(f"hilbert {gens}", hilbert_basis(c).verify())
        rep.check(f"double dual {gens}", dual_cone(dual_cone(c)) == c)


def _charp(rng, rep):
    w = PrecisionWindow(2, 2, 2, 0, 40, 0)
    for k in range(50):
        x = random_element(w, rng, 4, max_pibar=3)
        parts = mu_decompose(x)
        rep.check(f"mu roundtrip {k}", sum(parts.values(), CharPElem.zero(w)) == x)
        for mu, part in parts.items():
            rep.check(f"frobenius class {k}", set(mu_decompose(frobenius(part))) == {mu.times(2)})
    w = PrecisionWindow(2, 2, 0, 0, 18, 0)
    samples = standard_samples(w)
    c = analyticity_constant(2, samples)
    rep.check("gamma decay", gamma_bound(3, samples) >= Fraction(16) - c)


def _witt(rng, rep):
    w = PrecisionWindow(2, 2, 0, 0, 4, 0)
    mod = 8
    for a, b in product(range(mod), repeat=2):
        x, y = WittElem.from_int(w, 3, a), WittElem.from_int(w, 3, b)
        rep.check(f"W_3 {a}+{b}", (x + y).agrees(WittElem.from_int(w, 3, (a + b) % mod)))
        rep.check(f"W_3 {a}*{b}", (x * y).agrees(WittElem.from_int(w, 3, a * b % mod)))
    for p, N in ((2, 2), (3, 2)):
        w = PrecisionWindow(p, p, 1, 0, 2 * p ** (N - 1), 4, ())
        rep.check(f"theta z p={p}", theta_eval(z_elem(w, N), N).is_zero())
        rep.check(f"theta pi p={p}", theta_eval(pi_elem(w, N), N).is_zero())
        w = PrecisionWindow(p, p, 2, 0, 2 * p ** N, 4, ())
        ring = theta_ring(w, N)
        for n in range(3):
            x = teichmuller(one_plus_pibar_power(w, Fraction(1, p ** n)), N)
            rep.check(f"theta root p={p} n={n}", theta_eval(x, N) == ring.zeta(p ** (ring.m - n)))
    val, bound, _ = t_functional_defect(2, 8)
    rep.check("t functional equation", val >= bound)


def _gamma(rng, rep):
    p, A = 2, 6
    mod = p ** A
    for k in range(30):
        g = GammaElem(rng.randrange(1, mod, 2), (rng.randrange(mod),), A)
        h = GammaElem(rng.randrange(1, mod, 2), (rng.randrange(mod),), A)
        rep.check(f"inverse {k}", g.compose(g.inverse(p), p).is_identity(p))
        w = PrecisionWindow(2, 2, 1, 0, 12, 2, (Fraction(0),))
        x = random_element(w, rng, 3, max_pibar=4)
        lhs = gamma_act_charp(g.compose(h, p), x)
        rhs = gamma_act_charp(g, gamma_act_charp(h, x))
        rep.check(f"action {k}", (lhs - rhs).is_zero())


def _phimod(rng, rep):
    for d in (1, 2, 3):
        M = PhiModule(ExactScalars(2), d, [[twist_multiplier(2, d)]])
        rep.check(f"twist slope d={d}", newton_slopes(M).slopes == (Fraction(1, d),))
    M = PhiModule(ExactScalars(3), 1, [[1]])
    rep.check("t twist slope", newton_slopes(twist(M, 1)).slopes == (Fraction(1),))
    R = GaloisRing(2, 2, 1)
    rep.check("trivialize F=3", trivialize(PhiModule(R, 1, [[(3,)]])).k == 2)
    for r in (1, 2, 3):
        ops = [[[0]] for _ in range(r)]
        H = koszul_from_operators(ops, 2, 1)
        rep.check(f"koszul r={r}", [len(h) for h in H] == [comb(r, i) for i in range(r + 1)])


def _descent(rng, rep):
    w = PrecisionWindow(2, 2, 1, -4, 16, 6, (Fraction(0),))
    frame = DescentFrame(w)
    for k in range(20):
        x = random_element(w, rng, 4, max_pibar=6)
        for i in (0, 1):
            y, z = split_element(i, 0, x, frame)
            T = frame.power(i, 0)
            rep.check(f"split {k}/{i}", (y + gamma_act_charp(T, z) - z - x).is_zero())
    one = CharPElem.one(w)
    for k in range(5):
        e = random_element(w, rng, 3, max_pibar=3)
        inside, _ = class_components(e, 0)
        G = [[one + inside * CharPElem.monomial(w, 5)]]
        rep.check(f"descend {k}", descend_matrix(G, 0, 0, frame=frame).certified)
    R = CycloRing(2, 2, 3, 2, 2)
    for k in range(10):
        terms = {(rng.randrange(R.dim), (rng.randrange(4), rng.randrange(-4, 5))): rng.randrange(1, 8)
                 for _ in range(4)}
        x = R.elem(terms)
        rep.check(f"fourier {k}", fourier_resum(fourier_decompose(x, 2), R, 2) == x)
        s = split_refinement(x)
        rep.check(f"splitref {k}", split_refinement(s) == s)


BATCHES = {
    "cones": _cones,
    "charp": _charp,
    "wittperiod": _witt,
    "gamma": _gamma,
    "phimod": _phimod,
    "descent": _descent,
}


def run_suite(which="all", seed=0):
    names = list(BATCHES) if which == "all" else [which]
    reports = []
    for name in names:
        if name not in BATCHES:
            raise KeyError(name)
        rep = BatchReport(name)
        BATCHES[name](random.Random(f"{seed}:{name}"), rep)
        reports.append(rep)
    return reports
