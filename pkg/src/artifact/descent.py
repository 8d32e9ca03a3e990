"""Deperfection over the characteristic-p coefficient ring and the Fourier
decomposition of doubled toric frames.

Class generators are the U_2 generators gamma_0 = (1 + p^2, 0) and
gamma_i = (1, p^2 e_i). On a mu-class component f * b (f with integer
exponents, b = (1+pibar)^e s^v the class basis element) the power
T = gamma_i^(p^h) acts as

    T(f b) = T(f) (1+pibar)^N b,   N = (gamma0_T - 1) e + <nu_T, v>,

so T - 1 = ((1+pibar)^N - 1) + (small), and it is inverted by a Neumann
iteration around the multiplier m = (1+pibar)^N - 1 as long as T gains more
valuation on integer-exponent elements than m costs.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .charp import (
    CharPElem, MuClass, frobenius, gamma_act_charp, mu_decompose, mu_project, standard_samples, unit_generators,
)
from .errors import (
    CommutationFailure, DominanceFailure, NonConvergence, PrecisionExhausted, PreconditionError,
)
from .gamma import GammaElem
from .numbers import INF

MAX_DESCENT_STEPS = 30
MAX_NEUMANN_STEPS = 200


# ---------------------------------------------------------------------------
# frames: generators, precision and measured constants

def _precision_for(window, extra=12):
    p = window.p
    A = window.mden + extra
    while p ** A <= window.hi_num - window.lo_num + 2:
        A += 1
    return A


class DescentFrame:
    """Class generators at a fixed p-adic precision for one window, with the
    measured valuation gains of their p-power iterates."""

    def __init__(self, window, A=None):
        self.window = window
        self.A = A or _precision_for(window)
        self.generators = unit_generators(window.p, 2, window.rank, self.A)
        self._gains = {}

    @property
    def p(self):
        return self.window.p

    def generator(self, i):
        if not 0 <= i < len(self.generators):
            raise PreconditionError(f"class index {i} out of range for rank {self.window.rank}")
        return self.generators[i]

    def power(self, i, h):
        return self.generator(i).power(self.p ** h, self.p)

    def gain(self, i, h):
        """Lower bound for v(T x - x) - v(x) over integer-exponent x, T = gamma_i^(p^h).

        gamma - 1 is a twisted derivation, so the minimum over pibar, 1 + pibar
        and the s_i^(+-1) bounds it on every Laurent monomial and hence on sums."""
        key = (i, h)
        if key not in self._gains:
            T = self.power(i, h)
            best = INF
            for x in standard_samples(self.window):
                diff = gamma_act_charp(T, x) - x
                v = diff.valuation() if not diff.is_zero() else diff.floor
                if v is not INF:
                    best = min(best, v - x.valuation())
            self._gains[key] = best
        return self._gains[key]


def _frame_for(x, frame):
    if frame is None:
        return DescentFrame(x.window)
    if frame.window != x.window:
        raise PreconditionError("frame and element live in different windows")
    return frame


def _one_plus_pibar_to(window, N):
    """(1+pibar)^N for an integer N >= 0, digit by digit (char p)."""
    p = window.p
    out = CharPElem.one(window)
    k = 0
    while N:
        N, d = divmod(N, p)
        if d:
            factor = CharPElem.one(window) + CharPElem.monomial(window, p ** k)
            out = out * factor ** d
        k += 1
    return out


def class_multiplier(T, mu, window):
    """m = (1+pibar)^N - 1 for the class mu under T; N must be an integer."""
    D, p = window.den, window.p
    mod = p ** T.A
    j = mu.e_class * D
    v = [t * D for t in mu.toric_class]
    ND = int(j) * (T.gamma0 % mod - 1) + sum(n * int(b) for n, b in zip(T.nu, v)) % mod
    if ND % D:
        raise DominanceFailure(f"T does not fix the class {mu}; increase h")
    N = ND // D
    if N == 0:
        raise DominanceFailure(f"T acts trivially on the class {mu}")
    m = _one_plus_pibar_to(window, N) - 1
    if m.is_zero():
        raise PrecisionExhausted(f"the multiplier of class {mu} lies beyond the window")
    return m


def class_components(x, i):
    """Sum of the mu-components of x of index i, and the rest."""
    parts = mu_decompose(x)
    w = x.window
    inside = CharPElem.zero(w, x.floor)
    for mu, c in parts.items():
        if mu.index() == i:
            inside = inside + c
    return inside, x - inside


def _has_index(x, i):
    return any(mu.index() == i for mu in mu_decompose(x))


def invert_gamma_minus_one(i, h, x, frame=None):
    """z in the index-i classes with (gamma_i^(p^h) - 1) z = x up to the floor."""
    frame = _frame_for(x, frame)
    w = x.window
    if x.is_zero():
        return CharPElem.zero(w, x.floor)
    T = frame.power(i, h)
    gain = frame.gain(i, h)
    out = CharPElem.zero(w)
    for mu, comp in mu_decompose(x).items():
        if mu.index() != i:
            raise PreconditionError(f"component in class {mu} has index {mu.index()}, not {i}")
        m = class_multiplier(T, mu, w)
        vm = m.valuation()
        if not gain > vm:
            raise DominanceFailure(
                f"gain {gain} of gamma_{i}^(p^{h}) does not exceed the multiplier valuation {vm} "
                f"for class {mu}")
        minv = m.inverse()
        z = comp * minv
        for _ in range(MAX_NEUMANN_STEPS):
            r = comp - (gamma_act_charp(T, z) - z)
            if r.is_zero():
                # an invisible residual below r.floor leaves z uncertain at r.floor - v(m)
                if r.floor is not INF:
                    z = z.with_floor(r.floor - vm)
                break
            z = z + r * minv
        else:
            raise NonConvergence(f"Neumann series for class {mu} did not settle")
        # the floor can cut a class basis element in half; the preimage lives in mu
        part = mu_project(z, mu)
        if z.floor is not INF:
            part = part.with_floor(z.floor - (w.den - 1) * w.pibar_val / w.den)
        out = out + part
    return out


def inversion_loss(i, h, x, frame=None):
    """Largest multiplier valuation over the index-i classes of x (log_p of the
    inverse's norm)."""
    frame = _frame_for(x, frame)
    T = frame.power(i, h)
    loss = Fraction(0)
    for mu in mu_decompose(x):
        if mu.index() == i:
            loss = max(loss, class_multiplier(T, mu, x.window).valuation())
    return loss


def split_element(i, h, x, frame=None):
    """x = y + (gamma_i^(p^h) - 1) z with z in index-i classes and y free of them."""
    frame = _frame_for(x, frame)
    inside, _ = class_components(x, i)
    if inside.is_zero():
        return x, CharPElem.zero(x.window)
    z = invert_gamma_minus_one(i, h, inside, frame)
    T = frame.power(i, h)
    y = x - (gamma_act_charp(T, z) - z)
    if _has_index(y, i):
        raise NonConvergence("split left index-i components behind")
    return y, z


# ---------------------------------------------------------------------------
# matrices over CharPElem

def _identity(window, r):
    return [[CharPElem.one(window) if a == b else CharPElem.zero(window) for b in range(r)] for a in range(r)]


def mat_mul(A, B):
    r, k, c = len(A), len(B), len(B[0])
    out = []
    for a in range(r):
        row = []
        for b in range(c):
            acc = A[a][0] * B[0][b]
            for t in range(1, k):
                acc = acc + A[a][t] * B[t][b]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_map(fn, A):
    return [[fn(x) for x in row] for row in A]


def mat_valuation(A):
    """Smallest entry valuation, reading masked zero entries at their floor."""
    best = INF
    for row in A:
        for x in row:
            v = x.valuation() if not x.is_zero() else x.floor
            best = min(best, v)
    return best


def mat_is_zero(A):
    return all(x.is_zero() for row in A for x in row)


def mat_agrees(A, B):
    return mat_is_zero(mat_sub(A, B))


def invert_near_identity(U):
    """U^-1 = sum_k (1 - U)^k for v(U - 1) > 0."""
    w = U[0][0].window
    r = len(U)
    one = _identity(w, r)
    eps = mat_sub(one, U)
    if not mat_is_zero(eps) and mat_valuation(eps) <= 0:
        raise PreconditionError("matrix is not close to the identity")
    total, term = one, one
    for _ in range(MAX_NEUMANN_STEPS):
        term = mat_mul(term, eps)
        if mat_is_zero(term):
            return mat_map(lambda x: x.with_floor(min(x.floor, mat_floor(term))), total)
        total = mat_add(total, term)
    raise NonConvergence("Neumann series for the matrix inverse did not terminate")


def mat_floor(A):
    return min((x.floor for row in A for x in row), default=INF)


def act_matrix(g, A):
    return mat_map(lambda x: gamma_act_charp(g, x), A)


def cocycle_power(G, g, k, p):
    """Matrix of g^k given the matrix G of g: G g(G) ... g^(k-1)(G)."""
    w = G[0][0].window
    result, rg = _identity(w, len(G)), GammaElem.identity(g.rank, g.A)
    base, bg = G, g
    while k:
        if k & 1:
            result = mat_mul(result, act_matrix(rg, base))
            rg = rg.compose(bg, p)
        base = mat_mul(base, act_matrix(bg, base))
        bg = bg.compose(bg, p)
        k >>= 1
    return result


def change_basis(G, U, act):
    """U^-1 G act(U)."""
    return mat_mul(mat_mul(invert_near_identity(U), G), mat_map(act, U))


@dataclass
class DescentState:
    i: int
    U_accum: list
    residual: list
    iteration_log: list = field(default_factory=list)


@dataclass(frozen=True)
class DescentResult:
    U: list
    residual: list
    log: tuple
    certified: bool
    loss: Fraction


def descend_matrix(G, i, h, tolerance=None, frame=None):
    """U with U^-1 G T(U) free of index-i classes (T = gamma_i^(p^h)), by
    U_{l+1} = U_l (1 - Y_l) where Y_l inverts T - 1 on the index-i part."""
    w = G[0][0].window
    frame = frame or DescentFrame(w)
    r = len(G)
    one = _identity(w, r)
    T = frame.power(i, h)
    act = lambda x: gamma_act_charp(T, x)
    eps0 = mat_sub(G, one)
    state = DescentState(i, one, G)
    if mat_is_zero(eps0):
        return DescentResult(one, G, (), True, Fraction(0))
    v0 = mat_valuation(eps0)
    loss = max((inversion_loss(i, h, x, frame) for row in eps0 for x in row), default=Fraction(0))
    if not v0 > 2 * loss:
        raise DominanceFailure(f"v(G - 1) = {v0} needs to exceed twice the inversion loss {loss}")
    last = None
    for l in range(MAX_DESCENT_STEPS + 1):
        eps = mat_sub(state.residual, one)
        parts = [[class_components(x, i)[0] for x in row] for row in eps]
        if all(_below(x, tolerance) for row in parts for x in row):
            break
        if l == MAX_DESCENT_STEPS:
            raise NonConvergence(f"index-{i} part survived {MAX_DESCENT_STEPS} steps; log {state.iteration_log}")
        Y = [[invert_gamma_minus_one(i, h, x, frame) for x in row] for row in parts]
        vY = mat_valuation(Y)
        state.iteration_log.append((l, vY))
        if last is not None and not vY > last:
            raise NonConvergence(f"valuations stopped increasing: {state.iteration_log}")
        last = vY
        step = mat_sub(one, Y)
        state.U_accum = mat_mul(state.U_accum, step)
        state.residual = mat_mul(mat_mul(invert_near_identity(step), state.residual), mat_map(act, step))
    fresh = change_basis(G, state.U_accum, act)
    certified = mat_agrees(fresh, state.residual) and all(
        _below(class_components(x, i)[0], tolerance) for row in mat_sub(fresh, one) for x in row)
    return DescentResult(state.U_accum, state.residual, tuple(state.iteration_log), certified, loss)


def _below(x, tolerance):
    if x.is_zero():
        return True
    return tolerance is not None and x.valuation() >= tolerance


# ---------------------------------------------------------------------------
# full modules

@dataclass(frozen=True)
class DeperfectedModule:
    F: list
    gammas: list
    U: list
    h_used: tuple
    passes: int


def _check_compatible(F, Gs, frame):
    p = frame.p
    gens = frame.generators
    for G, g in zip(Gs, gens):
        lhs = mat_mul(G, act_matrix(g, F))
        rhs = mat_mul(F, mat_map(frobenius, G))
        if not mat_agrees(lhs, rhs):
            raise CommutationFailure("a gamma matrix does not commute with Frobenius")
    for j in range(1, len(Gs)):
        for k in range(j + 1, len(Gs)):
            lhs = mat_mul(Gs[j], act_matrix(gens[j], Gs[k]))
            rhs = mat_mul(Gs[k], act_matrix(gens[k], Gs[j]))
            if not mat_agrees(lhs, rhs):
                raise CommutationFailure(f"gamma_{j} and gamma_{k} matrices do not commute")
    g0 = gens[0]
    c = g0.gamma0
    for k in range(1, len(Gs)):
        lhs = mat_mul(Gs[0], act_matrix(g0, Gs[k]))
        gk_c = gens[k].power(c, p)
        rhs = mat_mul(cocycle_power(Gs[k], gens[k], c, p), act_matrix(gk_c, Gs[0]))
        if not mat_agrees(lhs, rhs):
            raise CommutationFailure(f"gamma_0 and gamma_{k} matrices violate the semidirect relation")


def _max_index(mats):
    best = -1
    for M in mats:
        for row in M:
            for x in row:
                for mu in mu_decompose(x):
                    best = max(best, mu.index())
    return best


def deperfect_module(F, Gs, frame=None, h_cap=6):
    """Change basis so that Frobenius and every gamma_j act through integer-
    exponent (imperfect) matrices: for i = n, ..., 0 descend the matrix of
    gamma_i^(p^h) and check that F and all G_j lose their index-i parts."""
    w = F[0][0].window
    frame = frame or DescentFrame(w)
    p = frame.p
    if len(Gs) != w.rank + 1:
        raise PreconditionError(f"expected {w.rank + 1} gamma matrices")
    _check_compatible(F, Gs, frame)
    r = len(F)
    U_total = _identity(w, r)
    h_used = []
    passes = 0
    h0 = max(0, w.mden - 2)
    for i in range(w.rank, -1, -1):
        if _max_index([F] + list(Gs)) < i:
            continue
        gi = frame.generator(i)
        failure = None
        for h in range(h0, h0 + h_cap + 1):
            H = cocycle_power(Gs[i], gi, p ** h, p)
            try:
                res = descend_matrix(H, i, h, frame=frame)
            except DominanceFailure as exc:
                failure = exc
                continue
            U = res.U
            F_new = change_basis(F, U, frobenius)
            G_new = [change_basis(G, U, lambda x, g=g: gamma_act_charp(g, x))
                     for G, g in zip(Gs, frame.generators)]
            if _max_index([F_new] + G_new) >= i:
                failure = NonConvergence(f"index-{i} parts survived in F or the gammas at h={h}")
                continue
            F, Gs = F_new, G_new
            U_total = mat_mul(U_total, U)
            h_used.append((i, h))
            passes += 1
            break
        else:
            raise failure
    for M in [F] + list(Gs):
        for row in M:
            for x in row:
                if not x.has_integer_exponents():
                    raise NonConvergence("a non-trivial class survived deperfection")
    return DeperfectedModule(F, Gs, U_total, tuple(h_used), passes)


def trivial_class_projection(x):
    return mu_decompose(x).get(MuClass(0, (0,) * x.window.rank), CharPElem.zero(x.window, x.floor))


# ---------------------------------------------------------------------------
# Fourier decomposition over a doubled frame
#
# A doubled frame is a CycloRing of rank 2r with coordinates (Q, T'') where
# Q = T'/T''. The character of nu in L/p^m L is Q^(nu/p^m); evaluating at
# nu sends Q^c to zeta^(<nu, c>) (the image of (1+pibar)^<nu, c>).

@dataclass(frozen=True)
class CharacterComponent:
    nu: tuple
    value: object


def base_ring_of(R):
    from .wittperiod import CycloRing

    if R.rank % 2:
        raise PreconditionError("a doubled frame has even rank")
    return CycloRing(R.p, R.m, R.N, R.rank // 2, R.tden)


def evaluate_at(x, nu):
    """T_x(nu): Q^c T''^b -> zeta_{p^K}^(p^K <nu, c>) T''^b in the base ring."""
    R = x.ring
    r = R.rank // 2
    base = base_ring_of(R)
    K, td = R.m, R.tden
    out = {}
    for (i, b), c in x.terms.items():
        q, t = b[:r], b[r:]
        pairing = sum(n * e for n, e in zip(nu, q))  # <nu, c> * p^tden
        if td > K:
            if pairing % R.p ** (td - K):
                raise PrecisionExhausted("Q-exponents need a higher cyclotomic level")
            shift = pairing // R.p ** (td - K)
        else:
            shift = pairing * R.p ** (K - td)
        for j, s in R.reduce_power(i + shift):
            key = (j, tuple(t))
            out[key] = out.get(key, 0) + s * c
    return base.elem(out)


def _check_level(x, m):
    R = x.ring
    if m > R.m:
        raise PrecisionExhausted(f"zeta_{{p^{m}}} is not available at cyclotomic level {R.m}")
    r = R.rank // 2
    step = R.p ** max(R.tden - m, 0)
    for (_, b) in x.terms:
        if any(e % step for e in b[:r]):
            raise PrecisionExhausted(f"Q-exponents are not in p^-{m} Z")


def fourier_decompose(x, m):
    """Components c_nu (in T'' only) with x = sum_nu c_nu Q^(nu/p^m), computed as
    p^(-m r) sum_lambda zeta_{p^m}^(-<lambda, nu>) T_x(lambda) with m r extra
    p-adic digits so that the division is exact."""
    from .wittperiod import CycloRing

    R = x.ring
    r = R.rank // 2
    _check_level(x, m)
    loss = m * r
    wide = CycloRing(R.p, R.m, R.N + loss, R.rank, R.tden)
    xw = wide.elem(dict(x.terms))
    values = {lam: evaluate_at(xw, lam) for lam in product(range(R.p ** m), repeat=r)}
    wide_base = base_ring_of(wide)
    base = base_ring_of(R)
    scale = R.p ** (R.m - m)  # zeta_{p^m} = zeta_{p^K}^(p^(K-m))
    out = []
    for nu in product(range(R.p ** m), repeat=r):
        acc = wide_base.zero()
        for lam, val in values.items():
            e = -sum(a * b for a, b in zip(lam, nu)) * scale
            acc = acc + wide_base.zeta(e) * val
        divisor = R.p ** loss
        if any(c % divisor for c in acc.terms.values()):
            raise PrecisionExhausted("character sum not divisible by p^(m r)")
        comp = base.elem({k: c // divisor for k, c in acc.terms.items()})
        if not comp.is_zero():
            out.append(CharacterComponent(tuple(nu), comp))
    return out


def fourier_loss(x, m):
    """p-adic digits consumed by the inverse transform."""
    return m * (x.ring.rank // 2)


def character(R, nu, m):
    r = R.rank // 2
    return R.toric(tuple(Fraction(n, R.p ** m) for n in nu) + (0,) * r)


def fourier_resum(components, R, m):
    """sum_nu c_nu Q^(nu/p^m) in the doubled ring R."""
    r = R.rank // 2
    out = R.zero()
    for comp in components:
        lifted = R.elem({(i, (0,) * r + tuple(b)): c for (i, b), c in comp.value.terms.items()})
        out = out + lifted * character(R, comp.nu, m)
    return out


def act_on_index(g, nu, p, m):
    """Gamma on L / p^m L: nu -> gamma0 nu - d, where d is the Q-part of g's nu."""
    mod = p ** m
    d = g.nu[:len(nu)]
    return tuple((g.gamma0 * n - e) % mod for n, e in zip(nu, d))


def base_gamma(g):
    """The T''-part of a doubled-frame Gamma element, acting on component values."""
    r = g.rank // 2
    return GammaElem(g.gamma0, g.nu[r:], g.A)


def split_refinement(x):
    """Projection onto monomials whose Q-exponents are integers."""
    R = x.ring
    r = R.rank // 2
    step = R.p ** R.tden
    return R.elem({(i, b): c for (i, b), c in x.terms.items() if all(e % step == 0 for e in b[:r])})
