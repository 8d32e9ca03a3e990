"""Truncated Witt vectors over the characteristic-p rings of `charp`, the
map theta into cyclotomic rings, the special elements pi, z, t, t_d, naive
imperfect lifts and approximate p-th roots."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .charp import CharPElem, frobenius, gamma_act_charp, one_plus_pibar_power
from .errors import (
    InsufficientPadicPrecision, LengthMismatch, NonIntegralExponent, NotAUnit, PrecisionExhausted,
    PreconditionError, RadiusTooLarge, UnsupportedCoefficientField, WindowMismatch,
)
from .numbers import INF, vp
from .series import SeriesElem, log_one_plus_pi, one_plus_pi_power

MAX_LENGTH = 4


# ---------------------------------------------------------------------------
# universal polynomials

@lru_cache(maxsize=None)
def witt_polynomials(p, n):
    """Universal sum, product and negation polynomials for W_n, reduced mod p.

    Each polynomial is a tuple of (coefficient, exponent vector) with the
    exponent vector indexing X_0..X_{n-1}, Y_0..Y_{n-1}."""
    from sympy import QQ
    from sympy.polys.rings import ring

    R, *gens = ring(",".join([f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]), QQ)
    X, Y = gens[:n], gens[n:]

    def ghost(v, k):
        return sum((p ** i * v[i] ** (p ** (k - i)) for i in range(k + 1)), R.zero)

    def solve(target):
        out = []
        for k in range(n):
            rest = sum((p ** i * out[i] ** (p ** (k - i)) for i in range(k)), R.zero)
            out.append((target(k) - rest) * QQ(1, p ** k))
        return out

    sums = solve(lambda k: ghost(X, k) + ghost(Y, k))
    prods = solve(lambda k: ghost(X, k) * ghost(Y, k))
    negs = solve(lambda k: -ghost(X, k))

    def export(poly):
        terms = []
        for exps, c in poly.terms():
            if c.denominator != 1:
                raise ArithmeticError("Witt polynomial is not integral")
            c = int(c.numerator) % p
            if c:
                terms.append((c, tuple(exps)))
        return tuple(sorted(terms))

    return tuple(map(export, sums)), tuple(map(export, prods)), tuple(map(export, negs))


def _evaluate(poly, values, zero):
    """Evaluate an exported polynomial at CharPElem values (powers cached)."""
    cache = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            if e == 1:
                cache[key] = values[i]
            else:
                half = power(i, e // 2)
                sq = half * half
                cache[key] = sq * values[i] if e % 2 else sq
        return cache[key]

    acc = zero
    for c, exps in poly:
        term = None
        for i, e in enumerate(exps):
            if e:
                f = power(i, e)
                term = f if term is None else term * f
        if term is None:
            term = CharPElem.one(zero.window)
        acc = acc + term.scale(c)
    return acc


# ---------------------------------------------------------------------------
# Witt vectors

class WittElem:
    """Witt vector (x_0, ..., x_{n-1}) in standard coordinates over CharPElem."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise PreconditionError("Witt vectors need length >= 1")
        w = comps[0].window
        if any(c.window != w for c in comps):
            raise WindowMismatch("Witt components must share one window")
        self.components = comps

    @property
    def length(self):
        return len(self.components)

    @property
    def window(self):
        return self.components[0].window

    @property
    def p(self):
        return self.window.p

    @classmethod
    def zero(cls, window, n):
        return cls([CharPElem.zero(window)] * n)

    @classmethod
    def one(cls, window, n):
        return teichmuller(CharPElem.one(window), n)

    @classmethod
    def from_int(cls, window, n, k):
        """Image of the integer k (double-and-add on the Witt vector 1)."""
        neg = k < 0
        k = abs(k)
        result, base = cls.zero(window, n), cls.one(window, n)
        while k:
            if k & 1:
                result = result + base
            base = base + base
            k >>= 1
        return -result if neg else result

    def _check(self, other):
        if isinstance(other, int):
            return WittElem.from_int(self.window, self.length, other)
        if not isinstance(other, WittElem):
            raise TypeError(f"cannot combine WittElem with {type(other).__name__}")
        if other.length != self.length:
            raise LengthMismatch(f"lengths {self.length} and {other.length} differ")
        if other.window != self.window:
            raise WindowMismatch("Witt vectors over different windows")
        return other

    def _apply(self, polys, other=None):
        n = self.length
        if n > MAX_LENGTH:
            raise PreconditionError(f"Witt length {n} exceeds the supported maximum {MAX_LENGTH}")
        values = list(self.components) + (list(other.components) if other is not None else
                                          [CharPElem.zero(self.window)] * n)
        zero = CharPElem.zero(self.window)
        return WittElem([_evaluate(polys[k], values, zero) for k in range(n)])

    def __add__(self, other):
        other = self._check(other)
        return self._apply(witt_polynomials(self.p, self.length)[0], other)

    __radd__ = __add__

    def __mul__(self, other):
        other = self._check(other)
        return self._apply(witt_polynomials(self.p, self.length)[1], other)

    __rmul__ = __mul__

    def __neg__(self):
        if self.p != 2:
            return WittElem([-c for c in self.components])
        return self._apply(witt_polynomials(self.p, self.length)[2])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, k):
        result, base = WittElem.one(self.window, self.length), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, WittElem) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def agrees(self, other):
        return all(a.agrees(b) for a, b in zip(self.components, self._check(other).components))

    def __repr__(self):
        return "W(" + ", ".join(map(repr, self.components)) + ")"

    def reduce(self):
        return self.components[0]

    def frobenius(self, inverse=False, times=1):
        return WittElem([frobenius(c, inverse=inverse, times=times) for c in self.components])

    def verschiebung(self):
        return WittElem([CharPElem.zero(self.window)] + list(self.components[:-1]))

    def gamma_act(self, g):
        """Witt functoriality: act on each coordinate."""
        return WittElem([gamma_act_charp(g, c) for c in self.components])

    def truncate(self, n):
        return WittElem(self.components[:n])

    def to_json(self):
        return {"length": self.length, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, d):
        return cls([CharPElem.from_json(c) for c in d["components"]])


def teichmuller(x, n):
    return WittElem([x] + [CharPElem.zero(x.window)] * (n - 1))


# ---------------------------------------------------------------------------
# cyclotomic rings (Z/p^N)[zeta_{p^m}][T^{+-1/p^tden}]

class CycloRing:
    """Parameters of a truncated cyclotomic monoid algebra and its zeta table."""

    def __init__(self, p, m, N, rank=0, tden=None):
        if m < 0 or N < 1:
            raise PreconditionError("need m >= 0 and N >= 1")
        self.p, self.m, self.N, self.rank = p, m, N, rank
        self.tden = m if tden is None else tden
        self.mod = p ** N
        self.order = p ** m
        self.dim = (p - 1) * p ** (m - 1) if m else 1
        table = []
        for e in range(self.order):
            if e < self.dim:
                table.append(((e, 1),))
            else:
                r = e - self.dim
                table.append(tuple((j * p ** (m - 1) + r, -1) for j in range(p - 1)))
        self._table = table

    def key(self):
        return (self.p, self.m, self.N, self.rank, self.tden)

    def __eq__(self, other):
        return isinstance(other, CycloRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"CycloRing(p={self.p}, m={self.m}, N={self.N}, rank={self.rank}, tden={self.tden})"

    def reduce_power(self, e):
        """zeta^e in the power basis."""
        return self._table[e % self.order]

    def elem(self, terms):
        return CycloElem(self, terms)

    def zero(self):
        return CycloElem(self, {})

    def one(self):
        return self.zeta(0)

    def const(self, c):
        return CycloElem(self, {(0, (0,) * self.rank): c})

    def zeta(self, k=1):
        return CycloElem(self, {(i, (0,) * self.rank): c for i, c in self.reduce_power(k)})

    def toric(self, v):
        """T^v for v with denominators dividing p^tden."""
        b = [Fraction(x) * self.p ** self.tden for x in v]
        if any(x.denominator != 1 for x in b):
            raise PrecisionExhausted("toric exponent needs a larger denominator level")
        return CycloElem(self, {(0, tuple(int(x) for x in b)): 1})

    def embed(self, x):
        """Image of x from a ring of lower level (zeta_{p^m} = zeta_{p^M}^{p^{M-m}})."""
        src = x.ring
        if src.p != self.p or src.rank != self.rank or src.m > self.m or src.tden > self.tden or src.N < self.N:
            raise PreconditionError(f"cannot embed {src} into {self}")
        zs = self.p ** (self.m - src.m)
        ts = self.p ** (self.tden - src.tden)
        out = {}
        for (i, b), c in x.terms.items():
            bb = tuple(t * ts for t in b)
            for j, s in self.reduce_power(i * zs):
                out[(j, bb)] = out.get((j, bb), 0) + s * c
        return CycloElem(self, out)


class CycloElem:
    """Element of a CycloRing: mapping (zeta basis index, toric numerators) -> Z/p^N."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        mod = ring.mod
        self.terms = {k: c % mod for k, c in terms.items() if c % mod}

    def _check(self, other):
        if isinstance(other, int):
            return self.ring.const(other)
        if not isinstance(other, CycloElem):
            raise TypeError(f"cannot combine CycloElem with {type(other).__name__}")
        if other.ring != self.ring:
            raise PreconditionError("cyclotomic elements live in different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return CycloElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return CycloElem(self.ring, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._check(other)
        R = self.ring
        mod = R.mod
        raw = {}
        for (i1, b1), c1 in self.terms.items():
            for (i2, b2), c2 in other.terms.items():
                b = tuple(x + y for x, y in zip(b1, b2))
                c = c1 * c2
                for j, s in R.reduce_power(i1 + i2):
                    key = (j, b)
                    raw[key] = (raw.get(key, 0) + s * c) % mod
        return CycloElem(R, raw)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise PreconditionError("negative powers are not supported")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, CycloElem) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def is_zero(self):
        return not self.terms

    def p_valuation(self):
        """min v_p of the power-basis coefficients (N if zero mod p^N)."""
        if not self.terms:
            return self.ring.N
        return min(vp(c, self.ring.p) for c in self.terms.values())

    def reduce_mod_p(self):
        return {k: c % self.ring.p for k, c in self.terms.items() if c % self.ring.p}

    def is_unit(self):
        """Units: setting zeta = 1 mod p leaves a single monomial."""
        p = self.ring.p
        collapsed = {}
        for (i, b), c in self.terms.items():
            collapsed[b] = (collapsed.get(b, 0) + c) % p
        return sum(1 for c in collapsed.values() if c) == 1

    def gamma_act(self, g):
        """gamma0: zeta -> zeta^gamma0; nu: T^v -> zeta_{p^m}^{p^m <nu, v>} T^v."""
        R = self.ring
        p = R.p
        if g.A < R.m:
            raise InsufficientPadicPrecision(f"gamma precision {g.A} below cyclotomic level {R.m}")
        if len(g.nu) != R.rank:
            raise PreconditionError("Gamma element has the wrong rank")
        out = {}
        for (i, b), c in self.terms.items():
            pairing = sum(n * x for n, x in zip(g.nu, b))  # <nu, v> * p^tden
            if R.tden > R.m:
                if pairing % p ** (R.tden - R.m):
                    if g.A < R.tden:
                        raise InsufficientPadicPrecision("toric denominators exceed the cyclotomic level")
                    raise PreconditionError("the pairing <nu, v> needs a higher cyclotomic level")
                shift = pairing // p ** (R.tden - R.m)
            else:
                shift = pairing * p ** (R.m - R.tden)
            for j, s in R.reduce_power(i * g.gamma0 + shift):
                out[(j, b)] = out.get((j, b), 0) + s * c
        return CycloElem(R, out)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, b), c in sorted(self.terms.items()):
            mono = ([f"z^{i}"] if i else []) + [f"T{k + 1}^{x}/{self.ring.p ** self.ring.tden}"
                                                 for k, x in enumerate(b) if x]
            parts.append(f"{c}" + ("*" + "*".join(mono) if mono else ""))
        return " + ".join(parts) + f" (mod {self.ring.p}^{self.ring.N})"

    def to_json(self):
        R = self.ring
        from .numbers import to_str

        return {"p": R.p, "m": R.m, "N": R.N, "rank": R.rank, "tden": R.tden,
                "terms": [{"zeta_exp": i, "toric": [to_str(Fraction(x, R.p ** R.tden)) for x in b],
                           "coeff": str(c)} for (i, b), c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, d):
        from .numbers import from_str

        R = CycloRing(d["p"], d["m"], d["N"], d.get("rank", 0), d.get("tden"))
        out = R.zero()
        for t in d["terms"]:
            out = out + (R.zeta(t["zeta_exp"]) * R.toric([from_str(x) for x in t.get("toric", [])])).scale(
                int(t["coeff"]))
        return out


# ---------------------------------------------------------------------------
# theta

def theta_ring(window, N):
    K = window.mden + N - 1
    return CycloRing(window.p, K, N, window.rank, K)


def _sharp_lift(x, ring):
    """Monomial-wise lift of the p^(N-1)-th root of x: pibar^(a/p^K) -> (zeta_{p^K} - 1)^a."""
    R = ring
    base = R.zeta(1) - R.one()
    powers = {0: R.one()}
    out = R.zero()
    for (a, b), c in sorted(x.terms.items()):
        if a < 0:
            raise PreconditionError("theta is defined on integral elements (nonnegative pibar exponents)")
        if a not in powers:
            top = max(k for k in powers if k <= a)
            cur = powers[top]
            for j in range(top + 1, a + 1):
                cur = cur * base
                powers[j] = cur
        out = out + (powers[a] * CycloElem(R, {(0, b): 1})).scale(c)
    return out


def theta_eval(x, N):
    """theta(x) mod p^N for a Witt vector over a q = p window."""
    w = x.window
    if w.q != w.p:
        raise UnsupportedCoefficientField("theta targets the cyclotomic ring over Z; use q = p")
    if x.length < N:
        raise LengthMismatch(f"Witt length {x.length} is below the target precision {N}")
    p = w.p
    for i, comp in enumerate(x.components[:N]):
        if comp.floor is INF:
            continue
        if any(w.weight) or i + comp.floor / p ** i < N:
            raise PrecisionExhausted(f"component {i} is not known to theta-precision p^{N}")
    R = theta_ring(w, N)
    out = R.zero()
    for i, comp in enumerate(x.components[:N]):
        if comp.is_zero():
            continue
        lifted = _sharp_lift(comp, R) ** (p ** (N - 1 - i))
        out = out + lifted.scale(p ** i)
    return out


# ---------------------------------------------------------------------------
# special elements

def pi_elem(window, n):
    return teichmuller(CharPElem.one(window) + CharPElem.pibar(window), n) - WittElem.one(window, n)


def z_elem(window, n):
    """sum_{i<p} [(1+pibar)^(i/p)]."""
    if window.mden < 1:
        raise PrecisionExhausted("z needs mden >= 1")
    p = window.p
    acc = WittElem.zero(window, n)
    for i in range(p):
        acc = acc + teichmuller(one_plus_pibar_power(window, Fraction(i, p)), n)
    return acc


@dataclass(frozen=True)
class PeriodScalar:
    """p^p_power * unit with an explicit p-adic exponent."""

    p_power: int
    unit: object

    def __post_init__(self):
        u = self.unit
        if isinstance(u, SeriesElem):
            ok = u.terms and min(vp(c, u.p) for c in u.terms.values()) == 0
        elif isinstance(u, CycloElem):
            ok = u.p_valuation() == 0
        elif isinstance(u, WittElem):
            ok = not u.components[0].is_zero()
        else:
            ok = u not in (0, None)
        if not ok:
            raise NotAUnit("unit part has positive p-adic valuation")

    def valuation(self):
        return self.p_power

    def __mul__(self, other):
        return PeriodScalar(self.p_power + other.p_power, self.unit * other.unit)


def series_ring(p, degree, rank=0):
    return SeriesElem.ring(p, rank, degree)


def t_series(p, order, degree=None):
    """t^(I) = sum_{k<=I} (-1)^(k-1) pi^k / k as p^-v * (primitive series)."""
    ring = series_ring(p, degree or order)
    t = log_one_plus_pi(ring, order)
    v = max(vp(k, p) for k in range(1, order + 1))
    return PeriodScalar(-v, t.scale(p ** v))


def t_functional_defect(p, order, degree=None):
    """(valuation of phi(t^(I)) - p t^(I), tail bound I*p/(p-1) - v_p(I!))."""
    from .numbers import vp_factorial

    degree = degree or p * order
    ring = series_ring(p, degree)
    t = log_one_plus_pi(ring, order)
    defect = t.frobenius() - t.scale(p)
    return defect.valuation(), order * Fraction(p, p - 1) - vp_factorial(order, p), defect


def y_elem(ring, j):
    """y_j = phi^j(pi) = (1+pi)^(p^j) - 1."""
    return one_plus_pi_power(ring, ring.p ** j) - ring.one()


def td_parts(p, d, order, degree):
    """Numerator and denominator of t_d^(I) = prod_{i=1}^{I} y_{di} / y_{di-1}."""
    ring = series_ring(p, degree)
    num, den = ring.one(), ring.one()
    for i in range(1, order + 1):
        num = num * y_elem(ring, d * i)
        den = den * y_elem(ring, d * i - 1)
    return num, den


def td_identity(p, d, order, degree):
    """Cross-multiplied functional equation of t_d at truncation.

    Returns (lhs, rhs) with lhs = phi^d(Num) y_d Den - Num y_{d-1} phi^d(Den)
    and rhs = Num Den (y_{d(I+1)} - y_{d(I+1)-1}); they agree up to the floor."""
    ring = series_ring(p, degree)
    num, den = td_parts(p, d, order, degree)
    lhs = num.frobenius(d) * y_elem(ring, d) * den - num * y_elem(ring, d - 1) * den.frobenius(d)
    top = d * (order + 1)
    rhs = num * den * (y_elem(ring, top) - y_elem(ring, top - 1))
    return lhs, rhs


def twist_multiplier(p, d, degree=None):
    """Matrix (1x1) of phi^d on the twist t^-1 (d = 0 means phi on t^-1) or t_d^-1.

    phi(t^-1) = p^-1 t^-1; phi^d(t_d^-1) = p^-1 Phi_p((1+pi)^(p^(d-1))) t_d^-1.
    The unit is p-adically primitive only through its top coefficient, so the
    degree bound must reach p^(d-1)(p-1)."""
    top = p ** (d - 1) * (p - 1) if d else 0
    ring = series_ring(p, max(degree or 16, top))
    if d == 0:
        return PeriodScalar(-1, ring.one())
    base = one_plus_pi_power(ring, p ** (d - 1))
    cyclo = sum((base ** i for i in range(p)), ring.zero())
    return PeriodScalar(-1, cyclo)


# ---------------------------------------------------------------------------
# imperfect lifts

def imperfect_lift(xbar, r, n=2, r0=None):
    """Naive lift sum [c] pi^e [s^v] of an integer-exponent element."""
    w = xbar.window
    if not xbar.has_integer_exponents():
        raise NonIntegralExponent("imperfect lifts need integer exponents")
    r = Fraction(r)
    if r <= 0:
        raise PreconditionError("radius parameter must be positive")
    limit = measured_r0(w) if r0 is None else Fraction(r0)
    own = lift_threshold(xbar, _naive_lift(xbar, n))
    if r > min(limit, own):
        raise RadiusTooLarge(f"r = {r} exceeds the measured threshold {min(limit, own)}")
    return _naive_lift(xbar, n)


def _naive_lift(xbar, n):
    w = xbar.window
    d = w.den
    pi = pi_elem(w, n)
    powers = {0: WittElem.one(w, n)}
    acc = WittElem.zero(w, n)
    for (a, b), c in sorted(xbar.terms.items()):
        e = a // d
        if e < 0:
            raise PreconditionError("negative pibar exponents have no integral lift")
        if e not in powers:
            top = max(k for k in powers if k <= e)
            cur = powers[top]
            for j in range(top + 1, e + 1):
                cur = cur * pi
                powers[j] = cur
        coeff = teichmuller(CharPElem(w, {(0, (0,) * w.rank): c}), n)
        mono = teichmuller(CharPElem(w, {(0, b): 1}), n)
        acc = acc + coeff * powers[e] * mono
    return acc


def lift_certificate(xbar, x, r):
    """(v_r(x - [xbar]) lower bound from two digits, v_r(x) upper bound)."""
    p = xbar.window.p
    diff = x - teichmuller(xbar, x.length)
    if not diff.components[0].is_zero():
        raise PreconditionError("x does not reduce to xbar")
    d1 = diff.components[1]
    v1 = d1.valuation() if not d1.is_zero() else d1.floor
    lower = min(1 + r * v1 / p, Fraction(2)) if v1 is not INF else Fraction(2)
    return lower, r * xbar.valuation()


def lift_threshold(xbar, x):
    """Largest r for which lift_certificate certifies the +1/2 gain."""
    p = xbar.window.p
    v0 = xbar.valuation()
    diff = x - teichmuller(xbar, x.length)
    d1 = diff.components[1]
    v1 = d1.valuation() if not d1.is_zero() else d1.floor
    bound = INF
    if v1 is not INF and v0 - v1 / p > 0:
        bound = Fraction(1, 2) / (v0 - v1 / p)
    if v0 > 0:
        bound = min(bound, Fraction(3, 2) / v0)
    return bound


def lift_generators(window):
    one = CharPElem.one(window)
    pb = CharPElem.pibar(window)
    gens = [pb, one + pb]
    for i in range(window.rank):
        v = [0] * window.rank
        v[i] = 1
        s = CharPElem.monomial(window, 0, v)
        gens += [s, pb * s]
    return gens


def measured_r0(window, n=2):
    """Threshold r_0 measured on the generator set of the window."""
    out = INF
    for g in lift_generators(window):
        out = min(out, lift_threshold(g, _naive_lift(g, n)))
    return out


# ---------------------------------------------------------------------------
# approximate p-th roots

def approx_pth_root(y):
    """x with x^p = y mod p, by taking the exact p-th root of y mod p monomial-wise
    (zeta_{p^m} -> zeta_{p^(m+1)}, T^v -> T^(v/p))."""
    R = y.ring
    if not y.is_unit():
        raise NotAUnit("approx_pth_root needs a unit")
    big = CycloRing(R.p, R.m + 1, R.N, R.rank, R.tden + 1)
    out = big.zero()
    for (i, b), c in y.reduce_mod_p().items():
        # zeta_{p^m}^i = zeta_{p^(m+1)}^(p i); its p-th root is zeta_{p^(m+1)}^i
        out = out + (big.zeta(i) * CycloElem(big, {(0, b): 1})).scale(c)
    return out
