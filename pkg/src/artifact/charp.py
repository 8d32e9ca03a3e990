"""Truncated elements of the perfect closure of F_q((pibar))[M].

An element is a finite sum of monomials c * pibar^e * s^v with e and v
rational with denominators dividing p^mden, plus an error floor: a
valuation below which the element is fully determined. The valuation of a
monomial is e*p/(p-1) + weight(v). Terms whose pibar-exponent exceeds the
window are truncated into the floor; nothing is dropped silently.

Internally exponents are stored as integer numerators over D = p^mden.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor as _floor

from .errors import InsufficientPadicPrecision, PrecisionExhausted, PreconditionError, WindowMismatch
from .fields import GF
from .numbers import INF, binom_mod_p, from_str, is_power_of, log_p_int, to_str


@lru_cache(maxsize=None)
def field_for(p, q):
    return GF(p, log_p_int(q, p))


@dataclass(frozen=True)
class PrecisionWindow:
    p: int
    q: int
    mden: int
    pibar_lo: Fraction
    pibar_hi: Fraction
    toric_bound: int
    weight: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pibar_lo", Fraction(self.pibar_lo))
        object.__setattr__(self, "pibar_hi", Fraction(self.pibar_hi))
        object.__setattr__(self, "weight", tuple(Fraction(w) for w in self.weight))
        if not is_power_of(self.q, self.p):
            raise PreconditionError(f"q={self.q} is not a power of p={self.p}")
        if self.pibar_lo > self.pibar_hi:
            raise PreconditionError("pibar_lo must not exceed pibar_hi")
        if self.mden < 0 or self.toric_bound < 0:
            raise PreconditionError("mden and toric_bound must be nonnegative")

    @property
    def rank(self):
        return len(self.weight)

    @property
    def den(self):
        return self.p ** self.mden

    @property
    def field(self):
        return field_for(self.p, self.q)

    @property
    def pibar_val(self):
        """Valuation of pibar."""
        return Fraction(self.p, self.p - 1)

    @property
    def hi_num(self):
        return _floor(self.pibar_hi * self.den)

    @property
    def lo_num(self):
        return -_floor(-self.pibar_lo * self.den)

    def key_val(self, a, b):
        d = self.den
        return (Fraction(a, d) * self.pibar_val
                + sum(Fraction(bi, d) * w for bi, w in zip(b, self.weight)))

    def replace(self, **kw):
        data = dict(p=self.p, q=self.q, mden=self.mden, pibar_lo=self.pibar_lo,
                    pibar_hi=self.pibar_hi, toric_bound=self.toric_bound, weight=self.weight)
        data.update(kw)
        return PrecisionWindow(**data)

    def to_json(self):
        return {"p": self.p, "q": self.q, "mden": self.mden, "pibar_lo": to_str(self.pibar_lo),
                "pibar_hi": to_str(self.pibar_hi), "toric_bound": self.toric_bound,
                "weight": [to_str(w) for w in self.weight]}

    @classmethod
    def from_json(cls, d):
        return cls(d["p"], d.get("q", d["p"]), d["mden"], from_str(d["pibar_lo"]), from_str(d["pibar_hi"]),
                   d["toric_bound"], tuple(from_str(w) for w in d.get("weight", [])))


@dataclass(frozen=True, order=True)
class FracExp:
    pibar: Fraction
    toric: tuple

    def __post_init__(self):
        object.__setattr__(self, "pibar", Fraction(self.pibar))
        object.__setattr__(self, "toric", tuple(Fraction(x) for x in self.toric))


@dataclass(frozen=True, order=True)
class MuClass:
    e_class: Fraction
    toric_class: tuple

    def __post_init__(self):
        object.__setattr__(self, "e_class", Fraction(self.e_class) % 1)
        object.__setattr__(self, "toric_class", tuple(Fraction(x) % 1 for x in self.toric_class))

    @property
    def is_trivial(self):
        return self.e_class == 0 and not any(self.toric_class)

    def index(self):
        """Regrouping index: the last nonzero slot of (e, v_1, ..., v_n), so 0
        for a pure e-class and -1 for the trivial class. Classes of index < i
        form a subgroup."""
        for i in range(len(self.toric_class), 0, -1):
            if self.toric_class[i - 1] != 0:
                return i
        return 0 if self.e_class != 0 else -1

    def times(self, k):
        return MuClass(self.e_class * k, tuple(t * k for t in self.toric_class))

    def __str__(self):
        return f"({to_str(self.e_class)}; {', '.join(to_str(t) for t in self.toric_class)})"


class CharPElem:
    """Immutable truncated element; see the module docstring."""

    __slots__ = ("window", "terms", "floor")

    def __init__(self, window, terms, floor=INF, _trusted=False):
        self.window = window
        if _trusted:
            self.terms = terms
            self.floor = floor
            return
        F = window.field
        hi, lo, tb, r = window.hi_num, window.lo_num, window.toric_bound, window.rank
        clean = {}
        for (a, b), c in terms.items():
            if F.r == 1:
                c %= window.p
            if c == 0:
                continue
            if len(b) != r:
                raise PreconditionError(f"toric exponent {b} has wrong length for rank {r}")
            if a > hi:
                floor = min(floor, window.key_val(a, b))
                continue
            if a < lo:
                raise PrecisionExhausted(f"pibar exponent {Fraction(a, window.den)} below window")
            if any(abs(x) > tb for x in b):
                raise PrecisionExhausted(f"toric exponent {b} beyond the toric bound")
            clean[(a, b)] = c
        if floor is not INF:
            clean = {k: c for k, c in clean.items() if window.key_val(*k) < floor}
        self.terms = clean
        self.floor = floor

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, window, terms, floor=INF):
        """terms: mapping (pibar exponent, toric vector) -> coefficient."""
        d = window.den
        out = {}
        F = window.field
        for (e, v), c in terms.items():
            e = Fraction(e)
            a = e * d
            b = [Fraction(x) * d for x in v]
            if a.denominator != 1 or any(x.denominator != 1 for x in b):
                raise PrecisionExhausted(f"exponent ({e}, {v}) needs more than p^{window.mden} denominators")
            key = (int(a), tuple(int(x) for x in b))
            out[key] = F.add(out.get(key, 0), c % window.q if F.r > 1 else c % window.p)
        return cls(window, out, floor)

    @classmethod
    def zero(cls, window, floor=INF):
        return cls(window, {}, floor, _trusted=True)

    @classmethod
    def one(cls, window):
        return cls.monomial(window, 0, None, 1)

    @classmethod
    def monomial(cls, window, e, v=None, c=1):
        v = v if v is not None else (0,) * window.rank
        return cls.from_terms(window, {(e, tuple(v)): c})

    @classmethod
    def pibar(cls, window):
        return cls.monomial(window, 1)

    def with_floor(self, floor):
        return CharPElem(self.window, dict(self.terms), min(self.floor, floor))

    # inspection -----------------------------------------------------------
    def items(self):
        """Yield (FracExp, coefficient) pairs."""
        d = self.window.den
        for (a, b), c in sorted(self.terms.items()):
            yield FracExp(Fraction(a, d), tuple(Fraction(x, d) for x in b)), c

    def valuation(self):
        if not self.terms:
            return INF
        kv = self.window.key_val
        return min(kv(a, b) for (a, b) in self.terms)

    def is_zero(self):
        """True when no term survives above the error floor."""
        return not self.terms

    @property
    def is_exact(self):
        return self.floor is INF

    def has_integer_exponents(self):
        d = self.window.den
        return all(a % d == 0 and all(x % d == 0 for x in b) for a, b in self.terms)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for fe, c in self.items():
                mono = []
                if fe.pibar:
                    mono.append(f"pb^{to_str(fe.pibar)}")
                for i, x in enumerate(fe.toric):
                    if x:
                        mono.append(f"s{i + 1}^{to_str(x)}")
                parts.append(f"{c}*" + "*".join(mono) if mono else str(c))
            body = " + ".join(parts)
        return body if self.floor is INF else f"{body} + O(v>={to_str(self.floor)})"

    def __eq__(self, other):
        if not isinstance(other, CharPElem):
            return NotImplemented
        return self.window == other.window and self.terms == other.terms and self.floor == other.floor

    def __hash__(self):
        return hash((self.window, tuple(sorted(self.terms.items())), self.floor))

    def agrees(self, other):
        """Equality up to the combined error floor."""
        return (self - other).is_zero()

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, CharPElem):
            raise TypeError(f"cannot combine CharPElem with {type(other).__name__}")
        if other.window != self.window:
            raise WindowMismatch("operands live in different precision windows")

    def __add__(self, other):
        if isinstance(other, int):
            other = CharPElem.monomial(self.window, 0, None, other)
        self._check(other)
        F = self.window.field
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = F.add(out.get(k, 0), c)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return CharPElem(self.window, out, min(self.floor, other.floor))

    __radd__ = __add__

    def __neg__(self):
        F = self.window.field
        return CharPElem(self.window, {k: F.neg(c) for k, c in self.terms.items()}, self.floor, _trusted=True)

    def __sub__(self, other):
        if isinstance(other, int):
            other = CharPElem.monomial(self.window, 0, None, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        F = self.window.field
        c = c % self.window.q if F.r > 1 else c % self.window.p
        if c == 0:
            return CharPElem.zero(self.window, self.floor)
        return CharPElem(self.window, {k: F.mul(c, v) for k, v in self.terms.items()}, self.floor, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        w = self.window
        F = w.field
        vx, vy = self.valuation(), other.valuation()
        floor = min(self.floor + vy, other.floor + vx, self.floor + other.floor)
        hi = w.hi_num
        kv = w.key_val
        out = {}
        prime = F.r == 1
        p = w.p
        # sort so that truncated products can be skipped in bulk
        xs = sorted(self.terms.items())
        ys = sorted(other.terms.items())
        for (a1, b1), c1 in xs:
            for (a2, b2), c2 in ys:
                a = a1 + a2
                b = tuple(i + j for i, j in zip(b1, b2)) if b1 else b1
                if a > hi:
                    floor = min(floor, kv(a, b))
                    if not w.weight or not any(w.weight):
                        break
                    continue
                c = c1 * c2 % p if prime else F.mul(c1, c2)
                key = (a, b)
                s = out.get(key)
                if s is None:
                    out[key] = c
                else:
                    s = (s + c) % p if prime else F.add(s, c)
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        return CharPElem(w, out, floor)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise PreconditionError("negative powers are not supported; use inverse()")
        result = CharPElem.one(self.window)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self, max_iter=200):
        """Inverse of an element whose lowest-valuation term is a monomial unit.

        Computed as m^{-1} * sum_k (-(x/m - 1))^k with m the leading monomial."""
        if not self.terms:
            raise ZeroDivisionError("element is zero at this precision")
        w = self.window
        F = w.field
        kv = w.key_val
        lead = min(self.terms, key=lambda k: (kv(*k), k))
        lv = kv(*lead)
        if sum(1 for k in self.terms if kv(*k) == lv) != 1:
            raise PreconditionError("leading part is not a single monomial")
        a, b = lead
        cinv = F.inv(self.terms[lead])
        m_inv = CharPElem(w, {(-a, tuple(-x for x in b)): cinv}, INF)
        y = self * m_inv  # 1 + (higher terms)
        eps = y - 1
        if eps.valuation() <= 0 and not eps.is_zero():
            raise PreconditionError("perturbation does not have positive valuation")
        total = CharPElem.one(w)
        term = CharPElem.one(w)
        for _ in range(max_iter):
            term = -(term * eps)
            if term.is_zero():
                break
            total = total + term
        else:
            raise PrecisionExhausted("geometric series did not terminate")
        # the tail beyond the last term is bounded by the truncation floor of term
        total = total.with_floor(term.floor)
        return total * m_inv

    # serialization ------------------------------------------------------
    def to_json(self):
        return {
            "window": self.window.to_json(),
            "terms": [{"pibar": to_str(fe.pibar), "toric": [to_str(x) for x in fe.toric], "coeff": str(c)}
                      for fe, c in self.items()],
            "floor": to_str(self.floor),
        }

    @classmethod
    def from_json(cls, data, window=None):
        window = window or PrecisionWindow.from_json(data["window"])
        terms = {}
        F = window.field
        for t in data["terms"]:
            key = (from_str(t["pibar"]), tuple(from_str(x) for x in t.get("toric", [])))
            terms[key] = F.add(terms.get(key, 0), int(t["coeff"]) % window.q)
        return cls.from_terms(window, terms, from_str(data.get("floor", "inf")))


# ---------------------------------------------------------------------------
# Frobenius

def frobenius(x, inverse=False, times=1):
    """Absolute Frobenius (or its inverse) applied `times` times."""
    w = x.window
    F = w.field
    p = w.p
    out = {}
    floor = x.floor
    if not inverse:
        scale = p ** times
        for (a, b), c in x.terms.items():
            out[(a * scale, tuple(t * scale for t in b))] = F.frob(c, times)
        floor = floor * scale if floor is not INF else INF
        return CharPElem(w, out, floor)
    scale = p ** times
    for (a, b), c in x.terms.items():
        if a % scale or any(t % scale for t in b):
            raise PrecisionExhausted(
                f"inverse Frobenius needs denominators beyond p^{w.mden}; enlarge mden")
        out[(a // scale, tuple(t // scale for t in b))] = F.frob(c, -times)
    floor = floor / scale if floor is not INF else INF
    return CharPElem(w, out, floor)


# ---------------------------------------------------------------------------
# binomial series in u = pibar^(1/D), dense lists over F_p

def _binom_series(n, deg, p):
    """Coefficients of (1+u)^n mod p for degrees 0..deg (n >= 0)."""
    return [binom_mod_p(n, k, p) for k in range(deg + 1)]


def _ser_mul(x, y, deg, p):
    """Product of dense coefficient lists (offset 0) truncated at degree deg."""
    out = [0] * (deg + 1)
    for i, a in enumerate(x):
        if a and i <= deg:
            lim = min(len(y), deg + 1 - i)
            for j in range(lim):
                bj = y[j]
                if bj:
                    out[i + j] += a * bj
    return [c % p for c in out]


def _ser_inv(x, deg, p):
    """Inverse of a power series with unit constant term, to degree deg."""
    inv0 = pow(x[0], -1, p)
    out = [0] * (deg + 1)
    out[0] = inv0
    for k in range(1, deg + 1):
        s = 0
        for i in range(1, min(k, len(x) - 1) + 1):
            s += x[i] * out[k - i]
        out[k] = (-s * inv0) % p
    return out


def binomial_expand(window, a, A, degree_bound):
    """(1+pibar)^a for a given modulo p^A, up to pibar-degree degree_bound."""
    p = window.p
    if degree_bound < 0:
        raise PreconditionError("degree_bound must be nonnegative")
    if p ** A <= degree_bound:
        raise InsufficientPadicPrecision(
            f"a mod p^{A} does not determine the binomial coefficients up to degree {degree_bound}")
    a = a % p ** A
    terms = {}
    for k in range(degree_bound + 1):
        c = binom_mod_p(a, k, p)
        if c:
            terms[(k, (0,) * window.rank)] = c
    floor = (degree_bound + 1) * window.pibar_val
    return CharPElem.from_terms(window, terms, floor)


def one_plus_pibar_power(window, e):
    """(1+pibar)^e for e in Z[1/p] with e >= 0 and denominator dividing p^mden,
    as a finite exact sum when e*D is a nonnegative integer."""
    d = window.den
    n = Fraction(e) * d
    if n.denominator != 1 or n < 0:
        raise PreconditionError("exponent must be a nonnegative multiple of 1/p^mden")
    n = int(n)
    terms = {(k, (0,) * window.rank): binom_mod_p(n, k, window.p) for k in range(n + 1)}
    return CharPElem(window, terms)


# ---------------------------------------------------------------------------
# Gamma action

_ACTION_CACHE = {}


def _action_tables(window, gamma0, A, lo, hi):
    """Powers of w = (1+u)^gamma0 - 1 indexed by exponent in [lo, hi] as
    (offset, coefficient list) truncated at u-degree window.hi_num."""
    key = (window.p, window.den, window.hi_num, gamma0, A, lo, hi)
    hit = _ACTION_CACHE.get(key)
    if hit is not None:
        return hit
    p = window.p
    H = window.hi_num
    span = H - lo  # maximal needed length of the unit part
    if span >= 0 and p ** A <= span + 1:
        raise InsufficientPadicPrecision(
            f"gamma0 mod p^{A} does not determine the action up to u-degree {H}")
    span = max(span, 0)
    full = _binom_series(gamma0 % p ** A, span + 1, p)
    g = full[1:]  # (w/u)
    if g[0] == 0:
        raise PreconditionError("gamma0 is not a unit")
    table = {}
    pos = [1] + [0] * span
    for k in range(0, max(hi, 0) + 1):
        if k >= lo:
            table[k] = pos
        pos = _ser_mul(pos, g, span, p)
    if lo < 0:
        ginv = _ser_inv(g + [0] * (span + 1 - len(g)), span, p)
        neg = [1] + [0] * span
        for k in range(1, -lo + 1):
            neg = _ser_mul(neg, ginv, span, p)
            if -k <= hi:
                table[-k] = neg
    _ACTION_CACHE[key] = table
    if len(_ACTION_CACHE) > 256:
        _ACTION_CACHE.pop(next(iter(_ACTION_CACHE)))
    return table


def gamma_act_charp(g, x):
    """Action of g = (nu, gamma0) on x: gamma(1+pibar) = (1+pibar)^gamma0 and
    gamma(s^v) = (1+pibar)^<nu, v> s^v. Exact up to u-degree hi; beyond that
    the result carries an error floor."""
    w = x.window
    p = w.p
    H = w.hi_num
    if not x.terms:
        return CharPElem.zero(w, x.floor)
    if len(g.nu) != w.rank:
        raise PreconditionError("Gamma element has the wrong rank for this window")
    mod = p ** g.A
    if g.gamma0 % mod == 1 and not any(n % mod for n in g.nu):
        return x
    F = w.field
    lo = min(a for a, _ in x.terms)
    hi = max(a for a, _ in x.terms)
    table = _action_tables(w, g.gamma0 % mod, g.A, lo, hi)
    groups = {}
    for (a, b), c in x.terms.items():
        groups.setdefault(b, []).append((a, c))
    out = {}
    floor = x.floor
    kv = w.key_val
    trivial_gamma0 = g.gamma0 % mod == 1
    for b, items in groups.items():
        nb = sum(ni * bi for ni, bi in zip(g.nu, b))
        if nb % mod == 0 and (trivial_gamma0 or all(a == 0 for a, _ in items)):
            # the canonical representative fixes this group exactly
            for a, c in items:
                out[(a, b)] = c
            continue
        amin = min(a for a, _ in items)
        span = H - amin
        if span < 0:
            floor = min(floor, kv(amin, b))
            continue
        acc = [0] * (span + 1)
        for a, c in items:
            series = table[a]
            off = a - amin
            for k in range(span + 1 - off):
                s = series[k] if k < len(series) else 0
                if s:
                    if F.r == 1:
                        acc[off + k] = (acc[off + k] + c * s) % p
                    else:
                        acc[off + k] = F.add(acc[off + k], F.mul(c, s))
        if nb % mod:
            if p ** g.A <= span:
                raise InsufficientPadicPrecision(
                    f"nu mod p^{g.A} does not determine the action up to u-degree {H}")
            twist = _binom_series(nb % mod, span, p)
            if F.r == 1:
                acc = _ser_mul(acc, twist, span, p)
            else:
                acc = _ser_mul_field(acc, twist, span, F)
        for k, c in enumerate(acc):
            if c:
                out[(amin + k, b)] = c
        floor = min(floor, kv(H + 1, b))
    return CharPElem(w, out, floor)


def _ser_mul_field(x, y, deg, F):
    out = [0] * (deg + 1)
    for i, a in enumerate(x):
        if a:
            for j in range(min(len(y), deg + 1 - i)):
                if y[j]:
                    out[i + j] = F.add(out[i + j], F.mul(a, y[j]))
    return out


# ---------------------------------------------------------------------------
# mu-class decomposition

def mu_class_of(window, a, b):
    d = window.den
    return MuClass(Fraction(a, d), tuple(Fraction(x, d) for x in b))


def mu_decompose(x):
    """Split x into components indexed by MuClass using
    pibar^(j/D) = ((1+pibar)^(1/D) - 1)^j. Components sum to x exactly."""
    w = x.window
    d, p = w.den, w.p
    F = w.field
    comps = {}
    for (a, b), c in x.terms.items():
        n0, j = divmod(a, d)
        tor = MuClass(0, tuple(Fraction(t, d) for t in b)).toric_class
        for i in range(j + 1):
            cij = binom_mod_p(j, i, p)
            if not cij:
                continue
            if (j - i) % 2 and p != 2:
                cij = (-cij) % p
            mu = MuClass(Fraction(i, d), tor)
            bucket = comps.setdefault(mu, {})
            for t in range(i + 1):
                cit = binom_mod_p(i, t, p)
                if not cit:
                    continue
                key = (n0 * d + t, b)
                val = F.mul(c, cij * cit % p)
                s = F.add(bucket.get(key, 0), val)
                if s:
                    bucket[key] = s
                else:
                    bucket.pop(key, None)
    out = {}
    for mu, terms in comps.items():
        if terms:
            out[mu] = CharPElem(w, terms, x.floor)
    return out


def mu_project(x, mu):
    return mu_decompose(x).get(mu, CharPElem.zero(x.window, x.floor))


def mu_loss(x, parts):
    """Measured log_p of the projection constant: v(x) - min_mu v(part)."""
    if not parts:
        return Fraction(0)
    vmin = min(c.valuation() for c in parts.values())
    vx = x.valuation()
    if vx is INF:
        return Fraction(0)
    return max(Fraction(0), vx - vmin)


def basis_element(window, mu):
    """(1+pibar)^e * s^v for the canonical representative of mu (e, v in [0,1))."""
    d = window.den
    e = one_plus_pibar_power(window, mu.e_class)
    v = tuple(t * d for t in mu.toric_class)
    if any(Fraction(t).denominator != 1 for t in v):
        raise PrecisionExhausted("class denominators exceed p^mden")
    s = CharPElem(window, {(0, tuple(int(t) for t in v)): 1})
    return e * s


# ---------------------------------------------------------------------------
# analyticity measurement

def standard_samples(window):
    """Integer-exponent sample set: 1+pibar, pibar, pibar^2 and each s_i, s_i^-1."""
    r = window.rank
    out = [CharPElem.one(window) + CharPElem.pibar(window), CharPElem.pibar(window),
           CharPElem.monomial(window, 2)]
    for i in range(r):
        v = [0] * r
        v[i] = 1
        out.append(CharPElem.monomial(window, 0, v))
        if window.toric_bound >= window.den:
            v[i] = -1
            out.append(CharPElem.monomial(window, 0, v))
    return out


def unit_generators(p, n, rank, A):
    from .gamma import GammaElem

    gens = [GammaElem(1 + p ** n, (0,) * rank, A)]
    for i in range(rank):
        nu = [0] * rank
        nu[i] = p ** n
        gens.append(GammaElem(1, tuple(nu), A))
    return gens


def gamma_bound(n, samples, A=None):
    """min over samples and generators g of U_n of v(g x - x) - v(x)."""
    if not samples:
        return INF
    w = samples[0].window
    p = w.p
    if A is None:
        A = n + 1
        while p ** A <= w.hi_num - w.lo_num + 2:
            A += 1
    best = INF
    for g in unit_generators(p, n, w.rank, A):
        for x in samples:
            if not x.is_exact:
                raise PreconditionError("samples must be exact")
            if x.is_zero():
                continue
            diff = gamma_act_charp(g, x) - x
            if diff.is_zero():
                if diff.floor is INF:
                    continue
                raise PrecisionExhausted(
                    f"difference masked by truncation at valuation {diff.floor}; enlarge pibar_hi")
            best = min(best, diff.valuation() - x.valuation())
    return best


def analyticity_constant(p, samples, n=2):
    """log_p c measured at level n: max(0, p^(n+1)/(p-1) - gamma_bound(n))."""
    b = gamma_bound(n, samples)
    if b is INF:
        return Fraction(0)
    return max(Fraction(0), Fraction(p ** (n + 1), p - 1) - b)


# ---------------------------------------------------------------------------
# random elements (tests and the command-line suite)

def random_element(window, rng, nterms=4, integral=False, max_pibar=None, toric_span=1,
                   min_pibar=0):
    d = window.den
    hi = max_pibar if max_pibar is not None else window.pibar_hi
    amax = _floor(Fraction(hi) * d)
    amin = -_floor(-Fraction(min_pibar) * d)
    step = d if integral else 1
    terms = {}
    for _ in range(nterms):
        a = rng.randrange(amin, amax + 1)
        if integral:
            a -= a % d
            if a < amin:
                a += d
        b = tuple(rng.randrange(-toric_span, toric_span + 1) * (step if integral else 1)
                  for _ in range(window.rank))
        if any(abs(x) > window.toric_bound for x in b):
            continue
        c = rng.randrange(1, window.q)
        terms[(a, b)] = c
    return CharPElem(window, terms)
