"""Truncated elements of Q_p[pi][T^+-1] (the imperfect period ring model).

Coefficients are exact rationals. The valuation of c * pi^k * T^v is
v_p(c) + k * rho + weight(v), with rho = p/(p-1) by default. Terms of
pi-degree above the bound are dropped into an error floor.
"""

from fractions import Fraction

from math import comb as binomial

from .errors import PrecisionMismatch, PreconditionError
from .numbers import INF, vp


class SeriesElem:
    __slots__ = ("p", "rank", "degree", "weight", "rho", "terms", "floor")

    def __init__(self, p, rank, degree, terms=None, floor=INF, weight=None, rho=None, _trusted=False):
        self.p = p
        self.rank = rank
        self.degree = degree
        self.weight = tuple(Fraction(w) for w in weight) if weight else (Fraction(0),) * rank
        self.rho = Fraction(rho) if rho is not None else Fraction(p, p - 1)
        terms = terms or {}
        if _trusted:
            self.terms = terms
            self.floor = floor
            return
        clean = {}
        for (k, v), c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            v = tuple(v)
            if len(v) != rank:
                raise PreconditionError("toric exponent has the wrong length")
            if k < 0:
                raise PreconditionError("negative pi-degree")
            if k > degree:
                floor = min(floor, self._val(k, v, c))
                continue
            clean[(k, v)] = c
        if floor is not INF:
            clean = {key: c for key, c in clean.items() if self._val(key[0], key[1], c) < floor}
        self.terms = clean
        self.floor = floor

    def _val(self, k, v, c):
        return vp(c, self.p) + k * self.rho + sum(a * w for a, w in zip(v, self.weight))

    def _like(self, terms, floor):
        return SeriesElem(self.p, self.rank, self.degree, terms, floor, self.weight, self.rho)

    # constructors ---------------------------------------------------------
    def zero(self, floor=INF):
        return self._like({}, floor)

    def one(self):
        return self._like({(0, (0,) * self.rank): 1}, INF)

    def const(self, c):
        return self._like({(0, (0,) * self.rank): c}, INF)

    def pi(self):
        return self._like({(1, (0,) * self.rank): 1}, INF)

    def monomial(self, k, v=None, c=1):
        return self._like({(k, tuple(v) if v is not None else (0,) * self.rank): c}, INF)

    @classmethod
    def ring(cls, p, rank=0, degree=32, weight=None, rho=None):
        """A zero element standing for the ring with these parameters."""
        return cls(p, rank, degree, {}, INF, weight, rho)

    # inspection -----------------------------------------------------------
    def valuation(self):
        if not self.terms:
            return INF
        return min(self._val(k, v, c) for (k, v), c in self.terms.items())

    def is_zero(self):
        return not self.terms

    @property
    def is_exact(self):
        return self.floor is INF

    def agrees(self, other):
        return (self - other).is_zero()

    def coefficient(self, k, v=None):
        return self.terms.get((k, tuple(v) if v is not None else (0,) * self.rank), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, SeriesElem):
            return NotImplemented
        return self._key() == other._key() and self.terms == other.terms and self.floor == other.floor

    def __hash__(self):
        return hash((self._key(), tuple(sorted(self.terms.items())), self.floor))

    def _key(self):
        return (self.p, self.rank, self.degree, self.weight, self.rho)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for (k, v), c in sorted(self.terms.items()):
                mono = ([f"pi^{k}"] if k else []) + [f"T{i + 1}^{a}" for i, a in enumerate(v) if a]
                parts.append(f"({c})" + ("*" + "*".join(mono) if mono else ""))
            body = " + ".join(parts)
        return body if self.floor is INF else f"{body} + O(v>={self.floor})"

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return self.const(other)
        if not isinstance(other, SeriesElem):
            raise TypeError(f"cannot combine SeriesElem with {type(other).__name__}")
        if other._key() != self._key():
            raise PrecisionMismatch("series live in different truncated rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return self._like(out, min(self.floor, other.floor))

    __radd__ = __add__

    def __neg__(self):
        return SeriesElem(self.p, self.rank, self.degree, {k: -c for k, c in self.terms.items()},
                          self.floor, self.weight, self.rho, _trusted=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if c == 0:
            return self.zero(self.floor)
        floor = self.floor + vp(c, self.p) if self.floor is not INF else INF
        return self._like({k: c * v for k, v in self.terms.items()}, floor)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        vx, vy = self.valuation(), other.valuation()
        floor = min(self.floor + vy, other.floor + vx, self.floor + other.floor)
        out = {}
        deg = self.degree
        for (k1, v1), c1 in self.terms.items():
            for (k2, v2), c2 in other.terms.items():
                k = k1 + k2
                v = tuple(a + b for a, b in zip(v1, v2))
                c = c1 * c2
                if k > deg:
                    floor = min(floor, self._val(k, v, c))
                    continue
                out[(k, v)] = out.get((k, v), 0) + c
        return self._like(out, floor)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise PreconditionError("negative powers are not supported")
        result, base = self.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # structure maps -------------------------------------------------------
    def substitute(self, pi_image, toric_images):
        """Ring map pi -> pi_image, T^v -> prod toric_images[i]^v_i (for v_i >= 0;
        negative exponents need toric_images to be monomials)."""
        out = self.zero(self.floor)
        pi_powers = {0: self.one()}
        for (k, v), c in sorted(self.terms.items()):
            if k not in pi_powers:
                top = max(pi_powers)
                cur = pi_powers[top]
                for j in range(top + 1, k + 1):
                    cur = cur * pi_image
                    pi_powers[j] = cur
            term = pi_powers[k].scale(c)
            for i, a in enumerate(v):
                if a:
                    term = term * _monomial_power(toric_images[i], a)
            out = out + term
        return out

    def frobenius(self, times=1):
        """pi -> (1+pi)^p - 1, T -> T^p."""
        x = self
        for _ in range(times):
            img = frobenius_of_pi(x)
            tor = [x.monomial(0, tuple(x.p * int(i == j) for j in range(x.rank))) for i in range(x.rank)]
            x = x.substitute(img, tor)
        return x

    def d_pi(self):
        """d/dpi."""
        out = {(k - 1, v): c * k for (k, v), c in self.terms.items() if k}
        floor = self.floor - self.rho if self.floor is not INF else INF
        return self._like(out, floor)

    def d_toric(self, i):
        """T_i d/dT_i (the invariant derivation)."""
        out = {(k, v): c * v[i] for (k, v), c in self.terms.items() if v[i]}
        return self._like(out, self.floor)

    # serialization ------------------------------------------------------
    def to_json(self):
        from .numbers import to_str

        return {"p": self.p, "rank": self.rank, "degree": self.degree,
                "weight": [to_str(w) for w in self.weight], "rho": to_str(self.rho),
                "terms": [{"pi": k, "toric": list(v), "coeff": to_str(c)} for (k, v), c in sorted(self.terms.items())],
                "floor": to_str(self.floor)}

    @classmethod
    def from_json(cls, d):
        from .numbers import from_str

        terms = {(t["pi"], tuple(t.get("toric", []))): from_str(t["coeff"]) for t in d["terms"]}
        return cls(d["p"], d["rank"], d["degree"], terms, from_str(d.get("floor", "inf")),
                   [from_str(w) for w in d.get("weight", [])] or None, from_str(d["rho"]) if "rho" in d else None)


def _monomial_power(x, a):
    if a >= 0:
        return x ** a
    if len(x.terms) != 1:
        raise PreconditionError("negative toric powers need a monomial image")
    ((k, v), c), = x.terms.items()
    if k:
        raise PreconditionError("negative toric powers need a pi-free image")
    return x._like({(0, tuple(t * a for t in v)): Fraction(c) ** a}, INF)


def frobenius_of_pi(ring):
    """(1+pi)^p - 1 in the ring of `ring`."""
    p = ring.p
    return ring._like({(k, (0,) * ring.rank): binomial(p, k) for k in range(1, p + 1)}, INF)


def one_plus_pi_power(ring, n):
    """(1+pi)^n for an integer n >= 0, exact up to the degree bound."""
    zero = (0,) * ring.rank
    terms = {(k, zero): binomial(n, k) for k in range(min(n, ring.degree) + 1)}
    floor = INF
    if n > ring.degree:
        if n - ring.degree <= 512:
            floor = min(ring._val(k, zero, binomial(n, k)) for k in range(ring.degree + 1, n + 1))
        else:
            floor = (ring.degree + 1) * ring.rho
    return ring._like(terms, floor)


def log_one_plus_pi(ring, order):
    """sum_{k<=order} (-1)^(k-1) pi^k / k (exact partial sum, no tail floor)."""
    return ring._like({(k, (0,) * ring.rank): Fraction((-1) ** (k - 1), k) for k in range(1, order + 1)}, INF)
