"""Small exact-arithmetic helpers: p-adic valuations, an infinity sentinel,
Lucas binomials and rational (de)serialization."""

from fractions import Fraction
from functools import total_ordering


@total_ordering
class _Infinity:
    """Positive infinity that compares correctly against ints and Fractions."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("inf")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("inf - inf")
        return self

    def __mul__(self, other):
        if other == 0:
            raise ArithmeticError("inf * 0")
        if other < 0:
            raise ArithmeticError("negative infinity is not represented")
        return self

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.__mul__(1 if other > 0 else -1)

    def __neg__(self):
        raise ArithmeticError("negative infinity is not represented")

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"


INF = _Infinity()


def vp(x, p):
    """p-adic valuation of an int or Fraction; INF for zero."""
    if x == 0:
        return INF
    x = Fraction(x)
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def vp_factorial(n, p):
    """Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def digits(a, p, length=None):
    """Base-p digits of a nonnegative integer, least significant first."""
    out = []
    while a or (length is not None and len(out) < length):
        out.append(a % p)
        a //= p
        if length is not None and len(out) >= length and not a:
            break
    return out


def binom_mod_p(a, k, p):
    """C(a, k) mod p by Lucas' theorem; a, k nonnegative."""
    if k < 0 or k > a:
        return 0
    r = 1
    while k:
        ai, ki = a % p, k % p
        if ki > ai:
            return 0
        r = r * _small_binom(ai, ki) % p
        a //= p
        k //= p
    return r


def _small_binom(n, k):
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


def unit_part(x, p):
    """Split a nonzero rational as p^v * u with u a p-adic unit."""
    v = vp(x, p)
    return v, Fraction(x) / Fraction(p) ** v


def is_power_of(q, p):
    if q < p:
        return False
    while q % p == 0:
        q //= p
    return q == 1


def log_p_int(q, p):
    k = 0
    while q > 1:
        q //= p
        k += 1
    return k


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def to_str(x):
    """Serialize a rational (or INF) as "a/b" / "a" / "inf"."""
    if x is INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def from_str(s):
    if isinstance(s, str) and s.strip() == "inf":
        return INF
    return Fraction(s)
