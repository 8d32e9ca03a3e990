"""The group Z_p^x semidirect N_p at finite p-adic precision, its actions and
the derivation d(gamma) on truncated series."""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import NotInConvergenceDomain, PrecisionMismatch, PreconditionError
from .numbers import INF, vp


@dataclass(frozen=True)
class GammaElem:
    """(nu, gamma0) acting by 1+pibar -> (1+pibar)^gamma0, s -> (1+pibar)^<nu,s> s."""

    gamma0: int
    nu: tuple
    A: int

    def __post_init__(self):
        if self.A < 1:
            raise PreconditionError("precision A must be positive")
        object.__setattr__(self, "gamma0", int(self.gamma0))
        object.__setattr__(self, "nu", tuple(int(x) for x in self.nu))

    @classmethod
    def identity(cls, rank, A):
        return cls(1, (0,) * rank, A)

    @property
    def rank(self):
        return len(self.nu)

    def reduce(self, p):
        mod = p ** self.A
        if self.gamma0 % p == 0:
            raise PreconditionError("gamma0 must be a p-adic unit")
        return GammaElem(self.gamma0 % mod, tuple(x % mod for x in self.nu), self.A)

    def compose(self, other, p):
        if self.A != other.A:
            raise PrecisionMismatch(f"precisions {self.A} and {other.A} differ")
        if self.rank != other.rank:
            raise PreconditionError("ranks differ")
        mod = p ** self.A
        nu = tuple((a + self.gamma0 * b) % mod for a, b in zip(self.nu, other.nu))
        return GammaElem(self.gamma0 * other.gamma0 % mod, nu, self.A)

    def inverse(self, p):
        mod = p ** self.A
        ginv = pow(self.gamma0, -1, mod)
        return GammaElem(ginv, tuple(-ginv * x % mod for x in self.nu), self.A)

    def power(self, k, p):
        result = GammaElem.identity(self.rank, self.A)
        base = self if k >= 0 else self.inverse(p)
        k = abs(k)
        while k:
            if k & 1:
                result = result.compose(base, p)
            base = base.compose(base, p)
            k >>= 1
        return result

    def in_U(self, n, p):
        """Membership in U_n, decided on the truncated components."""
        if n > self.A:
            raise PreconditionError(f"precision A={self.A} cannot decide membership in U_{n}")
        mod = p ** n
        return (self.gamma0 - 1) % mod == 0 and all(x % mod == 0 for x in self.nu)

    def is_identity(self, p):
        mod = p ** self.A
        return self.gamma0 % mod == 1 and all(x % mod == 0 for x in self.nu)

    def to_json(self):
        return {"gamma0": str(self.gamma0), "nu": [str(x) for x in self.nu], "A": self.A}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["gamma0"]), tuple(int(x) for x in d["nu"]), int(d["A"]))


# ---------------------------------------------------------------------------
# actions

def act_period(g, x):
    """Action of g on CharPElem, WittElem, CycloElem or SeriesElem."""
    from .charp import CharPElem, gamma_act_charp
    from .series import SeriesElem
    from .wittperiod import CycloElem, WittElem

    if isinstance(x, CharPElem):
        return gamma_act_charp(g, x)
    if isinstance(x, (WittElem, CycloElem)):
        return x.gamma_act(g)
    if isinstance(x, SeriesElem):
        return act_series(g, x)
    raise TypeError(f"no Gamma action on {type(x).__name__}")


def _one_plus_pi_signed(ring, n):
    """(1+pi)^n for any integer n (binomial series for n < 0)."""
    from .series import one_plus_pi_power

    if n >= 0:
        return one_plus_pi_power(ring, n)
    zero = (0,) * ring.rank
    terms = {}
    for k in range(ring.degree + 1):
        c = comb(k - n - 1, k)
        terms[(k, zero)] = -c if k % 2 else c
    return ring._like(terms, (ring.degree + 1) * ring.rho)


def precision_floor(g, ring):
    """Valuation of (1+pi)^(p^A) - 1: how far the truncated components determine
    (1+pi)^gamma0 and (1+pi)^<nu, v>."""
    p = ring.p
    return min(g.A - j + p ** j * ring.rho for j in range(g.A + 1))


def act_series(g, x):
    """gamma(1+pi) = (1+pi)^gamma0, gamma(T^v) = (1+pi)^<nu,v> T^v on the
    representatives; the p-adic truncation of g is recorded in the floor."""
    if len(g.nu) != x.rank:
        raise PreconditionError("Gamma element has the wrong rank")
    pi_img = _one_plus_pi_signed(x, g.gamma0) - x.one()
    by_toric = {}
    for (k, v), c in x.terms.items():
        by_toric.setdefault(v, {})[(k, (0,) * x.rank)] = c
    out = x.zero(x.floor)
    for v, part in by_toric.items():
        twist = _one_plus_pi_signed(x, sum(a * b for a, b in zip(g.nu, v)))
        out = out + x._like(part, INF).substitute(pi_img, ()) * twist * x.monomial(0, v)
    v = x.valuation()
    if v is not INF:
        out = out + x.zero(v + precision_floor(g, x) - x.rho)
    return out


# ---------------------------------------------------------------------------
# the derivation d(gamma)

def _log_unit(c, p, terms=40):
    """log(c) for c = 1 + x, v_p(x) >= 1 (>= 2 for p = 2), with an error valuation."""
    x = Fraction(c) - 1
    vx = vp(x, p) if x else INF
    if x == 0:
        return Fraction(0), INF
    total = sum(Fraction((-1) ** (k - 1), k) * x ** k for k in range(1, terms + 1))
    err = min(k * vx - vp(k, p) for k in range(terms + 1, terms + 1 + p ** 4))
    return total, err


def _log_ratio(c, p, terms=40):
    """log(c)/(c-1) = sum (-1)^(k-1) x^(k-1)/k."""
    x = Fraction(c) - 1
    if x == 0:
        return Fraction(1), INF
    vx = vp(x, p)
    total = sum(Fraction((-1) ** (k - 1), k) * x ** (k - 1) for k in range(1, terms + 1))
    err = min((k - 1) * vx - vp(k, p) for k in range(terms + 1, terms + 1 + p ** 4))
    return total, err


def _log_one_plus_pi_with_tail(ring):
    from .series import log_one_plus_pi

    D = ring.degree
    p = ring.p
    tail = min(k * ring.rho - vp(k, p) for k in range(D + 1, p * (D + 1) + p * p))
    return log_one_plus_pi(ring, D) + ring.zero(tail)


def action_gain(g, ring):
    """Guaranteed valuation gain of (gamma - 1) from its effect on pi and the T_i."""
    gains = []
    pi = ring.pi()
    d = act_series(g, pi) - pi
    gains.append((d.valuation() if not d.is_zero() else d.floor) - ring.rho)
    for i in range(ring.rank):
        e = tuple(int(i == j) for j in range(ring.rank))
        t = ring.monomial(0, e)
        d = act_series(g, t) - t
        gains.append(d.valuation() if not d.is_zero() else d.floor)
    return min(gains)


def dgamma(g, x, order):
    """sum_{i<=order} (-1)^(i-1) (gamma-1)^i(x) / i with a rigorous tail floor."""
    from .series import SeriesElem

    if not isinstance(x, SeriesElem):
        raise TypeError("dgamma is defined on the imperfect series carrier only")
    p = x.p
    if not g.in_U(2, p):
        raise NotInConvergenceDomain("the log series is only used for gamma in U_2")
    acc = x.zero()
    y = x
    for i in range(1, order + 1):
        y = act_series(g, y) - y
        acc = acc + y.scale(Fraction((-1) ** (i - 1), i))
    v = x.valuation()
    if v is not INF:
        b = action_gain(g, x)
        if b is not INF and b > 0:
            tail = min(v + i * b - vp(i, p) for i in range(order + 1, order + 1 + p ** 4))
            acc = acc + x.zero(tail)
    return acc


def dgamma_closed(g, x):
    """log(gamma0) (1+pi) log(1+pi) d/dpi + (log(gamma0)/(gamma0-1)) sum nu_i log(1+pi) T_i d/dT_i."""
    p = x.p
    log_g, err_g = _log_unit(g.gamma0, p)
    ratio, err_r = _log_ratio(g.gamma0, p)
    lg = _log_one_plus_pi_with_tail(x)
    one_plus = x.one() + x.pi()
    out = (one_plus * lg * x.d_pi()).scale(log_g) if log_g else x.zero()
    v = x.valuation()
    if err_g is not INF and v is not INF:
        out = out + x.zero(v + err_g)
    for i, n in enumerate(g.nu):
        if n:
            coeff = ratio * n
            out = out + (lg * x.d_toric(i)).scale(coeff)
            if err_r is not INF and v is not INF:
                out = out + x.zero(v + err_r + vp(n, p))
    return out


# ---------------------------------------------------------------------------
# equivariance report

def check_equivariance(pairs, theta_precision=None):
    """Max-deviation report for theta o gamma = gamma o theta and
    phi o gamma = gamma o phi over (g, x) pairs of Witt vectors or CharPElems."""
    from .charp import CharPElem, frobenius, gamma_act_charp
    from .wittperiod import WittElem, theta_eval

    report = {"count": 0, "theta": INF, "phi": INF}
    for g, x in pairs:
        report["count"] += 1
        if isinstance(x, WittElem):
            fx = x.frobenius()
            d = act_period(g, fx) - act_period(g, x).frobenius()
            report["phi"] = min(report["phi"], _witt_deviation(d))
            if theta_precision is not None:
                N = theta_precision
                lhs = theta_eval(act_period(g, x), N)
                rhs = act_period(g, theta_eval(x, N))
                diff = lhs - rhs
                report["theta"] = min(report["theta"], INF if diff.is_zero() else diff.p_valuation())
        elif isinstance(x, CharPElem):
            d = gamma_act_charp(g, frobenius(x)) - frobenius(gamma_act_charp(g, x))
            report["phi"] = min(report["phi"], d.valuation() if not d.is_zero() else d.floor)
        else:
            raise TypeError(f"unsupported carrier {type(x).__name__}")
    return report


def _witt_deviation(d):
    best = INF
    for i, c in enumerate(d.components):
        v = c.valuation() if not c.is_zero() else c.floor
        if v is not INF:
            best = min(best, i + v / d.p ** i)
    return best
