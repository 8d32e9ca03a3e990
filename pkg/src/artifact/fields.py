"""Finite fields F_q and Galois rings W_n(F_q).

F_q elements are ints in [0, q): digit i in base p is the coefficient of x^i
modulo a fixed primitive polynomial. Galois ring elements are tuples of
length r over Z/p^n in the basis 1, x, ..., x^(r-1), where x is the
Teichmuller lift of the same primitive generator, so Frobenius is x -> x^p.

>>> F = GF(2, 2)
>>> w = 2          # the class of x
>>> F.mul(w, F.mul(w, w))
1
>>> R = GaloisRing(2, 2, 1)
>>> R.add(R.one, R.one)
(2,)
"""

from functools import lru_cache

from sympy import Poly, factorint, symbols

from .numbers import is_prime


def _poly_mulmod(a, b, f, mod):
    """Product of coefficient lists a, b modulo monic f and the integer mod."""
    r = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k] % mod
        if c:
            for t in range(r):
                prod[k - r + t] -= c * f[t]
        prod[k] = 0
    out = [c % mod for c in prod[:r]]
    return out + [0] * (r - len(out))


def _poly_powmod(a, e, f, mod):
    r = len(f) - 1
    result = [1] + [0] * (r - 1)
    base = list(a) + [0] * (r - len(a))
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, mod)
        base = _poly_mulmod(base, base, f, mod)
        e >>= 1
    return result


def _is_primitive(f, p):
    """True if x generates the unit group of F_p[x]/(f), f monic of degree r."""
    r = len(f) - 1
    order = p ** r - 1
    x = [0, 1] + [0] * (r - 2) if r > 1 else [0]
    if r == 1:
        # x = -f[0]; primitive iff it generates F_p^*
        g = (-f[0]) % p
        if g == 0:
            return False
        return all(pow(g, order // l, p) != 1 for l in factorint(order)) if order > 1 else True
    one = [1] + [0] * (r - 1)
    if _poly_powmod(x, order, f, p) != one:
        return False
    return all(_poly_powmod(x, order // l, f, p) != one for l in factorint(order))


@lru_cache(maxsize=None)
def primitive_polynomial(p, r):
    """Lexicographically first monic primitive polynomial of degree r over F_p,
    returned as its coefficient list (constant term first, leading 1 last)."""
    if r == 1:
        for g in range(1, p):
            f = ((-g) % p, 1)
            if _is_primitive(list(f), p):
                return f
    for code in range(p ** r):
        coeffs = [(code // p ** i) % p for i in range(r)]
        if coeffs[0] == 0:
            continue
        f = coeffs + [1]
        if _is_primitive(f, p):
            return tuple(f)
    raise RuntimeError("no primitive polynomial found")  # unreachable


# fields at most this large get log tables and a primitive modulus
TABLE_LIMIT = 2 ** 16


@lru_cache(maxsize=None)
def field_modulus(p, r):
    """Defining polynomial of F_{p^r}: primitive for small fields, otherwise the
    lexicographically first irreducible polynomial."""
    if p ** r <= TABLE_LIMIT:
        return primitive_polynomial(p, r)
    x = symbols("x")
    for code in range(p ** r):
        coeffs = [(code // p ** i) % p for i in range(r)]
        if coeffs[0] == 0:
            continue
        if Poly(list(reversed(coeffs + [1])), x, modulus=p).is_irreducible:
            return tuple(coeffs) + (1,)
    raise RuntimeError("no irreducible polynomial found")  # unreachable


class GF:
    """The finite field with q = p^r elements."""

    def __init__(self, p, r=1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if r < 1:
            raise ValueError("degree must be positive")
        self.p, self.r, self.q = p, r, p ** r
        self.modulus = field_modulus(p, r)
        if r == 1 or self.q > TABLE_LIMIT:
            self._exp = self._log = None
            return
        q = self.q
        exp, log = [0] * (q - 1), {}
        cur = [1] + [0] * (r - 1)
        x = [0, 1] + [0] * (r - 2)
        for i in range(q - 1):
            code = self._encode(cur)
            exp[i] = code
            log[code] = i
            cur = _poly_mulmod(cur, x, list(self.modulus), p)
        self._exp, self._log = exp, log

    def _encode(self, coeffs):
        code, base = 0, 1
        for c in coeffs:
            code += (c % self.p) * base
            base *= self.p
        return code

    def coeffs(self, a):
        return [(a // self.p ** i) % self.p for i in range(self.r)]

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self):
        return hash(("GF", self.p, self.r))

    def __repr__(self):
        return f"GF({self.q})"

    zero = 0
    one = 1

    def elements(self):
        return range(self.q)

    def from_int(self, k):
        return k % self.p

    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        p, out, base = self.p, 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * base
            a //= p
            b //= p
            base *= p
        return out

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        p, out, base = self.p, 0, 1
        while a:
            out += ((-(a % p)) % p) * base
            a //= p
            base *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.r == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is None:
            return self._encode(_poly_mulmod(self.coeffs(a), self.coeffs(b), list(self.modulus), self.p))
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self.r == 1:
            return pow(a, -1, self.p)
        if self._exp is None:
            return self.pow(a, self.q - 2)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a, e):
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of 0 in a finite field")
            return 1 if e == 0 else 0
        if self.r == 1:
            return pow(a, e % (self.p - 1), self.p)
        if self._exp is None:
            f = list(self.modulus)
            return self._encode(_poly_powmod(self.coeffs(a), e % (self.q - 1), f, self.p))
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frob(self, a, k=1):
        """a -> a^(p^k); k may be negative."""
        if self.r == 1:
            return a
        return self.pow(a, pow(self.p, k % self.r))

    def scalar(self, k):
        """Image of an integer in the prime field."""
        return k % self.p


class GaloisRing:
    """W_n(F_q) = Z/p^n[x]/(f) with x a Teichmuller root of unity of order q-1."""

    def __init__(self, p, n, r=1):
        self.p, self.n, self.r = p, n, r
        self.mod = p ** n
        self.q = p ** r
        self.residue = GF(p, r)
        fbar = list(field_modulus(p, r))
        self.f = self._teichmuller_modulus(fbar)
        # Frobenius images of the basis: sigma(x^i) = x^(p i)
        xs = [0, 1] + [0] * (r - 2) if r > 1 else None
        self._frob_cols = []
        for i in range(r):
            if r == 1:
                self._frob_cols.append([1])
            else:
                self._frob_cols.append(_poly_powmod(xs, p * i, self.f, self.mod))

    def _teichmuller_modulus(self, fbar):
        p, n, r, mod = self.p, self.n, self.r, self.p ** self.n
        if n == 1:
            return fbar
        if r == 1:
            # Teichmuller lift of the root g = -fbar[0]
            g = (-fbar[0]) % p
            t = pow(g, p ** (n - 1), mod)
            return [(-t) % mod, 1]
        x = [0, 1] + [0] * (r - 2)
        omega = _poly_powmod(x, (p ** r) ** (n - 1), fbar, mod)
        powers = [[1] + [0] * (r - 1)]
        for _ in range(r):
            powers.append(_poly_mulmod(powers[-1], omega, fbar, mod))
        # solve sum_{i<r} c_i omega^i = -omega^r
        mat = [[powers[j][i] for j in range(r)] for i in range(r)]
        rhs = [(-powers[r][i]) % mod for i in range(r)]
        c = solve_unimodular(mat, rhs, p, mod)
        return [ci % mod for ci in c] + [1]

    def __eq__(self, other):
        return isinstance(other, GaloisRing) and (self.p, self.n, self.r) == (other.p, other.n, other.r)

    def __hash__(self):
        return hash(("GR", self.p, self.n, self.r))

    def __repr__(self):
        return f"GaloisRing(p={self.p}, n={self.n}, r={self.r})"

    @property
    def zero(self):
        return (0,) * self.r

    @property
    def one(self):
        return (1,) + (0,) * (self.r - 1)

    def from_int(self, k):
        return (k % self.mod,) + (0,) * (self.r - 1)

    def add(self, a, b):
        m = self.mod
        return tuple((x + y) % m for x, y in zip(a, b))

    def sub(self, a, b):
        m = self.mod
        return tuple((x - y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.mod
        return tuple((-x) % m for x in a)

    def scale(self, k, a):
        m = self.mod
        return tuple((k * x) % m for x in a)

    def mul(self, a, b):
        if self.r == 1:
            return (a[0] * b[0] % self.mod,)
        return tuple(_poly_mulmod(list(a), list(b), self.f, self.mod))

    def is_zero(self, a):
        return not any(a)

    def is_unit(self, a):
        return any(x % self.p for x in a)

    def reduce(self, a):
        """Residue class in F_q (int encoding of GF(p, r))."""
        return self.residue._encode([x % self.p for x in a])

    def lift(self, abar):
        """Digit-wise lift of a residue (not the Teichmuller lift)."""
        return tuple(self.residue.coeffs(abar))

    def teichmuller(self, abar):
        return self.pow(self.lift(abar), self.q ** (self.n - 1))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit")
        w = self.lift(self.residue.inv(self.reduce(a)))
        two = self.from_int(2)
        prec = 1
        while prec < self.n:
            w = self.mul(w, self.sub(two, self.mul(a, w)))
            prec *= 2
        return w

    def sigma(self, a, k=1):
        """Frobenius x -> x^p applied k times (k may be negative)."""
        k %= self.r
        for _ in range(k):
            out = [0] * self.r
            for i, ai in enumerate(a):
                if ai:
                    col = self._frob_cols[i]
                    for j in range(self.r):
                        out[j] += ai * col[j]
            a = tuple(c % self.mod for c in out)
        return a

    def valuation(self, a):
        """p-adic valuation (n if zero)."""
        v = self.n
        for x in a:
            if x:
                k, y = 0, x
                while y % self.p == 0:
                    y //= self.p
                    k += 1
                v = min(v, k)
        return v

    def elements(self):
        from itertools import product
        return (tuple(t) for t in product(range(self.mod), repeat=self.r))

    def embedding_into(self, big):
        """Ring map self -> big (big.r a multiple of self.r, same p and n)."""
        if big.p != self.p or big.n != self.n or big.r % self.r:
            raise ValueError("no embedding between these Galois rings")
        if big.r == self.r:
            return lambda a: tuple(a)
        Fb, Fs = big.residue, self.residue
        step = (big.q - 1) // (self.q - 1)
        root = None
        # y runs over (q_small - 1)-th roots of unity; a generator of them
        # contains every root of the small modulus among its powers
        base = Fb.p  # encodes x
        while root is None:
            y = Fb.pow(base, step)
            for j in range(self.q - 1):
                cand = Fb.pow(y, j)
                acc = 0
                for c in reversed(Fs.modulus):
                    acc = Fb.add(Fb.mul(acc, cand), Fb.from_int(c))
                if acc == 0:
                    root = cand
                    break
            base += 1
        image = big.teichmuller(root)
        powers = [big.one]
        for _ in range(self.r - 1):
            powers.append(big.mul(powers[-1], image))

        def embed(a):
            out = big.zero
            for ai, pw in zip(a, powers):
                if ai:
                    out = big.add(out, big.scale(ai, pw))
            return out

        return embed


def solve_unimodular(mat, rhs, p, mod):
    """Solve mat * x = rhs over Z/mod (mod a power of p) for mat invertible mod p."""
    n = len(mat)
    a = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular modulo p")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [(v * inv) % mod for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] % mod:
                f = a[r][col]
                a[r] = [(vr - f * vc) % mod for vr, vc in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]
