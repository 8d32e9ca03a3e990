"""Independent brute-force oracles shared by the test modules. Nothing here
imports the package under test."""

from fractions import Fraction
from itertools import combinations, product


def solve_rational(cols, x):
    """Coefficients c with sum c_j cols[j] = x, or None. Plain Gauss-Jordan."""
    n, k = len(x), len(cols)
    a = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(n)]
    row, piv = 0, []
    for c in range(k):
        r = next((i for i in range(row, n) if a[i][c] != 0), None)
        if r is None:
            continue
        a[row], a[r] = a[r], a[row]
        a[row] = [v / a[row][c] for v in a[row]]
        for i in range(n):
            if i != row and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[row])]
        piv.append(c)
        row += 1
    if any(a[i][k] != 0 for i in range(row, n)):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv):
        sol[c] = a[i][k]
    return sol


def _rank(vectors):
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [u - f * v for u, v in zip(rows[i], rows[r])]
        r += 1
    return r


def cone_membership(gens):
    """Membership test for cone(gens) by Caratheodory: x is inside iff it is a
    nonnegative combination of some linearly independent subset."""
    n = len(gens[0])
    square, thin = [], []
    for k in range(1, min(n, len(gens)) + 1):
        for sub in combinations(gens, k):
            if _rank(list(sub)) != k:
                continue
            if k == n:
                cols = [solve_rational(list(sub), [int(i == j) for j in range(n)]) for i in range(n)]
                square.append(cols)  # cols[i] = coefficients of e_i
            else:
                thin.append(list(sub))

    def member(x):
        if not any(x):
            return True
        for inv in square:
            if all(sum(inv[i][j] * x[i] for i in range(n)) >= 0 for j in range(n)):
                return True
        for sub in thin:
            sol = solve_rational(sub, x)
            if sol is not None and all(c >= 0 for c in sol):
                return True
        return False

    return member


def in_cone(x, gens):
    return cone_membership(gens)(x)


def brute_hilbert_basis(gens, n, box=8):
    """Irreducible lattice points of a pointed cone inside [-box, box]^n."""
    member = cone_membership(gens)
    pts = [x for x in product(range(-box, box + 1), repeat=n) if any(x) and member(x)]
    # any decomposition x = y + z strictly lowers a form positive on the generators
    w = next(w for w in product(range(-5, 6), repeat=n) if all(sum(a * b for a, b in zip(w, g)) > 0 for g in gens))
    pts.sort(key=lambda x: sum(a * b for a, b in zip(w, x)))
    irreducible = []
    for x in pts:
        if not any(member(tuple(a - b for a, b in zip(x, h))) for h in irreducible):
            irreducible.append(x)
    return sorted(irreducible)


def binom(n, k):
    if k < 0 or k > n:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


# pointed cones of rank <= 3 whose Hilbert bases sit inside [-8, 8]^n
CONE_CATALOG = [
    (1, [(1,)]),
    (2, [(1, 0), (0, 1)]),
    (2, [(1, 0), (1, 2)]),
    (2, [(0, 1), (2, -1)]),
    (2, [(1, 0), (1, 3)]),
    (2, [(1, 0), (-1, 2)]),
    (2, [(2, 1), (1, 2)]),
    (3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    (3, [(1, 0, 0), (0, 1, 0), (1, 1, 2)]),
    (3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)]),
    (3, [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]),
    (3, [(1, 0, 0), (0, 1, 0)]),
]


def poly_mul_mod(x, y, p, deg):
    """Dense integer polynomial product mod p truncated above deg."""
    out = [0] * (deg + 1)
    for i, a in enumerate(x):
        for j, b in enumerate(y):
            if i + j <= deg:
                out[i + j] = (out[i + j] + a * b) % p
    return out


def one_plus_u_power(n, p, deg):
    """(1+u)^n mod p to degree deg for an integer n >= 0, by exact binomials."""
    return [binom(n, k) % p for k in range(deg + 1)]


def act_on_monomial(a, nb, gamma0, p, deg):
    """Coefficients in u of ((1+u)^gamma0 - 1)^a (1+u)^nb, a, nb >= 0, to degree deg."""
    w = one_plus_u_power(gamma0, p, deg)
    w[0] = (w[0] - 1) % p
    out = [1] + [0] * deg
    for _ in range(a):
        out = poly_mul_mod(out, w, p, deg)
    return poly_mul_mod(out, one_plus_u_power(nb, p, deg), p, deg)


def _ghost(v, k, p):
    return sum(p ** i * v[i] ** (p ** (k - i)) for i in range(k + 1))


def witt_over_z(a, b, p, op):
    """Witt sum/product of integer coordinate vectors via the ghost map over Z,
    reduced mod p. Ghost components of W(Z) determine the vector."""
    n = len(a)
    out = []
    for k in range(n):
        g = _ghost(a, k, p) + _ghost(b, k, p) if op == "add" else _ghost(a, k, p) * _ghost(b, k, p)
        rest = sum(p ** i * out[i] ** (p ** (k - i)) for i in range(k))
        q, r = divmod(g - rest, p ** k)
        assert r == 0
        out.append(q)
    return tuple(x % p for x in out)


# --- Koszul complexes by enumeration -----------------------------------------

def koszul_orders(ops, mod):
    """|H^j| of the Koszul complex of commuting integer matrices on (Z/mod)^N,
    by listing every cochain. Only for tiny modules."""
    from itertools import combinations as _comb, product as _prod

    s, N = len(ops), len(ops[0])
    subsets = [list(_comb(range(s), j)) for j in range(s + 1)]

    def apply(op, x):
        return tuple(sum(op[i][k] * x[k] for k in range(N)) % mod for i in range(N))

    def d(j, chain):
        out = {T: [0] * N for T in subsets[j + 1]}
        for S, x in chain.items():
            for i in range(s):
                if i in S:
                    continue
                T = tuple(sorted(S + (i,)))
                sign = -1 if sum(1 for k in S if k < i) % 2 else 1
                y = apply(ops[i], x)
                out[T] = [(a + sign * b) % mod for a, b in zip(out[T], y)]
        return {T: tuple(v) for T, v in out.items()}

    def chains(j):
        for flat in _prod(range(mod), repeat=N * len(subsets[j])):
            yield {S: flat[t * N:(t + 1) * N] for t, S in enumerate(subsets[j])}

    def key(chain):
        return tuple(chain[S] for S in sorted(chain))

    orders = []
    images = [set() for _ in range(s + 2)]
    kernels = []
    for j in range(s + 1):
        ker = 0
        for c in chains(j):
            if j < s:
                img = d(j, c)
                images[j + 1].add(key(img))
                if all(not any(v) for v in img.values()):
                    ker += 1
            else:
                ker += 1
        kernels.append(ker)
    for j in range(s + 1):
        im = len(images[j]) if j else 1
        orders.append(kernels[j] // im)
    return orders


# --- semilinear matrices over Galois rings, written out directly -------------

def gr_apply_semilinear(R, F, vec, a):
    """F sigma^a(vec)."""
    img = [R.sigma(x, a) for x in vec]
    out = []
    for row in F:
        acc = R.zero
        for x, y in zip(row, img):
            acc = R.add(acc, R.mul(x, y))
        out.append(acc)
    return out


def gr_is_fixed_basis(R, F, U, a):
    """Columns u of U satisfy F sigma^a(u) = u, and U is invertible mod p."""
    r = len(F)
    cols = [[U[i][j] for i in range(r)] for j in range(r)]
    if any(gr_apply_semilinear(R, F, c, a) != c for c in cols):
        return False
    # invertibility via the determinant of the reduction (r <= 2 here)
    if r == 1:
        return R.is_unit(U[0][0])
    det = R.sub(R.mul(U[0][0], U[1][1]), R.mul(U[0][1], U[1][0]))
    return R.is_unit(det)


_F2_MODULI = {1: 0b10, 2: 0b111, 3: 0b1011, 4: 0b10011}


def _f2k_mul(x, y, k):
    f = _F2_MODULI[k]
    out = 0
    while y:
        if y & 1:
            out ^= x
        y >>= 1
        x <<= 1
        if x >> k & 1:
            x ^= f
    return out


def lang_search(F_rows, max_k):
    """Smallest k <= max_k such that some invertible U over F_{2^k} (listed
    exhaustively, own bit arithmetic) has F Frob(U) = U, F over F_2 of rank 2."""
    from itertools import product as _prod

    for k in range(1, max_k + 1):
        q = 2 ** k
        for a, b, c, d in _prod(range(q), repeat=4):
            if _f2k_mul(a, d, k) == _f2k_mul(b, c, k):
                continue
            U = [[a, b], [c, d]]
            FU = [[_f2k_mul(x, x, k) for x in row] for row in U]
            ok = all(
                (F_rows[i][0] * FU[0][j]) ^ (F_rows[i][1] * FU[1][j]) == U[i][j]
                for i in range(2) for j in range(2)
            )
            if ok:
                return k
    return None


def class_preimage_rank0(x, gamma0, p, D, j, H):
    """Rank-0 preimage of x (dict u-degree -> coefficient mod p, u = pibar^(1/D))
    under u -> (1+u)^gamma0 - 1 minus the identity, searched in the span of
    u^(D n) (1+u)^j. Dense elimination over F_p, everything truncated at degree H."""
    basis, images = [], []
    n = 0
    while D * n <= H:
        vec = poly_mul_mod([0] * (D * n) + [1], one_plus_u_power(j, p, H), p, H)
        img = [0] * (H + 1)
        for a, c in enumerate(vec):
            if c:
                for k, s in enumerate(act_on_monomial(a, 0, gamma0, p, H)):
                    img[k] = (img[k] + c * s) % p
        img = [(i - v) % p for i, v in zip(img, vec)]
        basis.append(vec)
        images.append(img)
        n += 1
    target = [x.get(k, 0) % p for k in range(H + 1)]
    # solve sum c_n images[n] = target by elimination on the augmented columns
    rows = [[images[n][k] for n in range(len(images))] + [target[k]] for k in range(H + 1)]
    ncols = len(images)
    piv, r = [], 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(u - f * v) % p for u, v in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(rows[i][ncols] for i in range(r, len(rows))):
        return None
    coeffs = [0] * ncols
    for i, c in enumerate(piv):
        coeffs[c] = rows[i][ncols]
    out = [0] * (H + 1)
    for c, vec in zip(coeffs, basis):
        for k, v in enumerate(vec):
            out[k] = (out[k] + c * v) % p
    return {k: v for k, v in enumerate(out) if v}


def fourier_by_grouping(terms, r, p, tden, m):
    """Character components of a doubled-frame element whose Q-exponents lie in
    [0, 1) and p^-m Z: group monomials by Q-exponent and drop the Q part.
    terms: {(zeta index, (q_1..q_r, t_1..t_r)): coeff} with numerators over p^tden."""
    scale = p ** (tden - m)
    out = {}
    for (i, b), c in terms.items():
        q, t = b[:r], b[r:]
        nu = tuple(e // scale for e in q)
        bucket = out.setdefault(nu, {})
        bucket[(i, tuple(t))] = bucket.get((i, tuple(t)), 0) + c
    return out
