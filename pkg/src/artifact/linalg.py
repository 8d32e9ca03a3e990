"""Exact integer and rational linear algebra used by the cone code and by the
phi-module code (Smith normal form over Z/p^n)."""

from fractions import Fraction


def rational_rref(rows):
    """Reduced row echelon form over Q. Returns (rref rows, pivot columns)."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots, r = [], 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def rank(rows):
    return len(rational_rref(rows)[1])


def nullspace(rows, n):
    """Basis of {x in Q^n : rows . x = 0} as Fraction vectors."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = rational_rref(rows)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def primitive(v):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    from math import gcd

    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    w = [int(x * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    if g == 0:
        return tuple(w)
    return tuple(x // g for x in w)


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def row_reduce_integer(mat):
    """Unimodular U (list of rows) with U * mat upper echelon over Z.

    Returns (U, reduced)."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    a = [list(map(int, row)) for row in mat]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        for i in range(r + 1, m):
            if a[i][c] == 0:
                continue
            g, x, y = _xgcd(a[r][c], a[i][c])
            s, t = a[r][c] // g, a[i][c] // g
            ar, ai = a[r], a[i]
            a[r] = [x * p + y * q for p, q in zip(ar, ai)]
            a[i] = [-t * p + s * q for p, q in zip(ar, ai)]
            ur, ui = u[r], u[i]
            u[r] = [x * p + y * q for p, q in zip(ur, ui)]
            u[i] = [-t * p + s * q for p, q in zip(ur, ui)]
        if r < m and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            r += 1
        if r == m:
            break
    return u, a


def integer_inverse(u):
    """Inverse of a unimodular integer matrix."""
    n = len(u)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(u)]
    red, piv = rational_rref(aug)
    inv = [[int(x) for x in row[n:]] for row in red]
    return inv


def transpose(mat):
    return [list(col) for col in zip(*mat)] if mat else []


def complete_basis(cols, n):
    """Given columns spanning a saturated sublattice of Z^n, return extra
    columns completing them to a basis of Z^n (raises if not saturated)."""
    k = len(cols)
    if k == 0:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    b = [[cols[j][i] for j in range(k)] for i in range(n)]  # n x k
    u, red = row_reduce_integer(b)
    top = [row[:k] for row in red[:k]]
    det = determinant(top)
    if abs(det) != 1:
        raise ValueError("sublattice is not saturated")
    uinv = integer_inverse(u)
    return [tuple(uinv[i][j] for i in range(n)) for j in range(k, n)]


def determinant(mat):
    n = len(mat)
    if n == 0:
        return 1
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def integer_kernel(rows, n):
    """Z-basis of {x in Z^n : rows . x = 0} (a saturated lattice)."""
    if not rows:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    # column operations on rows == row operations on the transpose
    at = transpose(rows)  # n x m
    u, red = row_reduce_integer(at)
    out = []
    for i, row in enumerate(red):
        if not any(row):
            out.append(tuple(u[i]))
    return out


def saturated_image_rank(cols, n):
    """(rank, saturated?) of the sublattice spanned by integer columns."""
    if not cols:
        return 0, True
    b = [[c[i] for c in cols] for i in range(n)]  # n x k
    _, red = row_reduce_integer(transpose(b))  # k x n, row space = column span
    nz = [row for row in red if any(row)]
    r = len(nz)
    # saturated iff the gcd of the r x r minors of nz is 1; use Smith form
    return r, smith_diagonal_integer(nz) == [1] * r


def smith_diagonal_integer(mat):
    """Nonzero invariant factors of an integer matrix."""
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # find smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                    done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]), None)
                if bad:
                    a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                    done = False
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def rref_mod_p(rows, p):
    """Reduced row echelon form over F_p. Returns (rows, pivot columns)."""
    a = [[x % p for x in row] for row in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots, r = [], 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


def solve_mod_p(mat, rhs, p):
    """One solution x of mat . x = rhs over F_p, or None."""
    n = len(mat[0])
    red, piv = rref_mod_p([list(row) + [b] for row, b in zip(mat, rhs)], p)
    if n in piv:
        return None
    x = [0] * n
    for row, c in zip(red, piv):
        x[c] = row[n]
    return x


def nullspace_mod_p(mat, n, p):
    """Basis of {x in F_p^n : mat . x = 0}."""
    red, piv = rref_mod_p(mat, p) if mat else ([], [])
    basis = []
    for free in (c for c in range(n) if c not in piv):
        x = [0] * n
        x[free] = 1
        for row, c in zip(red, piv):
            x[c] = (-row[free]) % p
        basis.append(x)
    return basis
