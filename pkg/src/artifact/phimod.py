"""Frobenius modules over finite fields, Galois rings W_n(F_q) and exact
p-adic scalars: linearization, Newton slopes, twisting, purity, trivialization
over finite extensions and Koszul cohomology of the commuting operators.

Matrices act on column vectors: phi^a(v) = F sigma^a(v).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import NamedTuple

from .errors import (
    IncompatiblePower, NonCommutingOperators, PreconditionError,
    SaturationDiverged, SearchCapExceeded, ValuationUnknown,
)
from .fields import GaloisRing
from .linalg import nullspace_mod_p, rational_rref, smith_diagonal_integer, solve_mod_p
from .numbers import INF, from_str, to_str, vp


@dataclass(frozen=True)
class ExactScalars:
    """Scalars with exact p-adic valuation: rationals, or PeriodScalars (p^k * unit).
    Frobenius acts trivially on them."""

    p: int


def _is_rational(x):
    return isinstance(x, (int, Fraction))


def _valuation(x, p):
    if _is_rational(x):
        if x == 0:
            return INF
        return vp(Fraction(x), p)
    if hasattr(x, "p_power"):
        return x.p_power
    raise ValuationUnknown(f"valuation of {type(x).__name__} entry is not tracked exactly")


def _scalar_mul(x, y):
    if _is_rational(x) and _is_rational(y):
        return Fraction(x) * Fraction(y)
    if _is_rational(x) or _is_rational(y):
        raise PreconditionError("cannot mix rational and PeriodScalar entries")
    return x * y


# ---------------------------------------------------------------------------
# matrices over a base

def _gr_matmul(R, A, B):
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = R.zero
            for t in range(m):
                if not R.is_zero(A[i][t]) and not R.is_zero(B[t][j]):
                    acc = R.add(acc, R.mul(A[i][t], B[t][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _q_matmul(A, B):
    return tuple(tuple(sum((Fraction(A[i][t]) * Fraction(B[t][j]) for t in range(len(B))), Fraction(0))
                       for j in range(len(B[0]))) for i in range(len(A)))


def _gr_sigma(R, A, k):
    return tuple(tuple(R.sigma(x, k) for x in row) for row in A)


def _gr_identity(R, r):
    return tuple(tuple(R.one if i == j else R.zero for j in range(r)) for i in range(r))


def _q_identity(r):
    return tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))


def _gf_rank(F, rows):
    """Rank over the finite field F of a matrix with int-encoded entries."""
    a = [list(row) for row in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = F.inv(a[rank][c])
        a[rank] = [F.mul(x, inv) for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _q_det(A):
    from .linalg import determinant

    return determinant([[Fraction(x) for x in row] for row in A])


@dataclass(frozen=True)
class PhiModule:
    """A phi^a-module: `matrix` is the action of phi^a on a basis; the optional
    gamma_matrices act linearly and commute with it and with each other.
    gamma_chars holds the cyclotomic character value of each gamma generator
    (used by twisting; defaults to 1)."""

    base: object
    a: int
    matrix: tuple
    gamma_matrices: tuple = ()
    gamma_chars: tuple = field(default=None)

    def __post_init__(self):
        m = tuple(tuple(row) for row in self.matrix)
        if not m or any(len(row) != len(m) for row in m):
            raise PreconditionError("the Frobenius matrix must be square")
        if self.a < 1:
            raise PreconditionError("Frobenius power must be positive")
        object.__setattr__(self, "matrix", m)
        gs = tuple(tuple(tuple(row) for row in g) for g in self.gamma_matrices)
        object.__setattr__(self, "gamma_matrices", gs)
        chars = self.gamma_chars if self.gamma_chars is not None else (1,) * len(gs)
        if len(chars) != len(gs):
            raise PreconditionError("one character value per gamma matrix")
        object.__setattr__(self, "gamma_chars", tuple(Fraction(c) for c in chars))
        if not self._invertible(m):
            raise PreconditionError("the Frobenius matrix is not invertible over the base")
        for g in gs:
            if len(g) != len(m) or not self._invertible(g):
                raise PreconditionError("gamma matrices must be invertible of the module's rank")
        self._check_commuting()

    @property
    def rank(self):
        return len(self.matrix)

    @property
    def is_galois(self):
        return isinstance(self.base, GaloisRing)

    @property
    def p(self):
        return self.base.p

    def _invertible(self, m):
        if self.is_galois:
            R = self.base
            return _gf_rank(R.residue, [[R.reduce(x) for x in row] for row in m]) == len(m)
        if len(m) == 1:
            return m[0][0] != 0
        if not all(_is_rational(x) for row in m for x in row):
            # only triangular shapes are decidable; others are left to the
            # operations, which report unknown valuations
            return not _triangular(m) or all(m[i][i] != 0 for i in range(len(m)))
        return _q_det(m) != 0

    def _check_commuting(self):
        gs = self.gamma_matrices
        if not gs:
            return
        if self.is_galois:
            R = self.base
            F = self.matrix
            for g in gs:
                if _gr_matmul(R, F, _gr_sigma(R, g, self.a)) != _gr_matmul(R, g, F):
                    raise NonCommutingOperators("a gamma matrix does not commute with Frobenius")
            for g, h in combinations(gs, 2):
                if _gr_matmul(R, g, h) != _gr_matmul(R, h, g):
                    raise NonCommutingOperators("gamma matrices do not commute")
            return
        mats = [self.matrix] + list(gs)
        if not all(_is_rational(x) for m in mats for row in m for x in row):
            raise PreconditionError("gamma matrices over period scalars must be rational")
        for g, h in combinations(mats, 2):
            if _q_matmul(g, h) != _q_matmul(h, g):
                raise NonCommutingOperators("operators do not commute")

    # -- json -------------------------------------------------------------
    def to_json(self):
        if self.is_galois:
            R = self.base
            base = {"kind": "galois", "p": R.p, "n": R.n, "r": R.r}
            enc = list
        else:
            base = {"kind": "exact", "p": self.base.p}
            enc = _encode_exact
        return {"base": base, "a": self.a,
                "matrix": [[enc(x) for x in row] for row in self.matrix],
                "gamma_matrices": [[[enc(x) for x in row] for row in g] for g in self.gamma_matrices],
                "gamma_chars": [to_str(c) for c in self.gamma_chars]}

    @classmethod
    def from_json(cls, d):
        b = d["base"]
        if b["kind"] == "galois":
            base = GaloisRing(b["p"], b["n"], b.get("r", 1))
            dec = tuple
        elif b["kind"] == "exact":
            base = ExactScalars(b["p"])
            dec = _decode_exact
        else:
            raise PreconditionError(f"unknown base kind {b['kind']!r}")
        gms = [[[dec(x) for x in row] for row in g] for g in d.get("gamma_matrices", [])]
        chars = [from_str(c) for c in d["gamma_chars"]] if "gamma_chars" in d else None
        return cls(base, d.get("a", 1), [[dec(x) for x in row] for row in d["matrix"]], gms, chars)


def _encode_exact(x):
    if _is_rational(x):
        return to_str(Fraction(x))
    if hasattr(x, "p_power") and _is_rational(x.unit):
        return {"p_power": x.p_power, "unit": to_str(Fraction(x.unit))}
    raise PreconditionError("only rational units serialize")


def _decode_exact(x):
    if isinstance(x, dict):
        from .wittperiod import PeriodScalar

        return PeriodScalar(int(x["p_power"]), from_str(x["unit"]))
    return from_str(x) if isinstance(x, str) else Fraction(x)


def _triangular(m):
    r = len(m)
    lower = all(m[i][j] == 0 for i in range(r) for j in range(i + 1, r))
    upper = all(m[i][j] == 0 for i in range(r) for j in range(i))
    return lower or upper


# ---------------------------------------------------------------------------
# linearization and slopes

def linearize(M, d):
    """Matrix of phi^d = F sigma^a(F) ... sigma^(d-a)(F), linear over the
    sigma^d-fixed subring."""
    if d < 1 or d % M.a:
        raise IncompatiblePower(f"{d} is not a positive multiple of a={M.a}")
    steps = d // M.a
    F = M.matrix
    if M.is_galois:
        R = M.base
        out = F
        for j in range(1, steps):
            out = _gr_matmul(R, out, _gr_sigma(R, F, j * M.a))
        return out
    if M.rank == 1:
        x = F[0][0]
        out = x
        for _ in range(1, steps):
            out = _scalar_mul(out, x)
        return ((out,),)
    if not all(_is_rational(x) for row in F for x in row):
        raise PreconditionError("iterates of non-rational matrices are only formed in rank 1")
    out = F
    for _ in range(1, steps):
        out = _q_matmul(out, F)
    return out


@dataclass(frozen=True)
class SlopePolygon:
    slopes: tuple

    def __post_init__(self):
        object.__setattr__(self, "slopes", tuple(sorted(Fraction(s) for s in self.slopes)))

    @property
    def rank(self):
        return len(self.slopes)

    @property
    def degree(self):
        return sum(self.slopes, Fraction(0))

    def shifted(self, m):
        return SlopePolygon(tuple(s + m for s in self.slopes))

    def to_json(self):
        return [to_str(s) for s in self.slopes]


def newton_polygon(vals):
    """Lower convex hull of the points (i, vals[i]) (INF points skipped), as a
    list of segment slopes with multiplicity."""
    pts = [(i, Fraction(v)) for i, v in enumerate(vals) if v is not INF]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.extend([(y2 - y1) / (x2 - x1)] * (x2 - x1))
    return out


def _charpoly_rational(F):
    """Coefficients c_0..c_r of det(x - F) (monic, c_r = 1)."""
    from sympy import Matrix, Rational

    mat = Matrix([[Rational(x.numerator, x.denominator) for x in map(Fraction, row)] for row in F])
    coeffs = mat.charpoly().all_coeffs()  # leading first
    return [Fraction(int(c.p), int(c.q)) for c in reversed(coeffs)]


def newton_slopes(M):
    """Slopes of M: minus the Newton-polygon slopes of the linearized Frobenius,
    divided by the linearization length (slope of a rank-1 phi^d multiplier
    lambda is -v_p(lambda)/d)."""
    p = M.p
    if M.is_galois:
        # an invertible integral matrix has unit determinant, so the polygon
        # of its characteristic polynomial is flat
        return SlopePolygon((0,) * M.rank)
    F = M.matrix
    if M.rank == 1:
        v = _valuation(F[0][0], p)
        return SlopePolygon((-Fraction(v, M.a),))
    if all(_is_rational(x) for row in F for x in row):
        cp = _charpoly_rational(F)
        vals = [_valuation(c, p) for c in cp]
        segs = newton_polygon(vals)
        return SlopePolygon(tuple(s / M.a for s in segs))
    if _triangular(F):
        return SlopePolygon(tuple(-Fraction(_valuation(F[i][i], p), M.a) for i in range(M.rank)))
    raise ValuationUnknown("characteristic polynomial of a non-rational, non-triangular matrix")


def twist(M, m):
    """M(m): phi^a scaled by p^(-a m) (the phi^a-multiplier of t^(-m)), gamma
    generators scaled by chi(gamma)^(-m). Slopes move up by m."""
    if m == 0:
        return M
    if M.is_galois:
        raise PreconditionError("twisting by powers of t needs p to be invertible in the base")
    p = M.p
    factor = Fraction(p) ** (-M.a * m)
    F = tuple(tuple(_scale_entry(x, factor, p) for x in row) for row in M.matrix)
    gs = tuple(tuple(tuple(Fraction(x) * Fraction(c) ** (-m) for x in row) for row in g)
               for g, c in zip(M.gamma_matrices, M.gamma_chars))
    return PhiModule(M.base, M.a, F, gs, M.gamma_chars)


def _scale_entry(x, factor, p):
    if _is_rational(x):
        return Fraction(x) * factor
    from .wittperiod import PeriodScalar

    k = vp(factor, p)
    u = factor / Fraction(p) ** k
    return PeriodScalar(x.p_power + k, x.unit if u == 1 else x.unit * u)


def _zp_lattice(vectors, p):
    """Triangular Z_(p)-basis of the lattice spanned by rational vectors."""
    vecs = [[Fraction(x) for x in v] for v in vectors if any(v)]
    if not vecs:
        return []
    basis = []
    for i in range(len(vecs[0])):
        cands = [v for v in vecs if v[i] != 0]
        if not cands:
            continue
        piv = min(cands, key=lambda v: vp(v[i], p))
        vecs.remove(piv)
        rest = []
        for v in vecs:
            if v[i] != 0:
                f = v[i] / piv[i]
                v = [x - f * y for x, y in zip(v, piv)]
            if any(v):
                rest.append(v)
        basis.append(piv)
        vecs = rest
    return basis


def _covolume(basis, p):
    out = 0
    for i, v in enumerate(basis):
        j = next(k for k, x in enumerate(v) if x != 0)
        out += vp(v[j], p)
    return out


def stable_lattice(N, p, cap=64):
    """Saturate L_{k+1} = L_0 + N L_k from the standard lattice; returns
    (basis, steps) or None if the index keeps growing for `cap` steps."""
    r = len(N)
    basis = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
    cov = 0
    for step in range(1, cap + 1):
        images = [[sum((Fraction(N[i][t]) * v[t] for t in range(r)), Fraction(0)) for i in range(r)] for v in basis]
        new = _zp_lattice([[Fraction(int(i == j)) for j in range(r)] for i in range(r)] + images, p)
        new_cov = _covolume(new, p)
        basis = new
        if new_cov == cov:
            return basis, step
        cov = new_cov
    return None


def is_pure(M, c, d):
    """All slopes equal c/d and p^c phi^d preserves a lattice (found by
    saturating sums of its iterates on the standard lattice)."""
    if d < 1 or d % M.a:
        raise IncompatiblePower(f"{d} is not a positive multiple of a={M.a}")
    poly = newton_slopes(M)
    target = Fraction(c, d)
    if any(s != target for s in poly.slopes):
        return False
    if M.is_galois:
        return True
    N = linearize(M, d)
    p = M.p
    if M.rank == 1:
        return _valuation(N[0][0], p) + c == 0
    if not all(_is_rational(x) for row in N for x in row):
        raise ValuationUnknown("lattice saturation needs rational entries")
    scaled = tuple(tuple(Fraction(p) ** c * Fraction(x) for x in row) for row in N)
    if stable_lattice(scaled, p) is None:
        spread = (min(poly.slopes), max(poly.slopes))
        raise SaturationDiverged(f"lattice sums did not saturate; slope spread {spread}")
    return True


def is_etale(M):
    return is_pure(M, 0, M.a)


# ---------------------------------------------------------------------------
# trivialization over finite extensions

class Trivialization(NamedTuple):
    k: int
    U: tuple
    ring: GaloisRing


def _frobenius_order(M, k):
    """Order of sigma^a on the residue field F_{q^k}."""
    total = M.base.r * k
    return total // gcd(M.a, total)


def trivializable_over(M, k):
    """The semilinear phi^a on W_n(F_{q^k})^r has a fixed basis iff its m-th
    iterate is the identity, m the order of sigma^a there (Galois descent)."""
    m = _frobenius_order(M, k)
    return linearize(M, M.a * m) == _gr_identity(M.base, M.rank)


def trivialize(M, cap=64):
    """Smallest k <= cap and U over W_n(F_{q^k}) with U^-1 F sigma^a(U) = 1."""
    if not M.is_galois:
        raise PreconditionError("trivialization is implemented over W_n(F_q)")
    R = M.base
    for k in range(1, cap + 1):
        if not trivializable_over(M, k):
            continue
        big = GaloisRing(R.p, R.n, R.r * k)
        emb = R.embedding_into(big)
        F = tuple(tuple(emb(x) for x in row) for row in M.matrix)
        U = _fixed_basis(big, F, M.a)
        if U is None:
            continue
        if _gr_matmul(big, F, _gr_sigma(big, U, M.a)) != U:
            raise AssertionError("trivialization failed its own check")
        return Trivialization(k, U, big)
    raise SearchCapExceeded(f"no trivialization found over extensions of degree <= {cap}")


def _fixed_basis(R, F, a):
    """Solve F sigma^a(U) = U for invertible U, mod p first and then one
    p-adic digit at a time (each step an F_p-linear Artin-Schreier system)."""
    p, r, dim = R.p, len(F), R.r

    def apply(vec):
        img = [R.sigma(x, a) for x in vec]
        return [_dot(R, F[i], img) for i in range(r)]

    # F_p-matrix of x -> Fbar sigma^a(x) - x on (F_q)^r
    cols = []
    for i in range(r):
        for c in range(dim):
            vec = [R.zero] * r
            vec[i] = tuple(int(t == c) for t in range(dim))
            img = apply(vec)
            cols.append([(img[j][t] - vec[j][t]) % p for j in range(r) for t in range(dim)])
    L = [[col[row] for col in cols] for row in range(r * dim)]

    chosen = []
    for v in nullspace_mod_p(L, r * dim, p):
        vec = [tuple(v[i * dim:(i + 1) * dim]) for i in range(r)]
        trial = chosen + [vec]
        if _gf_rank(R.residue, [[R.reduce(x) for x in w] for w in trial]) == len(trial):
            chosen = trial
        if len(chosen) == r:
            break
    if len(chosen) < r:
        return None

    columns = []
    for vec in chosen:
        for level in range(1, R.n):
            img = apply(vec)
            scale = p ** level
            err = [tuple((x - y) // scale % p for x, y in zip(img[j], vec[j])) for j in range(r)]
            rhs = [(-err[j][t]) % p for j in range(r) for t in range(dim)]
            x = solve_mod_p(L, rhs, p)
            if x is None:
                return None
            vec = [tuple((vec[j][t] + scale * x[j * dim + t]) % R.mod for t in range(dim)) for j in range(r)]
        columns.append(vec)
    return tuple(tuple(columns[j][i] for j in range(r)) for i in range(r))


def _dot(R, row, vec):
    acc = R.zero
    for x, y in zip(row, vec):
        if not R.is_zero(x) and not R.is_zero(y):
            acc = R.add(acc, R.mul(x, y))
    return acc


# ---------------------------------------------------------------------------
# Koszul cohomology

def operator_matrices(M):
    """Z/p^n-matrices of phi^a - 1 and g - 1 (g in gamma_matrices) on the
    coordinates of W_n(F_q)^r."""
    if not M.is_galois:
        raise PreconditionError("Koszul cohomology is computed for finite modules over W_n(F_q)")
    R = M.base
    r, dim = M.rank, R.r

    def as_matrix(fn):
        cols = []
        for i in range(r):
            for c in range(dim):
                vec = [R.zero] * r
                vec[i] = tuple(int(t == c) for t in range(dim))
                img = fn(vec)
                cols.append([(img[j][t] - vec[j][t]) % R.mod for j in range(r) for t in range(dim)])
        return [[col[row] for col in cols] for row in range(r * dim)]

    def frob(vec):
        img = [R.sigma(x, M.a) for x in vec]
        return [_dot(R, M.matrix[i], img) for i in range(r)]

    ops = [as_matrix(frob)]
    for g in M.gamma_matrices:
        ops.append(as_matrix(lambda vec, g=g: [_dot(R, g[i], vec) for i in range(r)]))
    return ops


def koszul_differentials(ops, mod):
    """Integer matrices of the Koszul complex K^0 -> ... -> K^s of commuting
    endomorphisms of (Z/mod)^N; K^j is indexed by j-subsets of the operators."""
    s = len(ops)
    N = len(ops[0])
    subsets = [list(combinations(range(s), j)) for j in range(s + 1)]
    diffs = []
    for j in range(s):
        src, dst = subsets[j], subsets[j + 1]
        index = {S: t for t, S in enumerate(dst)}
        D = [[0] * (N * len(src)) for _ in range(N * len(dst))]
        for a_idx, S in enumerate(src):
            for i in range(s):
                if i in S:
                    continue
                T = tuple(sorted(S + (i,)))
                sign = -1 if sum(1 for k in S if k < i) % 2 else 1
                b_idx = index[T]
                for row in range(N):
                    for col in range(N):
                        if ops[i][row][col]:
                            D[b_idx * N + row][a_idx * N + col] += sign * ops[i][row][col]
        diffs.append([[x % mod for x in row] for row in D])
    return diffs, [N * len(sub) for sub in subsets]


def _kernel_mod(D, n_cols, mod):
    """Z-basis of {x in Z^n : D x = 0 mod `mod`}."""
    from .linalg import integer_kernel

    if not D:
        return [[int(i == j) for j in range(n_cols)] for i in range(n_cols)]
    m = len(D)
    rows = [list(D[i]) + [-mod * int(i == k) for k in range(m)] for i in range(m)]
    ker = integer_kernel(rows, n_cols + m)
    return [list(v[:n_cols]) for v in ker]


def _invariant_factors(kernel, gens, n):
    """Invariant factors (> 1) of span(kernel) / span(gens), gens inside kernel."""
    K = [[Fraction(v[i]) for v in kernel] for i in range(n)]  # columns = kernel basis
    aug = [K[i] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, piv = rational_rref(aug)
    inv = [row[n:] for row in red]
    coords = []
    for g in gens:
        c = [sum((inv[i][t] * g[t] for t in range(n)), Fraction(0)) for i in range(n)]
        if any(x.denominator != 1 for x in c):
            raise AssertionError("boundary not contained in the cycles")
        coords.append([int(x) for x in c])
    mat = [[coords[j][i] for j in range(len(coords))] for i in range(n)]
    diag = smith_diagonal_integer(mat)
    return sorted(d for d in diag if d != 1)


def koszul_from_operators(ops, p, n):
    """Cohomology of the Koszul complex of commuting endomorphisms `ops` of
    (Z/p^n)^N, as invariant-factor lists per degree (H^j = sum Z/d)."""
    mod = p ** n
    ops = [[[x % mod for x in row] for row in op] for op in ops]
    for f, g in combinations(ops, 2):
        if _int_matmul(f, g, mod) != _int_matmul(g, f, mod):
            raise NonCommutingOperators("Koszul operators must commute")
    if not ops:
        raise PreconditionError("at least one operator is needed")
    diffs, sizes = koszul_differentials(ops, mod)
    out = []
    for j, size in enumerate(sizes):
        kernel = _kernel_mod(diffs[j], size, mod) if j < len(diffs) else \
            [[int(i == k) for k in range(size)] for i in range(size)]
        gens = [[mod * int(i == k) for k in range(size)] for i in range(size)]
        if j > 0:
            prev = diffs[j - 1]
            gens += [[prev[row][c] for row in range(size)] for c in range(sizes[j - 1])]
        out.append(_invariant_factors(kernel, gens, size))
    return out


def _int_matmul(A, B, mod):
    return [[sum(A[i][t] * B[t][j] for t in range(len(B))) % mod for j in range(len(B[0]))]
            for i in range(len(A))]


def koszul_cohomology(M):
    """Koszul cohomology of (phi^a - 1, g_0 - 1, ..., g_k - 1) on M over W_n(F_q)."""
    return koszul_from_operators(operator_matrices(M), M.p, M.base.n)


def p_rank(factors):
    return len(factors)


def length(factors, p):
    """Length of sum Z/d as a Z_p-module (sum of exponents)."""
    return sum(vp(d, p) for d in factors)


def euler_characteristic(cohomology, p):
    return sum((-1) ** j * length(h, p) for j, h in enumerate(cohomology))
