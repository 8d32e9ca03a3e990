"""Lattice and cone combinatorics for toric frames.

Cones are rational polyhedral cones in Z^rank, stored by primitive integer
generators. Duals are computed from the halfspace description by
enumerating tight subsystems; Hilbert bases by bounded enumeration and an
irreducibility sieve. Everything is exact.

>>> dual_cone(Cone.of([(1, 0), (1, 2)])).generators
((0, 1), (2, -1))
>>> sorted(hilbert_basis(Cone.of([(0, 1), (2, -1)])).hilbert_basis)
[(0, 1), (1, 0), (2, -1)]
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .errors import DimensionMismatch, DimensionTooLarge, IncompatibleCones, PreconditionError
from .linalg import (
    complete_basis,
    integer_kernel,
    nullspace,
    primitive,
    rank,
    saturated_image_rank,
)
from .numbers import INF, from_str, to_str

MAX_RANK = 6


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _normalize(gens):
    out = []
    for g in gens:
        if not any(g):
            continue
        g = primitive(g)
        if g not in out:
            out.append(g)
    return tuple(sorted(out))


@dataclass(frozen=True)
class Lattice:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise PreconditionError("lattice rank must be nonnegative")


@dataclass(frozen=True)
class Cone:
    lattice: Lattice
    generators: tuple

    def __post_init__(self):
        gens = _normalize(self.generators)
        for g in gens:
            if len(g) != self.lattice.rank:
                raise DimensionMismatch(f"generator {g} does not have length {self.lattice.rank}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, gens, rank=None):
        gens = [tuple(int(x) for x in g) for g in gens]
        if rank is None:
            if not gens:
                raise PreconditionError("rank is required for the zero cone")
            rank = len(gens[0])
        return cls(Lattice(rank), tuple(gens))

    @classmethod
    def orthant(cls, n):
        return cls.of([tuple(int(i == j) for j in range(n)) for i in range(n)], n)

    @classmethod
    def zero(cls, n):
        return cls(Lattice(n), ())

    @classmethod
    def full(cls, n):
        gens = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return cls.of(gens, n)

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def dimension(self):
        return rank(self.generators) if self.generators else 0

    def halfspaces(self):
        """Primitive integer normals h with cone = {x : <h, x> >= 0}."""
        return dual_cone(self).generators

    def contains(self, x):
        return all(_dot(h, x) >= 0 for h in self.halfspaces())

    def lineality(self):
        """Integer basis of the largest subspace contained in the cone."""
        return integer_kernel(list(dual_cone(self).generators), self.rank)

    def is_pointed(self):
        return not self.lineality()

    def is_full_lattice(self):
        return not dual_cone(self).generators

    def __eq__(self, other):
        if not isinstance(other, Cone) or other.rank != self.rank:
            return NotImplemented
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )

    def __hash__(self):
        return hash((self.rank, dual_cone(self).generators))

    def to_json(self):
        return {"rank": self.rank, "generators": [list(g) for g in self.generators]}


_DUAL_CACHE = {}


def dual_cone(c):
    """Dual cone {x : <x, g> >= 0 for all generators g}, by primitive generators."""
    key = (c.rank, c.generators)
    hit = _DUAL_CACHE.get(key)
    if hit is not None:
        return hit
    n = c.rank
    rows = [list(g) for g in c.generators]
    lin = integer_kernel(rows, n) if rows else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    gens = []
    for v in lin:
        gens.append(tuple(v))
        gens.append(tuple(-x for x in v))
    # pointed part: rays in the orthogonal complement of the lineality space
    d = n - len(lin)
    if d > 0:
        lin_rows = [list(v) for v in lin]
        for subset in combinations(range(len(rows)), d - 1):
            sys = [rows[i] for i in subset] + lin_rows
            if rank(sys) != n - 1:
                continue
            ns = nullspace(sys, n)
            ray = primitive(ns[0])
            for cand in (ray, tuple(-x for x in ray)):
                if all(_dot(cand, g) >= 0 for g in rows):
                    gens.append(cand)
    result = Cone(Lattice(n), tuple(gens))
    # drop non-extreme rays (a ray is redundant if it lies in the cone of the others)
    result = _prune(result)
    _DUAL_CACHE[key] = result
    return result


def _prune(c):
    gens = list(c.generators)
    lin = set()
    for g in gens:
        if tuple(-x for x in g) in gens:
            lin.add(g)
    keep = []
    for g in gens:
        if g in lin:
            keep.append(g)
            continue
        others = [h for h in gens if h != g]
        if not _in_cone_of(g, others, c.rank):
            keep.append(g)
    return Cone(c.lattice, tuple(keep))


def _in_cone_of(x, gens, n):
    """Is x a nonnegative rational combination of gens? (Farkas via duals.)"""
    if not gens:
        return not any(x)
    rows = [list(g) for g in gens]
    lin = integer_kernel(rows, n)
    d = n - len(lin)
    normals = [tuple(v) for v in lin] + [tuple(-a for a in v) for v in lin]
    if d > 0:
        lin_rows = [list(v) for v in lin]
        for subset in combinations(range(len(rows)), d - 1):
            sys = [rows[i] for i in subset] + lin_rows
            if rank(sys) != n - 1:
                continue
            ray = primitive(nullspace(sys, n)[0])
            for cand in (ray, tuple(-a for a in ray)):
                if all(_dot(cand, g) >= 0 for g in rows):
                    normals.append(cand)
    return all(_dot(h, x) >= 0 for h in normals)


@dataclass(frozen=True)
class ToricMonoid:
    lattice: Lattice
    hilbert_basis: tuple
    cone: Cone

    def degree_function(self):
        """A linear form positive on the cone minus zero (pointed cones only)."""
        hs = dual_cone(self.cone).generators
        w = [sum(h[i] for h in hs) for i in range(self.lattice.rank)]
        return w

    def verify(self, bound=8):
        """Check membership, irreducibility and generation in the box |x_i| <= bound."""
        c = self.cone
        if not all(c.contains(h) for h in self.hilbert_basis):
            return False
        points = _lattice_points(c, [bound] * c.rank)
        basis = set(self.hilbert_basis)
        if c.is_full_lattice():
            units = {tuple(int(i == j) * s for j in range(c.rank)) for i in range(c.rank) for s in (1, -1)}
            return basis == units
        w = self.degree_function()
        pts = sorted(points, key=lambda x: _dot(w, x))
        generated = {tuple([0] * c.rank)}
        for x in pts:
            if any(tuple(a - b for a, b in zip(x, h)) in generated for h in basis):
                generated.add(x)
            elif any(x):
                return False
        for h in basis:
            for g in basis:
                diff = tuple(a - b for a, b in zip(h, g))
                if h != g and any(diff) and c.contains(diff):
                    return False
        return True


def _lattice_points(c, bounds):
    hs = dual_cone(c).generators
    pts = []
    for x in product(*[range(-b, b + 1) for b in bounds]):
        if all(_dot(h, x) >= 0 for h in hs):
            pts.append(x)
    return pts


def hilbert_basis(c, max_rank=MAX_RANK):
    """Minimal generating set of the monoid of lattice points of c.

    c must be strongly convex or the whole lattice."""
    n = c.rank
    if n > max_rank:
        raise DimensionTooLarge(f"rank {n} exceeds the configured bound {max_rank}")
    if c.is_full_lattice():
        basis = []
        for i in range(n):
            for s in (1, -1):
                basis.append(tuple(s * int(i == j) for j in range(n)))
        return ToricMonoid(c.lattice, tuple(sorted(basis)), c)
    units = c.lineality()
    if units:
        # mixed monoid: units plus lifted Hilbert basis of the pointed quotient
        q, proj = _quotient(units, n)
        lift = _lifter(units, n)
        quot = Cone(Lattice(q), tuple(proj(g) for g in c.generators))
        basis = [tuple(u) for u in units] + [tuple(-x for x in u) for u in units]
        basis += [lift(h) for h in hilbert_basis(quot, max_rank).hilbert_basis]
        return ToricMonoid(c.lattice, tuple(sorted(basis)), c)
    gens = c.generators
    # every irreducible element lies in the zonotope sum_i [0,1] g_i
    bounds = [sum(abs(g[i]) for g in gens) for i in range(n)]
    hs = dual_cone(c).generators
    w = [sum(h[i] for h in hs) for i in range(n)]
    candidates = []
    for x in product(*[range(-b, b + 1) for b in bounds]):
        if any(x) and all(_dot(h, x) >= 0 for h in hs):
            candidates.append(x)
    candidates.sort(key=lambda x: (_dot(w, x), x))
    basis = []
    for x in candidates:
        if not any(all(_dot(hh, [a - b for a, b in zip(x, h)]) >= 0 for hh in hs) for h in basis):
            basis.append(x)
    return ToricMonoid(c.lattice, tuple(sorted(basis)), c)


def gauss_valuation(monomial_coeffs, weight, p=None):
    """min over nonzero terms of weight(s) (+ v_p(coeff) if p is given); INF for 0."""
    weight = [Fraction(x) for x in weight]
    best = INF
    for s, coeff in monomial_coeffs.items():
        if len(s) != len(weight):
            raise DimensionMismatch(f"monomial {s} vs weight of length {len(weight)}")
        if coeff == 0:
            continue
        val = sum(Fraction(a) * b for a, b in zip(s, weight))
        if p is not None:
            from .numbers import vp

            val += vp(coeff, p)
        best = min(best, val)
    return best


@dataclass(frozen=True)
class Frame:
    """Combinatorial shadow of a toric frame: the cone sigma, the monoid of
    lattice points of its dual, and a rational weight."""

    sigma: Cone
    weight: tuple
    coordinate_names: tuple = ()
    monoid: ToricMonoid = field(default=None, compare=False)

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weight)
        if len(w) != self.sigma.rank:
            raise DimensionMismatch("weight length must equal the lattice rank")
        object.__setattr__(self, "weight", w)
        if not self.coordinate_names:
            object.__setattr__(self, "coordinate_names", tuple(f"T{i + 1}" for i in range(self.rank)))
        if self.monoid is None:
            object.__setattr__(self, "monoid", hilbert_basis(dual_cone(self.sigma)))

    @property
    def rank(self):
        return self.sigma.rank

    @property
    def boundary_free(self):
        return not self.sigma.generators

    @classmethod
    def laurent(cls, n, weight=None):
        return cls(Cone.zero(n), tuple(weight or [0] * n))

    @classmethod
    def polynomial(cls, n, weight=None):
        return cls(Cone.orthant(n), tuple(weight or [0] * n))

    def to_json(self):
        return {
            "rank": self.rank,
            "generators": [list(g) for g in self.sigma.generators],
            "weight": [to_str(x) for x in self.weight],
        }

    @classmethod
    def from_json(cls, data):
        sigma = Cone(Lattice(data["rank"]), tuple(tuple(g) for g in data.get("generators", [])))
        weight = tuple(from_str(x) for x in data.get("weight", ["0"] * data["rank"]))
        return cls(sigma, weight, tuple(data.get("names", ())))


@dataclass(frozen=True)
class ToricMap:
    """Lattice map source -> target (matrix has target-rank rows), with the
    cones it is required to respect."""

    source: Lattice
    target: Lattice
    matrix: tuple
    source_cone: Cone = None
    target_cone: Cone = None

    def __post_init__(self):
        mat = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(mat) != self.target.rank or any(len(r) != self.source.rank for r in mat):
            raise DimensionMismatch("matrix shape does not match the lattices")
        object.__setattr__(self, "matrix", mat)

    def apply(self, v):
        return tuple(_dot(row, v) for row in self.matrix)

    def respects_cones(self):
        if self.source_cone is None or self.target_cone is None:
            return True
        return all(self.target_cone.contains(self.apply(g)) for g in self.source_cone.generators)


def is_toric_refinement(m, source_frame, target_frame):
    """Decide whether the dual of m splits as M_source = M_target (+) T.

    Returns (flag, generators of T); T is given by a Hilbert basis of its
    pointed part plus +- a basis of its unit group."""
    tm = ToricMap(m.source, m.target, m.matrix, source_frame.sigma, target_frame.sigma)
    if not tm.respects_cones():
        raise IncompatibleCones("the map does not carry the source cone into the target cone")
    n_src, n_tgt = m.source.rank, m.target.rank
    # columns of D: images of target dual basis vectors inside the source dual lattice
    d_cols = [tuple(m.matrix[j][i] for i in range(n_src)) for j in range(n_tgt)]
    r, sat = saturated_image_rank(d_cols, n_src)
    if r != n_tgt or not sat:
        return False, ()
    big = dual_cone(source_frame.sigma)
    small = dual_cone(target_frame.sigma)
    u_big = big.lineality()
    u_small = small.lineality()

    def D(v):
        return tuple(sum(d_cols[j][i] * v[j] for j in range(n_tgt)) for i in range(n_src))

    # D^{-1}(units of big) must be the units of small
    big_normals = dual_cone(big).generators
    im_small_units = [D(u) for u in u_small]
    pre_units = _preimage_of_units(d_cols, big_normals, n_src, n_tgt)
    if _lattice_rank(pre_units) != len(u_small):
        return False, ()
    # complement of D(U_small) inside U_big
    if u_big:
        coords = _coordinates_in(u_big, im_small_units)
        if coords is None:
            return False, ()
        k = len(u_big)
        extra = complete_basis([tuple(c) for c in coords], k) if coords else [
            tuple(int(i == j) for i in range(k)) for j in range(k)
        ]
        u_t = [tuple(sum(e[j] * u_big[j][i] for j in range(k)) for i in range(n_src)) for e in extra]
    else:
        u_t = []
    # pointed quotients
    q_big, proj_big = _quotient(u_big, n_src)
    q_small, proj_small = _quotient(u_small, n_tgt)
    cone_big_q = Cone(Lattice(q_big), tuple(proj_big(g) for g in big.generators))
    cone_small_q = Cone(Lattice(q_small), tuple(proj_small(g) for g in small.generators))
    hb_big = set(hilbert_basis(cone_big_q).hilbert_basis) if q_big else set()
    hb_small = hilbert_basis(cone_small_q).hilbert_basis if q_small else ()
    lift_small = _lifter(u_small, n_tgt)
    image = set()
    for h in hb_small:
        img = proj_big(D(lift_small(h)))
        if img not in hb_big:
            return False, ()
        image.add(img)
    rest = sorted(hb_big - image)
    d_bar_cols = [proj_big(D(lift_small(e))) for e in _unit_vectors(q_small)]
    # lattice-level direct sum: the image and span(T) together give a
    # saturated full-rank lattice and meet only in zero; T itself need not be free
    r2, sat2 = saturated_image_rank(d_bar_cols + list(rest), q_big)
    if r2 != q_big or not sat2:
        return False, ()
    if _lattice_rank(d_bar_cols) + _lattice_rank(list(rest)) != q_big:
        return False, ()
    lift_big = _lifter(u_big, n_src)
    t_gens = [lift_big(h) for h in rest] + u_t + [tuple(-x for x in u) for u in u_t]
    return True, tuple(t_gens)


def _unit_vectors(n):
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def _lattice_rank(vectors):
    return rank([list(v) for v in vectors]) if vectors else 0


def _coordinates_in(basis, vectors):
    """Integer coordinates of vectors in the given lattice basis (None if absent)."""
    out = []
    n = len(basis[0])
    k = len(basis)
    for v in vectors:
        rows = [[basis[j][i] for j in range(k)] + [v[i]] for i in range(n)]
        from .linalg import rational_rref

        red, piv = rational_rref(rows)
        if k in piv:
            return None
        sol = [Fraction(0)] * k
        for i, pc in enumerate(piv):
            sol[pc] = red[i][k]
        if any(x.denominator != 1 for x in sol):
            return None
        out.append([int(x) for x in sol])
    return out


def _preimage_of_units(d_cols, big_normals, n_src, n_tgt):
    """Basis of {a in Z^n_tgt : D(a) is a unit of the big monoid}."""
    rows = []
    for h in big_normals:
        rows.append([sum(h[i] * d_cols[j][i] for i in range(n_src)) for j in range(n_tgt)])
    return integer_kernel(rows, n_tgt) if rows else _unit_vectors(n_tgt)


def _quotient(units, n):
    """Projection Z^n -> Z^n / span(units) as coordinates in a complement basis."""
    k = len(units)
    if k == 0:
        return n, lambda v: tuple(v)
    comp = complete_basis([tuple(u) for u in units], n)
    full = [tuple(u) for u in units] + list(comp)
    # coordinates: solve full^T c = v
    from .linalg import integer_inverse

    mat = [[full[j][i] for j in range(n)] for i in range(n)]
    inv = integer_inverse(mat)

    def proj(v):
        c = [sum(inv[i][j] * v[j] for j in range(n)) for i in range(n)]
        return tuple(c[k:])

    return n - k, proj


def _lifter(units, n):
    k = len(units)
    if k == 0:
        return lambda v: tuple(v)
    comp = complete_basis([tuple(u) for u in units], n)

    def lift(v):
        return tuple(sum(v[j] * comp[j][i] for j in range(len(comp))) for i in range(n))

    return lift


def framed_graph(f1, f2):
    """Direct-sum frame with the two coordinate projections."""
    n1, n2 = f1.rank, f2.rank
    n = n1 + n2
    gens = [tuple(g) + (0,) * n2 for g in f1.sigma.generators] + [
        (0,) * n1 + tuple(g) for g in f2.sigma.generators
    ]
    sigma = Cone(Lattice(n), tuple(gens))
    names = tuple(f"{a}'" for a in f1.coordinate_names) + tuple(f"{b}''" for b in f2.coordinate_names)
    frame = Frame(sigma, f1.weight + f2.weight, names)
    p1 = ToricMap(Lattice(n), Lattice(n1), tuple(tuple(int(j == i) for j in range(n)) for i in range(n1)),
                  sigma, f1.sigma)
    p2 = ToricMap(Lattice(n), Lattice(n2), tuple(tuple(int(j == n1 + i) for j in range(n)) for i in range(n2)),
                  sigma, f2.sigma)
    return frame, p1, p2


def tropicalize(frame, s):
    """Value of the tropicalization at the weighted Gauss point: lambda(s)."""
    if len(s) != frame.rank:
        raise DimensionMismatch("lattice vector has the wrong length")
    return sum(Fraction(a) * w for a, w in zip(s, frame.weight))


class Fan:
    """An explicit list of cones with a face-compatibility check."""

    def __init__(self, cones):
        self.cones = list(cones)

    @staticmethod
    def intersection(a, b):
        hs = list(dual_cone(a).generators) + list(dual_cone(b).generators)
        return dual_cone(Cone(a.lattice, tuple(hs)))

    @staticmethod
    def is_face(f, c):
        """Is the cone f a face of the cone c?"""
        if not all(c.contains(g) for g in f.generators):
            return False
        normals = [h for h in dual_cone(c).generators if all(_dot(h, g) == 0 for g in f.generators)]
        face = Cone(c.lattice, tuple(g for g in c.generators if all(_dot(h, g) == 0 for h in normals)))
        return face == f

    def is_compatible(self):
        for a, b in combinations(self.cones, 2):
            inter = self.intersection(a, b)
            if not (self.is_face(inter, a) and self.is_face(inter, b)):
                return False
        return True


def projective_space_fan(n):
    """Maximal cones of the fan of projective n-space."""
    basis = _unit_vectors(n)
    minus = tuple(-1 for _ in range(n))
    cones = [Cone.of(basis, n)]
    for i in range(n):
        gens = [basis[j] for j in range(n) if j != i] + [minus]
        cones.append(Cone.of(gens, n))
    return Fan(cones)
