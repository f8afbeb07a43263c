"""The quaternion algebra B_{p,oo} with i^2 = -q, j^2 = -p, k = ij = -ji:
elements, the special extremal maximal order O0, rank-4 ideal lattices with
canonical HNF bases, orders of ideals, connecting ideals, kernel ideals and
the short-vector equivalent-ideal search.

Conventions: elements live in (1, i, j, k) coordinates over a common
denominator; lattices live in O0-frame coordinates (rows of an HNF integer
matrix over a global denominator), so O0 itself is the identity matrix and
two lattices are equal iff their (basis, den) pairs are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm, prod

from . import _linalg as la
from .arith import is_probable_prime, jacobi, sqrt_mod_prime


class ContextError(ValueError):
    """Raised when elements from different parameter contexts are mixed."""


# ---------------------------------------------------------------------------
# Gaussian integers R = Z[i] with i^2 = -q


@dataclass(frozen=True)
class GaussElem:
    """re + im*i in the suborder generator ring R = Z[i] (i^2 = -q)."""

    re: int
    im: int

    def mul(self, other: "GaussElem", q: int) -> "GaussElem":
        return GaussElem(
            self.re * other.re - q * self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "GaussElem":
        return GaussElem(self.re, -self.im)

    def norm(self, q: int) -> int:
        return self.re * self.re + q * self.im * self.im

    def scale(self, c: int) -> "GaussElem":
        return GaussElem(c * self.re, c * self.im)

    def add(self, other: "GaussElem") -> "GaussElem":
        return GaussElem(self.re + other.re, self.im + other.im)

    def sub(self, other: "GaussElem") -> "GaussElem":
        return GaussElem(self.re - other.re, self.im - other.im)

    def mod(self, n: int) -> "GaussElem":
        return GaussElem(self.re % n, self.im % n)

    def is_zero_mod(self, n: int) -> bool:
        return self.re % n == 0 and self.im % n == 0


# ---------------------------------------------------------------------------
# parameters / the special order O0


def _qmul_ijk(x, y, p, q):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return (
        a1 * a2 - q * b1 * b2 - p * c1 * c2 - p * q * d1 * d2,
        a1 * b2 + b1 * a2 + p * (c1 * d2 - d1 * c2),
        a1 * c2 + c1 * a2 - q * (b1 * d2 - d1 * b2),
        a1 * d2 + d1 * a2 + (b1 * c2 - c1 * b2),
    )


def _ring_closure(gen_rows, den, p, q):
    """HNF basis (integer rows over `den`) of the ring generated by the rows."""
    while True:
        basis = la.hnf_rows(list(gen_rows) + [(den, 0, 0, 0)])
        ok = True
        while ok:
            rows = list(basis)
            for u in basis:
                for v in basis:
                    w = _qmul_ijk(u, v, p, q)
                    if any(x % den for x in w):
                        ok = False  # denominator too small, rescale and restart
                        break
                    rows.append(tuple(x // den for x in w))
                if not ok:
                    break
            if not ok:
                break
            new = la.hnf_rows(rows)
            if new == basis:
                return basis, den
            basis = new
        den *= 2
        gen_rows = [tuple(2 * x for x in r) for r in gen_rows]


def _reduced_discriminant(rows, den, p, q) -> int:
    gram = []
    for u in rows:
        gram.append([Fraction(2 * _qmul_ijk(u, v, p, q)[0], den * den) for v in rows])
    d = abs(la.det_fraction(gram))
    assert d.denominator == 1
    r = isqrt(d.numerator)
    assert r * r == d.numerator, "discriminant is not a perfect square"
    return r


class QuatParams:
    """Shared immutable context: p, q, D and the O0 basis (frame)."""

    def __init__(self, p: int, q: int, basis_rows, basis_den: int):
        self.p = p
        self.q = q
        self.basis_rows = tuple(tuple(r) for r in basis_rows)  # ijk coords * den
        self.basis_den = basis_den
        b = [[Fraction(x, basis_den) for x in r] for r in self.basis_rows]
        self._bmat = tuple(tuple(r) for r in b)
        self._binv = la.invert_fraction(b)
        det = abs(la.det_fraction(b))
        self.D = int(1 / det)  # index [O0 : Z + Zi + Zj + Zk] = [O0 : R + Rj]
        assert Fraction(1, self.D) == det
        # structure tensor: e_i e_j = sum_k tensor[i][j][k] e_k, integer entries
        tensor = []
        for u in self.basis_rows:
            row = []
            for v in self.basis_rows:
                w = _qmul_ijk(u, v, p, q)
                coords = la.vec_mat([Fraction(x, basis_den * basis_den) for x in w], self._binv)
                assert all(c.denominator == 1 for c in coords), "basis not closed"
                row.append(tuple(int(c) for c in coords))
            tensor.append(tuple(row))
        self.tensor = tuple(tensor)
        self.one_coords = self.frame_coords_int((1, 0, 0, 0))
        # Gram of the norm form in frame coordinates: G[i][j] = trd(e_i conj(e_j))
        g = []
        for u in self.basis_rows:
            g.append(
                tuple(
                    int(
                        Fraction(
                            2 * _qmul_ijk(u, (v[0], -v[1], -v[2], -v[3]), p, q)[0],
                            basis_den * basis_den,
                        )
                    )
                    for v in self.basis_rows
                )
            )
        self.norm_gram = tuple(g)

    # -- element/frame conversions ------------------------------------------------

    def frame_coords(self, elem: "QuatElem"):
        """Coordinates of an element in the O0 basis, as Fractions."""
        v = [Fraction(x, elem.den) for x in (elem.a, elem.b, elem.c, elem.d)]
        return la.vec_mat(v, self._binv)

    def frame_coords_int(self, ijk_row):
        coords = la.vec_mat([Fraction(x) for x in ijk_row], self._binv)
        assert all(c.denominator == 1 for c in coords)
        return tuple(int(c) for c in coords)

    def elem_from_frame(self, coords, den: int = 1) -> "QuatElem":
        v = la.vec_mat([Fraction(c, den) for c in coords], self._bmat)
        common = lcm(*(x.denominator for x in v)) if v else 1
        return QuatElem(self, *(int(x * common) for x in v), common)

    def elem(self, a, b=0, c=0, d=0, den=1) -> "QuatElem":
        return QuatElem(self, a, b, c, d, den)

    def one(self) -> "QuatElem":
        return QuatElem(self, 1, 0, 0, 0, 1)

    def from_gauss_pair(self, x: GaussElem, y: GaussElem) -> "QuatElem":
        """x + y*j as a quaternion (x, y in R)."""
        return QuatElem(self, x.re, x.im, y.re, y.im, 1)

    def maximal_order(self) -> "QuatLattice":
        return QuatLattice(self, la.identity(4), 1)

    def suborder_rrj(self) -> "QuatLattice":
        """R + Rj = Z<1, i, j, k> as a lattice in the O0 frame."""
        rows = [self.frame_coords_int(r) for r in la.identity(4)]
        # identity rows are 1, i, j, k in ijk coordinates
        return QuatLattice.from_fraction_rows(
            self, [[Fraction(x) for x in row] for row in rows]
        )

    # -- multiplication matrices in frame coordinates -----------------------------

    def right_mul_mat(self, coords):
        """M with frame(alpha * g) = frame(alpha) @ M, g given by frame coords."""
        return tuple(
            tuple(sum(coords[j] * self.tensor[i][j][k] for j in range(4)) for k in range(4))
            for i in range(4)
        )

    def left_mul_mat(self, coords):
        """M with frame(g * alpha) = frame(alpha) @ M."""
        return tuple(
            tuple(sum(coords[i] * self.tensor[i][j][k] for i in range(4)) for k in range(4))
            for j in range(4)
        )

    def elem_from_ijk(self, row, den=1) -> "QuatElem":
        return QuatElem(self, row[0], row[1], row[2], row[3], den)

    # -- equality ------------------------------------------------------------------

    def _key(self):
        return (self.p, self.q, self.basis_rows, self.basis_den)

    def __eq__(self, other):
        return isinstance(other, QuatParams) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"QuatParams(p={self.p}, q={self.q}, D={self.D})"

    def to_json(self):
        return {"p": str(self.p), "q": str(self.q)}


def make_params(p: int, n_mod: int, q_bound: int | None = None) -> QuatParams:
    """Build the special p-extremal order context for modulus n_mod.

    For p = 3 mod 4 the order is Z<1, i, (1+j)/2, (i+k)/2> with q = 1; for
    p = 1 mod 4 it is the ring generated by (1+i)/2, j, (ci+k)/q where q is
    the smallest prime with q = 3 mod 4, (-p/q) = 1 and gcd(q, n_mod) = 1,
    and c^2 = -p mod q.  The basis is verified closed under multiplication
    and maximal (reduced discriminant p); the first basis element is 1.
    """
    if p <= 2 or not is_probable_prime(p):
        raise ValueError("p must be an odd prime")
    if n_mod % 2 == 0 or n_mod == p:
        raise ValueError("modulus must be odd and different from p")
    if p % 4 == 3:
        q = 1
        den = 2
        gens = [(2, 0, 0, 0), (0, 2, 0, 0), (1, 0, 1, 0), (0, 1, 0, 1)]
    else:
        if q_bound is None:
            lg = max(p.bit_length(), 4)
            q_bound = max(4 * lg * lg * lg.bit_length(), 1000)
        q = None
        for cand in range(3, q_bound, 4):
            if (
                is_probable_prime(cand)
                and n_mod % cand != 0
                and jacobi(-p, cand) == 1
            ):
                q = cand
                break
        if q is None:
            raise ValueError(f"no admissible q <= {q_bound} for p = {p}")
        c = sqrt_mod_prime(-p % q, q)
        den = 2 * q
        gens = [
            (2 * q, 0, 0, 0),  # 1
            (q, q, 0, 0),  # (1+i)/2
            (0, 0, 2 * q, 0),  # j
            (0, 2 * c, 0, 2),  # (ci+k)/q
        ]
    rows, den = _ring_closure(gens, den, p, q)
    disc = _reduced_discriminant(rows, den, p, q)
    if disc != p:
        raise AssertionError(f"O0 not maximal: reduced discriminant {disc} != {p}")
    # re-basis so that the first basis element is 1
    one = (den, 0, 0, 0)
    coords = la.solve_fraction(rows, one)
    u = tuple(int(x) for x in coords)
    assert all(x.denominator == 1 for x in coords) and la.rows_gcd([u]) == 1
    # complete u to a unimodular matrix: u . y = 1, rest = kernel of y
    _, trans = la.hnf_with_transform([(x,) for x in u])
    y = trans[0]  # y . u^T = gcd = 1
    assert sum(a * b for a, b in zip(u, y)) == 1
    kern = la.kernel_rows([(x,) for x in y])
    umat = (u,) + kern
    assert abs(la.det_fraction(umat)) == 1
    new_rows = la.mat_mul(umat, rows)
    params = QuatParams(p, q, new_rows, den)
    assert params.D == (4 if p % 4 == 3 else 4 * q)
    return params


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class QuatElem:
    """(a + b*i + c*j + d*k) / den, stored in lowest terms with den > 0."""

    params: QuatParams
    a: int
    b: int
    c: int
    d: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        g = gcd(gcd(gcd(abs(self.a), abs(self.b)), gcd(abs(self.c), abs(self.d))), abs(self.den))
        s = -1 if self.den < 0 else 1
        if g * s != 1:
            for f in ("a", "b", "c", "d", "den"):
                object.__setattr__(self, f, getattr(self, f) * s // g)

    def _check(self, other):
        if self.params != other.params:
            raise ContextError("elements from different parameter contexts")

    @property
    def coords(self):
        return (self.a, self.b, self.c, self.d)

    def __add__(self, other):
        self._check(other)
        d1, d2 = self.den, other.den
        return QuatElem(
            self.params,
            *(x * d2 + y * d1 for x, y in zip(self.coords, other.coords)),
            d1 * d2,
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QuatElem(self.params, -self.a, -self.b, -self.c, -self.d, self.den)

    def __mul__(self, other):
        if isinstance(other, int):
            return QuatElem(self.params, *(x * other for x in self.coords), self.den)
        self._check(other)
        w = _qmul_ijk(self.coords, other.coords, self.params.p, self.params.q)
        return QuatElem(self.params, *w, self.den * other.den)

    __rmul__ = __mul__

    def conj(self) -> "QuatElem":
        return QuatElem(self.params, self.a, -self.b, -self.c, -self.d, self.den)

    def reduced_norm(self):
        p, q = self.params.p, self.params.q
        n = Fraction(
            self.a**2 + q * self.b**2 + p * self.c**2 + p * q * self.d**2,
            self.den**2,
        )
        return int(n) if n.denominator == 1 else n

    def trace(self):
        t = Fraction(2 * self.a, self.den)
        return int(t) if t.denominator == 1 else t

    def inverse(self) -> "QuatElem":
        n = self.reduced_norm()
        if n == 0:
            raise ZeroDivisionError("zero element")
        cj = self.conj()
        f = [Fraction(x, cj.den) / Fraction(n) for x in cj.coords]
        common = lcm(*(x.denominator for x in f))
        return QuatElem(self.params, *(int(x * common) for x in f), common)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.params.frame_coords(self))

    def to_json(self):
        return {"num": [str(self.a), str(self.b), str(self.c), str(self.d)], "den": str(self.den)}

    @classmethod
    def from_json(cls, params, data):
        n = [int(x) for x in data["num"]]
        return cls(params, n[0], n[1], n[2], n[3], int(data["den"]))

    def __repr__(self):
        s = f"({self.a} + {self.b}i + {self.c}j + {self.d}k)"
        return s if self.den == 1 else s + f"/{self.den}"


def gauss_parts(elem: QuatElem) -> tuple[GaussElem, GaussElem]:
    """Write an integral element of R + Rj as (A, B) with elem = A + B*j."""
    if elem.den != 1:
        raise ValueError("element is not in R + Rj")
    return GaussElem(elem.a, elem.b), GaussElem(elem.c, elem.d)


# ---------------------------------------------------------------------------
# lattices


class QuatLattice:
    """Full-rank lattice in O0-frame coordinates: rows of `basis` / `den`.

    `basis` is the canonical HNF, `den` minimal, so equality of lattices is
    structural equality.
    """

    def __init__(self, params: QuatParams, basis, den: int):
        self.params = params
        basis = la.hnf_rows(basis)
        if len(basis) != 4:
            raise ValueError("lattice is not full rank")
        g = gcd(la.rows_gcd(basis), den)
        self.basis = tuple(tuple(x // g for x in r) for r in basis)
        self.den = den // g

    @classmethod
    def from_fraction_rows(cls, params, rows) -> "QuatLattice":
        den = 1
        for r in rows:
            for x in r:
                den = lcm(den, Fraction(x).denominator)
        ints = [tuple(int(Fraction(x) * den) for x in r) for r in rows]
        return cls(params, ints, den)

    @classmethod
    def from_elements(cls, params, elems) -> "QuatLattice":
        return cls.from_fraction_rows(params, [params.frame_coords(e) for e in elems])

    def _key(self):
        return (self.basis, self.den)

    def __eq__(self, other):
        return (
            isinstance(other, QuatLattice)
            and self.params == other.params
            and self._key() == other._key()
        )

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"QuatLattice({self.basis}, den={self.den})"

    # -- basic ops -----------------------------------------------------------------

    def elements(self) -> list[QuatElem]:
        return [self.params.elem_from_frame(r, self.den) for r in self.basis]

    def contains_coords(self, coords, den: int = 1) -> bool:
        """Is the frame-coordinate vector coords/den in the lattice?"""
        target = [Fraction(c, den) * self.den for c in coords]
        # basis is upper triangular (HNF); solve by forward substitution
        x = [Fraction(0)] * 4
        for i in range(4):
            acc = target[i] - sum(x[j] * self.basis[j][i] for j in range(i))
            if acc % self.basis[i][i] != 0:
                return False
            x[i] = acc / self.basis[i][i]
        return True

    def contains(self, elem: QuatElem) -> bool:
        coords = self.params.frame_coords(elem)
        den = lcm(*(c.denominator for c in coords))
        return self.contains_coords([int(c * den) for c in coords], den)

    def contains_lattice(self, other: "QuatLattice") -> bool:
        return all(self.contains_coords(r, other.den) for r in other.basis)

    def add(self, other: "QuatLattice") -> "QuatLattice":
        d = lcm(self.den, other.den)
        rows = [tuple(x * (d // self.den) for x in r) for r in self.basis]
        rows += [tuple(x * (d // other.den) for x in r) for r in other.basis]
        return QuatLattice(self.params, rows, d)

    def intersect(self, other: "QuatLattice") -> "QuatLattice":
        d = lcm(self.den, other.den)
        a1 = [tuple(x * (d // self.den) for x in r) for r in self.basis]
        a2 = [tuple(x * (d // other.den) for x in r) for r in other.basis]
        stacked = a1 + [tuple(-x for x in r) for r in a2]
        kern = la.kernel_rows(stacked)
        rows = [la.vec_mat(u[:4], a1) for u in kern]
        return QuatLattice(self.params, rows, d)

    def transform(self, mat) -> "QuatLattice":
        """Image lattice under row-vector action v -> v @ mat (rational mat)."""
        rows = la.mat_mul([[Fraction(x, self.den) for x in r] for r in self.basis], mat)
        return QuatLattice.from_fraction_rows(self.params, rows)

    def scale(self, c: int) -> "QuatLattice":
        return QuatLattice(self.params, [tuple(c * x for x in r) for r in self.basis], self.den)

    def mul_elem(self, elem: QuatElem) -> "QuatLattice":
        """Right-multiply the lattice by a (possibly fractional) element."""
        return self.transform(self.params.right_mul_mat(self.params.frame_coords(elem)))

    def elem_mul(self, elem: QuatElem) -> "QuatLattice":
        """Left-multiply the lattice by an element."""
        return self.transform(self.params.left_mul_mat(self.params.frame_coords(elem)))

    def index_in(self, other: "QuatLattice") -> Fraction:
        """Generalized index [other : self] = det ratio."""
        ds = la.det_fraction([[Fraction(x, self.den) for x in r] for r in self.basis])
        do = la.det_fraction([[Fraction(x, other.den) for x in r] for r in other.basis])
        return abs(ds / do)

    def norm_of_coords(self, coords, den=1):
        g = self.params.norm_gram
        s = sum(coords[i] * sum(g[i][j] * coords[j] for j in range(4)) for i in range(4))
        return Fraction(s, 2 * den * den)

    def gcd_norm(self) -> Fraction:
        """Norm of the lattice: gcd of reduced norms over basis sums / den^2."""
        vals = []
        rows = self.basis
        for i in range(4):
            vals.append(self.norm_of_coords(rows[i]))
            for j in range(i + 1, 4):
                s = tuple(x + y for x, y in zip(rows[i], rows[j]))
                vals.append(self.norm_of_coords(s))
        num = 0
        denom = self.den * self.den
        for v in vals:
            v = v * denom
            assert v.denominator == 1
            num = gcd(num, int(v))
        return Fraction(num, denom)

    def is_ring(self) -> bool:
        if not self.contains_coords(self.params.one_coords, 1):
            return False
        elems = self.elements()
        return all(self.contains(u * v) for u in elems for v in elems)

    def reduced_discriminant(self) -> int:
        gram = []
        elems = self.elements()
        for u in elems:
            gram.append([(u * v).trace() for v in elems])
        d = abs(la.det_fraction(gram))
        assert d.denominator == 1
        r = isqrt(int(d))
        assert r * r == int(d)
        return r

    def conjugate(self) -> "QuatLattice":
        return QuatLattice.from_elements(self.params, [e.conj() for e in self.elements()])

    def to_json(self):
        return {
            "basis": [[str(x) for x in r] for r in self.basis],
            "den": str(self.den),
            "frame": self.params.to_json(),
        }

    @classmethod
    def from_json(cls, params, data):
        if data["frame"] != params.to_json():
            raise ValueError("lattice frame does not match parameter context")
        rows = [tuple(int(x) for x in r) for r in data["basis"]]
        return cls(params, rows, int(data["den"]))


# ---------------------------------------------------------------------------
# orders of lattices


def left_order(lat: QuatLattice) -> QuatLattice:
    """O_L(I) = {alpha : alpha I in I}, as an HNF lattice (verified ring)."""
    return _stabilizing_order(lat, right_side=False)


def right_order(lat: QuatLattice) -> QuatLattice:
    """O_R(I) = {alpha : I alpha in I}."""
    return _stabilizing_order(lat, right_side=True)


def _stabilizing_order(lat: QuatLattice, right_side: bool) -> QuatLattice:
    params = lat.params
    result = None
    for row in lat.basis:
        coords = [Fraction(x, lat.den) for x in row]
        mat = params.left_mul_mat(coords) if right_side else params.right_mul_mat(coords)
        # {x : x @ mat in lat} = lat @ mat^{-1}
        pre = lat.transform(la.invert_fraction(mat))
        result = pre if result is None else result.intersect(pre)
    assert result is not None and result.is_ring(), "stabilizer is not a ring"
    return result


def eichler_order(ideal: "QuatIdeal") -> QuatLattice:
    """Z + I for an integral ideal; asserted equal to O_L(I) meet O_R(I)."""
    params = ideal.lattice.params
    one = QuatLattice.from_fraction_rows(
        params, [[Fraction(x) for x in params.one_coords]] + [list(r) for r in ideal.lattice.basis]
    )
    zplusi = QuatLattice(
        params,
        [tuple(x * ideal.lattice.den for x in params.one_coords)] + list(ideal.lattice.basis),
        ideal.lattice.den,
    )
    meet = left_order(ideal.lattice).intersect(right_order(ideal.lattice))
    assert zplusi == meet, "Z + I != O_L(I) meet O_R(I): ideal arithmetic bug"
    return zplusi


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class QuatIdeal:
    """Integral left ideal: lattice, its left order, and the cached norm."""

    lattice: QuatLattice
    left_order: QuatLattice
    norm: int

    def __post_init__(self):
        if not self.left_order.contains_lattice(self.lattice):
            raise ValueError("ideal is not integral (not contained in its left order)")

    @property
    def params(self):
        return self.lattice.params

    def right_order(self) -> QuatLattice:
        return right_order(self.lattice)

    def conjugate_lattice(self) -> QuatLattice:
        return self.lattice.conjugate()

    def to_json(self):
        return {"lattice": self.lattice.to_json(), "norm": str(self.norm)}


def ideal_from_generators(left_ord: QuatLattice, gens) -> QuatIdeal:
    """Smallest left ideal of `left_ord` containing `gens` (HNF closure)."""
    params = left_ord.params
    gens = [g for g in gens if any(g.coords)]
    if not gens:
        raise ValueError("need at least one nonzero generator")
    rows = []
    den = 1
    basis_elems = left_ord.elements()
    for g in gens:
        for b in basis_elems:
            coords = params.frame_coords(b * g)
            den = lcm(den, *(c.denominator for c in coords))
            rows.append(coords)
    int_rows = [tuple(int(c * den) for c in r) for r in rows]
    if len(la.hnf_rows(int_rows)) != 4:
        raise ValueError("generators span a rank-deficient lattice")
    lat = QuatLattice(params, int_rows, den)
    nrm = lat.gcd_norm() / left_ord.gcd_norm()
    if nrm.denominator != 1:
        raise ValueError("ideal has non-integral norm")
    return QuatIdeal(lat, left_ord, int(nrm))


def principal_ideal(order: QuatLattice, alpha: QuatElem) -> QuatIdeal:
    return ideal_from_generators(order, [alpha])


def kernel_ideal(params: QuatParams, n_fact, v, iso) -> QuatIdeal:
    """Left O0-ideal of norm N killing the cyclic submodule generated by v.

    I = {alpha in O0 : M_alpha v = 0 mod N} + N*O0, where alpha -> M_alpha is
    the explicit isomorphism O0/N O0 = M2(Z/N).  v must be primitive.
    """
    n_val = n_fact.value
    for p_, e_ in n_fact:
        pe = p_**e_
        if v[0] % p_ == 0 and v[1] % p_ == 0:
            raise ValueError(f"v is not primitive modulo {pe}")
    # condition matrix: rows indexed by basis element, columns = M_i v
    cond = []
    for m in iso.forward:
        cond.append(
            (
                (m[0][0] * v[0] + m[0][1] * v[1]) % n_val,
                (m[1][0] * v[0] + m[1][1] * v[1]) % n_val,
            )
        )
    stacked = [cond[i] for i in range(4)] + [(n_val, 0), (0, n_val)]
    kern = la.kernel_rows(stacked)
    rows = [u[:4] for u in kern]
    lat = QuatLattice(params, rows, 1)
    ideal = QuatIdeal(lat, params.maximal_order(), n_val)
    nrm = lat.gcd_norm()
    assert nrm == n_val, f"kernel ideal norm {nrm} != {n_val}"
    for p_, _ in n_fact:
        assert any(x % p_ for r in lat.basis for x in r), "kernel ideal is not cyclic"
    return ideal


def connecting_ideal(o1: QuatLattice, o2: QuatLattice) -> QuatIdeal:
    """An integral ideal with left order o1 and right order o2."""
    for o in (o1, o2):
        if o.reduced_discriminant() != o.params.p:
            raise ValueError("connecting_ideal needs maximal orders")
    params = o1.params
    rows = []
    den = 1
    e2 = o2.elements()
    for u in o1.elements():
        for w in e2:
            coords = params.frame_coords(u * w)
            den = lcm(den, *(c.denominator for c in coords))
            rows.append(coords)
    prod_lat = QuatLattice(params, [tuple(int(c * den) for c in r) for r in rows], den)
    # scale into o1 to make the ideal integral
    scale = 1
    while not o1.contains_lattice(prod_lat.scale(scale)):
        scale += 1
        if scale > 4 * params.p * prod_lat.den:
            raise AssertionError("could not make connecting ideal integral")
    lat = prod_lat.scale(scale)
    nrm = lat.gcd_norm() / o1.gcd_norm()
    assert nrm.denominator == 1
    ideal = QuatIdeal(lat, o1, int(nrm))
    assert left_order(lat) == o1 and right_order(lat) == o2
    return ideal


def reduced_basis(lat: QuatLattice) -> list[QuatElem]:
    """LLL-reduced basis of the lattice under the reduced-norm form."""
    g = lat.params.norm_gram
    red = la.lll_reduce(lat.basis, [[Fraction(x) for x in r] for r in g])
    return [lat.params.elem_from_frame(r, lat.den) for r in red]


def short_elements(lat: QuatLattice, radius: int = 2):
    """Nonzero lattice elements from small combinations of the reduced basis,
    sorted by reduced norm (one per +- pair)."""
    red = reduced_basis(lat)
    out = []
    from itertools import product as iproduct

    for coeffs in iproduct(range(-radius, radius + 1), repeat=4):
        if not any(coeffs) or coeffs < tuple(-c for c in coeffs):
            continue  # skip zero and one of each +- pair
        e = None
        for c, b in zip(coeffs, red):
            t = b * c
            e = t if e is None else e + t
        out.append(e)
    out.sort(key=lambda e: e.reduced_norm())
    return out


def equivalent_coprime_ideal(ideal: QuatIdeal, n_mod: int, norm_filter=None, max_radius: int = 6):
    """Equivalent ideal J = I*beta with gcd(n(J), n_mod) = 1.

    Enumerates short chi in I by increasing reduced norm, takes the first with
    gcd(n(chi)/n(I), n_mod) = 1 (and passing `norm_filter` if given), and sets
    beta = conj(chi)/n(I).  Then O_L(J) = O_L(I) and O_R(J) = beta^-1 O_R(I) beta.
    """
    params = ideal.params
    if gcd(ideal.norm, n_mod) == 1 and (norm_filter is None or norm_filter(ideal.norm)):
        return ideal, params.one()
    n_i = ideal.norm
    for radius in range(2, max_radius + 1):
        for chi in short_elements(ideal.lattice, radius):
            n_chi = chi.reduced_norm()
            r, rem = divmod(n_chi, n_i)
            assert rem == 0, "element norm not divisible by ideal norm"
            if r == 0 or gcd(r, n_mod) != 1:
                continue
            if norm_filter is not None and not norm_filter(r):
                continue
            cj = chi.conj()
            beta = QuatElem(params, *cj.coords, cj.den * n_i)  # conj(chi)/n(I)
            lat = ideal.lattice.mul_elem(beta)
            new = QuatIdeal(lat, ideal.left_order, r)
            return new, beta
    raise SearchRadiusExceeded(
        f"no equivalent ideal coprime to {n_mod} within radius {max_radius}"
    )


class SearchRadiusExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# canonical invariant of a maximal order (conjugation-invariant label)


def trace_zero_gram(order: QuatLattice):
    """Integer Gram matrix of the trace-zero sublattice of an order."""
    params = order.params
    elems = order.elements()
    traces = [e.trace() for e in elems]
    den = lcm(*(Fraction(t).denominator for t in traces)) if traces else 1
    tvec = [(int(Fraction(t) * den),) for t in traces]
    kern = la.kernel_rows(tvec)
    assert len(kern) == 3
    basis = []
    for u in kern:
        e = None
        for c, b in zip(u, elems):
            t = b * c
            e = t if e is None else e + t
        basis.append(e)
    gram = tuple(
        tuple(int((u * v.conj()).trace()) for v in basis) for u in basis
    )
    return basis, gram


def _greedy_reduce3(basis):
    """Greedy (Minkowski-style) reduction of <=3 quaternion trace-zero vectors."""
    b = list(basis)
    changed = True
    while changed:
        changed = False
        b.sort(key=lambda e: e.reduced_norm())
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                # reduce b[j] against b[i]
                num = (b[j] * b[i].conj()).trace()
                den = 2 * b[i].reduced_norm()
                t = round(Fraction(num) / Fraction(den))
                if t:
                    b[j] = b[j] - b[i] * t
                    changed = True
    b.sort(key=lambda e: e.reduced_norm())
    return b


def order_invariant(order: QuatLattice) -> tuple:
    """Conjugation-invariant canonical label of a maximal order.

    Canonical form of the Gram matrix of the trace-zero part: greedy-reduce,
    enumerate all short vectors up to the largest reduced diagonal entry, and
    take the lexicographically smallest Gram over ordered triples that span
    the same lattice.  Best-effort completeness (exact at desk scale).
    """
    basis, _ = trace_zero_gram(order)
    red = _greedy_reduce3(basis)
    bound = max(e.reduced_norm() for e in red)
    from itertools import product as iproduct

    shorts = []
    for coeffs in iproduct(range(-3, 4), repeat=3):
        if not any(coeffs):
            continue
        e = None
        for c, b in zip(coeffs, red):
            t = b * c
            e = t if e is None else e + t
        if e.reduced_norm() <= bound:
            shorts.append((e, coeffs))
    best = None
    for (u, cu) in shorts:
        for (v, cv) in shorts:
            for (w, cw) in shorts:
                d = la.det_fraction([list(cu), list(cv), list(cw)])
                if abs(d) != 1:
                    continue
                gram = (
                    2 * u.reduced_norm(), (u * v.conj()).trace(), (u * w.conj()).trace(),
                    2 * v.reduced_norm(), (v * w.conj()).trace(), 2 * w.reduced_norm(),
                )
                if gram[0] > gram[3] or gram[3] > gram[5]:
                    continue
                if best is None or gram < best:
                    best = gram
    assert best is not None
    return best
