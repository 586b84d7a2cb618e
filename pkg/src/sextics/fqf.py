"""Finite quadratic forms.

A form is stored on a diagonal presentation G = Z/n_1 + ... + Z/n_r.  All
values are kept as integers over the common denominator ``den`` (the group
exponent): b(g_i, g_j) = B[i][j]/den mod 1 and q(g_i) = B[i][i]/den mod 2.
"""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm, prod

from sympy import factorint


def _prime_factors(n: int) -> list[int]:
    return sorted(factorint(n)) if n > 1 else []


def _padic_split(n: int, p: int) -> tuple[int, int]:
    """Return (a, m) with n = p**a * m and p not dividing m."""
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    return a, n


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def unit_class(u: int, p: int) -> int:
    """Square class of a p-adic unit: a Legendre sign for odd p, u mod 8 for p = 2."""
    if p == 2:
        if u % 2 == 0:
            raise ValueError("not a 2-adic unit")
        return u % 8
    if u % p == 0:
        raise ValueError(f"not a {p}-adic unit")
    return legendre(u, p)


def chi(p: int, u: int) -> int:
    """The character chi_p: Legendre symbol for odd p, u mod 4 for p = 2."""
    if p == 2:
        if u % 2 == 0:
            raise ValueError("chi_2 of an even number")
        return 1 if u % 4 == 1 else -1
    return legendre(u, p)


def frac_mod(x: Fraction, m: int) -> Fraction:
    return x - m * (x.numerator // (m * x.denominator))


@dataclass(frozen=True)
class JordanBlock:
    """One indecomposable summand of a p-primary form.

    ``kind`` is 'c' for a cyclic block <c/p^k> (``unit`` = c, taken mod 2p^k),
    'u' or 'v' for the even 2-adic blocks of length two.
    ``gens`` are the generators in the coordinates of the ambient form.
    """

    p: int
    k: int
    kind: str
    unit: int
    gens: tuple

    @property
    def rank(self) -> int:
        return 1 if self.kind == "c" else 2

    def det_unit(self) -> int:
        if self.kind == "u":
            return -1
        if self.kind == "v":
            return 3
        return self.unit

    def brown(self) -> int:
        p, k = self.p, self.k
        if self.kind == "u":
            return 0
        if self.kind == "v":
            return 4 * (k % 2)
        c = self.unit
        if p == 2:
            extra = 4 if (k % 2 and c % 8 in (3, 5)) else 0
            return (c + extra) % 8
        if k % 2 == 0:
            return 0
        m = c // 2 if c % 2 == 0 else (c + p ** k) // 2
        return (0 if legendre(m, p) == 1 else 4) + (0 if p % 4 == 1 else 2)

    def token(self) -> str:
        if self.kind in "uv":
            return f"{self.kind}_{self.k}"
        n = self.p ** self.k
        c = self.unit % (2 * n)
        if self.p != 2:
            # smallest even numerator in the same square class
            target = legendre(c, self.p)
            c = next(t for t in range(2, 2 * n, 2) if t % self.p and legendre(t, self.p) == target)
        elif self.k == 1:
            c %= 4
        f = Fraction(c, n)
        return f"<{f.numerator}/{f.denominator}>"


class FiniteQuadraticForm:
    """A nondegenerate finite quadratic form on a diagonally presented group."""

    __slots__ = ("orders", "den", "B", "labels", "__dict__")

    def __init__(self, orders, values, labels=None):
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise ValueError("generator orders must be positive")
        keep = [i for i, n in enumerate(orders) if n > 1]
        self.orders = tuple(orders[i] for i in keep)
        self.den = lcm(*self.orders) if self.orders else 1
        D = self.den
        B = []
        for i in keep:
            row = []
            for j in keep:
                v = Fraction(values[i][j]) * D
                if v.denominator != 1:
                    raise ValueError("values incompatible with generator orders")
                row.append(int(v) % (2 * D if i == j else D))
            B.append(tuple(row))
        self.B = tuple(B)
        if labels is None:
            labels = [f"g{i}" for i in range(len(orders))]
        self.labels = tuple(labels[i] for i in keep)
        for i, n in enumerate(self.orders):
            if (n * self.B[i][i]) % D:
                raise ValueError("q-value inconsistent with generator order")
            for j, m in enumerate(self.orders):
                if (gcd(n, m) * self.B[i][j]) % D and i != j:
                    raise ValueError("b-value inconsistent with generator orders")

    # construction ---------------------------------------------------------

    @classmethod
    def trivial(cls) -> "FiniteQuadraticForm":
        return cls((), ())

    @classmethod
    def cyclic(cls, n: int, q) -> "FiniteQuadraticForm":
        return cls((n,), [[Fraction(q)]])

    @classmethod
    def parse(cls, text: str) -> "FiniteQuadraticForm":
        """Parse the rendering ``<a/b>+u_k+v_k+...`` (``0`` for the trivial form)."""
        text = text.replace(" ", "").replace("⊕", "+")
        if text in ("", "0"):
            return cls.trivial()
        forms = []
        for tok in text.split("+"):
            if tok.startswith("<") and tok.endswith(">"):
                q = Fraction(tok[1:-1])
                n = q.denominator
                forms.append(cls.cyclic(n, q))
            elif tok[:2] in ("u_", "v_"):
                k = int(tok[2:])
                n = 2 ** k
                d = Fraction(0) if tok[0] == "u" else Fraction(2, n)
                forms.append(cls((n, n), [[d, Fraction(1, n)], [Fraction(1, n), d]]))
            else:
                raise ValueError(f"bad form token {tok!r}")
        return orthogonal_sum(*forms)

    def values_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in row] for row in self.B]

    # element arithmetic ---------------------------------------------------

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @cached_property
    def order(self) -> int:
        return prod(self.orders)

    def zero(self) -> tuple:
        return (0,) * self.ngens

    def gen(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(self.ngens))

    def reduce(self, x) -> tuple:
        return tuple(int(a) % n for a, n in zip(_coords(x), self.orders))

    def add(self, x, y) -> tuple:
        return tuple((a + b) % n for a, b, n in zip(_coords(x), _coords(y), self.orders))

    def sub(self, x, y) -> tuple:
        return tuple((a - b) % n for a, b, n in zip(_coords(x), _coords(y), self.orders))

    def mul(self, k: int, x) -> tuple:
        return tuple((k * a) % n for a, n in zip(_coords(x), self.orders))

    def neg(self, x) -> tuple:
        return self.mul(-1, x)

    def element_order(self, x) -> int:
        x = _coords(x)
        return reduce(lcm, (n // gcd(a, n) for a, n in zip(x, self.orders)), 1)

    def qnum(self, x) -> int:
        """Numerator of q(x) over ``den``, reduced mod 2*den."""
        x = _coords(x)
        B = self.B
        r = len(x)
        s = 0
        for i in range(r):
            xi = x[i]
            if not xi:
                continue
            s += xi * xi * B[i][i]
            row = B[i]
            for j in range(i + 1, r):
                if x[j]:
                    s += 2 * xi * x[j] * row[j]
        return s % (2 * self.den)

    def bnum(self, x, y) -> int:
        x, y = _coords(x), _coords(y)
        B = self.B
        s = 0
        for i, xi in enumerate(x):
            if xi:
                row = B[i]
                s += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
        return s % self.den

    def q(self, x) -> Fraction:
        return Fraction(self.qnum(x), self.den)

    def b(self, x, y) -> Fraction:
        return Fraction(self.bnum(x, y), self.den)

    def element(self, x) -> "FqfElement":
        return FqfElement(self, self.reduce(x))

    def elements(self):
        return itertools.product(*(range(n) for n in self.orders))

    def torsion(self, n: int):
        """All elements x with n*x = 0."""
        ranges = []
        for m in self.orders:
            g = gcd(m, n)
            step = m // g
            ranges.append(range(0, m, step))
        return itertools.product(*ranges)

    # structure --------------------------------------------------------------

    def is_nondegenerate(self) -> bool:
        gens = [self.gen(i) for i in range(self.ngens)]
        for p in _prime_factors(self.order):
            for x in self.torsion(p):
                if any(x) and all(self.bnum(x, g) == 0 for g in gens):
                    return False
        return True

    def primary_part(self, p: int) -> tuple["FiniteQuadraticForm", list[tuple]]:
        """The p-primary part and the images of its generators in ``self``."""
        gens, orders = [], []
        for i, n in enumerate(self.orders):
            a, m = _padic_split(n, p)
            if a:
                gens.append(self.mul(m, self.gen(i)))
                orders.append(p ** a)
        return self.subform(gens, orders), gens

    def is_isomorphic(self, other: "FiniteQuadraticForm") -> bool:
        """Exact isomorphism test by matching generator images prime by prime."""
        if self.order != other.order:
            return False
        for p in _prime_factors(self.order):
            A, B = self.primary_part(p)[0], other.primary_part(p)[0]
            if sorted(A.orders) != sorted(B.orders) or not _embed(A, B):
                return False
        return True

    def subform(self, gens, orders) -> "FiniteQuadraticForm":
        """Form on the subgroup with direct-sum basis ``gens`` of given orders."""
        r = len(gens)
        vals = [[None] * r for _ in range(r)]
        for i in range(r):
            vals[i][i] = self.q(gens[i])
            for j in range(i + 1, r):
                vals[i][j] = vals[j][i] = self.b(gens[i], gens[j])
        return FiniteQuadraticForm(orders, vals)

    def negate(self) -> "FiniteQuadraticForm":
        return FiniteQuadraticForm(self.orders, [[-v for v in row] for row in self.values_matrix()],
                                   self.labels)

    def is_even(self) -> bool:
        for x in self.torsion(2):
            if any(x) and self.qnum(x) % self.den:
                return False
        return True

    def length(self, p: int) -> int:
        return sum(1 for n in self.orders if n % p == 0)

    @cached_property
    def _jordan_cache(self) -> dict:
        return {}

    def jordan(self, p: int) -> list[JordanBlock]:
        """Orthogonal decomposition of the p-part into indecomposable blocks."""
        cache = self._jordan_cache
        if p not in cache:
            cache[p] = _jordan(self, p)
        return cache[p]

    def det_class(self, p: int):
        """Unit u with det_p = u/|F_p| (square class), or None for an odd 2-part."""
        if p == 2 and not self.primary_part(2)[0].is_even():
            return None
        u = 1
        for blk in self.jordan(p):
            u *= blk.det_unit()
        return unit_class(u, p)

    def length_and_det(self, p: int):
        return self.length(p), self.det_class(p)

    def normalized_det(self, p: int):
        """Square class of |F| * det_p F in Z_p^x."""
        d = self.det_class(p)
        if d is None:
            return None
        _, m = _padic_split(self.order, p)
        return unit_class(d * m, p) if p == 2 else d * legendre(m, p)

    def brown(self) -> int:
        return sum(blk.brown() for p in _prime_factors(self.order) for blk in self.jordan(p)) % 8

    def gauss_sum(self) -> complex:
        """Numerical Gauss sum; only used as a cross-check of ``brown``."""
        w = cmath.exp(1j * cmath.pi / self.den)
        counts = [0] * (2 * self.den)
        for x in self.elements():
            counts[self.qnum(x)] += 1
        return sum(c * w ** k for k, c in enumerate(counts) if c)

    def render(self) -> str:
        toks = []
        for p in _prime_factors(self.order):
            blocks = sorted(self.jordan(p), key=lambda t: (t.k, t.kind))
            toks.extend(b.token() for b in blocks)
        return "+".join(toks) if toks else "0"

    def __repr__(self) -> str:
        return f"FiniteQuadraticForm({self.render()})"

    # mirrors and reflections ------------------------------------------------

    def prime_of(self, x) -> int | None:
        n = self.element_order(x)
        ps = _prime_factors(n)
        if len(ps) > 1:
            raise ValueError("element mixes primary parts")
        return ps[0] if ps else None

    def is_mirror(self, x):
        """Return (p, k, m) with p^k x = 0 and q(x) = 2m/p^k, gcd(m, p) = 1, or None."""
        if len(_prime_factors(self.element_order(x))) != 1:
            return None
        p = self.prime_of(x)
        if p is None:
            return None
        a, _ = _padic_split(self.element_order(x), p)
        n = p ** a
        q = self.q(x)
        c = q * n  # an integer mod 2n
        assert c.denominator == 1
        c = int(c) % (2 * n)
        if p != 2:
            assert c % 2 == 0
            m = (c // 2) % n
            if m % p == 0:
                return None
            return p, a, m
        if c % 2 == 1:
            return p, a + 1, c
        if c % 4 == 2:
            return p, a, (c // 2)
        return None

    def reflection(self, x) -> "FqfAutomorphism":
        mir = self.is_mirror(x)
        if mir is None:
            raise ValueError("not a mirror")
        p, k, m = mir
        pk = p ** k
        minv = pow(m, -1, pk)
        x = _coords(x)
        images = []
        for i in range(self.ngens):
            g = self.gen(i)
            bx = self.b(g, x) * pk
            assert bx.denominator == 1
            t = (int(bx) * minv) % pk
            images.append(self.sub(g, self.mul(t, x)))
        return FqfAutomorphism(self, tuple(images))

    def norms_of_mirror(self, x, p: int):
        """Return (|x|_p, delta_p(x)); |x|_2 is None when x^2 = 0 mod Z."""
        r, k, m = self.is_mirror(x) or (None, None, None)
        if r is None:
            raise ValueError("not a mirror")
        delta = -1 if r == p else 1
        if r != p:
            return chi(p, r ** k), delta
        if p == 2 and self.qnum(x) % self.den == 0:
            return None, delta
        return chi(p, m), delta

    def isotropic_elements(self, n: int) -> list[tuple]:
        out = []
        for x in self.torsion(n):
            if self.element_order(x) == n and self.qnum(x) == 0:
                out.append(x)
        return out

    def orthogonal_quotient(self, kernel_gens) -> "FiniteQuadraticForm":
        """The form K^perp/K for an isotropic subgroup K."""
        kernel_gens = [self.reduce(k) for k in kernel_gens]
        for k in kernel_gens:
            if self.qnum(k):
                raise ValueError("kernel is not isotropic")
            for k2 in kernel_gens:
                if self.bnum(k, k2):
                    raise ValueError("kernel is not isotropic")
        if not kernel_gens:
            return self
        from sympy import Matrix
        from sympy.matrices.normalforms import smith_normal_decomp
        r, D = self.ngens, self.den
        # K^perp inside Z^r: x with sum_i x_i B(g_i, k) = 0 mod den for each k
        cols = [[self.bnum(self.gen(i), k) for i in range(r)] for k in kernel_gens]
        perp = _solve_congruences(cols, D, self.orders)
        rel = [tuple(n if i == j else 0 for j in range(r)) for i, n in enumerate(self.orders)]
        rel += [tuple(k) for k in kernel_gens]
        # express relations in the basis of perp (both are full rank lattices in Z^r)
        P = Matrix(perp).T  # columns = basis of perp
        Pinv = P.inv()
        R = Matrix([list(Pinv * Matrix(v)) for v in rel]).T
        if any(x.q != 1 for x in R):
            raise AssertionError("relation lattice not inside K^perp")
        Dm, U, V = smith_normal_decomp(R.applyfunc(int))
        # Z^s / R Z^m  ~  Z^s / U^{-1} D  via the change of basis U
        Uinv = U.inv()
        gens, orders = [], []
        s = P.shape[1]
        for i in range(s):
            d = abs(int(Dm[i, i])) if i < min(Dm.shape) else 0
            if d == 1:
                continue
            if d == 0:
                raise AssertionError("quotient is infinite")
            v = P * Uinv[:, i]
            gens.append(self.reduce([int(t) for t in v]))
            orders.append(d)
        return self.subform(gens, orders)


class FqfElement:
    """An element of a finite quadratic form."""

    __slots__ = ("form", "coords")

    def __init__(self, form: FiniteQuadraticForm, coords):
        self.form = form
        self.coords = form.reduce(coords)

    @property
    def order(self) -> int:
        return self.form.element_order(self.coords)

    @property
    def q(self) -> Fraction:
        return self.form.q(self.coords)

    def __add__(self, other):
        return FqfElement(self.form, self.form.add(self.coords, other.coords))

    def __sub__(self, other):
        return FqfElement(self.form, self.form.sub(self.coords, other.coords))

    def __neg__(self):
        return FqfElement(self.form, self.form.neg(self.coords))

    def __rmul__(self, k: int):
        return FqfElement(self.form, self.form.mul(k, self.coords))

    def __eq__(self, other):
        return isinstance(other, FqfElement) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"FqfElement{self.coords}"


def _coords(x) -> tuple:
    return x.coords if isinstance(x, FqfElement) else tuple(x)


class FqfAutomorphism:
    """An automorphism given by the images of the generators."""

    __slots__ = ("form", "images")

    def __init__(self, form: FiniteQuadraticForm, images):
        self.form = form
        self.images = tuple(form.reduce(v) for v in images)

    @classmethod
    def identity(cls, form) -> "FqfAutomorphism":
        return cls(form, [form.gen(i) for i in range(form.ngens)])

    @classmethod
    def scalar(cls, form, k: int) -> "FqfAutomorphism":
        return cls(form, [form.mul(k, form.gen(i)) for i in range(form.ngens)])

    def __call__(self, x) -> tuple:
        F = self.form
        out = F.zero()
        for a, img in zip(_coords(x), self.images):
            if a:
                out = F.add(out, F.mul(a, img))
        return out

    def __mul__(self, other: "FqfAutomorphism") -> "FqfAutomorphism":
        """Composition: (self * other)(x) = self(other(x))."""
        return FqfAutomorphism(self.form, [self(v) for v in other.images])

    def __eq__(self, other):
        return isinstance(other, FqfAutomorphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def is_identity(self) -> bool:
        return all(v == self.form.gen(i) for i, v in enumerate(self.images))

    def is_valid(self) -> bool:
        F = self.form
        for i, n in enumerate(F.orders):
            if any(F.mul(n, self.images[i])):
                return False
            if F.qnum(self.images[i]) != F.B[i][i]:
                return False
            for j in range(i + 1, F.ngens):
                if F.bnum(self.images[i], self.images[j]) != F.B[i][j]:
                    return False
        # bijectivity: the image subgroup must be everything
        seen = {F.zero()}
        frontier = [F.zero()]
        while frontier:
            x = frontier.pop()
            for v in self.images:
                y = F.add(x, v)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return len(seen) == F.order

    def __repr__(self):
        return f"FqfAutomorphism({self.images})"


def orthogonal_sum(*forms: FiniteQuadraticForm) -> FiniteQuadraticForm:
    orders, labels = [], []
    for F in forms:
        orders.extend(F.orders)
        labels.extend(F.labels)
    r = len(orders)
    vals = [[Fraction(0)] * r for _ in range(r)]
    off = 0
    for F in forms:
        M = F.values_matrix()
        for i in range(F.ngens):
            for j in range(F.ngens):
                vals[off + i][off + j] = M[i][j]
        off += F.ngens
    return FiniteQuadraticForm(orders, vals, labels)


def _solve_congruences(cols, D, orders) -> list[tuple]:
    """Basis of {x in Z^r : <c, x> = 0 mod D for all c in cols} (contains diag(orders))."""
    from sympy import Matrix
    from sympy.matrices.normalforms import hermite_normal_form
    r = len(orders)
    # lattice = kernel of Z^r -> (Z/D)^m; generated by solutions; compute via HNF of
    # the augmented system [C | D*I] kernel.
    m = len(cols)
    A = Matrix([list(c) + [D if i == j else 0 for j in range(m)] for i, c in enumerate(cols)])
    # kernel of A over Z: use the nullspace of the integer matrix via smith decomposition
    from sympy.matrices.normalforms import smith_normal_decomp
    Dm, U, V = smith_normal_decomp(A)
    rank = sum(1 for i in range(min(Dm.shape)) if Dm[i, i] != 0)
    ker = [V[:, i] for i in range(rank, V.shape[1])]
    vecs = [[int(v[i]) for i in range(r)] for v in ker]
    vecs += [[orders[i] if i == j else 0 for j in range(r)] for i in range(r)]
    H = hermite_normal_form(Matrix(vecs).T)
    return [tuple(int(H[i, j]) for i in range(r)) for j in range(H.shape[1])]


def _jordan(F: FiniteQuadraticForm, p: int) -> list[JordanBlock]:
    P, emb = F.primary_part(p)
    if P.ngens == 0:
        return []
    basis = [P.gen(i) for i in range(P.ngens)]
    blocks = []

    def exp_of(x):
        a, _ = _padic_split(P.element_order(x), p)
        return a

    def to_ambient(x):
        out = F.zero()
        for a, g in zip(x, emb):
            if a:
                out = F.add(out, F.mul(a, g))
        return out

    def bval(x, y, K):
        # b(x, y) * p^K as an integer mod p^K
        v = P.b(x, y) * p ** K
        assert v.denominator == 1
        return int(v) % p ** K

    while basis:
        K = max(exp_of(x) for x in basis)
        pk = p ** K
        top = [i for i, x in enumerate(basis) if exp_of(x) == K]
        piv = None
        for i in top:
            if bval(basis[i], basis[i], K) % p:
                piv = i
                break
        if piv is None and p != 2:
            for i, j in itertools.combinations(top, 2):
                if bval(basis[i], basis[j], K) % p:
                    basis[i] = P.add(basis[i], basis[j])
                    piv = i
                    break
        if piv is not None:
            x = basis.pop(piv)
            u = bval(x, x, K)
            uinv = pow(u, -1, pk)
            newb = []
            for y in basis:
                t = (bval(y, x, K) * uinv) % pk
                newb.append(P.sub(y, P.mul(t, x)))
            basis = [y for y in newb if any(y)]
            c = int(P.q(x) * pk) % (2 * pk)
            blocks.append(JordanBlock(p, K, "c", c, (to_ambient(x),)))
            continue
        assert p == 2
        pair = None
        for i, j in itertools.combinations(top, 2):
            if bval(basis[i], basis[j], K) % 2:
                pair = (i, j)
                break
        if pair is None:
            raise ValueError("degenerate form")
        i, j = pair
        e, f = basis[i], basis[j]
        basis = [y for t, y in enumerate(basis) if t not in pair]
        a, bb, c = bval(e, e, K), bval(e, f, K), bval(f, f, K)
        det = (a * c - bb * bb) % pk
        dinv = pow(det, -1, pk)
        newb = []
        for y in basis:
            s, t = bval(y, e, K), bval(y, f, K)
            al = ((c * s - bb * t) * dinv) % pk
            be = ((a * t - bb * s) * dinv) % pk
            newb.append(P.sub(y, P.add(P.mul(al, e), P.mul(be, f))))
        basis = [y for y in newb if any(y)]
        qa = int(P.q(e) * pk) % (2 * pk)
        qc = int(P.q(f) * pk) % (2 * pk)
        kind = "v" if (qa // 2) % 2 and (qc // 2) % 2 else "u"
        blocks.append(JordanBlock(p, K, kind, 0, (to_ambient(e), to_ambient(f))))
    return blocks


def _embed(A: FiniteQuadraticForm, B: FiniteQuadraticForm) -> bool:
    """Is there an isometry A -> B?  Injective since A is nondegenerate."""
    by_order: dict = {}
    for y in B.elements():
        by_order.setdefault(B.element_order(y), []).append(y)
    order = sorted(range(A.ngens), key=lambda i: -A.orders[i])
    gens = [A.gen(i) for i in order]

    def rec(chosen):
        i = len(chosen)
        if i == len(gens):
            return True
        g = gens[i]
        for y in by_order.get(A.orders[order[i]], ()):
            if B.q(y) != A.q(g):
                continue
            if any(B.b(y, z) != A.b(g, h) for z, h in zip(chosen, gens)):
                continue
            if rec(chosen + [y]):
                return True
        return False

    return rec([])
