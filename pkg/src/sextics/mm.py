"""Miranda-Morrison invariants of an indefinite even lattice genus.

Local groups are written in coordinates: Gamma_{p,0} = {+-1} x Z_p^x/squares,
with the unit class stored as a Legendre sign (odd p) or a residue mod 8
(p = 2).  Gamma_0 = {+-1} x {+-1} maps to Gamma_{p,0} by phi_p.  Spinor
norms follow the convention theta(r_v) = v^2/2.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .fqf import (FiniteQuadraticForm, FqfAutomorphism, _padic_split, _prime_factors, chi,
                  legendre)
from .nikulin import GenusDescriptor

GAMMA0 = ((1, 1), (1, -1), (-1, 1), (-1, -1))
GAMMA0_MM = frozenset({(1, 1), (-1, -1)})


class UnsupportedCase(Exception):
    """Raised when a genus falls outside the hypotheses the formulas rely on."""


@dataclass(frozen=True)
class SigmaInvariants:
    p: int
    e_p: int
    sigma_sharp: frozenset  # subgroup of Gamma_{p,0}
    sigma_tilde: frozenset  # subgroup of Gamma_0
    gamma22_contained: bool = True

    @property
    def regular(self) -> bool:
        return self.e_p == 1


def _local_class(p: int, t: int) -> int:
    """Class of the rational integer t (prime to p) in Z_p^x/squares."""
    return t % 8 if p == 2 else legendre(t, p)


def _local_group(p: int) -> list[tuple[int, int]]:
    units = (1, 3, 5, 7) if p == 2 else (1, -1)
    return [(s, u) for s in (1, -1) for u in units]


def _mul(p: int, a, b):
    if p == 2:
        return (a[0] * b[0], (a[1] * b[1]) % 8)
    return (a[0] * b[0], a[1] * b[1])


def _generate(p: int, gens) -> frozenset:
    grp = {(1, 1)}
    frontier = list(grp)
    gens = list(gens)
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = _mul(p, x, g)
                if y not in grp:
                    grp.add(y)
                    new.append(y)
        frontier = new
    return frozenset(grp)


def phi(p: int, st) -> tuple[int, int]:
    s, t = st
    return (s, _local_class(p, t))


def _two_adic_blocks(g: GenusDescriptor):
    """Jordan blocks of the 2-adic lattice without unimodular part realizing g at 2.

    Returns a list of (scale exponent k, kind, unit) with cyclic units mod 8;
    the ambiguity by 5 of scale-2 odd blocks is fixed by det g.
    """
    F = g.disc
    blocks = [(b.k, b.kind, b.unit % 8 if b.kind == "c" else 0) for b in F.jordan(2)]
    a, m = _padic_split(F.order, 2)
    want = ((-1) ** g.sig_minus * m) % 8
    have = 1
    for k, kind, u in blocks:
        have = (have * {"u": 7, "v": 3}.get(kind, u)) % 8
    ratio = (want * have) % 8  # have^-1 = have mod 8
    if ratio == 5:
        for i, (k, kind, u) in enumerate(blocks):
            if kind == "c" and k == 1:
                blocks[i] = (k, kind, (5 * u) % 8)
                break
        else:
            raise UnsupportedCase("2-adic determinant inconsistent with the discriminant form")
    elif ratio != 1:
        raise UnsupportedCase("2-adic determinant inconsistent with the discriminant form")
    return blocks


def _block_values(j: int, kind: str, u: int) -> set[int]:
    """Values mod 8 of the block 2^j * (<u>, U or V) on all vectors."""
    vals = set()
    for x in range(8):
        for y in range(8 if kind != "c" else 1):
            if kind == "c":
                v = u * x * x
            elif kind == "u":
                v = 2 * x * y
            else:
                v = 2 * (x * x + x * y + y * y)
            vals.add((v << j) % 8)
    return vals


def _sigma_sharp_2_minimal(g: GenusDescriptor) -> frozenset:
    """Spinor image of O^#(T_2) when T_2 has no unimodular Jordan component.

    Rescale T_2 by 1/2 to get M.  Generators: reflections in odd vectors of M,
    giving (-1, v^2); the scalings of an even unimodular plane in M, giving
    all of Gamma_2^{++}; those of an even plane of scale 2 in M, giving
    (1, 5).
    """
    blocks = _two_adic_blocks(g)
    sums = {0}
    even_plane_0 = even_plane_1 = False
    for k, kind, u in blocks:
        j = k - 1
        sums = {(a + b) % 8 for a in sums for b in _block_values(j, kind, u)}
        if kind in "uv":
            even_plane_0 |= j == 0
            even_plane_1 |= j == 1
    gens = [(-1, v) for v in sums if v % 2]
    if even_plane_0:
        gens += [(1, 3), (1, 5), (1, 7)]
    if even_plane_1:
        gens.append((1, 5))
    return _generate(2, gens)


def sigma_invariants(g: GenusDescriptor, p: int) -> SigmaInvariants:
    if g.sig_plus == 0 or g.sig_minus == 0 or g.rank < 3:
        raise UnsupportedCase("definite or small-rank genus")
    F = g.disc
    r0 = g.rank - F.length(p)
    full = frozenset(_local_group(p))
    if p == 2:
        if r0 >= 1:
            sharp = full
        else:
            sharp = _sigma_sharp_2_minimal(g)
    else:
        if r0 >= 2:
            sharp = full
        elif r0 == 1:
            a, m = _padic_split(F.order, p)
            d0 = legendre((-1) ** g.sig_minus * m, p)
            for blk in F.jordan(p):
                d0 *= legendre(blk.det_unit(), p)
            sharp = _generate(p, [(-1, d0 * legendre(2, p))])
        else:
            sharp = frozenset({(1, 1)})
    e_p = len(full) // len(sharp)
    tilde = frozenset(st for st in GAMMA0 if phi(p, st) in sharp)
    g22 = p != 2 or (1, 5) in sharp
    return SigmaInvariants(p, e_p, sharp, tilde, g22)


def primes_of(g: GenusDescriptor) -> list[int]:
    return sorted(set(_prime_factors(g.disc.order)) | {2})


def irregular_primes(g: GenusDescriptor) -> list[int]:
    return [p for p in primes_of(g) if sigma_invariants(g, p).e_p > 1]


# F_2 linear algebra -----------------------------------------------------------

def _bit(sign: int) -> int:
    return 0 if sign == 1 else 1


class F2Quotient:
    """The quotient of F_2^n by a subspace, with canonical coset representatives."""

    def __init__(self, n: int, rel):
        self.n = n
        self.rows: list[int] = []  # echelon rows as bitmasks, distinct leading bits
        for v in rel:
            self._insert(v)

    def _insert(self, v: int):
        v = self.reduce(v)
        if v:
            self.rows.append(v)
            self.rows.sort(reverse=True)

    def reduce(self, v: int) -> int:
        for r in self.rows:
            if v ^ r < v:
                v ^= r
        return v

    @property
    def dim(self) -> int:
        return self.n - len(self.rows)

    @property
    def order(self) -> int:
        return 2 ** self.dim

    def span_dim(self, vecs) -> int:
        """Dimension of the image of span(vecs) in the quotient."""
        q = F2Quotient(self.n, self.rows)
        before = len(q.rows)
        for v in vecs:
            q._insert(v)
        return len(q.rows) - before


def _width(p: int) -> int:
    return 3 if p == 2 else 2


def _local_bits(p: int, s: int, u: int) -> int:
    """Bits of (s, u) in Gamma_{p,0}: sign, chi_p(u) and, at 2, whether u = +-3 mod 8."""
    if p == 2:
        u %= 8
        return _bit(s) | (_bit(chi(2, u)) << 1) | ((1 if u in (3, 5) else 0) << 2)
    return _bit(s) | (_bit(u) << 1)


@dataclass
class EModule:
    """E(N) or E_+(N) as a quotient of prod_{p irregular} Gamma_{p,0}, an F_2-space.

    Each irregular prime p owns a block of bits: the sign, chi_p of the unit
    and, for p = 2, the extra bit separating u from 5u.
    """

    genus: GenusDescriptor
    primes: list
    sigmas: dict
    plus: bool
    quotient: F2Quotient = field(repr=False)
    offsets: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.quotient.order

    def vector(self, pairs: dict) -> int:
        """Reduced vector of a family {p: (s, u)} with u a unit class (Legendre sign or residue mod 8)."""
        v = 0
        for p in self.primes:
            s, u = pairs[p]
            v |= _local_bits(p, s, u) << self.offsets[p]
        return self.quotient.reduce(v)

    def zero(self) -> int:
        return 0

    def _mirror_options(self, xi) -> list[dict]:
        """Possible values of (delta_s(xi), m_s(xi)) over irregular s.

        At s = 2 with xi of 2-power order, m is known only modulo 2^k; all
        lifts mod 8 are returned.
        """
        F = self.genus.disc
        r, k, m = F.is_mirror(xi)
        opts = [{}]
        for s in self.primes:
            if s != r:
                vals = [(1, r ** k % 8 if s == 2 else legendre(r ** k, s))]
            elif s != 2:
                vals = [(-1, legendre(m, s))]
            else:
                if F.qnum(xi) % F.den == 0:
                    raise UnsupportedCase("mirror with xi^2 = 0 mod Z at the irregular prime 2")
                step = 2 ** min(k, 3)
                vals = sorted({(-1, (m + step * j) % 8) for j in range(8)})
                vals = [v for v in vals if v[1] % 2]
            opts = [{**o, s: v} for o in opts for v in vals]
        return opts

    def of_mirror(self, xi) -> int:
        vals = {self.vector(o) for o in self._mirror_options(xi)}
        if len(vals) != 1:
            raise UnsupportedCase("e(r_xi) depends on the unknown 2-adic unit of xi")
        return vals.pop()

    def of_factorization(self, mirrors) -> int:
        v = 0
        for xi in mirrors:
            v ^= self.of_mirror(xi)
        return self.quotient.reduce(v)

    def of_automorphism(self, a: FqfAutomorphism) -> int:
        v = 0
        for kind, data in local_pieces(a, 2 in self.primes):
            v ^= self.of_mirror(data) if kind == "mirror" else self.of_block_swap(*data)
        return self.quotient.reduce(v)

    def of_block_swap(self, block: FiniteQuadraticForm, p: int) -> int:
        """Image of the swap of two orthogonal copies of a p-primary block.

        The swap lifts to the swap of two copies M + M of a p-adic lattice with
        discriminant form ``block``, with determinant (-1)^rank M and spinor
        norm det M = p^a u.  Moving p^a to the rational part leaves (det, u)
        at p and (1, p^a) at every other prime.
        """
        n = sum(b.rank for b in block.jordan(p))
        a, _ = _padic_split(block.order, p)
        d = (-1) ** n
        units = [1]
        for b in block.jordan(p):
            u = b.det_unit()
            if p == 2 and b.kind == "c" and b.k == 1:
                units = [x * w for x in units for w in (u, 5 * u)]
            else:
                units = [x * u for x in units]
        vals = set()
        for u in units:
            pairs = {}
            for s in self.primes:
                if s == p:
                    pairs[s] = (d, u % 8 if s == 2 else legendre(u, s))
                else:
                    pairs[s] = (1, p ** a % 8 if s == 2 else legendre(p ** a, s))
            vals.add(self.vector(pairs))
        if len(vals) != 1:
            raise UnsupportedCase("swap value depends on the unknown 2-adic unit")
        return vals.pop()

    def span_order(self, vecs) -> int:
        return 2 ** self.quotient.span_dim(vecs)


def _build(g: GenusDescriptor, plus: bool, max_primes: int | None) -> EModule:
    sig = {p: sigma_invariants(g, p) for p in primes_of(g)}
    irr = [p for p in sorted(sig) if not sig[p].regular]
    if max_primes is not None and len(irr) > max_primes:
        raise UnsupportedCase(f"{len(irr)} irregular primes {irr}")
    offsets, n = {}, 0
    for p in irr:
        offsets[p] = n
        n += _width(p)
    rel = []
    for p in irr:
        rel += [_local_bits(p, s, u) << offsets[p] for s, u in sig[p].sigma_sharp]
    for s, t in ((-1, -1),) if plus else GAMMA0:
        v = 0
        for p in irr:
            v |= _local_bits(p, s, _local_class(p, t)) << offsets[p]
        rel.append(v)
    return EModule(g, irr, sig, plus, F2Quotient(n, rel), offsets)


def e_group(g: GenusDescriptor, max_primes: int | None = None) -> EModule:
    return _build(g, False, max_primes)


def e_plus_group(g: GenusDescriptor, max_primes: int | None = None) -> EModule:
    return _build(g, True, max_primes)


def e_of_mirror(E: EModule, xi) -> int:
    return E.of_mirror(xi)


def e_plus_of_mirror(Ep: EModule, xi) -> int:
    return Ep.of_mirror(xi)


def sigma_tilde_total(g: GenusDescriptor) -> frozenset:
    out = frozenset(GAMMA0)
    for p in primes_of(g):
        out &= sigma_invariants(g, p).sigma_tilde
    return out


def expected_order(g: GenusDescriptor, plus: bool = False) -> int:
    """e(N)/[Gamma_0 : Sigma~(N)], with Sigma~ cut by Gamma_0^{--} for E_+."""
    e = 1
    for p in primes_of(g):
        e *= sigma_invariants(g, p).e_p
    st = sigma_tilde_total(g)
    if plus:
        st &= GAMMA0_MM
        return e * len(st) // 2
    return e * len(st) // 4


# closed formulas for at most two irregular primes ---------------------------

def _coset(st, sub) -> tuple:
    """Canonical representative of st * sub in Gamma_0."""
    return min((st[0] * a, st[1] * b) for a, b in sub)


def _product(a, b) -> frozenset:
    return frozenset((x[0] * y[0], x[1] * y[1]) for x in a for y in b)


@dataclass(frozen=True)
class LemmaData:
    """Ingredients of the one- and two-prime formulas for a genus."""

    genus: GenusDescriptor
    primes: tuple
    sigmas: dict

    @classmethod
    def of(cls, g: GenusDescriptor) -> "LemmaData":
        sig = {p: sigma_invariants(g, p) for p in primes_of(g)}
        irr = tuple(p for p in sorted(sig) if not sig[p].regular)
        if len(irr) > 2:
            raise UnsupportedCase(f"{len(irr)} irregular primes {list(irr)}")
        if 2 in sig and not sig[2].gamma22_contained:
            raise UnsupportedCase("Sigma_2^# does not contain Gamma_{2,2}")
        for p in irr:
            sharp = sig[p].sigma_sharp
            if p % 4 == 1 and not sharp <= {(1, 1), (-1, 1)} and sharp != {(1, 1), (-1, -1)}:
                raise AssertionError(f"irregular p = {p} = 1 mod 4 with Sigma^# not generated by (-1,-1)")
        return cls(g, irr, sig)

    def tilde(self, p):
        return self.sigmas[p].sigma_tilde

    def ep_nontrivial(self, p) -> bool:
        s = self.sigmas[p]
        return p % 4 == 1 and s.e_p * len(s.sigma_tilde) == 8

    def ep_plus_nontrivial(self, p) -> bool:
        if p % 4 == 1:
            return self.ep_nontrivial(p)
        s = self.sigmas[p]
        return s.e_p * len(s.sigma_tilde & GAMMA0_MM) == 4

    def order(self, plus: bool = False) -> int:
        n = 1
        for p in self.primes:
            n *= 2 if (self.ep_plus_nontrivial(p) if plus else self.ep_nontrivial(p)) else 1
        if len(self.primes) == 2:
            p, q = self.primes
            if plus:
                sub = _product(self.tilde(p) & GAMMA0_MM, self.tilde(q) & GAMMA0_MM)
                n *= 2 // len(sub)
            else:
                n *= 4 // len(_product(self.tilde(p), self.tilde(q)))
        return n

    def norms(self, xi, p):
        ab, d = self.genus.disc.norms_of_mirror(xi, p)
        if ab is None:
            raise UnsupportedCase("mirror with xi^2 = 0 mod Z at 2")
        return ab, d

    def mbar(self, xi, p) -> int:
        return self.norms(xi, p)[0] if self.ep_nontrivial(p) else 1

    def beta(self, xi, p) -> tuple:
        ab, d = self.norms(xi, p)
        return (d * ab, 1) if p % 4 == 1 else (d, ab)

    def mbar_plus(self, xi, p) -> int:
        if p % 4 == 1:
            return self.mbar(xi, p)
        ab, d = self.norms(xi, p)
        return d * ab if self.ep_plus_nontrivial(p) else 1

    def beta_plus(self, xi, p) -> int:
        ab, d = self.norms(xi, p)
        if p % 4 == 1:
            return d * ab
        if self.ep_plus_nontrivial(p):
            return ab
        # the image of (d, |xi|) under Gamma_0 -> Gamma_0 / Sigma~_p = Gamma_0^--
        coset = {(d * a, ab * b) for a, b in self.tilde(p)}
        return 1 if (1, 1) in coset else -1

    def e_of_mirror(self, xi, plus: bool = False) -> tuple:
        if not self.primes:
            return ()
        if len(self.primes) == 1:
            p = self.primes[0]
            return (self.mbar_plus(xi, p) if plus else self.mbar(xi, p),)
        p, q = self.primes
        if plus:
            sub = _product(self.tilde(p) & GAMMA0_MM, self.tilde(q) & GAMMA0_MM)
            b = self.beta_plus(xi, p) * self.beta_plus(xi, q)
            third = 1 if len(sub) == 2 else b
            return (self.mbar_plus(xi, p), self.mbar_plus(xi, q), third)
        bp, bq = self.beta(xi, p), self.beta(xi, q)
        third = _coset((bp[0] * bq[0], bp[1] * bq[1]), _product(self.tilde(p), self.tilde(q)))
        return (self.mbar(xi, p), self.mbar(xi, q), third)


def lemma_e_of_mirror(g: GenusDescriptor, xi, plus: bool = False) -> tuple:
    """e(r_xi) (or e_+) by the closed one- and two-prime formulas.

    The value is a tuple with one entry per factor of the product
    decomposition; trivial factors contribute a constant.
    """
    return LemmaData.of(g).e_of_mirror(xi, plus)


def det_plus_of_mirror(g: GenusDescriptor, p: int, xi, E: EModule | None = None) -> int:
    s = sigma_invariants(g, p)
    if not s.sigma_tilde <= GAMMA0_MM:
        raise UnsupportedCase(f"Sigma~_{p} is not inside Gamma_0^--")
    if 2 in primes_of(g) and not sigma_invariants(g, 2).gamma22_contained:
        raise UnsupportedCase("Sigma_2^# does not contain Gamma_{2,2}")
    F = g.disc
    E = E or e_group(g)
    if E.of_mirror(xi) != 0:
        raise UnsupportedCase("the reflection does not lift to the lattice")
    ab, d = F.norms_of_mirror(xi, p)
    if ab is None:
        raise UnsupportedCase("xi^2 = 0 mod Z at p = 2")
    return d * ab


# factorization of automorphisms into reflections ----------------------------

def _support_gens(a: FqfAutomorphism, p: int) -> list[tuple]:
    """Generators of the p-parts of the cyclic factors moved by a (with their images' supports)."""
    F = a.form
    moved = set()
    for i in range(F.ngens):
        img = a.images[i]
        e = F.gen(i)
        if tuple(img) != tuple(e):
            moved.add(i)
            moved |= {j for j, c in enumerate(img) if c % F.orders[j]}
    gens = []
    for i in sorted(moved):
        k, m = _padic_split(F.orders[i], p)
        if k:
            v = [0] * F.ngens
            v[i] = m
            gens.append(tuple(v))
    return gens


def _span(F: FiniteQuadraticForm, gens) -> list[tuple]:
    elems = {F.zero()}
    for g in gens:
        n = F.element_order(g)
        elems = {F.add(e, F.mul(t, g)) for e in elems for t in range(n)}
    return sorted(elems)


def _factor_local(F, gens, target, p, forbid_integral_2, max_depth=6, max_states=50000):
    mirrors = []
    for x in _span(F, gens):
        if not any(x) or F.is_mirror(x) is None:
            continue
        if p == 2 and forbid_integral_2 and F.qnum(x) % F.den == 0:
            continue
        r = F.reflection(x)
        if not r.is_identity():
            mirrors.append((x, r))
    path = _bfs(gens, target, mirrors, max_depth, max_states)
    if path is None:
        raise UnsupportedCase(f"no factorization into mirrors at p = {p}")
    return path


def factor_into_mirrors(a: FqfAutomorphism, forbid_integral_2: bool) -> list[tuple]:
    """Mirrors xi_1..xi_n with a = r_{xi_n} ... r_{xi_1}, found by breadth-first search.

    Each primary part is handled separately, inside the span of the cyclic
    factors that a moves.  With ``forbid_integral_2`` mirrors of order 2 with
    xi^2 = 0 mod Z are not used.
    """
    F = a.form
    out = []
    for p in _prime_factors(F.order):
        gens = _support_gens(a, p)
        target = tuple(a(g) for g in gens)
        if target != tuple(gens):
            out += _factor_local(F, gens, target, p, forbid_integral_2)
    return out


def local_pieces(a: FqfAutomorphism, forbid_integral_2: bool) -> list[tuple]:
    """Split a into reflections and, where those do not suffice, swaps of isomorphic blocks.

    Returns ("mirror", xi) and ("swap", (block form, p)) pieces, prime by prime.
    """
    F = a.form
    out = []
    for p in _prime_factors(F.order):
        gens = _support_gens(a, p)
        target = tuple(a(g) for g in gens)
        if target == tuple(gens):
            continue
        try:
            out += [("mirror", xi) for xi in _factor_local(F, gens, target, p, forbid_integral_2)]
        except UnsupportedCase:
            block = _swapped_block(F, gens, target)
            if block is None:
                raise
            out.append(("swap", (block, p)))
    return out


def _swapped_block(F: FiniteQuadraticForm, gens, target):
    """The form on one half if a exchanges two halves of the generators, else None."""
    pos = {g: i for i, g in enumerate(gens)}
    perm = [pos.get(t) for t in target]
    if None in perm or any(perm[perm[i]] != i or perm[i] == i for i in range(len(perm))):
        return None
    half = [gens[i] for i in range(len(gens)) if i < perm[i]]
    orders = [F.element_order(g) for g in half]
    return F.subform(half, orders)


def _bfs(gens, target, mirrors, max_depth, max_states):
    start = tuple(gens)
    seen = {start: None}
    queue = deque([(start, 0)])
    while queue:
        state, depth = queue.popleft()
        if state == target:
            path = []
            while seen[state] is not None:
                prev, xi = seen[state]
                path.append(xi)
                state = prev
            return path[::-1]
        if depth >= max_depth:
            continue
        for xi, r in mirrors:
            nxt = tuple(r(y) for y in state)
            if nxt not in seen:
                seen[nxt] = (state, xi)
                if len(seen) > max_states:
                    return None
                queue.append((nxt, depth + 1))
    return None


def apply_word(F: FiniteQuadraticForm, mirrors) -> FqfAutomorphism:
    a = FqfAutomorphism.identity(F)
    for xi in mirrors:
        a = F.reflection(xi) * a
    return a
