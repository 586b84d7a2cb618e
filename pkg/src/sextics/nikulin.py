"""Lattice extensions: isotropic kernels, primitive embeddings into L = 2E8 + 3U,
transcendental genera."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import _kernels
from .fqf import FiniteQuadraticForm, _padic_split, _prime_factors, legendre
from .lattices import RootType, SingularitySet, layout

L_RANK = 22
L_SIG = (3, 19)


@dataclass(frozen=True)
class GenusDescriptor:
    sig_plus: int
    sig_minus: int
    disc: FiniteQuadraticForm

    @property
    def rank(self) -> int:
        return self.sig_plus + self.sig_minus

    @property
    def det(self) -> int:
        return (-1) ** self.sig_minus * self.disc.order

    def is_consistent(self) -> bool:
        F = self.disc
        lengths_ok = all(F.length(p) <= self.rank for p in _prime_factors(F.order))
        return lengths_ok and F.brown() == (self.sig_plus - self.sig_minus) % 8


@dataclass(frozen=True)
class ExtensionKernel:
    """An isotropic subgroup of discr(S_h), given by generators."""

    gens: tuple
    signature: tuple = ()
    label: str = ""
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def order(self) -> int:
        o = 1
        for n in self.signature:
            o *= n
        return o

    @classmethod
    def trivial(cls) -> "ExtensionKernel":
        return cls((), ())


def quotient_form(F: FiniteQuadraticForm, K: ExtensionKernel) -> FiniteQuadraticForm:
    if not K.gens:
        return F
    Q = F.orthogonal_quotient(list(K.gens))
    assert Q.order * K.order ** 2 == F.order
    return Q


def sh_form(S: SingularitySet) -> FiniteQuadraticForm:
    """discr(S + Zh) with h^2 = 2; the class h/2 is the last generator."""
    return layout(S.plain(), True).form


def sh_genus(S: SingularitySet, K: ExtensionKernel | None = None) -> GenusDescriptor:
    F = sh_form(S)
    if K is not None and K.gens:
        F = quotient_form(F, K)
    return GenusDescriptor(1, S.mu, F)


def embeds_primitively_in_L(g: GenusDescriptor) -> bool:
    """Existence of a primitive embedding into the even unimodular lattice of signature (3, 19)."""
    if g.sig_plus > L_SIG[0] or g.sig_minus > L_SIG[1]:
        return False
    F = g.disc
    delta = L_RANK - g.rank
    for p in _prime_factors(F.order):
        lp = F.length(p)
        if lp > delta:
            return False
        if lp < delta:
            continue
        if p == 2:
            if not F.primary_part(2)[0].is_even():
                continue
            if F.normalized_det(2) not in (1, 7):
                return False
        else:
            want = 1 if (g.sig_plus - 1) % 2 == 0 else legendre(-1, p)
            if F.normalized_det(p) != want:
                return False
    return True


# fast existence test for S_h from per-component invariants -----------------

@lru_cache(maxsize=None)
def component_local(t: RootType) -> dict:
    """{p: (length_p, square class of |X| det_p X)} for every prime p dividing |X|."""
    from .lattices import component_form
    F = component_form(t)
    out = {}
    for p in _prime_factors(F.order):
        out[p] = (F.length(p), F.normalized_det(p) if p != 2 else None)
    return out


def _legendre_order(t: RootType, p: int) -> int:
    from .lattices import component_form
    return legendre(component_form(t).order, p)


def sh_exists(S: SingularitySet) -> bool:
    """Fast version of embeds_primitively_in_L(sh_genus(S)) for K = 0."""
    types = S.plain().types
    mu = sum(t.n for t in types)
    if mu > 19:
        return False
    delta = 21 - mu
    lengths: dict[int, int] = {2: 1}
    for t in types:
        for p, (lp, _) in component_local(t).items():
            lengths[p] = lengths.get(p, 0) + lp
    for p, lp in lengths.items():
        if lp > delta:
            return False
        if lp == delta and p != 2:
            # the 2-part is odd because of h/2, so only odd primes can obstruct
            sign = legendre(2, p)
            for t in types:
                loc = component_local(t).get(p)
                sign *= loc[1] if loc else _legendre_order(t, p)
            if sign != 1:
                return False
    return True


def transcendental_genus(S: SingularitySet, K: ExtensionKernel | None = None) -> GenusDescriptor:
    g = sh_genus(S, K)
    if not embeds_primitively_in_L(g):
        raise ValueError(f"{S} does not extend to a primitive sublattice of L")
    return GenusDescriptor(2, 19 - S.mu, g.disc.negate())


# kernels --------------------------------------------------------------------

def torsion_components(S: SingularitySet, p: int) -> list[tuple[int, int]]:
    """(component index, N) for the components with p-torsion in discr; N as in _scan_py."""
    out = []
    for i, t in enumerate(S.plain().types):
        if t.kind == "A" and (t.n + 1) % p == 0:
            out.append((i, t.n + 1))
        elif t.kind == "E" and t.n == 6 and p == 3:
            out.append((i, 6))
    return out


def _kernel_coords(S: SingularitySet, p: int, comps, a) -> tuple:
    lay = layout(S.plain(), True)
    x = [0] * lay.form.ngens
    for (i, n), ai in zip(comps, a):
        g = lay.offsets[i]
        x[g] = (ai * (n // p)) % lay.form.orders[g] if S.plain().types[i].kind == "A" else ai % 3
    return tuple(x)


def _canonical_cyclic(S: SingularitySet, comps, a, p: int) -> tuple:
    """Orbit key of <a> under component -id's, permutations of equal components and (Z/p)^*."""
    types = S.plain().types
    best = None
    for t in range(1, p):
        b = [min((t * ai) % p, (-t * ai) % p) for ai in a]
        groups: dict = {}
        for (i, _), bi in zip(comps, b):
            groups.setdefault(types[i], []).append(bi)
        key = tuple(sorted((str(k), tuple(sorted(v))) for k, v in groups.items()))
        best = key if best is None or key < best else best
    return best


def good_elements(S: SingularitySet, p: int) -> tuple[list, list]:
    comps = torsion_components(S, p)
    if not comps:
        return comps, []
    return comps, _kernels.scan_cyclic([n for _, n in comps], p)


def kernel_candidates(S: SingularitySet, n: int) -> list[ExtensionKernel]:
    """Orbit representatives of isotropic order-n (n prime, odd) subgroups without new roots."""
    if n % 2 == 0:
        raise ValueError("only odd kernels are supported (even ones give reducible curves)")
    if len(_prime_factors(n)) != 1 or _padic_split(n, n)[0] != 1:
        raise ValueError("kernel order must be an odd prime")
    p = n
    comps, good = good_elements(S, p)
    orbits: dict = {}
    for a in good:
        key = _canonical_cyclic(S, comps, a, p)
        if key not in orbits:
            orbits[key] = a
    out = []
    for key in sorted(orbits):
        a = orbits[key]
        out.append(ExtensionKernel((_kernel_coords(S, p, comps, a),), (p,), label=f"Z/{p}",
                                   extra={"torsion": a}))
    return out


def elementary_kernels(S: SingularitySet, p: int, rank: int) -> list[ExtensionKernel]:
    """Isotropic subgroups (Z/p)^rank all of whose nonzero elements are good.

    Returns at most one representative per distinct subgroup found from
    orbit-canonical first generators.
    """
    comps, good = good_elements(S, p)
    if rank == 1:
        return kernel_candidates(S, p)
    goodset = set(good)
    c = len(comps)

    def add(x, y):
        return tuple((u + v) % p for u, v in zip(x, y))

    def scale(t, x):
        return tuple((t * u) % p for u in x)

    firsts = {}
    for a in good:
        key = _canonical_cyclic(S, comps, a, p)
        firsts.setdefault(key, a)
    found = {}
    for x in firsts.values():
        _extend([x], rank, good, goodset, p, found, add, scale)
        if found:
            break
    out = []
    for span, basis in sorted(found.items()):
        gens = tuple(_kernel_coords(S, p, comps, b) for b in basis)
        out.append(ExtensionKernel(gens, (p,) * rank, label="x".join([f"Z/{p}"] * rank),
                                   extra={"torsion": basis}))
    return out


def _span(basis, p, add, scale):
    elems = {tuple([0] * len(basis[0]))}
    for b in basis:
        elems = {add(e, scale(t, b)) for e in elems for t in range(p)}
    return elems


def _extend(basis, rank, good, goodset, p, found, add, scale):
    if len(basis) == rank:
        span = frozenset(_span(basis, p, add, scale))
        found.setdefault(tuple(sorted(span)), tuple(basis))
        return
    cur = _span(basis, p, add, scale)
    for y in good:
        if y in cur or y < basis[-1]:
            continue
        if all(add(e, scale(t, y)) in goodset for e in cur for t in range(1, p)):
            _extend(basis + [y], rank, good, goodset, p, found, add, scale)
            if found:
                return


def torus_weight_criterion(S: SingularitySet) -> bool:
    w = S.weight
    return w == 6 or (w == 7 and RootType("A", 2) in S.plain().types)


@dataclass
class TorusVerdict:
    admissible: bool
    criterion: bool
    orbits: list

    @property
    def kernel(self) -> ExtensionKernel | None:
        return self.orbits[0] if self.admissible and self.orbits else None


def torus_admissible(S: SingularitySet) -> TorusVerdict:
    """Weight criterion for a Z/3 kernel, cross-checked against the kernel scan.

    For weight 6 or 7 the scan must agree with the criterion; sets of larger
    weight carry Z/3 kernels too, but these belong to the (Z/3)^2, (Z/3)^3
    families and are not 1-torus admissible.
    """
    crit = torus_weight_criterion(S)
    orbits = kernel_candidates(S, 3) if S.weight >= 6 else []
    if S.weight in (6, 7) and crit != bool(orbits):
        raise AssertionError(f"weight criterion and kernel scan disagree for {S}")
    return TorusVerdict(crit, crit, orbits)


def extension_exists(S: SingularitySet, K: ExtensionKernel) -> bool:
    return embeds_primitively_in_L(sh_genus(S, K))
