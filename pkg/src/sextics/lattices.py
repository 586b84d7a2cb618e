"""ADE root lattices, singularity sets, Gram matrices and discriminant forms."""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .fqf import FiniteQuadraticForm, FqfAutomorphism, orthogonal_sum

_KIND_RANK = {"E": 0, "D": 1, "A": 2}


@dataclass(frozen=True, order=False)
class RootType:
    kind: str
    n: int

    def __post_init__(self):
        ok = {"A": self.n >= 1, "D": self.n >= 4, "E": self.n in (6, 7, 8)}.get(self.kind, False)
        if not ok:
            raise ValueError(f"invalid root type {self.kind}{self.n}")

    @property
    def rank(self) -> int:
        return self.n

    @property
    def weight(self) -> int:
        if self.kind == "A" and (self.n + 1) % 3 == 0:
            return (self.n + 1) // 3
        if self.kind == "E" and self.n == 6:
            return 2
        return 0

    @property
    def sort_key(self):
        return (_KIND_RANK[self.kind], -self.n)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self):
        return f"{self.kind}{self.n}"

    __repr__ = __str__


def _render(types) -> str:
    c = Counter(types)
    parts = []
    for t in sorted(c):
        m = c[t]
        parts.append(f"{m}{t}" if m > 1 else str(t))
    return "+".join(parts)


@dataclass(frozen=True)
class SingularitySet:
    """A multiset of root types; ``inner`` optionally marks the torus-inner points."""

    types: tuple
    inner: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(sorted(self.types)))
        if self.inner is not None:
            object.__setattr__(self, "inner", tuple(sorted(self.inner)))
            if Counter(self.inner) - Counter(self.types):
                raise ValueError("inner points must be a sub-multiset")

    @classmethod
    def parse(cls, spec: str) -> "SingularitySet":
        return parse_set(spec)

    @property
    def mu(self) -> int:
        return sum(t.n for t in self.types)

    @property
    def weight(self) -> int:
        return sum(t.weight for t in self.types)

    def plain(self) -> "SingularitySet":
        return SingularitySet(self.types) if self.inner is not None else self

    def counts(self) -> Counter:
        return Counter(self.types)

    def __add__(self, other: "SingularitySet") -> "SingularitySet":
        return SingularitySet(self.types + other.types)

    def __str__(self) -> str:
        if self.inner is None:
            return _render(self.types) if self.types else "0"
        outer = list((Counter(self.types) - Counter(self.inner)).elements())
        s = f"({_render(self.inner)})"
        return s + ("+" + _render(outer) if outer else "")

    def __repr__(self):
        return f"SingularitySet({str(self)!r})"

    def __lt__(self, other):
        return _set_key(self) < _set_key(other)


def _set_key(s: SingularitySet):
    return (s.mu, tuple(t.sort_key for t in s.types), s.inner is not None)


_TERM = re.compile(r"(\d*)([ADE])(\d+)\*?")


class SpecError(ValueError):
    def __init__(self, msg: str, spec: str, pos: int):
        super().__init__(f"{msg}\n  {spec}\n  {' ' * pos}^")
        self.pos = pos


def parse_set(spec: str) -> SingularitySet:
    """Parse ``2A4+2A3+2A2``, ``(A8+3A2)+A4+A1``; ``*`` marks are ignored."""
    text = spec.strip()
    if text in ("", "0"):
        return SingularitySet(())
    pos = 0
    types, inner = [], None
    depth_start = None
    expect_term = True
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if expect_term:
            if ch == "(":
                if inner is not None or depth_start is not None:
                    raise SpecError("only one parenthesized group is allowed", text, pos)
                depth_start = len(types)
                pos += 1
                continue
            m = _TERM.match(text, pos)
            if not m:
                raise SpecError("expected a term like 2A4, D5 or E6", text, pos)
            mult = int(m.group(1)) if m.group(1) else 1
            try:
                t = RootType(m.group(2), int(m.group(3)))
            except ValueError as exc:
                raise SpecError(str(exc), text, pos) from None
            if mult < 1:
                raise SpecError("multiplicity must be positive", text, pos)
            types.extend([t] * mult)
            pos = m.end()
            while pos < len(text) and text[pos] == "*":
                pos += 1
            expect_term = False
        else:
            if ch == ")" and depth_start is not None:
                inner = types[depth_start:]
                depth_start = None
                pos += 1
                while pos < len(text) and text[pos] == "*":
                    pos += 1
            elif ch == "+":
                expect_term = True
                pos += 1
            else:
                raise SpecError("expected '+'", text, pos)
    if depth_start is not None:
        raise SpecError("unclosed parenthesis", text, len(text))
    if expect_term:
        raise SpecError("dangling '+'", text, len(text))
    return SingularitySet(tuple(types), tuple(inner) if inner is not None else None)


# Gram matrices -------------------------------------------------------------

def dynkin_edges(t: RootType) -> list[tuple[int, int]]:
    n = t.n
    if t.kind == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if t.kind == "D":
        return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    return [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]


def root_gram(t: RootType) -> list[list[int]]:
    n = t.n
    G = [[-2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in dynkin_edges(t):
        G[i][j] = G[j][i] = 1
    return G


def block_diagonal(blocks) -> list[list[int]]:
    n = sum(len(b) for b in blocks)
    G = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                G[off + i][off + j] = v
        off += len(b)
    return G


class IntegerLattice:
    """A nondegenerate lattice given by a symmetric integer Gram matrix."""

    def __init__(self, gram):
        self.gram = [list(map(int, row)) for row in gram]
        n = len(self.gram)
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def det(self) -> int:
        from sympy import Matrix
        return int(Matrix(self.gram).det()) if self.rank else 1

    @property
    def signature(self) -> tuple[int, int]:
        """Exact inertia via the signs of a symmetric LDL^T decomposition over Q."""
        A = [[Fraction(v) for v in row] for row in self.gram]
        n = len(A)
        pos = neg = 0
        idx = list(range(n))
        while idx:
            piv = next((i for i in idx if A[i][i] != 0), None)
            if piv is None:
                # find an off-diagonal entry and rotate it onto the diagonal
                pair = next(((i, j) for i in idx for j in idx if i != j and A[i][j] != 0), None)
                if pair is None:
                    break  # remaining block is zero (degenerate)
                i, j = pair
                for k in range(n):
                    A[i][k] += A[j][k]
                for k in range(n):
                    A[k][i] += A[k][j]
                piv = i
            d = A[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            idx.remove(piv)
            for i in idx:
                f = A[i][piv] / d
                if f:
                    for k in idx:
                        A[i][k] -= f * A[piv][k]
            for i in idx:
                A[i][piv] = A[piv][i] = Fraction(0)
        return pos, neg

    def discriminant_form(self) -> FiniteQuadraticForm:
        return discriminant_form(self)


def discriminant_form(L: IntegerLattice) -> FiniteQuadraticForm:
    """discr L = L^#/L with the form induced by the inverse Gram matrix."""
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_decomp
    if not L.is_even:
        raise ValueError("lattice must be even")
    if L.rank == 0:
        return FiniteQuadraticForm.trivial()
    G = Matrix(L.gram)
    if G.det() == 0:
        raise ValueError("lattice must be nondegenerate")
    D, U, _ = smith_normal_decomp(G)
    Uinv = U.inv()
    W = Uinv.T * G.inv() * Uinv
    idx = [i for i in range(L.rank) if abs(D[i, i]) != 1]
    orders = [abs(int(D[i, i])) for i in idx]
    vals = [[Fraction(int(W[i, j].p), int(W[i, j].q)) for j in idx] for i in idx]
    return FiniteQuadraticForm(orders, vals)


def gram_of(S: SingularitySet) -> IntegerLattice:
    return IntegerLattice(block_diagonal([root_gram(t) for t in S.types]))


# closed-form component discriminants ----------------------------------------

@lru_cache(maxsize=None)
def component_form(t: RootType) -> FiniteQuadraticForm:
    """Discriminant form of the negative definite root lattice of type t.

    Generators: A_n the class of the first fundamental weight; D_n (n odd) a
    spinor class s; D_n (n even) the spinor class s and the vector class v;
    E6, E7 a minimal class.
    """
    n = t.n
    F = Fraction
    if t.kind == "A":
        return FiniteQuadraticForm((n + 1,), [[F(-n, n + 1)]], [f"{t}"])
    if t.kind == "D":
        if n % 2:
            return FiniteQuadraticForm((4,), [[F(-n, 4)]], [f"{t}.s"])
        return FiniteQuadraticForm((2, 2), [[F(-n, 4), F(1, 2)], [F(1, 2), F(-1)]],
                                   [f"{t}.s", f"{t}.v"])
    if n == 6:
        return FiniteQuadraticForm((3,), [[F(-4, 3)]], ["E6"])
    if n == 7:
        return FiniteQuadraticForm((2,), [[F(-3, 2)]], ["E7"])
    return FiniteQuadraticForm.trivial()


def ngens_of(t: RootType) -> int:
    return component_form(t).ngens


def coset_min_norm(t: RootType, c) -> Fraction:
    """min |v^2| over the dual coset labelled by the class coordinates c."""
    n = t.n
    c = tuple(c)
    if t.kind == "A":
        k = c[0] % (n + 1)
        return Fraction(k * (n + 1 - k), n + 1)
    if t.kind == "D":
        if n % 2:
            j = c[0] % 4
            return [Fraction(0), Fraction(n, 4), Fraction(1), Fraction(n, 4)][j]
        a, b = c[0] % 2, c[1] % 2
        if (a, b) == (0, 0):
            return Fraction(0)
        return Fraction(1) if a == 0 else Fraction(n, 4)
    if n == 8 or not any(x % m for x, m in zip(c, component_form(t).orders)):
        return Fraction(0)
    return Fraction(4, 3) if n == 6 else Fraction(3, 2)


def sym_generators_of(t: RootType) -> list[tuple[str, tuple]]:
    """Nontrivial Dynkin symmetries of one component, as images of its generators."""
    if t.kind == "A" and t.n >= 2:
        return [(f"-id[{t}]", ((t.n,),))]
    if t.kind == "E" and t.n == 6:
        return [("-id[E6]", ((2,),))]
    if t.kind == "D":
        if t.n % 2:
            return [(f"-id[{t}]", ((3,),))]
        gens = [(f"s<->c[{t}]", ((1, 1), (0, 1)))]
        if t.n == 4:
            gens.append((f"s<->v[{t}]", ((0, 1), (1, 0))))
        return gens
    return []


@dataclass
class Layout:
    """Coordinates of each component inside discr(S) (+ the class h/2 last)."""

    S: SingularitySet
    offsets: list
    form: FiniteQuadraticForm
    with_h: bool

    def block(self, i: int) -> range:
        o = self.offsets[i]
        return range(o, o + ngens_of(self.S.types[i]))

    @property
    def h_index(self) -> int | None:
        return self.form.ngens - 1 if self.with_h else None


@lru_cache(maxsize=None)
def layout(S: SingularitySet, with_h: bool = True) -> Layout:
    S = S.plain()
    forms, offsets, off = [], [], 0
    for t in S.types:
        offsets.append(off)
        F = component_form(t)
        forms.append(F)
        off += F.ngens
    if with_h:
        forms.append(FiniteQuadraticForm((2,), [[Fraction(1, 2)]], ["h"]))
    return Layout(S, offsets, orthogonal_sum(*forms), with_h)


def discr_form(S: SingularitySet, with_h: bool = False) -> FiniteQuadraticForm:
    return layout(S, with_h).form


def total_min_norm(S: SingularitySet, x, lay: Layout | None = None) -> Fraction:
    lay = lay or layout(S.plain(), True)
    tot = Fraction(0)
    for i, t in enumerate(lay.S.types):
        blk = lay.block(i)
        if len(blk):
            tot += coset_min_norm(t, [x[j] for j in blk])
    return tot


def sym_prime_generators(S: SingularitySet, with_h: bool = True) -> list[tuple[str, FqfAutomorphism]]:
    """Generators of Im[d: O(S) -> Aut discr S] (extended by the identity on h/2)."""
    lay = layout(S.plain(), with_h)
    F = lay.form
    types = lay.S.types
    out = []
    base = [F.gen(i) for i in range(F.ngens)]
    for i, t in enumerate(types):
        blk = list(lay.block(i))
        for label, imgs in sym_generators_of(t):
            images = list(base)
            for g, img in zip(blk, imgs):
                v = [0] * F.ngens
                for j, a in zip(blk, img):
                    v[j] = a
                images[g] = tuple(v)
            out.append((f"{label}#{i}", FqfAutomorphism(F, images)))
    # transpositions of consecutive isomorphic components (they generate all permutations)
    for i in range(len(types) - 1):
        t = types[i]
        if types[i + 1] != t or t == RootType("E", 8):
            continue
        b1, b2 = list(lay.block(i)), list(lay.block(i + 1))
        images = list(base)
        for g1, g2 in zip(b1, b2):
            images[g1], images[g2] = F.gen(g2), F.gen(g1)
        out.append((f"swap[{t}]#{i},{i + 1}", FqfAutomorphism(F, images)))
    return out


# perturbations (induced subgraphs of Dynkin diagrams) -----------------------

def _A(n):
    return RootType("A", n)


@lru_cache(maxsize=None)
def _path_subgraphs(n: int) -> frozenset:
    """Multisets (sorted tuples of RootType) of induced subgraphs of a path on n vertices."""
    out = {()}
    if n <= 0:
        return frozenset(out)
    # first included vertex starts a run of length r (then a gap or the end)
    for start in range(n):
        for r in range(1, n - start + 1):
            rest_start = start + r + 1
            for tail in _path_subgraphs(max(0, n - rest_start)):
                out.add(tuple(sorted((_A(r),) + tail)))
    return frozenset(out)


def _arm_types(k: int) -> RootType | None:
    return _A(k) if k > 0 else None


@lru_cache(maxsize=None)
def component_subgraphs(t: RootType) -> frozenset:
    """Types of all induced subgraphs of the Dynkin diagram of t."""
    if t.kind == "A":
        return _path_subgraphs(t.n)
    if t.kind == "D" and t.n > 8:
        return _d_subgraphs(t.n)
    # brute force over vertex subsets
    edges = dynkin_edges(t)
    out = set()
    for mask in range(1 << t.n):
        verts = [i for i in range(t.n) if mask >> i & 1]
        out.add(tuple(sorted(classify_graph(verts, edges))))
    return frozenset(out)


def _d_subgraphs(n: int) -> frozenset:
    b = n - 3  # branch vertex; path 0..n-3, leaves n-2, n-1 attached to b
    out = set()
    # branch excluded: leaves are isolated, path 0..b-1 arbitrary
    for tail in _path_subgraphs(b):
        for leaves in range(3):
            out.add(tuple(sorted(tail + (_A(1),) * leaves)))
    # branch included with a run i..b of length L = b - i + 1
    for L in range(1, b + 2):
        rest = b + 1 - L - 1  # vertices 0..i-2
        for nl in range(3):
            if nl == 2:
                comp = RootType("D", L + 2) if L >= 2 else _A(3)
            else:
                comp = _A(L + nl)
            for tail in _path_subgraphs(max(0, rest)):
                out.add(tuple(sorted(tail + (comp,))))
    return frozenset(out)


def classify_graph(verts, edges) -> list[RootType]:
    """ADE types of the components of the subgraph induced on verts."""
    vs = set(verts)
    adj = {v: [] for v in vs}
    for a, b in edges:
        if a in vs and b in vs:
            adj[a].append(b)
            adj[b].append(a)
    seen, out = set(), []
    for v in sorted(vs):
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(_tree_type({x: [y for y in adj[x]] for x in comp}))
    return out


def _tree_type(adj: dict) -> RootType:
    n = len(adj)
    branch = [v for v, nb in adj.items() if len(nb) >= 3]
    if not branch:
        return _A(n)
    if len(branch) > 1 or len(adj[branch[0]]) > 3:
        raise ValueError("not an ADE diagram")
    b = branch[0]
    arms = []
    for start in adj[b]:
        length, prev, cur = 1, b, start
        while True:
            nxt = [y for y in adj[cur] if y != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return RootType("D", n)
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return RootType("E", n)
    raise ValueError("not an ADE diagram")


def perturbations(S: SingularitySet, include_empty: bool = False) -> set[SingularitySet]:
    """All sets whose Dynkin graph is an induced subgraph of that of S."""
    combos = {()}
    for t, m in sorted(S.plain().counts().items()):
        per = _multi_component(t, m)
        combos = {tuple(sorted(a + b)) for a in combos for b in per}
    out = {SingularitySet(c) for c in combos}
    if not include_empty:
        out.discard(SingularitySet(()))
    return out


@lru_cache(maxsize=None)
def _multi_component(t: RootType, m: int) -> frozenset:
    subs = sorted(component_subgraphs(t))
    out = set()
    for choice in itertools.combinations_with_replacement(range(len(subs)), m):
        out.add(tuple(sorted(itertools.chain.from_iterable(subs[i] for i in choice))))
    return frozenset(out)


def degenerates_to(S1: SingularitySet, S2: SingularitySet) -> bool:
    """True iff the Dynkin graph of S1 is an induced subgraph of that of S2."""
    S1, S2 = S1.plain(), S2.plain()
    if S1.mu > S2.mu:
        return False
    return _distribute(tuple(S1.types), tuple(S2.types))


def _distribute(need: tuple, avail: tuple) -> bool:
    """Can the components ``need`` be split into groups, one per available component?"""
    if not need:
        return True
    if not avail:
        return False
    if sum(t.n for t in need) > sum(t.n for t in avail):
        return False
    first, rest = avail[0], avail[1:]
    subs = component_subgraphs(first)
    cn = Counter(need)
    tried = set()
    for sub in subs:
        cs = Counter(sub)
        if cs - cn:
            continue
        if sub in tried:
            continue
        tried.add(sub)
        remaining = tuple(sorted((cn - cs).elements()))
        if _distribute(remaining, rest):
            return True
    return False


def dynkin_graph(S: SingularitySet):
    """Vertices (component index, node) and edges of the Dynkin graph."""
    import networkx as nx
    G = nx.Graph()
    for ci, t in enumerate(S.plain().types):
        for v in range(t.n):
            G.add_node((ci, v))
        for a, b in dynkin_edges(t):
            G.add_edge((ci, a), (ci, b))
    return G


def degeneration_classes(S1: SingularitySet, S2: SingularitySet) -> int:
    """Number of ways to distribute the components of S1 among those of S2.

    Each component X of S2 receives a sub-multiset realizable as an induced
    subgraph of X; distributions differing by a permutation of isomorphic
    components of S2 are identified.  Distinct vertex placements of the same
    piece inside one component are not distinguished, since root subsystems
    of a fixed type are conjugate there.
    """
    S1, S2 = S1.plain(), S2.plain()
    types2 = S2.types
    found = set()

    def rec(i, remaining: Counter, chosen):
        if i == len(types2):
            if not +remaining:
                found.add(tuple(sorted(Counter(zip(types2, chosen)).items(), key=repr)))
            return
        for sub in component_subgraphs(types2[i]):
            cs = Counter(sub)
            if not cs - remaining:
                rec(i + 1, remaining - cs, chosen + [sub])

    rec(0, Counter(S1.types), [])
    return len(found)


def induced_embeddings(S1: SingularitySet, S2: SingularitySet) -> int:
    """Vertex subsets of the graph of S2 inducing the graph of S1, up to Aut of S2."""
    S1, S2 = S1.plain(), S2.plain()
    types2 = S2.types
    per = []
    for t in types2:
        edges = dynkin_edges(t)
        by_type: dict[tuple, set] = {}
        for mask in range(1 << t.n):
            verts = [i for i in range(t.n) if mask >> i & 1]
            key = tuple(sorted(classify_graph(verts, edges)))
            by_type.setdefault(key, set()).add(_canon_subset(t, mask))
        per.append(by_type)
    found = set()

    def rec(i, remaining: Counter, chosen):
        if i == len(types2):
            if not +remaining:
                found.add(tuple(sorted(Counter(zip(types2, chosen)).items(), key=repr)))
            return
        for key, orbits in per[i].items():
            ck = Counter(key)
            if ck - remaining:
                continue
            for c in orbits:
                rec(i + 1, remaining - ck, chosen + [c])

    rec(0, Counter(S1.types), [])
    return len(found)


def _canon_subset(t: RootType, mask: int) -> int:
    """Canonical representative of a vertex subset under the diagram automorphisms."""
    n = t.n
    perms = [list(range(n))]
    if t.kind == "A" and n > 1:
        perms.append(list(reversed(range(n))))
    elif t.kind == "D":
        sw = list(range(n))
        sw[n - 2], sw[n - 1] = n - 1, n - 2
        perms.append(sw)
        if n == 4:
            perms = [list(p) for p in _d4_perms()]
    elif t.kind == "E" and n == 6:
        perms.append([4, 3, 2, 1, 0, 5])
    best = None
    for p in perms:
        m = 0
        for i in range(n):
            if mask >> i & 1:
                m |= 1 << p[i]
        best = m if best is None else min(best, m)
    return best


def _d4_perms():
    # centre 1, leaves 0, 2, 3
    for leaves in itertools.permutations([0, 2, 3]):
        p = [0] * 4
        p[1] = 1
        for a, b in zip([0, 2, 3], leaves):
            p[a] = b
        yield p


def all_root_types(mu_max: int) -> list[RootType]:
    out = [RootType("E", n) for n in (8, 7, 6) if n <= mu_max]
    out += [RootType("D", n) for n in range(mu_max, 3, -1)]
    out += [RootType("A", n) for n in range(mu_max, 0, -1)]
    return out


def iter_sets(mu_max: int, mu_min: int = 1):
    """All multisets of root types with mu_min <= mu <= mu_max, in canonical order."""
    types = all_root_types(mu_max)

    def rec(start, budget, acc):
        if acc and sum(t.n for t in acc) >= mu_min:
            yield tuple(acc)
        for i in range(start, len(types)):
            t = types[i]
            if t.n <= budget:
                acc.append(t)
                yield from rec(i, budget - t.n, acc)
                acc.pop()

    for tup in rec(0, mu_max, []):
        yield SingularitySet(tup)
