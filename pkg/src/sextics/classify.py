"""End-to-end classification: realizability, components, symmetry, realness, monodromy."""
from __future__ import annotations

import csv
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import mm
from .fqf import FqfAutomorphism
from .lattices import (RootType, SingularitySet, _multi_component, component_subgraphs, iter_sets,
                       parse_set, sym_prime_generators)
from .nikulin import (ExtensionKernel, GenusDescriptor, elementary_kernels, embeds_primitively_in_L,
                      extension_exists, kernel_candidates, sh_form, sh_genus,
                      torsion_components, torus_admissible, transcendental_genus)

FAMILIES = ("ns", "3", "3-3", "3-3-3", "5", "7")
REAL_STATES = ("yes", "no", "undetermined")


class InvariantViolation(AssertionError):
    """A computed value contradicts a structural fact the pipeline relies on."""


# reference data -------------------------------------------------------------

_DATA_DIR: Path | None = None


def set_data_dir(path) -> None:
    """Read reference tables from ``path`` instead of the packaged copies."""
    global _DATA_DIR
    _DATA_DIR = Path(path) if path else None
    for f in (reference_rows, maximizing_table, _real_perturbations, manual_overrides):
        f.cache_clear()


@lru_cache(maxsize=None)
def reference_rows(name: str) -> tuple[dict, ...]:
    if _DATA_DIR is not None:
        text = (_DATA_DIR / name).read_text(encoding="utf-8")
    else:
        text = resources.files("sextics").joinpath("data", name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return tuple(dict(r) for r in csv.DictReader(lines, delimiter="\t"))


@dataclass(frozen=True)
class MaximizingEntry:
    S: SingularitySet
    r: int
    c: int
    conj_pairs: tuple  # RootTypes with one pair of points swapped by the real structure


def _parse_pairs(text: str) -> tuple:
    out = []
    for tok in filter(None, (text or "").split(",")):
        out.extend(parse_set(tok).counts())
    return tuple(out)


@lru_cache(maxsize=None)
def maximizing_table(family: str) -> dict:
    name = {"ns": "maximizing_ns.tsv", "3": "maximizing_torus.tsv"}[family]
    out = {}
    for row in reference_rows(name):
        S = parse_set(row["set_spec"])
        out[S.plain()] = MaximizingEntry(S, int(row["r"]), int(row["c"]),
                                         _parse_pairs(row.get("conj_pair_markers", "")))
    return out


@lru_cache(maxsize=None)
def manual_overrides() -> dict:
    out: dict = {}
    for row in reference_rows("manual_overrides.tsv"):
        out.setdefault(parse_set(row["set_spec"]), {})[row["field"]] = row["value"]
    return out


# records --------------------------------------------------------------------

@dataclass
class HomologicalTypeRecord:
    S: SingularitySet
    kernel: ExtensionKernel
    tgenus: GenusDescriptor | None
    component_class: int
    symmetric: bool
    real_curve: str = "undetermined"


@dataclass
class ClassificationReport:
    S: SingularitySet
    family: str
    realized: bool
    components: tuple = (0, 0)
    monodromy: str | None = None
    notes: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def n_components(self) -> int:
        r, c = self.components
        return r + 2 * c

    def as_dict(self) -> dict:
        return {
            "set": str(self.S),
            "family": self.family,
            "realized": self.realized,
            "r": self.components[0],
            "c": self.components[1],
            "monodromy": self.monodromy,
            "real_curve": sorted({rec.real_curve for rec in self.records}),
            "notes": list(self.notes),
        }


# the map d-perp and the symmetry test ---------------------------------------

def transported_generators(S: SingularitySet, g: GenusDescriptor):
    """Generators of Im d on discr S_h, acting with the same matrices on T = -discr S_h."""
    T = g.disc
    return [(label, FqfAutomorphism(T, a.images)) for label, a in sym_prime_generators(S.plain())]


def _generator_images(S: SingularitySet, E: mm.EModule):
    return [(label, E.of_automorphism(a)) for label, a in transported_generators(S, E.genus)]


def dperp_image(S: SingularitySet, E: mm.EModule) -> dict:
    """Subgroup of E generated by the images of O(S): its order and the generator images."""
    imgs = _generator_images(S, E) if E.order > 1 else []
    return {"order": E.span_order([v for _, v in imgs]), "images": imgs}


def _symmetric(S: SingularitySet, g: GenusDescriptor) -> bool:
    if not mm.sigma_tilde_total(g) <= mm.GAMMA0_MM:
        return True
    Ep = mm.e_plus_group(g)
    if Ep.order == 1:
        return False
    imgs = [v for _, v in _generator_images(S, Ep)]
    E = mm.e_group(g)
    # e_+ and e share coordinates; look for v in span(imgs) with e(v) = 0 and v != 0 in E_+
    span = {0}
    for v in imgs:
        span |= {Ep.quotient.reduce(s ^ v) for s in span}
    return any(s and E.quotient.reduce(s) == 0 for s in span)


def is_symmetric(rec: HomologicalTypeRecord) -> bool:
    return _symmetric(rec.S, rec.tgenus)


# realness -------------------------------------------------------------------

def _invariant_perturbations(entry: MaximizingEntry) -> set:
    """Perturbations invariant under the swap of the marked pairs (identity elsewhere)."""
    counts = entry.S.plain().counts()
    combos = {()}
    for t, m in sorted(counts.items()):
        pairs = sum(1 for p in entry.conj_pairs if p == t)
        free = m - 2 * pairs
        opts = set(_multi_component(t, free)) if free else {()}
        subs = sorted(component_subgraphs(t))
        for _ in range(pairs):
            opts = {tuple(sorted(o + s + s)) for o in opts for s in subs}
        combos = {tuple(sorted(a + b)) for a in combos for b in opts}
    return {SingularitySet(c) for c in combos}


@lru_cache(maxsize=None)
def _real_perturbations() -> frozenset:
    out = set()
    for entry in maximizing_table("ns").values():
        if entry.r > 0:
            out |= _invariant_perturbations(entry)
    return frozenset(out)


def square_two_vector(S: SingularitySet) -> tuple | None:
    """An order-2 element alpha of discr S_h with q = -1/2 mod 2 whose gluing to <1/2> embeds in L.

    Such a gluing gives a vector a of square 2 in the transcendental lattice;
    the reflection in a is then an involutive orientation reversing
    automorphism of the homological type.
    """
    from .fqf import FiniteQuadraticForm, orthogonal_sum
    F = sh_form(S)
    G = orthogonal_sum(F, FiniteQuadraticForm.cyclic(2, "1/2"))
    beta = tuple([0] * F.ngens + [1])
    for x in F.torsion(2):
        if not any(x) or (F.q(x) + Fraction(1, 2)) % 2 != 0:
            continue
        glue = tuple(x) + (0,)
        glue = G.add(glue, beta)
        Q = G.orthogonal_quotient([glue])
        if embeds_primitively_in_L(GenusDescriptor(2, S.mu, Q)):
            return tuple(x)
    return None


def realness_report(rec: HomologicalTypeRecord) -> str:
    if not rec.symmetric:
        return "no"
    S = rec.S.plain()
    override = manual_overrides().get(S, {}).get("real_curve")
    if S in _real_perturbations():
        return "yes"
    if square_two_vector(S) is not None:
        return "yes"
    return override or "undetermined"


# monodromy ------------------------------------------------------------------

def _transposition_types(S: SingularitySet) -> list:
    return [t for t, m in sorted(S.counts().items()) if m >= 2 and t != RootType("E", 8)]


def monodromy_group(S: SingularitySet) -> str:
    """The permutation group S_+ in bracket notation.

    A permutation of the singular points lies in S_+ iff its restriction to
    the points inside each bracket is even.
    """
    S = S.plain()
    if S.mu > 18:
        raise mm.UnsupportedCase("maximizing sets are answered from reference data")
    g = transcendental_genus(S)
    Ep = mm.e_plus_group(g)
    types = _transposition_types(S)
    if Ep.order == 1 or not types:
        return str(S)
    imgs = _generator_images(S, Ep)
    comp = [v for label, v in imgs if not label.startswith("swap")]
    swaps = {}
    for label, v in imgs:
        if label.startswith("swap"):
            swaps[parse_set(label[label.index("[") + 1:label.index("]")]).types[0]] = v
    # row space of the map F_2^types -> E_+/<comp>: minimal supports give the brackets
    q = mm.F2Quotient(Ep.quotient.n, list(Ep.quotient.rows) + comp)
    vecs = [q.reduce(swaps[t]) for t in types]
    kernel = [mask for mask in range(1, 1 << len(types))
              if q.reduce(_xor(vecs[i] for i in range(len(types)) if mask >> i & 1)) == 0]
    brackets = _brackets(len(types), kernel)
    if not brackets:
        return str(S)
    counts = S.counts()
    used = Counter()
    parts = []
    for b in brackets:
        sub = SingularitySet(tuple(itertools.chain.from_iterable([types[i]] * counts[types[i]] for i in b)))
        used.update(sub.counts())
        parts.append(f"[{sub}]")
    rest = SingularitySet(tuple((counts - used).elements()))
    return "+".join(parts + ([str(rest)] if rest.types else []))


def sign_generator_prime(g: GenusDescriptor, p: int, plus: bool = True) -> bool:
    """True if E_+(T) = E_+^p(T) has order 2, with p the only irregular prime or one of two.

    For such T the symmetry of a point whose discriminant is p-primary
    maps to the generator -1 of E_+(T).  With ``plus=False`` the same
    question for E(T).
    """
    try:
        L = mm.LemmaData.of(g)
    except mm.UnsupportedCase:
        return False
    nontrivial = L.ep_plus_nontrivial(p) if plus else L.ep_nontrivial(p)
    if p not in L.primes or not nontrivial:
        return False
    return len(L.primes) == 1 or L.order(plus) == 2


def _xor(vs) -> int:
    v = 0
    for x in vs:
        v ^= x
    return v


def _brackets(k: int, kernel) -> list:
    """Disjoint supports whose parity constraints cut out the kernel, or raise."""
    kernel_set = set(kernel) | {0}
    # the annihilator of the kernel inside F_2^k
    annihilator = [f for f in range(1, 1 << k)
                   if all(bin(f & v).count("1") % 2 == 0 for v in kernel_set)]
    minimal = [f for f in annihilator if not any(g != f and g & f == g for g in annihilator)]
    minimal.sort(key=lambda f: [i for i in range(k) if f >> i & 1])
    union = 0
    for f in minimal:
        if f & union:
            raise mm.UnsupportedCase("the parity constraints do not split into disjoint brackets")
        union |= f
    return [[i for i in range(k) if f >> i & 1] for f in minimal]


# classifiers ----------------------------------------------------------------

def classify_nonspecial(S: SingularitySet) -> ClassificationReport:
    S = S.plain()
    if S.mu == 19:
        entry = maximizing_table("ns").get(S)
        if entry is None:
            return ClassificationReport(S, "ns", False, notes=["maximizing: reference data"])
        return ClassificationReport(S, "ns", True, (entry.r, entry.c), notes=["maximizing: reference data"])
    if S.mu > 19:
        return ClassificationReport(S, "ns", False)
    if not embeds_primitively_in_L(sh_genus(S)):
        return ClassificationReport(S, "ns", False)
    g = transcendental_genus(S)
    E = mm.e_group(g)
    img = dperp_image(S, E)
    n = E.order // img["order"]
    symmetric = _symmetric(S, g)
    records = []
    for k in range(n):
        rec = HomologicalTypeRecord(S, ExtensionKernel.trivial(), g, k, symmetric)
        rec.real_curve = realness_report(rec)
        records.append(rec)
    notes = []
    if E.order > 1:
        notes.append(f"E(T) of order {E.order}, irregular primes {E.primes}")
    if n > 1:
        notes.append(f"Coker d-perp of order {n}")
    comps = (n, 0) if symmetric else (0, n)
    return ClassificationReport(S, "ns", True, comps, monodromy_group(S), notes, records)


def classify_torus(S: SingularitySet) -> ClassificationReport:
    P = S.plain()
    if P.mu == 19:
        entry = maximizing_table("3").get(P)
        if entry is None:
            return ClassificationReport(P, "3", False, notes=["maximizing: reference data"])
        return ClassificationReport(entry.S, "3", True, (entry.r, entry.c),
                                    notes=["maximizing: reference data"])
    if P.mu > 19:
        return ClassificationReport(P, "3", False)
    verdict = torus_admissible(P)
    if not verdict.admissible:
        return ClassificationReport(P, "3", False)
    K = verdict.kernel
    if not extension_exists(P, K):
        return ClassificationReport(P, "3", False)
    g = transcendental_genus(P, K)
    E = mm.e_group(g)
    if E.order != 1:
        raise InvariantViolation(f"E(T) != 0 for the torus type {P}")
    comps = torsion_components(P, 3)
    inner = tuple(P.types[i] for (i, _), ai in zip(comps, K.extra["torsion"]) if ai)
    marked = SingularitySet(P.types, inner)
    rec = HomologicalTypeRecord(marked, K, g, 0, True, "yes")
    return ClassificationReport(marked, "3", True, (1, 0), None, [], [rec])


def _special_kernels(S: SingularitySet) -> list:
    out = []
    for n in (5, 7):
        for K in kernel_candidates(S, n):
            out.append(((n,), K))
    if S.weight >= 8:
        out += [((3, 3), K) for K in elementary_kernels(S, 3, 2)]
    if S.weight >= 9:
        out += [((3, 3, 3), K) for K in elementary_kernels(S, 3, 3)]
    return out


def classify_special_kernels(S: SingularitySet) -> list[tuple[tuple, bool]]:
    """(kernel signature, realized) for the kernels of the dihedral-special families."""
    S = S.plain()
    if S.mu > 19:
        return []
    return [(sig, extension_exists(S, K)) for sig, K in _special_kernels(S)]


def _family_of(sig: tuple) -> str:
    return "-".join(str(n) for n in sig)


def classify_special(S: SingularitySet, family: str) -> ClassificationReport:
    S = S.plain()
    realized = any(_family_of(sig) == family and ok for sig, ok in classify_special_kernels(S))
    if family == "3-3" and realized:
        # sets carrying a (Z/3)^3 kernel belong to the larger family
        realized = not any(sig == (3, 3, 3) and ok for sig, ok in classify_special_kernels(S))
    return ClassificationReport(S, family, realized, notes=["components not computed"])


def classify(S: SingularitySet, family: str = "ns") -> ClassificationReport:
    if family == "ns":
        return classify_nonspecial(S)
    if family == "3":
        return classify_torus(S)
    if family in FAMILIES:
        return classify_special(S, family)
    raise ValueError(f"unknown family {family!r}")


def _worker(args):
    S, family = args
    return classify(S, family)


def enumerate_all(mu_max: int, family: str = "ns", include_empty: bool = False, jobs: int = 1,
                  realized_only: bool = True):
    """Classification reports for all sets with mu <= mu_max, in canonical order."""
    if mu_max > 19:
        raise ValueError("mu_max must be at most 19")
    sets = list(iter_sets(mu_max))
    if include_empty:
        sets.insert(0, SingularitySet(()))
    sets.sort(key=str)
    todo = [(S, family) for S in sets]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            reports = pool.map(_worker, todo, chunksize=32)
            for rep in reports:
                if rep.realized or not realized_only:
                    yield rep
        return
    for item in todo:
        rep = _worker(item)
        if rep.realized or not realized_only:
            yield rep
