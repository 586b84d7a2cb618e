"""Comparison of computed classification results with the shipped reference tables."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .classify import _real_perturbations, enumerate_all, reference_rows
from .lattices import parse_set

TABLES = ("disconnected", "group", "nonreal")


@dataclass
class TableDiff:
    table: str
    matched: int = 0
    mismatches: list = field(default_factory=list)  # (set, expected, computed)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {"table": self.table, "matched": self.matched, "ok": self.ok,
                "mismatches": [{"set": s, "expected": e, "computed": c} for s, e, c in self.mismatches]}


@lru_cache(maxsize=4)
def nonspecial_reports(jobs: int = 1) -> tuple:
    return tuple(enumerate_all(18, "ns", jobs=jobs))


def _compare(name: str, expected: dict, computed: dict) -> TableDiff:
    diff = TableDiff(name)
    for key in sorted(set(expected) | set(computed)):
        e, c = expected.get(key), computed.get(key)
        if e == c:
            diff.matched += 1
        else:
            diff.mismatches.append((key, e, c))
    return diff


def verify_disconnected(reports) -> TableDiff:
    """Sets whose stratum is not a single real component, or has no real curve."""
    expected = {r["set_spec"]: (int(r["r"]), int(r["c"])) for r in reference_rows("disconnected.tsv")}
    expected = {str(parse_set(k)): v for k, v in expected.items()}
    computed = {}
    for rep in reports:
        no_real = any(rec.real_curve == "no" for rec in rep.records)
        if rep.components != (1, 0) or no_real:
            computed[str(rep.S)] = tuple(rep.components)
    return _compare("disconnected", expected, computed)


def verify_group(reports) -> TableDiff:
    """Sets whose monodromy group is a proper subgroup of the full symmetry group."""
    expected = {str(parse_set(r["set_spec"])): r["monodromy"] for r in reference_rows("monodromy.tsv")}
    computed = {str(rep.S): rep.monodromy for rep in reports
                if rep.monodromy is not None and "[" in rep.monodromy}
    return _compare("group", expected, computed)


def verify_nonreal(reports) -> TableDiff:
    """Sets not obtainable by an equivariant perturbation of a real maximizing curve."""
    expected = {str(parse_set(r["set_spec"])): r.get("square_two") == "yes" for r in reference_rows("nonreal.tsv")}
    real = _real_perturbations()
    from .classify import square_two_vector
    computed = {}
    for rep in reports:
        if rep.S.plain() in real:
            continue
        symmetric = any(rec.symmetric for rec in rep.records)
        computed[str(rep.S)] = symmetric and square_two_vector(rep.S) is not None
    return _compare("nonreal", expected, computed)


def verify_tables(tables=TABLES, jobs: int = 1) -> list[TableDiff]:
    reports = nonspecial_reports(jobs)
    fns = {"disconnected": verify_disconnected, "group": verify_group, "nonreal": verify_nonreal}
    return [fns[t](reports) for t in tables]
