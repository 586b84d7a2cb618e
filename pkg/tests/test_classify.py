from pathlib import Path

import pytest

from sextics import classify as cl
from sextics import mm
from sextics.lattices import RootType, parse_set
from sextics.nikulin import sh_exists, transcendental_genus

P = parse_set

ASYMMETRIC = ["3A6", "D6+2A6", "D5+2A6+A1", "2A6+2A3", "E8+2A5", "E6+A11+A1", "E7+E6+A5", "E6+A7+A5",
              "E6+A6+A5+A1", "E6+2A5+A1", "E7+A7+A4", "2A7+A4"]


@pytest.mark.parametrize("spec,comps", [("A1", (1, 0)), ("2A9", (2, 0)), ("E6+A11+A1", (0, 1)),
                                        ("A7+A6+A5", (1, 0)), ("3A4+3A2", (1, 0)), ("E6+2A4+2A2", (1, 0)),
                                        ("3A6", (0, 1))])
def test_nonspecial_components(spec, comps):
    rep = cl.classify(P(spec))
    assert rep.realized and rep.components == comps


def test_not_realized():
    assert not cl.classify(P("19A1")).realized
    assert not cl.classify(P("2A10")).realized


def test_maximizing_answers_from_table():
    rep = cl.classify(P("A19"))
    assert rep.realized and "maximizing: reference data" in rep.notes
    assert not cl.classify(P("A18+A1+A1+A1")).realized


@pytest.mark.parametrize("spec", ASYMMETRIC)
def test_asymmetric_types(spec):
    rep = cl.classify(P(spec))
    assert rep.records and not any(r.symmetric for r in rep.records)
    assert rep.components == (0, 1)
    assert {r.real_curve for r in rep.records} == {"no"}


@pytest.mark.parametrize("spec", ["A7+A6+A5", "2D7+2A2", "2A9", "A1", "3A4+3A2", "2A6+2A2+2A1"])
def test_symmetric_types(spec):
    rep = cl.classify(P(spec))
    assert all(r.symmetric for r in rep.records)


def test_realness():
    assert {r.real_curve for r in cl.classify(P("A7+A6+A5")).records} == {"no"}
    assert {r.real_curve for r in cl.classify(P("2A9")).records} == {"yes"}
    assert {r.real_curve for r in cl.classify(P("A1")).records} == {"yes"}


def test_square_two_vectors():
    F_ok = [row["set_spec"] for row in cl.reference_rows("nonreal.tsv") if row["square_two"]]
    assert len(F_ok) == 8
    for spec in F_ok:
        assert cl.square_two_vector(P(spec)) is not None, spec
    assert cl.square_two_vector(P("A7+A6+A5")) is None


@pytest.mark.parametrize("spec,group", [("3E6", "[3E6]"), ("3A4+3A2", "[3A4]+[3A2]"),
                                        ("2A9", "2A9"), ("A4+A2", "A4+A2")])
def test_monodromy(spec, group):
    assert cl.monodromy_group(P(spec)) == group


def test_dperp_image_of_exceptional_sets():
    for spec in ["E6+2A4+2A2", "2A7+2A2", "2A6+2A2+2A1"]:
        S = P(spec)
        E = mm.e_group(transcendental_genus(S))
        assert cl.dperp_image(S, E)["order"] == 2
    S = P("2A9")
    E = mm.e_group(transcendental_genus(S))
    assert cl.dperp_image(S, E)["order"] == 1
    assert all(E.quotient.reduce(v) == 0 for _, v in cl._generator_images(S, E))


def test_torus():
    rep = cl.classify(P("6A2"), "3")
    assert rep.realized and rep.components == (1, 0)
    assert str(rep.S) == "(6A2)"
    assert not cl.classify(P("A1"), "3").realized
    rep = cl.classify(P("(E6+A8+A2)+A2+A1"), "3")
    assert rep.realized and rep.components == (1, 1)
    rep = cl.classify(P("(A17)+A2"), "3")
    assert rep.realized and rep.components == (1, 0)


def test_special_families():
    assert cl.classify(P("2A9"), "5").realized
    assert cl.classify(P("3A6"), "7").realized
    assert cl.classify(P("9A2"), "3-3-3").realized
    assert not cl.classify(P("9A2"), "3-3").realized
    assert cl.classify(P("E6+6A2"), "3-3").realized
    assert not cl.classify(P("A4+A2"), "5").realized


def test_unknown_family():
    with pytest.raises(ValueError):
        cl.classify(P("A1"), "4")


def test_enumerate_small():
    assert [str(r.S) for r in cl.enumerate_all(1)] == ["A1"]
    assert sorted(str(r.S) for r in cl.enumerate_all(2)) == ["2A1", "A1", "A2"]
    assert [str(r.S) for r in cl.enumerate_all(1, include_empty=True)] == ["0", "A1"]
    with pytest.raises(ValueError):
        list(cl.enumerate_all(20))


def test_enumerate_parallel_matches_serial():
    a = [r.as_dict() for r in cl.enumerate_all(6)]
    b = [r.as_dict() for r in cl.enumerate_all(6, jobs=2)]
    assert a == b


def test_as_dict():
    d = cl.classify(P("2A9")).as_dict()
    assert d["set"] == "2A9" and (d["r"], d["c"]) == (2, 0) and d["real_curve"] == ["yes"]


def test_nonspecial_sets_all_realized_components_positive(ns_reports):
    assert len(ns_reports) == 2996
    for rep in ns_reports.values():
        assert rep.n_components >= 1
        assert len(rep.records) >= 1
    asym = {s for s, rep in ns_reports.items() if any(not r.symmetric for r in rep.records)}
    assert asym == set(ASYMMETRIC)


def test_torus_has_trivial_e(torus_reports):
    assert len(torus_reports) == 105
    for rep in torus_reports.values():
        (rec,) = rep.records
        assert mm.e_group(rec.tgenus).order == 1


def test_data_dir_override(tmp_path):
    src = Path(cl.__file__).parent / "data"
    for f in src.glob("*.tsv"):
        (tmp_path / f.name).write_text(f.read_text())
    path = tmp_path / "maximizing_ns.tsv"
    text = path.read_text().replace("A19\t2\t0", "A19\t0\t1")
    assert text != path.read_text()
    path.write_text(text)
    try:
        cl.set_data_dir(tmp_path)
        assert cl.classify(P("A19")).components == (0, 1)
    finally:
        cl.set_data_dir(None)
    assert cl.classify(P("A19")).components == (2, 0)


def test_sextic_exists_matches_any_record(ns_reports):
    for spec in ["A1", "2A9", "E6+A11+A1"]:
        assert sh_exists(P(spec)) and spec in ns_reports
    assert "19A1" not in ns_reports


def test_sign_generator_counts_without_orientation(ns_reports):
    a4 = [rep for rep in ns_reports.values() if RootType("A", 4) in rep.S.types]
    assert sum(cl.sign_generator_prime(rep.records[0].tgenus, 5, plus=False) for rep in a4) == 32


def test_five_special_sets_also_nonspecial(ns_reports):
    both = {str(r.S) for r in cl.enumerate_all(19, "5")} & set(ns_reports)
    assert both == {"2A9", "A9+2A4+A1", "A9+2A4", "4A4+A1", "4A4"}
    assert "3A6" in ns_reports and "3A6+A1" not in ns_reports
