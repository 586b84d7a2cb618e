import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sextics import _kernels, _scan_py
from sextics.fqf import FiniteQuadraticForm as F
from sextics.lattices import IntegerLattice, RootType, iter_sets, parse_set
from sextics.nikulin import (ExtensionKernel, elementary_kernels, embeds_primitively_in_L,
                             good_elements, kernel_candidates, quotient_form, sh_exists, sh_form,
                             sh_genus, torus_admissible, transcendental_genus)


@lru_cache(maxsize=None)
def sets_upto(mu):
    return tuple(iter_sets(mu))


@lru_cache(maxsize=None)
def realized_upto(mu):
    return tuple(S for S in sets_upto(mu) if sh_exists(S))


def test_quotient_by_trivial_kernel():
    Fh = sh_form(parse_set("A4+A2"))
    assert quotient_form(Fh, ExtensionKernel.trivial()) is Fh


def test_six_cusps_kernel():
    S = parse_set("6A2")
    (K,) = kernel_candidates(S, 3)
    Fh = sh_form(S)
    Q = quotient_form(Fh, K)
    assert Q.order == Fh.order // 9
    assert Fh.length(3) - Q.length(3) == 2


def test_six_cusps_good_elements():
    comps, good = good_elements(parse_set("6A2"), 3)
    assert len(comps) == 6
    assert (1, 1, 1, 1, 1, 1) in good and (1, 2, 1, 2, 1, 2) in good
    # three cusps give a coset of minimal norm 2, i.e. a new root
    assert (1, 1, 1, 0, 0, 0) not in good


def test_small_weight_has_no_torus_kernel():
    assert kernel_candidates(parse_set("5A2"), 3) == []
    assert kernel_candidates(parse_set("E6+A5"), 3) == []


def test_4a4_one_orbit():
    assert len(kernel_candidates(parse_set("4A4"), 5)) == 1


def test_even_kernels_rejected():
    with pytest.raises(ValueError):
        kernel_candidates(parse_set("4A4"), 2)


def test_embedding_examples():
    assert embeds_primitively_in_L(sh_genus(parse_set("A1")))
    assert not embeds_primitively_in_L(sh_genus(parse_set("19A1")))
    assert embeds_primitively_in_L(sh_genus(parse_set("2D8")))


def test_transcendental_genera():
    g = transcendental_genus(parse_set("2A9"))
    assert (g.sig_plus, g.sig_minus) == (2, 1)
    assert g.disc.is_isomorphic(F.parse("<2/5>+<2/5>+<1/2>+<1/2>+<3/2>"))
    g = transcendental_genus(parse_set("A7+A6+A5"))
    assert (g.sig_plus, g.sig_minus) == (2, 1)
    assert g.disc.is_isomorphic(F.parse("<7/8>+<6/7>+<4/3>+<3/2>+<3/2>"))
    g = transcendental_genus(parse_set("2D7+2A2"))
    assert g.disc.is_isomorphic(IntegerLattice([[4, 0, 0], [0, -12, 0], [0, 0, 6]]).discriminant_form())


def test_torus_admissible_examples():
    assert torus_admissible(parse_set("(A17)+A2").plain()).admissible
    assert not torus_admissible(parse_set("A1")).admissible
    nine = parse_set("9A2")
    assert not torus_admissible(nine).admissible
    assert elementary_kernels(nine, 3, 3)


def test_fast_existence_agrees_with_general_criterion():
    for S in sets_upto(11):
        assert sh_exists(S) == embeds_primitively_in_L(sh_genus(S)), S


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_fast_existence_agrees_random(data):
    S = data.draw(st.sampled_from(sets_upto(19)[::97]))
    assert sh_exists(S) == embeds_primitively_in_L(sh_genus(S))


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_transcendental_genus_invariants(data):
    S = data.draw(st.sampled_from(realized_upto(18)))
    g = transcendental_genus(S)
    assert g.disc.is_isomorphic(sh_genus(S).disc.negate())
    assert g.disc.brown() == (2 - (19 - S.mu)) % 8
    assert max((g.disc.length(p) for p in (2, 3, 5, 7, 11, 13, 17, 19)), default=0) <= 21 - S.mu


def _torus_sets():
    return [S for S in sets_upto(18) if S.weight in (6, 7) and torus_admissible(S).admissible]


def test_torus_quotient_shortcuts():
    sets = _torus_sets()
    assert sets
    for S in sets:
        K = torus_admissible(S).kernel
        Fh, Q = sh_form(S), quotient_form(sh_form(S), K)
        for p in (2, 5, 7, 11, 13, 17):
            assert Q.length(p) == Fh.length(p) and Q.det_class(p) == Fh.det_class(p)
        assert Q.order * 9 == Fh.order
        # det_3 changes by -9: the unit class flips since -1 is not a square mod 3
        assert Q.det_class(3) == -Fh.det_class(3)
        types = S.types
        special = RootType("A", 17) in types or types.count(RootType("A", 8)) >= 2
        assert Fh.length(3) - Q.length(3) == (1 if special else 2), S


@given(st.lists(st.sampled_from([3, 6, 9, 12, 18]), min_size=1, max_size=7), st.sampled_from([3]))
@settings(max_examples=40, deadline=None)
def test_scan_backends_agree_p3(weights, p):
    assert sorted(_scan_py.scan_cyclic(weights, p)) == _kernels.scan_cyclic(weights, p)


@given(st.lists(st.sampled_from([5, 10, 15]), min_size=1, max_size=5))
@settings(max_examples=30, deadline=None)
def test_scan_backends_agree_p5(weights):
    assert sorted(_scan_py.scan_cyclic(weights, 5)) == _kernels.scan_cyclic(weights, 5)


def test_backend_is_reported():
    assert _kernels.BACKEND in ("cython", "python")


def test_scan_matches_direct_min_norms():
    """Good elements of the scan agree with isotropy plus min norm computed on the form."""
    from sextics.lattices import layout, total_min_norm
    from sextics.nikulin import _kernel_coords
    for spec, p in [("6A2", 3), ("E6+A5+3A2", 3), ("A8+3A2", 3), ("4A4", 5), ("3A6", 7), ("A11+A5+2A2", 3)]:
        S = parse_set(spec)
        comps, good = good_elements(S, p)
        lay = layout(S, True)
        Fh = lay.form
        for a in itertools.product(range(p), repeat=len(comps)):
            if not any(a):
                continue
            x = _kernel_coords(S, p, comps, a)
            ok = Fh.qnum(x) == 0 and all(total_min_norm(S, Fh.mul(t, x), lay) != 2 for t in range(1, p))
            assert ok == (a in good), (spec, a)


def test_pure_python_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, SEXTICS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from sextics import _kernels; print(_kernels.BACKEND,"
                          " _kernels.scan_cyclic([3] * 6, 3) == sorted(_kernels._scan_py.scan_cyclic([3] * 6, 3)))"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "True"]
