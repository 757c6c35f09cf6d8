"""One-axis convolution calculus for ray sheaves."""
import random
from fractions import Fraction

import pytest

from conepersist.cone import ConeSpec, GaugeSpec
from conepersist.conv1d import (
    HomPattern,
    RaySheaf,
    antipodal_convolution_support,
    compare_with_interleaving,
    convolution_distance,
    convolve_ball,
    gamma_fixed_check,
    is_c_isomorphic,
    line_cone,
    properness_report,
    to_gamma_module,
)
from conepersist.exactla import FieldMat

from oracles import bottleneck_matching


def _gauge(speed=1):
    return GaugeSpec(line_cone(), (Fraction(speed),))


# -- sheaves and convolution --------------------------------------------------------


def test_ray_sheaf_sorts_births():
    rs = RaySheaf.make(["3", 0, Fraction(1, 2)])
    assert rs.births == (Fraction(0), Fraction(1, 2), Fraction(3))
    assert rs.count == 3


def test_convolve_ball_translates_births():
    rs = RaySheaf.make([0, 1])
    out = convolve_ball(rs, Fraction(1, 2), _gauge(2))
    assert out.births == (Fraction(-1), Fraction(0))
    assert convolve_ball(rs, 0, _gauge()) == rs
    with pytest.raises(ValueError):
        convolve_ball(rs, -1, _gauge())


def test_gauge_must_match_the_working_cone():
    quad = ConeSpec(normals=[(-1, 0), (0, -1)], generators=[(-1, 0), (0, -1)])
    with pytest.raises(ValueError):
        convolve_ball(RaySheaf.make([0]), 1, GaugeSpec(quad, (1, 1)))


def test_antipodal_convolution_support_is_a_full_ray():
    assert antipodal_convolution_support(2, 5) == (Fraction(2), None)
    assert antipodal_convolution_support(2, None) == (Fraction(2), None)
    with pytest.raises(ValueError):
        antipodal_convolution_support(2, 1)


def test_gamma_fixed_check():
    assert gamma_fixed_check(RaySheaf.make([0, 1, 5]))
    assert gamma_fixed_check(RaySheaf.make([]))


def test_properness_orientation():
    lit, mir = properness_report(RaySheaf.make([0, 2]))
    assert (lit, mir) == (False, True)
    assert properness_report(RaySheaf.make([])) == (True, True)


# -- hom patterns -------------------------------------------------------------------


def test_hom_pattern_support():
    src = RaySheaf.make([0, 1])
    dst = RaySheaf.make([0, 5])
    pat = HomPattern.build(src, dst, Fraction(1, 2), _gauge())
    assert pat.allowed == ((True, False), (True, True))
    assert pat.entry_count() == 3
    assert pat.admits(FieldMat.make(2, [[1, 0], [0, 1]]))
    assert not pat.admits(FieldMat.make(2, [[0, 1], [1, 0]]))
    assert pat.has_perfect_matching()
    # the reverse direction has no matching at this relaxation
    rev = HomPattern.build(dst, src, Fraction(1, 2), _gauge())
    assert rev.allowed == ((True, False), (True, False))
    assert not rev.has_perfect_matching()


# -- c-isomorphism ------------------------------------------------------------------


def test_c_isomorphism_frozen():
    a = RaySheaf.make([0])
    b = RaySheaf.make([3])
    assert not is_c_isomorphic(a, b, 2, _gauge())
    assert is_c_isomorphic(a, b, 3, _gauge())
    assert is_c_isomorphic(a, b, Fraction(3, 2), _gauge(2))
    with pytest.raises(ValueError):
        is_c_isomorphic(a, b, -1, _gauge())
    with pytest.raises(ValueError):
        is_c_isomorphic(a, b, 1, _gauge(), method="guess")


def test_c_isomorphism_methods_agree():
    rng = random.Random(77)
    pool = [Fraction(k, 2) for k in range(-4, 8)]
    for _ in range(60):
        m = rng.randint(0, 4)
        src = RaySheaf.make(rng.sample(pool, m))
        dst = RaySheaf.make(rng.sample(pool, m))
        speed = rng.choice((Fraction(1), Fraction(1, 2), Fraction(3)))
        g = GaugeSpec(line_cone(), (speed,))
        for c in (Fraction(0), Fraction(1, 2), Fraction(2), Fraction(13, 2)):
            got_search = is_c_isomorphic(src, dst, c, g, method="search", budget=40)
            got_match = is_c_isomorphic(src, dst, c, g, method="matching")
            assert got_search == got_match


def test_c_isomorphism_count_mismatch_and_empty():
    g = _gauge()
    assert not is_c_isomorphic(RaySheaf.make([0]), RaySheaf.make([0, 1]), 99, g)
    assert is_c_isomorphic(RaySheaf.make([]), RaySheaf.make([]), 0, g)


# -- convolution distance ------------------------------------------------------------


def test_convolution_distance_frozen():
    g = _gauge()
    r = convolution_distance(RaySheaf.make([0]), RaySheaf.make([3]), g)
    assert r.value == 3 and r.attained is True
    r2 = convolution_distance(RaySheaf.make([0, 1]), RaySheaf.make([0, 5]), g)
    assert r2.value == 4 and r2.attained is True
    r3 = convolution_distance(RaySheaf.make([0, 1]), RaySheaf.make([0, 5]), _gauge(2))
    assert r3.value == 2


def test_convolution_distance_degenerate_cases():
    g = _gauge()
    mismatch = convolution_distance(RaySheaf.make([0]), RaySheaf.make([0, 1]), g)
    assert mismatch.value == float("inf")
    empty = convolution_distance(RaySheaf.make([]), RaySheaf.make([]), g)
    assert empty.value == 0 and empty.attained is True


def test_convolution_distance_matches_bottleneck_oracle():
    rng = random.Random(31)
    pool = [Fraction(k, 2) for k in range(-6, 10)]
    for _ in range(80):
        m = rng.randint(0, 4)
        n = m if rng.random() < 0.8 else rng.randint(0, 4)
        src = RaySheaf.make(rng.sample(pool, m))
        dst = RaySheaf.make(rng.sample(pool, n))
        speed = rng.choice((Fraction(1), Fraction(1, 2), Fraction(3)))
        g = GaugeSpec(line_cone(), (speed,))
        got = convolution_distance(src, dst, g).value
        want = bottleneck_matching(src.births, dst.births, speed)
        assert got == want


def test_convolution_distance_is_translation_invariant():
    g = _gauge()
    src = RaySheaf.make([0, 2, 5])
    dst = RaySheaf.make([1, 1, 4])
    d = convolution_distance(src, dst, g).value
    moved = convolve_ball(src, 3, g), convolve_ball(dst, 3, g)
    assert convolution_distance(*moved, g).value == d


# -- module presentation -------------------------------------------------------------


def test_to_gamma_module_frozen_dims():
    gm = to_gamma_module(RaySheaf.make([0, 2]))
    gm.validate()
    m = gm.module
    assert [m.dim_at((i,)) for i in range(5)] == [0, 0, 1, 1, 2]
    # structure maps are prefix projections
    proj = m.cover_map((3,), (4,))
    assert proj == FieldMat.make(2, [[1, 0]])


def test_to_gamma_module_duplicate_births():
    gm = to_gamma_module(RaySheaf.make([1, 1]))
    m = gm.module
    assert [m.dim_at((i,)) for i in range(3)] == [0, 0, 2]


def test_convolution_agrees_with_interleaving_on_samples():
    g1, g2 = _gauge(), _gauge(2)
    cases = [
        (RaySheaf.make([0]), RaySheaf.make([3])),
        (RaySheaf.make([0, 1]), RaySheaf.make([0, 5])),
        (RaySheaf.make([]), RaySheaf.make([])),
        (RaySheaf.make([0]), RaySheaf.make([0, 1])),
        (RaySheaf.make([-1, Fraction(1, 2)]), RaySheaf.make([0, 0])),
    ]
    for src, dst in cases:
        for g in (g1, g2):
            rec = compare_with_interleaving(src, dst, g)
            assert rec.equal, (src, dst, rec.convolution.value, rec.interleaving.value)
