import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bundlex import (
    Affine,
    AutomorphismWord,
    BundleSpec,
    DomainSpec,
    HoleGluing,
    OverShear,
    Polynomial,
    Shear,
    builtin_example,
    collar_chart,
    extend_bundle,
    extend_case1,
    henon_word,
    recognize_flow,
    refine_hole,
    verify_cocycle,
)
from bundlex.autgroup import as_word, max_discrepancy, relative_residual, words_agree
from bundlex.errors import DimensionMismatch, NoKnownFlow, NotTimeOneMap
from bundlex.extension import SubHoleLayout, hole_gluing, outer_gluing
from bundlex.geometry import OUTER, collar_part
from bundlex.serialize import word_to_dict

from randgen import random_points, random_word

z1 = Polynomial.variable(2, 0)
IDENT = AutomorphismWord.identity(2)
SWAP = Affine([[0, 1j], [1, 0]])
DOMAIN = DomainSpec(10.0, ((0.0, 1.0),))


def collar_samples(rng, chart, part, count):
    out = []
    while sum(len(o) for o in out) < count:
        w = np.sqrt(rng.uniform(1, 4, 4 * count)) * np.exp(2j * np.pi * rng.random(4 * count))
        out.append(w[collar_part(w, part, 1e-3)])
    return chart.to_base(np.concatenate(out)[:count])


def gluing_residuals(filling, count=200, seed=0):
    """Worst residual of Phi- = T0 o Phi+ on omega and Phi- = T1 o Phi+ on omega'."""
    rng = np.random.default_rng(seed)
    g = filling.gluing
    worst = []
    for part, t in (("omega", g.T0), ("omega_prime", g.T1)):
        zeta = collar_samples(rng, filling.chart, part, count)
        z = random_points(rng, count, g.dimension)
        lhs = filling.phiminus(zeta, z)
        rhs = t(filling.phiplus(zeta, z))
        worst.append(np.max(relative_residual(lhs, rhs)))
    return worst


@pytest.mark.parametrize("t1", [OverShear(1, z1), SWAP], ids=["overshear", "swap"])
def test_case1_gluing_identities(t1):
    g = HoleGluing(IDENT, as_word(t1), (t1,))
    f = extend_case1(g, g.flows[0], collar_chart(DOMAIN, 1))
    assert max(gluing_residuals(f)) < 1e-9


def test_case1_with_nontrivial_right_word():
    rng = np.random.default_rng(3)
    t0 = random_word(rng, 2, 2, maxdeg=2, overshear=False)
    e = Shear(0, Polynomial.variable(2, 1, 2, 0.3))
    g = HoleGluing(t0, t0.then(as_word(e)), (e,))
    f = extend_case1(g, g.flows[0], collar_chart(DOMAIN, 1))
    assert max(gluing_residuals(f, seed=1)) < 1e-9


def test_case1_rejects_wrong_flow():
    g = HoleGluing(IDENT, as_word(SWAP), (SWAP,))
    with pytest.raises(NotTimeOneMap):
        extend_case1(g, recognize_flow(OverShear(1, z1)), collar_chart(DOMAIN, 1))


def test_unrecognizable_factor():
    bad = Affine([[1, 1, 0], [0, 1, 0], [0, 0, 2]])
    with pytest.raises(NoKnownFlow):
        HoleGluing(AutomorphismWord.identity(3), as_word(bad), (bad,))


def test_gap_word_count_checked():
    with pytest.raises(DimensionMismatch):
        BundleSpec(DOMAIN, (IDENT,))


@pytest.mark.parametrize("k", [2, 3, 5])
def test_sub_hole_layout(k):
    lay = SubHoleLayout(k)
    pts = lay.points()
    assert list(pts) == sorted(pts)
    assert lay.radius == pytest.approx(1 / (2 * k))
    # open sub-collars of radius 2*rho do not overlap and stay inside |w| <= 1
    gaps = np.diff(lay.centers)
    assert np.all(gaps >= 4 * lay.radius - 1e-15)
    assert lay.centers[0] - 2 * lay.radius >= -1 - 1e-15
    assert lay.centers[-1] + 2 * lay.radius <= 1 + 1e-15
    assert lay.eta < lay.radius


@pytest.mark.parametrize("k", [2, 3])
def test_refine_henon(k):
    h = henon_word(k)
    g = HoleGluing(h, IDENT, h.inverse().factors)
    ref = refine_hole(g, collar_chart(DOMAIN, 1))
    n = len(g.factorization)
    assert ref.layout.k == n == len(ref.sub_gluings)
    assert ref.band_words[0] is g.T1
    assert words_agree(ref.band_words[-1], g.T0, 2)
    for sub, e in zip(ref.sub_gluings, reversed(g.factorization)):
        assert words_agree(sub.monodromy(), as_word(e), 2)


def test_telescoping_partial_words():
    h = henon_word(2)
    g = HoleGluing(IDENT, h, h.factors)
    ref = refine_hole(g, collar_chart(DOMAIN, 1))
    words = ref.band_words[::-1]  # right to left: T0, E1 T0, ..., T1
    for p, e in enumerate(g.factorization, start=1):
        step = words[p - 1].inverse().then(words[p])
        assert max_discrepancy(step, as_word(e), 2) < 1e-9


def test_refine_checks_factorization():
    g = HoleGluing(IDENT, henon_word(2), (Shear(1, z1**2), SWAP))
    with pytest.raises(NotTimeOneMap):
        refine_hole(g, collar_chart(DOMAIN, 1))


def test_demailly_rejects_small_k():
    with pytest.raises(ValueError):
        builtin_example("demailly", 1)
    with pytest.raises(ValueError):
        builtin_example("nope")


def test_skoda_structure():
    spec = builtin_example("skoda")
    assert len(spec.domain.holes) == 2
    assert words_agree(hole_gluing(spec, 1).monodromy(), as_word(OverShear(1, z1)), 2)
    assert words_agree(hole_gluing(spec, 2).monodromy(), as_word(SWAP), 2)
    ext = extend_bundle(spec)
    paths = {h.name: (h.path, h.sub_holes) for h in ext.holes}
    assert paths == {"hole1": ("case1", 0), "hole2": ("case1", 0), "infinity": ("general", 2)}


@pytest.mark.parametrize("k", [2, 3])
def test_demailly_structure(k):
    spec = builtin_example("demailly", k)
    assert words_agree(hole_gluing(spec, 1).monodromy(), henon_word(k), 2)
    ext = extend_bundle(spec)
    hole = ext.holes[0]
    assert hole.path == "general" and hole.sub_holes == 2


def test_outer_monodromy_convention():
    spec = builtin_example("skoda")
    g = outer_gluing(spec)
    g0, gn = spec.gap_words[0], spec.gap_words[-1]
    assert words_agree(g.monodromy(), gn.then(g0.inverse()), 2)
    assert g.factorization_residual() < 1e-9


def test_outer_override():
    spec = builtin_example("skoda")
    m = outer_gluing(spec).monodromy()
    custom = BundleSpec(spec.domain, spec.gap_words, spec.factorizations, tuple(m.factors))
    assert outer_gluing(custom).k == len(m.factors)
    assert verify_cocycle(extend_bundle(custom), samples=200).passed


@pytest.mark.parametrize("name,k", [("skoda", 2), ("demailly", 2), ("demailly", 3)])
def test_restriction_bit_identical(name, k):
    spec = builtin_example(name, k)
    links = extend_bundle(spec).gap_links()
    assert [word_to_dict(l.word.factors[0].const) for l in links] == [word_to_dict(g) for g in spec.gap_words]


def test_degree_bound_demailly_two():
    ext = extend_bundle(builtin_example("demailly", 2))
    elems = ext.elementaries()
    assert elems and all(e.is_polynomial for e in elems)
    assert max(e.degree for e in elems) <= 2


def test_trivial_bundle_has_no_factors():
    spec = BundleSpec(DomainSpec(10.0, ((-2.0, 0.5), (2.0, 0.5))), (IDENT, IDENT, IDENT))
    ext = extend_bundle(spec)
    assert all(h.path == "case1" and h.gluing.k == 0 for h in ext.holes)


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_random_bundles_extend_and_verify(seed, holes):
    rng = np.random.default_rng(seed)
    centers = np.linspace(-3, 3, holes) if holes > 1 else [0.0]
    domain = DomainSpec(10.0, tuple((float(c), 0.4) for c in centers))
    gaps = tuple(random_word(rng, 2, int(rng.integers(0, 2)), maxdeg=2, overshear=False) for _ in range(holes + 1))
    report = verify_cocycle(extend_bundle(BundleSpec(domain, gaps)), samples=100, seed=seed % 1000)
    assert report.passed, [r.name for r in report.failing()]
