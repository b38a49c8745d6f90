"""Extension of a bundle over ``Lambda`` to the whole Riemann sphere.

Input bundles are in *gap-word form*: with the holes on the real axis, let
``Lambda+`` (resp. ``Lambda-``) be ``Lambda`` minus vertical slits running
down (resp. up) from every hole.  Both are simply connected and
``Lambda+ n Lambda-`` splits into the ``N + 1`` strips between consecutive
slit lines.  On strip ``p`` a point ``(zeta, z)`` of the ``Lambda+`` frame is
identified with ``(zeta, G_p(z))`` of the ``Lambda-`` frame.

Each hole, and the region around infinity, is filled through its collar
chart.  A monodromy that is a single time-1 map is filled directly
(:func:`extend_case1`); a product of ``k`` time-1 maps is first split into
``k`` sub-holes (:func:`refine_hole`) that are each filled directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .autgroup import (
    AutomorphismWord,
    ElementaryAutomorphism,
    as_word,
    max_discrepancy,
)
from .errors import DimensionMismatch, NoKnownFlow, NotTimeOneMap
from .flows import ConjugatedFlow, OneParameterFlow, recognize_flow
from .geometry import (
    OUTER,
    BranchFunction,
    CollarChart,
    CollarRegion,
    CousinData,
    DomainSpec,
    Intersection,
    LambdaRegion,
    Mobius,
    RefinedRegion,
    Region,
    StripRegion,
    collar_chart,
    cousin_solve,
    subchart,
    validate_domain,
)

CHECK_SAMPLES = 100
CHECK_TOL = 1e-9
LAMBDA_PLUS = "Lambda+"
LAMBDA_MINUS = "Lambda-"


# ---------------------------------------------------------------- input data


@dataclass(frozen=True, eq=False)
class BundleSpec:
    """Bundle over ``Lambda`` in gap-word form.

    ``factorizations`` optionally maps a hole index (1-based) to a sequence
    ``E_1, ..., E_k`` of elementaries with ``E_k o ... o E_1`` equal to the
    hole monodromy; ``outer_factorization`` does the same for infinity.
    """

    domain: DomainSpec
    gap_words: tuple
    factorizations: dict = field(default_factory=dict)
    outer_factorization: tuple = None

    def __post_init__(self):
        words = tuple(self.gap_words)
        if len(words) != len(self.domain.holes) + 1:
            raise DimensionMismatch(f"need {len(self.domain.holes) + 1} gap words, got {len(words)}")
        if len({w.dimension for w in words}) != 1:
            raise DimensionMismatch("gap words must share one fiber dimension")
        object.__setattr__(self, "gap_words", words)
        object.__setattr__(self, "factorizations", {int(k): tuple(v) for k, v in self.factorizations.items()})
        if self.outer_factorization is not None:
            object.__setattr__(self, "outer_factorization", tuple(self.outer_factorization))

    @property
    def dimension(self):
        return self.gap_words[0].dimension

    def hole_pair(self, j):
        """``(T0, T1)`` for hole ``j``: the words on its right and left overlap arcs."""
        return self.gap_words[j], self.gap_words[j - 1]

    def outer_pair(self):
        # In w = R/zeta the V+ side of the collar lies in Lambda- and the
        # right arc omega in the last strip, so T0 = G_N^-1 and T1 = G_0^-1.
        return self.gap_words[-1].inverse(), self.gap_words[0].inverse()


@dataclass(frozen=True, eq=False)
class HoleGluing:
    """Gluing around one hole: ``T1 o T0^-1 = E_k o ... o E_1``.

    Each factor ``E_p`` comes with a one-parameter flow whose time-1 map it is.
    """

    T0: AutomorphismWord
    T1: AutomorphismWord
    factorization: tuple
    flows: tuple = None

    def __post_init__(self):
        factors = tuple(self.factorization)
        object.__setattr__(self, "factorization", factors)
        if self.flows is None:
            flows = []
            for e in factors:
                if not isinstance(e, ElementaryAutomorphism):
                    raise NoKnownFlow(f"factor {e!r} is not an elementary automorphism")
                flows.append(recognize_flow(e))
            object.__setattr__(self, "flows", tuple(flows))
        elif len(self.flows) != len(factors):
            raise ValueError("one flow per factor required")

    @property
    def k(self):
        return len(self.factorization)

    @property
    def dimension(self):
        return self.T0.dimension

    def monodromy(self) -> AutomorphismWord:
        return self.T0.inverse().then(self.T1)

    def factor_word(self) -> AutomorphismWord:
        w = AutomorphismWord.identity(self.dimension)
        for e in self.factorization:
            w = w.then(as_word(e))
        return w

    def factorization_residual(self, samples=CHECK_SAMPLES, seed=0):
        return max_discrepancy(self.monodromy(), self.factor_word(), self.dimension, samples, seed)


def default_factorization(spec: BundleSpec, j: int):
    """Factors of ``G_{j-1} o G_j^-1`` as written, ``G_j^-1`` applied first."""
    t0, t1 = spec.hole_pair(j)
    return tuple(t0.inverse().factors + t1.factors)


def hole_gluing(spec: BundleSpec, j: int) -> HoleGluing:
    t0, t1 = spec.hole_pair(j)
    factors = spec.factorizations.get(j) or default_factorization(spec, j)
    return HoleGluing(t0, t1, factors)


def _is_identity(w: AutomorphismWord):
    return len(w) == 0 or max_discrepancy(w, AutomorphismWord.identity(w.dimension), w.dimension) < CHECK_TOL


def outer_gluing(spec: BundleSpec) -> HoleGluing:
    """Gluing at infinity.

    ``G_0^-1 o G_N = N_1 o ... o N_N`` with ``N_j = G_{j-1}^-1 o G_j``, and
    ``N_j = C^-1 o M_j^-1 o C`` for ``C`` either ``G_j`` or ``G_{j-1}``, where
    ``M_j`` is the monodromy of hole ``j``.  Each inverted hole factor is
    conjugated by ``C`` unless ``C`` is the identity.
    """
    t0, t1 = spec.outer_pair()
    if spec.outer_factorization is not None:
        return HoleGluing(t0, t1, spec.outer_factorization)
    n = spec.dimension
    factors, flows = [], []
    for j in range(len(spec.domain.holes), 0, -1):
        hole = hole_gluing(spec, j)
        g_left, g_right = spec.gap_words[j - 1], spec.gap_words[j]
        conj = None
        if not _is_identity(g_right) and not _is_identity(g_left):
            conj = g_right
        for e in reversed(hole.factorization):
            inv = e.inverse()
            flow = recognize_flow(inv) if isinstance(inv, ElementaryAutomorphism) else None
            if flow is None:
                raise NoKnownFlow(f"cannot attach a flow to {inv!r}")
            if conj is not None:
                flow = ConjugatedFlow(flow, conj)
                inv = flow.at(1.0)
            factors.append(inv)
            flows.append(flow)
    if not factors:
        return HoleGluing(t0, t1, (), ())
    return HoleGluing(t0, t1, tuple(factors), tuple(flows))


# ---------------------------------------------------------------- parameterized words


@dataclass(frozen=True, eq=False)
class ParamFactor:
    """Either a constant map or ``S^{t(zeta)}`` with ``t = time(chi^-1(zeta))``."""

    const: object = None
    flow: OneParameterFlow = None
    time: BranchFunction = None
    chart: Mobius = None

    def apply(self, zeta, z):
        if self.const is not None:
            return self.const(z)
        t = self.time(self.chart.inverse()(zeta))
        return self.flow.apply(t, z)

    def inverse(self):
        if self.const is not None:
            return ParamFactor(const=self.const.inverse())
        return ParamFactor(flow=self.flow, time=-self.time, chart=self.chart)


@dataclass(frozen=True, eq=False)
class ParamWord:
    """Base-dependent word, factors in application order."""

    factors: tuple = ()

    @classmethod
    def constant(cls, w):
        return cls((ParamFactor(const=w),))

    @classmethod
    def flow(cls, flow, time, chart):
        return cls((ParamFactor(flow=flow, time=time, chart=chart),))

    def then(self, other):
        return ParamWord(self.factors + other.factors)

    def inverse(self):
        return ParamWord(tuple(f.inverse() for f in reversed(self.factors)))

    def __call__(self, zeta, z):
        zeta = np.asarray(zeta, dtype=complex)
        z = np.asarray(z, dtype=complex)
        for f in self.factors:
            z = f.apply(zeta, z)
        return z

    def elementaries(self):
        """Every elementary automorphism that occurs in this word, flows included."""
        out = []
        for f in self.factors:
            if f.const is not None:
                out.extend(as_word(f.const).factors)
            else:
                out.extend(f.flow.elementaries())
        return out


# ---------------------------------------------------------------- single-factor holes


@dataclass(frozen=True, eq=False)
class CaseOneFilling:
    name: str
    gluing: HoleGluing
    flow: OneParameterFlow
    chart: CollarChart
    cousin: CousinData
    phiplus: ParamWord
    phiminus: ParamWord
    plus_frame: str = None
    minus_frame: str = None


def extend_case1(gluing: HoleGluing, flow: OneParameterFlow, chart: CollarChart,
                 cousin: CousinData = None, *, name="U", check=True) -> CaseOneFilling:
    """Trivial filling of a hole whose monodromy ``T1 o T0^-1`` is ``S^1``.

    ``Phi+ = T0^-1 o S^{L+(zeta)}`` on ``V+`` and ``Phi- = S^{-L-(zeta)}`` on
    ``V-`` identify the trivial bundle over the filled disc with the given
    one; ``L+ + L- = 0`` on omega and ``-1`` on omega' make them agree.
    """
    if gluing.k > 1:
        raise ValueError("extend_case1 needs a single-factor gluing; use refine_hole")
    if cousin is None:
        cousin = cousin_solve(chart)
    if check:
        residual = max_discrepancy(lambda z: flow.apply(1.0, z), gluing.monodromy(), gluing.dimension, CHECK_SAMPLES)
        if not residual < CHECK_TOL:
            raise NotTimeOneMap(f"S^1 differs from T1 o T0^-1 (residual {residual:.3g})")
    phiplus = ParamWord.flow(flow, cousin.Lplus, chart.chi)
    if len(gluing.T0):
        phiplus = phiplus.then(ParamWord.constant(gluing.T0.inverse()))
    phiminus = ParamWord.flow(flow, -cousin.Lminus, chart.chi)
    return CaseOneFilling(name, gluing, flow, chart, cousin, phiplus, phiminus)


# ---------------------------------------------------------------- multi-factor holes


@dataclass(frozen=True)
class SubHoleLayout:
    """Sub-holes on the real diameter of the collar chart.

    ``[a_q, b_q]`` is the middle half of the q-th of ``k`` equal pieces of
    ``[-1, 1]`` (counted from the left).  ``eta`` is the half-width of the
    band in which the refined pieces ``W+`` and ``W-`` overlap.
    """

    k: int

    @property
    def width(self):
        return 2.0 / self.k

    @property
    def a(self):
        return tuple(-1 + (q + 0.25) * self.width for q in range(self.k))

    @property
    def b(self):
        return tuple(-1 + (q + 0.75) * self.width for q in range(self.k))

    @property
    def centers(self):
        return tuple(-1 + (q + 0.5) * self.width for q in range(self.k))

    @property
    def radius(self):
        return self.width / 4

    @property
    def eta(self):
        return 0.75 * self.radius

    def points(self):
        """``b_0, a_1, b_1, ..., a_k, b_k, a_{k+1}`` left to right."""
        out = [-2.0]
        for a, b in zip(self.a, self.b):
            out += [a, b]
        return tuple(out + [2.0])


@dataclass(frozen=True, eq=False)
class RefinedHole:
    name: str
    gluing: HoleGluing
    chart: CollarChart
    layout: SubHoleLayout
    band_words: tuple  # left to right, band_words[q] on the arc [b_q, a_{q+1}]
    sub_gluings: tuple  # left to right; sub-hole q glues band q-1 to band q
    sub_charts: tuple


def refine_hole(gluing: HoleGluing, chart: CollarChart, *, name="hole", check=True) -> RefinedHole:
    """Split a hole with ``k >= 2`` factors into ``k`` single-factor sub-holes.

    The rightmost arc keeps ``T0``; moving left across one sub-hole after
    another appends ``E_1``, ``E_2``, ... so the arc left of the last one
    carries ``E_k o ... o E_1 o T0 = T1``.  Consecutive arc words differ by a
    single factor, so every sub-hole can be filled directly.
    """
    k = gluing.k
    if k < 2:
        raise ValueError("refine_hole needs at least two factors")
    if check:
        residual = gluing.factorization_residual()
        if not residual < CHECK_TOL:
            raise NotTimeOneMap(f"factorization does not reproduce T1 o T0^-1 (residual {residual:.3g})")
    layout = SubHoleLayout(k)
    partial = [gluing.T0]
    for e in gluing.factorization:
        partial.append(partial[-1].then(as_word(e)))
    # partial[p] = E_p o ... o E_1 o T0; band q (from the left) carries partial[k - q],
    # except the leftmost band, which keeps T1 itself
    band_words = (gluing.T1,) + tuple(partial[k - q] for q in range(1, k + 1))
    subs, charts = [], []
    for q in range(1, k + 1):
        p = k - q + 1  # factor handled by this sub-hole
        subs.append(HoleGluing(band_words[q], band_words[q - 1],
                               (gluing.factorization[p - 1],), (gluing.flows[p - 1],)))
        charts.append(subchart(chart, layout.centers[q - 1], layout.radius, kind=(chart.kind, q)))
    return RefinedHole(name, gluing, chart, layout, band_words, tuple(subs), tuple(charts))


# ---------------------------------------------------------------- global assembly


@dataclass(frozen=True, eq=False)
class Chart:
    name: str
    region: Region
    sample_map: Mobius  # w -> zeta, sampling disc |w| < sample_radius
    sample_radius: float
    provenance: str


@dataclass(frozen=True, eq=False)
class Link:
    """``z_target = word(zeta)(z_source)`` for ``zeta`` in ``region``."""

    source: str
    target: str
    region: Region
    word: ParamWord
    provenance: str


@dataclass(frozen=True, eq=False)
class HoleRecord:
    name: str
    kind: object
    path: str  # "case1" or "general"
    gluing: HoleGluing
    fillings: tuple
    refined: RefinedHole = None

    @property
    def sub_holes(self):
        return 0 if self.refined is None else self.refined.layout.k


@dataclass(frozen=True, eq=False)
class ExtendedBundle:
    spec: BundleSpec
    charts: tuple
    links: tuple
    holes: tuple

    def chart(self, name) -> Chart:
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    def gap_links(self):
        return [l for l in self.links if l.source == LAMBDA_PLUS and l.target == LAMBDA_MINUS]

    def with_link(self, index, link):
        links = list(self.links)
        links[index] = link
        return replace(self, links=tuple(links))

    def elementaries(self):
        out = []
        for l in self.links:
            out.extend(l.word.elementaries())
        return out


class _Assembler:
    def __init__(self, spec, check):
        self.spec = spec
        self.check = check
        self.charts = []
        self.links = []
        self.holes = []

    def add_chart(self, *args):
        self.charts.append(Chart(*args))

    def add_link(self, *args):
        self.links.append(Link(*args))

    def fill(self, name, kind, chart, gluing, plus, minus):
        if gluing.k <= 1:
            filling = self._case1(name, chart, gluing, plus, minus)
            self.holes.append(HoleRecord(name, kind, "case1", gluing, (filling,)))
            return
        ref = refine_hole(gluing, chart, name=name, check=self.check)
        wp, wm = f"{name}:W+", f"{name}:W-"
        lay = ref.layout
        upper = RefinedRegion(chart.chi, lay.centers, lay.radius, lay.eta, "upper")
        lower = RefinedRegion(chart.chi, lay.centers, lay.radius, lay.eta, "lower")
        band = RefinedRegion(chart.chi, lay.centers, lay.radius, lay.eta, "band")
        self.add_chart(wp, upper, chart.chi, 2.0, f"refined piece W+ of {name}")
        self.add_chart(wm, lower, chart.chi, 2.0, f"refined piece W- of {name}")
        for q, word in enumerate(ref.band_words):
            region = Intersection((band, StripRegion(chart.chi, lay.centers, q)))
            if q == 0:
                label = "T1"
            elif q == gluing.k:
                label = "T0"
            else:
                label = f"E_{gluing.k - q}...E_1 T0"
            self.add_link(wp, wm, region, ParamWord.constant(word), f"{name}: arc {q} carries {label}")
        annulus = CollarRegion(chart.chi, "annulus")
        self.add_link(wp, plus, Intersection((annulus, upper)), ParamWord(), f"{name}: W+ continues the V+ frame")
        self.add_link(wm, minus, Intersection((annulus, lower)), ParamWord(), f"{name}: W- continues the V- frame")
        fillings = []
        for q, (sub, sub_chart) in enumerate(zip(ref.sub_gluings, ref.sub_charts), start=1):
            fillings.append(self._case1(f"{name}.{q}", sub_chart, sub, wp, wm))
        self.holes.append(HoleRecord(name, kind, "general", gluing, tuple(fillings), ref))

    def _case1(self, name, chart, gluing, plus, minus):
        if gluing.k == 0:
            from .flows import LinearFlow

            flow = LinearFlow(np.zeros((gluing.dimension, gluing.dimension)))
        else:
            flow = gluing.flows[0]
        filling = extend_case1(gluing, flow, chart, name=name, check=self.check)
        filling = replace(filling, plus_frame=plus, minus_frame=minus)
        self.add_chart(name, CollarRegion(chart.chi, "disc"), chart.chi, 2.0, f"filled disc {name}")
        self.add_link(name, plus, CollarRegion(chart.chi, "vplus"), filling.phiplus, f"{name}: Phi+ = T0^-1 S^L+")
        self.add_link(name, minus, CollarRegion(chart.chi, "vminus"), filling.phiminus, f"{name}: Phi- = S^-L-")
        return filling


def extend_bundle(spec: BundleSpec, *, check=True) -> ExtendedBundle:
    """Fill every hole and the region around infinity.

    With ``check=False`` the time-1 and factorization preconditions are not
    enforced, so that a broken spec still yields an extension whose
    verification report shows where it fails.
    """
    domain = validate_domain(spec.domain)
    asm = _Assembler(spec, check)
    ident = Mobius.affine(0.0, 1.0)
    R = domain.outer_radius
    asm.add_chart(LAMBDA_PLUS, LambdaRegion(domain, "down"), ident, R, "input frame over Lambda+")
    asm.add_chart(LAMBDA_MINUS, LambdaRegion(domain, "up"), ident, R, "input frame over Lambda-")
    both = LambdaRegion(domain, "both")
    for p, g in enumerate(spec.gap_words):
        asm.add_link(LAMBDA_PLUS, LAMBDA_MINUS, Intersection((both, StripRegion(ident, tuple(domain.centers), p))),
                     ParamWord.constant(g), f"input gap word G_{p}")
    for j in range(1, len(domain.holes) + 1):
        asm.fill(f"hole{j}", j, collar_chart(domain, j), hole_gluing(spec, j), LAMBDA_PLUS, LAMBDA_MINUS)
    asm.fill("infinity", OUTER, collar_chart(domain, OUTER), outer_gluing(spec), LAMBDA_MINUS, LAMBDA_PLUS)
    return ExtendedBundle(spec, tuple(asm.charts), tuple(asm.links), tuple(asm.holes))


# ---------------------------------------------------------------- built-in bundles


def skoda_spec() -> BundleSpec:
    """Two holes in the disc of radius 10; monodromies ``(z1, z2 e^{z1})`` and ``(i z2, z1)``."""
    from .autgroup import Affine, OverShear
    from .polynomial import Polynomial

    over = OverShear(1, Polynomial.variable(2, 0))
    swap = Affine(np.array([[0, 1j], [1, 0]]))
    ident = AutomorphismWord.identity(2)
    domain = DomainSpec(10.0, ((-4.0, 1.0), (4.0, 1.0)))
    gaps = (AutomorphismWord((over,)), ident, AutomorphismWord((swap.inverse(),)))
    return BundleSpec(domain, gaps, {1: (over,), 2: (swap,)})


def demailly_spec(k: int) -> BundleSpec:
    """One hole at the origin whose monodromy is ``(z1, z2) -> (z2, -z1 + z2^k)``."""
    from .autgroup import henon_word

    if not isinstance(k, (int, np.integer)) or k < 2:
        raise ValueError("the Demailly example needs an integer k >= 2")
    henon = henon_word(int(k))
    domain = DomainSpec(10.0, ((0.0, 1.0),))
    return BundleSpec(domain, (henon, AutomorphismWord.identity(2)), {1: henon.factors})


def builtin_example(name: str, k: int = 2) -> BundleSpec:
    if name == "skoda":
        return skoda_spec()
    if name == "demailly":
        return demailly_spec(k)
    raise ValueError(f"unknown example {name!r}")
