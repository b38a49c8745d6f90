"""Planar bookkeeping: the base domain, collar charts and the Cousin data.

The base is ``Lambda = {|zeta| < R}`` minus closed round holes centred on
the real axis.  Every hole, and the region around infinity, gets a collar
chart ``chi: w -> zeta`` (a Möbius map) under which the hole is ``|w| < 1``
and the collar is ``1 < |w| < 2``.  All region predicates take a margin,
in the units of their own chart, that a point must clear.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BranchCutCrossing, CollarOverlap, HoleOutsideDomain

OUTER = "outer"
BAND = 0.5  # half-width of the overlap band V+ n V- in chart units
CUT_EPS = 1e-12


@dataclass(frozen=True)
class DiskSpec:
    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("hole radius must be positive")


@dataclass(frozen=True)
class DomainSpec:
    outer_radius: float
    holes: tuple = ()

    def __post_init__(self):
        if not self.outer_radius > 0:
            raise ValueError("outer radius must be positive")
        holes = tuple(h if isinstance(h, DiskSpec) else DiskSpec(*h) for h in self.holes)
        object.__setattr__(self, "holes", tuple(sorted(holes, key=lambda h: h.center)))

    @property
    def centers(self):
        return [h.center for h in self.holes]


def validate_domain(spec: DomainSpec) -> DomainSpec:
    R = spec.outer_radius
    for h in spec.holes:
        if abs(h.center) + h.radius >= R:
            raise HoleOutsideDomain(f"hole at {h.center} (radius {h.radius}) is not inside |zeta| < {R}")
    for h in spec.holes:
        if abs(h.center) + 2 * h.radius >= R:
            raise CollarOverlap(f"collar of hole at {h.center} leaves the domain")
    for a, b in zip(spec.holes, spec.holes[1:]):
        if b.center - a.center < 2 * (a.radius + b.radius):
            raise CollarOverlap(f"collars of holes at {a.center} and {b.center} intersect")
    # The collar at infinity is R/2 < |zeta| < R; holes must stay clear of it and
    # their vertical slits must cross |zeta| = R/2 inside the caps |Im(R/zeta)| >= 1/2.
    for h in spec.holes:
        if abs(h.center) + h.radius > R / 2 or abs(h.center) >= R * np.sqrt(15) / 8:
            raise CollarOverlap(f"hole at {h.center} meets the outer collar R/2 < |zeta| < R")
    return spec


@dataclass(frozen=True, eq=False)
class Mobius:
    """``zeta = (a w + b) / (c w + d)``."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def affine(cls, center, radius):
        return cls(radius, center, 0, 1)

    @classmethod
    def inversion(cls, R):
        return cls(0, R, 1, 0)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if self.c == 0:
            return (self.a * w + self.b) / self.d
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.a * w + self.b) / (self.c * w + self.d)

    def inverse(self):
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, inner: "Mobius") -> "Mobius":
        """``self o inner``."""
        m = np.array([[self.a, self.b], [self.c, self.d]]) @ np.array([[inner.a, inner.b], [inner.c, inner.d]])
        return Mobius(*(complex(x) for x in m.ravel()))

    def to_dict(self):
        return {"mobius": [[x.real, x.imag] for x in map(complex, (self.a, self.b, self.c, self.d))]}


# ---------------------------------------------------------------- regions


class Region:
    def contains(self, zeta, margin=0.0) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __and__(self, other):
        return Intersection((self, other))


@dataclass(frozen=True, eq=False)
class Intersection(Region):
    parts: tuple

    def contains(self, zeta, margin=0.0):
        out = np.ones(np.shape(zeta), dtype=bool)
        for p in self.parts:
            out &= p.contains(zeta, margin)
        return out

    def to_dict(self):
        return {"intersection": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class LambdaRegion(Region):
    """``Lambda`` with vertical slits from each hole: ``down``, ``up`` or ``both``."""

    domain: DomainSpec
    slits: str

    def contains(self, zeta, margin=0.0):
        z = np.asarray(zeta, dtype=complex)
        ok = np.abs(z) < self.domain.outer_radius - margin
        for h in self.domain.holes:
            ok &= np.abs(z - h.center) > h.radius + margin
            near = np.abs(z.real - h.center) <= margin
            if self.slits in ("down", "both"):
                ok &= ~(near & (z.imag < 0))
            if self.slits in ("up", "both"):
                ok &= ~(near & (z.imag > 0))
        return ok

    def to_dict(self):
        return {"lambda": {"slits": self.slits}}


@dataclass(frozen=True, eq=False)
class StripRegion(Region):
    """Points of chart coordinate ``w`` lying right of exactly ``index`` of the cut lines."""

    chart: Mobius  # chi: w -> zeta
    cuts: tuple
    index: int

    def contains(self, zeta, margin=0.0):
        w = self.chart.inverse()(zeta)
        x = w.real
        count = np.zeros(np.shape(w), dtype=int)
        ok = np.ones(np.shape(w), dtype=bool)
        for c in self.cuts:
            count += x > c
            ok &= np.abs(x - c) > margin
        return ok & (count == self.index)

    def to_dict(self):
        return {"strip": {"chart": self.chart.to_dict(), "cuts": list(self.cuts), "index": self.index}}


@dataclass(frozen=True, eq=False)
class CollarRegion(Region):
    """Parts of a collar chart: disc, annulus, vplus, vminus, omega, omega_prime."""

    chart: Mobius
    part: str

    def contains(self, zeta, margin=0.0):
        w = self.chart.inverse()(zeta)
        return collar_part(w, self.part, margin)

    def to_dict(self):
        return {"collar": {"chart": self.chart.to_dict(), "part": self.part}}


@dataclass(frozen=True, eq=False)
class RefinedRegion(Region):
    """``W_0 = {|w| < 2}`` minus closed sub-holes, cut to a horizontal band side.

    ``side`` is ``upper`` (``Im w > -eta``), ``lower`` (``Im w < eta``) or
    ``band`` (``|Im w| < eta``).
    """

    chart: Mobius
    centers: tuple
    radius: float
    eta: float
    side: str

    def contains(self, zeta, margin=0.0):
        w = self.chart.inverse()(zeta)
        ok = np.abs(w) < 2 - margin
        for x in self.centers:
            ok &= np.abs(w - x) > self.radius + margin
        if self.side == "upper":
            ok &= w.imag > -self.eta + margin
        elif self.side == "lower":
            ok &= w.imag < self.eta - margin
        else:
            ok &= np.abs(w.imag) < self.eta - margin
        return ok

    def to_dict(self):
        return {"refined": {"chart": self.chart.to_dict(), "centers": list(self.centers),
                            "radius": self.radius, "eta": self.eta, "side": self.side}}


def collar_part(w, part, margin=0.0):
    w = np.asarray(w, dtype=complex)
    r = np.abs(w)
    if part == "disc":
        return r < 2 - margin
    ann = (r > 1 + margin) & (r < 2 - margin)
    if part == "annulus":
        return ann
    up = w.imag > -BAND + margin
    down = w.imag < BAND - margin
    if part == "vplus":
        return ann & up
    if part == "vminus":
        return ann & down
    if part == "omega":
        return ann & up & down & (w.real > margin)
    if part == "omega_prime":
        return ann & up & down & (w.real < -margin)
    raise ValueError(f"unknown collar part {part!r}")


# ---------------------------------------------------------------- charts


@dataclass(frozen=True, eq=False)
class CollarChart:
    """Collar coordinate ``w`` around a hole (or around infinity).

    ``chi`` maps ``w`` to the base coordinate.  Hole ``j``: ``zeta = c_j + r_j w``;
    outer chart: ``zeta = R / w`` so that ``w = 0`` is the point at infinity.
    """

    kind: object  # hole index (1-based) or OUTER
    chi: Mobius

    def to_chart(self, zeta):
        return self.chi.inverse()(zeta)

    def to_base(self, w):
        return self.chi(w)

    def region(self, part):
        return CollarRegion(self.chi, part)

    def in_vplus(self, w, margin=0.0):
        return collar_part(w, "vplus", margin)

    def in_vminus(self, w, margin=0.0):
        return collar_part(w, "vminus", margin)

    def in_omega(self, w, margin=0.0):
        return collar_part(w, "omega", margin)

    def in_omega_prime(self, w, margin=0.0):
        return collar_part(w, "omega_prime", margin)

    def classify(self, w):
        """'vplus', 'vminus', 'omega', 'omega_prime' or None (outside the collar)."""
        w = complex(w)
        if not collar_part(w, "annulus"):
            return None
        if collar_part(w, "omega"):
            return "omega"
        if collar_part(w, "omega_prime"):
            return "omega_prime"
        return "vplus" if collar_part(w, "vplus") else "vminus"


def collar_chart(spec: DomainSpec, which) -> CollarChart:
    if which == OUTER:
        return CollarChart(OUTER, Mobius.inversion(spec.outer_radius))
    if not isinstance(which, int) or not 1 <= which <= len(spec.holes):
        raise IndexError(f"hole index {which!r} out of range 1..{len(spec.holes)}")
    h = spec.holes[which - 1]
    return CollarChart(which, Mobius.affine(h.center, h.radius))


def subchart(parent: CollarChart, center: float, radius: float, kind) -> CollarChart:
    """Nested collar chart ``w = center + radius * u`` inside ``parent``."""
    return CollarChart(kind, parent.chi.compose(Mobius.affine(center, radius)))


# ---------------------------------------------------------------- Cousin data

DOWNWARD = "down"
UPWARD = "up"


def branch_arg(w, cut):
    """Argument with range (-pi/2, 3pi/2) for the downward cut, (-3pi/2, pi/2) for the upward one."""
    w = np.asarray(w, dtype=complex)
    a = np.angle(w)
    if cut == DOWNWARD:
        return np.where(a <= -np.pi / 2, a + 2 * np.pi, a)
    if cut == UPWARD:
        return np.where(a >= np.pi / 2, a - 2 * np.pi, a)
    raise ValueError(f"unknown cut {cut!r}")


def branch_log(w, cut):
    w = np.asarray(w, dtype=complex)
    on_ray = np.abs(w.real) < CUT_EPS
    on_ray &= (w.imag <= 0) if cut == DOWNWARD else (w.imag >= 0)
    if np.any(on_ray):
        raise BranchCutCrossing(f"evaluation on the {cut}ward branch cut")
    return np.log(np.abs(w)) + 1j * branch_arg(w, cut)


@dataclass(frozen=True)
class BranchFunction:
    """``constant + linear * w + sum coeff * log_cut(w)``."""

    constant: complex = 0j
    linear: complex = 0j
    logs: tuple = ()  # (coeff, cut) pairs

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = self.constant + self.linear * w
        for coeff, cut in self.logs:
            out = out + coeff * branch_log(w, cut)
        return out

    def __add__(self, other):
        return BranchFunction(self.constant + other.constant, self.linear + other.linear, self.logs + other.logs)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, s):
        return BranchFunction(self.constant * s, self.linear * s, tuple((c * s, cut) for c, cut in self.logs))

    def to_dict(self):
        c = complex(self.constant)
        lin = complex(self.linear)
        return {
            "constant": [c.real, c.imag],
            "linear": [lin.real, lin.imag],
            "logs": [{"coeff": [complex(k).real, complex(k).imag], "cut": cut} for k, cut in self.logs],
        }


@dataclass(frozen=True)
class CousinData:
    Lplus: BranchFunction
    Lminus: BranchFunction


def cousin_solve(chart: CollarChart) -> CousinData:
    """Solve ``L+ + L- = 0`` on omega and ``= -1`` on omega' with logarithms.

    ``L+ = -log_down(w) / (2 pi i)`` lives on ``V+`` (cut below),
    ``L- = log_up(w) / (2 pi i)`` on ``V-`` (cut above); the two arguments
    agree for ``Re w > 0`` and differ by ``2 pi`` for ``Re w < 0``.
    """
    k = 1 / (2j * np.pi)
    return CousinData(
        Lplus=BranchFunction(logs=((-k, DOWNWARD),)),
        Lminus=BranchFunction(logs=((k, UPWARD),)),
    )
