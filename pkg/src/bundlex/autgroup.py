"""Elementary automorphisms of C^n and finite words in them.

Words are stored in *application order*: ``AutomorphismWord([e1, e2, e3])``
acts as ``e3 o e2 o e1``, i.e. ``e1`` is applied first.  Every point
argument may be a single point of shape ``(n,)`` or a batch ``(m, n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, SingularMatrix, TranscendentalWord
from .polynomial import Polynomial

APPLICATION_ORDER = "first-listed-applied-first"


def _points(z, n):
    z = np.asarray(z, dtype=complex)
    if z.ndim not in (1, 2) or z.shape[-1] != n:
        raise DimensionMismatch(f"expected points of dimension {n}, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite coordinates")
    return z


class ElementaryAutomorphism:
    """Base class; subclasses are :class:`Affine`, :class:`Shear`, :class:`OverShear`."""

    dimension: int

    def __call__(self, z):
        return self.apply(_points(z, self.dimension))

    def apply(self, z):
        raise NotImplementedError

    def inverse(self) -> "ElementaryAutomorphism":
        raise NotImplementedError

    @property
    def degree(self) -> int:
        raise NotImplementedError

    @property
    def is_polynomial(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class Affine(ElementaryAutomorphism):
    matrix: np.ndarray
    translation: np.ndarray = None

    def __post_init__(self):
        a = np.array(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch("affine matrix must be square")
        n = a.shape[0]
        b = np.zeros(n, dtype=complex) if self.translation is None else np.array(self.translation, dtype=complex)
        if b.shape != (n,):
            raise DimensionMismatch("translation length does not match matrix")
        scale = max(1.0, float(np.max(np.abs(a)))) ** n
        if abs(np.linalg.det(a)) <= 1e-12 * scale:
            raise SingularMatrix("affine matrix is not invertible")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "translation", b)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def degree(self):
        return 1

    @property
    def is_linear(self):
        return not np.any(self.translation)

    def apply(self, z):
        return z @ self.matrix.T + self.translation

    def inverse(self):
        ainv = np.linalg.inv(self.matrix)
        return Affine(ainv, -ainv @ self.translation)

    def homogeneous(self) -> np.ndarray:
        n = self.dimension
        h = np.eye(n + 1, dtype=complex)
        h[:n, :n] = self.matrix
        h[:n, n] = self.translation
        return h

    def __repr__(self):
        return f"Affine({self.matrix.tolist()}, {self.translation.tolist()})"


@dataclass(frozen=True, eq=False)
class _AxisMap(ElementaryAutomorphism):
    axis: int
    q: Polynomial

    def __post_init__(self):
        if not 0 <= self.axis < self.q.nvars:
            raise DimensionMismatch(f"axis {self.axis} out of range for n={self.q.nvars}")
        if self.q.involves(self.axis):
            raise ValueError("polynomial must not involve the axis variable")

    @property
    def dimension(self):
        return self.q.nvars

    def __repr__(self):
        return f"{type(self).__name__}(axis={self.axis}, q={self.q!r})"


class Shear(_AxisMap):
    """``z_axis -> z_axis + q(other coordinates)``."""

    @property
    def degree(self):
        return max(1, self.q.degree)

    def apply(self, z):
        out = z.copy()
        out[..., self.axis] = z[..., self.axis] + self.q(z)
        return out

    def inverse(self):
        return Shear(self.axis, -self.q)


class OverShear(_AxisMap):
    """``z_axis -> z_axis * exp(q(other coordinates))``."""

    @property
    def degree(self):
        raise TranscendentalWord("over-shears are not polynomial")

    @property
    def is_polynomial(self):
        return False

    def apply(self, z):
        out = z.copy()
        out[..., self.axis] = z[..., self.axis] * np.exp(self.q(z))
        return out

    def inverse(self):
        return OverShear(self.axis, -self.q)


@dataclass(frozen=True, eq=False)
class AutomorphismWord:
    factors: tuple
    dimension: int = field(default=None)

    def __post_init__(self):
        factors = tuple(self.factors)
        dims = {f.dimension for f in factors}
        n = self.dimension
        if n is None:
            if not dims:
                raise DimensionMismatch("an empty word needs an explicit dimension")
            n = dims.pop() if len(dims) == 1 else None
        if n is None or any(d != n for d in dims):
            raise DimensionMismatch("all factors must share one dimension")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "dimension", n)

    @classmethod
    def identity(cls, n):
        return cls((), n)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __call__(self, z):
        return eval_word(self, z)

    def then(self, other: "AutomorphismWord") -> "AutomorphismWord":
        """The word applying ``self`` first and ``other`` afterwards."""
        if other.dimension != self.dimension:
            raise DimensionMismatch("cannot concatenate words of different dimension")
        return AutomorphismWord(self.factors + tuple(other.factors), self.dimension)

    def inverse(self):
        return invert_word(self)

    def __repr__(self):
        return f"AutomorphismWord({list(self.factors)!r})"


def as_word(x, n=None) -> AutomorphismWord:
    if isinstance(x, AutomorphismWord):
        return x
    if isinstance(x, ElementaryAutomorphism):
        return AutomorphismWord((x,))
    return AutomorphismWord(tuple(x), n)


def eval_word(w: AutomorphismWord, z):
    z = _points(z, w.dimension)
    for f in w.factors:
        z = f.apply(z)
    return z


def invert_word(w: AutomorphismWord) -> AutomorphismWord:
    return AutomorphismWord(tuple(f.inverse() for f in reversed(w.factors)), w.dimension)


def expand_polynomial(w: AutomorphismWord):
    """Symbolic composition of a polynomial word.

    Returns ``(components, degree)`` where ``components[i]`` is the i-th
    coordinate of the composite map as a :class:`Polynomial`.
    """
    n = w.dimension
    comps = [Polynomial.variable(n, i) for i in range(n)]
    for f in w.factors:
        if isinstance(f, OverShear):
            raise TranscendentalWord("word contains an over-shear")
        if isinstance(f, Affine):
            comps = [
                sum((f.matrix[i, j] * comps[j] for j in range(n)), Polynomial.constant(n, f.translation[i]))
                for i in range(n)
            ]
        elif isinstance(f, Shear):
            comps = list(comps)
            comps[f.axis] = comps[f.axis] + f.q.compose(comps)
        else:
            raise TypeError(f"unknown factor {f!r}")
    return comps, max(c.degree for c in comps)


def relative_residual(a, b) -> np.ndarray:
    """Per-point ``|a - b| / (1 + |a|)`` with Euclidean norms over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.linalg.norm(a - b, axis=-1) / (1.0 + np.linalg.norm(a, axis=-1))


def sample_polydisc(rng: np.random.Generator, count: int, n: int, radius: float = 2.0):
    r = radius * np.sqrt(rng.random((count, n)))
    theta = 2 * np.pi * rng.random((count, n))
    return r * np.exp(1j * theta)


def words_agree(f, g, n: int, samples: int = 100, tol: float = 1e-9, seed: int = 0) -> bool:
    """Sampled equality test for two maps of C^n (no normal forms exist)."""
    return max_discrepancy(f, g, n, samples, seed) < tol


def max_discrepancy(f, g, n, samples=100, seed=0) -> float:
    z = sample_polydisc(np.random.default_rng(seed), samples, n)
    return float(np.max(relative_residual(f(z), g(z))))


def henon_word(k: int) -> AutomorphismWord:
    """The Hénon-type map ``(z1, z2) -> (z2, -z1 + z2**k)`` as linear map then shear."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    rot = Affine(np.array([[0, 1], [-1, 0]], dtype=complex))
    shear = Shear(1, Polynomial.variable(2, 0, k))
    return AutomorphismWord((rot, shear))
