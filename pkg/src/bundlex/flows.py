"""One-parameter groups ``S^t`` of automorphisms and their recognition.

``recognize_flow`` attaches to every elementary automorphism a flow whose
time-1 map is that elementary: shears and over-shears scale their
polynomial, affine maps go through a matrix logarithm of the homogeneous
``(n+1) x (n+1)`` matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .autgroup import Affine, AutomorphismWord, ElementaryAutomorphism, OverShear, Shear, _points
from .errors import NoKnownFlow, NonDiagonalizable, SingularMatrix
from .polynomial import Polynomial

EIG_COND_LIMIT = 1e8
NEGATIVE_AXIS_PHASE = 1e-6


class BranchWarning(UserWarning):
    """An eigenvalue sat on the negative real axis; its log branch was fixed by rotation."""


def matrix_log(m) -> np.ndarray:
    """Principal matrix logarithm via eigendecomposition.

    Defective matrices are accepted only in the scalar-times-unipotent case,
    where ``log(lam*(I + N)) = log(lam) I + sum (-1)^(k+1) N^k / k``
    terminates.  Eigenvalues on the negative real axis take the branch
    reached by rotating them by ``+NEGATIVE_AXIS_PHASE`` (argument ``-pi``);
    a :class:`BranchWarning` is emitted when that happens.
    """
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix_log needs a square matrix")
    n = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m))))
    if abs(np.linalg.det(m)) <= 1e-12 * scale**n:
        raise SingularMatrix("matrix is not invertible")
    lam, vec = np.linalg.eig(m)
    if np.linalg.cond(vec) <= EIG_COND_LIMIT:
        logs = np.array([_branch_log(x) for x in lam])
        return (vec * logs) @ np.linalg.inv(vec)
    mu = np.mean(lam)
    nil = (m - mu * np.eye(n)) / mu
    nil_power = np.linalg.matrix_power(nil, n)
    if np.max(np.abs(nil_power)) > 1e-10 * max(1.0, float(np.max(np.abs(nil)))) ** n:
        raise NonDiagonalizable("eigenvector matrix is ill-conditioned and the matrix is not scalar-unipotent")
    out = _branch_log(mu) * np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, n):
        term = term @ nil
        out += (-1) ** (k + 1) * term / k
    return out


def _branch_log(x: complex) -> complex:
    x = complex(x)
    if x.real < 0 and abs(x.imag) <= 1e-14 * abs(x):
        warnings.warn(BranchWarning(f"eigenvalue {x} on the negative real axis"), stacklevel=3)
        return complex(np.log(abs(x)), np.angle(x * np.exp(1j * NEGATIVE_AXIS_PHASE)) - NEGATIVE_AXIS_PHASE)
    return complex(np.log(x))


def _times(t, z):
    """Broadcast a scalar or per-point time array against points ``z``."""
    t = np.asarray(t, dtype=complex)
    if t.ndim == 0:
        return t
    if z.ndim != 2 or t.shape != (z.shape[0],):
        raise ValueError("time array must have one entry per point")
    return t


class OneParameterFlow:
    """Common interface: ``at(t)`` gives the automorphism, ``apply(t, z)`` evaluates it."""

    dimension: int

    def at(self, t):
        raise NotImplementedError

    def apply(self, t, z):
        raise NotImplementedError

    def __call__(self, t, z):
        return self.apply(t, z)

    def elementaries(self):
        """Elementaries whose type/degree bound every ``at(t)``."""
        return [self.at(1.0)]


@dataclass(frozen=True, eq=False)
class ShearFlow(OneParameterFlow):
    axis: int
    q: Polynomial

    @property
    def dimension(self):
        return self.q.nvars

    def at(self, t):
        return Shear(self.axis, self.q * complex(t))

    def apply(self, t, z):
        z = _points(z, self.dimension)
        t = _times(t, z)
        out = z.copy()
        out[..., self.axis] = z[..., self.axis] + t * self.q(z)
        return out


@dataclass(frozen=True, eq=False)
class OverShearFlow(OneParameterFlow):
    axis: int
    q: Polynomial

    @property
    def dimension(self):
        return self.q.nvars

    def at(self, t):
        return OverShear(self.axis, self.q * complex(t))

    def apply(self, t, z):
        z = _points(z, self.dimension)
        t = _times(t, z)
        out = z.copy()
        out[..., self.axis] = z[..., self.axis] * np.exp(t * self.q(z))
        return out


class _MatrixFlow(OneParameterFlow):
    """``exp(t G)`` with a cached spectral decomposition for batched times."""

    generator: np.ndarray

    def _prepare(self):
        g = self.generator
        lam, vec = np.linalg.eig(g)
        if np.linalg.cond(vec) <= EIG_COND_LIMIT:
            object.__setattr__(self, "_spec", ("eig", lam, vec, np.linalg.inv(vec)))
            return
        mu = np.trace(g) / g.shape[0]
        nil = g - mu * np.eye(g.shape[0])
        if np.max(np.abs(np.linalg.matrix_power(nil, g.shape[0]))) <= 1e-10 * max(1.0, float(np.max(np.abs(nil)))) ** g.shape[0]:
            object.__setattr__(self, "_spec", ("nil", mu, nil, None))
        else:
            object.__setattr__(self, "_spec", ("expm", None, None, None))

    def exp_batch(self, t) -> np.ndarray:
        """Stack of ``exp(t_i G)`` for a 1-d array of times."""
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        kind, a, b, c = self._spec
        size = self.generator.shape[0]
        if kind == "eig":
            return np.einsum("ij,mj,jk->mik", b, np.exp(np.outer(t, a)), c)
        if kind == "nil":
            out = np.zeros((t.size, size, size), dtype=complex)
            term = np.broadcast_to(np.eye(size, dtype=complex), out.shape).copy()
            for k in range(size):
                if k:
                    term = term @ b * (t[:, None, None] / k)
                out += term
            return out * np.exp(t * a)[:, None, None]
        return np.stack([expm(ti * self.generator) for ti in t])


@dataclass(frozen=True, eq=False)
class LinearFlow(_MatrixFlow):
    generator: np.ndarray
    branch_rotated: bool = False

    def __post_init__(self):
        g = np.array(self.generator, dtype=complex)
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        self._prepare()

    @property
    def dimension(self):
        return self.generator.shape[0]

    def at(self, t):
        return Affine(expm(complex(t) * self.generator))

    def apply(self, t, z):
        z = _points(z, self.dimension)
        t = _times(t, z)
        if t.ndim == 0:
            return z @ expm(complex(t) * self.generator).T
        mats = self.exp_batch(t)
        return np.einsum("mij,mj->mi", mats, z)


@dataclass(frozen=True, eq=False)
class AffineFlow(_MatrixFlow):
    """Flow of an affine vector field, generator in homogeneous coordinates."""

    generator: np.ndarray
    branch_rotated: bool = False

    def __post_init__(self):
        g = np.array(self.generator, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 2:
            raise ValueError("homogeneous generator must be square of size n+1")
        g[-1, :] = 0
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        self._prepare()

    @property
    def dimension(self):
        return self.generator.shape[0] - 1

    def at(self, t):
        h = expm(complex(t) * self.generator)
        n = self.dimension
        return Affine(h[:n, :n], h[:n, n])

    def apply(self, t, z):
        z = _points(z, self.dimension)
        t = _times(t, z)
        n = self.dimension
        if t.ndim == 0:
            return self.at(t).apply(z)
        mats = self.exp_batch(t)
        return np.einsum("mij,mj->mi", mats[:, :n, :n], z) + mats[:, :n, n]


@dataclass(frozen=True, eq=False)
class ConjugatedFlow(OneParameterFlow):
    """``C^-1 o S^t o C``: conjugating a flow by a word is again a flow."""

    base: OneParameterFlow
    conjugator: AutomorphismWord

    @property
    def dimension(self):
        return self.base.dimension

    def at(self, t):
        inner = self.base.at(t)
        return self.conjugator.then(AutomorphismWord((inner,))).then(self.conjugator.inverse())

    def apply(self, t, z):
        z = self.conjugator(_points(z, self.dimension))
        z = self.base.apply(t, z)
        return self.conjugator.inverse()(z)

    def elementaries(self):
        return list(self.conjugator.factors) + self.base.elementaries() + list(self.conjugator.inverse().factors)


def _affine_generator(e: Affine) -> np.ndarray:
    """Homogeneous generator ``[[L, v], [0, 0]]`` with ``L = log A``.

    Used when the homogeneous matrix is defective (a translation along an
    eigenvalue-1 direction).  ``exp`` of the generator has translation
    ``phi(L) v`` with ``phi(L) = (e^L - I) / L``, invertible because the
    principal log has no eigenvalue in ``2 pi i Z \\ {0}``.
    """
    n = e.dimension
    L = matrix_log(e.matrix)
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = L
    block[:n, n:] = np.eye(n)
    phi = expm(block)[:n, n:]
    g = np.zeros((n + 1, n + 1), dtype=complex)
    g[:n, :n] = L
    g[:n, n] = np.linalg.solve(phi, e.translation)
    return g


def recognize_flow(e: ElementaryAutomorphism) -> OneParameterFlow:
    """A one-parameter group whose time-1 map is ``e``."""
    if isinstance(e, Shear):
        return ShearFlow(e.axis, e.q)
    if isinstance(e, OverShear):
        return OverShearFlow(e.axis, e.q)
    if isinstance(e, Affine):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", BranchWarning)
            try:
                if e.is_linear:
                    flow = LinearFlow(matrix_log(e.matrix))
                else:
                    try:
                        flow = AffineFlow(matrix_log(e.homogeneous()))
                    except NonDiagonalizable:
                        flow = AffineFlow(_affine_generator(e))
            except (NonDiagonalizable, SingularMatrix) as exc:
                raise NoKnownFlow(str(exc)) from exc
        rotated = any(issubclass(w.category, BranchWarning) for w in caught)
        if rotated:
            flow = type(flow)(flow.generator, branch_rotated=True)
        return flow
    raise NoKnownFlow(f"no flow known for {e!r}")


def flow_at(f: OneParameterFlow, t):
    return f.at(t)
