"""Sparse multivariate polynomials with complex coefficients.

A polynomial in ``nvars`` variables is stored as a dict mapping exponent
tuples (length ``nvars``) to complex coefficients.  Zero coefficients are
never stored.
"""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np


class Polynomial:
    """Immutable sparse polynomial ``sum c_e * z**e``."""

    __slots__ = ("nvars", "_terms", "_degree")

    def __init__(self, nvars: int, terms: Mapping[tuple, complex] | None = None):
        if nvars < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variables")
            c = complex(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.nvars = nvars
        self._terms = dict(sorted(clean.items()))
        self._degree = max((sum(e) for e in self._terms), default=0)

    # construction helpers

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, index, power=1, coeff=1.0):
        exps = [0] * nvars
        exps[index] = power
        return cls(nvars, {tuple(exps): coeff})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return self._degree

    def is_zero(self):
        return not self._terms

    def involves(self, index: int) -> bool:
        return any(e[index] for e in self._terms)

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, tuple(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(
                f"z{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p
            )
            parts.append(f"({c:g})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def compose(self, components: Iterable["Polynomial"]) -> "Polynomial":
        """Substitute ``z_i -> components[i]``."""
        comps = list(components)
        if len(comps) != self.nvars:
            raise ValueError("need one component per variable")
        m = comps[0].nvars
        powers: dict = {}
        out = Polynomial.zero(m)
        for e, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for i, p in enumerate(e):
                if p:
                    if (i, p) not in powers:
                        powers[(i, p)] = comps[i] ** p
                    term = term * powers[(i, p)]
            out = out + term
        return out

    def scaled(self, t):
        return self * t

    # evaluation

    def __call__(self, z) -> np.ndarray:
        """Evaluate at points ``z`` of shape ``(nvars,)`` or ``(m, nvars)``.

        Nested Horner scheme in the first variable, recursing on the rest.
        """
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.nvars:
            raise ValueError("point dimension does not match polynomial")
        return _horner(self._terms, z, 0)


def _horner(terms: dict, z: np.ndarray, var: int):
    shape = z.shape[:-1]
    if not terms:
        return np.zeros(shape, dtype=complex)
    if var == z.shape[-1]:
        return np.full(shape, sum(terms.values()), dtype=complex)
    # group by exponent of `var`
    groups: dict = {}
    for e, c in terms.items():
        groups.setdefault(e[var], {})[e] = c
    top = max(groups)
    x = z[..., var]
    acc = np.zeros(shape, dtype=complex)
    for p in range(top, -1, -1):
        acc = acc * x
        if p in groups:
            acc = acc + _horner(groups[p], z, var + 1)
    return acc
