"""Square-free multi-affine polynomials in named variables.

A polynomial is a finite sum of monomials, each monomial a product of
distinct variables times a coefficient; no variable ever appears squared.
Variables are arbitrary hashable labels (the exact engine uses
``(site, spin)`` pairs).  Coefficients may be ints, Fractions, floats, or
complex numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .errors import ValidationError

Var = Hashable
Monomial = frozenset


@dataclass(frozen=True)
class MultiAffinePolynomial:
    """Mapping from variable sets to coefficients; zero terms are dropped."""

    terms: tuple[tuple[Monomial, object], ...]

    def __post_init__(self):
        seen = {}
        for mono, coeff in self.terms:
            key = frozenset(mono)
            if key in seen:
                raise ValidationError("duplicate monomial in term list")
            if coeff != 0:
                seen[key] = coeff
        norm = tuple(sorted(seen.items(), key=lambda kv: (len(kv[0]), sorted(map(repr, kv[0])))))
        object.__setattr__(self, "terms", norm)

    @classmethod
    def from_dict(cls, d: Mapping[Iterable[Var], object]) -> "MultiAffinePolynomial":
        return cls(tuple((frozenset(k), v) for k, v in d.items()))

    @classmethod
    def constant(cls, value) -> "MultiAffinePolynomial":
        return cls.from_dict({(): value})

    @classmethod
    def variable(cls, var: Var) -> "MultiAffinePolynomial":
        return cls.from_dict({(var,): 1})

    def as_dict(self) -> dict[Monomial, object]:
        return dict(self.terms)

    @property
    def variables(self) -> frozenset:
        out = set()
        for mono, _ in self.terms:
            out |= mono
        return frozenset(out)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, values: Mapping[Var, object]):
        missing = self.variables - set(values)
        if missing:
            raise ValidationError(f"no value supplied for variable(s) {sorted(map(repr, missing))}")
        total = 0
        for mono, coeff in self.terms:
            term = coeff
            for var in mono:
                term = term * values[var]
            total = total + term
        return total

    def __add__(self, other: "MultiAffinePolynomial") -> "MultiAffinePolynomial":
        acc = dict(self.terms)
        for mono, coeff in other.terms:
            acc[mono] = acc.get(mono, 0) + coeff
        return MultiAffinePolynomial(tuple(acc.items()))

    def __mul__(self, scalar) -> "MultiAffinePolynomial":
        return MultiAffinePolynomial(tuple((m, c * scalar) for m, c in self.terms))

    def multiply_by_variable(self, var: Var) -> "MultiAffinePolynomial":
        """Multiply by ``var``; fails if any monomial already contains it."""
        out = []
        for mono, coeff in self.terms:
            if var in mono:
                raise ValidationError(f"multiplying by {var!r} would square it")
            out.append((mono | {var}, coeff))
        return MultiAffinePolynomial(tuple(out))

    # The three basic transforms.  Each is total: a variable absent from the
    # polynomial is legal input (specialize_zero and inversion are then the
    # identity; derivative gives the zero polynomial).

    def specialize_zero(self, var: Var) -> "MultiAffinePolynomial":
        """Set ``var`` to 0: drop every monomial containing it."""
        return MultiAffinePolynomial(tuple((m, c) for m, c in self.terms if var not in m))

    def derivative(self, var: Var) -> "MultiAffinePolynomial":
        """Partial derivative in ``var``: keep its monomials, strip the variable."""
        return MultiAffinePolynomial(
            tuple((m - {var}, c) for m, c in self.terms if var in m)
        )

    def inversion(self, var: Var) -> "MultiAffinePolynomial":
        """Substitute the reflection that swaps the roles of 1 and ``var``:
        each monomial's membership of ``var`` is toggled."""
        return MultiAffinePolynomial(
            tuple((m ^ {var}, c) for m, c in self.terms)
        )
