"""Exact monomial algebra over named generators.

A monomial is a product of generator symbols (channel gains, auxiliary
constants) raised to integer powers, stored as a canonical zero-free
exponent map.  Two monomials with different canonical maps are rationally
independent almost surely when the generators are drawn from continuous
distributions, so exact map equality is the alignment test used throughout
the fixed-gain schemes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Monomial:
    """Canonical exponent vector: sorted (name, exponent) pairs, no zeros."""

    exponents: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def from_dict(exponents: Mapping[str, int]) -> "Monomial":
        items = tuple(sorted((n, int(e)) for n, e in exponents.items() if e != 0))
        return Monomial(items)

    @staticmethod
    def one() -> "Monomial":
        return Monomial(())

    @staticmethod
    def gen(name: str, power: int = 1) -> "Monomial":
        return Monomial.from_dict({name: power})

    def as_dict(self) -> dict[str, int]:
        return dict(self.exponents)

    def exponent(self, name: str) -> int:
        for n, e in self.exponents:
            if n == name:
                return e
        return 0

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.exponents)

    def is_one(self) -> bool:
        return not self.exponents

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exponents)
        for n, e in other.exponents:
            merged[n] = merged.get(n, 0) + e
        return Monomial.from_dict(merged)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def inverse(self) -> "Monomial":
        return Monomial(tuple((n, -e) for n, e in self.exponents))

    def __pow__(self, power: int) -> "Monomial":
        if power == 0:
            return Monomial.one()
        return Monomial(tuple(sorted((n, e * power) for n, e in self.exponents)))

    def evaluate(self, values: Mapping[str, float]) -> float:
        out = 1.0
        for n, e in self.exponents:
            out *= values[n] ** e
        return out

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        parts = []
        for n, e in self.exponents:
            parts.append(n if e == 1 else f"{n}^{e}")
        return "*".join(parts)


@dataclass(frozen=True)
class DimensionSet:
    """A labelled family of monomials whose exponents run over {lo..hi}."""

    label: str
    members: frozenset[Monomial]
    exponent_lo: int
    exponent_hi: int

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, monomial: Monomial) -> bool:
        return monomial in self.members

    def scaled(self, factor: Monomial) -> frozenset[Monomial]:
        """Member-wise product with a fixed monomial."""
        return frozenset(factor * m for m in self.members)

    def issubset(self, other: "DimensionSet | frozenset[Monomial]") -> bool:
        target = other.members if isinstance(other, DimensionSet) else other
        return self.members <= target


def pairwise_disjoint(sets: Iterable[frozenset[Monomial]]) -> bool:
    seen: set[Monomial] = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True
