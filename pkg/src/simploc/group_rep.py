"""Diagonalizable groups and exact arithmetic in their representation rings.

A group is presented by the rank of its torus part and the orders of its
finite cyclic factors.  Its character lattice M = Z^r x prod Z/l_j is a
finitely generated abelian group; the representation ring is the integral
group algebra Z[M], implemented as finitely supported maps from lattice
elements to integers with convolution product.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping


@dataclass(frozen=True)
class GroupDatum:
    """A split torus times finite roots-of-unity factors.

    free_rank is the number of G_m factors, finite_orders the orders of the
    cyclic factors (each >= 2).  The trivial group is GroupDatum(0, ()).
    """

    free_rank: int
    finite_orders: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free_rank must be non-negative")
        object.__setattr__(self, "finite_orders", tuple(self.finite_orders))
        for order in self.finite_orders:
            if order < 2:
                raise ValueError(f"finite factor order {order} must be >= 2")

    @property
    def lattice_rank(self) -> int:
        return self.free_rank + len(self.finite_orders)

    @property
    def is_trivial(self) -> bool:
        return self.lattice_rank == 0

    def character(self, coords: Iterable[int]) -> tuple[int, ...]:
        """Normalize coordinates to a canonical character-lattice element.

        Torsion coordinates are reduced mod the corresponding factor order,
        which makes tuple equality coincide with lattice equality.
        """
        coords = tuple(coords)
        if len(coords) != self.lattice_rank:
            raise ValueError(
                f"expected {self.lattice_rank} coordinates, got {len(coords)}"
            )
        free = coords[: self.free_rank]
        tors = tuple(
            c % order for c, order in zip(coords[self.free_rank :], self.finite_orders)
        )
        return free + tors

    def character_add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return self.character(x + y for x, y in zip(a, b))

    def basis_character(self, i: int) -> tuple[int, ...]:
        """The i-th coordinate character (weight of the i-th lattice slot)."""
        if not 0 <= i < self.lattice_rank:
            raise ValueError(f"no lattice coordinate {i}")
        return self.character(1 if j == i else 0 for j in range(self.lattice_rank))

    def lattice_elements(self):
        """Iterate the whole lattice; only callable when it is finite."""
        if self.free_rank > 0:
            raise ValueError("infinite character lattice")
        return (
            self.character(c) for c in product(*(range(o) for o in self.finite_orders))
        )


TRIVIAL_GROUP = GroupDatum(0, ())


@dataclass(frozen=True)
class OpaqueGroup:
    """A linearly reductive group known only through an irreducible index set.

    No ring structure is attached; every operation that needs character
    arithmetic rejects such groups.
    """

    label: str


class RepRingElement:
    """Element of the group algebra Z[M]: finite map character -> coefficient.

    Zero-coefficient terms are never stored, so equality is map equality.
    Instances are immutable; arithmetic returns fresh elements.
    """

    __slots__ = ("group", "_terms", "_hash")

    def __init__(self, group: GroupDatum, terms: Mapping[tuple[int, ...], int]):
        self.group = group
        clean = {}
        for coords, coeff in terms.items():
            if coeff:
                clean[group.character(coords)] = (
                    clean.get(group.character(coords), 0) + coeff
                )
        self._terms = {c: v for c, v in clean.items() if v}
        self._hash: int | None = None

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RepRingElement(self.group, {self.group.character([0] * self.group.lattice_rank): other})
        if not isinstance(other, RepRingElement):
            return NotImplemented
        return self.group == other.group and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.group, frozenset(self._terms.items())))
        return self._hash

    def __add__(self, other: "RepRingElement") -> "RepRingElement":
        other = self._coerce(other)
        out = dict(self._terms)
        for c, v in other._terms.items():
            out[c] = out.get(c, 0) + v
        return RepRingElement(self.group, out)

    def __neg__(self) -> "RepRingElement":
        return RepRingElement(self.group, {c: -v for c, v in self._terms.items()})

    def __sub__(self, other: "RepRingElement") -> "RepRingElement":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "RepRingElement":
        other = self._coerce(other)
        out: dict[tuple[int, ...], int] = {}
        for c1, v1 in self._terms.items():
            for c2, v2 in other._terms.items():
                key = self.group.character_add(c1, c2)
                out[key] = out.get(key, 0) + v1 * v2
        return RepRingElement(self.group, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RepRingElement":
        if n < 0:
            raise ValueError("negative powers not supported")
        result = RepRing(self.group).one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _coerce(self, other) -> "RepRingElement":
        if isinstance(other, RepRingElement):
            if other.group != self.group:
                raise ValueError("elements of different representation rings")
            return other
        if isinstance(other, int):
            zero_char = self.group.character([0] * self.group.lattice_rank)
            return RepRingElement(self.group, {zero_char: other})
        raise TypeError(f"cannot coerce {other!r} into the representation ring")

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for coords in sorted(self._terms):
            coeff = self._terms[coords]
            mono = _monomial_str(coords, self.group)
            if mono == "1":
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(mono)
            elif coeff == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _monomial_str(coords: tuple[int, ...], group: GroupDatum) -> str:
    factors = []
    for i, e in enumerate(coords):
        if e == 0:
            continue
        name = f"t{i + 1}" if i < group.free_rank else f"u{i - group.free_rank + 1}"
        factors.append(name if e == 1 else f"{name}^{e}")
    return "*".join(factors) if factors else "1"


class RepRing:
    """Arithmetic handle for Z[M]: carries the group and element constructors.

    The ring is the degree-zero coefficient ring of the equivariant theory on
    the point; as a module over itself it is free of rank one.
    """

    def __init__(self, group: GroupDatum):
        if isinstance(group, OpaqueGroup):
            raise ValueError(
                "opaque linearly reductive groups carry no computable ring structure"
            )
        self.group = group

    @property
    def zero(self) -> RepRingElement:
        return RepRingElement(self.group, {})

    @property
    def one(self) -> RepRingElement:
        zero_char = self.group.character([0] * self.group.lattice_rank)
        return RepRingElement(self.group, {zero_char: 1})

    def character_class(self, coords: Iterable[int]) -> RepRingElement:
        """The class [L] of the line with the given character."""
        return RepRingElement(self.group, {self.group.character(coords): 1})

    def from_terms(self, terms: Mapping[tuple[int, ...], int]) -> RepRingElement:
        return RepRingElement(self.group, terms)

    def gens(self) -> list[RepRingElement]:
        return [
            self.character_class(
                [1 if j == i else 0 for j in range(self.group.lattice_rank)]
            )
            for i in range(self.group.lattice_rank)
        ]

    def describe(self) -> str:
        g = self.group
        if g.lattice_rank == 0:
            return "Z"
        gens = [f"t{i + 1}^(+-1)" for i in range(g.free_rank)]
        gens += [f"u{j + 1}" for j in range(len(g.finite_orders))]
        rels = [
            f"u{j + 1}^{order} - 1" for j, order in enumerate(g.finite_orders)
        ]
        head = f"Z[{', '.join(gens)}]"
        return head if not rels else f"{head}/({', '.join(rels)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RepRing) and other.group == self.group

    def __hash__(self) -> int:
        return hash(("RepRing", self.group))

    def __repr__(self) -> str:
        return f"RepRing({self.describe()})"


def representation_ring(group: GroupDatum) -> RepRing:
    """The representation ring Z[M] of a diagonalizable group.

    Z for the trivial group, the Laurent ring in n variables for a rank-n
    torus, and the evident group algebra when cyclic factors are present.
    """
    return RepRing(group)


def elementary_symmetric_class(
    ring: RepRing, chars: list[tuple[int, ...]], i: int
) -> RepRingElement:
    """e_i evaluated on the character classes: the class of the i-th exterior
    power of the split bundle with the given weights.

    Computed from the generating function prod_j (1 + x [L_j]) by keeping the
    coefficients of x as a vector of ring elements.
    """
    if not 0 <= i <= len(chars):
        raise ValueError(f"exterior power {i} out of range for {len(chars)} characters")
    coeffs = [ring.one] + [ring.zero] * len(chars)
    for c in chars:
        cls = ring.character_class(c)
        for k in range(len(chars), 0, -1):
            coeffs[k] = coeffs[k] + coeffs[k - 1] * cls
    return coeffs[i]


def augment(element: RepRingElement) -> int:
    """Sum of coefficients: the rank of the underlying non-equivariant class.

    Ring homomorphism Z[M] -> Z sending every character to 1, i.e. restriction
    along the trivial-group inclusion.
    """
    return sum(element.terms.values())
