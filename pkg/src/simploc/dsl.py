"""Construction trees for simple varieties, with validation and classification.

A variety is declared as a term built from: the point, finite disjoint
unions, flag bundles in equivariant vector bundles, stratified descent along
flag bundles in two-term-presented sheaves, and abstract blowup squares
(split or not).  Classification is syntactic: a tree is tagged B when every
blowup square carries a declared splitting, C when some square does not, and
C_p when strictly henselian base points of residue characteristic p appear.
A C tag means "B not established by this tree", not "provably not in B".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .group_rep import GroupDatum

BLOWUP_CORNERS = ("X", "Y", "Z", "E")
SPLIT_KINDS = ("retraction", "section")


@dataclass(frozen=True)
class BundleDatum:
    """An equivariant vector bundle: rank, plus optional split weights.

    split_characters, when present, declares the bundle as a sum of
    characters (one per rank).  twist_labels record O(i)-type twists on
    built-in bases; they are bookkeeping for example constructors only.
    """

    rank: int
    split_characters: Optional[tuple[tuple[int, ...], ...]] = None
    twist_labels: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.split_characters is not None:
            object.__setattr__(
                self,
                "split_characters",
                tuple(tuple(c) for c in self.split_characters),
            )
        if self.twist_labels is not None:
            object.__setattr__(self, "twist_labels", tuple(self.twist_labels))


@dataclass(frozen=True)
class SheafDatum:
    """A sheaf given by a two-term presentation of vector bundles.

    generic_rank is the everywhere-lower-bound rank used by the descent
    rule; presentation_ranks = (rank E1, rank E0) for the cokernel
    presentation E1 -> E0 ->> F.
    """

    generic_rank: int
    presentation_ranks: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "presentation_ranks", tuple(self.presentation_ranks)
        )


@dataclass(frozen=True)
class Point:
    def __repr__(self) -> str:
        return "Point()"


@dataclass(frozen=True)
class HenselianBase:
    """Classification-only base point over a strictly henselian, weakly
    regular, stably coherent ring of residue characteristic p.  Carries no
    computable module."""

    p: int


@dataclass(frozen=True)
class Disjoint:
    children: tuple["Tree", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class FlagBundle:
    """Relative flag bundle of type d_vec in the given bundle over base."""

    base: "Tree"
    bundle: BundleDatum
    d_vec: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_vec", tuple(self.d_vec))


@dataclass(frozen=True)
class StratifiedDescent:
    """Defines the base X given the total space of a stratified flag bundle.

    total_space is the (known) tree upstairs; the node's value is the
    descended X.  oracle_rank, when declared, asserts the degree-zero rank
    of X; every result consuming it is flagged.
    """

    total_space: "Tree"
    sheaf: SheafDatum
    d_vec: tuple[int, ...]
    oracle_rank: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_vec", tuple(self.d_vec))


@dataclass(frozen=True)
class Blowup:
    """Abstract blowup square (X, Y, Z, E) with one unknown corner.

    known maps three corner labels to trees; the node's value is the
    unknown corner.  split declares how the square splits (retraction of
    E -> Y, or section of Y -> X); None means no splitting is declared.
    comparison_maps carries per-degree integer matrices for the map
    E(Y) + E(Z) -> E(E), consumed by the non-split solver with trivial G.
    """

    known: tuple[tuple[str, "Tree"], ...]
    unknown_corner: str = "X"
    split: Optional[str] = None
    comparison_maps: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...] = ()

    def __post_init__(self) -> None:
        known = tuple(sorted(dict(self.known).items(), key=lambda kv: BLOWUP_CORNERS.index(kv[0])))
        object.__setattr__(self, "known", known)
        maps = tuple(
            sorted(
                (int(d), tuple(tuple(int(x) for x in row) for row in m))
                for d, m in self.comparison_maps
            )
        )
        object.__setattr__(self, "comparison_maps", maps)

    def corner(self, label: str) -> "Tree":
        for name, tree in self.known:
            if name == label:
                return tree
        raise KeyError(f"corner {label} is the unknown of this square")

    @property
    def known_labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.known)

    def map_at(self, degree: int) -> Optional[tuple[tuple[int, ...], ...]]:
        for d, m in self.comparison_maps:
            if d == degree:
                return m
        return None


Tree = Union[Point, HenselianBase, Disjoint, FlagBundle, StratifiedDescent, Blowup]


def children(tree: Tree) -> tuple[Tree, ...]:
    """Child subtrees in stable order; indices name path components."""
    if isinstance(tree, (Point, HenselianBase)):
        return ()
    if isinstance(tree, Disjoint):
        return tree.children
    if isinstance(tree, FlagBundle):
        return (tree.base,)
    if isinstance(tree, StratifiedDescent):
        return (tree.total_space,)
    if isinstance(tree, Blowup):
        return tuple(t for _, t in tree.known)
    raise TypeError(f"not a construction tree: {tree!r}")


def walk(tree: Tree, path: str = ""):
    """Yield (path, node) pairs, parents before children."""
    yield path, tree
    for i, child in enumerate(children(tree)):
        yield from walk(child, f"{path}/{i}" if path else str(i))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str

    def __repr__(self) -> str:
        where = self.path if self.path else "(root)"
        return f"{where}: {self.rule}"


def validate(tree: Tree, group: GroupDatum) -> list[Violation]:
    """Check all structural invariants recursively; never raises.

    Returns the empty list when the tree is well formed for the group.
    """
    out: list[Violation] = []

    def bad(path: str, rule: str) -> None:
        out.append(Violation(path, rule))

    for path, node in walk(tree):
        if isinstance(node, HenselianBase):
            if node.p < 2 or any(node.p % q == 0 for q in range(2, int(node.p**0.5) + 1)):
                bad(path, f"henselian residue characteristic {node.p} is not prime")
        elif isinstance(node, FlagBundle):
            b = node.bundle
            if b.rank < 1:
                bad(path, "bundle rank must be >= 1")
            if not node.d_vec or any(d < 1 for d in node.d_vec):
                bad(path, "dimension vector entries must be positive")
            if sum(node.d_vec) > b.rank:
                bad(path, f"d exceeds rank: total {sum(node.d_vec)} > {b.rank}")
            if b.split_characters is not None:
                if len(b.split_characters) != b.rank:
                    bad(path, "split characters must match the bundle rank")
                for c in b.split_characters:
                    if len(c) != group.lattice_rank:
                        bad(
                            path,
                            f"character {c} has {len(c)} coordinates; "
                            f"the lattice has rank {group.lattice_rank}",
                        )
            if b.twist_labels is not None and len(b.twist_labels) != b.rank:
                bad(path, "twist labels must match the bundle rank")
        elif isinstance(node, StratifiedDescent):
            s = node.sheaf
            if s.generic_rank < 0:
                bad(path, "generic rank must be non-negative")
            if s.generic_rank > s.presentation_ranks[1]:
                bad(path, "generic rank exceeds the presenting bundle rank")
            if not node.d_vec or any(d < 1 for d in node.d_vec):
                bad(path, "dimension vector entries must be positive")
            if sum(node.d_vec) > s.generic_rank:
                bad(
                    path,
                    f"d exceeds generic rank: total {sum(node.d_vec)} > {s.generic_rank}",
                )
            if node.oracle_rank is not None and node.oracle_rank < 0:
                bad(path, "oracle rank must be non-negative")
        elif isinstance(node, Blowup):
            labels = set(node.known_labels)
            if node.unknown_corner not in BLOWUP_CORNERS:
                bad(path, f"unknown corner {node.unknown_corner!r} is not one of X, Y, Z, E")
            expected = set(BLOWUP_CORNERS) - {node.unknown_corner}
            if labels != expected:
                bad(
                    path,
                    f"blowup square must name exactly the corners {sorted(expected)}; got {sorted(labels)}",
                )
            if node.split is not None and node.split not in SPLIT_KINDS:
                bad(path, f"split must be one of {SPLIT_KINDS} or absent")
            for degree, matrix in node.comparison_maps:
                widths = {len(row) for row in matrix}
                if len(widths) > 1:
                    bad(path, f"comparison map at degree {degree} is ragged")
    return out


# ---------------------------------------------------------------------------
# membership classification


@dataclass(frozen=True)
class MembershipClass:
    """Classification outcome.  Tag strength: B > C > C_p; invalid when the
    tree mixes henselian residue characteristics."""

    tag: str
    prime: Optional[int] = None
    assumed_oracles: tuple[str, ...] = ()
    b_refuted: Optional[object] = None

    _STRENGTH = {"B": 3, "C": 2, "C_p": 1, "invalid": 0}

    def at_least(self, tag: str) -> bool:
        return self._STRENGTH[self.tag] >= self._STRENGTH[tag]

    def describe(self) -> str:
        if self.tag == "C_p":
            return f"C_p (p = {self.prime})"
        return self.tag


def classify(tree: Tree) -> MembershipClass:
    """Syntactic membership class of a validated tree.

    B when every blowup declares a splitting and no henselian base appears;
    C when no henselian base appears but some blowup is unsplit; C_p when
    henselian bases appear and agree on the prime; invalid on mixed primes.
    """
    primes: set[int] = set()
    all_split = True
    oracles: list[str] = []
    for path, node in walk(tree):
        if isinstance(node, HenselianBase):
            primes.add(node.p)
        elif isinstance(node, Blowup) and node.split is None:
            all_split = False
        elif isinstance(node, StratifiedDescent) and node.oracle_rank is not None:
            oracles.append(path if path else "(root)")
    oracle_tuple = tuple(oracles)
    if len(primes) > 1:
        return MembershipClass("invalid", assumed_oracles=oracle_tuple)
    if primes:
        return MembershipClass("C_p", prime=primes.pop(), assumed_oracles=oracle_tuple)
    if all_split:
        return MembershipClass("B", assumed_oracles=oracle_tuple)
    return MembershipClass("C", assumed_oracles=oracle_tuple)


# ---------------------------------------------------------------------------
# example library


def _standard_characters(group: GroupDatum, count: int) -> Optional[tuple[tuple[int, ...], ...]]:
    """Standard torus weights on the first `count` coordinates, when the
    torus is big enough; None otherwise (non-equivariant tree)."""
    if group.free_rank >= count and not group.finite_orders:
        return tuple(group.basis_character(i) for i in range(count))
    return None


NODE_DEGREE0_MAP = ((1, 1, 1), (1, 1, 1))


def example_library(name: str, *params, group: GroupDatum = GroupDatum(0)) -> Tree:
    """Named construction trees for the worked examples.

    Toric entries (projective spaces, Grassmannians, flags, Hirzebruch
    surfaces) carry standard torus weights when the group is a torus of
    sufficient rank.
    """
    if name == "projective_space":
        (n,) = params
        if n < 0:
            raise ValueError("projective space dimension must be >= 0")
        return FlagBundle(
            Point(),
            BundleDatum(n + 1, split_characters=_standard_characters(group, n + 1)),
            (1,),
        )
    if name == "grassmannian":
        n, d = params
        return FlagBundle(
            Point(),
            BundleDatum(n, split_characters=_standard_characters(group, n)),
            (d,),
        )
    if name == "flag":
        n, d_vec = params
        return FlagBundle(
            Point(),
            BundleDatum(n, split_characters=_standard_characters(group, n)),
            tuple(d_vec),
        )
    if name == "hirzebruch":
        (m,) = params
        base = example_library("projective_space", 1, group=group)
        return FlagBundle(base, BundleDatum(2, twist_labels=(0, -m)), (1,))
    if name == "cusp":
        # blowup of the cuspidal curve: cover P^1, center pt, exceptional pt;
        # the exceptional inclusion retracts via the structure map
        return Blowup(
            known=(
                ("Y", example_library("projective_space", 1, group=group)),
                ("Z", Point()),
                ("E", Point()),
            ),
            unknown_corner="X",
            split="retraction",
        )
    if name == "node":
        # nodal curve: exceptional locus two points over one center point;
        # no splitting exists, and the degree-0 comparison map is the
        # restriction matrix (a, b, c) -> (a+b+c, a+b+c)
        return Blowup(
            known=(
                ("Y", example_library("projective_space", 1, group=group)),
                ("Z", Point()),
                ("E", Disjoint((Point(), Point()))),
            ),
            unknown_corner="X",
            split=None,
            comparison_maps=((0, NODE_DEGREE0_MAP),),
        )
    if name == "projective_cone":
        base_tree, twist = params
        cover = FlagBundle(base_tree, BundleDatum(2, twist_labels=(0, twist)), (1,))
        return Blowup(
            known=(("Y", cover), ("Z", Point()), ("E", base_tree)),
            unknown_corner="X",
            split="retraction",
        )
    if name == "cone_of_P1":
        p1 = example_library("projective_space", 1, group=group)
        return example_library("projective_cone", p1, 2, group=group)
    raise LookupError(f"unknown library entry {name!r}")


LIBRARY_ENTRIES = (
    ("projective_space", (1,)),
    ("projective_space", (2,)),
    ("grassmannian", (4, 2)),
    ("flag", (3, (1, 1))),
    ("hirzebruch", (2,)),
    ("cusp", ()),
    ("node", ()),
    ("cone_of_P1", ()),
)
