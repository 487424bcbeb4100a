"""Graded coefficient tables and exact arithmetic on f.g. abelian groups.

Degreewise homotopy groups are carried as Smith-form descriptors (free rank
plus a divisibility chain of invariant factors).  A rational flag means
"tensor with Q": the free rank survives and torsion is annihilated.  Smith
normal form over Z, with unimodular transforms, is the workhorse for
kernel/cokernel extraction in the exact-sequence solver.
"""

from __future__ import annotations

from dataclasses import dataclass


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _canonical_chain(factors: list[int]) -> tuple[int, ...]:
    """Merge arbitrary torsion factors into the canonical divisibility chain.

    Splits every factor into prime powers, then for each prime stacks the
    powers from the largest down, so factor k divides factor k+1.
    """
    by_prime: dict[int, list[int]] = {}
    for f in factors:
        if f < 0:
            f = -f
        if f in (0, 1):
            continue
        n = f
        d = 2
        while d * d <= n:
            if n % d == 0:
                e = 0
                while n % d == 0:
                    n //= d
                    e += 1
                by_prime.setdefault(d, []).append(d**e)
            d += 1
        if n > 1:
            by_prime.setdefault(n, []).append(n)
    for powers in by_prime.values():
        powers.sort(reverse=True)
    depth = max((len(p) for p in by_prime.values()), default=0)
    chain = []
    for level in range(depth - 1, -1, -1):
        val = 1
        for powers in by_prime.values():
            if level < len(powers):
                val *= powers[level]
        chain.append(val)
    return tuple(chain)


@dataclass(frozen=True)
class FgAbGroup:
    """Z^free_rank plus torsion in canonical Smith form.

    Equality of descriptors is isomorphism of groups.  With rational=True the
    descriptor stands for a Q-vector space of the given rank.
    """

    free_rank: int
    invariant_factors: tuple[int, ...] = ()
    rational: bool = False

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free_rank must be non-negative")
        factors = () if self.rational else _canonical_chain(list(self.invariant_factors))
        object.__setattr__(self, "invariant_factors", factors)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("infinite group")
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def describe(self) -> str:
        unit = "Q" if self.rational else "Z"
        parts = []
        if self.free_rank == 1:
            parts.append(unit)
        elif self.free_rank > 1:
            parts.append(f"{unit}^{self.free_rank}")
        parts += [f"Z/{f}" for f in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FgAbGroup({self.describe()})"


ZERO_GROUP = FgAbGroup(0)
Z = FgAbGroup(1)
Q = FgAbGroup(1, rational=True)


def direct_sum(*groups: FgAbGroup) -> FgAbGroup:
    """Direct sum, recanonicalized.  Mixing Z- and Q-descriptors is rejected:
    the rational flag is a global coefficient choice, not a summand."""
    groups = [g for g in groups if not g.is_zero]
    if not groups:
        return ZERO_GROUP
    rational = groups[0].rational
    if any(g.rational != rational for g in groups):
        raise ValueError("cannot mix integral and rational descriptors in a sum")
    free = sum(g.free_rank for g in groups)
    factors: list[int] = []
    for g in groups:
        factors.extend(g.invariant_factors)
    return FgAbGroup(free, tuple(factors), rational)


def tensor_with_free(group: FgAbGroup, rank: int) -> FgAbGroup:
    """Tensor with Z^rank: every summand is repeated rank times."""
    if rank < 0:
        raise ValueError("rank must be non-negative")
    if rank == 0 or group.is_zero:
        return ZERO_GROUP
    return FgAbGroup(
        group.free_rank * rank, group.invariant_factors * rank, group.rational
    )


def rationalize(group: FgAbGroup) -> FgAbGroup:
    return FgAbGroup(group.free_rank, (), True)


def hom_rank(source: FgAbGroup, target: FgAbGroup) -> int:
    """Free rank of Hom(source, target): torsion maps nowhere free."""
    return source.free_rank * target.free_rank


def summand_complement(total: FgAbGroup, part: FgAbGroup) -> FgAbGroup:
    """The complement C with total = part + C, when it exists.

    Krull-Schmidt for f.g. abelian groups makes C well defined; raises if
    part does not embed as a direct summand descriptor-wise.
    """
    if total.rational != part.rational and not part.is_zero and not total.is_zero:
        raise ValueError("cannot cancel between integral and rational descriptors")
    free = total.free_rank - part.free_rank
    if free < 0:
        raise ValueError("free rank of summand exceeds the total")
    remaining = list(total.invariant_factors)
    for f in part.invariant_factors:
        if f not in remaining:
            raise ValueError(f"torsion factor Z/{f} is not a summand of the total")
        remaining.remove(f)
    return FgAbGroup(free, tuple(remaining), total.rational)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """L @ A @ R = D with L, R unimodular and D diagonal with a
    divisibility chain.  factors lists the nonzero diagonal entries."""

    factors: tuple[int, ...]
    rank: int
    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]
    rows: int
    cols: int

    def cokernel(self) -> FgAbGroup:
        """Z^rows / column span of A."""
        torsion = tuple(f for f in self.factors if f != 1)
        return FgAbGroup(self.rows - self.rank, torsion)

    def kernel_rank(self) -> int:
        return self.cols - self.rank

    def kernel_basis(self) -> list[list[int]]:
        """Columns of R spanning the kernel of A as a map Z^cols -> Z^rows."""
        return [
            [self.right[i][j] for i in range(self.cols)]
            for j in range(self.rank, self.cols)
        ]


def _swap_rows(m: list[list[int]], i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]


def _swap_cols(m: list[list[int]], i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def snf(matrix: list[list[int]]) -> SmithForm:
    """Smith normal form of an integer matrix, with transform witnesses.

    Handles empty shapes (0 x n, m x 0).  Elimination uses 2x2 extended-gcd
    combinations: when the pivot already divides a target entry the
    combination degenerates to a shear, which keeps cleared entries clear,
    and otherwise it strictly shrinks the pivot, so entry growth stays tame.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    for row in matrix:
        if len(row) != cols:
            raise ValueError("ragged matrix")
    d = [[int(x) for x in row] for row in matrix]
    left = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    right = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def negate_row(i: int) -> None:
        for jj in range(cols):
            d[i][jj] = -d[i][jj]
        for jj in range(rows):
            left[i][jj] = -left[i][jj]

    def clear_entry_by_rows(k: int, i: int) -> None:
        """Zero d[i][k] against the pivot row k, replacing the pivot by the
        gcd when necessary."""
        a, b = d[k][k], d[i][k]
        if b % a == 0:
            q = b // a
            for jj in range(cols):
                d[i][jj] -= q * d[k][jj]
            for jj in range(rows):
                left[i][jj] -= q * left[k][jj]
            return
        x, y, g = _xgcd(a, b)
        ag, mbg = a // g, -(b // g)
        for jj in range(cols):
            rk, ri = d[k][jj], d[i][jj]
            d[k][jj] = x * rk + y * ri
            d[i][jj] = mbg * rk + ag * ri
        for jj in range(rows):
            rk, ri = left[k][jj], left[i][jj]
            left[k][jj] = x * rk + y * ri
            left[i][jj] = mbg * rk + ag * ri

    def clear_entry_by_cols(k: int, j: int) -> None:
        """Zero d[k][j] against the pivot column k."""
        a, b = d[k][k], d[k][j]
        if b % a == 0:
            q = b // a
            for ii in range(rows):
                d[ii][j] -= q * d[ii][k]
            for ii in range(cols):
                right[ii][j] -= q * right[ii][k]
            return
        x, y, g = _xgcd(a, b)
        ag, mbg = a // g, -(b // g)
        for ii in range(rows):
            ck, cj = d[ii][k], d[ii][j]
            d[ii][k] = x * ck + y * cj
            d[ii][j] = mbg * ck + ag * cj
        for ii in range(cols):
            ck, cj = right[ii][k], right[ii][j]
            right[ii][k] = x * ck + y * cj
            right[ii][j] = mbg * ck + ag * cj

    def diagonalize(start: int) -> int:
        """Clear the submatrix from (start, start) on; returns the rank."""
        k = start
        while k < min(rows, cols):
            pivot = None
            for i in range(k, rows):
                for j in range(k, cols):
                    v = d[i][j]
                    if v and (pivot is None or abs(v) < abs(d[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                return k
            _swap_rows(d, k, pivot[0])
            _swap_rows(left, k, pivot[0])
            _swap_cols(d, k, pivot[1])
            _swap_cols(right, k, pivot[1])
            dirty = True
            while dirty:
                dirty = False
                for i in range(k + 1, rows):
                    if d[i][k]:
                        clear_entry_by_rows(k, i)
                if any(d[i][k] for i in range(k + 1, rows)):
                    dirty = True
                    continue
                for j in range(k + 1, cols):
                    if d[k][j]:
                        clear_entry_by_cols(k, j)
                        # a gcd step pollutes the cleared column below
                        if any(d[i][k] for i in range(k + 1, rows)):
                            dirty = True
            if d[k][k] < 0:
                negate_row(k)
            k += 1
        return k

    rank = diagonalize(0)
    # enforce the chain d[i][i] | d[i+1][i+1]; each fix re-eliminates locally
    while True:
        bad = next(
            (i for i in range(rank - 1) if d[i + 1][i + 1] % d[i][i] != 0),
            None,
        )
        if bad is None:
            break
        # fold the next diagonal entry into column bad, then re-clear
        for ii in range(rows):
            d[ii][bad] += d[ii][bad + 1]
        for ii in range(cols):
            right[ii][bad] += right[ii][bad + 1]
        diagonalize(bad)

    factors = tuple(d[i][i] for i in range(rank))
    return SmithForm(
        factors=factors,
        rank=rank,
        left=tuple(tuple(row) for row in left),
        right=tuple(tuple(row) for row in right),
        rows=rows,
        cols=cols,
    )


def cokernel_of_map(matrix: list[list[int]], target_rank: int) -> FgAbGroup:
    """Cokernel of the map given by an integer matrix into Z^target_rank.

    The matrix has target_rank rows (possibly zero columns)."""
    if len(matrix) != target_rank:
        raise ValueError("matrix row count does not match the target rank")
    if target_rank == 0:
        return ZERO_GROUP
    if not matrix[0]:
        return FgAbGroup(target_rank)
    return snf(matrix).cokernel()


# ---------------------------------------------------------------------------
# coefficient tables


@dataclass(frozen=True)
class Periodicity:
    """Support repeats with the given period.  A two-sided witness is an
    invertible generator; one-sided (downward) periodicity comes from a
    non-invertible generator pushing the support toward lower degrees."""

    period: int
    generator: str
    two_sided: bool = True

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ValueError("period must be positive")


@dataclass(frozen=True)
class CoefficientTable:
    """A graded coefficient ring E_*(pt) as a degreewise table.

    degree_groups stores the explicit support window; degrees outside it are
    zero unless a periodicity witness extends the window.  Ring structure
    beyond named generators is not modelled.
    """

    name: str
    degree_groups: tuple[tuple[int, FgAbGroup], ...]
    periodicity: Periodicity | None = None
    generators: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        stored = dict(self.degree_groups)
        if len(stored) != len(self.degree_groups):
            raise ValueError("duplicate degree rows")
        object.__setattr__(
            self,
            "degree_groups",
            tuple(sorted((d, g) for d, g in stored.items() if not g.is_zero)),
        )
        if self.group_at(0).free_rank < 1:
            raise ValueError("degree-0 group must have free rank >= 1 (unital ring)")

    def _stored(self) -> dict[int, FgAbGroup]:
        return dict(self.degree_groups)

    def group_at(self, degree: int) -> FgAbGroup:
        """Total lookup: zero outside the (possibly periodic) support."""
        stored = self._stored()
        if degree in stored:
            return stored[degree]
        if self.periodicity is None or not stored:
            return ZERO_GROUP
        lo = min(stored)
        hi = max(stored)
        p = self.periodicity.period
        if self.periodicity.two_sided:
            rep = lo + ((degree - lo) % p)
            return stored.get(rep, ZERO_GROUP)
        if degree > hi:
            return ZERO_GROUP
        rep = degree
        while rep < lo:
            rep += p
        return stored.get(rep, ZERO_GROUP)

    @property
    def min_degree(self) -> int | None:
        """Lower support bound, or None when periodicity extends downward."""
        if self.periodicity is not None:
            return None
        if not self.degree_groups:
            return 0
        return self.degree_groups[0][0]


_BUILTINS = ("unit", "bott", "hcminus_rational", "rational_deg0")


def builtin_table(name: str) -> CoefficientTable:
    """The built-in coefficient tables.

    unit: Z in degree 0 only.  bott: Z in every even degree with an
    invertible degree-2 generator.  hcminus_rational: Q in degrees
    0, -2, -4, ... with the non-invertible degree -2 generator u.
    rational_deg0: Q in degree 0 only.
    """
    if name == "unit":
        return CoefficientTable("unit", ((0, Z),))
    if name == "bott":
        return CoefficientTable(
            "bott",
            ((0, Z),),
            periodicity=Periodicity(2, "beta", two_sided=True),
            generators=(("beta", 2),),
        )
    if name == "hcminus_rational":
        return CoefficientTable(
            "hcminus_rational",
            ((0, Q),),
            periodicity=Periodicity(2, "u", two_sided=False),
            generators=(("u", -2),),
        )
    if name == "rational_deg0":
        return CoefficientTable("rational_deg0", ((0, Q),))
    raise LookupError(f"unknown builtin table {name!r} (choose from {_BUILTINS})")


def parse_table_file(name: str, text: str) -> CoefficientTable:
    """Parse a user coefficient table: one record per degree.

    Record format: ``<degree> <free_rank> [<factor> ...] [Q]`` with ``#``
    comments.  The Q flag marks the degree as rationalized (torsion dropped).
    """
    rows: list[tuple[int, FgAbGroup]] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        rational = False
        if parts and parts[-1].upper() == "Q":
            rational = True
            parts = parts[:-1]
        if len(parts) < 2:
            raise ValueError(f"{name}:{lineno}: expected '<degree> <free_rank> ...'")
        try:
            degree = int(parts[0])
            free_rank = int(parts[1])
            factors = tuple(int(p) for p in parts[2:])
        except ValueError as exc:
            raise ValueError(f"{name}:{lineno}: {exc}") from None
        if degree in seen:
            raise ValueError(f"{name}:{lineno}: duplicate degree {degree}")
        seen.add(degree)
        rows.append((degree, FgAbGroup(free_rank, factors, rational)))
    return CoefficientTable(name, tuple(rows))
