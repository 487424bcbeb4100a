import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simploc.group_rep import (
    GroupDatum,
    OpaqueGroup,
    RepRing,
    RepRingElement,
    augment,
    elementary_symmetric_class,
    representation_ring,
)

TRIV = GroupDatum(0)
T1 = GroupDatum(1)
T2 = GroupDatum(2)
MU3 = GroupDatum(0, (3,))


def test_trivial_group_ring_is_z():
    ring = representation_ring(TRIV)
    assert ring.describe() == "Z"
    assert ring.one + ring.one == ring.from_terms({(): 2})


def test_rank_one_torus_is_laurent():
    ring = representation_ring(T1)
    t = ring.character_class((1,))
    tinv = ring.character_class((-1,))
    assert t * tinv == ring.one
    assert ring.describe() == "Z[t1^(+-1)]"


def test_mu3_group_algebra_multiplication_table():
    # brute-force multiplication table of the three basis characters
    ring = representation_ring(MU3)
    basis = [ring.character_class((k,)) for k in range(3)]
    for i in range(3):
        for j in range(3):
            assert basis[i] * basis[j] == basis[(i + j) % 3]
    u = basis[1]
    assert u * u * u == ring.one
    assert ring.describe() == "Z[u1]/(u1^3 - 1)"


def test_character_normalization_mod_orders():
    g = GroupDatum(1, (2, 5))
    assert g.character((3, 7, -1)) == (3, 1, 4)
    ring = representation_ring(g)
    assert ring.character_class((0, 2, 5)) == ring.one


def test_elementary_symmetric_small_cases():
    ring = representation_ring(T2)
    a, b, c = (1, 0), (0, 1), (1, 1)
    assert elementary_symmetric_class(ring, [], 0) == ring.one
    e1 = elementary_symmetric_class(ring, [a, b], 1)
    assert e1 == ring.character_class(a) + ring.character_class(b)
    # expand prod (1 + x L_j) by brute force and read the x^2 coefficient
    e2 = elementary_symmetric_class(ring, [a, b, c], 2)
    expected = (
        ring.character_class(a) * ring.character_class(b)
        + ring.character_class(a) * ring.character_class(c)
        + ring.character_class(b) * ring.character_class(c)
    )
    assert e2 == expected


def test_elementary_symmetric_range_error():
    ring = representation_ring(T1)
    with pytest.raises(ValueError):
        elementary_symmetric_class(ring, [(1,)], 2)


def test_augment_examples():
    ring = representation_ring(T2)
    t1, t2 = ring.gens()
    assert augment(ring.zero) == 0
    assert augment(t1 + 2 * ring.character_class((0, -1))) == 3
    assert augment((t1 - ring.one) * (t1 + ring.one)) == 0


def test_opaque_group_rejected():
    with pytest.raises(ValueError):
        RepRing(OpaqueGroup("irreducibles of some reductive group"))


# ---------------------------------------------------------------------------
# property tests


def elements(group: GroupDatum, max_terms: int = 8):
    coord = st.integers(min_value=-3, max_value=3)
    char = st.tuples(*([coord] * group.lattice_rank))
    return st.dictionaries(char, st.integers(min_value=-5, max_value=5), max_size=max_terms).map(
        lambda d: RepRingElement(group, d)
    )


@settings(max_examples=60, deadline=None)
@given(elements(T2), elements(T2), elements(T2))
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(elements(GroupDatum(1, (4,))), elements(GroupDatum(1, (4,))))
def test_ring_axioms_with_torsion(a, b):
    assert a * b == b * a
    assert (a + b) * (a - b) == a * a - b * b


@settings(max_examples=80, deadline=None)
@given(elements(T2), elements(T2))
def test_augment_is_ring_homomorphism(a, b):
    assert augment(a * b) == augment(a) * augment(b)
    assert augment(a + b) == augment(a) + augment(b)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=0, max_size=5
    )
)
def test_generating_function_identity(chars):
    # sum_i e_i x^i == prod_j (1 + [L_j] x): the x^i coefficient of the
    # product is the sum over i-subsets of the character products
    from itertools import combinations

    ring = representation_ring(T2)
    for i in range(len(chars) + 1):
        expected = ring.zero
        for subset in combinations(chars, i):
            term = ring.one
            for c in subset:
                term = term * ring.character_class(c)
            expected = expected + term
        assert elementary_symmetric_class(ring, chars, i) == expected
