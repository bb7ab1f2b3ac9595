import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import RP2_FACETS, complex_betti
from unitspec.errors import IdentityViolation, InsufficientDimension
from unitspec.snf import AbelianGroup
from unitspec.sset import (
    FinSSet,
    PointedFinSSet,
    SMap,
    chains,
    disjoint_union,
    homology,
    pi0,
    plus,
    product,
    product_map,
    reduced_homology,
    smash,
    smash_map,
    standard_sphere,
)

Z = AbelianGroup(1)
O = AbelianGroup()


def G(*parts):
    return AbelianGroup.from_strings(parts)


def circle():
    return standard_sphere(1)


def boundary(n):
    return FinSSet.from_complex([tuple(v for v in range(n + 2) if v != j) for j in range(n + 2)])


def test_point_homology():
    assert homology(FinSSet.point(), 2).groups == [Z, O, O]


def test_sphere2_homology():
    assert homology(boundary(2), 2).groups == [Z, O, Z]


def test_rp2_homology_against_mod_p_ranks():
    X = FinSSet.from_complex(RP2_FACETS)
    X.check_identities()
    h = homology(X, 2).groups
    assert h == [Z, G("Z/2"), O]
    # rational and mod-2 Betti numbers from an independent elimination
    assert complex_betti(RP2_FACETS, 2) == [g.rank for g in h]
    assert complex_betti(RP2_FACETS, 2, p=2) == [1, 1, 1]


def test_standard_sphere_small_cases():
    S0 = standard_sphere(0)
    assert S0.space.counts == (2,)
    S1 = standard_sphere(1).space
    assert S1.counts[0] == 1
    assert len(S1.nondegenerate(1)) == 1
    assert homology(standard_sphere(3).space, 3).groups == [Z, O, O, Z]


def test_product_unit_and_circle():
    S1 = circle().space
    P = product(FinSSet.point(), S1)
    assert P.counts == S1.extend(P.dim_top).counts
    assert homology(P, 2).groups == homology(S1, 2).groups
    Q = product(S1, FinSSet.point())
    assert pi0(Q).count == 1
    assert homology(Q, 1).groups == [Z, Z]


def test_torus():
    T = product(circle().space, circle().space)
    T.check_identities()
    assert homology(T, 2).groups == [Z, G("Z", "Z"), Z]


def test_smash_units_and_torus_collapse():
    S0, S1 = standard_sphere(0), circle()
    assert homology(smash(S0, S1).space, 1).groups == homology(S1.space, 1).groups
    pt = PointedFinSSet(FinSSet.point(), 0)
    assert smash(S1, pt).space.counts[0] == 1
    assert reduced_homology(smash(S1, pt).space, 2) == [O, O, O]
    S11 = smash(S1, S1).space
    assert reduced_homology(S11, 2) == [O, O, Z]


def test_pi0_cases():
    assert pi0(FinSSet.discrete(2)).count == 2
    assert pi0(circle().space).count == 1


def test_disjoint_union_h0_adds():
    X, Y = boundary(1), FinSSet.discrete(3)
    h = homology(disjoint_union(X, Y), 1).groups
    assert h[0].rank == homology(X, 1).groups[0].rank + homology(Y, 1).groups[0].rank


def test_plus_adds_a_point():
    P = plus(boundary(1))
    assert pi0(P.space).count == 2
    assert P.basepoint == 3


def test_chain_boundaries_square_to_zero():
    for X in (boundary(3), standard_sphere(2).space, product(circle().space, boundary(1))):
        chains(X, X.dim_top).check_d2()


def test_truncated_set_refuses_out_of_range():
    X = boundary(2).truncate(1)
    X.complete = False
    with pytest.raises(InsufficientDimension):
        homology(X, 1)


def test_map_check_catches_bad_map():
    S1 = boundary(1)
    f = SMap(S1, S1, [np.array([1, 0, 2]), np.array([0, 0, 0])])
    with pytest.raises(IdentityViolation):
        f.check()


def test_smash_functorial():
    S1 = circle()
    ident = SMap.identity(S1.space)
    fg = smash_map(ident, ident, S1, S1, S1, S1)
    fg.check()
    assert fg.compose(fg) == fg
    const = SMap.constant(S1.space, S1.space, S1.basepoint)
    cg = smash_map(const, ident, S1, S1, S1, S1)
    cg.check()
    assert cg.compose(fg) == smash_map(const.compose(ident), ident, S1, S1, S1, S1)
    assert fg.compose(cg) == smash_map(ident.compose(const), ident, S1, S1, S1, S1)


def test_product_maps_compose():
    X = boundary(1)
    ident = SMap.identity(X)
    P = product(X, X)
    f = product_map(ident, ident, P, P)
    f.check()
    assert f.compose(f) == f


def test_coefficients_universal_coefficients():
    X = FinSSet.from_complex(RP2_FACETS)
    assert homology(X, 2, coefficients=2).groups == [G("Z/2"), G("Z/2"), G("Z/2")]
    assert homology(X, 2, coefficients=3).groups == [G("Z/3"), O, O]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=6))
def test_random_complexes_match_oracle(triples):
    facets = [tuple(sorted(set(t))) for t in triples]
    X = FinSSet.from_complex(facets)
    X.check_identities()
    h = homology(X, 2).groups
    assert [g.rank for g in h] == complex_betti(facets, 2)
    assert pi0(X).count == h[0].rank
    chains(X, 2).check_d2()
