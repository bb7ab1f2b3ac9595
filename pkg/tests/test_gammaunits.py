import numpy as np
import pytest

from oracles import dual_numbers_f2_units, invariants_from_orders, zmod_units_orders
from unitspec.dkspec import em_spectrum, omega_bullet
from unitspec.errors import (
    ConfigError,
    InsufficientGammaRange,
    LawViolation,
    NotCommutative,
    TruncationTooSmall,
)
from unitspec.gammaunits import (
    FinMonoid,
    based_maps,
    circle_degen,
    circle_face,
    comma_certificate,
    compose_based,
    fold_monoid,
    gamma_construct,
    gl1_bullet,
    group_completion_pi0,
    group_nerve_h1,
    icat,
    pi0_monoid,
    segal_check,
    segal_machine_delooping,
    units_fcp,
)
from unitspec.ispace import FcpStruct, terminal_fcp
from unitspec.rings import parse_ring
from unitspec.snf import AbelianGroup
from unitspec.sset import homology, pi0

Z = AbelianGroup(1)
O = AbelianGroup()


def G(*parts):
    return AbelianGroup.from_strings(parts)


@pytest.fixture(scope="module")
def gamma_z4():
    return gamma_construct(gl1_bullet(em_spectrum(parse_ring("Z/4"), 3)), n_max=2, D=4, k_max=1)


def test_monoid_units_and_completion():
    Z4 = FinMonoid(list(range(4)), [[a * b % 4 for b in range(4)] for a in range(4)], 1)
    Z4.check()
    assert Z4.units() == [1, 3]
    Gp, of = Z4.grothendieck()
    assert Gp.size == 1 and set(of.tolist()) == {0}
    U = Z4.submonoid(Z4.units())
    assert U.is_group and U.group_invariants() == G("Z/2")


def test_monoid_group_invariants_match_oracle():
    add = FinMonoid(list(range(6)), [[(a + b) % 6 for b in range(6)] for a in range(6)], 0)
    assert add.group_invariants() == G("Z/6")
    orders = [next(k for k in range(1, 7) if k * a % 6 == 0) for a in range(6)]
    assert invariants_from_orders(orders) == (6,)


def test_monoid_laws_are_checked():
    bad = FinMonoid(["e", "a"], [[0, 1], [1, 0]], 1)
    with pytest.raises(LawViolation):
        bad.check()
    left_zero = FinMonoid(["e", "a", "b"], [[0, 1, 2], [1, 1, 1], [2, 2, 2]], 0)
    left_zero.check()
    with pytest.raises(NotCommutative):
        left_zero.grothendieck()
    with pytest.raises(LawViolation):
        left_zero.submonoid([0, 1]).submonoid([1])


def test_pi0_monoid_of_omega_is_multiplicative_monoid():
    R = parse_ring("Z/6")
    E = em_spectrum(R, 2)
    S = omega_bullet(E)
    from unitspec.dkspec import fundamental_coefficients

    S.meta["vertex_labels"] = [fundamental_coefficients(S, E, n) for n in range(3)]
    M = pi0_monoid(S)
    assert M.size == 6
    for a in range(6):
        for b in range(6):
            assert M.labels[M.table[a, b]] == R.mul[M.labels[a], M.labels[b]]


def test_pi0_monoid_terminal():
    M = pi0_monoid(terminal_fcp(2))
    assert M.size == 1 and M.is_group


@pytest.mark.parametrize("name,n", [("Z/2", 2), ("Z/4", 4), ("Z/6", 6), ("F5", 5)])
def test_units_of_zmod_match_oracle(name, n):
    U = gl1_bullet(em_spectrum(parse_ring(name), 2))
    M = U.meta["pi0_monoid"]
    assert M.is_group
    assert M.group_invariants() == AbelianGroup(0, tuple(invariants_from_orders(zmod_units_orders(n))))


def test_units_of_dual_numbers():
    R = parse_ring("F2[x]/x^2")
    U = gl1_bullet(em_spectrum(R, 2))
    M = U.meta["pi0_monoid"]
    assert M.size == len(dual_numbers_f2_units()) == 2
    assert sorted(M.labels) == ["1", "1+x"]


def test_units_restriction_is_levelwise_subspace():
    S = omega_bullet(em_spectrum(parse_ring("Z/4"), 2))
    U = units_fcp(S)
    assert [L.counts[0] for L in U.owner.obj] == [2, 2, 2]
    U.owner.check()


def test_word_category_sizes():
    sizes = {n: (icat(n, 3).cat.n_obj, icat(n, 3).cat.n_mor) for n in range(4)}
    assert sizes == {0: (1, 1), 1: (4, 24), 2: (15, 153), 3: (40, 484)}
    assert icat(2, 3).check_coproducts() > 0


def test_word_category_theta():
    W = icat(2, 3)
    assert W.theta((2, 1, 2), (2,)) == (1, 3)
    assert W.theta((2, 1, 2), (1, 2)) == (1, 2, 3)
    assert W.dims((2, 1, 2)) == (1, 2)


def test_comma_certificate_counts():
    for n, expect in [(0, 1), (1, 4), (2, 10), (3, 20)]:
        ok, tested, w = comma_certificate(icat(n, 3))
        assert ok and tested == expect and w is None


def test_based_maps_compose():
    assert len(based_maps(2, 2)) == 9
    a, b = (1, 0, 2), (2, 1)
    assert compose_based(b, a) == (2, 0, 1)


def test_circle_simplicial_identities():
    # d_i d_j = d_(j-1) d_i for i < j, as based maps
    for q in range(2, 5):
        for j in range(q + 1):
            for i in range(j):
                assert compose_based(circle_face(q - 1, i), circle_face(q, j)) == compose_based(circle_face(q - 1, j - 1), circle_face(q, i))
        for i in range(q):
            assert compose_based(circle_face(q + 1, i), circle_degen(q, i)) == tuple(range(1, q + 1))


def test_gamma_of_terminal_is_acyclic():
    H = gamma_construct(terminal_fcp(2), n_max=2, D=4, k_max=1)
    for n in range(3):
        assert H.homology(n, 1) == [Z, O]
    B = segal_machine_delooping(H, 1)
    assert homology(B, 1).groups == [Z, O]


def test_gamma_one_has_pi0_units(gamma_z4):
    assert pi0(gamma_z4.value(1)).count == 2
    assert pi0(gamma_z4.value(2)).count == 4
    assert gamma_z4.value(0).counts[0] == 1


def test_gamma_functor_checks(gamma_z4):
    counts = gamma_z4.check_functoriality()
    assert counts["composition"] > 0 and counts["naturality"] > 0
    assert gamma_z4.check_ordering_independence() > 0


def test_fold_realizes_product(gamma_z4):
    M = fold_monoid(gamma_z4)
    R = parse_ring("Z/4")
    assert sorted(M.labels) == ["1", "3"]
    for a in range(2):
        for b in range(2):
            ra, rb = R.labels.index(M.labels[a]), R.labels.index(M.labels[b])
            assert M.labels[M.table[a, b]] == R.labels[R.mul[ra, rb]]


def test_segal_through_two(gamma_z4):
    verdicts = segal_check(gamma_z4, 1)
    assert [v.n for v in verdicts] == [0, 1, 2]
    assert all(v.passed for v in verdicts)
    assert verdicts[2].h1_iso is True


def test_completion_matches_units(gamma_z4):
    C = group_completion_pi0(gamma_z4)
    assert C.grouplike and C.invariants == G("Z/2")
    assert C.invariants == gamma_z4.source.meta["pi0_monoid"].group_invariants()


def test_delooping_matches_group_nerve(gamma_z4):
    B = segal_machine_delooping(gamma_z4, 1)
    assert homology(B, 1).groups == group_nerve_h1(gamma_z4.source.meta["pi0_monoid"], 1) == [Z, G("Z/2")]


def test_delooping_range_guards(gamma_z4):
    with pytest.raises(InsufficientGammaRange):
        segal_machine_delooping(gamma_z4, 2)
    with pytest.raises(InsufficientGammaRange):
        gamma_z4.value(3)


def test_gamma_rejects_bad_inputs():
    with pytest.raises(TruncationTooSmall):
        gamma_construct(terminal_fcp(2), n_max=1, D=3, k_max=2)
    S = terminal_fcp(2)
    nc = FcpStruct(S.owner, S.unit, S.mult, commutative=False)
    with pytest.raises(NotCommutative):
        gamma_construct(nc, n_max=1)


def test_gamma_rejects_non_discrete():
    S = omega_bullet(em_spectrum(parse_ring("Z/2"), 2))
    from unitspec.sset import FinSSet
    from unitspec.ispace import ISpace

    circle = FinSSet.from_complex([(0, 1), (1, 2), (0, 2)])
    X = ISpace.constant(2, circle)
    fake = FcpStruct.__new__(FcpStruct)
    fake.__dict__.update(S.__dict__)
    fake.owner = X
    with pytest.raises(ConfigError):
        gamma_construct(fake, n_max=1)


def test_multiplicative_monoid_completion_is_trivial():
    R = parse_ring("Z/4")
    M = FinMonoid(R.labels, R.mul, R.one)
    Gp, _ = M.grothendieck()
    assert Gp.size == 1
    assert np.all(M.table[M.units()][:, M.units()] != R.zero)
