import numpy as np
import pytest

from unitspec.barcat import hocolim
from unitspec.dkspec import em_spectrum, omega_bullet
from unitspec.errors import LawViolation, TruncationTooSmall
from unitspec.ispace import (
    FcpStruct,
    ISpace,
    ISpaceMap,
    box,
    box_associator,
    box_oracle,
    box_symmetry,
    check_fcp,
    compare_box_with_oracle,
    fibrant_surrogate,
    free_box_identity,
    free_ispace,
    inj_cat,
    orbit_ispace,
    random_ispace,
    stable_equiv_surrogate,
    terminal_fcp,
)
from unitspec.rings import parse_ring
from unitspec.sset import FinSSet, SMap, homology

PT = FinSSet.point()


def test_free_counts():
    F0 = free_ispace(0, PT, 3)
    assert [L.counts[0] for L in F0.obj] == [1, 1, 1, 1]
    F1 = free_ispace(1, PT, 3)
    assert [L.counts[0] for L in F1.obj] == [0, 1, 2, 3]
    F2 = free_ispace(2, PT, 3)
    assert F2.obj[3].counts[0] == 6


def test_functoriality_of_orbit_diagrams():
    X = orbit_ispace(3, 2, [(2, 1)], FinSSet.discrete(2))
    X.check()
    assert [L.counts[0] for L in X.obj] == [0, 0, 2, 6]


def test_box_unit():
    X = orbit_ispace(3, 1, [], FinSSet.discrete(2))
    U = box(ISpace.terminal(3), X)
    for n in range(4):
        assert U.obj[n].counts[0] == X.obj[n].counts[0]
        assert homology(U.obj[n], 0).groups == homology(X.obj[n], 0).groups


@pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4 - m)])
def test_free_box_identity(m, n):
    assert free_box_identity(m, n, 3).ok


def test_box_matches_oracle_seeded():
    rng = np.random.default_rng(7)
    for _ in range(5):
        X, Y = random_ispace(rng, 3), random_ispace(rng, 3)
        r = compare_box_with_oracle(X, Y)
        assert r.ok, r.witness


def test_box_symmetry_and_associator():
    rng = np.random.default_rng(3)
    X, Y, Z = (random_ispace(rng, 3) for _ in range(3))
    assert box_symmetry(X, Y).ok
    assert box_associator(X, Y, Z).ok


def test_box_oracle_is_functor():
    X, Y = free_ispace(1, PT, 3), orbit_ispace(3, 2, [(2, 1)])
    box_oracle(X, Y).check()


def test_terminal_fcp():
    check_fcp(terminal_fcp(3))


def test_omega_fcp_z4():
    S = omega_bullet(em_spectrum(parse_ring("Z/4"), 3))
    rep = check_fcp(S)
    assert rep.checks["commutativity"] > 0


def test_transposed_factor_fails_twist():
    S = omega_bullet(em_spectrum(parse_ring("Z/4"), 3))
    # swap factors of mu_(1,1) while keeping mu_(0,n), mu_(n,0) intact:
    # for level 2 the sign twist makes (x, y) -> sigma(y x) differ from x y
    bad = {k: [t.copy() for t in v] for k, v in S.mult.items()}
    M = bad[(1, 1)][0]
    bad[(1, 1)][0] = M[:, ::-1].copy()
    T = FcpStruct(S.owner, S.unit, bad, commutative=True)
    with pytest.raises(LawViolation) as info:
        check_fcp(T)
    assert info.value.witness is not None


def _const_map(X, Y, vertex=0):
    return ISpaceMap(X, Y, [SMap.constant(X.obj[n], Y.obj[n], vertex) for n in range(X.N + 1)])


def test_surrogate_identity_and_collapse():
    X = orbit_ispace(3, 1, [], FinSSet.discrete(2))
    ident = ISpaceMap(X, X, [SMap.identity(L) for L in X.obj])
    assert stable_equiv_surrogate(ident, 4, 2).passed
    F0 = free_ispace(0, PT, 3)
    f = _const_map(F0, ISpace.terminal(3))
    f.check_natural()
    assert stable_equiv_surrogate(f, 4, 2).passed


def test_surrogate_detects_double_cover():
    free2 = free_ispace(2, PT, 3)
    quot = orbit_ispace(3, 2, [(2, 1)])
    comps = []
    for n in range(4):
        src = free2.obj[n].counts[0]
        arr = np.empty(src, dtype=np.int64)
        inj = [free2.cat.values(g) for g in free2.cat.hom(2, n)]
        for i, f in enumerate(inj):
            arr[i] = quot.act(f, n).maps[0][0]
        comps.append(SMap(free2.obj[n], quot.obj[n], [arr]))
    f = ISpaceMap(free2, quot, comps)
    f.check_natural()
    v = stable_equiv_surrogate(f, 4, 1)
    assert v.status == "fail"
    assert v.details["target"][1] == "Z/2"


def test_surrogate_range_guard():
    X = ISpace.terminal(2)
    ident = ISpaceMap(X, X, [SMap.identity(L) for L in X.obj])
    with pytest.raises(TruncationTooSmall):
        stable_equiv_surrogate(ident, 3, 2)
    assert stable_equiv_surrogate(ident, 3, 2, strict=False).status == "out-of-range"


def test_fibrant_surrogate():
    assert fibrant_surrogate(ISpace.constant(3, FinSSet.from_complex([(0, 1), (1, 2), (0, 2)])), 1)
    assert not fibrant_surrogate(free_ispace(1, PT, 3), 1)
    S = omega_bullet(em_spectrum(parse_ring("Z/4"), 3))
    assert fibrant_surrogate(S.owner, 1)


def test_fibrant_level_includes_into_hocolim():
    S = omega_bullet(em_spectrum(parse_ring("F5"), 3))
    X = S.owner
    h = hocolim(X.cat, X, 3)
    assert homology(h.sset, 1).groups[0].rank == X.obj[3].counts[0] == 5


def test_positive_flag_restricts_levels():
    assert inj_cat(3).generators(positive=True) != inj_cat(3).generators()
    check_fcp(terminal_fcp(3), positive=True)
