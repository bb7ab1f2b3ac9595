import pytest

from oracles import dual_numbers_f2_units, invariants_from_orders, zmod_units_orders
from unitspec.errors import ConfigError
from unitspec.rings import CORPUS, galois_field, parse_ring, ring_from_json
from unitspec.snf import AbelianGroup


@pytest.mark.parametrize("name", CORPUS + ["F4", "F9", "Z/12"])
def test_axioms(name):
    parse_ring(name).check_axioms()


@pytest.mark.parametrize("n", [2, 4, 6, 5, 12])
def test_zmod_units_against_oracle(n):
    R = parse_ring(f"Z/{n}")
    assert R.unit_group().torsion == invariants_from_orders(zmod_units_orders(n))


def test_corpus_unit_groups():
    # brute force: {1}, Z/2, Z/2, Z/4, Z/2
    expect = ["0", "Z/2", "Z/2", "Z/4", "Z/2"]
    assert [str(parse_ring(r).unit_group()) for r in CORPUS] == expect


def test_dual_numbers():
    R = parse_ring("F2[x]/x^2")
    assert len(R.units()) == len(dual_numbers_f2_units()) == 2
    assert sorted(R.labels[u] for u in R.units()) == ["1", "1+x"]
    assert R.additive_group() == AbelianGroup(0, (2, 2))


def test_galois_fields():
    assert galois_field(4).unit_group() == AbelianGroup(0, (3,))
    assert galois_field(9).unit_group() == AbelianGroup(0, (8,))
    assert parse_ring("F5").unit_group() == AbelianGroup(0, (4,))


def test_json_round_trip():
    for name in CORPUS:
        R = parse_ring(name)
        S = ring_from_json(R.to_json())
        assert (S.add == R.add).all() and (S.mul == R.mul).all()


def test_bad_ring():
    with pytest.raises(ConfigError):
        parse_ring("Q")
