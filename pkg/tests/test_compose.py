import itertools
import random

import pytest

from frcodes import (beta_expand, catalog_load, complement_identity, disjoint_union,
                     find_repair_table, find_resolution, girth_code, graph_by_name, grid,
                     hadamard, identity_code, is_trivially_expandable, kronecker, select_classes,
                     transpose, validate, affine_resolvable, file_size, FRCode)
from frcodes.errors import BadIndex, BudgetExceeded, NonDivisible, NoResolution
from frcodes.fields import gf

POOL = [lambda: complement_identity(3), lambda: complement_identity(4), lambda: grid(2),
        lambda: grid(3), lambda: identity_code(2), lambda: identity_code(3),
        lambda: catalog_load("FANO"), lambda: transpose(catalog_load("FANO")),
        lambda: girth_code(graph_by_name("K4"))]


def test_kronecker_laws_on_random_pairs():
    rnd = random.Random(2024)
    for _ in range(20):
        c1, c2 = rnd.choice(POOL)(), rnd.choice(POOL)()
        code, info = kronecker(c1, c2, certify=False)
        p1, p2, p = validate(c1), validate(c2), validate(code)
        assert p.astuple() == (p1.n * p2.n, p1.theta * p2.theta, p1.alpha * p2.alpha, p1.rho * p2.rho)
        assert info.expected == p.astuple()
        for a, b in itertools.combinations(range(code.n), 2):
            i1, j1 = a % c1.n, a // c1.n
            i2, j2 = b % c1.n, b // c1.n
            ov1 = len(c1.nodes[i1] & c1.nodes[i2])
            ov2 = len(c2.nodes[j1] & c2.nodes[j2])
            assert code.overlaps[a][b] == ov1 * ov2


def test_kronecker_beta_certified():
    code, info = kronecker(complement_identity(3), complement_identity(3))
    assert info.expected == (9, 9, 4, 4)
    assert (info.expected_beta, info.beta, info.beta_source) == (2, 2, "predicted")
    find_repair_table(code, 2, 2).verify(code)
    assert code.meta["repair"]["d"] == 2


def test_kronecker_resolution_of_grids():
    code, _ = kronecker(grid(2), grid(2))
    assert code.resolution is not None and len(code.resolution) == 4
    found = find_resolution(FRCode(code.theta, code.nodes))
    assert found is not None
    FRCode(code.theta, code.nodes, found)  # constructor validates the partition


def test_find_resolution_negative_and_budget():
    assert find_resolution(catalog_load("FANO")) is None
    assert find_resolution(kronecker(complement_identity(3), complement_identity(3))[0]) is None
    with pytest.raises(BudgetExceeded):
        find_resolution(transpose(catalog_load("D1")), threshold=10)


def test_beta_expand_round_trip():
    ex1 = girth_code(graph_by_name("K5"))
    big = beta_expand(ex1, 2)
    assert validate(big).astuple() == (5, 20, 8, 2)
    assert big.meta["repair"] == {"d": 4, "beta": 2}
    find_repair_table(big, 4, 2).verify(big)
    check = is_trivially_expandable(big, 2)
    assert check.expandable
    assert validate(check.base).astuple() == (5, 10, 4, 2)
    assert sorted(map(sorted, beta_expand(check.base, 2).nodes)) == sorted(map(sorted, big.nodes))


def test_non_expandable_codes():
    check = is_trivially_expandable(hadamard(2), 2)
    assert not check and "C(4,2)=6" in check.obstruction
    assert not is_trivially_expandable(affine_resolvable(gf(3), 3, 13), 3)
    with pytest.raises(NonDivisible):
        is_trivially_expandable(kronecker(complement_identity(3), complement_identity(3))[0], 2)
    with pytest.raises(NonDivisible):
        is_trivially_expandable(hadamard(2), 3)


def test_disjoint_union():
    stack = disjoint_union(catalog_load("FANO"), 4)
    assert validate(stack).astuple() == (28, 28, 3, 3)
    assert stack.meta["local"]["copies"] == 4
    assert file_size(stack, 15).M == 17


def test_select_classes():
    code = select_classes(catalog_load("MOLS-16"), [0, 1, 2])
    assert validate(code).astuple() == (12, 16, 4, 3)
    assert code.resolution == ((0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11))
    aff = select_classes(affine_resolvable(gf(3), 3, 13), [0, 1, 2])
    assert aff.meta["general_position"] == 3
    with pytest.raises(BadIndex):
        select_classes(grid(3), [0, 0])
    with pytest.raises(BadIndex):
        select_classes(grid(3), [5])
    with pytest.raises(NoResolution):
        select_classes(catalog_load("FANO"), [0])
