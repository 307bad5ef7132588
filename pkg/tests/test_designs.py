import itertools

import pytest

from frcodes import (affine_resolvable, catalog_load, catalog_names, complement_identity,
                     find_repair_table, grid, hadamard, mols_net, projective_plane,
                     steiner_triple, validate)
from frcodes.catalog import normalize_labels, parse_blocks
from frcodes.designs import (bibd_lambda, gaussian_coefficient, general_position, is_steiner,
                             latin_squares)
from frcodes.errors import TooManyClasses, UnknownName
from frcodes.fields import field_for_order, gf


def resolution_ok(code):
    full = set(range(code.theta))
    for cls in code.resolution:
        seen = set()
        for j in cls:
            assert not seen & code.nodes[j]
            seen |= code.nodes[j]
        assert seen == full
    assert sorted(j for cls in code.resolution for j in cls) == list(range(code.n))


@pytest.mark.parametrize("a", [3, 4, 5, 7, 8])
def test_mols_orthogonal_exhaustive(a):
    F = field_for_order(a)
    squares = latin_squares(F, a - 1)
    assert len(squares) == a - 1
    for L in squares:
        for i in range(a):
            assert sorted(L[i]) == list(range(a))
            assert sorted(L[r][i] for r in range(a)) == list(range(a))
    for L1, L2 in itertools.combinations(squares, 2):
        pairs = {(L1[r][c], L2[r][c]) for r in range(a) for c in range(a)}
        assert len(pairs) == a * a


@pytest.mark.parametrize("a,r", [(3, 2), (3, 4), (4, 3), (5, 6), (7, 3)])
def test_mols_net_parameters(a, r):
    code = mols_net(field_for_order(a), r)
    p = validate(code)
    assert p.astuple() == (a * r, a * a, a, r)
    resolution_ok(code)
    cls = code.class_of()
    for i, j in itertools.combinations(range(code.n), 2):
        same = cls[i] == cls[j]
        assert code.overlaps[i][j] == (0 if same else 1)


def test_mols_net_limits():
    with pytest.raises(TooManyClasses):
        mols_net(gf(3), 5)
    with pytest.raises(ValueError):
        mols_net(gf(3), 1)


def test_catalog_matches_constructions():
    assert mols_net(gf(2, 2), 4) == catalog_load("MOLS-16")
    assert hadamard(2) == catalog_load("HADAMARD-7")


def test_catalog_entries_are_valid():
    shapes = {"D1": (35, 15, 3, 7), "D2": (35, 15, 3, 7), "S2-4-16": (20, 16, 4, 5),
              "MOLS-16": (16, 16, 4, 4), "HADAMARD-7": (14, 8, 4, 7), "FANO": (7, 7, 3, 3)}
    for name in catalog_names():
        code = catalog_load(name)
        assert validate(code).astuple() == shapes[name]
        rep = code.meta["repair"]
        find_repair_table(code, rep["d"], rep["beta"]).verify(code)
    for name in ("D1", "D2", "S2-4-16", "FANO"):
        assert is_steiner(catalog_load(name))
    with pytest.raises(UnknownName):
        catalog_load("NOPE")


def test_catalog_parsing():
    blocks, sizes, title = parse_blocks("# title\n# @classes 1,1\n3,inf\n# note\n1,3\n")
    assert blocks == [["3", "inf"], ["1", "3"]] and sizes == [1, 1] and title == "title"
    assert normalize_labels(blocks) == {"1": 0, "3": 1, "inf": 2}


@pytest.mark.parametrize("a", [2, 3, 4, 5])
def test_grid(a):
    code = grid(a)
    assert validate(code).astuple() == (2 * a, a * a, a, 2)
    resolution_ok(code)


@pytest.mark.parametrize("t", [3, 4, 5])
def test_complement_identity(t):
    code = complement_identity(t)
    assert validate(code).astuple() == (t, t, t - 1, t - 1)
    find_repair_table(code, t - 1, 1).verify(code)


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
def test_affine_resolvable_full(q, m):
    F = field_for_order(q)
    r = (q ** m - 1) // (q - 1)
    code = affine_resolvable(F, m, r)
    assert validate(code).astuple() == (q * r, q ** m, q ** (m - 1), r)
    resolution_ok(code)
    cls = code.class_of()
    for i, j in itertools.combinations(range(code.n), 2):
        if cls[i] != cls[j]:
            assert code.overlaps[i][j] == q ** (m - 2)
    if m == 2 or q == 2:
        assert bibd_lambda(code) is not None
    assert code.meta["general_position"] >= min(m, 2)


def test_affine_moment_curve_prefix():
    F = gf(3)
    code = affine_resolvable(F, 3, 3)
    fs = [tuple(f) for f in code.meta["functionals"]]
    assert general_position(F, fs, 3)
    assert code.meta["general_position"] == 3


@pytest.mark.parametrize("a", [2, 3, 5])
def test_hadamard(a):
    code = hadamard(a)
    q = 4 * a - 1
    assert validate(code).astuple() == (2 * q, 4 * a, 2 * a, q)
    resolution_ok(code)
    cls = code.class_of()
    for i, j in itertools.combinations(range(code.n), 2):
        if cls[i] != cls[j]:
            assert code.overlaps[i][j] == a
    find_repair_table(code, 2, a).verify(code)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_projective_plane(q):
    code = projective_plane(field_for_order(q))
    v = q * q + q + 1
    assert validate(code).astuple() == (v, v, q + 1, q + 1)
    assert is_steiner(code)


@pytest.mark.parametrize("theta", [7, 9, 13, 15, 19, 21, 25, 27])
def test_steiner_triple(theta):
    code = steiner_triple(theta)
    assert validate(code).astuple() == (theta * (theta - 1) // 6, theta, 3, (theta - 1) // 2)
    assert is_steiner(code)


def test_gaussian_coefficient():
    assert gaussian_coefficient(3, 1, 2) == 7
    assert gaussian_coefficient(4, 2, 2) == 35
    assert gaussian_coefficient(3, 1, 3) == 13
