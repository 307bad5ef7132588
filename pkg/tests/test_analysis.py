import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from frcodes import (FRCode, affine_resolvable, bounds, catalog_load, check_union_condition,
                     complement_identity, delta, disjoint_union, dmin_exact, file_size,
                     file_size_bruteforce, find_cap_and_arc, girth_code, graph_by_name,
                     greedy_distance_accumulate, grid, hadamard, identity_code, kronecker,
                     local_fr_bound, local_bound, local_structure, local_structure_of, mincor_bound,
                     mols_net, net_file_size_greedy, profile, projective_plane, singleton_bound,
                     transpose)
from frcodes.analysis import (check_unit_overlap_structure, closed_form, components, ie_floor,
                              reconstruction_degree)
from frcodes.errors import BadK, NotSteiner, PreconditionFailed, PropertyViolation
from frcodes.fields import field_for_order, gf

BRUTE_LIMIT = 100_000


def dmin_oracle(code, M):
    for f in range(1, code.n + 1):
        for failed in itertools.combinations(range(code.n), f):
            alive = [i for i in range(code.n) if i not in failed]
            if code.union_size(alive) < M:
                return f
    return code.n + 1


def closed_form_cases():
    for a in range(2, 7):
        yield f"grid{a}", grid(a), range(1, a + 1)
    for a in (3, 4, 5, 7):
        for r in range(2, a + 2):
            yield f"mols{a}-{r}", mols_net(field_for_order(a), r), range(1, r + 1)
    for q in (2, 3):
        for m in (2, 3):
            for r in range(2, (q ** m - 1) // (q - 1) + 1):
                yield f"affine{q}-{m}-{r}", affine_resolvable(field_for_order(q), m, r), range(1, 5)
    for a in (2, 3):
        yield f"hadamard{a}", hadamard(a), range(1, 3)
    for name in ("K4", "K5", "K3,3", "petersen"):
        g = girth_code(graph_by_name(name))
        yield f"girth-{name}", g, range(1, g.n + 1)
    yield "fanoT", transpose(catalog_load("FANO")), range(1, 5)
    yield "S2416T", transpose(catalog_load("S2-4-16")), range(1, 7)
    fano_t = transpose(catalog_load("FANO"))
    yield "kron-fanoT", kronecker(fano_t, fano_t)[0], range(1, 4)
    yield "kron-JI", kronecker(complement_identity(3), complement_identity(3))[0], range(1, 4)


@pytest.mark.parametrize("name,code,ks", list(closed_form_cases()), ids=lambda x: x if isinstance(x, str) else "")
def test_closed_form_matches_brute_force(name, code, ks):
    checked = 0
    for k in ks:
        if math.comb(code.n, k) > BRUTE_LIMIT:
            continue
        cf = closed_form(code, k)
        if cf is None:
            continue
        brute, _ = file_size_bruteforce(code, k)
        if cf[2] == "exact":
            assert cf[0] == brute, (k, cf)
        else:
            assert cf[0] <= brute, (k, cf)
        assert file_size(code, k).M == brute
        checked += 1
    assert checked >= 1


small_codes = st.tuples(st.integers(4, 10), st.integers(1, 4)).flatmap(
    lambda p: st.lists(st.frozensets(st.integers(0, p[0] - 1), min_size=p[1], max_size=p[1]),
                       min_size=2, max_size=9).map(lambda ns: FRCode(p[0], tuple(ns))))


@settings(max_examples=200, deadline=None, derandomize=True)
@given(small_codes, st.data())
def test_search_matches_brute_force(code, data):
    k = data.draw(st.integers(1, code.n))
    e = file_size(code, k, use_closed_form=False)
    brute, _ = file_size_bruteforce(code, k)
    assert e.exact and e.M == brute
    assert len(set(e.witness)) == k and code.union_size(e.witness) == brute


@settings(max_examples=100, deadline=None, derandomize=True)
@given(small_codes, st.integers(1, 10))
def test_dmin_matches_enumeration(code, M):
    M = min(M, len(set().union(*code.nodes)))
    assert dmin_exact(code, M) == dmin_oracle(code, M)


def test_single_component_witness_is_lexicographic():
    code = girth_code(graph_by_name("petersen"))
    for k in range(1, 6):
        e = file_size(code, k)
        first = next(c for c in itertools.combinations(range(code.n), k) if code.union_size(c) == e.M)
        assert tuple(e.witness) == first


def test_file_size_reference_values():
    assert file_size(catalog_load("FANO"), 3).M == 6
    assert file_size(grid(3), 3).M == 7
    assert file_size(hadamard(2), 2).M == 6
    assert file_size(transpose(catalog_load("D1")), 7).M == 29
    assert file_size(transpose(catalog_load("D2")), 7).M == 28
    with pytest.raises(BadK):
        file_size(grid(2), 5)


def test_profile_monotone_and_frozen():
    # brute-force values, frozen
    assert [e.M for e in profile(catalog_load("FANO"))] == [3, 5, 6, 6, 7, 7, 7]
    assert [e.M for e in profile(hadamard(2))] == [4, 6, 6, 7, 7, 7, 7, 8, 8, 8, 8, 8, 8, 8]
    assert [e.M for e in profile(transpose(catalog_load("D1")), range(1, 9))] == [7, 13, 18, 22, 25, 27, 29, 30]


def test_unit_overlap_structure_on_meeting_witnesses():
    for code, k in ((catalog_load("FANO"), 3), (grid(4), 2), (mols_net(gf(5), 4), 4),
                    (transpose(catalog_load("S2-4-16")), 6)):
        e = file_size(code, k)
        if e.M == e.ie_floor:
            check_unit_overlap_structure(code, e.witness)
    # every k-set meeting the floor in a unit-overlap code has this structure
    fano = catalog_load("FANO")
    for k in (2, 3):
        for w in itertools.combinations(range(7), k):
            check_unit_overlap_structure(fano, w)


def test_caps_and_arcs():
    d1, d2 = catalog_load("D1"), catalog_load("D2")
    assert len(find_cap_and_arc(d1).cap) == 6 and find_cap_and_arc(d1).arc is None
    assert len(find_cap_and_arc(d2).cap) == 8 and find_cap_and_arc(d2).arc is not None
    from frcodes.analysis import is_arc, is_cap
    assert is_cap(d1, {0, 1, 3, 6, 7, 9})
    assert is_cap(d2, {1, 2, 4, 6, 7, 8, 9, 13})
    s = catalog_load("S2-4-16")
    assert is_arc(s, {0, 1, 2, 3, 4, 15})
    assert find_cap_and_arc(s).arc is not None and len(find_cap_and_arc(s).arc) == 6
    with pytest.raises(NotSteiner):
        find_cap_and_arc(grid(3))


def test_bound_formulas():
    assert singleton_bound(7, 6, 3) == 6
    assert local_bound(10, 10, 3, 3) == 6
    fano_local = local_structure_of(catalog_load("FANO"))
    assert fano_local.delta == 4
    assert local_fr_bound(28, 17, fano_local) == (14, 16, 16)
    stack_local = local_structure(disjoint_union(catalog_load("FANO"), 4))
    assert local_fr_bound(28, 17, stack_local) == (14, 16, 16)
    assert mincor_bound(28, 17, stack_local) == 14
    assert mincor_bound(28, 7, stack_local) is None


@settings(max_examples=200, derandomize=True)
@given(st.integers(2, 40), st.integers(1, 60), st.integers(1, 8), st.integers(1, 8))
def test_bound_arithmetic_oracle(n, M, alpha, d):
    assert singleton_bound(n, M, alpha) == n - -(-M // alpha) + 1
    assert local_bound(n, M, alpha, d) <= singleton_bound(n, M, alpha)


def test_bounds_report_verdicts():
    r = bounds(7, 3, 6, d=3, dmin=dmin_exact(catalog_load("FANO"), 6), k=3)
    assert r.singleton == 6 and r.dmin_exact == 5
    assert r.verdicts["singleton"] == "not met" and r.verdicts["singleton_degree"] == "not met"
    g = grid(3)
    r = bounds(6, 3, 7, d=3, dmin=dmin_exact(g, 7), k=3)
    assert r.verdicts["singleton_degree"] == "met"
    with pytest.raises(PropertyViolation):
        bounds(7, 3, 6, dmin=7)


def test_local_structure_and_delta():
    stack = disjoint_union(catalog_load("FANO"), 4)
    loc = local_structure(stack)
    assert (loc.n_loc, loc.theta_loc, loc.alpha, loc.rho_loc, loc.delta, loc.beta_loc, loc.copies) == \
        (7, 7, 3, 3, 4, 1, 4)
    assert local_structure(catalog_load("FANO")) is None
    assert delta(grid(3)) == 4
    assert len(components(stack)) == 4


def test_union_condition_slack():
    aff = local_structure_of(affine_resolvable(gf(3), 3, 9))
    assert aff.delta == 18
    assert check_union_condition(aff) == (True, 108)
    pg = local_structure_of(projective_plane(gf(2)))
    assert check_union_condition(pg) == (True, 12)
    # independent formula oracle
    for loc in (aff, pg):
        th, a = loc.theta_loc, loc.alpha
        assert (loc.rho_loc - 1) * a * th - (th + a) * (loc.delta - 1) * loc.beta_loc == \
            check_union_condition(loc)[1]


def test_distance_examples():
    stack = disjoint_union(catalog_load("FANO"), 4)
    assert dmin_exact(stack, 17) == 14
    fig4 = kronecker(identity_code(3), complement_identity(3))[0]
    assert file_size(fig4, 4).M == 5 and dmin_exact(fig4, 5) == 6
    pg2 = disjoint_union(projective_plane(gf(2)), 2)
    assert dmin_exact(pg2, 10) == 7
    assert reconstruction_degree(pg2, 10) == 8
    assert dmin_exact(grid(2), 5) == reconstruction_degree(grid(2), 99) == 5


def test_greedy_distance_accumulate():
    stack = disjoint_union(catalog_load("FANO"), 4)
    acc = greedy_distance_accumulate(stack, 17)
    assert acc.covered < 17 and acc.bound == 14
    assert stack.union_size(acc.nodes) == acc.covered
    fig4 = kronecker(identity_code(3), complement_identity(3))[0]
    assert greedy_distance_accumulate(fig4, 5).bound == 6
    pg2 = disjoint_union(projective_plane(gf(2)), 2)
    assert greedy_distance_accumulate(pg2, 10).bound == 7
    with pytest.raises(PreconditionFailed):
        greedy_distance_accumulate(catalog_load("FANO"), 5)


@pytest.mark.parametrize("q,r", [(4, 3), (5, 4), (7, 5), (8, 6)])
def test_net_greedy_witness(q, r):
    code = mols_net(field_for_order(q), r)
    for k in range(1, r + 1):
        if math.comb(k - 1, 2) >= q:
            break
        w = net_file_size_greedy(code, k)
        assert code.union_size(w) == k * q - math.comb(k, 2) == ie_floor(code, k)
    with pytest.raises(PreconditionFailed):
        net_file_size_greedy(hadamard(2), 2)
