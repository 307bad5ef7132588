import pytest
from hypothesis import given, settings, strategies as st

from frcodes.errors import NotPrime, NotPrimePower
from frcodes.fields import field_for_order, gf, is_prime, prime_power, smallest_irreducible

FIELDS = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (7, 1)]


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms(p, m):
    F = gf(p, m)
    q = F.q

    @settings(max_examples=1000, deadline=None, derandomize=True)
    @given(st.integers(0, q - 1), st.integers(0, q - 1), st.integers(0, q - 1))
    def axioms(a, b, c):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, 0) == a and F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        assert F.sub(F.add(a, b), b) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.div(F.mul(b, a), a) == b

    axioms()


@pytest.mark.parametrize("p,m", FIELDS)
def test_primitive_generates_multiplicative_group(p, m):
    F = gf(p, m)
    powers = {F.pow(F.eta(1), i) for i in range(F.q - 1)}
    assert powers == set(range(1, F.q))


def test_known_moduli():
    assert smallest_irreducible(2, 2) == (1, 1, 1)
    F = gf(2, 2)
    assert F.eta(1) == 2
    G = gf(2, 8)
    assert G.mul(0x53, 0xCA) == 0x01  # classic AES inverse pair


def test_prime_helpers():
    assert [x for x in range(20) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power(81) == (3, 4)
    assert prime_power(12) is None
    with pytest.raises(NotPrime):
        gf(4)
    with pytest.raises(NotPrimePower):
        field_for_order(6)
    assert field_for_order(9).q == 9
