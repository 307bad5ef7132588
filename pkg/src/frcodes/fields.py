"""Small prime-power finite fields.

Elements of GF(p^m) are the integers ``0..p^m-1``; the base-p digits of an
integer are the coefficients of a polynomial over GF(p) (digit ``i`` is the
coefficient of ``x^i``).  Arithmetic is done with log/exp tables built from
the primitive element, so fields are meant to be small (q up to a few
thousand).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotPrime, NotPrimePower


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int):
    """Return ``(p, m)`` with ``q = p**m``, or None."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


def _digits(x, p, m):
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds, p):
    x = 0
    for c in reversed(ds):
        x = x * p + c
    return x


def _polymulmod(a, b, mod, p):
    """Multiply coefficient lists a, b (length m) modulo the monic ``mod`` (length m+1)."""
    m = len(mod) - 1
    prod = [0] * (2 * m - 1 if m else 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for t in range(m + 1):
                prod[k - m + t] = (prod[k - m + t] - c * mod[t]) % p
    return prod[:m]


def _has_root_factor(mod, p, m):
    """True if ``mod`` has a factor of degree <= m//2 (brute force over monic polys)."""
    for deg in range(1, m // 2 + 1):
        for low in range(p ** deg):
            f = _digits(low, p, deg) + [1]
            # polynomial remainder of mod by f
            r = list(mod)
            for k in range(len(r) - 1, deg - 1, -1):
                c = r[k]
                if c:
                    for t in range(deg + 1):
                        r[k - deg + t] = (r[k - deg + t] - c * f[t]) % p
            if not any(r[:deg]):
                return True
    return False


def smallest_irreducible(p: int, m: int) -> tuple:
    """Smallest monic irreducible of degree m, ordered by the integer encoding
    of its lower coefficients.  Returned as coefficients, constant term first."""
    if m == 1:
        return (0, 1)
    for low in range(p ** m):
        mod = _digits(low, p, m) + [1]
        if mod[0] == 0:
            continue
        if not _has_root_factor(mod, p, m):
            return tuple(mod)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FiniteField:
    p: int
    m: int
    modulus: tuple
    primitive: int = field(init=False)
    _exp: tuple = field(init=False, repr=False)
    _log: tuple = field(init=False, repr=False)
    _add: tuple = field(init=False, repr=False)

    def __post_init__(self):
        p, m, q = self.p, self.m, self.p ** self.m

        def slow_mul(a, b):
            if m == 1:
                return a * b % p
            return _undigits(_polymulmod(_digits(a, p, m), _digits(b, p, m), self.modulus, p), p)

        for g in range(1, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = slow_mul(x, g)
            if len(exp) == q - 1:
                break
        log = [None] * q
        for i, v in enumerate(exp):
            log[v] = i
        digs = [_digits(x, p, m) for x in range(q)]
        add = tuple(tuple(_undigits([(u + v) % p for u, v in zip(digs[a], digs[b])], p)
                          for b in range(q)) for a in range(q))
        object.__setattr__(self, "primitive", g)
        object.__setattr__(self, "_exp", tuple(exp))
        object.__setattr__(self, "_log", tuple(log))
        object.__setattr__(self, "_add", add)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def order(self) -> int:
        return self.q

    def elements(self):
        return range(self.q)

    def add(self, a, b):
        return self._add[a][b]

    def neg(self, a):
        return self._add[a].index(0)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k):
        if a == 0:
            return 0 if k > 0 else 1
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def eta(self, k: int) -> int:
        """The k-th power of the primitive element."""
        return self._exp[k % (self.q - 1)]

    def is_square(self, a) -> bool:
        if a == 0:
            return False
        if self.p == 2:
            return True
        return self._log[a] % 2 == 0

    def dot(self, u, v):
        acc = 0
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(a, b))
        return acc


@lru_cache(maxsize=None)
def gf(p: int, m: int = 1) -> FiniteField:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be at least 1")
    return FiniteField(p, m, smallest_irreducible(p, m))


def field_for_order(q: int) -> FiniteField:
    pm = prime_power(q)
    if pm is None:
        raise NotPrimePower(f"{q} is not a prime power")
    return gf(*pm)
