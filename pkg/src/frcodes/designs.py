"""Constructors for FR codes built from combinatorial designs.

Every constructor returns an :class:`~frcodes.core.FRCode` whose ``meta``
records the family, its parameters and the intended repair point
``{"d": ..., "beta": ...}``.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .core import FRCode
from .errors import InvalidOrder, TooManyClasses
from .fields import FiniteField, field_for_order


@dataclass(frozen=True)
class BibdParams:
    theta: int
    rho: int
    alpha: int
    lam: int

    def __post_init__(self):
        if (self.theta * self.rho) % self.alpha:
            raise ValueError("theta*rho must be divisible by alpha")
        if self.rho * (self.alpha - 1) != self.lam * (self.theta - 1):
            raise ValueError("rho(alpha-1) != lambda(theta-1)")

    @property
    def n(self) -> int:
        return self.theta * self.rho // self.alpha


@dataclass(frozen=True)
class SteinerParams:
    t: int
    alpha: int
    theta: int

    def bibd(self) -> BibdParams:
        if self.t != 2:
            raise ValueError("only t = 2 has BIBD parameters here")
        if (self.theta - 1) % (self.alpha - 1):
            raise ValueError("alpha-1 must divide theta-1")
        return BibdParams(self.theta, (self.theta - 1) // (self.alpha - 1), self.alpha, 1)


def pair_counts(code: FRCode) -> Counter:
    """How many nodes contain each unordered symbol pair."""
    c = Counter()
    for v in code.nodes:
        for pair in itertools.combinations(sorted(v), 2):
            c[pair] += 1
    return c


def bibd_lambda(code: FRCode) -> Optional[int]:
    """The common pair multiplicity if every symbol pair is covered equally often."""
    c = pair_counts(code)
    total = code.theta * (code.theta - 1) // 2
    if len(c) != total:
        return 0 if not c else None
    vals = set(c.values())
    return vals.pop() if len(vals) == 1 else None


def is_steiner(code: FRCode) -> bool:
    return code.n > 0 and len({len(v) for v in code.nodes}) == 1 and bibd_lambda(code) == 1


def gaussian_coefficient(m: int, delta: int, q: int) -> int:
    """Number of delta-dimensional subspaces of GF(q)^m."""
    if not 0 <= delta <= m:
        raise ValueError("need 0 <= delta <= m")
    num = den = 1
    for i in range(delta):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _code(_theta, _nodes, _resolution=None, **meta):
    return FRCode(_theta, tuple(frozenset(v) for v in _nodes), _resolution, meta)


def complement_identity(t: int) -> FRCode:
    """t nodes over t symbols, node i holding every symbol except i."""
    if t < 2:
        raise ValueError("need t >= 2")
    nodes = [set(range(t)) - {i} for i in range(t)]
    return _code(t, nodes, None, family="complement_identity", t=t, repair={"d": t - 1, "beta": 1})


def grid(a: int) -> FRCode:
    if a < 2:
        raise ValueError("grid needs a >= 2")
    rows = [{a * i + j for j in range(a)} for i in range(a)]
    cols = [{a * i + j for i in range(a)} for j in range(a)]
    resolution = (tuple(range(a)), tuple(range(a, 2 * a)))
    return _code(a * a, rows + cols, resolution, family="grid", a=a, net_b=1,
                 repair={"d": a, "beta": 1})


def latin_squares(field: FiniteField, count: int) -> list:
    """``count`` mutually orthogonal Latin squares L_e(r, c) = e*r + c,
    with multipliers e = eta^0, eta^1, ..."""
    a = field.q
    if count > a - 1:
        raise TooManyClasses(f"at most {a - 1} orthogonal squares of order {a}")
    out = []
    for i in range(count):
        e = field.eta(i)
        out.append([[field.add(field.mul(e, r), c) for c in range(a)] for r in range(a)])
    return out


def mols_net(field: FiniteField, r: int) -> FRCode:
    """Net code: rows, columns, then level sets of r-2 orthogonal Latin squares."""
    a = field.q
    if r > a + 1:
        raise TooManyClasses(f"at most {a + 1} parallel classes for order {a}")
    if r < 2:
        raise ValueError("need at least rows and columns (r >= 2)")
    nodes = [{a * i + j for j in range(a)} for i in range(a)]
    nodes += [{a * i + j for i in range(a)} for j in range(a)]
    for sq in latin_squares(field, r - 2):
        levels = [set() for _ in range(a)]
        for i in range(a):
            for j in range(a):
                levels[sq[i][j]].add(a * i + j)
        nodes += levels
    resolution = tuple(tuple(range(c * a, (c + 1) * a)) for c in range(r))
    return _code(a * a, nodes, resolution, family="mols", q=a, r=r, net_b=1,
                 repair={"d": a, "beta": 1})


# -- affine geometry --------------------------------------------------------


def _vectors(field, m):
    """All vectors of GF(q)^m, first coordinate most significant."""
    return list(itertools.product(range(field.q), repeat=m))


def _rank(field, rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = field.inv(rows[rank][col])
        rows[rank] = [field.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _normalize(field, v):
    lead = next(x for x in v if x)
    inv = field.inv(lead)
    return tuple(field.mul(inv, x) for x in v)


def projective_points(field, m):
    """Canonical representatives (leading nonzero entry 1) of GF(q)^m, sorted."""
    return [v for v in _vectors(field, m) if any(v) and v[next(i for i, x in enumerate(v) if x)] == 1]


def general_position(field, functionals, k) -> bool:
    """True if every k of the given vectors are linearly independent."""
    if k > len(functionals):
        k = len(functionals)
    return all(_rank(field, sub) == k for sub in itertools.combinations(functionals, k))


def affine_functionals(field: FiniteField, m: int, r: int) -> list:
    """Choose r pairwise non-proportional linear functionals on GF(q)^m.

    Moment-curve functionals (1, e, e^2, ...) with e = eta^0, eta^1, ... come
    first (at most q-1 of them, at most m when q <= m); then canonical
    representatives that keep the list linearly independent while it is
    shorter than m; then the remaining canonical representatives in order.
    """
    q = field.q
    total = (q ** m - 1) // (q - 1)
    if r > total:
        raise TooManyClasses(f"GF({q})^{m} has only {total} parallel classes")
    if r < 1:
        raise ValueError("need r >= 1")
    chosen = []
    seen = set()
    moment = q - 1 if q > m else min(q - 1, m)
    for i in range(min(r, moment)):
        e = field.eta(i)
        f = tuple(field.pow(e, j) for j in range(m))
        chosen.append(f)
        seen.add(_normalize(field, f))
    canon = projective_points(field, m)
    for f in canon:
        if len(chosen) >= min(r, m):
            break
        if f not in seen and _rank(field, chosen + [f]) == len(chosen) + 1:
            chosen.append(f)
            seen.add(f)
    for f in canon:
        if len(chosen) >= r:
            break
        if f not in seen:
            chosen.append(f)
            seen.add(f)
    return chosen


def affine_resolvable(field: FiniteField, m: int, r: int, functionals=None) -> FRCode:
    """Hyperplane classes of AG(m, q): each class is the q level sets of one functional."""
    if m < 2:
        raise ValueError("need m >= 2")
    q = field.q
    if functionals is None:
        functionals = affine_functionals(field, m, r)
    else:
        functionals = [tuple(f) for f in functionals]
        if len({_normalize(field, f) for f in functionals}) != len(functionals):
            raise ValueError("functionals must be pairwise non-proportional")
    pts = _vectors(field, m)
    nodes = []
    for f in functionals:
        levels = [set() for _ in range(q)]
        for pid, x in enumerate(pts):
            levels[field.dot(f, x)].add(pid)
        nodes += levels
    resolution = tuple(tuple(range(c * q, (c + 1) * q)) for c in range(len(functionals)))
    beta = q ** (m - 2)
    # how many leading classes are in general position for the closed-form file size
    prefix = 0
    for t in range(1, min(m, len(functionals)) + 1):
        if general_position(field, functionals, t):
            prefix = t
        else:
            break
    return _code(q ** m, nodes, resolution, family="affine", q=q, m=m, r=len(functionals),
                 functionals=[list(f) for f in functionals], general_position=prefix,
                 net_b=beta, repair={"d": q, "beta": beta})


def hadamard(a: int, field: Optional[FiniteField] = None) -> FRCode:
    """Resolvable Hadamard code from the quadratic-residue difference set in GF(4a-1).

    Class g holds (g + D) with an extra point "inf" and the complement of g + D.
    """
    q = 4 * a - 1
    if field is None:
        field = field_for_order(q)
    elif field.q != q:
        raise ValueError(f"field order {field.q} != 4a-1 = {q}")
    if q < 7:
        raise ValueError("need 4a-1 >= 7")
    D = sorted(x for x in field.elements() if field.is_square(x))
    inf = q
    nodes = []
    for g in range(q):
        B = {field.add(g, d) for d in D}
        nodes.append(B | {inf})
        nodes.append(set(range(q)) - B)
    resolution = tuple((2 * g, 2 * g + 1) for g in range(q))
    return _code(q + 1, nodes, resolution, family="hadamard", a=a, net_b=a,
                 repair={"d": 2, "beta": a}, labels={str(inf): "inf"})


def projective_plane(field: FiniteField) -> FRCode:
    """Lines of PG(2, q) as nodes over its points."""
    pts = projective_points(field, 3)
    index = {p: i for i, p in enumerate(pts)}
    nodes = [{index[p] for p in pts if field.dot(f, p) == 0} for f in pts]
    q = field.q
    return _code(len(pts), nodes, None, family="projective_plane", q=q,
                 repair={"d": q + 1, "beta": 1})


def steiner_triple(theta: int) -> FRCode:
    """STS(theta) by Bose (theta = 3 mod 6) or Skolem (theta = 1 mod 6)."""
    if theta < 7 or theta % 6 not in (1, 3):
        raise InvalidOrder(f"no Steiner triple system construction for theta={theta}")
    blocks = []
    if theta % 6 == 3:
        o = theta // 3  # odd order 2t+1
        t = (o - 1) // 2

        def pt(x, i):
            return (i % 3) * o + x

        def op(x, y):
            return ((x + y) * (t + 1)) % o

        for x in range(o):
            blocks.append({pt(x, 0), pt(x, 1), pt(x, 2)})
        for i in range(3):
            for x, y in itertools.combinations(range(o), 2):
                blocks.append({pt(x, i), pt(y, i), pt(op(x, y), i + 1)})
        method = "bose"
    else:
        t = (theta - 1) // 6
        o = 2 * t
        inf = 3 * o

        def pt(x, i):
            return (i % 3) * o + x

        def op(x, y):
            s = (x + y) % o
            return s // 2 if s % 2 == 0 else t + (s - 1) // 2

        for x in range(t):
            blocks.append({pt(x, 0), pt(x, 1), pt(x, 2)})
        for x in range(t):
            for i in range(3):
                blocks.append({inf, pt(t + x, i), pt(x, i + 1)})
        for i in range(3):
            for x, y in itertools.combinations(range(o), 2):
                blocks.append({pt(x, i), pt(y, i), pt(op(x, y), i + 1)})
        method = "skolem"
    code = _code(theta, blocks, None, family="steiner_triple", theta=theta, method=method,
                 repair={"d": 3, "beta": 1})
    if not is_steiner(code):
        raise AssertionError(f"{method} construction failed pair coverage for theta={theta}")
    return code
