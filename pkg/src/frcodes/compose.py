"""Operators that build new FR codes out of existing ones."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, asdict
from typing import Optional

from .core import FRCode, find_repair_table, repair_parameters, validate
from .errors import BadIndex, BudgetExceeded, NoResolution, NonDivisible, NotAnFRCode


def identity_code(t: int) -> FRCode:
    """t nodes each holding one private symbol (the identity incidence matrix)."""
    return FRCode(t, tuple(frozenset({i}) for i in range(t)), None, {"family": "identity", "t": t})


@dataclass(frozen=True)
class KroneckerMeta:
    factor1: tuple
    factor2: tuple
    expected: tuple
    expected_beta: Optional[int]
    beta: Optional[int]
    beta_source: str  # "predicted", "computed" or "none"

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def kronecker(c1: FRCode, c2: FRCode, certify: bool = True):
    """Tensor product of two codes; returns ``(code, KroneckerMeta)``.

    Node (i, j) = V_i x W_j sits at index ``j*n1 + i``; symbol (x, y) is
    ``x*theta2 + y``.  When both inputs are resolvable the product classes
    are all pairs (P, Q) of input classes.
    """
    p1, p2 = validate(c1), validate(c2)
    t2 = c2.theta
    nodes = []
    for j in range(c2.n):
        W = sorted(c2.nodes[j])
        for i in range(c1.n):
            nodes.append(frozenset(x * t2 + y for x in c1.nodes[i] for y in W))
    resolution = None
    if c1.resolution is not None and c2.resolution is not None:
        resolution = tuple(
            tuple(sorted(j * c1.n + i for i in P for j in Q))
            for P in c1.resolution for Q in c2.resolution
        )
    expected = (p1.n * p2.n, p1.theta * p2.theta, p1.alpha * p2.alpha, p1.rho * p2.rho)
    expected_beta = None
    if p1.alpha == p2.alpha and c1.max_pairwise_overlap() <= 1 and c2.max_pairwise_overlap() <= 1:
        expected_beta = p1.alpha
    meta = {"family": "kronecker", "op": "kronecker",
            "inputs": [c1.to_dict(), c2.to_dict()]}
    code = FRCode(c1.theta * t2, tuple(nodes), resolution, meta)
    beta, source = None, "none"
    if certify:
        alpha = expected[2]
        if expected_beta is not None:
            try:
                find_repair_table(code, alpha // expected_beta, expected_beta)
                beta, source = expected_beta, "predicted"
            except NotAnFRCode:
                pass
        if beta is None:
            try:
                _, beta = repair_parameters(code)
                source = "computed"
            except NotAnFRCode:
                pass
    info = KroneckerMeta(p1.astuple(), p2.astuple(), expected, expected_beta, beta, source)
    new_meta = dict(meta, kronecker=info.to_dict())
    if beta is not None:
        new_meta["repair"] = {"d": expected[2] // beta, "beta": beta, "source": source}
    return FRCode(code.theta, code.nodes, resolution, new_meta), info


def beta_expand(code: FRCode, m: int) -> FRCode:
    """Replace every symbol s by the m clones s*m .. s*m+m-1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return code
    nodes = tuple(frozenset(s * m + t for s in v for t in range(m)) for v in code.nodes)
    meta = {"family": "beta_expansion", "op": "expand", "m": m,
            "inputs": [code.to_dict()]}
    rep = code.meta.get("repair")
    if rep and rep.get("d") and rep.get("beta"):
        meta["repair"] = {"d": rep["d"], "beta": rep["beta"] * m}
    for key in ("local",):
        if key in code.meta:
            meta[key] = code.meta[key]
    return FRCode(code.theta * m, nodes, code.resolution, meta)


@dataclass(frozen=True)
class ExpansionCheck:
    expandable: bool
    base: Optional[FRCode] = None
    obstruction: Optional[str] = None

    def __bool__(self):
        return self.expandable


def is_trivially_expandable(code: FRCode, beta: int) -> ExpansionCheck:
    """Decide whether ``code`` is a beta-fold clone expansion of a smaller code."""
    alpha = len(code.nodes[0])
    if beta < 1 or alpha % beta or code.theta % beta:
        raise NonDivisible(f"beta={beta} must divide alpha={alpha} and theta={code.theta}")
    if beta == 1:
        return ExpansionCheck(True, code, None)
    th, al = code.theta // beta, alpha // beta
    bound = math.comb(th, al)
    if code.n > bound:
        return ExpansionCheck(False, None, f"n={code.n} > C({th},{al})={bound} distinct nodes")
    # symbols with identical supports are interchangeable; groups must come from one such class
    classes = defaultdict(list)
    for s in range(code.theta):
        classes[code.support[s]].append(s)
    groups = []
    for sup, syms in classes.items():
        if len(syms) % beta:
            return ExpansionCheck(False, None,
                                  f"symbol {syms[0]} shares its node support with {len(syms)} symbols, "
                                  f"not a multiple of {beta}")
        for i in range(0, len(syms), beta):
            groups.append(syms[i:i + beta])
    groups.sort(key=lambda g: g[0])
    of = {}
    for gi, g in enumerate(groups):
        for s in g:
            of[s] = gi
    nodes = tuple(frozenset(of[s] for s in v) for v in code.nodes)
    meta = {"family": "contracted", "beta": beta, "groups": groups}
    return ExpansionCheck(True, FRCode(len(groups), nodes, code.resolution, meta), None)


def disjoint_union(code: FRCode, copies: int) -> FRCode:
    """``copies`` symbol-disjoint copies of ``code``; copy c owns nodes c*n..c*n+n-1."""
    if copies < 1:
        raise ValueError("need at least one copy")
    if copies == 1:
        return code
    n, th = code.n, code.theta
    nodes = tuple(frozenset(c * th + s for s in v) for c in range(copies) for v in code.nodes)
    resolution = None
    if code.resolution is not None:
        resolution = tuple(tuple(c * n + i for c in range(copies) for i in cls) for cls in code.resolution)
    meta = {"family": "disjoint_union", "op": "union", "copies": copies,
            "inputs": [code.to_dict()],
            "local": {"copies": copies, "n_loc": n, "theta_loc": th,
                      "membership": [c for c in range(copies) for _ in range(n)]}}
    if "repair" in code.meta:
        meta["repair"] = dict(code.meta["repair"])
    return FRCode(copies * th, nodes, resolution, meta)


def select_classes(code: FRCode, indices) -> FRCode:
    """Keep only the listed parallel classes, in the given order."""
    if code.resolution is None:
        raise NoResolution("code has no recorded resolution")
    indices = list(indices)
    if not indices:
        raise BadIndex("select at least one class")
    if len(set(indices)) != len(indices):
        raise BadIndex(f"duplicate class indices in {indices}")
    bad = [i for i in indices if not 0 <= i < len(code.resolution)]
    if bad:
        raise BadIndex(f"class indices {bad} out of range 0..{len(code.resolution) - 1}")
    nodes, resolution = [], []
    for c in indices:
        start = len(nodes)
        nodes += [code.nodes[i] for i in code.resolution[c]]
        resolution.append(tuple(range(start, len(nodes))))
    meta = dict(code.meta)
    meta["selected_classes"] = indices
    if "r" in meta:
        meta["r"] = len(indices)
    if "functionals" in meta:
        from .designs import general_position
        from .fields import field_for_order

        funcs = [meta["functionals"][i] for i in indices]
        meta["functionals"] = funcs
        F = field_for_order(meta["q"])
        prefix = 0
        for t in range(1, min(meta["m"], len(funcs)) + 1):
            if general_position(F, [tuple(f) for f in funcs], t):
                prefix = t
            else:
                break
        meta["general_position"] = prefix
    if code.meta.get("family") == "grid" and len(indices) != 2:
        meta["family"] = "net"
    return FRCode(code.theta, tuple(nodes), tuple(resolution), meta)


def find_resolution(code: FRCode, threshold: int = 40) -> Optional[tuple]:
    """Partition the nodes into parallel classes by backtracking; None if impossible."""
    if code.n > threshold:
        raise BudgetExceeded(f"resolution search limited to n <= {threshold} (n={code.n})")
    alpha = len(code.nodes[0])
    if any(len(v) != alpha for v in code.nodes) or code.theta % alpha or code.n % (code.theta // alpha):
        return None
    full = (1 << code.theta) - 1
    masks = code.masks
    by_symbol = [[j for j in code.support[s]] for s in range(code.theta)]
    used = [False] * code.n
    classes = []

    def fill(cls, covered):
        if covered == full:
            classes.append(tuple(sorted(cls)))
            if start_class():
                return True
            classes.pop()
            return False
        low = (~covered & (covered + 1)).bit_length() - 1
        for j in by_symbol[low]:
            if not used[j] and not masks[j] & covered:
                used[j] = True
                cls.append(j)
                if fill(cls, covered | masks[j]):
                    return True
                cls.pop()
                used[j] = False
        return False

    def start_class():
        first = next((j for j in range(code.n) if not used[j]), None)
        if first is None:
            return True
        used[first] = True
        if fill([first], masks[first]):
            return True
        used[first] = False
        return False

    return tuple(classes) if start_class() else None
