"""FR-code data model, validation, exact uncoded repair and resilience.

A code is a symbol universe ``0..theta-1`` plus an ordered list of storage
nodes, each a set of symbols.  Everything downstream (constructions,
composition, analysis, simulation) passes :class:`FRCode` values around and
never mutates them.
"""
from __future__ import annotations

import itertools
import json
import math
import random
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import (
    BudgetExceeded,
    NonUniformNodeSize,
    NonUniformRepetition,
    NotAnFRCode,
    ParameterMismatch,
    UnusedSymbol,
)

DEFAULT_CAP = 10**6


def _mask(symbols: Iterable[int]) -> int:
    m = 0
    for s in symbols:
        m |= 1 << s
    return m


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True, eq=False)
class FRCode:
    theta: int
    nodes: tuple
    resolution: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = tuple(frozenset(int(s) for s in v) for v in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        for j, v in enumerate(nodes):
            bad = [s for s in v if not 0 <= s < self.theta]
            if bad:
                raise ValueError(f"node {j} holds symbols outside 0..{self.theta - 1}: {sorted(bad)}")
        if self.resolution is not None:
            res = tuple(tuple(int(i) for i in cls) for cls in self.resolution)
            object.__setattr__(self, "resolution", res)
            _check_resolution(self.theta, nodes, res)

    def __eq__(self, other):
        if not isinstance(other, FRCode):
            return NotImplemented
        return (self.theta, self.nodes, self.resolution) == (other.theta, other.nodes, other.resolution)

    def __hash__(self):
        return hash((self.theta, self.nodes, self.resolution))

    def __repr__(self):
        return f"FRCode(n={self.n}, theta={self.theta}, family={self.meta.get('family')!r})"

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def masks(self) -> tuple:
        return tuple(_mask(v) for v in self.nodes)

    @cached_property
    def support(self) -> tuple:
        """``support[s]`` is the sorted tuple of nodes storing symbol ``s``."""
        sup = [[] for _ in range(self.theta)]
        for j, v in enumerate(self.nodes):
            for s in v:
                sup[s].append(j)
        return tuple(tuple(x) for x in sup)

    @cached_property
    def overlaps(self) -> tuple:
        """Pairwise intersection sizes as an n x n tuple-of-tuples."""
        m = self.masks
        return tuple(tuple((a & b).bit_count() for b in m) for a in m)

    def max_pairwise_overlap(self) -> int:
        ov = self.overlaps
        return max((ov[i][j] for i in range(self.n) for j in range(i + 1, self.n)), default=0)

    def union_size(self, idx: Iterable[int]) -> int:
        u = 0
        for i in idx:
            u |= self.masks[i]
        return u.bit_count()

    def class_of(self) -> Optional[list]:
        if self.resolution is None:
            return None
        out = [None] * self.n
        for c, cls in enumerate(self.resolution):
            for i in cls:
                out[i] = c
        return out

    def with_meta(self, **updates) -> "FRCode":
        meta = dict(self.meta)
        meta.update(updates)
        return FRCode(self.theta, self.nodes, self.resolution, meta)

    # -- serialization -------------------------------------------------

    def to_dict(self, canonical: bool = True) -> dict:
        nodes = [sorted(v) for v in self.nodes]
        resolution = [list(c) for c in self.resolution] if self.resolution is not None else None
        if not canonical:
            nodes = [list(v) for v in self.nodes]
        return {"theta": self.theta, "nodes": nodes, "resolution": resolution, "meta": self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> "FRCode":
        return cls(int(d["theta"]), tuple(d["nodes"]), d.get("resolution"), dict(d.get("meta") or {}))

    def to_json(self, canonical: bool = True) -> str:
        return json.dumps(self.to_dict(canonical), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FRCode":
        return cls.from_dict(json.loads(text))


def _check_resolution(theta, nodes, resolution):
    seen = [c for cls in resolution for c in cls]
    if sorted(seen) != list(range(len(nodes))):
        raise ValueError("resolution classes must partition the node indices")
    full = (1 << theta) - 1
    for c, cls in enumerate(resolution):
        acc = 0
        for i in cls:
            m = _mask(nodes[i])
            if acc & m:
                raise ValueError(f"class {c}: nodes are not pairwise disjoint")
            acc |= m
        if acc != full:
            raise ValueError(f"class {c} does not cover all {theta} symbols")


@dataclass(frozen=True)
class CodeParams:
    n: int
    theta: int
    alpha: int
    rho: int
    beta: Optional[int] = None
    d: Optional[int] = None

    def __post_init__(self):
        if self.n * self.alpha != self.theta * self.rho:
            raise ParameterMismatch(f"n*alpha={self.n * self.alpha} != theta*rho={self.theta * self.rho}")
        if self.beta is not None and self.d is not None and self.d * self.beta != self.alpha:
            raise ParameterMismatch(f"d*beta={self.d * self.beta} != alpha={self.alpha}")

    @property
    def gamma(self) -> Optional[int]:
        if self.beta is None or self.d is None:
            return None
        return self.beta * self.d

    def astuple(self) -> tuple:
        return (self.n, self.theta, self.alpha, self.rho)

    def with_repair(self, d: int, beta: int) -> "CodeParams":
        return CodeParams(self.n, self.theta, self.alpha, self.rho, beta, d)

    def to_dict(self) -> dict:
        return {"n": self.n, "theta": self.theta, "alpha": self.alpha, "rho": self.rho,
                "beta": self.beta, "d": self.d, "gamma": self.gamma}


def validate(code: FRCode) -> CodeParams:
    """Check uniform node size and uniform repetition; return the parameters."""
    if code.n == 0:
        raise ValueError("code has no nodes")
    sizes = {len(v) for v in code.nodes}
    if len(sizes) != 1:
        alpha = len(code.nodes[0])
        bad = next(j for j, v in enumerate(code.nodes) if len(v) != alpha)
        raise NonUniformNodeSize(f"node {bad} has {len(code.nodes[bad])} symbols, node 0 has {alpha}")
    alpha = sizes.pop()
    reps = [len(s) for s in code.support]
    for s, r in enumerate(reps):
        if r == 0:
            raise UnusedSymbol(f"symbol {s} is stored on no node")
    if len(set(reps)) != 1:
        bad = next(s for s, r in enumerate(reps) if r != reps[0])
        raise NonUniformRepetition(f"symbol {bad} is repeated {reps[bad]} times, symbol 0 {reps[0]} times")
    if len(set(code.nodes)) != code.n:
        warnings.warn("code contains duplicate node sets", stacklevel=2)
    return CodeParams(code.n, code.theta, alpha, reps[0])


# -- beta-recoverability ---------------------------------------------------


@dataclass(frozen=True)
class RepairOption:
    helpers: tuple
    downloads: tuple  # one frozenset of symbols per helper

    def to_dict(self) -> dict:
        return {"helpers": list(self.helpers), "downloads": [sorted(b) for b in self.downloads]}


def check_option(code: FRCode, failed: int, option: RepairOption, beta: int) -> None:
    """Assert the repair-option invariants; raises AssertionError on violation."""
    target = code.nodes[failed]
    assert failed not in option.helpers, "a node cannot help repair itself"
    assert len(set(option.helpers)) == len(option.helpers), "helpers must be distinct"
    acc = set()
    for h, b in zip(option.helpers, option.downloads):
        assert len(b) == beta, f"helper {h} sends {len(b)} symbols, expected {beta}"
        assert b <= code.nodes[h] & target, f"helper {h} sends symbols it does not hold"
        assert not (acc & b), "download sets overlap"
        acc |= b
    assert acc == target, "downloads do not rebuild the failed node"


def _search_option(target: int, cands: list, d: int, beta: int, cap: int):
    """Assign every symbol of ``target`` to one of at most ``d`` helpers.

    ``cands`` is a list of ``(node, mask & target)`` pairs.  Symbols are
    handled smallest first; each either joins an open helper with spare
    capacity or opens a new helper.  Returns ``[(node, mask), ...]`` or None.
    """
    order = _bits(target)
    budget = [cap]

    def rec(pos, open_helpers, used):
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExceeded(f"repair search exceeded {cap} steps")
        if pos == len(order):
            return [(h, got) for h, _, got in open_helpers]
        s = order[pos]
        bit = 1 << s
        rest = target >> (s + 1) << (s + 1)
        # open helpers that can still finish must see enough unassigned symbols
        for idx, (h, avail, got) in enumerate(open_helpers):
            need = beta - got.bit_count()
            if need and avail & bit:
                if (avail & rest).bit_count() < need - 1:
                    continue
                nxt = list(open_helpers)
                nxt[idx] = (h, avail, got | bit)
                if _feasible(nxt, rest, beta):
                    r = rec(pos + 1, nxt, used)
                    if r is not None:
                        return r
        if len(open_helpers) < d:
            for h, avail in cands:
                if h in used or not avail & bit:
                    continue
                if (avail & rest).bit_count() < beta - 1:
                    continue
                nxt = open_helpers + [(h, avail, bit)]
                if _feasible(nxt, rest, beta):
                    r = rec(pos + 1, nxt, used | {h})
                    if r is not None:
                        return r
        return None

    return rec(0, [], frozenset())


def _feasible(open_helpers, rest, beta):
    for _, avail, got in open_helpers:
        if (avail & rest).bit_count() < beta - got.bit_count():
            return False
    return True


def check_beta_recoverable(code: FRCode, failed: int, survivors, d: int, beta: int,
                           cap: int = DEFAULT_CAP) -> Optional[RepairOption]:
    """Find ``d`` surviving helpers that rebuild ``failed`` with ``beta`` symbols each."""
    target = code.masks[failed]
    alpha = target.bit_count()
    if d * beta != alpha:
        raise ParameterMismatch(f"d*beta={d * beta} but node {failed} stores {alpha} symbols")
    survivors = set(survivors)
    if failed in survivors:
        raise ValueError("failed node listed among survivors")

    # parallel classes give a ready-made repair when intact
    cls_of = code.class_of()
    if cls_of is not None:
        for c, cls in enumerate(code.resolution):
            if c == cls_of[failed]:
                continue
            helpers = [i for i in cls if code.masks[i] & target]
            if len(helpers) != d or not all(i in survivors for i in helpers):
                continue
            if all((code.masks[i] & target).bit_count() == beta for i in helpers):
                return RepairOption(tuple(helpers),
                                    tuple(frozenset(_bits(code.masks[i] & target)) for i in helpers))

    cands = []
    for i in survivors:
        inter = code.masks[i] & target
        if inter.bit_count() >= beta:
            cands.append((i, inter))
    if len(cands) < d:
        return None
    cover = 0
    for _, m in cands:
        cover |= m
    if cover != target:
        return None
    cands.sort(key=lambda t: (-t[1].bit_count(), t[0]))
    found = _search_option(target, cands, d, beta, cap)
    if found is None:
        return None
    found.sort()
    return RepairOption(tuple(h for h, _ in found), tuple(frozenset(_bits(m)) for _, m in found))


@dataclass(frozen=True)
class RepairTable:
    d: int
    beta: int
    options: tuple  # per node: tuple of RepairOption

    def verify(self, code: FRCode) -> None:
        assert len(self.options) == code.n
        for j, opts in enumerate(self.options):
            assert opts, f"node {j} has no repair option"
            for opt in opts:
                assert len(opt.helpers) == self.d
                check_option(code, j, opt, self.beta)

    def to_dict(self) -> dict:
        return {"d": self.d, "beta": self.beta,
                "options": [[o.to_dict() for o in opts] for opts in self.options]}


def find_repair_table(code: FRCode, d: int, beta: int, cap: int = DEFAULT_CAP) -> RepairTable:
    """One repair option per node, assuming every other node is alive."""
    everyone = set(range(code.n))
    options = []
    for j in range(code.n):
        opt = check_beta_recoverable(code, j, everyone - {j}, d, beta, cap)
        if opt is None:
            raise NotAnFRCode(f"node {j} is not {beta}-recoverable from any {d} other nodes")
        options.append((opt,))
    return RepairTable(d, beta, tuple(options))


def repair_parameters(code: FRCode, cap: int = DEFAULT_CAP) -> tuple:
    """Return ``(d, beta)``: the recorded values if present, else the smallest
    ``beta`` (largest ``d``) admitting a full repair table."""
    rep = code.meta.get("repair")
    if rep and rep.get("d") and rep.get("beta"):
        return int(rep["d"]), int(rep["beta"])
    alpha = len(code.nodes[0])
    for beta in range(1, alpha + 1):
        if alpha % beta:
            continue
        try:
            find_repair_table(code, alpha // beta, beta, cap)
        except NotAnFRCode:
            continue
        return alpha // beta, beta
    raise NotAnFRCode("no beta admits a full repair table")


# -- resilience --------------------------------------------------------------


@dataclass(frozen=True)
class ResilienceReport:
    rho_res_static: Optional[int]
    rho_res_sequential: Optional[int]
    exhaustive: bool
    counterexample_static: Optional[tuple] = None
    counterexample_sequential: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "static": self.rho_res_static,
            "sequential": self.rho_res_sequential,
            "exhaustive": self.exhaustive,
            "counterexample_static": list(self.counterexample_static) if self.counterexample_static else None,
            "counterexample_sequential": (list(self.counterexample_sequential)
                                          if self.counterexample_sequential else None),
        }


class _Recoverer:
    """Memoized recoverability keyed on the survivors that could actually help."""

    def __init__(self, code, d, beta, cap):
        self.code, self.d, self.beta, self.cap = code, d, beta, cap
        m = code.masks
        self.useful = [
            sum(1 << i for i in range(code.n) if i != j and (m[i] & m[j]).bit_count() >= beta)
            for j in range(code.n)
        ]
        self.cache = {}

    def ok(self, j, alive_mask):
        key = (j, alive_mask & self.useful[j])
        hit = self.cache.get(key)
        if hit is None:
            hit = check_beta_recoverable(self.code, j, _bits(key[1]), self.d, self.beta, self.cap) is not None
            self.cache[key] = hit
        return hit


def _static_ok(rec, failed, full):
    alive = full
    for j in failed:
        alive &= ~(1 << j)
    return all(rec.ok(j, alive) for j in failed)


def _sequential_ok(rec, failed, full):
    alive = full
    for j in failed:
        alive &= ~(1 << j)
    pending = list(failed)
    progress = True
    while pending and progress:
        progress = False
        for j in list(pending):
            if rec.ok(j, alive):
                alive |= 1 << j
                pending.remove(j)
                progress = True
    return not pending


def _failure_sets(n, tau, budget, rng):
    total = math.comb(n, tau)
    if total <= budget:
        return itertools.combinations(range(n), tau), True
    return (tuple(sorted(rng.sample(range(n), tau))) for _ in range(budget)), False


def resilience(code: FRCode, d: int, beta: int, mode: str = "both", budget: int = DEFAULT_CAP,
               seed: int = 0, cap: int = DEFAULT_CAP) -> ResilienceReport:
    """Largest tau such that every tau-failure pattern is fully repairable.

    ``static``: each failed node must be repairable from the untouched
    survivors.  ``sequential``: repaired nodes may help later repairs; the
    greedy fixed point decides this exactly because repairs only ever grow
    the survivor set.  Levels with more than ``budget`` patterns are sampled,
    so the result is then only an upper estimate, flagged ``exhaustive=False``.
    """
    if mode not in ("static", "sequential", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    rec = _Recoverer(code, d, beta, cap)
    rng = random.Random(seed)
    full = (1 << code.n) - 1
    exhaustive = True
    results = {}
    witnesses = {}
    modes = ("static", "sequential") if mode == "both" else (mode,)
    for md in modes:
        check = _static_ok if md == "static" else _sequential_ok
        value = code.n - 1
        witness = None
        for tau in range(1, code.n):
            sets, exact = _failure_sets(code.n, tau, budget, rng)
            exhaustive &= exact
            bad = next((f for f in sets if not check(rec, f, full)), None)
            if bad is not None:
                value, witness = tau - 1, tuple(bad)
                break
        results[md] = value
        witnesses[md] = witness
    return ResilienceReport(results.get("static"), results.get("sequential"), exhaustive,
                            witnesses.get("static"), witnesses.get("sequential"))


# -- transposition and export ---------------------------------------------


def transpose(code: FRCode) -> FRCode:
    """Swap the roles of nodes and symbols (transpose of the incidence matrix)."""
    nodes = tuple(frozenset(code.support[s]) for s in range(code.theta))
    meta = {"family": "transpose", "op": "transpose", "inputs": [code.to_dict()]}
    return FRCode(code.n, nodes, None, meta)


def incidence_matrix(code: FRCode):
    import numpy as np

    N = np.zeros((code.theta, code.n), dtype=np.int64)
    for j, v in enumerate(code.nodes):
        for s in v:
            N[s, j] = 1
    return N


def bipartite_export(code: FRCode, name: str = "fr") -> str:
    """DOT text for the node/symbol bipartite graph."""
    lines = [f"graph {name} {{"]
    if code.resolution:
        for c, cls in enumerate(code.resolution):
            lines.append(f"  subgraph cluster_{c} {{")
            lines.append(f'    label="class {c}";')
            for i in cls:
                lines.append(f"    n{i};")
            lines.append("  }")
    for j in range(code.n):
        lines.append(f'  n{j} [shape=box,label="V{j}"];')
    for s in range(code.theta):
        lines.append(f'  s{s} [shape=circle,label="{s}"];')
    for j, v in enumerate(code.nodes):
        for s in sorted(v):
            lines.append(f"  n{j} -- s{s};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def code_from_blocks(blocks: Sequence[Iterable[int]], theta: Optional[int] = None, **meta) -> FRCode:
    blocks = [frozenset(b) for b in blocks]
    if theta is None:
        theta = 1 + max(max(b) for b in blocks)
    return FRCode(theta, tuple(blocks), None, dict(meta))
