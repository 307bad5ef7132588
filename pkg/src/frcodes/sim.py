"""End-to-end simulation: outer MDS code over GF(256), FR placement, failures,
download-only repair and reconstruction by a data collector."""
from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (FRCode, RepairTable, check_beta_recoverable, check_option, find_repair_table,
                   repair_parameters, validate)
from .errors import FileSizeMismatch, InsufficientSymbols, TooManySymbols, UnrepairableFailure
from .fields import gf

_F = gf(2, 8)  # modulus x^8+x^4+x^3+x+1
EXP = np.array(list(_F._exp) * 2, dtype=np.int32)
LOG = np.array([0 if v is None else v for v in _F._log], dtype=np.int32)
HEADER = 8


def gf_mul_scalar(c: int, vec: np.ndarray) -> np.ndarray:
    """Multiply a byte vector by the field constant c."""
    if c == 0:
        return np.zeros_like(vec)
    out = EXP[LOG[vec] + LOG[c]].astype(np.uint8)
    out[vec == 0] = 0
    return out


def gf_inv_matrix(A: list) -> list:
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = _F.inv(M[col][col])
        M[col] = [_F.mul(inv, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a ^ _F.mul(f, b) for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


@dataclass(frozen=True, eq=False)
class OuterCode:
    """Systematic MDS code: message symbols first, then parity symbols.

    Parity ``j`` is the value at point ``M+j`` of the polynomial of degree
    < M that takes the message values at points ``0..M-1``; with one parity
    symbol the plain XOR sum is used instead.
    """

    M_file: int
    theta: int
    generator: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.theta > 255:
            raise TooManySymbols(f"GF(256) supports at most 255 coded symbols, got {self.theta}")
        if not 1 <= self.M_file <= self.theta:
            raise FileSizeMismatch(f"message length {self.M_file} must be in 1..{self.theta}")
        M, th = self.M_file, self.theta
        G = [[1 if i == j else 0 for j in range(M)] + [0] * (th - M) for i in range(M)]
        if th - M == 1:
            for i in range(M):
                G[i][M] = 1
        else:
            for j in range(M, th):
                for i in range(M):
                    num = den = 1
                    for t in range(M):
                        if t != i:
                            num = _F.mul(num, j ^ t)
                            den = _F.mul(den, i ^ t)
                    G[i][j] = _F.div(num, den)
        object.__setattr__(self, "generator", tuple(tuple(r) for r in G))

    def encode(self, message: np.ndarray) -> np.ndarray:
        """``message`` is (M_file, L) uint8; returns the (theta, L) codeword."""
        out = np.zeros((self.theta, message.shape[1]), dtype=np.uint8)
        for j in range(self.theta):
            acc = np.zeros(message.shape[1], dtype=np.uint8)
            for i in range(self.M_file):
                c = self.generator[i][j]
                if c:
                    acc ^= gf_mul_scalar(c, message[i])
            out[j] = acc
        return out

    def decode(self, symbols: dict) -> np.ndarray:
        """Recover the message from any M_file coordinates ``{position: bytes}``."""
        if len(symbols) < self.M_file:
            raise InsufficientSymbols(f"need {self.M_file} coded symbols, have {len(symbols)}")
        cols = sorted(symbols)[: self.M_file]
        sub = [[self.generator[i][c] for c in cols] for i in range(self.M_file)]
        # codeword_c = sum_i G[i][c] m_i, so m = (sub^T)^{-1} y
        subT = [[sub[i][r] for i in range(self.M_file)] for r in range(self.M_file)]
        inv = gf_inv_matrix(subT)
        L = len(next(iter(symbols.values())))
        msg = np.zeros((self.M_file, L), dtype=np.uint8)
        for i in range(self.M_file):
            acc = np.zeros(L, dtype=np.uint8)
            for r, c in enumerate(cols):
                if inv[i][r]:
                    acc ^= gf_mul_scalar(inv[i][r], symbols[c])
            msg[i] = acc
        return msg


@dataclass
class ClusterState:
    code: FRCode
    outer: OuterCode
    d: int
    beta: int
    codeword: np.ndarray
    file_length: int
    alive: list
    store: list  # per node: {symbol: np.ndarray}
    table: Optional[RepairTable] = None
    log: list = field(default_factory=list)
    repairs: int = 0
    symbols_downloaded: int = 0
    bytes_downloaded: int = 0
    per_repair: list = field(default_factory=list)

    def verify(self) -> None:
        for j, ok in enumerate(self.alive):
            if not ok:
                continue
            held = self.store[j]
            assert set(held) == set(self.code.nodes[j]), f"node {j} holds the wrong symbols"
            for s, data in held.items():
                assert np.array_equal(data, self.codeword[s]), f"node {j} symbol {s} corrupted"


def _split(data: bytes, M_file: int, payload_size: Optional[int]) -> np.ndarray:
    framed = struct.pack(">Q", len(data)) + data
    if payload_size is None:
        payload_size = max(1, -(-len(framed) // M_file))
    cap = M_file * payload_size
    if len(framed) > cap:
        raise FileSizeMismatch(f"{len(data)} bytes do not fit in {M_file} symbols of {payload_size} bytes")
    buf = np.zeros(cap, dtype=np.uint8)
    buf[: len(framed)] = np.frombuffer(framed, dtype=np.uint8)
    return buf.reshape(M_file, payload_size)


def encode_store(data: bytes, code: FRCode, M_file: int, payload_size: Optional[int] = 64,
                 d: Optional[int] = None, beta: Optional[int] = None,
                 table: Optional[RepairTable] = None) -> ClusterState:
    """Encode ``data`` with the outer code and place symbol i on every node holding i."""
    validate(code)
    outer = OuterCode(M_file, code.theta)
    message = _split(data, M_file, payload_size)
    codeword = outer.encode(message)
    if d is None or beta is None:
        d, beta = repair_parameters(code)
    if table is None:
        table = find_repair_table(code, d, beta)
    table.verify(code)
    store = [{s: codeword[s].copy() for s in v} for v in code.nodes]
    state = ClusterState(code, outer, d, beta, codeword, len(data), [True] * code.n, store, table)
    state.log.append({"event": "store", "bytes": len(data), "M_file": M_file})
    return state


def _repair_one(state: ClusterState, j: int, helpers_ok: set) -> bool:
    code = state.code
    option = None
    if state.table is not None:
        for opt in state.table.options[j]:
            if all(h in helpers_ok for h in opt.helpers):
                option = opt
                break
    if option is None:
        option = check_beta_recoverable(code, j, helpers_ok, state.d, state.beta)
    if option is None:
        return False
    check_option(code, j, option, state.beta)
    new = {}
    moved = 0
    for h, part in zip(option.helpers, option.downloads):
        for s in part:
            new[s] = state.store[h][s].copy()
            moved += 1
            state.bytes_downloaded += new[s].nbytes
    assert moved == state.d * state.beta, "repair download differs from d*beta"
    state.store[j] = new
    state.alive[j] = True
    state.repairs += 1
    state.symbols_downloaded += moved
    state.per_repair.append(moved)
    state.log.append({"event": "repair", "node": j, "helpers": list(option.helpers), "symbols": moved})
    for s, data in new.items():
        assert np.array_equal(data, state.codeword[s]), "repaired content differs"
    return True


def fail_and_repair(state: ClusterState, failures, mode: str = "sequential") -> ClusterState:
    """Erase the listed nodes and rebuild them purely by download."""
    if mode not in ("static", "sequential"):
        raise ValueError(f"unknown mode {mode!r}")
    failures = sorted(set(failures))
    for j in failures:
        state.alive[j] = False
        state.store[j] = {}
    state.log.append({"event": "fail", "nodes": failures})
    pending = list(failures)
    if mode == "static":
        survivors = {i for i in range(state.code.n) if state.alive[i]}
        stuck = [j for j in pending if check_beta_recoverable(
            state.code, j, survivors, state.d, state.beta) is None]
        if stuck:
            raise UnrepairableFailure(f"nodes {stuck} cannot be rebuilt from the survivors", state, stuck)
        for j in pending:
            _repair_one(state, j, survivors)
        return state
    progress = True
    while pending and progress:
        progress = False
        for j in list(pending):
            alive = {i for i in range(state.code.n) if state.alive[i]}
            if _repair_one(state, j, alive):
                pending.remove(j)
                progress = True
    if pending:
        raise UnrepairableFailure(f"nodes {pending} cannot be rebuilt", state, pending)
    return state


def collect(state: ClusterState, nodes, M_file: Optional[int] = None) -> bytes:
    """Read the file back from the given nodes."""
    M_file = state.outer.M_file if M_file is None else M_file
    if M_file != state.outer.M_file:
        raise FileSizeMismatch("collector must use the stored message length")
    symbols = {}
    for j in nodes:
        if state.alive[j]:
            for s, data in state.store[j].items():
                symbols.setdefault(s, data)
    if len(symbols) < M_file:
        raise InsufficientSymbols(f"nodes {sorted(nodes)} expose {len(symbols)} symbols, need {M_file}")
    msg = state.outer.decode(symbols).reshape(-1).tobytes()
    (length,) = struct.unpack(">Q", msg[:HEADER])
    return msg[HEADER: HEADER + length]


# -- scenarios ---------------------------------------------------------------


def run_scenario(scenario: dict, base_dir: str = ".") -> dict:
    """Execute a JSON scenario and return its metrics record."""
    from .families import load_code

    code = load_code(scenario["code"], base_dir)
    rng = random.Random(scenario.get("seed", 0))
    M_file = int(scenario["M_file"])
    payload = scenario.get("payload_size", 64)
    size = scenario.get("file_bytes", M_file * payload - HEADER if payload else 256)
    data = bytes(rng.getrandbits(8) for _ in range(size))
    d, beta = scenario.get("d"), scenario.get("beta")
    state = encode_store(data, code, M_file, payload, d, beta)
    mode = scenario.get("mode", "sequential")
    events, reads = [], []
    failure_sets = [list(f) for f in scenario.get("failures", [])]
    if scenario.get("fail_each_single"):
        failure_sets += [[j] for j in range(code.n)]
    collect_sets = [list(c) for c in scenario.get("collects", [])]
    rc = scenario.get("random_collects")
    if rc:
        for _ in range(int(rc.get("count", 1))):
            collect_sets.append(sorted(rng.sample(range(code.n), int(rc["k"]))))
    success = True
    for fs in failure_sets:
        before = state.repairs
        try:
            fail_and_repair(state, fs, mode)
            state.verify()
            ok, stuck = True, []
        except UnrepairableFailure as exc:
            ok, stuck = False, list(exc.stuck)
            success = False
        events.append({"failed": fs, "ok": ok, "stuck": stuck, "repairs": state.repairs - before})
        round_reads = []
        for cs in collect_sets:
            try:
                got = collect(state, cs)
                good = got == data
                round_reads.append({"nodes": cs, "ok": good})
                success &= good
            except InsufficientSymbols as exc:
                round_reads.append({"nodes": cs, "ok": False, "reason": str(exc)})
                success = False
        reads.append(round_reads)
        if not ok:
            break
    if not failure_sets:
        round_reads = []
        for cs in collect_sets:
            try:
                good = collect(state, cs) == data
                round_reads.append({"nodes": cs, "ok": good})
                success &= good
            except InsufficientSymbols as exc:
                round_reads.append({"nodes": cs, "ok": False, "reason": str(exc)})
                success = False
        reads.append(round_reads)
    gamma = state.d * state.beta
    return {
        "code": {"n": code.n, "theta": code.theta, "alpha": len(code.nodes[0])},
        "M_file": M_file, "d": state.d, "beta": state.beta, "gamma": gamma,
        "repairs": state.repairs, "symbols_downloaded": state.symbols_downloaded,
        "bytes_moved": state.bytes_downloaded,
        "per_repair_downloads": sorted(set(state.per_repair)),
        "failure_events": events, "collects": reads, "success": bool(success),
    }
